#include "wrist/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace wrist {

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const char* ch : {"ax", "ay", "az", "gx", "gy", "gz", "vx", "vy", "vz"})
            for (const char* st : {"min", "mean", "max"}) n.push_back(std::string(ch) + "_" + st);
        for (const char* d : {"dx", "dy", "dz", "d_total"}) n.emplace_back(d);
        return n;
    }();
    return names;
}

std::size_t feature_index(const std::string& name) {
    const auto& n = feature_names();
    auto it = std::find(n.begin(), n.end(), name);
    if (it == n.end()) throw DomainError("unknown feature '" + name + "'");
    return static_cast<std::size_t>(it - n.begin());
}

std::vector<double> integrate_trapezoid(std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size())
        throw DomainError("integrate_trapezoid: length mismatch");
    if (times.size() < 2) throw DomainError("integrate_trapezoid: need at least 2 samples");
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t i = 1; i < times.size(); ++i) {
        double dt = times[i] - times[i - 1];
        if (!(dt > 0)) throw DomainError("integrate_trapezoid: times not strictly increasing");
        out[i] = out[i - 1] + (values[i] + values[i - 1]) / 2 * dt;
    }
    return out;
}

namespace {

void summarize(const std::vector<double>& c, double* out) {
    double lo = c[0], hi = c[0], sum = 0;
    for (double v : c) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    // rounding can push the mean a hair outside [min, max] on near-constant channels
    out[0] = lo;
    out[1] = std::clamp(sum / static_cast<double>(c.size()), lo, hi);
    out[2] = hi;
}

}  // namespace

FeatureVector extract_features(const Segment& segment) {
    require_valid(segment, "extract_features");
    const auto& s = segment.samples;
    const std::size_t n = s.size();
    std::vector<double> t(n);
    std::vector<std::vector<double>> ch(6, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = s[i].t;
        ch[0][i] = s[i].ax;
        ch[1][i] = s[i].ay;
        ch[2][i] = s[i].az;
        ch[3][i] = s[i].gx;
        ch[4][i] = s[i].gy;
        ch[5][i] = s[i].gz;
    }

    FeatureVector f{};
    for (int c = 0; c < 6; ++c) summarize(ch[c], &f[3 * c]);
    double d[3];
    for (int a = 0; a < 3; ++a) {
        auto v = integrate_trapezoid(t, ch[a]);
        summarize(v, &f[18 + 3 * a]);
        d[a] = integrate_trapezoid(t, v).back();
    }
    f[27] = d[0];
    f[28] = d[1];
    f[29] = d[2];
    f[30] = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    return f;
}

LabeledMatrix extract_matrix(const std::vector<Segment>& segments) {
    LabeledMatrix m{Matrix(segments.size(), kFeatureCount), std::vector<int>(segments.size(), -1)};
    for (std::size_t i = 0; i < segments.size(); ++i) {
        FeatureVector f;
        try {
            f = extract_features(segments[i]);
        } catch (const Error& e) {
            throw DomainError("segment " + std::to_string(i) + ": " + e.what());
        }
        std::copy(f.begin(), f.end(), m.X.row(i).begin());
        m.y[i] = segments[i].label.value_or(-1);
    }
    return m;
}

LabeledMatrix extract_matrix(const Dataset& dataset) {
    for (std::size_t i = 0; i < dataset.segments.size(); ++i)
        if (!dataset.segments[i].label)
            throw DomainError("segment " + std::to_string(i) + " has no label");
    return extract_matrix(dataset.segments);
}

void write_feature_csv(std::ostream& out, const LabeledMatrix& m, const std::vector<std::string>& names) {
    if (names.size() != m.X.cols) throw DomainError("feature csv: name count does not match columns");
    for (const auto& n : names) out << n << ',';
    out << "label\n";
    for (std::size_t i = 0; i < m.X.rows; ++i) {
        for (std::size_t j = 0; j < m.X.cols; ++j) out << format_double(m.X(i, j)) << ',';
        out << m.y[i] << '\n';
    }
}

LabeledMatrix read_feature_csv(std::istream& in, std::vector<std::string>* names_out) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty feature file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> names;
    {
        std::istringstream hs(line);
        std::string tok;
        while (std::getline(hs, tok, ',')) names.push_back(tok);
    }
    if (names.size() < 2 || names.back() != "label")
        throw ParseError(1, "feature header must end with 'label'");
    names.pop_back();
    const std::size_t p = names.size();

    LabeledMatrix m;
    m.X.cols = p;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view sv(line);
        std::size_t start = 0;
        for (std::size_t i = 0; i <= sv.size(); ++i)
            if (i == sv.size() || sv[i] == ',') {
                f.push_back(sv.substr(start, i - start));
                start = i + 1;
            }
        if (f.size() != p + 1)
            throw ParseError(line_no, "expected " + std::to_string(p + 1) + " fields, got " +
                                          std::to_string(f.size()));
        for (std::size_t j = 0; j < p; ++j) m.X.data.push_back(parse_double(f[j], line_no));
        double lab = parse_double(f[p], line_no);
        if (lab != 0 && lab != 1 && lab != -1) throw ParseError(line_no, "label must be 0, 1 or -1");
        m.y.push_back(static_cast<int>(lab));
        ++m.X.rows;
    }
    if (names_out) *names_out = std::move(names);
    return m;
}

}  // namespace wrist
