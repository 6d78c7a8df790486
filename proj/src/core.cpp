#include "wrist/core.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace wrist {

namespace {

std::string at_line(std::size_t line, const std::string& what) {
    if (line == 0) return what;
    return "line " + std::to_string(line) + ": " + what;
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

long parse_int(std::string_view field, std::size_t line_no, const char* name) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(line_no, std::string("bad ") + name + " field '" + std::string(field) + "'");
    return v;
}

}  // namespace

ParseError::ParseError(std::size_t l, const std::string& what)
    : Error(at_line(l, what)), line(l) {}
SequenceError::SequenceError(std::size_t l, const std::string& what)
    : Error(at_line(l, what)), line(l) {}
LabelError::LabelError(std::size_t l, const std::string& what)
    : Error(at_line(l, what)), line(l) {}
ValidationError::ValidationError(const std::string& context, std::vector<std::string> i)
    : Error(context + ": " + join(i)), issues(std::move(i)) {}

std::size_t Dataset::count(int label) const {
    std::size_t n = 0;
    for (const auto& s : segments)
        if (s.label == label) ++n;
    return n;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.segments.reserve(indices.size());
    for (auto i : indices) out.segments.push_back(segments.at(i));
    return out;
}

Dataset make_dataset(std::vector<Segment> segments) {
    for (std::size_t i = 0; i < segments.size(); ++i)
        if (!segments[i].label)
            throw DomainError("segment " + std::to_string(i) + " has no label");
    return Dataset{std::move(segments)};
}

std::string format_double(double v) {
    char buf[32];
    int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

double parse_double(std::string_view field, std::size_t line_no) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
        throw ParseError(line_no, "non-numeric field '" + std::string(field) + "'");
    if (!std::isfinite(v)) throw ParseError(line_no, "non-finite value '" + std::string(field) + "'");
    return v;
}

void check_trace_header(std::string_view line) {
    if (strip_cr(line) != kTraceHeader)
        throw ParseError(1, "expected header '" + std::string(kTraceHeader) + "'");
}

TraceRow parse_trace_row(std::string_view line, std::size_t line_no) {
    line = strip_cr(line);
    std::string_view f[9];
    std::size_t n = 0, start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            if (n == 9) throw ParseError(line_no, "expected 9 fields, got more");
            f[n++] = line.substr(start, i - start);
            start = i + 1;
        }
    }
    if (n != 9) throw ParseError(line_no, "expected 9 fields, got " + std::to_string(n));

    TraceRow row;
    auto& s = row.sample;
    s.t = parse_double(f[0], line_no);
    s.ax = parse_double(f[1], line_no);
    s.ay = parse_double(f[2], line_no);
    s.az = parse_double(f[3], line_no);
    s.gx = parse_double(f[4], line_no);
    s.gy = parse_double(f[5], line_no);
    s.gz = parse_double(f[6], line_no);
    long sw = parse_int(f[7], line_no, "switch");
    if (sw != 0 && sw != 1) throw ParseError(line_no, "switch must be 0 or 1");
    s.engaged = sw == 1;
    long label = parse_int(f[8], line_no, "label");
    if (label < -1 || label > 1) throw ParseError(line_no, "label must be 0, 1 or -1");
    row.label = static_cast<int>(label);
    return row;
}

std::vector<Segment> parse_trace_csv(std::istream& in) {
    std::vector<Segment> out;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) return out;
    line_no = 1;
    check_trace_header(line);

    bool open = false;
    int run_label = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip_cr(line).empty()) continue;
        TraceRow row = parse_trace_row(line, line_no);
        if (!row.sample.engaged) {
            open = false;
            continue;
        }
        if (!open) {
            out.emplace_back();
            open = true;
            run_label = row.label;
            if (row.label >= 0) out.back().label = row.label;
        } else {
            if (row.sample.t <= out.back().samples.back().t)
                throw SequenceError(line_no, "time does not increase within a segment");
            if (row.label != run_label)
                throw LabelError(line_no, "label changes within a segment");
        }
        out.back().samples.push_back(row.sample);
    }
    return out;
}

std::vector<Segment> parse_trace_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_trace_csv(in);
}

namespace {

void write_row(std::ostream& out, const ImuSample& s, int label) {
    out << format_double(s.t) << ',' << format_double(s.ax) << ',' << format_double(s.ay) << ','
        << format_double(s.az) << ',' << format_double(s.gx) << ',' << format_double(s.gy) << ','
        << format_double(s.gz) << ',' << (s.engaged ? 1 : 0) << ',' << label << '\n';
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<Segment>& segments, bool require_labels) {
    out << kTraceHeader << '\n';
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        if (require_labels && !seg.label)
            throw DomainError("segment " + std::to_string(i) + " has no label");
        if (i > 0 && !segments[i - 1].samples.empty()) {
            ImuSample gap{};
            gap.t = segments[i - 1].samples.back().t;
            gap.engaged = false;
            write_row(out, gap, -1);
        }
        int label = seg.label.value_or(-1);
        for (const auto& s : seg.samples) {
            ImuSample row = s;
            row.engaged = true;
            write_row(out, row, label);
        }
    }
}

std::string write_trace_csv(const std::vector<Segment>& segments, bool require_labels) {
    std::ostringstream out;
    write_trace_csv(out, segments, require_labels);
    return out.str();
}

ValidationResult validate_segment(const Segment& segment) {
    ValidationResult r;
    const auto& s = segment.samples;
    if (s.size() < kMinSegmentSamples)
        r.issues.push_back("too short (" + std::to_string(s.size()) + " samples, minimum " +
                           std::to_string(kMinSegmentSamples) + ")");
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& x = s[i];
        for (double v : {x.t, x.ax, x.ay, x.az, x.gx, x.gy, x.gz}) {
            if (!std::isfinite(v)) {
                r.issues.push_back("non-finite value at sample " + std::to_string(i));
                break;
            }
        }
        if (!x.engaged) r.issues.push_back("switch off at sample " + std::to_string(i));
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (!(s[i].t > s[i - 1].t)) {
            r.issues.push_back("non-monotone time at sample " + std::to_string(i));
            break;
        }
    }
    if (segment.label && *segment.label != 0 && *segment.label != 1)
        r.issues.push_back("label must be 0 or 1");
    return r;
}

void require_valid(const Segment& segment, const std::string& context) {
    auto r = validate_segment(segment);
    if (!r.ok()) throw ValidationError(context, std::move(r.issues));
}

}  // namespace wrist
