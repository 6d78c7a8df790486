#include "wrist/stream.hpp"

#include <chrono>
#include <cstdio>
#include <istream>
#include <thread>

#include "wrist/eval.hpp"
#include "wrist/features.hpp"

namespace wrist {

Segmenter::Segmenter(std::size_t max_samples, WarningSink warn)
    : max_samples_(max_samples), warn_(std::move(warn)) {}

std::optional<Segment> Segmenter::push_event(const ImuSample& e) {
    if (has_last_ && e.t < last_t_)
        throw SequenceError(0, "time regression from " + format_double(last_t_) + " to " + format_double(e.t));
    if (open_ && e.engaged && e.t == last_t_)
        throw SequenceError(0, "repeated timestamp " + format_double(e.t) + " inside a segment");
    has_last_ = true;
    last_t_ = e.t;

    if (!e.engaged) return open_ ? close() : std::nullopt;
    if (!open_) {
        open_ = true;
        buffer_.clear();
    }
    if (buffer_.size() == max_samples_) {
        double t0 = buffer_.front().t;
        buffer_.clear();
        open_ = false;
        throw OverflowError("segment starting at t=" + format_double(t0) + " exceeded " +
                            std::to_string(max_samples_) + " samples; discarded");
    }
    buffer_.push_back(e);
    return std::nullopt;
}

std::optional<Segment> Segmenter::flush() { return open_ ? close() : std::nullopt; }

void Segmenter::reset() {
    buffer_.clear();
    open_ = false;
    has_last_ = false;
}

std::optional<Segment> Segmenter::close() {
    open_ = false;
    Segment s;
    s.samples.swap(buffer_);
    if (s.samples.size() < kMinSegmentSamples) {
        if (warn_)
            warn_("dropped " + std::to_string(s.samples.size()) + "-sample segment at t=" +
                  format_double(s.samples.front().t) + " (minimum " + std::to_string(kMinSegmentSamples) + ")");
        return std::nullopt;
    }
    return s;
}

std::string model_id(const GbdtModel& model) {
    // FNV-1a over the serialized model
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : save_model(model)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void check_compatible(const GbdtModel& model) {
    if (model.feature_names != feature_names())
        throw CompatibilityError("model features do not match the 31 engineered features");
}

namespace {

Prediction predict_with_id(const GbdtModel& model, const Segment& segment, const std::string& id) {
    auto f = extract_features(segment);
    Prediction p;
    p.t_start = segment.t_start();
    p.t_end = segment.t_end();
    p.probability = predict_proba(model, f);
    p.digit = p.probability >= kDecisionThreshold ? 1 : 0;
    p.model_id = id;
    return p;
}

}  // namespace

Prediction predict_segment(const GbdtModel& model, const Segment& segment) {
    check_compatible(model);
    return predict_with_id(model, segment, model_id(model));
}

ReplayResult replay(std::istream& in, const GbdtModel& model, const ReplayOptions& options,
                    const WarningSink& warn) {
    check_compatible(model);
    const std::string id = model_id(model);
    ReplayResult result;
    Segmenter seg(options.max_samples, warn);

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) return result;
    line_no = 1;
    check_trace_header(line);

    bool skipping = false;  // lenient mode waits for switch=0 after an error
    bool has_prev = false;
    double prev_t = 0;
    auto on_error = [&](const std::string& msg) {
        if (!options.lenient) throw;
        result.errors.push_back(msg);
        if (warn) warn(msg);
        seg.reset();
        skipping = true;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        try {
            TraceRow row = parse_trace_row(line, line_no);
            if (options.real_time && has_prev && row.sample.t > prev_t)
                std::this_thread::sleep_for(std::chrono::duration<double>(row.sample.t - prev_t));
            has_prev = true;
            prev_t = row.sample.t;
            if (skipping) {
                if (row.sample.engaged) continue;
                skipping = false;
            }
            std::optional<Segment> done;
            try {
                done = seg.push_event(row.sample);
            } catch (const SequenceError& e) {
                throw SequenceError(line_no, e.what());
            } catch (const OverflowError& e) {
                throw OverflowError("line " + std::to_string(line_no) + ": " + e.what());
            }
            if (done) {
                result.predictions.push_back(predict_with_id(model, *done, id));
                if (options.on_prediction) options.on_prediction(result.predictions.back());
            }
        } catch (const Error& e) {
            on_error(e.what());
        }
    }
    if (auto last = seg.flush()) {
        result.predictions.push_back(predict_with_id(model, *last, id));
        if (options.on_prediction) options.on_prediction(result.predictions.back());
    }
    return result;
}

std::string format_prediction(const Prediction& p) {
    char prob[32];
    std::snprintf(prob, sizeof prob, "%.6f", p.probability);
    return format_double(p.t_start) + "," + format_double(p.t_end) + "," + std::to_string(p.digit) + "," + prob;
}

}  // namespace wrist
