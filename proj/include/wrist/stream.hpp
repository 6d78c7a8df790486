#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wrist/core.hpp"
#include "wrist/gbdt.hpp"

namespace wrist {

class CompatibilityError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

using WarningSink = std::function<void(const std::string&)>;

// Switch-gated segmenter. Single owner; not safe for concurrent mutation.
class Segmenter {
public:
    explicit Segmenter(std::size_t max_samples = 100000, WarningSink warn = {});

    // Emits a segment on the falling edge. Throws SequenceError on time regression
    // and OverflowError (after discarding the buffer) past max_samples.
    std::optional<Segment> push_event(const ImuSample& event);
    // Closes an open buffer as if the switch had been released.
    std::optional<Segment> flush();
    // Drops any open buffer and forgets the last timestamp.
    void reset();

    bool engaged() const { return open_; }
    std::size_t buffered() const { return buffer_.size(); }

private:
    std::optional<Segment> close();

    std::size_t max_samples_;
    WarningSink warn_;
    std::vector<ImuSample> buffer_;
    bool open_ = false;
    bool has_last_ = false;
    double last_t_ = 0;
};

struct Prediction {
    double t_start = 0, t_end = 0;
    int digit = 0;
    double probability = 0;
    std::string model_id;
};

std::string model_id(const GbdtModel& model);
void check_compatible(const GbdtModel& model);

Prediction predict_segment(const GbdtModel& model, const Segment& segment);

struct ReplayOptions {
    bool real_time = false;
    bool lenient = false;
    std::size_t max_samples = 100000;
    std::function<void(const Prediction&)> on_prediction;  // called as each segment closes
};

struct ReplayResult {
    std::vector<Prediction> predictions;
    std::vector<std::string> errors;  // only filled in lenient mode
};

ReplayResult replay(std::istream& trace, const GbdtModel& model, const ReplayOptions& options = {},
                    const WarningSink& warn = {});

// t_start,t_end,digit,probability with a 6-decimal probability.
std::string format_prediction(const Prediction& p);

}  // namespace wrist
