#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wrist {

// Every library failure derives from Error so the CLI can map it to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed CSV row; line is 1-based and counts the header, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line;
};

class SequenceError : public Error {
public:
    SequenceError(std::size_t line, const std::string& what);
    std::size_t line;
};

class LabelError : public Error {
public:
    LabelError(std::size_t line, const std::string& what);
    std::size_t line;
};

class ValidationError : public Error {
public:
    ValidationError(const std::string& context, std::vector<std::string> issues);
    std::vector<std::string> issues;
};

inline constexpr std::size_t kMinSegmentSamples = 4;
inline constexpr std::string_view kTraceHeader = "t,ax,ay,az,gx,gy,gz,switch,label";

// Accelerations in m/s^2, pitch angles in degrees.
struct ImuSample {
    double t = 0, ax = 0, ay = 0, az = 0, gx = 0, gy = 0, gz = 0;
    bool engaged = true;

    bool operator==(const ImuSample&) const = default;
};

struct Segment {
    std::vector<ImuSample> samples;
    std::optional<int> label;

    bool operator==(const Segment&) const = default;
    double t_start() const { return samples.empty() ? 0.0 : samples.front().t; }
    double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
};

struct Dataset {
    std::vector<Segment> segments;

    std::size_t size() const { return segments.size(); }
    std::size_t count(int label) const;
    Dataset subset(const std::vector<std::size_t>& indices) const;
};

// Requires every segment to be labeled.
Dataset make_dataset(std::vector<Segment> segments);

// One decoded CSV row. label is -1 when unlabeled.
struct TraceRow {
    ImuSample sample;
    int label = -1;
};

TraceRow parse_trace_row(std::string_view line, std::size_t line_no);
void check_trace_header(std::string_view line);

std::vector<Segment> parse_trace_csv(std::istream& in);
std::vector<Segment> parse_trace_csv(std::string_view text);

// Consecutive segments are separated by one switch=0 row so they stay distinct runs.
void write_trace_csv(std::ostream& out, const std::vector<Segment>& segments,
                     bool require_labels = false);
std::string write_trace_csv(const std::vector<Segment>& segments, bool require_labels = false);

struct ValidationResult {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

ValidationResult validate_segment(const Segment& segment);
void require_valid(const Segment& segment, const std::string& context);

// %.17g, enough digits for an exact read-back of any double.
std::string format_double(double v);
double parse_double(std::string_view field, std::size_t line_no);

}  // namespace wrist
