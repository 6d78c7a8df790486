#pragma once

#include <cstdint>

#include "wrist/core.hpp"

namespace wrist {

struct GeneratorConfig {
    double sample_rate = 100.0;           // Hz
    double duration_zero[2] = {0.8, 1.6};  // seconds
    double duration_one[2] = {0.4, 0.9};
    double stroke_extent = 0.10;  // m
    double accel_noise_sd = 0.05;  // m/s^2
    double angle_noise_sd = 0.5;   // degrees
    double tilt_gain_zero = 12.0;  // degrees
    double tilt_gain_one = 4.0;

    void validate() const;
};

// Per-segment random draws. The noise-free trajectory is a closed-form
// function of these; the noise-scaled terms vanish when both noise SDs are 0.
struct SegmentShape {
    int digit = 0;
    std::size_t n = 0;      // sample count
    double duration = 0;    // t of the last sample
    double rx = 0, ry = 0;  // digit 0 ellipse semi-axes, m
    double direction = 1;   // digit 0: +1 counterclockwise start, -1 clockwise
    double wobble = 0;      // digit 0 x-pitch bump amplitude, signed
    double flick = 0;       // digit 1 hook, fraction of the stroke
    double lift = 0;        // digit 1 z motion, m
    double loop = 0;        // digit 0 z motion, m
    // noise-scaled nuisances
    double roll = 0;                                  // deg, lowers z-pitch at rest
    double drift_x = 0, drift_y = 0, drift_bump = 0;  // m, rest-to-rest hand drift
    double gx_offset = 0, gy_offset = 0;              // deg
};

SegmentShape draw_shape(int digit, const GeneratorConfig& config, std::uint64_t seed);

Segment generate_segment(int digit, const GeneratorConfig& config, std::uint64_t seed);

// n_per_class segments of digit 0 followed by n_per_class of digit 1. Segment
// (digit, i) uses seed derive_seed(seed, digit, i); segments are laid end to end
// on one clock with a one second pause between them.
Dataset generate_corpus(std::size_t n_per_class, const GeneratorConfig& config, std::uint64_t seed);

}  // namespace wrist
