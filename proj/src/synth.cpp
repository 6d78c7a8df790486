#include "wrist/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wrist/detmath.hpp"
#include "wrist/rng.hpp"

namespace wrist {

namespace {

using detmath::kTwoPi;

// Shape constants of the generative model. Lengths are fractions of the
// stroke extent, angles in degrees unless noted.
constexpr int kDurationDraws = 3;  // duration = lo + (hi - lo) * mean of 3 uniforms
constexpr double kRxLo = 0.2814, kRxHi = 0.5;  // 2 rx stays inside the box
constexpr double kRyLo = 0.1884, kRyHi = 0.2266;
constexpr double kTroughDepth = 0.2377;   // digit 0 negative lobe of z-pitch
constexpr double kTiltTempo0 = 0.01559;   // digit 0 amplitude change per 0.4 s of duration
constexpr double kTiltTempo1 = 1.2324;    // digit 1 amplitude exponent on duration / 0.65 s
constexpr double kRampOffset1 = 0.7044;   // digit 1 z-pitch starts at -offset * gain
constexpr double kSag = 5.7616;           // deg/s downward z-pitch drift
constexpr double kWobble = 0.4069;        // digit 0 x-pitch bump
constexpr double kFlick = 0.1072;         // digit 1 hook, max fraction of extent
constexpr double kLift = 0.002392;        // digit 1 z motion, m
constexpr double kLoop = 0.00027;         // digit 0 z motion, m
// Noise-scaled nuisances; angle terms are given at the default 0.5 deg noise.
constexpr double kRefAngleSd = 0.5;
constexpr double kRoll = 3.8314;          // deg
constexpr double kRollToGx = 1.6756;
constexpr double kGxOffset = 0.03459;     // deg
constexpr double kGyOffset = 0.9478;      // deg
constexpr double kDrift = 1.8095;         // multiple of accel_noise_sd, m
constexpr double kDriftBump = 0.3778;     // bump drift relative to kDrift
constexpr double kGyGain = 821.36;        // deg per m of lagged lateral position
constexpr double kGyFromPath = 0.5532;    // share of the pen x path seen by gy
constexpr double kGyLag = 0.8610;         // s
constexpr double kGzFromDrift = 21.029;   // deg per m of vertical drift
constexpr double kAngleNoiseTau = 0.2793;  // s, correlation time of angle noise

// Rest-to-rest warp s(u) = u - sin(2 pi u) / 2 pi and its u-derivatives.
struct Warp {
    double s, ds, dds;
};

Warp warp(double u) {
    const double a = kTwoPi * u;
    return {u - detmath::sin(a) / kTwoPi, 1.0 - detmath::cos(a), kTwoPi * detmath::sin(a)};
}

// (1 - cos 2 pi u) / 2 and its u-derivatives.
Warp bump(double u) {
    const double a = kTwoPi * u;
    return {(1.0 - detmath::cos(a)) / 2, kTwoPi * detmath::sin(a) / 2, kTwoPi * kTwoPi * detmath::cos(a) / 2};
}

double pow_pos(double base, double e) { return detmath::exp(e * detmath::log(base)); }

// Stationary first-order autoregressive noise with standard deviation sd.
std::vector<double> colored_noise(Rng& rng, std::size_t n, double sd, double dt) {
    std::vector<double> w(n);
    for (auto& v : w) v = rng.normal();
    const double a = detmath::exp(-dt / kAngleNoiseTau);
    const double b = std::sqrt(1.0 - a * a);
    double prev = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = i == 0 ? w[i] : b * w[i] + a * prev;
        prev = v;
        w[i] = sd * v;
    }
    return w;
}

}  // namespace

void GeneratorConfig::validate() const {
    if (!(sample_rate > 0) || !std::isfinite(sample_rate)) throw DomainError("sample_rate must be > 0");
    for (const double* r : {duration_zero, duration_one})
        if (!(r[0] > 0 && r[1] > r[0]) || !std::isfinite(r[1]))
            throw DomainError("duration ranges must satisfy 0 < lo < hi");
    if (!(stroke_extent > 0) || !std::isfinite(stroke_extent)) throw DomainError("stroke_extent must be > 0");
    if (!(accel_noise_sd >= 0) || !(angle_noise_sd >= 0) || !std::isfinite(accel_noise_sd) ||
        !std::isfinite(angle_noise_sd))
        throw DomainError("noise SDs must be >= 0");
    if (!std::isfinite(tilt_gain_zero) || !std::isfinite(tilt_gain_one))
        throw DomainError("tilt gains must be finite");
}

SegmentShape draw_shape(int digit, const GeneratorConfig& cfg, std::uint64_t seed) {
    if (digit != 0 && digit != 1) throw DomainError("digit must be 0 or 1, got " + std::to_string(digit));
    cfg.validate();
    Rng rng(seed);
    SegmentShape sh;
    sh.digit = digit;

    const double* range = digit == 0 ? cfg.duration_zero : cfg.duration_one;
    double m = 0;
    for (int k = 0; k < kDurationDraws; ++k) m += rng.uniform();
    const double T = range[0] + (range[1] - range[0]) * (m / kDurationDraws);
    sh.n = std::max(static_cast<std::size_t>(std::floor(T * cfg.sample_rate)) + 1, kMinSegmentSamples);
    sh.duration = static_cast<double>(sh.n - 1) / cfg.sample_rate;

    const double E = cfg.stroke_extent;
    const double kg = cfg.angle_noise_sd / kRefAngleSd;
    if (digit == 0) {
        sh.rx = E * rng.uniform(kRxLo, kRxHi);
        sh.ry = E * rng.uniform(kRyLo, kRyHi);
        sh.direction = rng.coin() ? 1.0 : -1.0;
        sh.wobble = rng.coin() ? kWobble : -kWobble;
        sh.loop = kLoop;
    } else {
        sh.flick = kFlick * rng.uniform();
        sh.lift = kLift * rng.uniform(0.5, 1.5);
    }
    sh.roll = std::fabs(kRoll * kg * rng.normal());
    const double sd = kDrift * cfg.accel_noise_sd;
    sh.drift_x = sd * rng.normal();
    sh.drift_y = sd * rng.normal();
    sh.drift_bump = sd * kDriftBump * rng.normal();
    sh.gx_offset = kRollToGx * sh.roll + kGxOffset * kg * rng.normal();
    sh.gy_offset = kGyOffset * kg * rng.normal();
    return sh;
}

Segment generate_segment(int digit, const GeneratorConfig& cfg, std::uint64_t seed) {
    const SegmentShape sh = draw_shape(digit, cfg, seed);
    const std::size_t n = sh.n;
    const double T = sh.duration, T2 = T * T;
    const double dt = 1.0 / cfg.sample_rate;
    const double E = cfg.stroke_extent;

    Segment seg;
    seg.label = digit;
    seg.samples.resize(n);
    std::vector<double> path_x(n), drift_x(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& out = seg.samples[i];
        const double t = static_cast<double>(i) / cfg.sample_rate;
        const double u = t / T;
        const Warp w = warp(u);
        const Warp b = bump(u);
        out.t = t;
        double ax = 0, ay = 0, az = 0, gx = 0, gz = 0, x = 0;
        if (digit == 0) {
            // one loop of an ellipse through the origin, traversed on the warped clock
            const double th = kTwoPi * w.s, dth = kTwoPi * w.ds / T, ddth = kTwoPi * w.dds / T2;
            const double st = detmath::sin(th), ct = detmath::cos(th);
            x = -sh.direction * sh.rx * st;
            ax = -sh.direction * sh.rx * (-st * dth * dth + ct * ddth);
            ay = sh.ry * (-ct * dth * dth - st * ddth);
            az = sh.loop / 2 * (kTwoPi / T) * (kTwoPi / T) * detmath::cos(kTwoPi * u);
            const double wu = detmath::sin(kTwoPi * u);
            const double gain = cfg.tilt_gain_zero * (1.0 + kTiltTempo0 * (T - 1.2) / 0.4);
            gz = gain * (wu > 0 ? wu : kTroughDepth * wu) - sh.roll * (1.0 - wu) / 2 - kSag * (t - T / 4);
            gx = sh.wobble * b.s;
        } else {
            // straight downstroke with a small hook, y = -E s + flick E bump(s)
            const Warp h = bump(w.s);
            ay = (-E * w.dds + sh.flick * E * (h.dds * w.ds * w.ds + h.ds * w.dds)) / T2;
            az = sh.lift * w.dds / T2;
            const double gain = cfg.tilt_gain_one * pow_pos(T / 0.65, kTiltTempo1);
            gz = gain * (w.s * (1.0 + kRampOffset1) - kRampOffset1) - sh.roll * (1.0 - w.s) - kSag * (t - T);
        }
        // rest-to-rest drift of the whole hand
        ax += (sh.drift_x * w.dds + sh.drift_bump * b.dds) / T2;
        ay += sh.drift_y * w.dds / T2;
        gz += kGzFromDrift * sh.drift_y * w.s;
        gx += sh.gx_offset;
        drift_x[i] = sh.drift_x * w.s + sh.drift_bump * b.s;
        path_x[i] = x;
        out.ax = ax;
        out.ay = ay;
        out.az = az;
        out.gx = gx;
        out.gz = gz;
    }

    // y-pitch follows the lateral hand position through a first-order lag
    const double a = 1.0 - detmath::exp(-dt / kGyLag);
    double lagged = 0;
    for (std::size_t i = 0; i < n; ++i) {
        lagged = a * (drift_x[i] + kGyFromPath * path_x[i]) + (1.0 - a) * lagged;
        seg.samples[i].gy = sh.gy_offset + kGyGain * lagged;
    }

    Rng rng(derive_seed(seed, 0x6e6f697365));
    for (auto& s : seg.samples) {
        s.ax += cfg.accel_noise_sd * rng.normal();
        s.ay += cfg.accel_noise_sd * rng.normal();
        s.az += cfg.accel_noise_sd * rng.normal();
    }
    if (cfg.angle_noise_sd > 0) {
        auto nx = colored_noise(rng, n, cfg.angle_noise_sd, dt);
        auto ny = colored_noise(rng, n, cfg.angle_noise_sd, dt);
        auto nz = colored_noise(rng, n, cfg.angle_noise_sd, dt);
        for (std::size_t i = 0; i < n; ++i) {
            seg.samples[i].gx += nx[i];
            seg.samples[i].gy += ny[i];
            seg.samples[i].gz += nz[i];
        }
    }
    return seg;
}

Dataset generate_corpus(std::size_t n_per_class, const GeneratorConfig& cfg, std::uint64_t seed) {
    if (n_per_class < 1) throw DomainError("n_per_class must be >= 1");
    cfg.validate();
    Dataset d;
    d.segments.reserve(2 * n_per_class);
    double clock = 0;
    for (int digit = 0; digit < 2; ++digit) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            Segment seg = generate_segment(digit, cfg, derive_seed(seed, static_cast<std::uint64_t>(digit), i));
            for (auto& s : seg.samples) s.t += clock;
            clock = seg.samples.back().t + 1.0;
            d.segments.push_back(std::move(seg));
        }
    }
    return d;
}

}  // namespace wrist
