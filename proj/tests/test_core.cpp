#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "wrist/core.hpp"
#include "wrist/rng.hpp"

using namespace wrist;

namespace {

const char* kHeader = "t,ax,ay,az,gx,gy,gz,switch,label\n";

ImuSample sample(double t, double v = 0) { return {t, v, v, v, v, v, v, true}; }

Segment ramp(std::size_t n, double t0, int label) {
    Segment s;
    s.label = label;
    for (std::size_t i = 0; i < n; ++i) s.samples.push_back(sample(t0 + 0.01 * static_cast<double>(i), 0.1 * i));
    return s;
}

}  // namespace

TEST_CASE("trace parse returns maximal switch runs with their labels") {
    std::string text = std::string(kHeader) +
                       "0,0,0,0,0,0,0,0,-1\n"
                       "0.01,1,2,3,4,5,6,1,0\n"
                       "0.02,1,2,3,4,5,6,1,0\n"
                       "0.03,0,0,0,0,0,0,0,-1\n"
                       "0.04,1,1,1,1,1,1,1,1\n"
                       "0.05,1,1,1,1,1,1,1,1\n";
    auto segs = parse_trace_csv(text);
    REQUIRE(segs.size() == 2);
    CHECK(segs[0].samples.size() == 2);
    CHECK(segs[0].label == 0);
    CHECK(segs[0].samples[1].gz == 6);
    CHECK(segs[1].label == 1);
    CHECK(segs[1].t_start() == doctest::Approx(0.04));
}

TEST_CASE("unlabeled runs carry no label") {
    auto segs = parse_trace_csv(std::string(kHeader) + "0,1,1,1,1,1,1,1,-1\n0.1,1,1,1,1,1,1,1,-1\n");
    REQUIRE(segs.size() == 1);
    CHECK_FALSE(segs[0].label.has_value());
}

TEST_CASE("parse errors carry the 1-based line number") {
    std::string bad_arity = std::string(kHeader) + "0,1,1,1,1,1,1,1,0\n0.1,1,1,1,1,1,1,0\n";
    try {
        parse_trace_csv(bad_arity);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    std::string bad_number = std::string(kHeader) + "0,1,x,1,1,1,1,1,0\n";
    try {
        parse_trace_csv(bad_number);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }

    CHECK_THROWS_AS(parse_trace_csv(std::string(kHeader) + "0,1,1,1,1,1,1,2,0\n"), ParseError);
    CHECK_THROWS_AS(parse_trace_csv(std::string(kHeader) + "0,1,1,1,1,1,1,1,5\n"), ParseError);
    CHECK_THROWS_AS(parse_trace_csv(std::string(kHeader) + "0,1,nan,1,1,1,1,1,0\n"), ParseError);
    CHECK_THROWS_AS(parse_trace_csv("time,ax\n"), ParseError);
}

TEST_CASE("time must increase inside a run") {
    std::string text = std::string(kHeader) + "0.1,0,0,0,0,0,0,1,0\n0.1,0,0,0,0,0,0,1,0\n";
    try {
        parse_trace_csv(text);
        FAIL("expected SequenceError");
    } catch (const SequenceError& e) {
        CHECK(e.line == 3);
    }
    // across a switch release the clock may repeat
    std::string ok = std::string(kHeader) + "0.1,0,0,0,0,0,0,1,0\n0.1,0,0,0,0,0,0,0,-1\n0.1,0,0,0,0,0,0,1,0\n";
    CHECK(parse_trace_csv(ok).size() == 2);
}

TEST_CASE("label must stay constant inside a run") {
    std::string text = std::string(kHeader) + "0.1,0,0,0,0,0,0,1,0\n0.2,0,0,0,0,0,0,1,1\n";
    try {
        parse_trace_csv(text);
        FAIL("expected LabelError");
    } catch (const LabelError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("CRLF line endings and blank lines are tolerated") {
    auto segs = parse_trace_csv("t,ax,ay,az,gx,gy,gz,switch,label\r\n0,1,1,1,1,1,1,1,1\r\n\r\n0.5,1,1,1,1,1,1,1,1\r\n");
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].samples.size() == 2);
}

TEST_CASE("write then parse is the identity on random segments") {
    Rng rng(99);
    std::vector<Segment> segs;
    double t = 0;
    for (int k = 0; k < 20; ++k) {
        Segment s;
        if (k % 3) s.label = static_cast<int>(rng.below(2));
        auto n = 1 + rng.below(30);
        for (std::uint64_t i = 0; i < n; ++i) {
            t += 1e-3 + rng.uniform();
            ImuSample x{t, rng.normal() * 1e3, rng.normal(), rng.normal() * 1e-300, rng.normal(), -rng.uniform(),
                        rng.normal() * 1e10, true};
            s.samples.push_back(x);
        }
        segs.push_back(s);
    }
    CHECK(parse_trace_csv(write_trace_csv(segs)) == segs);
}

TEST_CASE("write_trace_csv can require labels") {
    Segment s = ramp(4, 0, 0);
    s.label.reset();
    CHECK_THROWS_AS(write_trace_csv({s}, true), DomainError);
    CHECK_NOTHROW(write_trace_csv({s}, false));
}

TEST_CASE("format_double round-trips exactly") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(40)) - 20);
        CHECK(parse_double(format_double(v), 0) == v);
    }
    CHECK(parse_double(format_double(std::numeric_limits<double>::denorm_min()), 0) ==
          std::numeric_limits<double>::denorm_min());
}

TEST_CASE("validate_segment reports every problem") {
    CHECK(validate_segment(ramp(4, 0, 1)).ok());

    auto r = validate_segment(ramp(3, 0, 1));
    REQUIRE(r.issues.size() == 1);
    CHECK(r.issues[0].find("too short") != std::string::npos);

    Segment s = ramp(6, 0, 1);
    s.samples[3].t = s.samples[2].t;
    s.samples[4].gy = std::numeric_limits<double>::infinity();
    s.samples[5].engaged = false;
    s.label = 7;
    r = validate_segment(s);
    CHECK(r.issues.size() == 4);
    CHECK_THROWS_AS(require_valid(s, "test"), ValidationError);
}

TEST_CASE("dataset helpers") {
    auto d = make_dataset({ramp(4, 0, 0), ramp(4, 1, 1), ramp(4, 2, 1)});
    CHECK(d.count(0) == 1);
    CHECK(d.count(1) == 2);
    CHECK(d.subset({2, 0}).segments[0].t_start() == doctest::Approx(2));
    Segment u = ramp(4, 0, 0);
    u.label.reset();
    CHECK_THROWS_AS(make_dataset({u}), DomainError);
}

TEST_CASE("rng is reproducible and in range") {
    Rng a(17), b(17);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(3);
    for (int i = 0; i < 10000; ++i) {
        double u = r.uniform();
        CHECK((u >= 0 && u < 1));
        CHECK(r.below(7) < 7);
    }
    auto p = permutation(50, 1);
    std::vector<bool> seen(50, false);
    for (auto i : p) seen.at(i) = true;
    for (bool s : seen) CHECK(s);
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("normal draws have unit variance") {
    Rng r(11);
    double s = 0, q = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double v = r.normal();
        s += v;
        q += v * v;
    }
    CHECK(std::fabs(s / n) < 0.01);
    CHECK(std::fabs(q / n - 1) < 0.02);
}
