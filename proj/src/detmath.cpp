#include "wrist/detmath.hpp"

#include <cmath>
#include <limits>

namespace wrist::detmath {

namespace {

// pi/2 split in three parts (Cody-Waite) for argument reduction.
constexpr double kPio2Hi = 1.5707963267341256e+00;
constexpr double kPio2Mid = 6.0771005065061922e-11;
constexpr double kPio2Lo = 2.0222662487959506e-21;
constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kInvLn2 = 1.44269504088896338700e+00;

// Taylor polynomials on |r| <= pi/4.
double sin_poly(double r) {
    double r2 = r * r;
    double term = r, sum = r;
    for (int k = 1; k <= 11; ++k) {
        term *= -r2 / ((2.0 * k) * (2.0 * k + 1.0));
        sum += term;
    }
    return sum;
}

double cos_poly(double r) {
    double r2 = r * r;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 11; ++k) {
        term *= -r2 / ((2.0 * k - 1.0) * (2.0 * k));
        sum += term;
    }
    return sum;
}

// Returns the quadrant and writes the reduced argument.
long reduce(double x, double& r) {
    double q = std::nearbyint(x * kTwoOverPi);
    r = ((x - q * kPio2Hi) - q * kPio2Mid) - q * kPio2Lo;
    return static_cast<long>(q);
}

}  // namespace

double sin(double x) {
    double r;
    long q = reduce(x, r) & 3;
    switch (q) {
        case 0: return sin_poly(r);
        case 1: return cos_poly(r);
        case 2: return -sin_poly(r);
        default: return -cos_poly(r);
    }
}

double cos(double x) {
    double r;
    long q = reduce(x, r) & 3;
    switch (q) {
        case 0: return cos_poly(r);
        case 1: return -sin_poly(r);
        case 2: return -cos_poly(r);
        default: return sin_poly(r);
    }
}

double exp(double x) {
    if (x > 709.0) return std::numeric_limits<double>::infinity();
    if (x < -745.0) return 0.0;
    double k = std::nearbyint(x * kInvLn2);
    double r = (x - k * kLn2Hi) - k * kLn2Lo;
    // |r| <= ln2/2, 20 terms is well past double precision
    double term = 1.0, sum = 1.0;
    for (int i = 1; i <= 20; ++i) {
        term *= r / i;
        sum += term;
    }
    return std::ldexp(sum, static_cast<int>(k));
}

double log(double x) {
    if (std::isnan(x) || x < 0) return std::numeric_limits<double>::quiet_NaN();
    if (x == 0) return -std::numeric_limits<double>::infinity();
    if (std::isinf(x)) return x;
    int e = 0;
    double m = std::frexp(x, &e);  // m in [0.5, 1)
    if (m < 0.70710678118654752440) {
        m *= 2.0;
        --e;
    }
    // log(m) = 2 atanh(z), z = (m-1)/(m+1), |z| < 0.172
    double z = (m - 1.0) / (m + 1.0);
    double z2 = z * z;
    double term = z, sum = z;
    for (int k = 3; k <= 41; k += 2) {
        term *= z2;
        sum += term / k;
    }
    return e * kLn2Hi + (2.0 * sum + e * kLn2Lo);
}

}  // namespace wrist::detmath
