#pragma once

// Elementary functions built only from IEEE-754 basic operations, so that the
// synthetic generator produces bit-identical traces on every platform.
// Accuracy is a few ulp over the ranges the generator uses.
namespace wrist::detmath {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

double sin(double x);
double cos(double x);
double exp(double x);
double log(double x);

}  // namespace wrist::detmath
