#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wrist/core.hpp"
#include "wrist/matrix.hpp"

namespace wrist {

inline constexpr std::size_t kFeatureCount = 31;
using FeatureVector = std::array<double, kFeatureCount>;

// [min,mean,max] x [ax,ay,az,gx,gy,gz,vx,vy,vz], then dx, dy, dz, d_total.
const std::vector<std::string>& feature_names();
std::size_t feature_index(const std::string& name);

// Cumulative trapezoid starting at 0.
std::vector<double> integrate_trapezoid(std::span<const double> times, std::span<const double> values);

FeatureVector extract_features(const Segment& segment);

struct LabeledMatrix {
    Matrix X;
    std::vector<int> y;
};

LabeledMatrix extract_matrix(const Dataset& dataset);
// Unlabeled segments get label -1.
LabeledMatrix extract_matrix(const std::vector<Segment>& segments);

// Feature CSV: header is feature names plus "label"; label -1 when unknown.
void write_feature_csv(std::ostream& out, const LabeledMatrix& m,
                       const std::vector<std::string>& names = feature_names());
LabeledMatrix read_feature_csv(std::istream& in, std::vector<std::string>* names = nullptr);

}  // namespace wrist
