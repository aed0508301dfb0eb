#pragma once

#include <cstdint>
#include <string>

#include "boostmetric/constraints.hpp"
#include "boostmetric/model.hpp"

namespace boostmetric {

// Delimited text loader, no quoting. The label column is either a 0-based
// index or a header name; a header row is auto-detected when any feature
// field of the first row fails to parse as a number.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 char delimiter = ',');

// Inverse of load_csv: features at full double precision, label last.
void write_csv(const Dataset& ds, const std::string& path, char delimiter = ',');

// Synthetic rings: class c sits on radius c + 1 in the first two dimensions
// (uniform angle, small radial jitter); remaining dimensions are pure
// Gaussian noise with the given sigma.
Dataset make_concentric_circles(int n_per_class, int n_classes, int noise_dims,
                                double noise_sigma, std::uint64_t seed);

// Versioned line-oriented text format with a trailing content checksum.
void save_model(const MetricModel& model, const std::string& path);
MetricModel load_model(const std::string& path);

}  // namespace boostmetric
