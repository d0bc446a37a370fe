#pragma once

#include <cstddef>
#include <vector>

namespace sglv {

// Inverse standard-normal CDF (Acklam's rational approximation, relative
// error < 1.2e-9 everywhere). p must lie in (0, 1).
double normal_quantile(double p);

double mean(const std::vector<double>& xs);

// Unbiased sample variance (divides by n - 1).
double sample_variance(const std::vector<double>& xs);

}  // namespace sglv
