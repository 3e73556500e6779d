#pragma once

#include <span>
#include <vector>

namespace adl {

// Diagonal-covariance Gaussian mixture.
struct Gmm {
    std::vector<double> weights;                 // K
    std::vector<std::vector<double>> means;      // K x n
    std::vector<std::vector<double>> variances;  // K x n

    int components() const { return static_cast<int>(weights.size()); }
    int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }
};

// log sum_k w_k N(o; mu_k, diag sigma_k^2), log-sum-exp stabilized.
double gmm_log_density(const Gmm& g, std::span<const double> o);

// Per-component log w_k + log N(o; mu_k, diag sigma_k^2).
void gmm_component_log_densities(const Gmm& g, std::span<const double> o,
                                 std::vector<double>& out);

double log_sum_exp(std::span<const double> v);

}  // namespace adl
