#include "adl/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "adl/errors.hpp"

namespace adl {

double log_sum_exp(std::span<const double> v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - mx);
    return mx + std::log(sum);
}

void gmm_component_log_densities(const Gmm& g, std::span<const double> o,
                                 std::vector<double>& out) {
    const int n = g.dim();
    if (static_cast<int>(o.size()) != n) {
        throw DimensionMismatch("observation dim " + std::to_string(o.size()) +
                                " vs mixture dim " + std::to_string(n));
    }
    constexpr double log2pi = 1.8378770664093454836;  // log(2*pi)
    out.resize(g.weights.size());
    for (std::size_t k = 0; k < g.weights.size(); ++k) {
        const auto& mu = g.means[k];
        const auto& var = g.variances[k];
        double quad = 0.0;
        double logdet = 0.0;
        for (int d = 0; d < n; ++d) {
            const double diff = o[static_cast<std::size_t>(d)] - mu[static_cast<std::size_t>(d)];
            quad += diff * diff / var[static_cast<std::size_t>(d)];
            logdet += std::log(var[static_cast<std::size_t>(d)]);
        }
        const double logw = g.weights[k] > 0.0
                                ? std::log(g.weights[k])
                                : -std::numeric_limits<double>::infinity();
        out[k] = logw - 0.5 * (n * log2pi + logdet + quad);
    }
}

double gmm_log_density(const Gmm& g, std::span<const double> o) {
    std::vector<double> comps;
    gmm_component_log_densities(g, o, comps);
    return log_sum_exp(comps);
}

}  // namespace adl
