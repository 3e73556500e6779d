#include "adl/motion.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "adl/errors.hpp"

namespace adl {

namespace {

constexpr double kTukeyC = 4.685;
constexpr int kMaxIterations = 10;
constexpr double kParamTolerance = 1e-8;

void check_field(const MotionVectorField& field) {
    if (field.block_centers.size() != field.displacements.size()) {
        throw DegenerateGeometry("block_centers and displacements differ in length");
    }
    if (field.block_centers.size() < 3) {
        throw TooFewBlocks("affine fit needs at least 3 blocks, got " +
                           std::to_string(field.block_centers.size()));
    }
}

// The x and y equations of the affine model decouple into two 3-parameter
// linear systems sharing the same design matrix (1, x, y) and the same
// per-block weights.
AffineMotion solve_weighted(const MotionVectorField& field, const std::vector<double>& weights) {
    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs_x = Eigen::Vector3d::Zero();
    Eigen::Vector3d rhs_y = Eigen::Vector3d::Zero();

    for (std::size_t i = 0; i < field.block_centers.size(); ++i) {
        const double w = weights[i];
        if (w <= 0.0) continue;
        const Vec2& c = field.block_centers[i];
        const Eigen::Vector3d row(1.0, c.x, c.y);
        normal.noalias() += w * row * row.transpose();
        rhs_x.noalias() += w * field.displacements[i].x * row;
        rhs_y.noalias() += w * field.displacements[i].y * row;
    }

    Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
    lu.setThreshold(1e-10);
    if (lu.rank() < 3) {
        throw DegenerateGeometry("normal system is rank-deficient (collinear blocks?)");
    }

    const Eigen::Vector3d px = lu.solve(rhs_x);
    const Eigen::Vector3d py = lu.solve(rhs_y);
    return {px[0], px[1], px[2], py[0], py[1], py[2]};
}

double residual_magnitude(const MotionVectorField& field, const AffineMotion& m, std::size_t i) {
    const Vec2 pred = m.apply(field.block_centers[i]);
    const double ex = field.displacements[i].x - pred.x;
    const double ey = field.displacements[i].y - pred.y;
    return std::hypot(ex, ey);
}

double median_inplace(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid) - 1, v.end());
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

double max_param_delta(const AffineMotion& a, const AffineMotion& b) {
    return std::max({std::abs(a.a1 - b.a1), std::abs(a.a2 - b.a2), std::abs(a.a3 - b.a3),
                     std::abs(a.a4 - b.a4), std::abs(a.a5 - b.a5), std::abs(a.a6 - b.a6)});
}

}  // namespace

AffineFit estimate_affine_fit(const MotionVectorField& field) {
    check_field(field);
    const std::size_t n = field.block_centers.size();

    AffineFit fit;
    fit.weights.assign(n, 1.0);
    fit.model = solve_weighted(field, fit.weights);
    fit.iterations = 0;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        std::vector<double> mags(n);
        for (std::size_t i = 0; i < n; ++i) {
            mags[i] = residual_magnitude(field, fit.model, i);
        }
        std::vector<double> tmp = mags;
        const double mad = median_inplace(tmp);
        const double scale = 1.4826 * mad;
        if (scale <= 0.0) {
            // Perfect fit on at least half the blocks; nothing left to reweight.
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            const double u = mags[i] / (kTukeyC * scale);
            if (u >= 1.0) {
                fit.weights[i] = 0.0;
            } else {
                const double t = 1.0 - u * u;
                fit.weights[i] = t * t;
            }
        }

        const AffineMotion prev = fit.model;
        fit.model = solve_weighted(field, fit.weights);
        fit.iterations = iter + 1;
        if (max_param_delta(prev, fit.model) < kParamTolerance) {
            break;
        }
    }
    return fit;
}

AffineMotion estimate_affine(const MotionVectorField& field) {
    return estimate_affine_fit(field).model;
}

ResidualField residual_field(const MotionVectorField& field, const AffineMotion& model) {
    ResidualField out;
    out.frame_index = field.frame_index;
    out.block_centers = field.block_centers;
    out.residuals.reserve(field.block_centers.size());
    for (std::size_t i = 0; i < field.block_centers.size(); ++i) {
        const Vec2 pred = model.apply(field.block_centers[i]);
        out.residuals.push_back({field.displacements[i].x - pred.x,
                                 field.displacements[i].y - pred.y});
    }
    return out;
}

}  // namespace adl
