#pragma once

#include <span>
#include <vector>

namespace adl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Block motion vectors for one frame, as extracted upstream from the
// compressed stream. Centers are in pixels within [0,w) x [0,h).
struct MotionVectorField {
    int frame_index = 0;
    std::vector<Vec2> block_centers;
    std::vector<Vec2> displacements;
    int width = 0;
    int height = 0;
};

// First-order complete affine ego-motion model:
//   dx = a1 + a2*x + a3*y
//   dy = a4 + a5*x + a6*y
struct AffineMotion {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0, a5 = 0.0, a6 = 0.0;

    Vec2 apply(const Vec2& p) const {
        return {a1 + a2 * p.x + a3 * p.y, a4 + a5 * p.x + a6 * p.y};
    }
};

// Per-block difference between the observed displacement and the model
// prediction at the block center. Centers are carried along so descriptors
// can bin residuals spatially.
struct ResidualField {
    int frame_index = 0;
    std::vector<Vec2> block_centers;
    std::vector<Vec2> residuals;
};

struct AffineFit {
    AffineMotion model;
    // Final IRLS weight per block, in [0,1]. 1 means full inlier.
    std::vector<double> weights;
    int iterations = 0;
};

// Robust weighted least-squares fit of the affine model to a block motion
// field. IRLS with Tukey biweight, scale from the MAD of residual magnitudes.
// Throws TooFewBlocks (< 3 blocks) or DegenerateGeometry (rank-deficient
// normal system, e.g. collinear block centers).
AffineFit estimate_affine_fit(const MotionVectorField& field);

AffineMotion estimate_affine(const MotionVectorField& field);

ResidualField residual_field(const MotionVectorField& field, const AffineMotion& model);

}  // namespace adl
