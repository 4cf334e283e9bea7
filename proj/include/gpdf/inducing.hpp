#pragma once

#include "gpdf/field.hpp"

namespace gpdf {

struct PseudoSet {
    std::vector<Vec3> points;
    double spacing = 0.0;           // s, meters
    std::vector<double> residuals;  // |d| per point
};

// Walks x down the field (x <- x - d * grad / max(|grad|^2, 1e-6)) until
// |d| < tol. Throws on an invalid gradient or non-convergence.
Vec3 project_to_surface(const Field& field, Vec3 x, int max_iters = 20,
                        double tol = 1e-3);

// Surface-projects candidates, then greedily accepts them in input order
// subject to a minimum pairwise spacing, until the budget is reached.
// Candidates that fail to project are skipped.
PseudoSet select_pseudo_points(const Field& field, const std::vector<Vec3>& candidates,
                               double spacing, std::size_t budget,
                               int max_iters = 20, double tol = 1e-3);

}  // namespace gpdf
