#include "gpdf/inducing.hpp"

#include <cmath>

namespace gpdf {

Vec3 project_to_surface(const Field& field, Vec3 x, int max_iters, double tol) {
    check_finite(x, field.dim());
    double d = field.query_distance(x);
    for (int it = 0; it < max_iters; ++it) {
        if (d < tol) return x;
        Vec3 g;
        bool valid = false;
        d = field.query_distance(x, &g, &valid);
        if (d < tol) return x;
        if (!valid) throw NumericError("stalled projection");
        const Vec3 xn = x - d * g / std::max(g.squaredNorm(), 1e-6);
        const double dn = field.query_distance(xn);
        if (dn >= d) throw NumericError("stalled projection");
        x = xn;
        d = dn;
    }
    if (d < tol) return x;
    throw NumericError("projection did not converge, residual " + std::to_string(d));
}

PseudoSet select_pseudo_points(const Field& field, const std::vector<Vec3>& candidates,
                               double spacing, std::size_t budget, int max_iters,
                               double tol) {
    if (!(spacing > 0.0)) throw UsageError("spacing must be > 0");
    if (budget < 1) throw UsageError("budget must be >= 1");
    PseudoSet set;
    set.spacing = spacing;
    for (const Vec3& c : candidates) {
        if (set.points.size() >= budget) break;
        Vec3 p;
        try {
            p = project_to_surface(field, c, max_iters, tol);
        } catch (const NumericError&) {
            continue;
        }
        bool ok = true;
        for (const Vec3& a : set.points) {
            double r2 = 0.0;
            for (int ax = 0; ax < field.dim(); ++ax) r2 += (p[ax] - a[ax]) * (p[ax] - a[ax]);
            if (r2 < spacing * spacing) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        set.points.push_back(p);
        set.residuals.push_back(field.query_distance(p));
    }
    if (set.points.empty()) throw NumericError("no candidates survived projection");
    return set;
}

}  // namespace gpdf
