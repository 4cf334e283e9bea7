#include "gpdf/mesher.hpp"

#include <cmath>
#include <map>

namespace gpdf {

void GridSpec::validate(int dim) const {
    for (int a = 0; a < dim; ++a)
        if (!(bbox_max[a] > bbox_min[a]))
            throw UsageError("grid bbox max must exceed min per axis");
    if (!(cell > 0.0)) throw UsageError("grid cell size must be > 0");
    if (!(iso > 0.0)) throw UsageError("iso level must be > 0");
}

namespace {

struct GridDims {
    int n[3] = {1, 1, 1};  // cell counts
};

GridDims grid_dims(const GridSpec& g, int dim) {
    GridDims d;
    double cells = 1.0;
    for (int a = 0; a < dim; ++a) {
        d.n[a] = std::max(1, static_cast<int>(std::ceil(
                                 (g.bbox_max[a] - g.bbox_min[a]) / g.cell - 1e-9)));
        cells *= d.n[a];
    }
    if (cells > 1e8) throw UsageError("grid too large");
    return d;
}

Vec3 interp_zero(const Vec3& p1, const Vec3& p2, double v1, double v2) {
    if (std::abs(v1) < 1e-12) return p1;
    if (std::abs(v2) < 1e-12) return p2;
    if (std::abs(v1 - v2) < 1e-12) return p1;
    const double mu = -v1 / (v2 - v1);
    return p1 + mu * (p2 - p1);
}

}  // namespace

TriangleMesh extract_isosurface_3d(const ScalarFieldFn& distance, const GridSpec& grid) {
    grid.validate(3);
    const GridDims gd = grid_dims(grid, 3);
    const int nx = gd.n[0], ny = gd.n[1], nz = gd.n[2];
    const double h = grid.cell;

    // sample all corner values once
    const std::size_t px = static_cast<std::size_t>(nx) + 1;
    const std::size_t py = static_cast<std::size_t>(ny) + 1;
    const std::size_t pz = static_cast<std::size_t>(nz) + 1;
    std::vector<double> vals(px * py * pz);
    auto at = [&](int i, int j, int k) -> double& {
        return vals[(static_cast<std::size_t>(k) * py + j) * px + i];
    };
    for (int k = 0; k < static_cast<int>(pz); ++k)
        for (int j = 0; j < static_cast<int>(py); ++j)
            for (int i = 0; i < static_cast<int>(px); ++i) {
                const Vec3 p = grid.bbox_min + Vec3(i * h, j * h, k * h);
                at(i, j, k) = distance(p) - grid.iso;
            }

    auto corner_idx = [&](int i, int j, int k) {
        return (static_cast<std::int64_t>(k) * py + j) * static_cast<std::int64_t>(px) + i;
    };

    TriangleMesh mesh;
    std::map<std::pair<std::int64_t, std::int64_t>, int> edge_vertex;
    // corner offsets, Bourke numbering
    static const int off[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                  {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    static const int edges[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                     {4, 5}, {5, 6}, {6, 7}, {7, 4},
                                     {0, 4}, {1, 5}, {2, 6}, {3, 7}};
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                double cv[8];
                Vec3 cp[8];
                std::int64_t ci[8];
                int cube = 0;
                for (int c = 0; c < 8; ++c) {
                    const int ii = i + off[c][0], jj = j + off[c][1], kk = k + off[c][2];
                    cv[c] = at(ii, jj, kk);
                    cp[c] = grid.bbox_min + Vec3(ii * h, jj * h, kk * h);
                    ci[c] = corner_idx(ii, jj, kk);
                    if (cv[c] < 0.0) cube |= 1 << c;
                }
                const int emask = detail::kMcEdgeTable[cube];
                if (emask == 0) continue;
                int ev[12];
                for (int e = 0; e < 12; ++e) {
                    if (!(emask & (1 << e))) continue;
                    const int a = edges[e][0], b = edges[e][1];
                    auto key = std::minmax(ci[a], ci[b]);
                    auto it = edge_vertex.find(key);
                    if (it == edge_vertex.end()) {
                        const int idx = static_cast<int>(mesh.vertices.size());
                        mesh.vertices.push_back(interp_zero(cp[a], cp[b], cv[a], cv[b]));
                        it = edge_vertex.emplace(key, idx).first;
                    }
                    ev[e] = it->second;
                }
                const int* tri = detail::kMcTriTable[cube];
                for (int t = 0; tri[t] != -1; t += 3) {
                    const int a = ev[tri[t]], b = ev[tri[t + 1]], c = ev[tri[t + 2]];
                    if (a == b || b == c || a == c) continue;  // collapsed on a corner
                    mesh.triangles.push_back({a, b, c});
                }
            }
        }
    }
    return mesh;
}

TriangleMesh extract_isosurface_3d(const Field& field, const GridSpec& grid) {
    if (field.dim() != 3) throw UsageError("extract_isosurface_3d needs a 3D field");
    return extract_isosurface_3d(
        [&field](const Vec3& p) { return field.query_distance(p); }, grid);
}

namespace {

struct PointKey {
    double x, y;
    auto operator<=>(const PointKey&) const = default;
};

}  // namespace

std::vector<std::vector<Vec3>> extract_contour_2d(const ScalarFieldFn& distance,
                                                  const GridSpec& grid) {
    grid.validate(2);
    const GridDims gd = grid_dims(grid, 2);
    const int nx = gd.n[0], ny = gd.n[1];
    const double h = grid.cell;
    const std::size_t px = static_cast<std::size_t>(nx) + 1;
    std::vector<double> vals(px * (static_cast<std::size_t>(ny) + 1));
    auto at = [&](int i, int j) -> double& { return vals[j * px + i]; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            at(i, j) = distance(grid.bbox_min + Vec3(i * h, j * h, 0.0)) - grid.iso;

    std::vector<std::pair<Vec3, Vec3>> segments;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            // corners counterclockwise: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1)
            const double v[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
            const Vec3 p[4] = {grid.bbox_min + Vec3(i * h, j * h, 0.0),
                               grid.bbox_min + Vec3((i + 1) * h, j * h, 0.0),
                               grid.bbox_min + Vec3((i + 1) * h, (j + 1) * h, 0.0),
                               grid.bbox_min + Vec3(i * h, (j + 1) * h, 0.0)};
            int c = 0;
            for (int a = 0; a < 4; ++a)
                if (v[a] < 0.0) c |= 1 << a;
            if (c == 0 || c == 15) continue;
            // edge e connects corner e and (e+1)%4; endpoints are ordered
            // canonically so both cells sharing an edge compute the crossing
            // bit-identically (the chaining below matches exactly)
            auto ep = [&](int e) {
                int a = e, b = (e + 1) % 4;
                if (std::pair(p[b][0], p[b][1]) < std::pair(p[a][0], p[a][1]))
                    std::swap(a, b);
                return interp_zero(p[a], p[b], v[a], v[b]);
            };
            auto emit = [&](int ea, int eb) { segments.emplace_back(ep(ea), ep(eb)); };
            switch (c) {
                case 1: case 14: emit(3, 0); break;
                case 2: case 13: emit(0, 1); break;
                case 3: case 12: emit(3, 1); break;
                case 4: case 11: emit(1, 2); break;
                case 6: case 9:  emit(0, 2); break;
                case 7: case 8:  emit(3, 2); break;
                case 5: case 10: {
                    // saddle: pair by the sign at the cell center
                    const Vec3 center = 0.25 * (p[0] + p[1] + p[2] + p[3]);
                    const bool center_inside = (distance(center) - grid.iso) < 0.0;
                    const bool corners02 = (c == 5);
                    if (corners02 == center_inside) {
                        emit(3, 2);
                        emit(0, 1);
                    } else {
                        emit(3, 0);
                        emit(1, 2);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // chain segments into polylines via exact endpoint matching
    std::multimap<PointKey, std::size_t> by_end;
    auto key = [](const Vec3& v) { return PointKey{v[0], v[1]}; };
    for (std::size_t s = 0; s < segments.size(); ++s) {
        by_end.emplace(key(segments[s].first), s);
        by_end.emplace(key(segments[s].second), s);
    }
    std::vector<bool> used(segments.size(), false);
    std::vector<std::vector<Vec3>> polylines;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        std::vector<Vec3> line{segments[s].first, segments[s].second};
        for (int dir = 0; dir < 2; ++dir) {
            bool grew = true;
            while (grew) {
                grew = false;
                const Vec3& tip = dir == 0 ? line.back() : line.front();
                auto range = by_end.equal_range(key(tip));
                for (auto it = range.first; it != range.second; ++it) {
                    const std::size_t t = it->second;
                    if (used[t]) continue;
                    const Vec3& a = segments[t].first;
                    const Vec3& b = segments[t].second;
                    const Vec3& next = (key(a) == key(tip)) ? b : a;
                    used[t] = true;
                    if (dir == 0)
                        line.push_back(next);
                    else
                        line.insert(line.begin(), next);
                    grew = true;
                    break;
                }
            }
        }
        polylines.push_back(std::move(line));
    }
    return polylines;
}

std::vector<std::vector<Vec3>> extract_contour_2d(const Field& field,
                                                  const GridSpec& grid) {
    if (field.dim() != 2) throw UsageError("extract_contour_2d needs a 2D field");
    return extract_contour_2d(
        [&field](const Vec3& p) { return field.query_distance(p); }, grid);
}

}  // namespace gpdf
