#include "gpdf/submap.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace gpdf {

SubmapConfig SubmapConfig::for_field(const FieldConfig& f) {
    SubmapConfig c;
    const double l = f.kernel.length_scale;
    c.block_size = 8.0 * l;
    c.halo_margin = 2.0 * l;
    c.downsample_resolution = l / 4.0;
    c.max_points_per_block = 400;
    c.field = f;
    return c;
}

void SubmapConfig::validate() const {
    if (!(block_size > 0.0)) throw UsageError("block_size must be > 0");
    if (halo_margin < 0.0) throw UsageError("halo_margin must be >= 0");
    if (downsample_resolution < 0.0) throw UsageError("downsample_resolution must be >= 0");
    if (max_points_per_block == 0) throw UsageError("max_points_per_block must be >= 1");
    field.validate();
}

SubmapGrid::SubmapGrid(const SubmapConfig& cfg, int dim) : cfg_(cfg), dim_(dim) {
    check_dim(dim);
    cfg_.validate();
}

BlockCoord SubmapGrid::block_of(const Vec3& p) const {
    check_finite(p, dim_);
    const double B = cfg_.block_size;
    BlockCoord c;
    c.x = static_cast<std::int64_t>(std::floor(p[0] / B));
    c.y = static_cast<std::int64_t>(std::floor(p[1] / B));
    c.z = (dim_ == 3) ? static_cast<std::int64_t>(std::floor(p[2] / B)) : 0;
    return c;
}

std::uint64_t SubmapGrid::voxel_key(const Vec3& p) const {
    const double rho = cfg_.downsample_resolution;
    auto q = [&](double v) {
        return static_cast<std::uint64_t>(
                   static_cast<std::int64_t>(std::floor(v / rho)) + (1LL << 20)) &
               0x1FFFFF;
    };
    return (q(p[0]) << 42) | (q(p[1]) << 21) | (dim_ == 3 ? q(p[2]) : 0);
}

InsertStats SubmapGrid::insert_points(const PointCloud& cloud, const Pose& pose) {
    InsertStats st;
    const double B = cfg_.block_size;
    const double m = cfg_.halo_margin;
    std::map<BlockCoord, bool> dirtied;
    for (const Vec3& raw : cloud.points) {
        bool finite = true;
        for (int a = 0; a < dim_; ++a)
            if (!std::isfinite(raw[a])) finite = false;
        if (!finite) {
            ++st.points_skipped;
            continue;
        }
        const Vec3 p = pose.apply(raw);
        const BlockCoord owner = block_of(p);
        Block& blk = blocks_[owner];
        if (cfg_.downsample_resolution > 0.0) {
            const std::uint64_t key = voxel_key(p);
            if (blk.voxels.count(key)) continue;  // voxel taken, keep first
            if (blk.points.size() >= cfg_.max_points_per_block) continue;
            blk.voxels[key] = true;
        } else if (blk.points.size() >= cfg_.max_points_per_block) {
            continue;
        }
        blk.points.push_back(p);
        ++st.points_added;
        // dirty the owner and any block whose halo contains p
        BlockCoord lo, hi;
        lo.x = static_cast<std::int64_t>(std::floor((p[0] - m) / B));
        hi.x = static_cast<std::int64_t>(std::floor((p[0] + m) / B));
        lo.y = static_cast<std::int64_t>(std::floor((p[1] - m) / B));
        hi.y = static_cast<std::int64_t>(std::floor((p[1] + m) / B));
        if (dim_ == 3) {
            lo.z = static_cast<std::int64_t>(std::floor((p[2] - m) / B));
            hi.z = static_cast<std::int64_t>(std::floor((p[2] + m) / B));
        }
        for (std::int64_t x = lo.x; x <= hi.x; ++x)
            for (std::int64_t y = lo.y; y <= hi.y; ++y)
                for (std::int64_t z = lo.z; z <= hi.z; ++z)
                    dirtied[{x, y, z}] = true;
    }
    for (const auto& [c, _] : dirtied) {
        auto it = blocks_.find(c);
        if (it != blocks_.end() && !it->second.points.empty()) {
            it->second.field.reset();
            ++st.blocks_dirtied;
        }
    }
    return st;
}

std::size_t SubmapGrid::total_points() const {
    std::size_t n = 0;
    for (const auto& [c, b] : blocks_) n += b.points.size();
    return n;
}

const std::vector<Vec3>* SubmapGrid::block_points(const BlockCoord& c) const {
    auto it = blocks_.find(c);
    return it == blocks_.end() ? nullptr : &it->second.points;
}

const Field& SubmapGrid::ensure_fitted(const BlockCoord& c) {
    Block& blk = blocks_.at(c);
    if (blk.field) return *blk.field;
    // train on the block's own points plus halo points from neighbors
    PointCloud train;
    train.dim = dim_;
    train.points = blk.points;
    const double B = cfg_.block_size;
    const double m = cfg_.halo_margin;
    const Vec3 lo{c.x * B, c.y * B, dim_ == 3 ? c.z * B : 0.0};
    const Vec3 hi{(c.x + 1) * B, (c.y + 1) * B, dim_ == 3 ? (c.z + 1) * B : 0.0};
    const std::int64_t reach = static_cast<std::int64_t>(std::ceil(m / B));
    for (std::int64_t dx = -reach; dx <= reach; ++dx) {
        for (std::int64_t dy = -reach; dy <= reach; ++dy) {
            for (std::int64_t dz = -(dim_ == 3 ? reach : 0);
                 dz <= (dim_ == 3 ? reach : 0); ++dz) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                auto it = blocks_.find({c.x + dx, c.y + dy, c.z + dz});
                if (it == blocks_.end()) continue;
                for (const Vec3& p : it->second.points) {
                    bool in_halo = true;
                    for (int a = 0; a < dim_; ++a) {
                        if (p[a] < lo[a] - m || p[a] > hi[a] + m) in_halo = false;
                    }
                    if (in_halo) train.points.push_back(p);
                }
            }
        }
    }
    blk.field = std::make_shared<const Field>(Field::build(train, cfg_.field));
    return *blk.field;
}

FieldSample SubmapGrid::query_block(const BlockCoord& c, const Vec3& q) {
    if (!blocks_.count(c)) throw UsageError("query_block: no such block");
    return ensure_fitted(c).query(q);
}

FieldSample SubmapGrid::query_fused(const Vec3& q) {
    check_finite(q, dim_);
    if (blocks_.empty()) throw UsageError("query_fused: empty grid");
    const double B = cfg_.block_size;
    const double Rq = B * std::sqrt(static_cast<double>(dim_));
    std::vector<BlockCoord> members;
    BlockCoord nearest{};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [c, b] : blocks_) {
        if (b.points.empty()) continue;
        Vec3 center{(c.x + 0.5) * B, (c.y + 0.5) * B, dim_ == 3 ? (c.z + 0.5) * B : 0.0};
        double r2 = 0.0;
        for (int a = 0; a < dim_; ++a) r2 += (center[a] - q[a]) * (center[a] - q[a]);
        if (r2 < best) {
            best = r2;
            nearest = c;
        }
        if (r2 <= Rq * Rq) members.push_back(c);
    }
    if (members.empty()) members.push_back(nearest);
    if (members.size() == 1) return ensure_fitted(members[0]).query(q);

    // Distance is a min over surfaces, so members combine through a soft
    // minimum: weights decay exponentially with the distance excess over the
    // best member, at the kernel length scale. (Occupancy-precision weights
    // fail here: far from every block the posterior variance saturates and
    // stops discriminating.)
    std::vector<FieldSample> samples;
    samples.reserve(members.size());
    double d_min = std::numeric_limits<double>::infinity();
    for (const BlockCoord& c : members) {
        samples.push_back(ensure_fitted(c).query(q));
        d_min = std::min(d_min, samples.back().distance);
    }
    // cool temperature: truncated submaps only ever overestimate distance,
    // so anything above the best member is mostly bias
    const double T = 0.1 * cfg_.field.kernel.length_scale;
    double wsum = 0.0;
    FieldSample fused;
    for (const FieldSample& s : samples) {
        const double w = std::exp(-(s.distance - d_min) / T);
        wsum += w;
        fused.distance += w * s.distance;
        fused.gradient += w * s.gradient;
        fused.occupancy += w * s.occupancy;
        fused.uncertainty += w * s.uncertainty;
    }
    fused.distance /= wsum;
    fused.gradient /= wsum;
    fused.occupancy /= wsum;
    fused.uncertainty /= wsum;
    const double gn = fused.gradient.norm();
    fused.valid_gradient = std::isfinite(gn) && gn > 1e-12 && gn < 10.0;
    if (fused.valid_gradient) fused.normal = -fused.gradient / gn;
    return fused;
}

namespace {

constexpr char kMagic[8] = {'G', 'P', 'D', 'F', 'G', 'R', 'D', '1'};

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw UsageError("truncated submap file");
    return v;
}

}  // namespace

void SubmapGrid::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot open for writing: " + path);
    os.write(kMagic, 8);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(dim_));
    put(os, cfg_.block_size);
    put(os, cfg_.halo_margin);
    put(os, cfg_.downsample_resolution);
    put<std::uint64_t>(os, cfg_.max_points_per_block);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(cfg_.field.variant));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(cfg_.field.kernel.family));
    put(os, cfg_.field.kernel.length_scale);
    put(os, cfg_.field.kernel.signal_variance);
    put(os, cfg_.field.kernel.loggpis_rate);
    put(os, cfg_.field.noise_variance);
    put(os, cfg_.field.uncertainty_beta);
    put<std::uint64_t>(os, blocks_.size());
    for (const auto& [c, b] : blocks_) {
        put(os, c.x);
        put(os, c.y);
        put(os, c.z);
        put<std::uint64_t>(os, b.points.size());
        for (const Vec3& p : b.points) {
            put(os, p[0]);
            put(os, p[1]);
            put(os, p[2]);
        }
    }
    if (!os) throw UsageError("write failed: " + path);
}

SubmapGrid SubmapGrid::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw UsageError("cannot open: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw UsageError("not a submap grid file: " + path);
    const int dim = static_cast<int>(get<std::uint32_t>(is));
    SubmapConfig cfg;
    cfg.block_size = get<double>(is);
    cfg.halo_margin = get<double>(is);
    cfg.downsample_resolution = get<double>(is);
    cfg.max_points_per_block = static_cast<std::size_t>(get<std::uint64_t>(is));
    cfg.field.variant = static_cast<FieldVariant>(get<std::uint32_t>(is));
    cfg.field.kernel.family = static_cast<KernelFamily>(get<std::uint32_t>(is));
    cfg.field.kernel.length_scale = get<double>(is);
    cfg.field.kernel.signal_variance = get<double>(is);
    cfg.field.kernel.loggpis_rate = get<double>(is);
    cfg.field.noise_variance = get<double>(is);
    cfg.field.uncertainty_beta = get<double>(is);
    SubmapGrid grid(cfg, dim);
    const std::uint64_t nblocks = get<std::uint64_t>(is);
    for (std::uint64_t i = 0; i < nblocks; ++i) {
        BlockCoord c;
        c.x = get<std::int64_t>(is);
        c.y = get<std::int64_t>(is);
        c.z = get<std::int64_t>(is);
        Block b;
        const std::uint64_t npts = get<std::uint64_t>(is);
        b.points.reserve(npts);
        for (std::uint64_t j = 0; j < npts; ++j) {
            Vec3 p;
            p[0] = get<double>(is);
            p[1] = get<double>(is);
            p[2] = get<double>(is);
            b.points.push_back(p);
            if (cfg.downsample_resolution > 0.0)
                b.voxels[grid.voxel_key(p)] = true;
        }
        grid.blocks_[c] = std::move(b);
    }
    return grid;
}

}  // namespace gpdf
