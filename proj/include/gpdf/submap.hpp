#pragma once

#include "gpdf/field.hpp"
#include "gpdf/pose.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>

namespace gpdf {

struct BlockCoord {
    std::int64_t x = 0, y = 0, z = 0;
    auto operator<=>(const BlockCoord&) const = default;
};

struct SubmapConfig {
    double block_size = 1.0;            // B, meters
    double halo_margin = 0.25;          // m, meters
    double downsample_resolution = 0.0; // rho, meters; 0 disables
    std::size_t max_points_per_block = 400;
    FieldConfig field;

    // Defaults tied to the kernel length scale: B = 8l, m = 2l, rho = l/4.
    static SubmapConfig for_field(const FieldConfig& f);

    void validate() const;
};

struct InsertStats {
    std::size_t points_added = 0;
    std::size_t points_skipped = 0;  // non-finite
    std::size_t blocks_dirtied = 0;
};

// Block-partitioned spatial hash of conditionally independent GP submaps.
// Single-writer / multi-reader; dirty blocks refit lazily at query time.
class SubmapGrid {
  public:
    SubmapGrid(const SubmapConfig& cfg, int dim);

    BlockCoord block_of(const Vec3& p) const;

    // Transforms the cloud by pose (sensor -> world) and appends points to
    // their owner blocks, voxel-downsampled. Owner and halo-affected
    // neighbors are marked dirty.
    InsertStats insert_points(const PointCloud& cloud, const Pose& pose);

    // Soft-minimum fusion over the distances of blocks whose centers lie
    // within B*sqrt(dim) of q (nearest non-empty block as fallback). A
    // single in-range member answers alone, bit-identically to its own
    // query.
    FieldSample query_fused(const Vec3& q);

    std::size_t block_count() const { return blocks_.size(); }
    std::size_t total_points() const;
    const std::vector<Vec3>* block_points(const BlockCoord& c) const;
    int dim() const { return dim_; }
    const SubmapConfig& config() const { return cfg_; }

    // Query against one block's submap alone (refits if dirty).
    FieldSample query_block(const BlockCoord& c, const Vec3& q);

    void save(const std::string& path) const;
    static SubmapGrid load(const std::string& path);

  private:
    struct Block {
        std::vector<Vec3> points;
        std::map<std::uint64_t, bool> voxels;  // occupied voxel keys
        std::shared_ptr<const Field> field;    // null when dirty
    };

    const Field& ensure_fitted(const BlockCoord& c);
    std::uint64_t voxel_key(const Vec3& p) const;

    SubmapConfig cfg_;
    int dim_ = 2;
    std::map<BlockCoord, Block> blocks_;  // ordered: deterministic iteration
};

}  // namespace gpdf
