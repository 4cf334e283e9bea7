#pragma once

#include "gpdf/mesher.hpp"
#include "gpdf/planner.hpp"

#include <iosfwd>

namespace gpdf {

enum class CloudFormat { XYZ, PLY };

// XYZ: whitespace-separated "x y [z]" per line, '#' comments skipped.
// PLY: ascii header, x/y/z vertex properties; binary encodings rejected.
PointCloud load_point_cloud(const std::string& path, CloudFormat format);
PointCloud load_point_cloud(const std::string& path);  // format from extension

void save_xyz(const PointCloud& cloud, const std::string& path);

void write_ply_mesh(const TriangleMesh& mesh, const std::string& path);

// "timestamp tx ty tz qx qy qz qw" per pose; 2D poses emit z=0 and a
// rotation about z.
void write_trajectory(const std::vector<std::pair<double, Pose>>& poses,
                      const std::string& path);

// one waypoint per line "x y [z]"
void write_path(const Trajectory& traj, const std::string& path);
void write_cost_history(const std::vector<double>& costs, const std::string& path);

// polylines as "x y" blocks separated by blank lines
void write_polylines(const std::vector<std::vector<Vec3>>& lines,
                     const std::string& path);

// Field files store the training cloud plus config; the GP is refit
// deterministically on load.
void save_field(const PointCloud& cloud, const FieldConfig& cfg,
                const std::string& path);
std::pair<PointCloud, FieldConfig> load_field_spec(const std::string& path);
Field load_field(const std::string& path);

// Exact nearest-point distance, O(N) scan. The accuracy oracle.
double brute_force_edf(const PointCloud& cloud, const Vec3& q);

struct BenchRow {
    Vec3 query;
    double d_field = 0.0;
    double d_oracle = 0.0;
    double abs_err = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;  // grid raster order
    double rmse = 0.0;
    double mae = 0.0;
    double max_err = 0.0;
    std::size_t query_count = 0;
    double wall_seconds = 0.0;
};

// Evaluates the field on every grid point whose oracle distance lies in
// [band_min, band_max]. Throws when the band captures nothing.
BenchReport run_benchmark(const DistanceQueryFn& field, const PointCloud& cloud,
                          const GridSpec& grid, int dim, double band_min,
                          double band_max);
BenchReport run_benchmark(const Field& field, const PointCloud& cloud,
                          const GridSpec& grid, double band_min, double band_max);

void write_bench_csv(const BenchReport& report, const std::string& path);
BenchReport read_bench_csv(const std::string& path);  // rows only, summary recomputed

}  // namespace gpdf
