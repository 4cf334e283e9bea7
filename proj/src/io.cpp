#include "gpdf/io.hpp"

#include <Eigen/Geometry>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace gpdf {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

PointCloud load_xyz(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open: " + path);
    PointCloud cloud;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double x, y, z;
        if (!(ls >> x)) {
            ls.clear();
            std::string junk;
            if (ls >> junk)
                throw UsageError(path + ":" + std::to_string(lineno) +
                                 ": malformed line");
            continue;  // blank or comment-only line
        }
        if (!(ls >> y))
            throw UsageError(path + ":" + std::to_string(lineno) + ": malformed line");
        int dim = 2;
        if (ls >> z)
            dim = 3;
        else
            z = 0.0;
        double extra;
        if (ls >> extra)
            throw UsageError(path + ":" + std::to_string(lineno) + ": malformed line");
        if (cloud.dim == 0)
            cloud.dim = dim;
        else if (cloud.dim != dim)
            throw UsageError(path + ":" + std::to_string(lineno) +
                             ": inconsistent dimension");
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
            throw UsageError(path + ":" + std::to_string(lineno) + ": non-finite value");
        cloud.points.push_back({x, y, z});
    }
    if (cloud.dim == 0) cloud.dim = 2;
    cloud.source_id = path;
    return cloud;
}

PointCloud load_ply(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open: " + path);
    std::string line;
    if (!std::getline(is, line) || line.substr(0, 3) != "ply")
        throw UsageError(path + ": not a PLY file");
    std::size_t n_vertices = 0;
    int xi = -1, yi = -1, zi = -1;
    int prop = 0;
    bool in_vertex = false;
    bool format_seen = false;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "format") {
            std::string enc;
            ls >> enc;
            if (enc != "ascii") throw UsageError(path + ": unsupported encoding");
            format_seen = true;
        } else if (tok == "element") {
            std::string name;
            std::size_t count;
            ls >> name >> count;
            in_vertex = (name == "vertex");
            if (in_vertex) n_vertices = count;
        } else if (tok == "property" && in_vertex) {
            std::string type, name;
            ls >> type >> name;
            if (type == "list") continue;
            if (name == "x") xi = prop;
            if (name == "y") yi = prop;
            if (name == "z") zi = prop;
            ++prop;
        } else if (tok == "end_header") {
            break;
        }
    }
    if (!format_seen || xi < 0 || yi < 0)
        throw UsageError(path + ": missing vertex x/y properties");
    PointCloud cloud;
    cloud.dim = 3;
    cloud.source_id = path;
    cloud.points.reserve(n_vertices);
    for (std::size_t v = 0; v < n_vertices; ++v) {
        if (!std::getline(is, line))
            throw UsageError(path + ": truncated vertex list");
        std::istringstream ls(line);
        std::vector<double> fields;
        double val;
        while (ls >> val) fields.push_back(val);
        if (static_cast<int>(fields.size()) < prop)
            throw UsageError(path + ": malformed vertex line " + std::to_string(v));
        const double z = zi >= 0 ? fields[static_cast<std::size_t>(zi)] : 0.0;
        cloud.points.push_back(
            {fields[static_cast<std::size_t>(xi)], fields[static_cast<std::size_t>(yi)], z});
    }
    return cloud;
}

}  // namespace

PointCloud load_point_cloud(const std::string& path, CloudFormat format) {
    return format == CloudFormat::PLY ? load_ply(path) : load_xyz(path);
}

PointCloud load_point_cloud(const std::string& path) {
    const bool ply = path.size() >= 4 && path.substr(path.size() - 4) == ".ply";
    return load_point_cloud(path, ply ? CloudFormat::PLY : CloudFormat::XYZ);
}

void save_xyz(const PointCloud& cloud, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for writing: " + path);
    for (const Vec3& p : cloud.points) {
        os << fmt_double(p[0]) << ' ' << fmt_double(p[1]);
        if (cloud.dim == 3) os << ' ' << fmt_double(p[2]);
        os << '\n';
    }
}

void write_ply_mesh(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for writing: " + path);
    os << "ply\nformat ascii 1.0\n";
    os << "element vertex " << mesh.vertices.size() << "\n";
    os << "property double x\nproperty double y\nproperty double z\n";
    os << "element face " << mesh.triangles.size() << "\n";
    os << "property list uchar int vertex_indices\nend_header\n";
    for (const Vec3& v : mesh.vertices)
        os << fmt_double(v[0]) << ' ' << fmt_double(v[1]) << ' ' << fmt_double(v[2])
           << '\n';
    for (const auto& t : mesh.triangles)
        os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_trajectory(const std::vector<std::pair<double, Pose>>& poses,
                      const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for writing: " + path);
    for (const auto& [ts, pose] : poses) {
        const Eigen::Quaterniond q(pose.rotation);
        os << fmt_double(ts) << ' ' << fmt_double(pose.translation[0]) << ' '
           << fmt_double(pose.translation[1]) << ' ' << fmt_double(pose.translation[2])
           << ' ' << fmt_double(q.x()) << ' ' << fmt_double(q.y()) << ' '
           << fmt_double(q.z()) << ' ' << fmt_double(q.w()) << '\n';
    }
}

void write_path(const Trajectory& traj, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for writing: " + path);
    for (const Vec3& w : traj.waypoints) {
        os << fmt_double(w[0]) << ' ' << fmt_double(w[1]);
        if (traj.dim == 3) os << ' ' << fmt_double(w[2]);
        os << '\n';
    }
}

void write_cost_history(const std::vector<double>& costs, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for writing: " + path);
    os << "iter,cost\n";
    for (std::size_t i = 0; i < costs.size(); ++i)
        os << i << ',' << fmt_double(costs[i]) << '\n';
}

void write_polylines(const std::vector<std::vector<Vec3>>& lines,
                     const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for writing: " + path);
    bool first = true;
    for (const auto& line : lines) {
        if (!first) os << '\n';
        first = false;
        for (const Vec3& p : line)
            os << fmt_double(p[0]) << ' ' << fmt_double(p[1]) << '\n';
    }
}

namespace {

constexpr char kFieldMagic[8] = {'G', 'P', 'D', 'F', 'F', 'L', 'D', '1'};

template <typename T>
void put_bin(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_bin(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw UsageError("truncated field file");
    return v;
}

}  // namespace

void save_field(const PointCloud& cloud, const FieldConfig& cfg,
                const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot open for writing: " + path);
    os.write(kFieldMagic, 8);
    put_bin<std::uint32_t>(os, static_cast<std::uint32_t>(cloud.dim));
    put_bin<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.variant));
    put_bin<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.kernel.family));
    put_bin(os, cfg.kernel.length_scale);
    put_bin(os, cfg.kernel.signal_variance);
    put_bin(os, cfg.kernel.loggpis_rate);
    put_bin(os, cfg.noise_variance);
    put_bin(os, cfg.uncertainty_beta);
    put_bin<std::uint64_t>(os, cloud.size());
    for (const Vec3& p : cloud.points) {
        put_bin(os, p[0]);
        put_bin(os, p[1]);
        put_bin(os, p[2]);
    }
    if (!os) throw UsageError("write failed: " + path);
}

std::pair<PointCloud, FieldConfig> load_field_spec(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw UsageError("cannot open: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::string(magic, 8) != std::string(kFieldMagic, 8))
        throw UsageError("not a field file: " + path);
    PointCloud cloud;
    FieldConfig cfg;
    cloud.dim = static_cast<int>(get_bin<std::uint32_t>(is));
    cfg.variant = static_cast<FieldVariant>(get_bin<std::uint32_t>(is));
    cfg.kernel.family = static_cast<KernelFamily>(get_bin<std::uint32_t>(is));
    cfg.kernel.length_scale = get_bin<double>(is);
    cfg.kernel.signal_variance = get_bin<double>(is);
    cfg.kernel.loggpis_rate = get_bin<double>(is);
    cfg.noise_variance = get_bin<double>(is);
    cfg.uncertainty_beta = get_bin<double>(is);
    const std::uint64_t n = get_bin<std::uint64_t>(is);
    cloud.points.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Vec3 p;
        p[0] = get_bin<double>(is);
        p[1] = get_bin<double>(is);
        p[2] = get_bin<double>(is);
        cloud.points.push_back(p);
    }
    cloud.source_id = path;
    return {std::move(cloud), cfg};
}

Field load_field(const std::string& path) {
    auto [cloud, cfg] = load_field_spec(path);
    return Field::build(cloud, cfg);
}

double brute_force_edf(const PointCloud& cloud, const Vec3& q) {
    if (cloud.empty()) throw UsageError("brute_force_edf: empty cloud");
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& p : cloud.points) {
        double r2 = 0.0;
        for (int a = 0; a < cloud.dim; ++a) r2 += (q[a] - p[a]) * (q[a] - p[a]);
        best = std::min(best, r2);
    }
    return std::sqrt(best);
}

BenchReport run_benchmark(const DistanceQueryFn& field, const PointCloud& cloud,
                          const GridSpec& grid, int dim, double band_min,
                          double band_max) {
    grid.validate(dim);
    if (cloud.empty()) throw UsageError("run_benchmark: empty cloud");
    if (!(band_min <= band_max)) throw UsageError("run_benchmark: invalid band");
    const auto t0 = std::chrono::steady_clock::now();

    BenchReport rep;
    const double h = grid.cell;
    int n[3] = {0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        n[a] = static_cast<int>(std::floor((grid.bbox_max[a] - grid.bbox_min[a]) / h + 1e-9));
        if (static_cast<double>(n[a]) + 1 > 2e8) throw UsageError("grid too large");
    }
    double sq = 0.0;
    for (int k = 0; k <= n[2]; ++k) {
        for (int j = 0; j <= n[1]; ++j) {
            for (int i = 0; i <= n[0]; ++i) {
                const Vec3 q = grid.bbox_min +
                               Vec3(i * h, j * h, dim == 3 ? k * h : 0.0);
                const double d_true = brute_force_edf(cloud, q);
                if (d_true < band_min || d_true > band_max) continue;
                BenchRow row;
                row.query = q;
                row.d_oracle = d_true;
                row.d_field = field(q, nullptr, nullptr);
                row.abs_err = std::abs(row.d_field - row.d_oracle);
                sq += row.abs_err * row.abs_err;
                rep.mae += row.abs_err;
                rep.max_err = std::max(rep.max_err, row.abs_err);
                rep.rows.push_back(row);
            }
        }
    }
    if (rep.rows.empty()) throw UsageError("no grid points in the oracle band");
    rep.query_count = rep.rows.size();
    rep.rmse = std::sqrt(sq / static_cast<double>(rep.query_count));
    rep.mae /= static_cast<double>(rep.query_count);
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

BenchReport run_benchmark(const Field& field, const PointCloud& cloud,
                          const GridSpec& grid, double band_min, double band_max) {
    return run_benchmark(query_fn(field), cloud, grid, field.dim(), band_min, band_max);
}

void write_bench_csv(const BenchReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for writing: " + path);
    os << "qx,qy,qz,d_field,d_oracle,abs_err\n";
    for (const BenchRow& r : report.rows)
        os << fmt_double(r.query[0]) << ',' << fmt_double(r.query[1]) << ','
           << fmt_double(r.query[2]) << ',' << fmt_double(r.d_field) << ','
           << fmt_double(r.d_oracle) << ',' << fmt_double(r.abs_err) << '\n';
}

BenchReport read_bench_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open: " + path);
    std::string line;
    if (!std::getline(is, line) || line != "qx,qy,qz,d_field,d_oracle,abs_err")
        throw UsageError(path + ": not a bench CSV");
    BenchReport rep;
    double sq = 0.0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        BenchRow r;
        char comma;
        if (!(ls >> r.query[0] >> comma >> r.query[1] >> comma >> r.query[2] >> comma >>
              r.d_field >> comma >> r.d_oracle >> comma >> r.abs_err))
            throw UsageError(path + ": malformed CSV row");
        sq += r.abs_err * r.abs_err;
        rep.mae += r.abs_err;
        rep.max_err = std::max(rep.max_err, r.abs_err);
        rep.rows.push_back(r);
    }
    if (!rep.rows.empty()) {
        rep.query_count = rep.rows.size();
        rep.rmse = std::sqrt(sq / static_cast<double>(rep.query_count));
        rep.mae /= static_cast<double>(rep.query_count);
    }
    return rep;
}

}  // namespace gpdf
