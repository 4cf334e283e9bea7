// gpdf: build / query / mesh / odom / plan / bench over GP distance fields.

#include "gpdf/inducing.hpp"
#include "gpdf/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using namespace gpdf;

std::vector<double> parse_numbers(const std::string& s, std::size_t lo, std::size_t hi,
                                  const char* what) {
    std::istringstream is(s);
    std::vector<double> v;
    double x;
    while (is >> x) v.push_back(x);
    if (v.size() < lo || v.size() > hi)
        throw UsageError(std::string("expected ") + std::to_string(lo) + ".." +
                         std::to_string(hi) + " numbers for " + what);
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

GridSpec parse_grid(const std::string& bbox, double cell, double iso, int dim) {
    const std::size_t want = static_cast<std::size_t>(2 * dim);
    auto v = parse_numbers(bbox, want, want, "--bbox");
    GridSpec g;
    for (int a = 0; a < dim; ++a) {
        g.bbox_min[a] = v[static_cast<std::size_t>(a)];
        g.bbox_max[a] = v[static_cast<std::size_t>(dim + a)];
    }
    if (dim == 2) {
        g.bbox_min[2] = 0.0;
        g.bbox_max[2] = 1.0;
    }
    g.cell = cell;
    g.iso = iso;
    return g;
}

int run(int argc, char** argv) {
    CLI::App app{"Gaussian-process probabilistic distance field toolkit"};
    app.require_subcommand(1);
    unsigned seed = 42;
    app.add_option("--seed", seed, "PRNG seed for randomized workloads");

    // build
    auto* build = app.add_subcommand("build", "fit a field from a point cloud");
    std::string in_path, out_path, variant_name = "reverting";
    double opt_lambda = 0.0, opt_length = 0.0, opt_noise = -1.0;
    build->add_option("-i,--input", in_path, "input cloud (.xyz or .ply)")->required();
    build->add_option("-o,--output", out_path, "output field file")->required();
    build->add_option("--variant", variant_name, "loggpis or reverting");
    build->add_option("--lambda", opt_lambda, "Log-GPIS rate (1/m)");
    build->add_option("--length-scale", opt_length, "kernel length scale (m)");
    build->add_option("--noise", opt_noise, "observation noise variance");

    // query
    auto* query = app.add_subcommand("query", "query one point");
    std::string model_path, point_str;
    query->add_option("-m,--model", model_path, "field file")->required();
    query->add_option("-p,--point", point_str, "query point \"x y [z]\"")->required();

    // mesh
    auto* mesh = app.add_subcommand("mesh", "extract the iso-offset surface");
    std::string mesh_model, mesh_bbox, mesh_out;
    double mesh_cell = 0.05, mesh_iso = 0.0;
    mesh->add_option("-m,--model", mesh_model, "field file")->required();
    mesh->add_option("--bbox", mesh_bbox, "\"x0 y0 [z0] x1 y1 [z1]\"")->required();
    mesh->add_option("--cell", mesh_cell, "grid cell size (m)")->required();
    mesh->add_option("--iso", mesh_iso, "iso offset tau (m); default = cell");
    mesh->add_option("-o,--output", mesh_out, "output (.ply for 3D, text for 2D)")
        ->required();

    // odom
    auto* odom = app.add_subcommand("odom", "register a scan against the field");
    std::string odom_model, odom_scan, odom_init, odom_out;
    odom->add_option("-m,--model", odom_model, "field file")->required();
    odom->add_option("-s,--scan", odom_scan, "scan cloud (.xyz)")->required();
    odom->add_option("--init", odom_init, "initial guess \"tx ty theta\"");
    odom->add_option("-o,--output", odom_out, "trajectory output file")->required();

    // plan
    auto* plan = app.add_subcommand("plan", "optimize a path through the field");
    std::string plan_model, plan_start, plan_goal, plan_out, plan_costs;
    double plan_margin = 0.2;
    plan->add_option("-m,--model", plan_model, "field file")->required();
    plan->add_option("--start", plan_start, "\"x y [z]\"")->required();
    plan->add_option("--goal", plan_goal, "\"x y [z]\"")->required();
    plan->add_option("--margin", plan_margin, "safety margin (m)");
    plan->add_option("-o,--output", plan_out, "path output file")->required();
    plan->add_option("--costs", plan_costs, "cost history CSV output");

    // bench
    auto* bench = app.add_subcommand("bench", "compare field vs brute-force oracle");
    std::string bench_model, bench_cloud, bench_bbox, bench_band, bench_out;
    double bench_cell = 0.02;
    bench->add_option("-m,--model", bench_model, "field file")->required();
    bench->add_option("-i,--input", bench_cloud, "oracle cloud (.xyz)")->required();
    bench->add_option("--bbox", bench_bbox, "\"x0 y0 [z0] x1 y1 [z1]\"")->required();
    bench->add_option("--cell", bench_cell, "grid cell size (m)")->required();
    bench->add_option("--band", bench_band, "\"d_min d_max\" oracle band")->required();
    bench->add_option("-o,--output", bench_out, "report CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    (void)seed;

    if (build->parsed()) {
        PointCloud cloud = load_point_cloud(in_path);
        if (cloud.empty()) throw UsageError("empty input cloud");
        FieldVariant variant;
        if (variant_name == "loggpis")
            variant = FieldVariant::LogGpis;
        else if (variant_name == "reverting")
            variant = FieldVariant::Reverting;
        else
            throw UsageError("--variant must be loggpis or reverting");
        FieldConfig cfg = default_config(variant, cloud);
        if (opt_length > 0.0) {
            cfg.kernel.length_scale = opt_length;
            cfg.kernel.loggpis_rate = 1.0 / opt_length;
        }
        if (opt_lambda > 0.0) {
            cfg.kernel.loggpis_rate = opt_lambda;
            if (variant == FieldVariant::LogGpis)
                cfg.kernel.length_scale =
                    (cfg.kernel.family == KernelFamily::Matern12)
                        ? 1.0 / opt_lambda
                        : std::sqrt(3.0) / opt_lambda;
        }
        if (opt_noise >= 0.0) cfg.noise_variance = opt_noise;
        Field field = Field::build(cloud, cfg);  // validates before saving
        save_field(cloud, cfg, out_path);
        std::cout << "built " << (variant == FieldVariant::LogGpis ? "loggpis" : "reverting")
                  << " field over " << field.model().size() << " points, l="
                  << cfg.kernel.length_scale << "\n";
    } else if (query->parsed()) {
        Field field = load_field(model_path);
        auto v = parse_numbers(point_str, 2, 3, "--point");
        if (static_cast<int>(v.size()) != field.dim())
            throw UsageError("query point dimension does not match the field");
        Vec3 q{v[0], v[1], v.size() == 3 ? v[2] : 0.0};
        FieldSample s = field.query(q);
        std::cout << fmt(s.distance);
        for (int a = 0; a < field.dim(); ++a) std::cout << ' ' << fmt(s.gradient[a]);
        for (int a = 0; a < field.dim(); ++a) std::cout << ' ' << fmt(s.normal[a]);
        std::cout << ' ' << fmt(s.uncertainty) << "\n";
    } else if (mesh->parsed()) {
        Field field = load_field(mesh_model);
        if (mesh_iso <= 0.0) mesh_iso = mesh_cell;
        GridSpec g = parse_grid(mesh_bbox, mesh_cell, mesh_iso, field.dim());
        if (field.dim() == 3) {
            TriangleMesh m = extract_isosurface_3d(field, g);
            write_ply_mesh(m, mesh_out);
            std::cout << m.vertices.size() << " vertices, " << m.triangles.size()
                      << " triangles\n";
        } else {
            auto lines = extract_contour_2d(field, g);
            write_polylines(lines, mesh_out);
            std::cout << lines.size() << " polylines\n";
        }
    } else if (odom->parsed()) {
        Field field = load_field(odom_model);
        PointCloud scan = load_point_cloud(odom_scan);
        if (scan.dim != field.dim())
            throw UsageError("scan dimension does not match the field");
        Pose init = Pose::identity(field.dim());
        if (!odom_init.empty()) {
            if (field.dim() != 2)
                throw UsageError("--init is 2D (\"tx ty theta\")");
            auto v = parse_numbers(odom_init, 3, 3, "--init");
            init = Pose::from_2d(v[0], v[1], v[2]);
        }
        RegistrationReport rep = register_scan(field, scan, init);
        write_trajectory({{0.0, rep.pose}}, odom_out);
        std::cout << "converged=" << (rep.converged ? 1 : 0) << " iters="
                  << rep.iterations << " rmse " << fmt(rep.initial_rmse) << " -> "
                  << fmt(rep.final_rmse) << " inliers=" << fmt(rep.inlier_fraction)
                  << "\n";
    } else if (plan->parsed()) {
        Field field = load_field(plan_model);
        auto vs = parse_numbers(plan_start, 2, 3, "--start");
        auto vg = parse_numbers(plan_goal, 2, 3, "--goal");
        Vec3 start{vs[0], vs[1], vs.size() == 3 ? vs[2] : 0.0};
        Vec3 goal{vg[0], vg[1], vg.size() == 3 ? vg[2] : 0.0};
        PlanConfig cfg;
        cfg.safety_margin = plan_margin;
        PlanResult res = plan_path(field, start, goal, cfg);
        write_path(res.trajectory, plan_out);
        if (!plan_costs.empty()) write_cost_history(res.cost_history, plan_costs);
        std::cout << "waypoints=" << res.trajectory.waypoints.size() << " cost="
                  << fmt(res.cost_history.back()) << " clearance="
                  << fmt(path_clearance(field, res.trajectory)) << "\n";
    } else if (bench->parsed()) {
        Field field = load_field(bench_model);
        PointCloud cloud = load_point_cloud(bench_cloud);
        auto band = parse_numbers(bench_band, 2, 2, "--band");
        GridSpec g = parse_grid(bench_bbox, bench_cell, bench_cell, field.dim());
        BenchReport rep = run_benchmark(field, cloud, g, band[0], band[1]);
        write_bench_csv(rep, bench_out);
        std::cout << "queries=" << rep.query_count << " rmse=" << fmt(rep.rmse)
                  << " mae=" << fmt(rep.mae) << " max=" << fmt(rep.max_err)
                  << " wall_s=" << fmt(rep.wall_seconds) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const gpdf::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const gpdf::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
