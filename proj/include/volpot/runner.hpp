#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "volpot/bie.hpp"
#include "volpot/geometry.hpp"
#include "volpot/problems.hpp"

namespace volpot {

// Malformed or inconsistent configuration input.  The CLI maps this to
// exit code 2; every other failure during a run maps to 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CurveSpec {
    std::string type;  // "circle" or "ellipse"
    Vec2 center{0, 0};
    double radius = 1;        // circle
    double a = 1, b = 0.5;    // ellipse semi-axes
    double angle = 0;         // ellipse tilt, radians
};

// Where the solution is measured.  A positive spacing lays down a uniform
// grid over the bounding box; random_points switches to seeded uniform
// rejection sampling instead.  Points closer to the boundary than
// collar * diameter are discarded either way, matching the close-evaluation
// contract of the layer potentials.
struct EvalSpec {
    double spacing = 0;      // 0 falls back to the mesh h
    int random_points = 0;
    double collar = 0.02;
};

struct RunConfig {
    std::vector<CurveSpec> curves;  // first entry is the outer boundary
    KernelFamily family = KernelFamily::Laplace;
    double lambda = 0;

    int p = 4;
    int q = 0;              // oversampled degree, 0 picks 2p
    std::vector<double> h;  // one entry for run, a decreasing sweep for study
    int n_boundary = 0;     // boundary nodes per curve, 0 picks automatically
    double epsilon = 1e-12;

    std::string problem_id = "poisson-mfg1";  // or "constant" / "gaussian"
    double const_value = 1;
    Vec2 gauss_center{0, 0};
    double gauss_sigma = 0.25;
    double gauss_amplitude = 1;

    EvalSpec eval;
    std::uint64_t seed = 0;
    int threads = 0;                 // 0 = hardware concurrency
    bool threads_from_config = false;  // lets the CLI rank flag > file > env
    std::string out_dir = "out";
    bool dump_mesh = false;
    bool dump_tables = false;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

Domain build_domain(const RunConfig& cfg);
Problem build_problem(const RunConfig& cfg);

// Measurement points for a given mesh spacing: the configured grid or the
// seeded random cloud, always outside the collar.  Deterministic for a
// fixed config and seed.
std::vector<Vec2> eval_points(const Domain& dom, const EvalSpec& eval,
                              double mesh_h, std::uint64_t seed);

struct RunMetrics {
    double h = 0;
    int n_tri = 0;
    int n_box = 0;
    int ndofs = 0;
    int nsrcs = 0;
    int n_eval = 0;
    double linf = -1;  // -1 when no exact solution is known
    double l2 = -1;    // mesh-h weighted, sqrt(h^2 sum e^2)
    double build_seconds = 0;
    double smooth_seconds = 0;
    double correction_seconds = 0;
    double total_seconds = 0;
};

// Solves one configuration (cfg.h must hold exactly one entry) and writes
// solution.csv plus stats.json into cfg.out_dir.
RunMetrics run_single(const RunConfig& cfg);

struct StudyResult {
    std::vector<RunMetrics> rows;
    double order_linf = 0;  // least-squares slope of log err against log h
    double order_l2 = 0;
};

// Runs the h sweep (at least three strictly decreasing entries), writes
// study.csv and stats.json, and fits convergence orders.
StudyResult run_study(const RunConfig& cfg);

}  // namespace volpot
