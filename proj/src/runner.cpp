#include "volpot/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "volpot/mesh.hpp"
#include "volpot/potential.hpp"
#include "volpot/singular.hpp"

namespace volpot {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kTau = 6.283185307179586476925287;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch())
        .count();
}

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

// Typo guard: configs with unrecognized keys are rejected instead of
// silently ignoring the stray setting.
void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) bad(std::string(where) + ": unknown key \"" + it.key() +
                        "\"");
    }
}

double get_number(const json& obj, const char* key, const char* where,
                  bool required, double fallback) {
    if (!obj.contains(key)) {
        if (required) bad(std::string(where) + ": missing \"" + key + "\"");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number())
        bad(std::string(where) + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const char* key, const char* where,
            bool required, int fallback) {
    if (!obj.contains(key)) {
        if (required) bad(std::string(where) + ": missing \"" + key + "\"");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        bad(std::string(where) + ": \"" + key + "\" must be an integer");
    return v.get<int>();
}

Vec2 get_vec2(const json& obj, const char* key, const char* where,
              bool required, Vec2 fallback) {
    if (!obj.contains(key)) {
        if (required) bad(std::string(where) + ": missing \"" + key + "\"");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
        !v[1].is_number())
        bad(std::string(where) + ": \"" + key + "\" must be [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

CurveSpec parse_curve(const json& obj, const std::string& where) {
    if (!obj.is_object()) bad(where + ": curve must be an object");
    CurveSpec c;
    if (!obj.contains("type") || !obj.at("type").is_string())
        bad(where + ": missing string \"type\"");
    c.type = obj.at("type").get<std::string>();
    c.center = get_vec2(obj, "center", where.c_str(), false, {0, 0});
    if (c.type == "circle") {
        check_keys(obj, where.c_str(), {"type", "center", "radius"});
        c.radius = get_number(obj, "radius", where.c_str(), true, 0);
        if (!(c.radius > 0)) bad(where + ": radius must be positive");
    } else if (c.type == "ellipse") {
        check_keys(obj, where.c_str(), {"type", "center", "a", "b", "angle"});
        c.a = get_number(obj, "a", where.c_str(), true, 0);
        c.b = get_number(obj, "b", where.c_str(), true, 0);
        c.angle = get_number(obj, "angle", where.c_str(), false, 0);
        if (!(c.a > 0) || !(c.b > 0))
            bad(where + ": semi-axes must be positive");
    } else {
        bad(where + ": unknown curve type \"" + c.type +
            "\" (expected circle or ellipse)");
    }
    return c;
}

void parse_problem(const json& v, RunConfig& cfg) {
    if (v.is_string()) {
        cfg.problem_id = v.get<std::string>();
        return;
    }
    if (!v.is_object()) bad("problem: must be a string id or an object");
    if (v.contains("id")) {
        check_keys(v, "problem", {"id"});
        if (!v.at("id").is_string()) bad("problem: \"id\" must be a string");
        cfg.problem_id = v.at("id").get<std::string>();
        return;
    }
    if (!v.contains("type") || !v.at("type").is_string())
        bad("problem: needs \"id\" or \"type\"");
    cfg.problem_id = v.at("type").get<std::string>();
    if (cfg.problem_id == "constant") {
        check_keys(v, "problem", {"type", "value"});
        cfg.const_value = get_number(v, "value", "problem", false, 1);
    } else if (cfg.problem_id == "gaussian") {
        check_keys(v, "problem", {"type", "center", "sigma", "amplitude"});
        cfg.gauss_center = get_vec2(v, "center", "problem", false, {0, 0});
        cfg.gauss_sigma = get_number(v, "sigma", "problem", false, 0.25);
        cfg.gauss_amplitude =
            get_number(v, "amplitude", "problem", false, 1);
        if (!(cfg.gauss_sigma > 0)) bad("problem: sigma must be positive");
    } else {
        bad("problem: unknown type \"" + cfg.problem_id +
            "\" (expected constant or gaussian)");
    }
}

// Dense point cloud on every boundary curve, used to keep evaluation
// points out of the close-evaluation collar.
std::vector<Vec2> boundary_cloud(const Domain& dom, int per_curve = 2048) {
    std::vector<Vec2> cloud;
    cloud.reserve(static_cast<size_t>(per_curve) * dom.num_curves());
    for (int c = 0; c < dom.num_curves(); ++c) {
        const Curve& crv = dom.curve(c);
        for (int j = 0; j < per_curve; ++j)
            cloud.push_back(crv.pos(kTau * j / per_curve));
    }
    return cloud;
}

double dist_to_cloud(const std::vector<Vec2>& cloud, Vec2 p) {
    double best = std::numeric_limits<double>::max();
    for (const Vec2& q : cloud) {
        double dx = p.x - q.x, dy = p.y - q.y;
        best = std::min(best, dx * dx + dy * dy);
    }
    return std::sqrt(best);
}

// Deterministic uniform double in [0, 1) from the raw engine output, so
// the sampled points do not depend on the standard library's
// distribution internals.
double next_unit(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

void append_csv_value(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os << content;
        os.flush();
        if (!os) throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

const char* family_name(KernelFamily f) {
    return f == KernelFamily::Laplace ? "laplace" : "modified-helmholtz";
}

// Least-squares slope of log(err) against log(h), so a positive value is
// the observed convergence order.  Errors are clamped away from zero so a
// row at the noise floor cannot produce -inf.
double fit_order(const std::vector<double>& hs, const std::vector<double>& es) {
    const int n = static_cast<int>(hs.size());
    double sx = 0, sy = 0;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = std::log(hs[i]);
        ys[i] = std::log(std::max(es[i], 1e-300));
        sx += xs[i];
        sy += ys[i];
    }
    double vxx = 0, vxy = 0;
    for (int i = 0; i < n; ++i) {
        vxx += (xs[i] - sx / n) * (xs[i] - sx / n);
        vxy += (xs[i] - sx / n) * (ys[i] - sy / n);
    }
    return vxy / vxx;
}

struct SolvedRun {
    RunMetrics metrics;
    std::vector<Vec2> pts;
    std::vector<double> u;
    std::vector<double> exact;  // empty when unknown
    BvpResult bvp;
    MeshReport mesh_report;
};

// One full pipeline pass for a single mesh spacing: mesh, volume
// potential, boundary solve, and error measurement at the evaluation
// points.
SolvedRun solve_one(const RunConfig& cfg, const Domain& dom,
                    const Problem& prob, double h) {
    SolvedRun out;
    double t0 = now_seconds();

    HybridMesh mesh = build_mesh(dom, h);
    out.mesh_report = mesh_validate(mesh);
    out.pts = eval_points(dom, cfg.eval, h, cfg.seed);
    if (out.pts.empty())
        bad("eval: no points survive the collar (spacing too coarse or "
            "collar too wide)");

    Kernel kernel = make_kernel(cfg.family, cfg.lambda);
    int q = cfg.q > 0 ? cfg.q : 2 * cfg.p;
    std::vector<Vec2> nodes = mesh_nodes(mesh, cfg.p);
    std::vector<double> f(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) f[i] = prob.f(nodes[i]);

    BvpOptions opts;
    opts.n_boundary = cfg.n_boundary;
    opts.epsilon = cfg.epsilon;
    out.bvp = solve_bvp(mesh, kernel, cfg.p, q, f, prob.g, out.pts, opts);
    out.u = out.bvp.u;

    RunMetrics& m = out.metrics;
    m.h = h;
    m.n_tri = mesh.n_tri;
    m.n_box = mesh.n_box;
    m.ndofs = out.bvp.op_stats.ndofs;
    m.nsrcs = out.bvp.op_stats.nsrcs;
    m.n_eval = static_cast<int>(out.pts.size());
    m.build_seconds = out.bvp.op_stats.build_seconds;
    m.smooth_seconds = out.bvp.apply_timings.smooth_seconds;
    m.correction_seconds = out.bvp.apply_timings.correction_seconds;

    if (prob.u_exact) {
        out.exact.resize(out.pts.size());
        double linf = 0, sum2 = 0;
        for (size_t i = 0; i < out.pts.size(); ++i) {
            out.exact[i] = prob.u_exact(out.pts[i]);
            double e = std::abs(out.u[i] - out.exact[i]);
            linf = std::max(linf, e);
            sum2 += e * e;
        }
        m.linf = linf;
        m.l2 = h * std::sqrt(sum2);
    }
    m.total_seconds = now_seconds() - t0;
    return out;
}

std::string solution_csv(const SolvedRun& run) {
    std::string out = "x,y,u,u_exact,abs_err\n";
    for (size_t i = 0; i < run.pts.size(); ++i) {
        append_csv_value(out, run.pts[i].x);
        out += ',';
        append_csv_value(out, run.pts[i].y);
        out += ',';
        append_csv_value(out, run.u[i]);
        out += ',';
        if (!run.exact.empty()) {
            append_csv_value(out, run.exact[i]);
            out += ',';
            append_csv_value(out, std::abs(run.u[i] - run.exact[i]));
        } else {
            out += ',';
        }
        out += '\n';
    }
    return out;
}

ordered_json metrics_json(const RunMetrics& m, const SolvedRun& run) {
    ordered_json row;
    row["h"] = m.h;
    row["n_tri"] = m.n_tri;
    row["n_box"] = m.n_box;
    row["ndofs"] = m.ndofs;
    row["nsrcs"] = m.nsrcs;
    row["n_eval"] = m.n_eval;
    row["h_ntri"] = m.h * m.n_tri;
    row["h2_nbox"] = m.h * m.h * m.n_box;
    if (m.linf >= 0) {
        row["linf"] = m.linf;
        row["l2"] = m.l2;
    }
    row["mesh"] = {{"area_defect", run.mesh_report.area_defect},
                   {"min_jacobian", run.mesh_report.min_jacobian},
                   {"min_angle_deg", run.mesh_report.min_angle_deg}};
    row["boundary"] = {
        {"n_per_curve", run.bvp.n_per_curve},
        {"dense_direct", run.bvp.solve.dense_direct},
        {"iterations", run.bvp.solve.iterations},
        {"residual", run.bvp.solve.residual_history.empty()
                         ? 0.0
                         : run.bvp.solve.residual_history.back()}};
    row["timings"] = {{"operator_build_seconds", m.build_seconds},
                      {"smooth_seconds", m.smooth_seconds},
                      {"correction_seconds", m.correction_seconds},
                      {"total_seconds", m.total_seconds}};
    return row;
}

ordered_json config_echo(const RunConfig& cfg, const Problem& prob) {
    ordered_json j;
    j["kernel"] = {{"family", family_name(cfg.family)}};
    if (cfg.family == KernelFamily::ModifiedHelmholtz)
        j["kernel"]["lambda2"] = cfg.lambda * cfg.lambda;
    j["problem"] = prob.name;
    j["p"] = cfg.p;
    j["q"] = cfg.q > 0 ? cfg.q : 2 * cfg.p;
    j["h"] = cfg.h;
    j["n_boundary"] = cfg.n_boundary;
    j["epsilon"] = cfg.epsilon;
    j["seed"] = cfg.seed;
    j["eval"] = {{"spacing", cfg.eval.spacing},
                 {"random_points", cfg.eval.random_points},
                 {"collar", cfg.eval.collar}};
    return j;
}

void dump_static_outputs(const RunConfig& cfg, const HybridMesh* mesh,
                         const std::string& mesh_name) {
    fs::path dir(cfg.out_dir);
    if (cfg.dump_mesh && mesh) {
        fs::path tmp = dir / (mesh_name + ".tmp");
        write_mesh(*mesh, tmp.string());
        fs::rename(tmp, dir / mesh_name);
    }
    if (cfg.dump_tables) {
        std::ostringstream os;
        dump_reference_tables(os, reference_tables(cfg.p));
        write_file_atomic(dir / "tables.txt", os.str());
    }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text, nullptr, true, true);
    } catch (const json::exception& e) {
        bad(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) bad("config root must be an object");
    check_keys(root, "config",
               {"domain", "kernel", "discretization", "problem", "eval",
                "output", "seed", "threads"});

    RunConfig cfg;

    if (!root.contains("domain") || !root.at("domain").is_object())
        bad("config: missing \"domain\" object");
    const json& dom = root.at("domain");
    check_keys(dom, "domain", {"curves"});
    if (!dom.contains("curves") || !dom.at("curves").is_array() ||
        dom.at("curves").empty())
        bad("domain: \"curves\" must be a nonempty array (outer first)");
    for (size_t i = 0; i < dom.at("curves").size(); ++i)
        cfg.curves.push_back(parse_curve(
            dom.at("curves")[i], "domain.curves[" + std::to_string(i) + "]"));

    if (root.contains("kernel")) {
        const json& k = root.at("kernel");
        if (!k.is_object()) bad("kernel: must be an object");
        check_keys(k, "kernel", {"family", "lambda2", "lambda"});
        std::string fam = "laplace";
        if (k.contains("family")) {
            if (!k.at("family").is_string())
                bad("kernel: \"family\" must be a string");
            fam = k.at("family").get<std::string>();
        }
        if (fam == "laplace") {
            cfg.family = KernelFamily::Laplace;
            if (k.contains("lambda2") || k.contains("lambda"))
                bad("kernel: lambda only applies to modified-helmholtz");
        } else if (fam == "modified-helmholtz") {
            cfg.family = KernelFamily::ModifiedHelmholtz;
            if (k.contains("lambda2") == k.contains("lambda"))
                bad("kernel: modified-helmholtz needs exactly one of "
                    "\"lambda2\" or \"lambda\"");
            double l2 = k.contains("lambda2")
                            ? get_number(k, "lambda2", "kernel", true, 0)
                            : 0;
            double l = k.contains("lambda")
                           ? get_number(k, "lambda", "kernel", true, 0)
                           : std::sqrt(l2);
            if (k.contains("lambda2") && !(l2 > 0))
                bad("kernel: lambda2 must be positive");
            if (!(l > 0)) bad("kernel: lambda must be positive");
            cfg.lambda = l;
        } else {
            bad("kernel: unknown family \"" + fam +
                "\" (expected laplace or modified-helmholtz)");
        }
    }

    if (!root.contains("discretization") ||
        !root.at("discretization").is_object())
        bad("config: missing \"discretization\" object");
    const json& d = root.at("discretization");
    check_keys(d, "discretization",
               {"p", "q", "h", "n_boundary", "epsilon"});
    cfg.p = get_int(d, "p", "discretization", true, 0);
    if (cfg.p < 1 || cfg.p > 12)
        bad("discretization: p must be between 1 and 12");
    cfg.q = get_int(d, "q", "discretization", false, 0);
    if (cfg.q != 0 && (cfg.q < cfg.p || cfg.q > 32))
        bad("discretization: q must be 0 (auto) or between p and 32");
    if (!d.contains("h")) bad("discretization: missing \"h\"");
    const json& hv = d.at("h");
    if (hv.is_number()) {
        cfg.h.push_back(hv.get<double>());
    } else if (hv.is_array() && !hv.empty()) {
        for (const json& e : hv) {
            if (!e.is_number())
                bad("discretization: h entries must be numbers");
            cfg.h.push_back(e.get<double>());
        }
    } else {
        bad("discretization: \"h\" must be a number or a nonempty array");
    }
    for (size_t i = 0; i < cfg.h.size(); ++i) {
        if (!(cfg.h[i] > 0)) bad("discretization: h must be positive");
        if (i > 0 && !(cfg.h[i] < cfg.h[i - 1]))
            bad("discretization: h sweep must be strictly decreasing");
    }
    cfg.n_boundary = get_int(d, "n_boundary", "discretization", false, 0);
    if (cfg.n_boundary != 0 &&
        (cfg.n_boundary < 16 || cfg.n_boundary % 2 != 0))
        bad("discretization: n_boundary must be 0 (auto) or an even count "
            ">= 16");
    cfg.epsilon = get_number(d, "epsilon", "discretization", false, 1e-12);
    if (!(cfg.epsilon > 0) || cfg.epsilon > 1e-2)
        bad("discretization: epsilon must be in (0, 1e-2]");

    if (root.contains("problem")) parse_problem(root.at("problem"), cfg);

    if (root.contains("eval")) {
        const json& e = root.at("eval");
        if (!e.is_object()) bad("eval: must be an object");
        check_keys(e, "eval", {"spacing", "random_points", "collar"});
        cfg.eval.spacing = get_number(e, "spacing", "eval", false, 0);
        cfg.eval.random_points =
            get_int(e, "random_points", "eval", false, 0);
        cfg.eval.collar = get_number(e, "collar", "eval", false, 0.02);
        if (cfg.eval.spacing < 0) bad("eval: spacing must be >= 0");
        if (cfg.eval.random_points < 0 || cfg.eval.random_points > 10000000)
            bad("eval: random_points must be in [0, 1e7]");
        if (cfg.eval.collar < 0 || cfg.eval.collar > 0.2)
            bad("eval: collar must be in [0, 0.2]");
    }

    if (root.contains("output")) {
        const json& o = root.at("output");
        if (!o.is_object()) bad("output: must be an object");
        check_keys(o, "output", {"dir", "dump_mesh", "dump_tables"});
        if (o.contains("dir")) {
            if (!o.at("dir").is_string())
                bad("output: \"dir\" must be a string");
            cfg.out_dir = o.at("dir").get<std::string>();
        }
        if (o.contains("dump_mesh")) {
            if (!o.at("dump_mesh").is_boolean())
                bad("output: \"dump_mesh\" must be a boolean");
            cfg.dump_mesh = o.at("dump_mesh").get<bool>();
        }
        if (o.contains("dump_tables")) {
            if (!o.at("dump_tables").is_boolean())
                bad("output: \"dump_tables\" must be a boolean");
            cfg.dump_tables = o.at("dump_tables").get<bool>();
        }
    }

    if (root.contains("seed")) {
        if (!root.at("seed").is_number_unsigned() &&
            !root.at("seed").is_number_integer())
            bad("config: \"seed\" must be a nonnegative integer");
        auto s = root.at("seed").get<std::int64_t>();
        if (s < 0) bad("config: \"seed\" must be a nonnegative integer");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (root.contains("threads")) {
        cfg.threads = get_int(root, "threads", "config", false, 0);
        if (cfg.threads < 0 || cfg.threads > 512)
            bad("config: \"threads\" must be in [0, 512]");
        cfg.threads_from_config = true;
    }

    // Surface family and parameter mismatches now rather than after the
    // mesh is built.
    build_domain(cfg);
    build_problem(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) bad("cannot open config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

Domain build_domain(const RunConfig& cfg) {
    if (cfg.curves.empty()) bad("domain: no curves");
    auto make = [](const CurveSpec& c) -> std::shared_ptr<Curve> {
        if (c.type == "circle")
            return std::make_shared<Circle>(c.center, c.radius);
        return std::make_shared<Ellipse>(c.center, c.a, c.b, c.angle);
    };
    Domain dom;
    dom.outer = make(cfg.curves[0]);
    Vec2 lo, hi;
    dom.outer->bounding_box(lo, hi);
    for (size_t i = 1; i < cfg.curves.size(); ++i) {
        auto hole = make(cfg.curves[i]);
        Vec2 hlo, hhi;
        hole->bounding_box(hlo, hhi);
        if (hlo.x < lo.x || hlo.y < lo.y || hhi.x > hi.x || hhi.y > hi.y)
            bad("domain.curves[" + std::to_string(i) +
                "]: hole leaves the outer bounding box");
        dom.holes.push_back(std::move(hole));
    }
    return dom;
}

Problem build_problem(const RunConfig& cfg) {
    const std::string& id = cfg.problem_id;
    if (id == "constant") {
        Problem p = constant_problem(cfg.const_value);
        p.family = cfg.family;
        p.lambda = cfg.lambda;
        return p;
    }
    if (id == "gaussian") {
        Problem p = gaussian_problem(cfg.gauss_center, cfg.gauss_sigma,
                                     cfg.gauss_amplitude);
        p.family = cfg.family;
        p.lambda = cfg.lambda;
        return p;
    }
    // The built-in ids pin their kernel family; report mismatches before
    // make_problem can trip over a missing lambda.
    if (id == "modhelm-mfg1" && cfg.family != KernelFamily::ModifiedHelmholtz)
        bad("problem: \"" + id + "\" requires the modified-helmholtz kernel");
    Problem p;
    try {
        p = make_problem(id, cfg.lambda);
    } catch (const std::invalid_argument& e) {
        bad(std::string("problem: ") + e.what());
    }
    if (p.family != cfg.family)
        bad("problem: \"" + id + "\" requires the " +
            std::string(family_name(p.family)) + " kernel");
    return p;
}

std::vector<Vec2> eval_points(const Domain& dom, const EvalSpec& eval,
                              double mesh_h, std::uint64_t seed) {
    std::vector<Vec2> cloud = boundary_cloud(dom);
    double clear = eval.collar * dom.diameter();
    auto keep = [&](Vec2 p) {
        return dom.contains(p) && dist_to_cloud(cloud, p) >= clear;
    };
    std::vector<Vec2> pts;
    Vec2 lo, hi;
    dom.bounding_box(lo, hi);

    if (eval.random_points > 0) {
        std::mt19937_64 eng(seed);
        std::int64_t tries = 0;
        std::int64_t limit =
            1000LL * eval.random_points + 100000;
        while (static_cast<int>(pts.size()) < eval.random_points) {
            if (++tries > limit)
                bad("eval: could not place random points outside the "
                    "collar");
            Vec2 p{lo.x + next_unit(eng) * (hi.x - lo.x),
                   lo.y + next_unit(eng) * (hi.y - lo.y)};
            if (keep(p)) pts.push_back(p);
        }
        return pts;
    }

    double s = eval.spacing > 0 ? eval.spacing : mesh_h;
    int nx = static_cast<int>(std::floor((hi.x - lo.x) / s)) + 1;
    int ny = static_cast<int>(std::floor((hi.y - lo.y) / s)) + 1;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Vec2 p{lo.x + s * (i + 0.5), lo.y + s * (j + 0.5)};
            if (p.x > hi.x || p.y > hi.y) continue;
            if (keep(p)) pts.push_back(p);
        }
    return pts;
}

RunMetrics run_single(const RunConfig& cfg) {
    if (cfg.h.size() != 1)
        bad("run expects a single h (use the study command for sweeps)");
    set_thread_count(cfg.threads);
    Domain dom = build_domain(cfg);
    Problem prob = build_problem(cfg);

    fs::create_directories(cfg.out_dir);
    SolvedRun run = solve_one(cfg, dom, prob, cfg.h[0]);

    write_file_atomic(fs::path(cfg.out_dir) / "solution.csv",
                      solution_csv(run));
    ordered_json stats;
    stats["mode"] = "run";
    stats["config"] = config_echo(cfg, prob);
    stats["run"] = metrics_json(run.metrics, run);
    write_file_atomic(fs::path(cfg.out_dir) / "stats.json",
                      stats.dump(2) + "\n");

    if (cfg.dump_mesh || cfg.dump_tables) {
        HybridMesh mesh = build_mesh(dom, cfg.h[0]);
        dump_static_outputs(cfg, &mesh, "mesh.txt");
    }
    return run.metrics;
}

StudyResult run_study(const RunConfig& cfg) {
    if (cfg.h.size() < 3)
        bad("study needs at least three strictly decreasing h values");
    set_thread_count(cfg.threads);
    Domain dom = build_domain(cfg);
    Problem prob = build_problem(cfg);
    if (!prob.u_exact)
        bad("study requires a problem with a known exact solution");

    fs::create_directories(cfg.out_dir);
    StudyResult result;
    ordered_json rows = ordered_json::array();
    std::string csv =
        "h,n_tri,n_box,ndofs,nsrcs,n_eval,linf,l2,rate_linf,rate_l2\n";

    for (size_t i = 0; i < cfg.h.size(); ++i) {
        SolvedRun run = solve_one(cfg, dom, prob, cfg.h[i]);
        const RunMetrics& m = run.metrics;
        result.rows.push_back(m);
        rows.push_back(metrics_json(m, run));

        append_csv_value(csv, m.h);
        csv += ',' + std::to_string(m.n_tri) + ',' +
               std::to_string(m.n_box) + ',' + std::to_string(m.ndofs) +
               ',' + std::to_string(m.nsrcs) + ',' +
               std::to_string(m.n_eval) + ',';
        append_csv_value(csv, m.linf);
        csv += ',';
        append_csv_value(csv, m.l2);
        csv += ',';
        if (i > 0) {
            const RunMetrics& pm = result.rows[i - 1];
            double dh = std::log(pm.h / m.h);
            append_csv_value(csv, std::log(std::max(pm.linf, 1e-300) /
                                           std::max(m.linf, 1e-300)) /
                                      dh);
            csv += ',';
            append_csv_value(csv, std::log(std::max(pm.l2, 1e-300) /
                                           std::max(m.l2, 1e-300)) /
                                      dh);
        } else {
            csv += ',';
        }
        csv += '\n';

        if (cfg.dump_mesh) {
            HybridMesh mesh = build_mesh(dom, cfg.h[i]);
            fs::path tmp = fs::path(cfg.out_dir) /
                           ("mesh_" + std::to_string(i) + ".txt.tmp");
            write_mesh(mesh, tmp.string());
            fs::rename(tmp, fs::path(cfg.out_dir) /
                                ("mesh_" + std::to_string(i) + ".txt"));
        }
    }

    std::vector<double> hs, linfs, l2s;
    for (const RunMetrics& m : result.rows) {
        hs.push_back(m.h);
        linfs.push_back(m.linf);
        l2s.push_back(m.l2);
    }
    result.order_linf = fit_order(hs, linfs);
    result.order_l2 = fit_order(hs, l2s);

    write_file_atomic(fs::path(cfg.out_dir) / "study.csv", csv);
    ordered_json stats;
    stats["mode"] = "study";
    stats["config"] = config_echo(cfg, prob);
    stats["rows"] = rows;
    stats["fit"] = {{"order_linf", result.order_linf},
                    {"order_l2", result.order_l2}};
    write_file_atomic(fs::path(cfg.out_dir) / "stats.json",
                      stats.dump(2) + "\n");

    if (cfg.dump_tables) dump_static_outputs(cfg, nullptr, "");
    return result;
}

}  // namespace volpot
