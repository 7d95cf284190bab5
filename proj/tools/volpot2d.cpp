// Command line front end: volpot2d run|study <config.json>.
//
// Exit codes: 0 on success, 2 for bad command lines or invalid
// configuration, 3 when the solve itself fails.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "volpot/runner.hpp"

namespace {

struct Overrides {
    std::string out;
    int threads = -1;      // -1 = flag absent
    double epsilon = 0;    // 0 = flag absent
    bool dump_mesh = false;
    bool dump_tables = false;
};

void add_common_options(CLI::App* sub, std::string& config_path,
                        Overrides& ov) {
    sub->add_option("config", config_path, "JSON configuration file")
        ->required();
    sub->add_option("--out", ov.out, "Output directory (default ./out)");
    sub->add_option("--threads", ov.threads, "Worker threads, 0 = all cores")
        ->check(CLI::Range(0, 512));
    sub->add_option("--epsilon", ov.epsilon,
                    "Far-field summation accuracy target");
    sub->add_flag("--dump-mesh", ov.dump_mesh,
                  "Also write the mesh as text");
    sub->add_flag("--dump-tables", ov.dump_tables,
                  "Also write the reference correction tables");
}

// Flags beat the config file, the config file beats VOLPOT2D_THREADS,
// and the environment beats the hardware default.
volpot::RunConfig prepare(const std::string& path, const Overrides& ov) {
    volpot::RunConfig cfg = volpot::load_config(path);
    if (!ov.out.empty()) cfg.out_dir = ov.out;
    if (ov.dump_mesh) cfg.dump_mesh = true;
    if (ov.dump_tables) cfg.dump_tables = true;
    if (ov.epsilon != 0) {
        if (!(ov.epsilon > 0) || ov.epsilon > 1e-2)
            throw volpot::ConfigError("--epsilon must be in (0, 1e-2]");
        cfg.epsilon = ov.epsilon;
    }
    if (ov.threads >= 0) {
        cfg.threads = ov.threads;
    } else if (!cfg.threads_from_config) {
        if (const char* env = std::getenv("VOLPOT2D_THREADS")) {
            char* end = nullptr;
            long n = std::strtol(env, &end, 10);
            if (end == env || *end != '\0' || n < 0 || n > 512)
                throw volpot::ConfigError(
                    "VOLPOT2D_THREADS must be an integer in [0, 512]");
            cfg.threads = static_cast<int>(n);
        }
    }
    return cfg;
}

void print_metrics(const volpot::RunMetrics& m) {
    std::printf("h=%-8g cells=%d+%d ndofs=%-7d boundary+eval pts=%d",
                m.h, m.n_tri, m.n_box, m.ndofs, m.n_eval);
    if (m.linf >= 0)
        std::printf("  linf=%.3e  l2=%.3e", m.linf, m.l2);
    std::printf("  (%.1fs)\n", m.total_seconds);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High order volume potential and boundary integral solver "
                 "for 2D Poisson and modified Helmholtz problems"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    CLI::App* run =
        app.add_subcommand("run", "Solve one configuration and write "
                                  "solution.csv plus stats.json");
    CLI::App* study =
        app.add_subcommand("study", "Run an h-refinement sweep and fit "
                                    "convergence orders");
    add_common_options(run, config_path, ov);
    add_common_options(study, config_path, ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        volpot::RunConfig cfg = prepare(config_path, ov);
        if (run->parsed()) {
            volpot::RunMetrics m = volpot::run_single(cfg);
            print_metrics(m);
            std::printf("wrote %s/solution.csv\n", cfg.out_dir.c_str());
        } else {
            volpot::StudyResult s = volpot::run_study(cfg);
            for (const volpot::RunMetrics& m : s.rows) print_metrics(m);
            std::printf("fitted order: linf %.2f, l2 %.2f\n", s.order_linf,
                        s.order_l2);
            std::printf("wrote %s/study.csv\n", cfg.out_dir.c_str());
        }
        return 0;
    } catch (const volpot::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
