// bsres: batch front end over the C API.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsres/bsres.h"

namespace {

int exit_code(int status) {
    if (status == BSRES_E_IO || status == BSRES_E_INTERNAL) return 1;
    return status;
}

int report_error(int status) {
    std::fprintf(stderr, "bsres: %s\n", bsres_last_error());
    return exit_code(status);
}

struct Common {
    std::string config;
    std::string output;
    std::vector<std::string> overrides;
    double quad_tol = 0.0;
    int threads = 1;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config, "config file (key = value)")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", c.output, "output directory (overrides 'output')");
    sub->add_option("-s,--set", c.overrides, "extra key=value override, repeatable");
    sub->add_option("--quad-tol", c.quad_tol, "axial quadrature tolerance (overrides solver.quad_tol)");
    sub->add_option("-j,--threads", c.threads, "BLAS thread cap")->check(CLI::PositiveNumber);
}

// 0 on success, else an exit code
int load(const Common& c, bsres_config** cfg) {
    int st = bsres_config_load(c.config.c_str(), cfg);
    if (st != BSRES_OK) return report_error(st);
    auto set = [&](const std::string& k, const std::string& v) {
        const int s = bsres_config_set(*cfg, k.c_str(), v.c_str());
        return s == BSRES_OK ? 0 : report_error(s);
    };
    for (const auto& o : c.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "bsres: --set expects key=value, got '%s'\n", o.c_str());
            return 1;
        }
        if (int rc = set(o.substr(0, eq), o.substr(eq + 1))) return rc;
    }
    if (!c.output.empty())
        if (int rc = set("output", c.output)) return rc;
    if (c.quad_tol > 0.0) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", c.quad_tol);
        if (int rc = set("solver.quad_tol", buf)) return rc;
    }
    st = bsres_set_threads(c.threads);
    if (st != BSRES_OK) return report_error(st);
    return 0;
}

// by reference: `r` is read only after the call in the same argument list has set it
int emit(int status, bsres_result* const& r, int fail_code) {
    if (status != BSRES_OK) return report_error(status);
    std::printf("%s\n", bsres_result_json(r));
    const int holds = bsres_result_holds(r);
    bsres_result_free(r);
    return holds ? 0 : fail_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold resonances of perturbed Pauli and Dirac operators"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(bsres_version()));

    Common vc, tc, rc;
    auto* validate = app.add_subcommand("validate", "check the decay hypothesis and print W+- factors");
    add_common(validate, vc);
    auto* toeplitz = app.add_subcommand("toeplitz", "Toeplitz counting curve, fit and Schatten check");
    add_common(toeplitz, tc);
    auto* resonances = app.add_subcommand("resonances", "locate resonances and run the region checks");
    add_common(resonances, rc);

    std::string dir;
    double theta = 0.3;
    auto* report = app.add_subcommand("report", "summarize a run directory and write plot scripts");
    report->add_option("dir", dir, "run directory")->required();
    report->add_option("--theta", theta, "sector half-angle for the k-plane plot");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    bsres_config* cfg = nullptr;
    bsres_result* r = nullptr;
    int code = 0;
    if (validate->parsed()) {
        if ((code = load(vc, &cfg)) != 0) return code;
        code = emit(bsres_validate(cfg, &r), r, 2);
    } else if (toeplitz->parsed()) {
        if ((code = load(tc, &cfg)) != 0) return code;
        code = emit(bsres_run_toeplitz(cfg, &r), r, 4);
    } else if (resonances->parsed()) {
        if ((code = load(rc, &cfg)) != 0) return code;
        code = emit(bsres_run_resonances(cfg, &r), r, 4);
    } else if (report->parsed()) {
        bsres_result* plots = nullptr;
        const int st = bsres_emit_plots(dir.c_str(), theta, &plots);
        if (st != BSRES_OK) return report_error(st);
        bsres_result_free(plots);
        code = emit(bsres_report(dir.c_str(), &r), r, 4);
    }
    bsres_config_free(cfg);
    return code;
}
