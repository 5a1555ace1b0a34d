#include "bsres/bsres.h"

#include <cstring>
#include <string>

#include "bsres/errors.hpp"
#include "bsres/experiment.hpp"

extern "C" void openblas_set_num_threads(int);

struct bsres_config {
    bsres::ExperimentConfig c;
};

struct bsres_result {
    std::string json;
    bool holds = false;
};

namespace {

thread_local std::string g_error;

int fail(int code, const std::string& msg) {
    g_error = msg;
    return code;
}

int status_of(bsres::ErrorKind k) {
    switch (k) {
        case bsres::ErrorKind::Invalid: return BSRES_E_INVALID;
        case bsres::ErrorKind::Validation: return BSRES_E_VALIDATION;
        case bsres::ErrorKind::Numerical: return BSRES_E_NUMERICAL;
        case bsres::ErrorKind::CheckFailed: return BSRES_E_CHECK_FAILED;
        case bsres::ErrorKind::Io: return BSRES_E_IO;
    }
    return BSRES_E_INTERNAL;
}

template <class F>
int guarded(F&& f) {
    try {
        g_error.clear();
        return f();
    } catch (const bsres::Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(BSRES_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(BSRES_E_INTERNAL, e.what());
    }
}

int finish(bsres_result** out, const nlohmann::json& j, bool holds) {
    auto* r = new bsres_result;
    r->json = j.dump(2);
    r->holds = holds;
    *out = r;
    return BSRES_OK;
}

}  // namespace

extern "C" {

const char* bsres_version(void) { return "0.1.0"; }

const char* bsres_last_error(void) { return g_error.c_str(); }

int bsres_set_threads(int n) {
    if (n < 1) return fail(BSRES_E_INVALID, "thread count must be positive");
    openblas_set_num_threads(n);
    return BSRES_OK;
}

int bsres_config_load(const char* path, bsres_config** out) {
    if (!path || !out) return fail(BSRES_E_INVALID, "null argument");
    return guarded([&] {
        *out = new bsres_config{bsres::load_config(path)};
        return BSRES_OK;
    });
}

int bsres_config_parse(const char* text, bsres_config** out) {
    if (!text || !out) return fail(BSRES_E_INVALID, "null argument");
    return guarded([&] {
        *out = new bsres_config{bsres::parse_config(text)};
        return BSRES_OK;
    });
}

int bsres_config_set(bsres_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(BSRES_E_INVALID, "null argument");
    return guarded([&] {
        bsres::ExperimentConfig tmp = cfg->c;
        bsres::apply_override(tmp, key, value);
        // re-run the whole-config checks
        tmp = bsres::parse_config(bsres::serialize_config(tmp));
        cfg->c = tmp;
        return BSRES_OK;
    });
}

int bsres_config_serialize(const bsres_config* cfg, char** out) {
    if (!cfg || !out) return fail(BSRES_E_INVALID, "null argument");
    return guarded([&] {
        const std::string s = bsres::serialize_config(cfg->c);
        char* p = new char[s.size() + 1];
        std::memcpy(p, s.c_str(), s.size() + 1);
        *out = p;
        return BSRES_OK;
    });
}

void bsres_config_free(bsres_config* cfg) { delete cfg; }

int bsres_validate(const bsres_config* cfg, bsres_result** out) {
    if (!cfg || !out) return fail(BSRES_E_INVALID, "null argument");
    return guarded([&] {
        const auto& c = cfg->c;
        const bsres::PerturbationSpec spec = c.spec(c.couplings.empty() ? 1.0 : c.couplings.front());
        const bsres::ValidationReport r = bsres::validate_hypothesis(spec, bsres::SampleGrid::standard(c.delta));
        nlohmann::json j = r.to_json();
        const auto W = bsres::effective_weight(spec, bsres::WeightComponent::Plus, c.quad_tol);
        j["w_plus_factor"] = W.factor;
        if (spec.n == 4)
            j["w_minus_factor"] = bsres::effective_weight(spec, bsres::WeightComponent::Minus, c.quad_tol).factor;
        return finish(out, j, r.accepted);
    });
}

int bsres_run_toeplitz(const bsres_config* cfg, bsres_result** out) {
    if (!cfg || !out) return fail(BSRES_E_INVALID, "null argument");
    return guarded([&] {
        const auto run = bsres::run_toeplitz_experiment(cfg->c);
        nlohmann::json j = run.report;
        j["files"] = run.files;
        return finish(out, j, run.schatten.holds);
    });
}

int bsres_run_resonances(const bsres_config* cfg, bsres_result** out) {
    if (!cfg || !out) return fail(BSRES_E_INVALID, "null argument");
    return guarded([&] {
        const auto run = bsres::run_resonance_experiment(cfg->c);
        nlohmann::json j = run.report;
        j["files"] = run.files;
        return finish(out, j, run.holds);
    });
}

int bsres_emit_plots(const char* dir, double sector_theta, bsres_result** out) {
    if (!dir || !out) return fail(BSRES_E_INVALID, "null argument");
    return guarded([&] { return finish(out, {{"files", bsres::emit_plots(dir, sector_theta)}}, true); });
}

int bsres_report(const char* dir, bsres_result** out) {
    if (!dir || !out) return fail(BSRES_E_INVALID, "null argument");
    return guarded([&] {
        const nlohmann::json j = bsres::collect_report(dir);
        return finish(out, j, j.at("holds").get<bool>());
    });
}

const char* bsres_result_json(const bsres_result* r) { return r ? r->json.c_str() : ""; }
int bsres_result_holds(const bsres_result* r) { return r && r->holds ? 1 : 0; }
void bsres_result_free(bsres_result* r) { delete r; }
void bsres_string_free(char* s) { delete[] s; }

int bsres_spectral_map(const char* flavor, double m, double k_re, double k_im, double* z_re, double* z_im) {
    if (!flavor || !z_re || !z_im) return fail(BSRES_E_INVALID, "null argument");
    return guarded([&] {
        const bsres::cplx z = bsres::spectral_map(bsres::flavor_from_string(flavor), m, {k_re, k_im});
        *z_re = z.real();
        *z_im = z.imag();
        return BSRES_OK;
    });
}

int bsres_landau_dei(double b0, double t, double* out) {
    if (!out) return fail(BSRES_E_INVALID, "null argument");
    if (!(b0 > 0.0)) return fail(BSRES_E_INVALID, "b0 must be positive");
    return guarded([&] {
        *out = bsres::landau_dei(bsres::MagneticModel::constant(b0), t);
        return BSRES_OK;
    });
}

int bsres_counting(const double* eigenvalues, size_t n, double s, int* out) {
    if ((!eigenvalues && n) || !out) return fail(BSRES_E_INVALID, "null argument");
    return guarded([&] {
        const Eigen::Map<const bsres::VecR> ev(eigenvalues, static_cast<Eigen::Index>(n));
        *out = bsres::counting(ev, s);
        return BSRES_OK;
    });
}

}  // extern "C"
