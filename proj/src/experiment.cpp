#include "bsres/experiment.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "bsres/errors.hpp"

namespace fs = std::filesystem;

namespace bsres {

namespace {

std::string g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

nlohmann::json vec_json(const VecR& v) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

const char* kCountingPlot = R"PY(import csv
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "counting.csv"
s, n, c = [], [], []
with open(path) as f:
    for row in csv.DictReader(f):
        s.append(float(row["s"]))
        n.append(float(row["n_plus"]))
        c.append(float(row["comparator"]))

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.loglog(s, n, "o", label="n_plus(s)")
ax1.loglog(s, c, "-", label="comparator")
ax1.set_xlabel("s")
ax1.legend()
ax2.semilogx(s, [a / b if b else float("nan") for a, b in zip(n, c)], "o-")
ax2.axhline(1.0, color="gray", lw=0.5)
ax2.set_xlabel("s")
ax2.set_ylabel("n_plus / comparator")
fig.tight_layout()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=120)
)PY";

const char* kResonancePlot = R"PY(import csv
import glob
import math
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

THETA = float(sys.argv[1]) if len(sys.argv) > 1 else {THETA}
here = os.path.dirname(os.path.abspath(__file__))

fig, ax = plt.subplots(figsize=(6, 6))
rmax = 0.0
for path in sorted(glob.glob(os.path.join(here, "resonances_*.csv"))):
    re, im = [], []
    with open(path) as f:
        for row in csv.DictReader(f):
            re.append(float(row["Re k"]))
            im.append(float(row["Im k"]))
    rmax = max([rmax] + [math.hypot(a, b) for a, b in zip(re, im)])
    ax.plot(re, im, "o", ms=4, label=os.path.basename(path))
rmax = rmax or 1.0
for sgn in (1.0, -1.0):
    for side in (1.0, -1.0):
        ax.plot([0.0, side * rmax * math.sin(THETA)], [0.0, sgn * rmax * math.cos(THETA)], "k--", lw=0.6)
ax.axhline(0.0, color="gray", lw=0.5)
ax.axvline(0.0, color="gray", lw=0.5)
ax.set_xlabel("Re k")
ax.set_ylabel("Im k")
ax.set_aspect("equal")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(os.path.join(here, "resonances.png"), dpi=120)
)PY";

void read_json(const std::string& path, nlohmann::json& out) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("missing '" + path + "'");
    try {
        in >> out;
    } catch (const std::exception& e) {
        throw IoError("cannot parse '" + path + "': " + e.what());
    }
}

}  // namespace

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp + "'");
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename onto '" + path + "'");
    }
}

std::string cache_dir() {
    const char* d = std::getenv("BSRES_CACHE_DIR");
    return d ? std::string(d) : std::string();
}

VecR toeplitz_eigenvalues(const Profile& U, double b0, int l_max, double scale) {
    const nlohmann::json key{{"b0", b0}, {"l_max", l_max}, {"scale", scale}, {"profile", U.to_json()}};
    const std::string dir = cache_dir();
    std::string path;
    if (!dir.empty()) {
        const std::string k = key.dump();
        char name[64];
        std::snprintf(name, sizeof name, "toeplitz_%016zx.json", std::hash<std::string>{}(k));
        path = join(dir, name);
        std::ifstream in(path);
        if (in) {
            try {
                nlohmann::json j;
                in >> j;
                if (j.at("key") == key) {
                    const auto v = j.at("eigenvalues").get<std::vector<double>>();
                    return Eigen::Map<const VecR>(v.data(), static_cast<Eigen::Index>(v.size()));
                }
            } catch (const std::exception&) {
                // stale or corrupt entry: recompute and overwrite
            }
        }
    }
    const VecR ev = assemble(U, LandauBasis(b0, 1, l_max), scale).eigenvalues;
    if (!path.empty()) {
        ensure_dir(dir);
        write_atomic(path, nlohmann::json{{"key", key}, {"eigenvalues", vec_json(ev)}}.dump());
    }
    return ev;
}

std::string counting_csv(const CountingCurve& c) {
    std::string s = "s,n_plus,comparator,ratio\n";
    for (std::size_t i = 0; i < c.s.size(); ++i)
        s += g17(c.s[i]) + "," + std::to_string(c.n_plus[i]) + "," + g17(c.comparator[i]) + "," + g17(c.ratio[i]) +
             "\n";
    return s;
}

std::string resonance_csv(const ResonanceSet& rs) {
    std::string s = "Re k,Im k,mult,residual\n";
    for (const auto& z : rs.zeros)
        s += g17(z.k.real()) + "," + g17(z.k.imag()) + "," + std::to_string(z.multiplicity) + "," +
             g17(z.residual) + "\n";
    return s;
}

ToeplitzRun run_toeplitz_experiment(const ExperimentConfig& c) {
    ToeplitzRun run;
    const MagneticModel model = c.model();
    const LawParams p = c.law_params();
    run.eigenvalues = toeplitz_eigenvalues(c.transverse, c.b0, c.l_max);
    run.curve = counting_curve(run.eigenvalues, c.l_max, p, c.s_min, c.s_max, c.samples);
    run.fit = fit_counting_law(run.curve, p);
    run.schatten = schatten_check(run.eigenvalues, c.transverse, 2, model);

    run.report = {{"tag", c.tag},
                  {"transverse", c.transverse.to_json()},
                  {"b0", c.b0},
                  {"l_max", c.l_max},
                  {"law", to_string(p.law)},
                  {"fit", run.fit.to_json()},
                  {"schatten", run.schatten.to_json()},
                  {"holds", run.schatten.holds},
                  {"eigenvalues", vec_json(run.eigenvalues.head(std::min<Eigen::Index>(run.eigenvalues.size(), 32)))}};

    ensure_dir(c.output);
    const std::string csv = join(c.output, "counting.csv"), js = join(c.output, "toeplitz.json");
    write_atomic(csv, counting_csv(run.curve));
    write_atomic(js, run.report.dump(2) + "\n");
    run.files = {csv, js};
    for (const auto& f : emit_plots(c.output, c.sector_theta)) run.files.push_back(f);
    return run;
}

ResonanceRun run_resonance_experiment(const ExperimentConfig& c) {
    ResonanceRun run;
    if (c.couplings.empty()) throw ConfigError("couplings list is empty");
    const MagneticModel model = c.model();
    const PerturbationSpec spec0 = c.spec(c.couplings.front());

    const ValidationReport vr = validate_hypothesis(spec0, SampleGrid::standard(c.delta));
    if (!vr.accepted) {
        std::string why;
        for (const auto& n : vr.notes) why += (why.empty() ? "" : "; ") + n;
        throw ValidationError("hypothesis rejected: " + why);
    }
    const bool pauli = c.flavor == Flavor::Pauli;
    const DomainRadii radii = DomainRadii::admissible(spec0, model, pauli ? 0.0 : c.mass, c.radii_fraction);
    const double disk = pauli ? radii.epsilon : radii.eta;
    if (c.r_out >= disk)
        throw ValidationError("scan.r_out = " + g17(c.r_out) + " is outside the admissible disk (" + g17(disk) + ")");
    for (double r : c.annuli)
        if (r < c.r_in || 2.0 * r > c.r_out)
            throw ConfigError("annulus (" + g17(r) + ", " + g17(2.0 * r) + ") is not inside the scan region");

    const LandauBasis basis = build_basis(model, c.q_max, c.l_max);
    const AxialGrid grid = AxialGrid::build(c.delta, c.grid, c.axial);
    BSOptions opt;
    opt.mass = c.mass;
    opt.disk_radius = disk;
    const BSAssembly a(spec0, basis, grid, c.flavor, opt);
    run.b_eigenvalues = a.B_eigenvalues();

    const WeightComponent comp = c.flavor == Flavor::DiracMinus ? WeightComponent::Minus : WeightComponent::Plus;
    const EffectiveWeight W = effective_weight(spec0, comp, c.quad_tol);
    run.weight_eigenvalues = toeplitz_eigenvalues(W.transverse, c.b0, c.l_max, W.factor);

    ensure_dir(c.output);
    nlohmann::json per = nlohmann::json::array();
    for (std::size_t i = 0; i < c.couplings.size(); ++i) {
        CouplingRun cr;
        cr.e = c.couplings[i];
        if (c.r_out > c.r_in) cr.set = find_resonances(a, c.r_in, c.r_out, cr.e);
        cr.set.flavor = c.flavor;
        cr.set.coupling = cr.e;
        cr.set.r_in = c.r_in;
        cr.set.r_out = c.r_out;
        const double sign = (cr.e > 0 ? 1.0 : -1.0) * a.pole_sign();
        cr.sector = sector_check(cr.set.zeros, sign, c.sector_theta, 1e-10, c.sector_ratio);
        cr.holds = cr.sector.holds;
        for (double r : c.annuli) {
            cr.annuli.push_back(annulus_count_check(cr.set.zeros, r, run.weight_eigenvalues, c.annulus_constant));
            cr.holds = cr.holds && cr.annuli.back().holds;
        }
        cr.accumulation = accumulation_check(cr.set.zeros, c.r_in, c.r_out, cr.e, run.weight_eigenvalues);
        run.holds = run.holds && cr.holds;

        nlohmann::json ann = nlohmann::json::array();
        for (const auto& r : cr.annuli) ann.push_back(r.to_json());
        nlohmann::json j{{"e", cr.e},
                         {"resonances", cr.set.to_json()},
                         {"sector", cr.sector.to_json()},
                         {"annuli", ann},
                         {"accumulation", cr.accumulation.to_json()},
                         {"holds", cr.holds}};
        const std::string stem = "resonances_" + std::to_string(i);
        const std::string csv = join(c.output, stem + ".csv"), js = join(c.output, stem + ".json");
        write_atomic(csv, resonance_csv(cr.set));
        write_atomic(js, j.dump(2) + "\n");
        run.files.push_back(csv);
        run.files.push_back(js);
        per.push_back(j);
        run.runs.push_back(std::move(cr));
    }
    run.report = {{"tag", c.tag},
                  {"flavor", to_string(c.flavor)},
                  {"disk_radius", disk},
                  {"validation", vr.to_json()},
                  {"b_eigenvalues", vec_json(run.b_eigenvalues.head(std::min<Eigen::Index>(run.b_eigenvalues.size(), 32)))},
                  {"runs", per},
                  {"holds", run.holds}};
    const std::string summary = join(c.output, "resonances.json");
    write_atomic(summary, run.report.dump(2) + "\n");
    run.files.push_back(summary);
    for (const auto& f : emit_plots(c.output, c.sector_theta)) run.files.push_back(f);
    return run;
}

std::vector<std::string> emit_plots(const std::string& dir, double sector_theta) {
    std::vector<std::string> out;
    if (!fs::is_directory(dir)) throw MissingArtifact("run directory '" + dir + "' does not exist");
    if (fs::exists(join(dir, "counting.csv"))) {
        const std::string p = join(dir, "plot_counting.py");
        write_atomic(p, kCountingPlot);
        out.push_back(p);
    }
    bool any = false;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string n = e.path().filename().string();
        if (n.rfind("resonances_", 0) == 0 && e.path().extension() == ".csv") any = true;
    }
    if (any) {
        std::string body = kResonancePlot;
        const std::string mark = "{THETA}";
        body.replace(body.find(mark), mark.size(), g17(sector_theta));
        const std::string p = join(dir, "plot_resonances.py");
        write_atomic(p, body);
        out.push_back(p);
    }
    if (out.empty()) throw MissingArtifact("no counting.csv or resonances_*.csv in '" + dir + "'");
    return out;
}

nlohmann::json collect_report(const std::string& dir) {
    nlohmann::json rep{{"directory", dir}};
    bool found = false, holds = true;
    if (fs::exists(join(dir, "toeplitz.json"))) {
        nlohmann::json t;
        read_json(join(dir, "toeplitz.json"), t);
        rep["toeplitz"] = {{"law", t.at("law")}, {"fit", t.at("fit")}, {"schatten", t.at("schatten")}};
        holds = holds && t.value("holds", false);
        found = true;
    }
    if (fs::exists(join(dir, "resonances.json"))) {
        nlohmann::json r;
        read_json(join(dir, "resonances.json"), r);
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& x : r.at("runs"))
            runs.push_back({{"e", x.at("e")},
                            {"zeros", x.at("resonances").at("zeros").size()},
                            {"sector_holds", x.at("sector").at("holds")},
                            {"accumulation_ratio", x.at("accumulation").at("ratio")},
                            {"holds", x.at("holds")}});
        rep["resonances"] = {{"flavor", r.at("flavor")}, {"runs", runs}};
        holds = holds && r.value("holds", false);
        found = true;
    }
    if (!found) throw MissingArtifact("no toeplitz.json or resonances.json in '" + dir + "'");
    rep["holds"] = holds;
    return rep;
}

}  // namespace bsres
