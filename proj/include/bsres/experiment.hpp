#pragma once

#include "bsres/charval.hpp"
#include "bsres/config.hpp"

namespace bsres {

struct ToeplitzRun {
    VecR eigenvalues;
    CountingCurve curve;
    FitReport fit;
    SchattenReport schatten;
    nlohmann::json report;
    std::vector<std::string> files;
};

// counting.csv, toeplitz.json, plot_counting.py under c.output
ToeplitzRun run_toeplitz_experiment(const ExperimentConfig& c);

struct CouplingRun {
    double e = 0.0;
    ResonanceSet set;
    SectorReport sector;
    std::vector<AnnulusReport> annuli;
    AccumulationReport accumulation;
    bool holds = true;
};

struct ResonanceRun {
    std::vector<CouplingRun> runs;
    VecR weight_eigenvalues;  // pWp (W+ or W-) on the level-0 basis
    VecR b_eigenvalues;
    bool holds = true;
    nlohmann::json report;
    std::vector<std::string> files;
};

// resonances_<i>.csv / .json per coupling, resonances.json, plot_resonances.py
ResonanceRun run_resonance_experiment(const ExperimentConfig& c);

// Plot scripts for whatever CSVs are in `dir`; MissingArtifact if there are none.
std::vector<std::string> emit_plots(const std::string& dir, double sector_theta = 0.3);

// Summary of toeplitz.json / resonances.json in `dir`.
nlohmann::json collect_report(const std::string& dir);

// temp file + rename
void write_atomic(const std::string& path, const std::string& content);

// BSRES_CACHE_DIR, empty when unset
std::string cache_dir();

// Level-0 Toeplitz eigenvalues of scale * U, through the cache when one is configured.
VecR toeplitz_eigenvalues(const Profile& U, double b0, int l_max, double scale = 1.0);

std::string resonance_csv(const ResonanceSet& s);
std::string counting_csv(const CountingCurve& c);

}  // namespace bsres
