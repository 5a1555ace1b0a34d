#pragma once

#include <map>

#include "bsres/birman_schwinger.hpp"
#include "bsres/toeplitz.hpp"

namespace bsres {

// Flat "key = value" file, '#' starts a comment. Unknown keys are rejected.
// See README.md for the full key list and defaults.
struct ExperimentConfig {
    double b0 = 1.0;
    Flavor flavor = Flavor::Pauli;
    double mass = 1.0;
    int n = 0;  // 0: 2 for pauli, 4 for dirac

    Profile transverse = Profile::gaussian(0.5);
    double m12 = 2.0;
    Profile axial = Profile::exponential(2.0);
    double delta = 1.0;
    MatC matrix;  // empty: identity of size n

    std::vector<double> couplings{0.05};

    double radii_fraction = 0.9;
    double r_in = 1e-4;
    double r_out = 0.1;
    std::vector<double> annuli;  // lower radii r of dyadic annuli (r, 2r)
    double sector_theta = 0.3;
    double sector_ratio = 0.1;
    double annulus_constant = 5.0;

    int l_max = 64;
    int q_max = 6;
    int grid = 200;
    double quad_tol = 1e-10;

    std::string law = "auto";  // auto | power | quasi_exp | compact
    double s_min = 1e-8;
    double s_max = 1e-1;
    int samples = 32;

    std::string output = "out";
    std::string tag = "run";
    int seed = 0;

    int spin_count() const { return n > 0 ? n : (flavor == Flavor::Pauli ? 2 : 4); }
    PerturbationSpec spec(double coupling) const;
    MagneticModel model() const { return MagneticModel::constant(b0); }
    LawParams law_params() const;

    bool operator==(const ExperimentConfig& o) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& c);

// "k=v" overrides from the command line, applied after the file.
void apply_override(ExperimentConfig& c, const std::string& key, const std::string& value);

// "1 0; 0 1", entries real or "(re,im)"
MatC parse_matrix(const std::string& s);
std::string format_matrix(const MatC& m);

}  // namespace bsres
