#pragma once

#include "bsres/birman_schwinger.hpp"

namespace bsres {

// log F(k) on an arbitrary branch; the winding code unwraps it.
using LogFn = std::function<cplx(cplx)>;

// log det(I + T)
cplx log_det(const MatC& T);

struct WindingResult {
    double index_real = 0.0;
    int index = 0;
    double log_min_abs = 0.0;  // min / max of log|F| on the contour
    double log_max_abs = 0.0;
    std::vector<cplx> nodes;
    std::vector<cplx> log_values;  // unwrapped along the path
};

struct ContourOptions {
    double too_close = 1e-9;   // min|F|/max|F| below this raises ContourTooClose
    int max_depth = 24;        // node insertions per segment
    int arc_nodes = 24;        // initial nodes per full turn
    int radial_nodes = 4;      // initial nodes per unit of log(r2/r1)
};

// Positively oriented circle.
WindingResult contour_index(const LogFn& f, cplx center, double radius, const ContourOptions& o = {});
// Polar box {r1 < |k| < r2, th1 < arg k < th2}; th2 - th1 = 2pi gives the annulus.
WindingResult box_index(const LogFn& f, double r1, double r2, double th1, double th2,
                        const ContourOptions& o = {});

// Operator form (1/2 pi i) tr \oint A' A^{-1} on a circle, trapezoid rule; nodes doubled
// until the value is within 1e-6 of an integer.
struct OperatorIndex {
    double index_real = 0.0;
    int index = 0;
    int nodes = 0;
};
OperatorIndex operator_index(const std::function<MatC(cplx)>& A, const std::function<MatC(cplx)>& dA,
                             cplx center, double radius, int nodes = 64, int max_nodes = 16384);

struct Zero {
    cplx k;
    int multiplicity = 1;
    double residual = 0.0;   // |F(k)| / max|F| on the isolating box
    bool converged = false;
    bool cluster = false;
    int block = -1;
};

struct SearchOptions {
    double theta0 = 0.3;       // start angle of the annulus cut (kept off the imaginary axis)
    int max_boxes = 4000;
    double cluster_size = 1e-7;  // relative box size below which index >= 2 is a cluster
    double newton_tol = 1e-12;
    int newton_max = 60;
    ContourOptions contour;
};

struct ResonanceSet {
    std::vector<Zero> zeros;
    Flavor flavor = Flavor::Pauli;
    double coupling = 0.0;
    double r_in = 0.0, r_out = 0.0;
    int boxes = 0;
    int total_index = 0;
    nlohmann::json to_json() const;
};

// Zeros of an analytic F in r_in < |k| < r_out.
std::vector<Zero> find_zeros(const LogFn& f, double r_in, double r_out, const SearchOptions& o,
                             int* boxes_used = nullptr, int* total_index = nullptr);

// Per-block search on k^{r_b} det(I + e T_b(k)); results sorted by (|k|, arg k).
ResonanceSet find_resonances(const BSAssembly& a, double r_in, double r_out, double e,
                             const SearchOptions& o = {});

// Index over a circle around k0 of radius min(nearest neighbour, |k0|)/3.
int multiplicity(const LogFn& f, cplx k0, const std::vector<cplx>& others,
                 const ContourOptions& o = {});

// Count of zeros (with multiplicity) in r < |k| < r2.
int count_in_annulus(const std::vector<Zero>& zeros, double r, double r2, bool closed_outer = false);

struct SectorReport {
    double sign = 1.0;
    double theta = 0.0;
    bool holds = true;
    double worst_im = 0.0;       // max sign * Im k
    double worst_re_ratio = 0.0;  // max |Re k| / |k|
    int violations = 0;
    cplx worst_k = 0.0;
    nlohmann::json to_json() const;
};
// sign = sign(e) (times -1 for the -m threshold)
SectorReport sector_check(const std::vector<Zero>& zeros, double sign, double theta, double tol = 1e-10,
                          double ratio_bound = -1.0);

struct AnnulusReport {
    double r = 0.0;
    int count = 0;
    int n_plus = 0;
    double bound = 0.0;
    bool holds = true;
    nlohmann::json to_json() const;
};
// count in r < |k| < 2r against n_plus(r, pWp) |ln r| + constant
AnnulusReport annulus_count_check(const std::vector<Zero>& zeros, double r, const VecR& weight_eigs,
                                  double constant = 5.0);

struct AccumulationReport {
    double r = 0.0, r0 = 0.0, e = 0.0;
    int count = 0;
    int n_plus_scaled = 0;   // n_plus(r, |e| pWp / 2)
    int n_plus_unit = 0;  // n_plus(r, pWp / 2)
    double ratio = 0.0;      // count / n_plus_scaled
    nlohmann::json to_json() const;
};
AccumulationReport accumulation_check(const std::vector<Zero>& zeros, double r, double r0, double e,
                                      const VecR& weight_eigs);

}  // namespace bsres
