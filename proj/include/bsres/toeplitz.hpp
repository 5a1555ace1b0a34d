#pragma once

#include <optional>

#include "bsres/landau.hpp"

namespace bsres {

struct ToeplitzMatrix {
    MatC matrix;        // <e_{0,l}, U e_{0,l'}>
    bool radial = true;
    VecR eigenvalues;   // descending
};

// Galerkin matrix of scale * pUp on the level-0 basis. Radial profiles use the
// exact diagonal, others the Gauss-Laguerre x trapezoid route.
ToeplitzMatrix assemble(const Profile& U, const LandauBasis& basis, double scale = 1.0);
ToeplitzMatrix assemble(const EffectiveWeight& W, const LandauBasis& basis);

// General route for any transverse function. n_t Gauss-Laguerre nodes in t,
// n_theta trapezoid nodes in angle.
ToeplitzMatrix assemble_general(const std::function<double(double, double)>& U,
                                const LandauBasis& basis, int n_t = 0, int n_theta = 64);

// lambda_l = int U(sqrt(2t/b0)) t^l e^{-t} / l! dt
double radial_toeplitz_entry(const Profile& U, double b0, int l);

// Cross-level entries int U f_{q,l} f_{q',l'} dt for a radial profile (same orbital).
double radial_cross_entry(const Profile& U, double b0, int q, int l, int qp, int lp);

int counting(const VecR& eigenvalues, double s);

double comparator_power(double s, double alpha, double u0_integral, double b0);
double comparator_quasi_exponential(double s, double beta, double mu, double b0);
double comparator_compact(double s);

// int_0^{2pi} u0(theta)^{2/alpha} dtheta for the catalog power profile
double power_u0_integral(const Profile& U);

struct SchattenReport {
    int q = 2;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    bool holds = false;
    nlohmann::json to_json() const;
};

double lq_norm_q(const Profile& U, int q);  // ||U||_q^q over R^2
SchattenReport schatten_check(const VecR& eigenvalues, const Profile& U, int q,
                              const MagneticModel& model);

enum class CountingLaw { Power, QuasiExp, Compact };
std::string to_string(CountingLaw law);

struct CountingCurve {
    std::vector<double> s;
    std::vector<int> n_plus;
    std::vector<double> comparator;
    std::vector<double> ratio;  // n_plus / comparator
};

struct LawParams {
    CountingLaw law = CountingLaw::Power;
    double alpha = 2.0, u0_integral = 2.0 * kPi;  // power
    double beta = 1.0, mu = 1.0;                  // quasi-exponential
    double b0 = 1.0;
    double scale = 1.0;  // multiplies U in front of the comparator (W = scale * U)
};

double comparator(const LawParams& p, double s);

// Geometric samples in [s_min, s_max]; TruncationError if some n_plus exceeds L_max/2.
CountingCurve counting_curve(const VecR& eigenvalues, int l_max, const LawParams& p, double s_min,
                             double s_max, int samples);

struct FitReport {
    CountingLaw law = CountingLaw::Power;
    double s_lo = 0.0, s_hi = 0.0;
    int used = 0;
    double slope = 0.0;             // transformed-coordinate slope
    double slope_expected = 0.0;
    double slope_rel_dev = 0.0;
    double prefactor = 0.0;          // power: mean n s^{2/alpha}; beta < 1: exp(intercept)
    double prefactor_expected = 0.0;
    double prefactor_rel_dev = 0.0;
    double ratio_deepest = 0.0;      // n / comparator at the smallest s
    bool degenerate = false;
    std::string coordinates;
    nlohmann::json to_json() const;
};

// Least squares in the law's coordinates over [s_lo, s_hi] (default: deepest decade).
FitReport fit_counting_law(const CountingCurve& curve, const LawParams& p,
                           std::optional<std::pair<double, double>> range = std::nullopt);

}  // namespace bsres
