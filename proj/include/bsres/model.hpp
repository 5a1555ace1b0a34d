#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace bsres {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct MagneticModel {
    double b0 = 1.0;
    std::function<double(double, double)> phi_tilde;  // empty for a constant field
    double osc_phi_tilde = 0.0;
    double zeta = 2.0;

    static MagneticModel constant(double b0);
    // osc is estimated on a polar sample grid of radius `extent`.
    static MagneticModel perturbed(double b0, std::function<double(double, double)> phi,
                                   double extent = 50.0);
    bool constant_field() const { return !phi_tilde; }
};

enum class ProfileKind { Zero, Constant, Power, Gaussian, Bump, Indicator, Exponential };

// Catalog function used either on R^2 (transverse U, argument |x12| plus angle)
// or on R (axial v, argument |x3|). All catalog entries are even / radial except
// the optional cos(2 theta) anisotropy of the transverse power law.
struct Profile {
    ProfileKind kind = ProfileKind::Zero;
    double amplitude = 1.0;
    double alpha = 2.0;   // power: <x>^{-alpha}
    double mu = 1.0;      // gaussian: exp(-mu |x|^{2 beta})
    double beta = 1.0;
    double radius = 1.0;  // bump / indicator support
    double rate = 2.0;    // exponential: exp(-rate |x|)
    double aniso = 0.0;   // power only: (1 + aniso cos 2theta)

    static Profile zero() { return {}; }
    static Profile constant(double amp = 1.0);
    static Profile power(double alpha, double amp = 1.0, double aniso = 0.0);
    static Profile gaussian(double mu, double beta = 1.0, double amp = 1.0);
    static Profile bump(double radius, double amp = 1.0);
    static Profile indicator(double radius, double amp = 1.0);
    static Profile exponential(double rate, double amp = 1.0);

    double radial(double r) const;             // value at |x| = r (angle-averaged part)
    double operator()(double x, double y) const;  // transverse evaluation
    double axial(double x) const { return radial(std::abs(x)); }
    double angular(double theta) const;        // u0 factor, 1 when radial
    bool is_radial() const { return aniso == 0.0; }
    double support() const;                    // kInf unless compact
    double sup_abs() const;
    std::vector<double> breakpoints() const;   // radial coordinates of kinks / jumps
    std::string name() const;

    nlohmann::json to_json() const;
    static Profile from_json(const nlohmann::json& j);
};

std::string to_string(ProfileKind k);
ProfileKind profile_kind_from_string(const std::string& s);

struct PerturbationSpec {
    int n = 2;
    Profile transverse;
    double m12 = 2.0;
    Profile axial;
    double delta = 1.0;
    MatC matrix_profile = MatC::Identity(2, 2);
    double coupling = 1.0;

    double integral_abs_axial(double abs_tol = 1e-10) const;  // int |v| dx3
};

struct SampleGrid {
    std::vector<double> x3;   // axial sample points (both signs)
    std::vector<double> r12;  // transverse radii
    std::vector<double> theta;

    // |x3| <= 20/delta and |x12| <= 50, geometric spacing.
    static SampleGrid standard(double delta, int count = 200);
};

struct ValidationReport {
    bool accepted = false;
    bool hermitian = true;
    bool axial_bound_ok = false;
    bool transverse_bound_ok = false;
    double c_axial = 0.0;        // smallest C with |v| <= C exp(-2 delta <x3>) on the grid
    double c_transverse = 0.0;   // smallest C with U <= C <x12>^{-m12} on the grid
    double axial_tail_growth = 0.0;
    double transverse_tail_growth = 0.0;
    std::vector<std::string> notes;

    nlohmann::json to_json() const;
};

ValidationReport validate_hypothesis(const PerturbationSpec& spec, const SampleGrid& grid);

enum class WeightComponent { Plus, Minus };

// EntryAbs: |M_jj| (the component's own entry). AbsEntry: (|M|)_jj, the entry of
// the matrix modulus, which is what K K* produces. They agree for diagonal M.
enum class WeightConvention { EntryAbs, AbsEntry };

struct EffectiveWeight {
    Profile transverse;
    double factor = 0.0;  // |M_jj| * int |v|
    double operator()(double x, double y) const { return factor * transverse(x, y); }
    double radial(double r) const { return factor * transverse.radial(r); }
    bool is_radial() const { return transverse.is_radial(); }
};

EffectiveWeight effective_weight(const PerturbationSpec& spec, WeightComponent component,
                                 double abs_tol = 1e-10,
                                 WeightConvention conv = WeightConvention::EntryAbs);

struct DomainRadii {
    double epsilon = 0.0;
    double eta = 0.0;
    double m = 0.0;

    static double pauli_bound(double delta, double zeta);
    static double dirac_bound(double delta, double zeta, double m);
    // Radii set to `fraction` of the admissible supremum.
    static DomainRadii admissible(const PerturbationSpec& spec, const MagneticModel& model,
                                  double m, double fraction = 0.9);
    void check(const PerturbationSpec& spec, const MagneticModel& model) const;
};

// Hermitian helpers used by several modules.
bool is_hermitian(const MatC& m, double tol = 1e-12);
MatC hermitian_abs(const MatC& m);
MatC hermitian_sqrt_abs(const MatC& m);
MatC hermitian_sign(const MatC& m);

}  // namespace bsres
