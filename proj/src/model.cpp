#include "bsres/model.hpp"

#include <algorithm>
#include <cmath>

#include "bsres/errors.hpp"
#include "bsres/quadrature.hpp"

namespace bsres {

MagneticModel MagneticModel::constant(double b0) {
    if (!(b0 > 0.0)) throw InvalidArgument("b0 must be positive");
    MagneticModel m;
    m.b0 = b0;
    m.osc_phi_tilde = 0.0;
    m.zeta = 2.0 * b0;
    return m;
}

MagneticModel MagneticModel::perturbed(double b0, std::function<double(double, double)> phi,
                                       double extent) {
    MagneticModel m = constant(b0);
    if (!phi) return m;
    double lo = kInf, hi = -kInf;
    const int nr = 120, nt = 64;
    for (int i = 0; i <= nr; ++i) {
        const double r = extent * (std::exp(6.0 * i / nr) - 1.0) / (std::exp(6.0) - 1.0);
        for (int j = 0; j < nt; ++j) {
            const double t = 2.0 * kPi * j / nt;
            const double v = phi(r * std::cos(t), r * std::sin(t));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    m.phi_tilde = std::move(phi);
    m.osc_phi_tilde = hi - lo;
    m.zeta = 2.0 * b0 * std::exp(-2.0 * m.osc_phi_tilde);
    return m;
}

// ---------------------------------------------------------------- Profile

Profile Profile::constant(double amp) {
    Profile p;
    p.kind = ProfileKind::Constant;
    p.amplitude = amp;
    return p;
}
Profile Profile::power(double alpha, double amp, double aniso) {
    if (!(alpha > 0.0)) throw InvalidArgument("power profile needs alpha > 0");
    if (!(std::abs(aniso) < 1.0)) throw InvalidArgument("power anisotropy must lie in (-1, 1)");
    Profile p;
    p.kind = ProfileKind::Power;
    p.alpha = alpha;
    p.amplitude = amp;
    p.aniso = aniso;
    return p;
}
Profile Profile::gaussian(double mu, double beta, double amp) {
    if (!(mu > 0.0) || !(beta > 0.0)) throw InvalidArgument("gaussian profile needs mu, beta > 0");
    Profile p;
    p.kind = ProfileKind::Gaussian;
    p.mu = mu;
    p.beta = beta;
    p.amplitude = amp;
    return p;
}
Profile Profile::bump(double radius, double amp) {
    if (!(radius > 0.0)) throw InvalidArgument("bump radius must be positive");
    Profile p;
    p.kind = ProfileKind::Bump;
    p.radius = radius;
    p.amplitude = amp;
    return p;
}
Profile Profile::indicator(double radius, double amp) {
    if (!(radius > 0.0)) throw InvalidArgument("indicator radius must be positive");
    Profile p;
    p.kind = ProfileKind::Indicator;
    p.radius = radius;
    p.amplitude = amp;
    return p;
}
Profile Profile::exponential(double rate, double amp) {
    if (!(rate > 0.0)) throw InvalidArgument("exponential rate must be positive");
    Profile p;
    p.kind = ProfileKind::Exponential;
    p.rate = rate;
    p.amplitude = amp;
    return p;
}

double Profile::radial(double r) const {
    switch (kind) {
        case ProfileKind::Zero: return 0.0;
        case ProfileKind::Constant: return amplitude;
        case ProfileKind::Power: return amplitude * std::pow(1.0 + r * r, -0.5 * alpha);
        case ProfileKind::Gaussian: return amplitude * std::exp(-mu * std::pow(r, 2.0 * beta));
        case ProfileKind::Bump: {
            if (r >= radius) return 0.0;
            const double u = r / radius;
            return amplitude * std::exp(1.0 - 1.0 / (1.0 - u * u));
        }
        case ProfileKind::Indicator: return r <= radius ? amplitude : 0.0;
        case ProfileKind::Exponential: return amplitude * std::exp(-rate * r);
    }
    return 0.0;
}

double Profile::angular(double theta) const {
    return kind == ProfileKind::Power ? 1.0 + aniso * std::cos(2.0 * theta) : 1.0;
}

double Profile::operator()(double x, double y) const {
    const double r = std::hypot(x, y);
    if (is_radial()) return radial(r);
    return radial(r) * angular(std::atan2(y, x));
}

double Profile::support() const {
    switch (kind) {
        case ProfileKind::Zero: return 0.0;
        case ProfileKind::Bump:
        case ProfileKind::Indicator: return radius;
        default: return kInf;
    }
}

double Profile::sup_abs() const { return std::abs(amplitude) * (1.0 + std::abs(aniso)); }

std::vector<double> Profile::breakpoints() const {
    if (kind == ProfileKind::Bump || kind == ProfileKind::Indicator) return {radius};
    return {};
}

std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::Zero: return "zero";
        case ProfileKind::Constant: return "constant";
        case ProfileKind::Power: return "power";
        case ProfileKind::Gaussian: return "gaussian";
        case ProfileKind::Bump: return "bump";
        case ProfileKind::Indicator: return "indicator";
        case ProfileKind::Exponential: return "exponential";
    }
    return "zero";
}

ProfileKind profile_kind_from_string(const std::string& s) {
    for (auto k : {ProfileKind::Zero, ProfileKind::Constant, ProfileKind::Power,
                   ProfileKind::Gaussian, ProfileKind::Bump, ProfileKind::Indicator,
                   ProfileKind::Exponential})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown catalog profile '" + s + "'");
}

std::string Profile::name() const { return to_string(kind); }

nlohmann::json Profile::to_json() const {
    nlohmann::json j{{"kind", name()}, {"amplitude", amplitude}};
    switch (kind) {
        case ProfileKind::Power: j["alpha"] = alpha; j["aniso"] = aniso; break;
        case ProfileKind::Gaussian: j["mu"] = mu; j["beta"] = beta; break;
        case ProfileKind::Bump:
        case ProfileKind::Indicator: j["radius"] = radius; break;
        case ProfileKind::Exponential: j["rate"] = rate; break;
        default: break;
    }
    return j;
}

Profile Profile::from_json(const nlohmann::json& j) {
    Profile p;
    p.kind = profile_kind_from_string(j.at("kind").get<std::string>());
    p.amplitude = j.value("amplitude", 1.0);
    p.alpha = j.value("alpha", 2.0);
    p.aniso = j.value("aniso", 0.0);
    p.mu = j.value("mu", 1.0);
    p.beta = j.value("beta", 1.0);
    p.radius = j.value("radius", 1.0);
    p.rate = j.value("rate", 2.0);
    return p;
}

double PerturbationSpec::integral_abs_axial(double abs_tol) const {
    if (axial.kind == ProfileKind::Zero) return 0.0;
    if (axial.kind == ProfileKind::Constant) return axial.amplitude == 0.0 ? 0.0 : kInf;
    std::vector<double> pts{0.0};
    for (double b : axial.breakpoints()) pts.push_back(b);
    const double s = axial.support();
    pts.push_back(std::isfinite(s) ? s : kInf);
    auto f = [this](double x) { return std::abs(axial.radial(x)); };
    return 2.0 * quad::adaptive_pieces_sqrt(f, pts, 0.5 * abs_tol, 1e-13);
}

// ---------------------------------------------------------------- validation

SampleGrid SampleGrid::standard(double delta, int count) {
    if (!(delta > 0.0)) throw ValidationError("delta must be positive");
    SampleGrid g;
    const double x3max = 20.0 / delta, r12max = 50.0, lo = 1e-3;
    g.x3.push_back(0.0);
    g.r12.push_back(0.0);
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        const double x = lo * std::pow(x3max / lo, f);
        g.x3.push_back(x);
        g.x3.push_back(-x);
        g.r12.push_back(lo * std::pow(r12max / lo, f));
    }
    for (int j = 0; j < 16; ++j) g.theta.push_back(2.0 * kPi * j / 16);
    return g;
}

namespace {

// Returns (log of max ratio, growth of log-ratio across the outer tail).
std::pair<double, double> ratio_scan(std::vector<std::pair<double, double>> samples) {
    // samples: (abs coordinate, log ratio), -inf log ratio where the function vanishes
    std::sort(samples.begin(), samples.end());
    double best = -kInf;
    for (auto& s : samples) best = std::max(best, s.second);
    const std::size_t n = samples.size();
    const std::size_t tail = std::max<std::size_t>(3, n / 10);
    const std::size_t start = n > tail ? n - tail : 0;
    double growth = 0.0;
    const double a = samples[start].second, b = samples.back().second;
    if (std::isfinite(a) && std::isfinite(b)) growth = b - a;
    else if (!std::isfinite(a) && std::isfinite(b)) growth = kInf;
    return {best, growth};
}

}  // namespace

ValidationReport validate_hypothesis(const PerturbationSpec& spec, const SampleGrid& grid) {
    if (grid.x3.empty() || grid.r12.empty()) throw InvalidArgument("sample grid is empty");
    if (spec.n != 2 && spec.n != 4) throw ValidationError("n must be 2 or 4");
    if (spec.matrix_profile.rows() != spec.n || spec.matrix_profile.cols() != spec.n)
        throw ValidationError("matrix_profile must be n x n");
    if (!(spec.delta > 0.0)) throw ValidationError("delta must be positive");
    if (!(spec.m12 > 0.0)) throw ValidationError("m12 must be positive");
    if (!is_hermitian(spec.matrix_profile, 1e-12))
        throw ValidationError("matrix_profile is not Hermitian");

    ValidationReport rep;
    rep.hermitian = true;

    std::vector<std::pair<double, double>> ax;
    for (double x : grid.x3) {
        const double v = std::abs(spec.axial.axial(x));
        const double lr = v > 0.0 ? std::log(v) + 2.0 * spec.delta * std::sqrt(1.0 + x * x) : -kInf;
        ax.emplace_back(std::abs(x), lr);
    }
    auto [lca, ga] = ratio_scan(ax);
    rep.c_axial = std::exp(lca);
    rep.axial_tail_growth = ga;
    rep.axial_bound_ok = ga <= 1e-9;
    if (!rep.axial_bound_ok)
        rep.notes.push_back("|v(x3)| exp(2 delta <x3>) still grows at the edge of the grid");

    std::vector<std::pair<double, double>> tr;
    const std::vector<double> thetas = spec.transverse.is_radial() ? std::vector<double>{0.0} : grid.theta;
    for (double r : grid.r12) {
        double u = 0.0;
        for (double t : thetas) u = std::max(u, std::abs(spec.transverse(r * std::cos(t), r * std::sin(t))));
        const double lr = u > 0.0 ? std::log(u) + 0.5 * spec.m12 * std::log1p(r * r) : -kInf;
        tr.emplace_back(r, lr);
    }
    auto [lct, gt] = ratio_scan(tr);
    rep.c_transverse = std::exp(lct);
    rep.transverse_tail_growth = gt;
    rep.transverse_bound_ok = gt <= 1e-9;
    if (!rep.transverse_bound_ok)
        rep.notes.push_back("U(x12) <x12>^{m12} still grows at the edge of the grid");
    if (spec.transverse.kind == ProfileKind::Constant || spec.transverse.kind == ProfileKind::Zero) {
        if (spec.transverse.kind == ProfileKind::Constant && spec.transverse.amplitude != 0.0) {
            rep.transverse_bound_ok = false;
            rep.notes.push_back("constant U has no transverse decay");
        }
    }
    rep.accepted = rep.hermitian && rep.axial_bound_ok && rep.transverse_bound_ok;
    return rep;
}

nlohmann::json ValidationReport::to_json() const {
    return {{"accepted", accepted},
            {"hermitian", hermitian},
            {"axial_bound_ok", axial_bound_ok},
            {"transverse_bound_ok", transverse_bound_ok},
            {"c_axial", c_axial},
            {"c_transverse", c_transverse},
            {"axial_tail_growth", axial_tail_growth},
            {"transverse_tail_growth", transverse_tail_growth},
            {"notes", notes}};
}

EffectiveWeight effective_weight(const PerturbationSpec& spec, WeightComponent component,
                                 double abs_tol, WeightConvention conv) {
    if (component == WeightComponent::Minus && spec.n != 4)
        throw FlavorError("W- requires a 4x4 (Dirac) matrix profile");
    const int j = component == WeightComponent::Plus ? 0 : 2;
    EffectiveWeight w;
    w.transverse = spec.transverse;
    const double mjj = conv == WeightConvention::EntryAbs ? std::abs(spec.matrix_profile(j, j))
                                                          : std::abs(hermitian_abs(spec.matrix_profile)(j, j));
    w.factor = mjj == 0.0 ? 0.0 : mjj * spec.integral_abs_axial(abs_tol);
    return w;
}

// ---------------------------------------------------------------- radii

double DomainRadii::pauli_bound(double delta, double zeta) {
    return std::min(delta, std::sqrt(zeta));
}

double DomainRadii::dirac_bound(double delta, double zeta, double m) {
    if (!(m > 0.0)) throw InvalidArgument("Dirac mass must be positive");
    const double mu_max = std::sqrt(m * m + zeta) + m;
    return std::min(delta / (4.0 * m), std::sqrt(1.0 - 2.0 * m / mu_max));
}

DomainRadii DomainRadii::admissible(const PerturbationSpec& spec, const MagneticModel& model,
                                    double m, double fraction) {
    DomainRadii d;
    d.m = m;
    d.epsilon = fraction * pauli_bound(spec.delta, model.zeta);
    if (m > 0.0) d.eta = fraction * dirac_bound(spec.delta, model.zeta, m);
    return d;
}

void DomainRadii::check(const PerturbationSpec& spec, const MagneticModel& model) const {
    if (!(epsilon > 0.0) || !(epsilon < pauli_bound(spec.delta, model.zeta)))
        throw ValidationError("epsilon must satisfy 0 < epsilon < min(delta, sqrt(zeta))");
    if (m > 0.0 && (!(eta > 0.0) || !(eta < dirac_bound(spec.delta, model.zeta, m))))
        throw ValidationError("eta must satisfy 0 < eta < min(delta/4m, sqrt(1-2m/mu))");
}

// ---------------------------------------------------------------- helpers

bool is_hermitian(const MatC& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

namespace {

template <class F>
MatC spectral_apply(const MatC& m, F f) {
    Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (m + m.adjoint()));
    const VecR& ev = es.eigenvalues();
    const double cut = 1e-14 * std::max(1e-300, ev.cwiseAbs().maxCoeff());
    VecC d(ev.size());
    for (int i = 0; i < ev.size(); ++i) d(i) = std::abs(ev(i)) <= cut ? 0.0 : f(ev(i));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

MatC hermitian_abs(const MatC& m) { return spectral_apply(m, [](double x) { return std::abs(x); }); }
MatC hermitian_sqrt_abs(const MatC& m) {
    return spectral_apply(m, [](double x) { return std::sqrt(std::abs(x)); });
}
MatC hermitian_sign(const MatC& m) {
    return spectral_apply(m, [](double x) { return x > 0.0 ? 1.0 : -1.0; });
}

}  // namespace bsres
