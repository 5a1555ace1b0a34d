#include "bsres/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "bsres/errors.hpp"
#include "bsres/quadrature.hpp"

namespace bsres {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

VecR sorted_eigenvalues(const MatC& m) {
    Eigen::SelfAdjointEigenSolver<MatC> es(m, Eigen::EigenvaluesOnly);
    VecR ev = es.eigenvalues().reverse();
    return ev;
}

// Breakpoints in t for a radial profile, plus a window around the peak of the
// Laguerre weight centred at `centre`.
std::vector<double> t_pieces(const Profile& U, double b0, double centre) {
    const double sup = U.support();
    const double t_sup = std::isfinite(sup) ? 0.5 * b0 * sup * sup : kInf;
    std::vector<double> pts{0.0};
    for (double r : U.breakpoints()) pts.push_back(0.5 * b0 * r * r);
    const double w = 8.0 * std::sqrt(centre + 1.0) + 4.0;
    for (double t : {centre - w, centre, centre + w, centre + 3.0 * w})
        if (t > 0.0) pts.push_back(t);
    std::vector<double> out;
    for (double t : pts)
        if (t <= t_sup) out.push_back(t);
    out.push_back(t_sup);
    return out;
}

}  // namespace

double radial_toeplitz_entry(const Profile& U, double b0, int l) {
    if (U.kind == ProfileKind::Zero) return 0.0;
    if (U.kind == ProfileKind::Constant) return U.amplitude;
    const double lg = std::lgamma(l + 1.0);
    auto f = [&](double t) {
        if (t <= 0.0) return l == 0 ? U.radial(0.0) : 0.0;
        const double w = std::exp(l * std::log(t) - t - lg);
        return w == 0.0 ? 0.0 : U.radial(std::sqrt(2.0 * t / b0)) * w;
    };
    return quad::adaptive_pieces_sqrt(f, t_pieces(U, b0, l), kTiny, 1e-11);
}

double radial_cross_entry(const Profile& U, double b0, int q, int l, int qp, int lp) {
    if (l - q != lp - qp) return 0.0;
    if (U.kind == ProfileKind::Zero) return 0.0;
    if (U.kind == ProfileKind::Constant) return (q == qp && l == lp) ? U.amplitude : 0.0;
    auto f = [&](double t) {
        const double a = LandauBasis::radial(q, l, t);
        if (a == 0.0) return 0.0;
        return U.radial(std::sqrt(2.0 * t / b0)) * a * LandauBasis::radial(qp, lp, t);
    };
    const double centre = std::max({l, lp, q, qp}) + 0.5 * (q + qp);
    // cross entries can vanish exactly, so an absolute floor is needed
    return quad::adaptive_pieces_sqrt(f, t_pieces(U, b0, centre), 1e-15, 1e-11);
}

ToeplitzMatrix assemble(const Profile& U, const LandauBasis& basis, double scale) {
    const int L = basis.angular_count();
    ToeplitzMatrix out;
    if (U.is_radial()) {
        out.radial = true;
        out.matrix = MatC::Zero(L, L);
        for (int l = 0; l < L; ++l)
            out.matrix(l, l) = scale * radial_toeplitz_entry(U, basis.b0(), l);
        out.eigenvalues = out.matrix.diagonal().real();
        std::sort(out.eigenvalues.data(), out.eigenvalues.data() + L, std::greater<>());
        return out;
    }
    out = assemble_general([&U, scale](double x, double y) { return scale * U(x, y); }, basis);
    return out;
}

ToeplitzMatrix assemble(const EffectiveWeight& W, const LandauBasis& basis) {
    return assemble(W.transverse, basis, W.factor);
}

ToeplitzMatrix assemble_general(const std::function<double(double, double)>& U,
                                const LandauBasis& basis, int n_t, int n_theta) {
    const int L = basis.angular_count();
    if (n_t <= 0) n_t = 2 * L + 60;
    if (n_theta < 2 * L) n_theta = 2 * L;
    const quad::Rule gl = quad::gauss_laguerre(n_t);
    const double b0 = basis.b0();

    // Fourier coefficients c_i(D) = (1/n_theta) sum_j U(t_i, theta_j) e^{i D theta_j}
    const int nd = 2 * L - 1;
    MatC coeff = MatC::Zero(n_t, nd);
    std::vector<double> vals(n_theta);
    for (int i = 0; i < n_t; ++i) {
        const double r = std::sqrt(2.0 * gl.x[i] / b0);
        for (int j = 0; j < n_theta; ++j) {
            const double th = 2.0 * kPi * j / n_theta;
            vals[j] = U(r * std::cos(th), r * std::sin(th));
        }
        for (int d = 0; d < nd; ++d) {
            const int D = d - (L - 1);
            cplx s = 0.0;
            for (int j = 0; j < n_theta; ++j)
                s += vals[j] * std::polar(1.0, D * 2.0 * kPi * j / n_theta);
            coeff(i, d) = s / static_cast<double>(n_theta);
        }
    }
    // p_i(l) = sqrt(w_i t_i^l / l!)
    MatR p(n_t, L);
    for (int i = 0; i < n_t; ++i)
        for (int l = 0; l < L; ++l)
            p(i, l) = gl.w[i] > 0.0 ? std::exp(0.5 * (std::log(gl.w[i]) + l * std::log(gl.x[i]) -
                                                      std::lgamma(l + 1.0)))
                                    : 0.0;

    ToeplitzMatrix out;
    out.radial = false;
    out.matrix = MatC::Zero(L, L);
    for (int l = 0; l < L; ++l)
        for (int lp = l; lp < L; ++lp) {
            cplx s = 0.0;
            const int d = (lp - l) + (L - 1);
            for (int i = 0; i < n_t; ++i) s += p(i, l) * p(i, lp) * coeff(i, d);
            out.matrix(l, lp) = s;
            out.matrix(lp, l) = std::conj(s);
        }
    out.eigenvalues = sorted_eigenvalues(out.matrix);
    return out;
}

int counting(const VecR& eigenvalues, double s) {
    int n = 0;
    for (int i = 0; i < eigenvalues.size(); ++i)
        if (eigenvalues(i) > s) ++n;
    return n;
}

double comparator_power(double s, double alpha, double u0_integral, double b0) {
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    if (!(s > 0.0)) throw InvalidArgument("s must be positive");
    const double c = b0 / (4.0 * kPi) * u0_integral;
    return c * std::pow(s, -2.0 / alpha);
}

double comparator_quasi_exponential(double s, double beta, double mu, double b0) {
    if (!(s > 0.0) || !(s < std::exp(-1.0)))
        throw OutOfAsymptoticRange("quasi-exponential comparator needs 0 < s < 1/e");
    if (!(beta > 0.0) || !(mu > 0.0)) throw InvalidArgument("beta and mu must be positive");
    const double ls = std::abs(std::log(s));
    if (std::abs(beta - 1.0) < 1e-12) return ls / std::log(1.0 + 2.0 * mu / b0);
    if (beta < 1.0) return 0.5 * b0 * std::pow(mu, -1.0 / beta) * std::pow(ls, 1.0 / beta);
    return beta / (beta - 1.0) * ls / std::log(ls);
}

double comparator_compact(double s) {
    if (!(s > 0.0) || !(s < std::exp(-1.0)))
        throw OutOfAsymptoticRange("compact comparator needs 0 < s < 1/e");
    const double ls = std::abs(std::log(s));
    return ls / std::log(ls);
}

double power_u0_integral(const Profile& U) {
    if (U.kind != ProfileKind::Power) throw InvalidArgument("u0 integral needs a power profile");
    const double e = 2.0 / U.alpha;
    if (U.aniso == 0.0) return 2.0 * kPi * std::pow(U.amplitude, e);
    auto f = [&](double th) { return std::pow(U.amplitude * U.angular(th), e); };
    return quad::adaptive(f, 0.0, 2.0 * kPi, 1e-13, 1e-12);
}

double lq_norm_q(const Profile& U, int q) {
    if (U.kind == ProfileKind::Zero) return 0.0;
    if (U.kind == ProfileKind::Constant) return U.amplitude == 0.0 ? 0.0 : kInf;
    std::vector<double> pts{0.0};
    for (double b : U.breakpoints()) pts.push_back(b);
    const double sup = U.support();
    if (!std::isfinite(sup)) {
        pts.push_back(1.0);
        pts.push_back(10.0);
    }
    pts.push_back(std::isfinite(sup) ? sup : kInf);
    auto fr = [&](double r) { return std::pow(std::abs(U.radial(r)), q) * r; };
    const double radial = quad::adaptive_pieces(fr, pts, 1e-14, 1e-11);
    double angular = 2.0 * kPi;
    if (!U.is_radial()) {
        auto fa = [&](double th) { return std::pow(std::abs(U.angular(th)), q); };
        angular = quad::adaptive(fa, 0.0, 2.0 * kPi, 1e-13, 1e-12);
    }
    return radial * angular;
}

SchattenReport schatten_check(const VecR& eigenvalues, const Profile& U, int q,
                              const MagneticModel& model) {
    if (q < 2 || q % 2) throw InvalidArgument("Schatten check needs an even q >= 2");
    SchattenReport rep;
    rep.q = q;
    for (int i = 0; i < eigenvalues.size(); ++i) rep.lhs += std::pow(eigenvalues(i), q);
    rep.rhs = model.b0 / (2.0 * kPi) * std::exp(2.0 * model.osc_phi_tilde) * lq_norm_q(U, q);
    rep.slack = rep.rhs - rep.lhs;
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

nlohmann::json SchattenReport::to_json() const {
    return {{"q", q}, {"lhs", lhs}, {"rhs", rhs}, {"slack", slack}, {"holds", holds}};
}

std::string to_string(CountingLaw law) {
    switch (law) {
        case CountingLaw::Power: return "power";
        case CountingLaw::QuasiExp: return "quasi_exp";
        case CountingLaw::Compact: return "compact";
    }
    return "power";
}

double comparator(const LawParams& p, double s) {
    const double u = s / p.scale;
    switch (p.law) {
        case CountingLaw::Power: return comparator_power(u, p.alpha, p.u0_integral, p.b0);
        case CountingLaw::QuasiExp: return comparator_quasi_exponential(u, p.beta, p.mu, p.b0);
        case CountingLaw::Compact: return comparator_compact(u);
    }
    return 0.0;
}

CountingCurve counting_curve(const VecR& eigenvalues, int l_max, const LawParams& p, double s_min,
                             double s_max, int samples) {
    if (!(s_min > 0.0) || !(s_max > s_min) || samples < 2)
        throw InvalidArgument("counting curve needs 0 < s_min < s_max and >= 2 samples");
    CountingCurve c;
    for (int i = 0; i < samples; ++i) {
        const double s = s_max * std::pow(s_min / s_max, static_cast<double>(i) / (samples - 1));
        const int n = counting(eigenvalues, s);
        if (2 * n > l_max)
            throw TruncationError("n_plus(" + num(s) + ") = " + std::to_string(n) +
                                  " exceeds L_max/2; raise L_max or the smallest s");
        double comp = std::numeric_limits<double>::quiet_NaN();
        try {
            comp = comparator(p, s);
        } catch (const OutOfAsymptoticRange&) {
        }
        c.s.push_back(s);
        c.n_plus.push_back(n);
        c.comparator.push_back(comp);
        c.ratio.push_back(std::isfinite(comp) && comp > 0.0 ? n / comp
                                                            : std::numeric_limits<double>::quiet_NaN());
    }
    return c;
}

nlohmann::json FitReport::to_json() const {
    return {{"law", to_string(law)},
            {"coordinates", coordinates},
            {"s_lo", s_lo},
            {"s_hi", s_hi},
            {"samples_used", used},
            {"slope", slope},
            {"slope_expected", slope_expected},
            {"slope_rel_dev", slope_rel_dev},
            {"prefactor", prefactor},
            {"prefactor_expected", prefactor_expected},
            {"prefactor_rel_dev", prefactor_rel_dev},
            {"ratio_deepest", ratio_deepest},
            {"degenerate", degenerate}};
}

FitReport fit_counting_law(const CountingCurve& curve, const LawParams& p,
                           std::optional<std::pair<double, double>> range) {
    const std::size_t n = curve.s.size();
    if (n < 8) throw FitRangeError("need at least 8 samples");
    const auto [mn, mx] = std::minmax_element(curve.s.begin(), curve.s.end());
    if (*mx / *mn < 100.0 * (1.0 - 1e-12)) throw FitRangeError("samples must span two decades");

    FitReport rep;
    rep.law = p.law;
    rep.s_lo = range ? range->first : *mn;
    rep.s_hi = range ? range->second : 10.0 * *mn;

    const bool beta_one = std::abs(p.beta - 1.0) < 1e-12;
    std::vector<double> xs, ys;
    double deepest = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = curve.s[i];
        if (s < rep.s_lo * (1 - 1e-12) || s > rep.s_hi * (1 + 1e-12)) continue;
        const double np = curve.n_plus[i];
        const double u = s / p.scale;
        double x = 0.0, y = 0.0;
        switch (p.law) {
            case CountingLaw::Power:
                if (np <= 0) continue;
                x = std::log(s);
                y = std::log(np);
                break;
            case CountingLaw::QuasiExp:
                if (beta_one) {
                    x = std::abs(std::log(u));
                    y = np;
                } else if (p.beta < 1.0) {
                    if (np <= 0 || u >= 1.0) continue;
                    x = std::log(std::abs(std::log(u)));
                    y = std::log(np);
                } else {
                    if (!std::isfinite(curve.comparator[i])) continue;
                    x = curve.comparator[i];
                    y = np;
                }
                break;
            case CountingLaw::Compact:
                if (!std::isfinite(curve.comparator[i])) continue;
                x = curve.comparator[i];
                y = np;
                break;
        }
        xs.push_back(x);
        ys.push_back(y);
        if (s < deepest) {
            deepest = s;
            rep.ratio_deepest = curve.ratio[i];
        }
    }
    rep.used = static_cast<int>(xs.size());
    if (rep.used < 3) throw FitRangeError("fewer than 3 usable samples in the fit window");

    const bool through_origin =
        p.law == CountingLaw::Compact || (p.law == CountingLaw::QuasiExp && p.beta > 1.0 && !beta_one);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < rep.used; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double m = rep.used;
    double intercept = 0.0;
    if (through_origin) {
        rep.slope = sxy / sxx;
    } else {
        const double den = m * sxx - sx * sx;
        if (den <= 0.0) throw FitRangeError("fit window has no spread in the abscissa");
        rep.slope = (m * sxy - sx * sy) / den;
        intercept = (sy - rep.slope * sx) / m;
    }
    rep.degenerate = std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys.front(); });

    switch (p.law) {
        case CountingLaw::Power: {
            rep.coordinates = "log n_plus vs log s";
            rep.slope_expected = -2.0 / p.alpha;
            double lsum = 0.0;
            int cnt = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double s = curve.s[i];
                if (s < rep.s_lo * (1 - 1e-12) || s > rep.s_hi * (1 + 1e-12) || curve.n_plus[i] <= 0)
                    continue;
                lsum += std::log(curve.n_plus[i] * std::pow(s, 2.0 / p.alpha));
                ++cnt;
            }
            rep.prefactor = std::exp(lsum / cnt);
            rep.prefactor_expected =
                p.b0 / (4.0 * kPi) * p.u0_integral * std::pow(p.scale, 2.0 / p.alpha);
            break;
        }
        case CountingLaw::QuasiExp:
            if (beta_one) {
                rep.coordinates = "n_plus vs |ln s|";
                rep.slope_expected = 1.0 / std::log(1.0 + 2.0 * p.mu / p.b0);
            } else if (p.beta < 1.0) {
                rep.coordinates = "log n_plus vs log|ln s|";
                rep.slope_expected = 1.0 / p.beta;
                rep.prefactor = std::exp(intercept);
                rep.prefactor_expected = 0.5 * p.b0 * std::pow(p.mu, -1.0 / p.beta);
            } else {
                rep.coordinates = "n_plus vs phi_beta(s)";
                rep.slope_expected = 1.0;
            }
            break;
        case CountingLaw::Compact:
            rep.coordinates = "n_plus vs phi_inf(s)";
            rep.slope_expected = 1.0;
            break;
    }
    rep.slope_rel_dev = std::abs(rep.slope - rep.slope_expected) / std::abs(rep.slope_expected);
    if (rep.prefactor_expected != 0.0)
        rep.prefactor_rel_dev =
            std::abs(rep.prefactor - rep.prefactor_expected) / std::abs(rep.prefactor_expected);
    return rep;
}

}  // namespace bsres
