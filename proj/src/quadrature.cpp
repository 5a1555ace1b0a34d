#include "bsres/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bsres/errors.hpp"

namespace bsres::quad {

namespace {

Rule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double mu0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    const int n = static_cast<int>(diag.size());
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v0 * v0;
    }
    return r;
}

}  // namespace

Rule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw InvalidArgument("gauss_legendre needs n >= 1");
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd e(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) e(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    Rule r = golub_welsch(d, e, 2.0);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        r.x[i] = mid + half * r.x[i];
        r.w[i] *= half;
    }
    return r;
}

Rule gauss_laguerre(int n) {
    if (n < 1) throw InvalidArgument("gauss_laguerre needs n >= 1");
    Eigen::VectorXd d(n);
    Eigen::VectorXd e(std::max(n - 1, 0));
    for (int k = 0; k < n; ++k) d(k) = 2.0 * k + 1.0;
    for (int k = 1; k < n; ++k) e(k - 1) = k;
    Rule r = golub_welsch(d, e, 1.0);
    // Tail weights from Golub-Welsch are only absolutely accurate; polish the
    // nodes by Newton and use w = t / ((n+1)^2 L_{n+1}(t)^2) in log form.
    for (int i = 0; i < n; ++i) {
        double t = r.x[i];
        double lnp1 = 0.0;
        for (int it = 0; it < 8; ++it) {
            double p0 = 1.0, p1 = 1.0 - t;
            for (int k = 1; k < n; ++k) {
                const double p2 = ((2.0 * k + 1.0 - t) * p1 - k * p0) / (k + 1.0);
                p0 = p1;
                p1 = p2;
            }
            // p1 = L_n, p0 = L_{n-1}; t L_n' = n (L_n - L_{n-1})
            const double dp = n * (p1 - p0) / t;
            const double step = p1 / dp;
            t -= step;
            if (std::abs(step) <= 1e-15 * t) break;
        }
        double p0 = 1.0, p1 = 1.0 - t;
        for (int k = 1; k <= n; ++k) {
            const double p2 = ((2.0 * k + 1.0 - t) * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        lnp1 = std::log(std::abs(p1));
        r.x[i] = t;
        r.w[i] = std::exp(std::log(t) - 2.0 * std::log(n + 1.0) - 2.0 * lnp1);
    }
    return r;
}

namespace {

// Boost halves the absolute target per level, so the depth is what bounds the
// cost when roundoff caps the achievable error: at most 2^10 panels.
double gk(const std::function<double(double)>& f, double a, double b, double tol, double* err) {
    double l1 = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, tol, err, &l1);
}

}  // namespace

double adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                double rel_tol) {
    if (a == b) return 0.0;
    double err = 0.0;
    const double value = gk(f, a, b, 0.1 * rel_tol, &err);
    if (!std::isfinite(value) || err > std::max(abs_tol, rel_tol * std::abs(value))) {
        throw IntegrationFailure("adaptive quadrature on [" + std::to_string(a) + ", " +
                                 std::to_string(b) + "] stalled at error " + std::to_string(err));
    }
    return value;
}

double adaptive_pieces(const std::function<double(double)>& f, std::vector<double> pts,
                       double abs_tol, double rel_tol) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double e = 0.0;
        total += gk(f, pts[i], pts[i + 1], 0.1 * rel_tol, &e);
        err += e;
    }
    if (!std::isfinite(total) || err > std::max(abs_tol, rel_tol * std::abs(total))) {
        throw IntegrationFailure("piecewise quadrature stalled at error " + std::to_string(err) +
                                 " for value " + std::to_string(total));
    }
    return total;
}

double adaptive_pieces_sqrt(const std::function<double(double)>& f, std::vector<double> pts,
                            double abs_tol, double rel_tol) {
    for (double& x : pts) {
        if (x < 0.0) throw InvalidArgument("adaptive_pieces_sqrt needs breakpoints >= 0");
        x = std::sqrt(x);
    }
    auto g = [&f](double u) { return 2.0 * u * f(u * u); };
    return adaptive_pieces(g, pts, abs_tol, rel_tol);
}

}  // namespace bsres::quad
