#pragma once

#include <functional>
#include <vector>

namespace bsres::quad {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre on [a, b] (Golub-Welsch).
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Gauss-Laguerre for weight e^{-t} on [0, inf).
Rule gauss_laguerre(int n);

// Adaptive Gauss-Kronrod over [a, b] (b may be +inf). Throws
// IntegrationFailure when the error estimate exceeds max(abs_tol, rel_tol*|I|).
double adaptive(const std::function<double(double)>& f, double a, double b,
                double abs_tol, double rel_tol = 0.0);

// Same, split at the given breakpoints; the error test applies to the sum.
double adaptive_pieces(const std::function<double(double)>& f, std::vector<double> pts,
                       double abs_tol, double rel_tol = 0.0);

// adaptive_pieces on [0, ...) in u = sqrt(x): smooths x^a kinks at the origin.
// Breakpoints are given in x and must be >= 0.
double adaptive_pieces_sqrt(const std::function<double(double)>& f, std::vector<double> pts,
                            double abs_tol, double rel_tol = 0.0);

}  // namespace bsres::quad
