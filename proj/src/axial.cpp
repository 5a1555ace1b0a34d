#include "bsres/axial.hpp"

#include <algorithm>
#include <cmath>

#include "bsres/errors.hpp"
#include "bsres/quadrature.hpp"

namespace bsres {

AxialGrid AxialGrid::build(double delta, int nodes, const Profile& axial, int order) {
    if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
    if (nodes < 2 * order) nodes = 2 * order;
    const int panels = (nodes + 2 * order - 1) / (2 * order);  // per side
    AxialGrid g;
    g.delta = delta;
    g.extent = 13.9 / delta;
    const double sup = axial.support();
    if (std::isfinite(sup) && sup > 0.0) g.extent = std::min(g.extent, sup);

    // cubic clustering toward 0 (where |x|^a kinks sit); compact profiles also
    // cluster toward the support edge. Then merge in the profile kinks.
    const bool compact = std::isfinite(sup) && sup <= g.extent;
    std::vector<double> edges;
    for (int j = 0; j <= panels; ++j) {
        const double u = static_cast<double>(j) / panels;
        const double m = compact ? u * u * u * (10.0 - 15.0 * u + 6.0 * u * u) : u * u * u;
        edges.push_back(g.extent * m);
    }
    for (double b : axial.breakpoints())
        if (b > 0.0 && b < g.extent) {
            auto it = std::min_element(edges.begin() + 1, edges.end() - 1, [b](double a, double c) {
                return std::abs(a - b) < std::abs(c - b);
            });
            if (it != edges.end() - 1) *it = b;
        }
    std::sort(edges.begin(), edges.end());

    const quad::Rule ref = quad::gauss_legendre(order);
    std::vector<double> xs, ws;
    for (int j = 0; j < panels; ++j) {
        const double a = edges[j], b = edges[j + 1];
        for (int i = 0; i < order; ++i) {
            xs.push_back(0.5 * (a + b) + 0.5 * (b - a) * ref.x[i]);
            ws.push_back(0.5 * (b - a) * ref.w[i]);
        }
    }
    for (std::size_t i = xs.size(); i-- > 0;) {
        g.x.push_back(-xs[i]);
        g.w.push_back(ws[i]);
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        g.x.push_back(xs[i]);
        g.w.push_back(ws[i]);
    }
    return g;
}

cplx expm1(cplx z) {
    const double x = z.real(), y = z.imag();
    const double em = std::expm1(x);
    const double s = std::sin(0.5 * y);
    return {em * std::cos(y) - 2.0 * s * s, (em + 1.0) * std::sin(y)};
}

cplx resolvent_kernel(cplx k, double x, double xp) {
    if (k == 0.0) throw ThresholdSingularity("resolvent kernel is singular at k = 0");
    const cplx I(0.0, 1.0);
    return I * std::exp(I * k * std::abs(x - xp)) / (2.0 * k);
}

cplx remainder_kernel(cplx k, double d) {
    d = std::abs(d);
    const cplx I(0.0, 1.0);
    const cplx kd = k * d;
    if (std::abs(kd) < 1e-4) {
        // i (ikd + (ikd)^2/2 + (ikd)^3/6 + (ikd)^4/24) / (2k)
        const cplx u = I * kd;
        return I * d * I * (1.0 + u / 2.0 + u * u / 6.0 + u * u * u / 24.0) / 2.0;
    }
    return I * expm1(I * kd) / (2.0 * k);
}

AxialKernelSet build_kernels(const AxialGrid& grid, cplx k) {
    if (!(k.imag() > -grid.delta))
        throw OutsideContinuationStrip("build_kernels needs Im k > -delta");
    if (k == 0.0) throw ThresholdSingularity("N(k) has a pole at k = 0");
    const int n = grid.size();
    const cplx I(0.0, 1.0);
    AxialKernelSet s;
    s.k = k;
    s.t1.resize(n);
    for (int i = 0; i < n; ++i)
        s.t1(i) = std::sqrt(grid.w[i]) * std::exp(-grid.delta * std::sqrt(1.0 + grid.x[i] * grid.x[i]));
    s.N.resize(n, n);
    s.r1.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = grid.x[i] - grid.x[j];
            const cplx tt = s.t1(i) * s.t1(j);
            s.r1(i, j) = tt * remainder_kernel(k, d);
            s.N(i, j) = tt * resolvent_kernel(k, grid.x[i], grid.x[j]);
        }
    return s;
}

}  // namespace bsres
