#pragma once

#include "bsres/model.hpp"

namespace bsres {

struct AxialGrid {
    std::vector<double> x;  // sorted nodes
    std::vector<double> w;  // positive weights
    double delta = 1.0;
    double extent = 0.0;    // X

    int size() const { return static_cast<int>(x.size()); }

    // Composite Gauss-Legendre panels on [-X, X], clustered at 0, with extra
    // panel edges at the profile's kinks. X = 13.9/delta (so e^{-2 delta X} < 1e-12),
    // cut to the support for compact profiles. `nodes` is rounded up to a
    // multiple of 2 * order.
    static AxialGrid build(double delta, int nodes, const Profile& axial = Profile::zero(),
                           int order = 8);
};

// e^{iz} - 1 without cancellation
cplx expm1(cplx z);

// i e^{ik|x-x'|}/(2k)
cplx resolvent_kernel(cplx k, double x, double xp);

// i (e^{ikd} - 1)/(2k), analytic at k = 0 (limit -d/2)
cplx remainder_kernel(cplx k, double d);

struct AxialKernelSet {
    MatC N;    // full weighted kernel
    VecC t1;   // weighted vector: N = (i/(2k)) t1 t1^T + r1
    MatC r1;
    cplx k;
};

AxialKernelSet build_kernels(const AxialGrid& grid, cplx k);

}  // namespace bsres
