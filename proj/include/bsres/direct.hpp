#pragma once

#include "bsres/birman_schwinger.hpp"

namespace bsres {

// Pauli operator discretized directly on the assembly's channels and axial
// nodes: Landau shift + P1 Dirichlet Laplacian (lumped mass) on [-X, X],
// perturbation (G x M) x diag(v). Everything lives in the symmetrized
// coordinates W^{1/2} u, so multiplication by v stays diagonal.
class DirectPauli {
public:
    explicit DirectPauli(const BSAssembly& a);

    int dim() const { return static_cast<int>(H0_.rows()); }
    const MatC& H0() const { return H0_; }
    const MatC& V() const { return V_; }  // unit coupling
    const std::vector<double>& mass() const { return mass_; }
    MatC R0(cplx z) const;
    MatC R(cplx z, double e) const;

private:
    MatC H0_;
    MatC V_;
    std::vector<double> mass_;
};

struct IdentityReport {
    cplx z;
    double e = 0.0;
    int dim = 0;
    double residual = 0.0;         // ||(I + e J S R0 S)(I - e J S R S) - I||_max
    double factor_residual = 0.0;  // ||S J S - V||_max
    double nystrom_gap = 0.0;      // Frobenius, ||T0_direct - T0_kernel|| / ||T0_kernel||
    nlohmann::json to_json() const;
};

// z must have Im z > 0; k = sqrt(z) on the upper branch for the kernel route.
IdentityReport bs_identity_check(const BSAssembly& a, cplx z, double e);

}  // namespace bsres
