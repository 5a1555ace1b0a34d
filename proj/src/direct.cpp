#include "bsres/direct.hpp"

#include <cmath>

#include <Eigen/LU>

#include "bsres/errors.hpp"

namespace bsres {

DirectPauli::DirectPauli(const BSAssembly& a) {
    if (a.flavor() != Flavor::Pauli) throw FlavorError("direct discretization is Pauli only");
    const AxialGrid& g = a.grid();
    const int N = g.size();
    const auto& ch = a.channels();
    const int C = static_cast<int>(ch.size());

    // P1 elements on [-X, x_0, ..., x_{N-1}, X] with u(+-X) = 0
    std::vector<double> xs;
    xs.push_back(-g.extent);
    xs.insert(xs.end(), g.x.begin(), g.x.end());
    xs.push_back(g.extent);
    mass_.assign(N, 0.0);
    std::vector<double>& mass = mass_;
    MatR lap = MatR::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        const double hl = xs[i + 1] - xs[i], hr = xs[i + 2] - xs[i + 1];
        mass[i] = 0.5 * (hl + hr);
        lap(i, i) = 1.0 / hl + 1.0 / hr;
        if (i + 1 < N) lap(i, i + 1) = lap(i + 1, i) = -1.0 / hr;
    }
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) lap(i, j) /= std::sqrt(mass[i] * mass[j]);

    H0_ = MatC::Zero(C * N, C * N);
    for (int c = 0; c < C; ++c) {
        H0_.block(c * N, c * N, N, N) = lap.cast<cplx>();
        for (int i = 0; i < N; ++i) H0_(c * N + i, c * N + i) += ch[c].shift;
    }

    // built from G, M and v directly, across blocks too
    const MatC& G = a.galerkin();
    const MatC& M = a.matrix_profile();
    const std::vector<double>& v = a.axial_values();
    V_ = MatC::Zero(C * N, C * N);
    for (int c = 0; c < C; ++c)
        for (int cp = 0; cp < C; ++cp) {
            const cplx gm = G(ch[c].t, ch[cp].t) * M(ch[c].sigma, ch[cp].sigma);
            if (gm == 0.0) continue;
            for (int i = 0; i < N; ++i) V_(c * N + i, cp * N + i) = gm * v[i];
        }
}

MatC DirectPauli::R0(cplx z) const {
    MatC m = H0_ - z * MatC::Identity(dim(), dim());
    return m.partialPivLu().inverse();
}

MatC DirectPauli::R(cplx z, double e) const {
    MatC m = H0_ + e * V_ - z * MatC::Identity(dim(), dim());
    return m.partialPivLu().inverse();
}

IdentityReport bs_identity_check(const BSAssembly& a, cplx z, double e) {
    if (!(z.imag() > 0.0)) throw InvalidArgument("identity check needs Im z > 0");
    IdentityReport rep;
    rep.z = z;
    rep.e = e;
    DirectPauli d(a);
    rep.dim = d.dim();
    const MatC S = a.S(), J = a.J();
    const MatC I = MatC::Identity(d.dim(), d.dim());
    const MatC T0 = e * J * S * d.R0(z) * S;
    const MatC T = e * J * S * d.R(z, e) * S;
    rep.residual = ((I + T0) * (I - T) - I).cwiseAbs().maxCoeff();
    rep.factor_residual = (S * J * S - d.V()).cwiseAbs().maxCoeff();

    // kernel route: same sandwich with quadrature weights in place of the lumped mass
    const cplx k = inverse_spectral_map(Flavor::Pauli, 0.0, z);
    const MatC Tk = a.T(k, false) * (e / a.coupling());
    const int N = a.grid().size();
    VecC rw(d.dim());
    for (int i = 0; i < d.dim(); ++i) rw(i) = std::sqrt(a.grid().w[i % N] / d.mass()[i % N]);
    const MatC T0w = rw.asDiagonal() * T0 * rw.asDiagonal();
    const double nk = Tk.norm();
    const double nd = (T0w - Tk).norm();
    rep.nystrom_gap = nk > 0.0 ? nd / nk : nd;
    return rep;
}

nlohmann::json IdentityReport::to_json() const {
    return {{"z", {z.real(), z.imag()}},
            {"e", e},
            {"dim", dim},
            {"residual", residual},
            {"factor_residual", factor_residual},
            {"nystrom_gap", nystrom_gap}};
}

}  // namespace bsres
