#include "bsres/birman_schwinger.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "bsres/errors.hpp"
#include "bsres/quadrature.hpp"
#include "bsres/toeplitz.hpp"

namespace bsres {

namespace {

const cplx I1(0.0, 1.0);

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int a) { return p[a] == a ? a : p[a] = find(p[a]); }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

// connected components of the nonzero pattern of M
std::vector<int> matrix_components(const MatC& M) {
    UnionFind uf(static_cast<int>(M.rows()));
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j)
            if (std::abs(M(i, j)) > 0.0) uf.unite(i, j);
    std::vector<int> c(M.rows());
    for (int i = 0; i < M.rows(); ++i) c[i] = uf.find(i);
    return c;
}

cplx even_kernel(cplx kappa, double d) { return I1 * std::exp(I1 * kappa * std::abs(d)) / (2.0 * kappa); }

cplx odd_kernel(cplx kappa, double d) {
    if (d == 0.0) return 0.0;
    return 0.5 * I1 * (d > 0.0 ? 1.0 : -1.0) * std::exp(I1 * kappa * std::abs(d));
}

}  // namespace

std::string to_string(Flavor f) {
    switch (f) {
        case Flavor::Pauli: return "pauli";
        case Flavor::DiracPlus: return "dirac_plus";
        case Flavor::DiracMinus: return "dirac_minus";
    }
    return "pauli";
}

Flavor flavor_from_string(const std::string& s) {
    if (s == "pauli") return Flavor::Pauli;
    if (s == "dirac_plus") return Flavor::DiracPlus;
    if (s == "dirac_minus") return Flavor::DiracMinus;
    throw ConfigError("unknown flavor '" + s + "'");
}

cplx spectral_map(Flavor f, double m, cplx k) {
    if (f == Flavor::Pauli) return k * k;
    if (std::abs(k) >= 1.0) throw OutsideDisk("Dirac map needs |k| < 1");
    const cplx k2 = k * k;
    const double sgn = f == Flavor::DiracPlus ? 1.0 : -1.0;
    return sgn * m * (1.0 + k2) / (1.0 - k2);
}

cplx inverse_spectral_map(Flavor f, double m, cplx z) {
    cplx k2 = z;
    if (f != Flavor::Pauli) {
        const double sgn = f == Flavor::DiracPlus ? 1.0 : -1.0;
        const cplx den = z + sgn * m;
        if (std::abs(den) == 0.0) throw MapPole("z is the pole of the Dirac map");
        k2 = (z - sgn * m) / den;
    }
    cplx k = std::sqrt(k2);  // principal: Re >= 0
    if (k.imag() < 0.0 || (k.imag() == 0.0 && k.real() < 0.0)) k = -k;
    return k;
}

MatC galerkin_matrix(const Profile& U, const LandauBasis& basis) {
    const int Q = basis.level_count(), L = basis.angular_count(), n = basis.size();
    MatC G = MatC::Zero(n, n);
    if (U.is_radial()) {
        for (int q = 0; q < Q; ++q)
            for (int l = 0; l < L; ++l)
                for (int qp = q; qp < Q; ++qp) {
                    const int lp = l - q + qp;
                    if (lp < 0 || lp >= L) continue;
                    const double v = radial_cross_entry(U, basis.b0(), q, l, qp, lp);
                    const cplx e = std::conj(LandauBasis::phase(q, l)) * LandauBasis::phase(qp, lp) * v;
                    G(basis.index(q, l), basis.index(qp, lp)) = e;
                    G(basis.index(qp, lp), basis.index(q, l)) = std::conj(e);
                }
        return G;
    }
    // (1/2pi) sum_i w_i g g' c_i(D), g = f e^{t/2}
    const int nt = 2 * (L + Q) + 60, nth = std::max(64, 2 * (L + Q));
    const quad::Rule gl = quad::gauss_laguerre(nt);
    const double b0 = basis.b0();
    const int nd = 2 * (L + Q) - 1, off = L + Q - 1;
    MatC coeff = MatC::Zero(nt, nd);
    std::vector<double> vals(nth);
    for (int i = 0; i < nt; ++i) {
        const double r = std::sqrt(2.0 * gl.x[i] / b0);
        for (int j = 0; j < nth; ++j) {
            const double th = 2.0 * kPi * j / nth;
            vals[j] = U(r * std::cos(th), r * std::sin(th));
        }
        for (int d = 0; d < nd; ++d) {
            cplx s = 0.0;
            for (int j = 0; j < nth; ++j) s += vals[j] * std::polar(1.0, (d - off) * 2.0 * kPi * j / nth);
            coeff(i, d) = s / static_cast<double>(nth);
        }
    }
    MatR g(nt, n);
    for (int i = 0; i < nt; ++i)
        for (int q = 0; q < Q; ++q)
            for (int l = 0; l < L; ++l) {
                const double p = LandauBasis::radial_poly(q, l, gl.x[i]);
                g(i, basis.index(q, l)) =
                    (gl.w[i] > 0.0 && p != 0.0)
                        ? std::copysign(std::exp(0.5 * std::log(gl.w[i]) + std::log(std::abs(p))), p)
                        : 0.0;
            }
    for (int q = 0; q < Q; ++q)
        for (int l = 0; l < L; ++l)
            for (int qp = 0; qp < Q; ++qp)
                for (int lp = 0; lp < L; ++lp) {
                    const int a = basis.index(q, l), b = basis.index(qp, lp);
                    if (b < a) continue;
                    const int D = (lp - qp) - (l - q);
                    cplx s = 0.0;
                    for (int i = 0; i < nt; ++i) s += g(i, a) * g(i, b) * coeff(i, D + off);
                    const cplx e = std::conj(LandauBasis::phase(q, l)) * LandauBasis::phase(qp, lp) * s;
                    G(a, b) = e;
                    G(b, a) = std::conj(e);
                }
    return G;
}

cplx log_det_dense(const MatC& m) {
    Eigen::PartialPivLU<MatC> lu(m);
    const MatC& u = lu.matrixLU();
    cplx s = 0.0;
    for (int i = 0; i < u.rows(); ++i) {
        if (u(i, i) == 0.0) throw SingularAtNode("matrix is exactly singular");
        s += std::log(u(i, i));
    }
    if (lu.permutationP().determinant() < 0) s += cplx(0.0, kPi);
    return s;
}

// ---------------------------------------------------------------- assembly

BSAssembly::BSAssembly(const PerturbationSpec& spec, const LandauBasis& basis, const AxialGrid& grid,
                       Flavor flavor, BSOptions opt)
    : flavor_(flavor), opt_(opt), coupling_(spec.coupling), basis_(basis), grid_(grid) {
    const int n_spin = flavor == Flavor::Pauli ? 2 : 4;
    if (spec.n != n_spin)
        throw FlavorError(to_string(flavor) + " needs a " + std::to_string(n_spin) + "x" +
                          std::to_string(n_spin) + " matrix profile");
    if (!is_hermitian(spec.matrix_profile)) throw ValidationError("matrix_profile is not Hermitian");
    if (flavor != Flavor::Pauli && !(opt.mass > 0.0)) throw InvalidArgument("Dirac mass must be positive");
    M_ = spec.matrix_profile;
    for (int i = 0; i < grid.size(); ++i) v_.push_back(spec.axial.axial(grid.x[i]));

    const double b0 = basis.b0();
    const int Q = basis.level_count(), L = basis.angular_count();
    std::vector<bool> active(n_spin, false);
    for (int s = 0; s < n_spin; ++s)
        for (int t = 0; t < n_spin; ++t)
            if (std::abs(M_(s, t)) > 0.0) active[s] = true;

    std::map<std::tuple<int, int, int>, int> id;  // (sigma, q, l) -> channel
    for (int s = 0; s < n_spin; ++s) {
        if (!active[s]) continue;
        const bool plus = flavor == Flavor::Pauli ? s == 1 : (s == 1 || s == 3);
        for (int q = 0; q < Q; ++q)
            for (int l = 0; l < L; ++l) {
                Channel c;
                c.q = q;
                c.l = l;
                c.sigma = s;
                c.t = basis.index(q, l);
                c.shift = 2.0 * b0 * (plus ? q + 1 : q);
                id[{s, q, l}] = static_cast<int>(channels_.size());
                channels_.push_back(c);
            }
    }
    const int nc = static_cast<int>(channels_.size());

    G_ = galerkin_matrix(spec.transverse, basis);
    const MatC Gs = hermitian_sqrt_abs(G_);
    const MatC Ms = hermitian_sqrt_abs(M_);
    const MatC Mj = hermitian_sign(M_);

    // global kernel entries, channel ids
    struct GEntry { int out, in; KernelKind kind; double factor; bool diag; double shift; };
    std::vector<GEntry> gents;
    for (int c = 0; c < nc; ++c)
        gents.push_back({c, c, KernelKind::Even, 1.0, true, channels_[c].shift});
    if (flavor != Flavor::Pauli) {
        auto find = [&](int s, int q, int l) {
            auto it = id.find({s, q, l});
            return it == id.end() ? -1 : it->second;
        };
        for (int c = 0; c < nc; ++c) {
            const Channel& ch = channels_[c];
            const int q = ch.q, l = ch.l, s = ch.sigma;
            auto add = [&](int out, KernelKind kind, double factor, double shift) {
                if (out >= 0) gents.push_back({out, c, kind, factor, false, shift});
            };
            switch (s) {
                case 0:
                    add(find(2, q, l), KernelKind::Odd, 1.0, 2.0 * b0 * q);
                    if (q >= 1) add(find(3, q - 1, l), KernelKind::Even, std::sqrt(2.0 * b0 * q), 2.0 * b0 * q);
                    break;
                case 1:
                    add(find(3, q, l), KernelKind::Odd, -1.0, 2.0 * b0 * (q + 1));
                    add(find(2, q + 1, l), KernelKind::Even, std::sqrt(2.0 * b0 * (q + 1)), 2.0 * b0 * (q + 1));
                    break;
                case 2:
                    add(find(0, q, l), KernelKind::Odd, 1.0, 2.0 * b0 * q);
                    if (q >= 1) add(find(1, q - 1, l), KernelKind::Even, std::sqrt(2.0 * b0 * q), 2.0 * b0 * q);
                    break;
                case 3:
                    add(find(1, q, l), KernelKind::Odd, -1.0, 2.0 * b0 * (q + 1));
                    add(find(0, q + 1, l), KernelKind::Even, std::sqrt(2.0 * b0 * (q + 1)), 2.0 * b0 * (q + 1));
                    break;
            }
        }
    }

    // blocks: connected components of (G pattern x M pattern) and the kernel couplings
    UnionFind uf(nc);
    const std::vector<int> mcomp = matrix_components(M_);
    const bool radial = spec.transverse.is_radial();
    std::map<std::pair<int, int>, int> first;
    for (int c = 0; c < nc; ++c) {
        const Channel& ch = channels_[c];
        const std::pair<int, int> key{mcomp[ch.sigma], radial ? ch.l - ch.q : 0};
        auto [it, fresh] = first.emplace(key, c);
        if (!fresh) uf.unite(c, it->second);
    }
    for (const auto& e : gents) uf.unite(e.out, e.in);

    const int sing_sigma = flavor == Flavor::DiracMinus ? 2 : 0;
    std::map<int, int> block_of_root;
    std::vector<int> local(nc);
    for (int c = 0; c < nc; ++c) {
        const int r = uf.find(c);
        auto [it, fresh] = block_of_root.emplace(r, static_cast<int>(blocks_.size()));
        if (fresh) blocks_.emplace_back();
        BSBlock& b = blocks_[it->second];
        local[c] = b.size();
        b.channels.push_back(c);
    }
    std::vector<int> block_id(nc);
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b)
        for (int c : blocks_[b].channels) block_id[c] = b;

    double sum_wv = 0.0;
    for (int i = 0; i < grid.size(); ++i) sum_wv += grid.w[i] * std::abs(v_[i]);

    for (auto& b : blocks_) {
        const int P = b.size();
        b.V.resize(P, P);
        b.St.resize(P, P);
        b.Jt = MatC::Zero(P, P);
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < P; ++j) {
                const Channel& ci = channels_[b.channels[i]];
                const Channel& cj = channels_[b.channels[j]];
                b.V(i, j) = G_(ci.t, cj.t) * M_(ci.sigma, cj.sigma);
                b.St(i, j) = Gs(ci.t, cj.t) * Ms(ci.sigma, cj.sigma);
                if (ci.t == cj.t) b.Jt(i, j) = Mj(ci.sigma, cj.sigma);
            }
        for (int i = 0; i < P; ++i) {
            const Channel& c = channels_[b.channels[i]];
            if (c.q == 0 && c.sigma == sing_sigma) b.singular.push_back(i);
        }
    }
    for (const auto& e : gents) {
        BSBlock& b = blocks_[block_id[e.out]];
        KernelEntry k;
        k.out = local[e.out];
        k.in = local[e.in];
        k.kind = e.kind;
        k.factor = e.factor;
        k.diagonal = e.diag;
        k.shift = e.shift;
        const Channel& c = channels_[e.out];
        k.singular = e.diag && c.q == 0 && c.sigma == sing_sigma;
        if (!e.diag) b.channel_diagonal = false;
        b.entries.push_back(k);
    }
    for (auto& b : blocks_) {
        if (b.singular.empty() || sum_wv == 0.0) continue;
        MatC rows(b.singular.size(), b.size());
        for (std::size_t s = 0; s < b.singular.size(); ++s) rows.row(s) = b.St.row(b.singular[s]);
        Eigen::JacobiSVD<MatC> svd(rows);
        const VecR& sv = svd.singularValues();
        const double tol = 1e-13 * std::max(1.0, sv.size() ? sv(0) : 0.0);
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > tol) ++b.pole_order;
    }
}

cplx BSAssembly::level0_wavenumber(cplx k) const {
    if (flavor_ == Flavor::Pauli) return k;
    return 2.0 * opt_.mass * k / (1.0 - k * k);
}

cplx BSAssembly::kappa(double shift, cplx k) const {
    const cplx k0 = level0_wavenumber(k);
    if (shift == 0.0) return k0;
    return I1 * std::sqrt(shift - k0 * k0);
}

cplx BSAssembly::alpha(int sigma, cplx k) const {
    if (flavor_ == Flavor::Pauli) return 1.0;
    const cplx zz = z(k);
    return sigma < 2 ? zz + opt_.mass : zz - opt_.mass;
}

void BSAssembly::check_k(cplx k, bool check_disk) const {
    if (check_disk && opt_.disk_radius > 0.0 && std::abs(k) >= opt_.disk_radius)
        throw OutsideDisk("|k| = " + num(std::abs(k)) + " is outside the admissible disk");
    if (flavor_ != Flavor::Pauli && std::abs(k) >= 1.0) throw OutsideDisk("Dirac needs |k| < 1");
}

// alpha/kappa for the shift-0 channels: avoids 0/0 at k = 0 for the Dirac map
namespace {
cplx alpha_over_kappa0(Flavor f, int sigma, cplx k) {
    if (f == Flavor::Pauli) return 1.0 / k;
    const bool upper = sigma < 2;  // z + m on components 0, 1
    if (f == Flavor::DiracPlus) return upper ? 1.0 / k : k;
    return upper ? -k : -1.0 / k;
}
}  // namespace

MatC BSAssembly::D_block(int bi, cplx k, bool regular) const {
    const BSBlock& b = blocks_[bi];
    const int N = grid_.size(), P = b.size();
    MatC D = MatC::Zero(P * N, P * N);
    for (const auto& e : b.entries) {
        const int sig = channels_[b.channels[e.out]].sigma;
        const cplx kap = kappa(e.shift, k);
        cplx coef = e.factor;
        bool use_ratio = false;
        if (e.diagonal) {
            if (e.shift == 0.0) use_ratio = true;
            else coef *= alpha(sig, k);
        }
        const cplx ratio = use_ratio ? alpha_over_kappa0(flavor_, sig, k) : 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                const double d = grid_.x[i] - grid_.x[j];
                cplx val;
                if (e.kind == KernelKind::Odd) {
                    val = coef * odd_kernel(kap, d);
                } else if (use_ratio) {
                    if (e.singular && regular)
                        val = e.factor * alpha(sig, k) * remainder_kernel(kap, d);
                    else
                        val = e.factor * ratio * 0.5 * I1 * std::exp(I1 * kap * std::abs(d));
                } else {
                    val = coef * even_kernel(kap, d);
                }
                D(e.out * N + i, e.in * N + j) += std::sqrt(grid_.w[i] * grid_.w[j]) * val;
            }
    }
    return D;
}

namespace {
MatC kron_diag(const MatC& A, const std::vector<double>& d) {
    const int P = static_cast<int>(A.rows()), N = static_cast<int>(d.size());
    MatC out = MatC::Zero(P * N, P * N);
    for (int a = 0; a < P; ++a)
        for (int b = 0; b < P; ++b) {
            if (A(a, b) == 0.0) continue;
            for (int i = 0; i < N; ++i) out(a * N + i, b * N + i) = A(a, b) * d[i];
        }
    return out;
}
}  // namespace

MatC BSAssembly::A_block(int b, cplx k, double e) const {
    check_k(k, true);
    const int N = grid_.size();
    std::vector<double> sv(N), sg(N);
    for (int i = 0; i < N; ++i) {
        sv[i] = std::sqrt(std::abs(v_[i]));
        sg[i] = v_[i] > 0 ? 1.0 : (v_[i] < 0 ? -1.0 : 0.0);
    }
    const MatC S = kron_diag(blocks_[b].St, sv);
    const MatC J = kron_diag(blocks_[b].Jt, sg);
    return e * J * S * D_block(b, k, true) * S;
}

MatC BSAssembly::T_block(int b, cplx k, double e) const {
    check_k(k, true);
    if (k == 0.0) throw ThresholdSingularity("T(k) has a pole at k = 0");
    const int N = grid_.size();
    std::vector<double> sv(N), sg(N);
    for (int i = 0; i < N; ++i) {
        sv[i] = std::sqrt(std::abs(v_[i]));
        sg[i] = v_[i] > 0 ? 1.0 : (v_[i] < 0 ? -1.0 : 0.0);
    }
    const MatC S = kron_diag(blocks_[b].St, sv);
    const MatC J = kron_diag(blocks_[b].Jt, sg);
    return e * J * S * D_block(b, k, false) * S;
}

MatC BSAssembly::K_block(int bi) const {
    const BSBlock& b = blocks_[bi];
    const int N = grid_.size(), P = b.size();
    MatC K = MatC::Zero(b.singular.size(), P * N);
    for (std::size_t s = 0; s < b.singular.size(); ++s)
        for (int c = 0; c < P; ++c)
            for (int i = 0; i < N; ++i)
                K(s, c * N + i) = b.St(b.singular[s], c) * std::sqrt(grid_.w[i] * std::abs(v_[i]));
    return K;
}

int BSAssembly::global_index(int b, int local) const {
    const int N = grid_.size();
    return blocks_[b].channels[local / N] * N + local % N;
}

namespace {
template <class F>
MatC scatter_blocks(const BSAssembly& a, F block_matrix) {
    MatC out = MatC::Zero(a.dim(), a.dim());
    for (int b = 0; b < static_cast<int>(a.blocks().size()); ++b) {
        const MatC m = block_matrix(b);
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) out(a.global_index(b, i), a.global_index(b, j)) = m(i, j);
    }
    return out;
}
}  // namespace

MatC BSAssembly::A(cplx k, bool check_disk) const {
    check_k(k, check_disk);
    BSAssembly tmp = *this;
    tmp.opt_.disk_radius = 0.0;
    return scatter_blocks(tmp, [&](int b) { return tmp.A_block(b, k, coupling_); });
}

MatC BSAssembly::T(cplx k, bool check_disk) const {
    check_k(k, check_disk);
    BSAssembly tmp = *this;
    tmp.opt_.disk_radius = 0.0;
    return scatter_blocks(tmp, [&](int b) { return tmp.T_block(b, k, coupling_); });
}

MatC BSAssembly::S() const {
    const int N = grid_.size();
    std::vector<double> sv(N);
    for (int i = 0; i < N; ++i) sv[i] = std::sqrt(std::abs(v_[i]));
    return scatter_blocks(*this, [&](int b) { return kron_diag(blocks_[b].St, sv); });
}

MatC BSAssembly::J() const {
    const int N = grid_.size();
    std::vector<double> sg(N);
    for (int i = 0; i < N; ++i) sg[i] = v_[i] > 0 ? 1.0 : (v_[i] < 0 ? -1.0 : 0.0);
    return scatter_blocks(*this, [&](int b) { return kron_diag(blocks_[b].Jt, sg); });
}

MatC BSAssembly::K() const {
    const int L = basis_.angular_count();
    MatC K = MatC::Zero(L, dim());
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b) {
        const MatC kb = K_block(b);
        for (std::size_t s = 0; s < blocks_[b].singular.size(); ++s) {
            const int row = channels_[blocks_[b].channels[blocks_[b].singular[s]]].l;
            for (int j = 0; j < kb.cols(); ++j) K(row, global_index(b, j)) = kb(s, j);
        }
    }
    return K;
}

MatC BSAssembly::B() const {
    const MatC k = K();
    return 0.5 * k.adjoint() * k;
}

VecR BSAssembly::B_eigenvalues() const {
    double sum_wv = 0.0;
    for (int i = 0; i < grid_.size(); ++i) sum_wv += grid_.w[i] * std::abs(v_[i]);
    std::vector<double> ev;
    for (const auto& b : blocks_) {
        if (b.singular.empty() || sum_wv == 0.0) continue;
        MatC rows(b.singular.size(), b.size());
        for (std::size_t s = 0; s < b.singular.size(); ++s) rows.row(s) = b.St.row(b.singular[s]);
        Eigen::JacobiSVD<MatC> svd(rows);
        const VecR& sv = svd.singularValues();
        // same rank cut as pole_order
        const double tol = 1e-13 * std::max(1.0, sv.size() ? sv(0) : 0.0);
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > tol) ev.push_back(0.5 * sv(i) * sv(i) * sum_wv);
    }
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return Eigen::Map<VecR>(ev.data(), static_cast<Eigen::Index>(ev.size()));
}

// ---------------------------------------------------------------- determinants

cplx BSAssembly::log_det_banded(int bi, cplx k, double e) const {
    const BSBlock& b = blocks_[bi];
    const int N = grid_.size(), P = b.size();
    const int n = N * P, kl = P, ku = P, ldab = 2 * kl + ku + 1;
    std::vector<cplx> ab(static_cast<std::size_t>(ldab) * n, 0.0);
    auto at = [&](int i, int j) -> cplx& { return ab[static_cast<std::size_t>(j) * ldab + kl + ku + i - j]; };

    cplx logdet_D = 0.0;
    for (int c = 0; c < P; ++c) {
        const Channel& ch = channels_[b.channels[c]];
        const cplx kap = kappa(ch.shift, k);
        // beta = alpha i / (2 kappa)
        cplx beta = ch.shift == 0.0 ? 0.5 * I1 * alpha_over_kappa0(flavor_, ch.sigma, k)
                                    : alpha(ch.sigma, k) * I1 / (2.0 * kap);
        std::vector<cplx> a(N), om(N);
        for (int i = 1; i < N; ++i) {
            const double h = grid_.x[i] - grid_.x[i - 1];
            a[i] = std::exp(I1 * kap * h);
            om[i] = -expm1(2.0 * I1 * kap * h);
            logdet_D += std::log(om[i]);
        }
        logdet_D += static_cast<double>(N) * std::log(beta);
        const cplx ib = 1.0 / beta;
        for (int i = 0; i < N; ++i) {
            cplx d;
            if (N == 1) d = 1.0;
            else if (i == 0) d = 1.0 / om[1];
            else if (i == N - 1) d = 1.0 / om[N - 1];
            else d = 1.0 / om[i] + 1.0 / om[i + 1] - 1.0;
            at(i * P + c, i * P + c) += ib * d;
            if (i + 1 < N) {
                const cplx o = -ib * a[i + 1] / om[i + 1];
                at(i * P + c, (i + 1) * P + c) += o;
                at((i + 1) * P + c, i * P + c) += o;
            }
        }
    }
    for (int i = 0; i < N; ++i) {
        const double wv = grid_.w[i] * v_[i];
        if (wv == 0.0) continue;
        for (int c = 0; c < P; ++c)
            for (int cp = 0; cp < P; ++cp)
                if (b.V(c, cp) != 0.0) at(i * P + c, i * P + cp) += e * b.V(c, cp) * wv;
    }
    std::vector<lapack_int> ipiv(n);
    const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab, ipiv.data());
    if (info < 0) throw InvalidArgument("zgbtrf: bad argument " + std::to_string(-info));
    if (info > 0) throw SingularAtNode("banded factor is exactly singular");
    cplx s = logdet_D;
    int swaps = 0;
    for (int j = 0; j < n; ++j) {
        s += std::log(ab[static_cast<std::size_t>(j) * ldab + kl + ku]);
        if (ipiv[j] != j + 1) ++swaps;
    }
    if (swaps % 2) s += cplx(0.0, kPi);
    return s;
}

cplx BSAssembly::log_det_block(int b, cplx k, double e, DetRoute route) const {
    check_k(k, true);
    if (k == 0.0) throw ThresholdSingularity("det(I + T) has a pole at k = 0");
    if (route == DetRoute::Auto) route = blocks_[b].channel_diagonal ? DetRoute::Banded : DetRoute::Dense;
    if (route == DetRoute::Banded) {
        if (!blocks_[b].channel_diagonal)
            throw InvalidArgument("banded determinant needs a channel-diagonal block");
        return log_det_banded(b, k, e);
    }
    const MatC T = T_block(b, k, e);
    return log_det_dense(MatC::Identity(T.rows(), T.cols()) + T);
}

cplx BSAssembly::log_det(cplx k, double e, DetRoute route) const {
    cplx s = 0.0;
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b) s += log_det_block(b, k, e, route);
    return s;
}

cplx BSAssembly::log_F_block(int b, cplx k, double e, DetRoute route) const {
    return static_cast<double>(blocks_[b].pole_order) * std::log(k) + log_det_block(b, k, e, route);
}

MatC sandwich_operator(const BSAssembly& a) { return a.K(); }
MatC assemble_B(const BSAssembly& a) { return a.B(); }
MatC assemble_A(const BSAssembly& a, cplx k) { return a.A(k); }
MatC assemble_T(const BSAssembly& a, cplx k) { return a.T(k); }

}  // namespace bsres
