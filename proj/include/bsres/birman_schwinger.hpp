#pragma once

#include "bsres/axial.hpp"
#include "bsres/landau.hpp"

namespace bsres {

enum class Flavor { Pauli, DiracPlus, DiracMinus };
std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string& s);

// Pauli: z = k^2. Dirac: z = +-m (1+k^2)/(1-k^2).
cplx spectral_map(Flavor f, double m, cplx k);
// Branch with Im k >= 0.
cplx inverse_spectral_map(Flavor f, double m, cplx z);

struct BSOptions {
    double mass = 1.0;         // Dirac only
    double disk_radius = 0.0;  // 0: unchecked
};

// Transverse index (q, l) and spin component sigma. Pauli: sigma 0 = down
// (shift 2 b0 q), 1 = up (shift 2 b0 (q+1)). Dirac: components 0..3 of the
// 4-spinor; 0, 2 use H12^- and 1, 3 use H12^+.
struct Channel {
    int q = 0, l = 0, sigma = 0;
    int t = 0;  // basis index q * L + l
    double shift = 0.0;
};

enum class KernelKind { Even, Odd };

// One resolvent entry of the axial kernel between two channels of a block.
struct KernelEntry {
    int out = 0, in = 0;  // local channel indices
    KernelKind kind = KernelKind::Even;
    double factor = 1.0;   // ladder / sign factor (diagonal entries also carry alpha(k))
    bool diagonal = true;  // carries alpha(k) = z +- m (Dirac) or 1 (Pauli)
    double shift = 0.0;
    bool singular = false;  // level-0 entry with alpha/kappa = +-1/k
};

struct BSBlock {
    std::vector<int> channels;  // global channel ids
    MatC V;                     // (G x M) restricted
    MatC St;                    // (G^{1/2} x |M|^{1/2}) restricted
    MatC Jt;                    // sgn(M) on the spin factor, restricted
    std::vector<KernelEntry> entries;
    std::vector<int> singular;  // local indices of singular channels
    bool channel_diagonal = true;
    int pole_order = 0;
    int size() const { return static_cast<int>(channels.size()); }
};

enum class DetRoute { Auto, Dense, Banded };

class BSAssembly {
public:
    BSAssembly(const PerturbationSpec& spec, const LandauBasis& basis, const AxialGrid& grid,
               Flavor flavor, BSOptions opt = {});

    Flavor flavor() const { return flavor_; }
    double coupling() const { return coupling_; }
    double mass() const { return opt_.mass; }
    const LandauBasis& basis() const { return basis_; }
    const AxialGrid& grid() const { return grid_; }
    const std::vector<Channel>& channels() const { return channels_; }
    const std::vector<BSBlock>& blocks() const { return blocks_; }
    const MatC& galerkin() const { return G_; }  // cross-level <e, U e'>
    const MatC& matrix_profile() const { return M_; }
    const std::vector<double>& axial_values() const { return v_; }
    int dim() const { return static_cast<int>(channels_.size()) * grid_.size(); }
    // +1, or -1 for the -m map whose pole carries the opposite sign
    double pole_sign() const { return flavor_ == Flavor::DiracMinus ? -1.0 : 1.0; }

    cplx z(cplx k) const { return spectral_map(flavor_, opt_.mass, k); }
    // Level-0 axial wavenumber: k (Pauli) or 2mk/(1-k^2) (Dirac).
    cplx level0_wavenumber(cplx k) const;
    cplx kappa(double shift, cplx k) const;
    cplx alpha(int sigma, cplx k) const;

    // Dense matrices (channel-major ordering c * N + i); meant for small problems.
    MatC K() const;  // L x dim
    MatC B() const;  // 1/2 K* K
    MatC A(cplx k, bool check_disk = true) const;
    MatC T(cplx k, bool check_disk = true) const;  // coupling included
    MatC S() const;   // |V|^{1/2}
    MatC J() const;   // sgn of the V profile

    MatC K_block(int b) const;
    MatC A_block(int b, cplx k, double e) const;
    MatC T_block(int b, cplx k, double e) const;
    int block_dim(int b) const { return blocks_[b].size() * grid_.size(); }
    // global dense index of block-local index
    int global_index(int b, int local) const;

    // Nonzero spectrum of B (descending) from the singular values of K.
    VecR B_eigenvalues() const;

    // log det(I + e T_b(k)), complex log on some branch.
    cplx log_det_block(int b, cplx k, double e, DetRoute route = DetRoute::Auto) const;
    cplx log_det(cplx k, double e, DetRoute route = DetRoute::Auto) const;
    // r_b log k + log det(I + e T_b(k)): analytic across k = 0.
    cplx log_F_block(int b, cplx k, double e, DetRoute route = DetRoute::Auto) const;

private:
    void check_k(cplx k, bool check_disk) const;
    MatC D_block(int b, cplx k, bool regular) const;
    cplx log_det_banded(int b, cplx k, double e) const;

    Flavor flavor_;
    BSOptions opt_;
    double coupling_;
    LandauBasis basis_;
    AxialGrid grid_;
    std::vector<Channel> channels_;
    std::vector<BSBlock> blocks_;
    MatC G_;
    MatC M_;
    std::vector<double> v_;  // axial profile at the nodes
};

// Free-function forms.
MatC sandwich_operator(const BSAssembly& a);
MatC assemble_B(const BSAssembly& a);
MatC assemble_A(const BSAssembly& a, cplx k);
MatC assemble_T(const BSAssembly& a, cplx k);

// Cross-level Galerkin matrix <e_{q,l}, U e_{q',l'}> (radial: exact quadrature,
// otherwise Gauss-Laguerre x trapezoid).
MatC galerkin_matrix(const Profile& U, const LandauBasis& basis);

// Log-determinant of a dense matrix by partial-pivot LU.
cplx log_det_dense(const MatC& m);

}  // namespace bsres
