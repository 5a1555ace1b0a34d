#pragma once

#include "bsres/model.hpp"

namespace bsres {

// Constant-field Landau basis e_{q,l}, q = level, l = angular index.
// With t = b0 r^2 / 2 every function factors as
//   e_{q,l} = phase(q,l) * sqrt(b0/2pi) * f_{q,l}(t) * e^{i(l-q) theta},
// where f is real and int_0^inf f^2 dt = 1 (dA = dt dtheta / b0).
class LandauBasis {
public:
    LandauBasis() = default;
    LandauBasis(double b0, int level_count, int angular_count);

    double b0() const { return b0_; }
    int level_count() const { return q_max_; }
    int angular_count() const { return l_max_; }
    int size() const { return q_max_ * l_max_; }
    int index(int q, int l) const { return q * l_max_ + l; }

    static int orbital(int q, int l) { return l - q; }
    static cplx phase(int q, int l);
    // f_{q,l}(t) and its log-magnitude prefactor-free polynomial part
    // g = f e^{t/2} (can be large; evaluated in log space).
    static double radial(int q, int l, double t);
    static double radial_poly(int q, int l, double t);

    cplx operator()(int q, int l, double x, double y) const;
    // Spectral value of H12^- on e_{q,l}.
    double level_energy(int q) const { return 2.0 * b0_ * q; }

    nlohmann::json to_json() const;
    static LandauBasis from_json(const nlohmann::json& j);

private:
    double b0_ = 1.0;
    int q_max_ = 1;
    int l_max_ = 1;
};

LandauBasis build_basis(const MagneticModel& model, int level_count = 6, int angular_count = 64);

// Truncated kernel of the level-0 projection.
class ProjectionKernel {
public:
    explicit ProjectionKernel(const LandauBasis& basis) : basis_(basis) {}
    cplx operator()(double x1, double x2, double y1, double y2) const;

private:
    LandauBasis basis_;
};

ProjectionKernel projection_kernel(const LandauBasis& basis);

// (b0/2pi) #{q >= 0 : 2 b0 q < t}
double landau_dei(const MagneticModel& model, double t);

// Generalized Laguerre L_n^{(a)}(x) by the three-term recurrence.
double laguerre(int n, double a, double x);

}  // namespace bsres
