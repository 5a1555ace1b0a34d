#include "bsres/landau.hpp"

#include <cmath>

#include "bsres/errors.hpp"

namespace bsres {

double laguerre(int n, double a, double x) {
    if (n == 0) return 1.0;
    double p0 = 1.0, p1 = 1.0 + a - x;
    for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0 + a - x) * p1 - (k + a) * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

LandauBasis::LandauBasis(double b0, int level_count, int angular_count)
    : b0_(b0), q_max_(level_count), l_max_(angular_count) {
    if (!(b0 > 0.0)) throw InvalidArgument("b0 must be positive");
    if (level_count < 1 || angular_count < 1)
        throw InvalidArgument("Landau basis needs Q_max >= 1 and L_max >= 1");
}

cplx LandauBasis::phase(int q, int l) {
    // i^q (-1)^q for l >= q, i^q (-1)^l otherwise
    static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    cplx p = ipow[q % 4];
    const int s = l >= q ? q : l;
    return (s % 2) ? -p : p;
}

double LandauBasis::radial_poly(int q, int l, double t) {
    const int lo = std::min(q, l), hi = std::max(q, l);
    const int a = hi - lo;
    const double lag = laguerre(lo, a, t);
    if (lag == 0.0) return 0.0;
    if (t <= 0.0) {
        if (a > 0) return 0.0;
        return lag;  // t^0 * sqrt(lo!/hi!) = 1
    }
    const double logpref =
        0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) + 0.5 * a * std::log(t);
    return std::exp(logpref) * lag;
}

double LandauBasis::radial(int q, int l, double t) {
    const int lo = std::min(q, l), hi = std::max(q, l);
    const int a = hi - lo;
    const double lag = laguerre(lo, a, t);
    if (lag == 0.0) return 0.0;
    if (t <= 0.0) return a > 0 ? 0.0 : lag;
    const double logpref = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) +
                           0.5 * a * std::log(t) - 0.5 * t;
    return std::exp(logpref) * lag;
}

cplx LandauBasis::operator()(int q, int l, double x, double y) const {
    const double r2 = x * x + y * y;
    const double t = 0.5 * b0_ * r2;
    const double th = std::atan2(y, x);
    const double f = radial(q, l, t);
    return phase(q, l) * std::sqrt(b0_ / (2.0 * kPi)) * f * std::polar(1.0, (l - q) * th);
}

nlohmann::json LandauBasis::to_json() const {
    return {{"b0", b0_}, {"Q_max", q_max_}, {"L_max", l_max_}};
}

LandauBasis LandauBasis::from_json(const nlohmann::json& j) {
    return LandauBasis(j.at("b0").get<double>(), j.at("Q_max").get<int>(), j.at("L_max").get<int>());
}

LandauBasis build_basis(const MagneticModel& model, int level_count, int angular_count) {
    if (!model.constant_field())
        throw UnsupportedField("Landau basis is only available for a constant field");
    return LandauBasis(model.b0, level_count, angular_count);
}

cplx ProjectionKernel::operator()(double x1, double x2, double y1, double y2) const {
    cplx s = 0.0;
    for (int l = 0; l < basis_.angular_count(); ++l)
        s += basis_(0, l, x1, x2) * std::conj(basis_(0, l, y1, y2));
    return s;
}

ProjectionKernel projection_kernel(const LandauBasis& basis) { return ProjectionKernel(basis); }

double landau_dei(const MagneticModel& model, double t) {
    if (!model.constant_field())
        throw UnsupportedField("landau_dei needs a constant field");
    if (t <= 0.0) return 0.0;
    // #{q >= 0 : 2 b0 q < t} = ceil(t / 2b0)
    const double count = std::ceil(t / (2.0 * model.b0));
    return model.b0 / (2.0 * kPi) * count;
}

}  // namespace bsres
