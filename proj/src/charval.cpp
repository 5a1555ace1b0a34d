#include "bsres/charval.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "bsres/axial.hpp"
#include "bsres/errors.hpp"
#include "bsres/toeplitz.hpp"

namespace bsres {

namespace {

const cplx I1(0.0, 1.0);

double wrap(double a) {
    a = std::remainder(a, 2.0 * kPi);
    return a;
}

struct Segment {
    std::function<cplx(double)> g;
    int n;
};

struct Node {
    cplx k, lf;
    cplx g;  // (log F)'
};

// Nodes are inserted until every segment is short against the local scale
// |F / F'| at both ends. Near a zero of multiplicity m that scale is ~ dist/m,
// so no segment can step over a zero; a phase-jump test alone aliases once a
// double zero sits between two nodes.
class PathWalker {
public:
    PathWalker(const LogFn& f, const ContourOptions& o) : f_(f), o_(o) {}

    void walk(const std::vector<Segment>& segs) {
        for (const auto& s : segs) {
            for (int j = 0; j < s.n; ++j) {
                const double sa = static_cast<double>(j) / s.n, sb = static_cast<double>(j + 1) / s.n;
                if (nodes_.empty()) push(eval(s.g(sa)));
                refine(s, sa, sb, eval(s.g(sb)), 0);
            }
        }
    }

    WindingResult result() const {
        WindingResult r;
        // the last node coincides with the first
        const cplx total = unwrapped_.back() - unwrapped_.front();
        r.index_real = total.imag() / (2.0 * kPi);
        r.index = static_cast<int>(std::lround(r.index_real));
        r.log_min_abs = kInf;
        r.log_max_abs = -kInf;
        for (const auto& l : unwrapped_) {
            r.log_min_abs = std::min(r.log_min_abs, l.real());
            r.log_max_abs = std::max(r.log_max_abs, l.real());
        }
        r.nodes = nodes_;
        r.log_values = unwrapped_;
        return r;
    }

private:
    Node eval(cplx k) const {
        Node n{k, f_(k), 0.0};
        if (!std::isfinite(n.lf.real()) || !std::isfinite(n.lf.imag()))
            throw ContourTooClose("log F is not finite on the contour at k = " + num(k.real()) + " + " +
                                  num(k.imag()) + "i");
        // F(k + h) / F(k) - 1 carries no branch ambiguity
        const double h = 1e-7 * std::max(std::abs(k), 1e-300);
        n.g = expm1(f_(k + h) - n.lf) / h;
        if (!std::isfinite(n.g.real()) || !std::isfinite(n.g.imag())) n.g = kInf;
        return n;
    }

    void push(const Node& n) {
        if (unwrapped_.empty()) {
            unwrapped_.push_back(n.lf);
        } else {
            const cplx d(n.lf.real() - last_.lf.real(), wrap(n.lf.imag() - last_.lf.imag()));
            unwrapped_.push_back(unwrapped_.back() + d);
        }
        last_ = n;
        nodes_.push_back(n.k);
    }

    void refine(const Segment& s, double sa, double sb, const Node& b, int depth) {
        const double len = std::abs(b.k - last_.k);
        const bool ok = std::abs(wrap(b.lf.imag() - last_.lf.imag())) < 0.5 * kPi &&
                        std::abs(last_.g) * len < 0.25 * kPi && std::abs(b.g) * len < 0.25 * kPi;
        if (ok) {
            push(b);
            return;
        }
        if (depth >= o_.max_depth) throw ContourTooClose("a zero lies too close to the contour to resolve");
        const double sm = 0.5 * (sa + sb);
        refine(s, sa, sm, eval(s.g(sm)), depth + 1);
        refine(s, sm, sb, b, depth + 1);
    }

    const LogFn& f_;
    const ContourOptions& o_;
    std::vector<cplx> nodes_;
    std::vector<cplx> unwrapped_;
    Node last_{};
};

WindingResult finish(PathWalker& w, const ContourOptions& o) {
    WindingResult r = w.result();
    if (std::abs(r.index_real - r.index) > 1e-6)
        throw ContourTooClose("winding number is not integral");
    if (r.log_min_abs - r.log_max_abs < std::log(o.too_close))
        throw ContourTooClose("|F| nearly vanishes on the contour");
    return r;
}

int arc_count(const ContourOptions& o, double span) {
    return std::max(4, static_cast<int>(std::ceil(o.arc_nodes * std::abs(span) / (2.0 * kPi))));
}

}  // namespace

cplx log_det(const MatC& T) { return log_det_dense(MatC::Identity(T.rows(), T.cols()) + T); }

WindingResult contour_index(const LogFn& f, cplx center, double radius, const ContourOptions& o) {
    if (!(radius > 0.0)) throw InvalidArgument("contour radius must be positive");
    PathWalker w(f, o);
    w.walk({{[&](double s) { return center + radius * std::polar(1.0, 2.0 * kPi * s); },
             arc_count(o, 2.0 * kPi)}});
    return finish(w, o);
}

WindingResult box_index(const LogFn& f, double r1, double r2, double th1, double th2,
                        const ContourOptions& o) {
    if (!(r1 > 0.0) || !(r2 > r1) || !(th2 > th1)) throw InvalidArgument("bad polar box");
    const double u1 = std::log(r1), u2 = std::log(r2);
    const int nr = std::max(2, static_cast<int>(std::ceil(o.radial_nodes * (u2 - u1))));
    PathWalker w(f, o);
    w.walk({
        {[=](double s) { return std::exp(cplx(u1 + s * (u2 - u1), th1)); }, nr},
        {[=](double s) { return r2 * std::polar(1.0, th1 + s * (th2 - th1)); }, arc_count(o, th2 - th1)},
        {[=](double s) { return std::exp(cplx(u2 + s * (u1 - u2), th2)); }, nr},
        {[=](double s) { return r1 * std::polar(1.0, th2 + s * (th1 - th2)); }, arc_count(o, th2 - th1)},
    });
    return finish(w, o);
}

OperatorIndex operator_index(const std::function<MatC(cplx)>& A, const std::function<MatC(cplx)>& dA,
                             cplx center, double radius, int nodes, int max_nodes) {
    OperatorIndex out;
    for (int n = nodes; n <= max_nodes; n *= 2) {
        cplx s = 0.0;
        for (int j = 0; j < n; ++j) {
            const cplx e = std::polar(1.0, 2.0 * kPi * j / n);
            const cplx zj = center + radius * e;
            Eigen::PartialPivLU<MatC> lu(A(zj));
            s += lu.solve(dA(zj)).trace() * e;
        }
        s *= radius / static_cast<double>(n);
        out.index_real = s.real();
        out.index = static_cast<int>(std::lround(s.real()));
        out.nodes = n;
        if (std::abs(s - static_cast<double>(out.index)) < 1e-6) return out;
    }
    throw ContourTooClose("operator index not integral after " + std::to_string(max_nodes) + " nodes");
}

// ---------------------------------------------------------------- search

namespace {

struct Box {
    double r1, r2, th1, th2;
    WindingResult w;
};

cplx moment_centroid(const WindingResult& w) {
    // sum of zeros = n k_s - (1/2 pi i) \oint log F dk
    const auto& k = w.nodes;
    const auto& l = w.log_values;
    cplx integral = 0.0;
    for (std::size_t j = 0; j + 1 < k.size(); ++j) integral += 0.5 * (l[j] + l[j + 1]) * (k[j + 1] - k[j]);
    const cplx s1 = static_cast<double>(w.index) * k.front() - integral / (2.0 * kPi * I1);
    return s1 / static_cast<double>(w.index);
}

bool inside(const Box& b, cplx k) {
    const double r = std::abs(k);
    if (r <= b.r1 || r >= b.r2) return false;
    double th = std::arg(k);
    while (th < b.th1) th += 2.0 * kPi;
    while (th >= b.th1 + 2.0 * kPi) th -= 2.0 * kPi;
    return th < b.th2;
}

// (log F)' from differences of F / F(k): F is analytic through the zero, log F is not,
// so the step may exceed the distance to the zero.
cplx dlog(const LogFn& f, cplx k, double h) {
    const cplx l0 = f(k);
    return (std::exp(f(k + h) - l0) - std::exp(f(k - h) - l0)) / (2.0 * h);
}

bool newton(const LogFn& f, cplx& k, const SearchOptions& o) {
    double last = kInf;
    for (int it = 0; it < o.newton_max; ++it) {
        const double h = 1e-7 * std::abs(k);
        const cplx dl = dlog(f, k, h);
        // exactly on the zero
        if (std::isinf(dl.real()) || std::isinf(dl.imag())) return true;
        if (!std::isfinite(dl.real()) || !std::isfinite(dl.imag()) || std::abs(dl) == 0.0) return false;
        const cplx step = 1.0 / dl;
        k -= step;
        if (!std::isfinite(k.real()) || !std::isfinite(k.imag()) || k == 0.0) return false;
        last = std::abs(step);
        if (last <= o.newton_tol * std::abs(k)) return true;
    }
    // stagnation at the noise floor of log F still pins the zero
    return last <= 1e-8 * std::abs(k);
}

double avoid_axis(double th, double lo, double hi) {
    // keep radial cuts away from the imaginary axis, where zeros concentrate
    for (double axis : {-0.5 * kPi, 0.5 * kPi, 1.5 * kPi, 2.5 * kPi, -1.5 * kPi}) {
        if (std::abs(th - axis) < 0.05) {
            const double alt = th + (th > axis ? 0.05 : -0.05);
            if (alt > lo && alt < hi) return alt;
        }
    }
    return th;
}

}  // namespace

std::vector<Zero> find_zeros(const LogFn& f, double r_in, double r_out, const SearchOptions& o,
                             int* boxes_used, int* total_index) {
    if (!(r_in > 0.0) || !(r_out > r_in)) throw InvalidArgument("find_zeros needs 0 < r_in < r_out");
    const int outer = contour_index(f, 0.0, r_out, o.contour).index;
    const int inner = contour_index(f, 0.0, r_in, o.contour).index;
    const int total = outer - inner;
    if (total_index) *total_index = total;
    std::vector<Zero> zeros;
    int boxes = 2;
    if (total < 0) throw ContourTooClose("negative annulus index: F has poles inside the annulus");
    if (total == 0) {
        if (boxes_used) *boxes_used = boxes;
        return zeros;
    }

    std::vector<Box> stack;
    for (int h = 0; h < 2; ++h) {
        const double a = o.theta0 + h * kPi, b = a + kPi;
        Box bx{r_in, r_out, a, b, box_index(f, r_in, r_out, a, b, o.contour)};
        ++boxes;
        if (bx.w.index > 0) stack.push_back(bx);
    }

    const double fracs[] = {0.5, 0.43, 0.57, 0.37, 0.63};
    while (!stack.empty()) {
        if (boxes > o.max_boxes) throw SubdivisionBudget("box budget of " + std::to_string(o.max_boxes) + " exhausted");
        Box b = stack.back();
        stack.pop_back();
        const int n = b.w.index;
        const double du = std::log(b.r2 / b.r1), dth = b.th2 - b.th1;
        const double size = std::max(du, dth);

        cplx start = moment_centroid(b.w);
        if (n == 1) {
            cplx k = start;
            if (std::isfinite(k.real()) && std::isfinite(k.imag()) && k != 0.0 && newton(f, k, o) && inside(b, k)) {
                Zero z;
                z.k = k;
                z.multiplicity = 1;
                z.converged = true;
                z.residual = std::exp(f(k).real() - b.w.log_max_abs);
                zeros.push_back(z);
                continue;
            }
        } else if (size < o.cluster_size) {
            Zero z;
            z.k = start;
            z.multiplicity = n;
            z.cluster = true;
            z.converged = false;
            z.residual = std::exp(f(start).real() - b.w.log_max_abs);
            zeros.push_back(z);
            continue;
        }
        if (size < 1e-13)
            throw SubdivisionBudget("box shrank below resolution without isolating a zero");

        // split the longer side (log-radius vs angle)
        bool done = false;
        for (double fr : fracs) {
            std::vector<Box> kids;
            try {
                if (du >= dth) {
                    const double um = std::log(b.r1) + fr * du;
                    const double rm = std::exp(um);
                    kids.push_back({b.r1, rm, b.th1, b.th2, box_index(f, b.r1, rm, b.th1, b.th2, o.contour)});
                    kids.push_back({rm, b.r2, b.th1, b.th2, box_index(f, rm, b.r2, b.th1, b.th2, o.contour)});
                } else {
                    const double tm = avoid_axis(b.th1 + fr * dth, b.th1, b.th2);
                    kids.push_back({b.r1, b.r2, b.th1, tm, box_index(f, b.r1, b.r2, b.th1, tm, o.contour)});
                    kids.push_back({b.r1, b.r2, tm, b.th2, box_index(f, b.r1, b.r2, tm, b.th2, o.contour)});
                }
            } catch (const ContourTooClose&) {
                boxes += 2;
                continue;
            }
            boxes += 2;
            for (auto& kb : kids)
                if (kb.w.index > 0) stack.push_back(kb);
            done = true;
            break;
        }
        if (!done) throw ContourTooClose("every split of a box passes too close to a zero");
    }
    if (boxes_used) *boxes_used = boxes;
    return zeros;
}

namespace {
void sort_zeros(std::vector<Zero>& z) {
    std::sort(z.begin(), z.end(), [](const Zero& a, const Zero& b) {
        if (std::abs(a.k) != std::abs(b.k)) return std::abs(a.k) < std::abs(b.k);
        return std::arg(a.k) < std::arg(b.k);
    });
}
}  // namespace

ResonanceSet find_resonances(const BSAssembly& a, double r_in, double r_out, double e, const SearchOptions& o) {
    ResonanceSet rs;
    rs.flavor = a.flavor();
    rs.coupling = e;
    rs.r_in = r_in;
    rs.r_out = r_out;
    if (e == 0.0) return rs;
    for (int b = 0; b < static_cast<int>(a.blocks().size()); ++b) {
        LogFn f = [&a, b, e](cplx k) { return a.log_F_block(b, k, e); };
        int used = 0, tot = 0;
        auto zs = find_zeros(f, r_in, r_out, o, &used, &tot);
        rs.boxes += used;
        rs.total_index += tot;
        for (auto& z : zs) {
            z.block = b;
            rs.zeros.push_back(z);
        }
    }
    sort_zeros(rs.zeros);
    return rs;
}

nlohmann::json ResonanceSet::to_json() const {
    nlohmann::json zs = nlohmann::json::array();
    for (const auto& z : zeros)
        zs.push_back({{"re", z.k.real()},
                      {"im", z.k.imag()},
                      {"multiplicity", z.multiplicity},
                      {"residual", z.residual},
                      {"converged", z.converged},
                      {"cluster", z.cluster},
                      {"block", z.block}});
    return {{"flavor", to_string(flavor)}, {"coupling", coupling}, {"r_in", r_in},        {"r_out", r_out},
            {"boxes", boxes},              {"total_index", total_index}, {"zeros", zs}};
}

int multiplicity(const LogFn& f, cplx k0, const std::vector<cplx>& others, const ContourOptions& o) {
    double d = std::abs(k0);
    for (const auto& k : others)
        if (k != k0) d = std::min(d, std::abs(k - k0));
    return contour_index(f, k0, d / 3.0, o).index;
}

int count_in_annulus(const std::vector<Zero>& zeros, double r, double r2, bool closed_outer) {
    int n = 0;
    for (const auto& z : zeros) {
        const double a = std::abs(z.k);
        if (a > r && (a < r2 || (closed_outer && a <= r2))) n += z.multiplicity;
    }
    return n;
}

SectorReport sector_check(const std::vector<Zero>& zeros, double sign, double theta, double tol,
                          double ratio_bound) {
    SectorReport rep;
    rep.sign = sign;
    rep.theta = theta;
    rep.worst_im = -kInf;
    for (const auto& z : zeros) {
        const double im = sign * z.k.imag();
        const double ratio = std::abs(z.k.real()) / std::abs(z.k);
        const bool bad = im > tol || std::abs(z.k.real()) > std::tan(theta) * std::abs(z.k.imag()) + tol ||
                         (ratio_bound >= 0.0 && ratio > ratio_bound);
        if (im > rep.worst_im) rep.worst_im = im;
        if (ratio > rep.worst_re_ratio) {
            rep.worst_re_ratio = ratio;
        }
        if (bad) {
            ++rep.violations;
            rep.holds = false;
            rep.worst_k = z.k;
        }
    }
    if (zeros.empty()) rep.worst_im = 0.0;
    return rep;
}

nlohmann::json SectorReport::to_json() const {
    return {{"sign", sign},
            {"theta", theta},
            {"holds", holds},
            {"worst_signed_im", worst_im},
            {"worst_re_over_abs", worst_re_ratio},
            {"violations", violations},
            {"worst_k", {worst_k.real(), worst_k.imag()}}};
}

AnnulusReport annulus_count_check(const std::vector<Zero>& zeros, double r, const VecR& weight_eigs,
                                  double constant) {
    AnnulusReport rep;
    rep.r = r;
    rep.count = count_in_annulus(zeros, r, 2.0 * r);
    rep.n_plus = counting(weight_eigs, r);
    rep.bound = rep.n_plus * std::abs(std::log(r)) + constant;
    rep.holds = rep.count <= rep.bound;
    return rep;
}

nlohmann::json AnnulusReport::to_json() const {
    return {{"r", r}, {"count", count}, {"n_plus", n_plus}, {"bound", bound}, {"holds", holds}};
}

AccumulationReport accumulation_check(const std::vector<Zero>& zeros, double r, double r0, double e,
                                      const VecR& weight_eigs) {
    AccumulationReport rep;
    rep.r = r;
    rep.r0 = r0;
    rep.e = e;
    rep.count = count_in_annulus(zeros, r, r0, true);
    const VecR half = 0.5 * weight_eigs;
    // zeros sit near |k| = |e| beta_j, so the window (r, r0] maps to the same window in |e| beta
    rep.n_plus_scaled = counting(std::abs(e) * half, r) - counting(std::abs(e) * half, r0);
    rep.n_plus_unit = counting(half, r);
    rep.ratio = rep.n_plus_scaled > 0 ? static_cast<double>(rep.count) / rep.n_plus_scaled
                                      : (rep.count == 0 ? 1.0 : kInf);
    return rep;
}

nlohmann::json AccumulationReport::to_json() const {
    return {{"r", r},
            {"r0", r0},
            {"e", e},
            {"count", count},
            {"n_plus_scaled", n_plus_scaled},
            {"n_plus_unit", n_plus_unit},
            {"ratio", ratio}};
}

}  // namespace bsres
