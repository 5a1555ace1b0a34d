#include "bsres/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bsres/errors.hpp"

namespace bsres {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + v + "' is not a number");
    }
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != static_cast<int>(x)) throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
    return static_cast<int>(x);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

std::string list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

void set_profile_param(Profile& p, const std::string& key, const std::string& param, const std::string& v) {
    const double x = to_double(key, v);
    if (param == "amplitude") p.amplitude = x;
    else if (param == "alpha") p.alpha = x;
    else if (param == "mu") p.mu = x;
    else if (param == "beta") p.beta = x;
    else if (param == "radius") p.radius = x;
    else if (param == "rate") p.rate = x;
    else if (param == "aniso") p.aniso = x;
    else throw ConfigError("unknown profile parameter '" + key + "'");
}

void write_profile(std::ostream& os, const std::string& name, const Profile& p) {
    os << name << " = " << to_string(p.kind) << "\n";
    os << name << ".amplitude = " << fmt(p.amplitude) << "\n";
    os << name << ".alpha = " << fmt(p.alpha) << "\n";
    os << name << ".mu = " << fmt(p.mu) << "\n";
    os << name << ".beta = " << fmt(p.beta) << "\n";
    os << name << ".radius = " << fmt(p.radius) << "\n";
    os << name << ".rate = " << fmt(p.rate) << "\n";
    os << name << ".aniso = " << fmt(p.aniso) << "\n";
}

bool same_profile(const Profile& a, const Profile& b) {
    return a.kind == b.kind && a.amplitude == b.amplitude && a.alpha == b.alpha && a.mu == b.mu &&
           a.beta == b.beta && a.radius == b.radius && a.rate == b.rate && a.aniso == b.aniso;
}

void check(const ExperimentConfig& c) {
    if (!(c.b0 > 0.0)) throw ConfigError("b0 must be positive");
    if (c.n != 0 && c.n != 2 && c.n != 4) throw ConfigError("n must be 2 or 4");
    if (c.matrix.size() && (c.matrix.rows() != c.spin_count() || c.matrix.cols() != c.spin_count()))
        throw ConfigError("matrix must be " + std::to_string(c.spin_count()) + "x" +
                          std::to_string(c.spin_count()));
    for (double e : c.couplings)
        if (e == 0.0) throw ConfigError("couplings must exclude 0");
    if (!(c.r_in > 0.0) || !(c.r_out >= c.r_in)) throw ConfigError("need 0 < scan.r_in <= scan.r_out");
    for (double r : c.annuli)
        if (!(r > 0.0)) throw ConfigError("scan.annuli entries must be positive");
    if (!(c.radii_fraction > 0.0 && c.radii_fraction < 1.0)) throw ConfigError("radii.fraction must be in (0, 1)");
    if (c.l_max < 1 || c.q_max < 1 || c.grid < 2) throw ConfigError("solver sizes must be positive");
    if (!(c.s_min > 0.0) || !(c.s_max > c.s_min) || c.samples < 2) throw ConfigError("bad counting sample range");
    if (c.law != "auto" && c.law != "power" && c.law != "quasi_exp" && c.law != "compact")
        throw ConfigError("toeplitz.law must be auto, power, quasi_exp or compact");
}

}  // namespace

MatC parse_matrix(const std::string& s) {
    std::vector<std::vector<cplx>> rows;
    std::stringstream rs(s);
    std::string row;
    while (std::getline(rs, row, ';')) {
        std::vector<cplx> r;
        std::size_t i = 0;
        while (i < row.size()) {
            if (std::isspace(static_cast<unsigned char>(row[i])) || row[i] == ',') {
                ++i;
                continue;
            }
            if (row[i] == '(') {
                const auto close = row.find(')', i);
                if (close == std::string::npos) throw ConfigError("matrix: unbalanced '('");
                const std::string in = row.substr(i + 1, close - i - 1);
                const auto comma = in.find(',');
                if (comma == std::string::npos) throw ConfigError("matrix: complex entry needs (re,im)");
                r.emplace_back(to_double("matrix", trim(in.substr(0, comma))),
                               to_double("matrix", trim(in.substr(comma + 1))));
                i = close + 1;
            } else {
                std::size_t j = i;
                while (j < row.size() && !std::isspace(static_cast<unsigned char>(row[j])) && row[j] != ',') ++j;
                r.emplace_back(to_double("matrix", row.substr(i, j - i)), 0.0);
                i = j;
            }
        }
        if (!r.empty()) rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError("matrix is empty");
    const std::size_t n = rows.size();
    MatC m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw ConfigError("matrix must be square");
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::string format_matrix(const MatC& m) {
    std::string s;
    for (int i = 0; i < m.rows(); ++i) {
        if (i) s += "; ";
        for (int j = 0; j < m.cols(); ++j) {
            if (j) s += " ";
            const cplx x = m(i, j);
            s += x.imag() == 0.0 ? fmt(x.real()) : "(" + fmt(x.real()) + "," + fmt(x.imag()) + ")";
        }
    }
    return s;
}

PerturbationSpec ExperimentConfig::spec(double coupling) const {
    PerturbationSpec s;
    s.n = spin_count();
    s.transverse = transverse;
    s.m12 = m12;
    s.axial = axial;
    s.delta = delta;
    s.matrix_profile = matrix.size() ? matrix : MatC::Identity(s.n, s.n);
    s.coupling = coupling;
    return s;
}

LawParams ExperimentConfig::law_params() const {
    LawParams p;
    p.b0 = b0;
    std::string l = law;
    if (l == "auto") {
        switch (transverse.kind) {
            case ProfileKind::Power: l = "power"; break;
            case ProfileKind::Bump:
            case ProfileKind::Indicator: l = "compact"; break;
            default: l = "quasi_exp";
        }
    }
    if (l == "power") {
        p.law = CountingLaw::Power;
        if (transverse.kind != ProfileKind::Power) throw ConfigError("power law needs a power transverse profile");
        p.alpha = transverse.alpha;
        p.u0_integral = power_u0_integral(transverse);
        p.scale = transverse.amplitude;
    } else if (l == "compact") {
        p.law = CountingLaw::Compact;
    } else {
        p.law = CountingLaw::QuasiExp;
        if (transverse.kind == ProfileKind::Gaussian) {
            p.beta = transverse.beta;
            p.mu = transverse.mu;
        } else if (transverse.kind == ProfileKind::Exponential) {
            // exp(-rate r) = exp(-rate |x|^{2 * 1/2})
            p.beta = 0.5;
            p.mu = transverse.rate;
        } else {
            throw ConfigError("quasi_exp law needs a gaussian or exponential transverse profile");
        }
    }
    return p;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    const bool mat = matrix.size() == o.matrix.size() && (matrix.size() == 0 || matrix == o.matrix);
    return b0 == o.b0 && flavor == o.flavor && mass == o.mass && n == o.n && same_profile(transverse, o.transverse) &&
           m12 == o.m12 && same_profile(axial, o.axial) && delta == o.delta && mat && couplings == o.couplings &&
           radii_fraction == o.radii_fraction && r_in == o.r_in && r_out == o.r_out && annuli == o.annuli &&
           sector_theta == o.sector_theta && sector_ratio == o.sector_ratio &&
           annulus_constant == o.annulus_constant && l_max == o.l_max && q_max == o.q_max && grid == o.grid &&
           quad_tol == o.quad_tol && law == o.law && s_min == o.s_min && s_max == o.s_max &&
           samples == o.samples && output == o.output && tag == o.tag && seed == o.seed;
}

void apply_override(ExperimentConfig& c, const std::string& key, const std::string& v) {
    if (key == "b0") c.b0 = to_double(key, v);
    else if (key == "flavor") c.flavor = flavor_from_string(v);
    else if (key == "mass") c.mass = to_double(key, v);
    else if (key == "n") c.n = to_int(key, v);
    else if (key == "m12") c.m12 = to_double(key, v);
    else if (key == "delta") c.delta = to_double(key, v);
    else if (key == "matrix") c.matrix = parse_matrix(v);
    else if (key == "transverse" || key == "axial") {
        Profile& p = key == "transverse" ? c.transverse : c.axial;
        try {
            p.kind = profile_kind_from_string(v);
        } catch (const Error&) {
            throw ConfigError("unknown profile '" + v + "'");
        }
    } else if (key.rfind("transverse.", 0) == 0) set_profile_param(c.transverse, key, key.substr(11), v);
    else if (key.rfind("axial.", 0) == 0) set_profile_param(c.axial, key, key.substr(6), v);
    else if (key == "couplings") c.couplings = to_list(key, v);
    else if (key == "radii.fraction") c.radii_fraction = to_double(key, v);
    else if (key == "scan.r_in") c.r_in = to_double(key, v);
    else if (key == "scan.r_out") c.r_out = to_double(key, v);
    else if (key == "scan.annuli") c.annuli = to_list(key, v);
    else if (key == "check.sector_theta") c.sector_theta = to_double(key, v);
    else if (key == "check.sector_ratio") c.sector_ratio = to_double(key, v);
    else if (key == "check.annulus_constant") c.annulus_constant = to_double(key, v);
    else if (key == "solver.l_max") c.l_max = to_int(key, v);
    else if (key == "solver.q_max") c.q_max = to_int(key, v);
    else if (key == "solver.grid") c.grid = to_int(key, v);
    else if (key == "solver.quad_tol") c.quad_tol = to_double(key, v);
    else if (key == "toeplitz.law") c.law = v;
    else if (key == "toeplitz.s_min") c.s_min = to_double(key, v);
    else if (key == "toeplitz.s_max") c.s_max = to_double(key, v);
    else if (key == "toeplitz.samples") c.samples = to_int(key, v);
    else if (key == "output") c.output = v;
    else if (key == "tag") c.tag = v;
    else if (key == "seed") c.seed = to_int(key, v);
    else throw ConfigError("unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::stringstream ss(text);
    std::string line;
    int no = 0;
    while (std::getline(ss, line)) {
        ++no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(no) + ": empty key");
        apply_override(c, key, value);
    }
    check(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "b0 = " << fmt(c.b0) << "\n";
    os << "flavor = " << to_string(c.flavor) << "\n";
    os << "mass = " << fmt(c.mass) << "\n";
    os << "n = " << c.n << "\n";
    write_profile(os, "transverse", c.transverse);
    os << "m12 = " << fmt(c.m12) << "\n";
    write_profile(os, "axial", c.axial);
    os << "delta = " << fmt(c.delta) << "\n";
    if (c.matrix.size()) os << "matrix = " << format_matrix(c.matrix) << "\n";
    os << "couplings = " << list(c.couplings) << "\n";
    os << "radii.fraction = " << fmt(c.radii_fraction) << "\n";
    os << "scan.r_in = " << fmt(c.r_in) << "\n";
    os << "scan.r_out = " << fmt(c.r_out) << "\n";
    if (!c.annuli.empty()) os << "scan.annuli = " << list(c.annuli) << "\n";
    os << "check.sector_theta = " << fmt(c.sector_theta) << "\n";
    os << "check.sector_ratio = " << fmt(c.sector_ratio) << "\n";
    os << "check.annulus_constant = " << fmt(c.annulus_constant) << "\n";
    os << "solver.l_max = " << c.l_max << "\n";
    os << "solver.q_max = " << c.q_max << "\n";
    os << "solver.grid = " << c.grid << "\n";
    os << "solver.quad_tol = " << fmt(c.quad_tol) << "\n";
    os << "toeplitz.law = " << c.law << "\n";
    os << "toeplitz.s_min = " << fmt(c.s_min) << "\n";
    os << "toeplitz.s_max = " << fmt(c.s_max) << "\n";
    os << "toeplitz.samples = " << c.samples << "\n";
    os << "output = " << c.output << "\n";
    os << "tag = " << c.tag << "\n";
    os << "seed = " << c.seed << "\n";
    return os.str();
}

}  // namespace bsres
