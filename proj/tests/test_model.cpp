#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bsres/errors.hpp"
#include "bsres/model.hpp"

using namespace bsres;

namespace {

PerturbationSpec pauli_spec(Profile axial, double delta = 1.0) {
    PerturbationSpec s;
    s.n = 2;
    s.transverse = Profile::gaussian(0.5);
    s.m12 = 2.0;
    s.axial = axial;
    s.delta = delta;
    s.matrix_profile = MatC::Identity(2, 2);
    return s;
}

// plain composite Simpson on [a, b]
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("magnetic model zeta") {
    const auto m = MagneticModel::constant(1.5);
    CHECK(m.zeta == doctest::Approx(3.0));
    CHECK(m.osc_phi_tilde == 0.0);
    CHECK(m.constant_field());

    const auto p = MagneticModel::perturbed(1.0, [](double x, double y) { return 0.25 * std::exp(-(x * x + y * y)); });
    CHECK(p.osc_phi_tilde == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(p.zeta == 2.0 * std::exp(-2.0 * p.osc_phi_tilde));
    CHECK_FALSE(p.constant_field());
}

TEST_CASE("catalog profiles") {
    CHECK(Profile::power(2.0).radial(1.0) == doctest::Approx(0.5));
    CHECK(Profile::gaussian(0.5).radial(2.0) == doctest::Approx(std::exp(-2.0)));
    CHECK(Profile::gaussian(1.0, 0.5).radial(4.0) == doctest::Approx(std::exp(-4.0)));
    CHECK(Profile::indicator(1.0).radial(0.999) == 1.0);
    CHECK(Profile::indicator(1.0).radial(1.001) == 0.0);
    CHECK(Profile::bump(1.0).radial(1.0) == 0.0);
    CHECK(Profile::bump(1.0).radial(0.0) > 0.0);
    CHECK(Profile::exponential(2.0).axial(-1.0) == doctest::Approx(std::exp(-2.0)));
    const Profile a = Profile::power(2.0, 1.0, 0.5);
    CHECK_FALSE(a.is_radial());
    CHECK(a(1.0, 0.0) == doctest::Approx(0.5 * 1.5));
    for (auto p : {Profile::power(3.0, 2.0, 0.2), Profile::gaussian(0.3, 0.7), Profile::bump(1.5)}) {
        const Profile q = Profile::from_json(p.to_json());
        CHECK(q.radial(0.7) == p.radial(0.7));
        CHECK(q(0.3, 0.4) == p(0.3, 0.4));
    }
}

TEST_CASE("validate_hypothesis examples") {
    const SampleGrid g = SampleGrid::standard(1.0);

    SUBCASE("exponential axial decay accepted, C <= e^2") {
        const auto r = validate_hypothesis(pauli_spec(Profile::exponential(2.0)), g);
        CHECK(r.accepted);
        CHECK(r.c_axial <= std::exp(2.0) * (1 + 1e-12));
        CHECK(r.c_axial == doctest::Approx(std::exp(2.0)));
    }
    SUBCASE("polynomial axial decay rejected") {
        for (double delta : {0.05, 1.0, 3.0}) {
            const auto r = validate_hypothesis(pauli_spec(Profile::power(2.0), delta), SampleGrid::standard(delta));
            CHECK_FALSE(r.accepted);
            CHECK_FALSE(r.axial_bound_ok);
        }
    }
    SUBCASE("non-Hermitian matrix rejected") {
        auto s = pauli_spec(Profile::exponential(2.0));
        s.matrix_profile << 0, 1, -1, 0;
        CHECK_THROWS_AS(validate_hypothesis(s, g), ValidationError);
    }
    SUBCASE("bad decay parameters rejected") {
        auto s = pauli_spec(Profile::exponential(2.0));
        s.delta = 0.0;
        CHECK_THROWS_AS(validate_hypothesis(s, g), ValidationError);
        s.delta = 1.0;
        s.m12 = -1.0;
        CHECK_THROWS_AS(validate_hypothesis(s, g), ValidationError);
    }
    SUBCASE("transverse decay slower than m12 rejected") {
        auto s = pauli_spec(Profile::exponential(2.0));
        s.transverse = Profile::power(1.0);
        s.m12 = 2.0;
        CHECK_FALSE(validate_hypothesis(s, g).transverse_bound_ok);
        s.m12 = 1.0;
        CHECK(validate_hypothesis(s, g).transverse_bound_ok);
    }
}

TEST_CASE("effective_weight examples") {
    SUBCASE("exp(-2|x|) integrates to 1") {
        const auto w = effective_weight(pauli_spec(Profile::exponential(2.0)), WeightComponent::Plus);
        CHECK(w.factor == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(w(0.3, 0.1) == doctest::Approx(Profile::gaussian(0.5)(0.3, 0.1)));
    }
    SUBCASE("M11 = 0 gives zero") {
        auto s = pauli_spec(Profile::exponential(2.0));
        s.matrix_profile << 0, 0, 0, 1;
        CHECK(effective_weight(s, WeightComponent::Plus).factor == 0.0);
    }
    SUBCASE("indicator of [-1, 1] gives 2") {
        const auto w = effective_weight(pauli_spec(Profile::indicator(1.0)), WeightComponent::Plus);
        CHECK(w.factor == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("minus needs n = 4") {
        CHECK_THROWS_AS(effective_weight(pauli_spec(Profile::exponential(2.0)), WeightComponent::Minus), FlavorError);
        auto s = pauli_spec(Profile::exponential(2.0));
        s.n = 4;
        s.matrix_profile = MatC::Zero(4, 4);
        s.matrix_profile(2, 2) = -3.0;
        CHECK(effective_weight(s, WeightComponent::Minus).factor == doctest::Approx(3.0));
        CHECK(effective_weight(s, WeightComponent::Plus).factor == 0.0);
    }
    SUBCASE("conventions agree for diagonal M and differ otherwise") {
        auto s = pauli_spec(Profile::exponential(2.0));
        s.matrix_profile << 0, 1, 1, 0;
        CHECK(effective_weight(s, WeightComponent::Plus, 1e-10, WeightConvention::EntryAbs).factor == 0.0);
        CHECK(effective_weight(s, WeightComponent::Plus, 1e-10, WeightConvention::AbsEntry).factor ==
              doctest::Approx(1.0));
    }
}

TEST_CASE("effective_weight is homogeneous in the axial amplitude") {
    for (double c : {0.1, 2.0, 37.5}) {
        for (auto ax : {Profile::exponential(2.0), Profile::gaussian(1.3), Profile::bump(2.0)}) {
            auto s = pauli_spec(ax);
            const double w1 = effective_weight(s, WeightComponent::Plus).factor;
            s.axial.amplitude *= c;
            const double wc = effective_weight(s, WeightComponent::Plus).factor;
            CHECK(std::abs(wc - c * w1) <= 1e-12 * c * w1);
        }
    }
}

TEST_CASE("axial integrals against an independent Simpson rule") {
    for (auto ax : {Profile::gaussian(1.0), Profile::gaussian(0.5, 0.75), Profile::bump(1.5), Profile::exponential(3.0)}) {
        const auto s = pauli_spec(ax);
        const double ref = 2.0 * simpson([&](double x) { return std::abs(ax.axial(x)); }, 0.0, 40.0, 400000);
        CHECK(s.integral_abs_axial() == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("W bound from the reported constants") {
    auto s = pauli_spec(Profile::exponential(2.0));
    s.transverse = Profile::power(3.0);
    s.m12 = 3.0;
    const auto r = validate_hypothesis(s, SampleGrid::standard(1.0));
    REQUIRE(r.accepted);
    // int exp(-2 delta <x>) dx
    const double ax = 2.0 * simpson([](double x) { return std::exp(-2.0 * std::sqrt(1.0 + x * x)); }, 0.0, 40.0, 20000);
    const auto w = effective_weight(s, WeightComponent::Plus);
    for (double x : {0.0, 0.5, 3.0, 20.0, 45.0})
        CHECK(w.radial(x) <= r.c_transverse * std::pow(1.0 + x * x, -1.5) * r.c_axial * ax * (1 + 1e-9));
}

TEST_CASE("domain radii") {
    const auto s = pauli_spec(Profile::exponential(2.0));
    const auto m = MagneticModel::constant(1.0);
    CHECK(DomainRadii::pauli_bound(1.0, 2.0) == doctest::Approx(1.0));
    CHECK(DomainRadii::pauli_bound(3.0, 2.0) == doctest::Approx(std::sqrt(2.0)));
    const double mu = std::sqrt(1.0 + 2.0) + 1.0;
    CHECK(DomainRadii::dirac_bound(1.0, 2.0, 1.0) == doctest::Approx(std::min(0.25, std::sqrt(1.0 - 2.0 / mu))));
    const auto d = DomainRadii::admissible(s, m, 1.0, 0.9);
    CHECK_NOTHROW(d.check(s, m));
    DomainRadii bad = d;
    bad.epsilon = 1.5;
    CHECK_THROWS_AS(bad.check(s, m), ValidationError);
}

TEST_CASE("hermitian helpers") {
    MatC m(2, 2);
    m << 1, cplx(0, 2), cplx(0, -2), -1;
    CHECK(is_hermitian(m));
    const MatC a = hermitian_abs(m), s = hermitian_sqrt_abs(m), j = hermitian_sign(m);
    CHECK((s * s - a).norm() < 1e-13);
    CHECK((s * j * s - m).norm() < 1e-13);
    CHECK((a * a - m * m).norm() < 1e-12);
}
