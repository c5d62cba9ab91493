#include <doctest.h>

#include <cmath>
#include <random>

#include "hwdd/tensor.hpp"

using namespace hwdd;

namespace {

SymTensor3 randomSym(std::mt19937_64& rng, double scale) {
    auto u = [&] { return (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) * 2.0 * scale; };
    SymTensor3 t;
    for (int i = 0; i < 6; ++i) t[i] = u();
    return t;
}

}  // namespace

TEST_CASE("invariants of a uniaxial stress") {
    const SymTensor3 sigma = SymTensor3::diagonal(3e8, 0.0, 0.0);
    const StressInvariants inv = invariants(sigma);
    CHECK(inv.J1 == doctest::Approx(3e8).epsilon(1e-14));
    CHECK(inv.J2 == doctest::Approx(3e16).epsilon(1e-12));
    CHECK(inv.J3 == doctest::Approx(2e24).epsilon(1e-12));
}

TEST_CASE("invariants of hydrostatic and pure-shear states") {
    const SymTensor3 hydro = 2.5e7 * SymTensor3::identity();
    const StressInvariants invH = invariants(hydro);
    CHECK(std::abs(invH.J2) <= 1e-9 * 2.5e7 * 2.5e7);
    CHECK(std::abs(invH.J3) <= 1e-3);

    SymTensor3 shear;
    shear[kSym23] = 4e7;
    const StressInvariants invS = invariants(shear);
    CHECK(invS.J2 == doctest::Approx(16e14).epsilon(1e-13));
    CHECK(std::abs(invS.J3) <= 1e-9 * std::pow(4e7, 3));
}

TEST_CASE("Haigh-Westergaard coordinates on the meridians") {
    // Uniaxial tension: theta = 0, rho = sqrt(2/3) sigma.
    const double s = 2.2e8;
    const HWCoords tension = haighWestergaard(SymTensor3::diagonal(s, 0.0, 0.0));
    CHECK(tension.rho == doctest::Approx(std::sqrt(2.0 / 3.0) * s).epsilon(1e-13));
    CHECK(tension.theta == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(!tension.degenerate);

    // Uniaxial compression: theta = pi/3. The arccos has square-root
    // sensitivity at the sector corners, so ~1e-8 is the attainable accuracy.
    const HWCoords compression = haighWestergaard(SymTensor3::diagonal(-s, 0.0, 0.0));
    CHECK(std::abs(compression.theta - M_PI / 3.0) <= 1e-7);

    // Pure shear: J3 = 0 so theta = pi/6.
    SymTensor3 shear;
    shear[kSym23] = 5e7;
    CHECK(haighWestergaard(shear).theta == doctest::Approx(M_PI / 6.0).epsilon(1e-12));
}

TEST_CASE("degenerate Lode angle is flagged, not thrown") {
    const HWCoords hw = haighWestergaard(1e8 * SymTensor3::identity());
    CHECK(hw.degenerate);
    CHECK(hw.theta == 0.0);
    CHECK(hw.rho == 0.0);
    CHECK(hw.xi == doctest::Approx(std::sqrt(3.0) * 1e8).epsilon(1e-14));
}

TEST_CASE("principal reconstruction from HW coordinates") {
    SUBCASE("hydrostatic") {
        const auto p = reconstructPrincipal({std::sqrt(3.0) * 1e8, 0.0, 0.0, false});
        for (const double v : p) CHECK(v == doctest::Approx(1e8).epsilon(1e-13));
    }
    SUBCASE("uniaxial deviator") {
        const double s = 3e8;
        const auto p = reconstructPrincipal({0.0, std::sqrt(2.0 / 3.0) * s, 0.0, false});
        CHECK(p[0] == doctest::Approx(2.0 * s / 3.0).epsilon(1e-13));
        CHECK(p[1] == doctest::Approx(-s / 3.0).epsilon(1e-13));
        CHECK(p[2] == doctest::Approx(-s / 3.0).epsilon(1e-13));
    }
}

TEST_CASE("HW round trip against the eigenvalue solver") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        const SymTensor3 sigma = randomSym(rng, 1e8);
        const PrincipalFrame frame = principalFrame(sigma);
        // Skip (nearly) repeated eigenvalues; the map to theta is still fine
        // but comparing sorted eigenvalues is the point here.
        if (frame.values[0] - frame.values[1] < 1e-3 ||
            frame.values[1] - frame.values[2] < 1e-3)
            continue;
        const HWCoords hw = haighWestergaard(sigma);
        const auto rec = reconstructPrincipal(hw);
        const double scale = std::abs(frame.values[0]) + std::abs(frame.values[2]);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(rec[i] - frame.values[i]) <= 1e-10 * scale);
    }
}

TEST_CASE("principal frame reconstructs and is orthogonal") {
    SUBCASE("sorted diagonal tensor") {
        const PrincipalFrame f = principalFrame(SymTensor3::diagonal(3.0, 2.0, 1.0));
        CHECK(f.values[0] == doctest::Approx(3.0));
        CHECK(f.values[1] == doctest::Approx(2.0));
        CHECK(f.values[2] == doctest::Approx(1.0));
        // Any signed permutation with unit determinant is fine; columns must
        // be the coordinate axes here.
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs(f.rotation.col(c).cwiseAbs().maxCoeff() - 1.0) <= 1e-12);
    }
    SUBCASE("pure shear eigenvalues") {
        SymTensor3 shear;
        shear[kSym23] = 7e6;
        const PrincipalFrame f = principalFrame(shear);
        CHECK(f.values[0] == doctest::Approx(7e6).epsilon(1e-12));
        CHECK(f.values[1] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(f.values[2] == doctest::Approx(-7e6).epsilon(1e-12));
    }
    SUBCASE("random reconstruction") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 200; ++trial) {
            const SymTensor3 sigma = randomSym(rng, 1e8);
            const PrincipalFrame f = principalFrame(sigma);
            Eigen::Matrix3d rec = f.rotation *
                                  Eigen::Vector3d(f.values[0], f.values[1], f.values[2])
                                      .asDiagonal() *
                                  f.rotation.inverse();
            CHECK((rec - sigma.full()).norm() <= 1e-10 * sigma.full().norm());
            CHECK(std::abs(std::abs(f.rotation.determinant()) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("deviator properties") {
    CHECK((1e8 * SymTensor3::identity()).deviator().norm() <= 1e-6);
    const SymTensor3 uni = SymTensor3::diagonal(3e8, 0.0, 0.0);
    const SymTensor3 dev = uni.deviator();
    CHECK(dev[kSym11] == doctest::Approx(2e8).epsilon(1e-14));
    CHECK(dev[kSym22] == doctest::Approx(-1e8).epsilon(1e-14));
    CHECK(std::abs(dev.trace()) <= 1e-12 * uni.norm());
    // Idempotence.
    CHECK((dev.deviator() - dev).norm() <= 1e-12 * dev.norm());
}

TEST_CASE("Frobenius norm counts off-diagonals twice") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const SymTensor3 t = randomSym(rng, 2.0);
        CHECK(t.norm() == doctest::Approx(t.full().norm()).epsilon(1e-13));
    }
}

TEST_CASE("Voigt contraction identity and round trip") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const SymTensor3 sigma = randomSym(rng, 1e8);
        const SymTensor3 eps = randomSym(rng, 1e-3);
        const double direct = sigma.ddot(eps);
        const double viaVoigt = toVoigtStress(sigma).dot(toVoigtStrain(eps));
        CHECK(std::abs(direct - viaVoigt) <= 1e-12 * std::abs(direct) + 1e-30);
        CHECK((fromVoigtStress(toVoigtStress(sigma)) - sigma).norm() == 0.0);
        CHECK((fromVoigtStrain(toVoigtStrain(eps)) - eps).norm() == 0.0);
        CHECK(std::abs(toMandel(sigma).dot(toMandel(eps)) - direct) <=
              1e-12 * std::abs(direct) + 1e-30);
    }
}

TEST_CASE("fourth-rank helpers behave like their definitions") {
    std::mt19937_64 rng(5);
    const SymTensor3 a = randomSym(rng, 2.0);
    const SymTensor3 b = randomSym(rng, 2.0);
    const SymTensor3 t = randomSym(rng, 2.0);

    CHECK((Tensor4::identitySym().apply(t) - t).norm() <= 1e-14 * t.norm());
    CHECK((Tensor4::sphericalOuter().apply(t) - t.trace() * SymTensor3::identity()).norm() <=
          1e-13 * t.norm());
    CHECK((Tensor4::deviatoricProjector().apply(t) - t.deviator()).norm() <= 1e-13 * t.norm());
    CHECK((Tensor4::outer(a, b).apply(t) - b.ddot(t) * a).norm() <= 1e-12 * a.norm() * b.norm() *
                                                                        t.norm());

    // symProduct is the directional derivative of s.s.
    const double h = 1e-7;
    const SymTensor3 splus = SymTensor3::fromFull(((a + h * t).full() * (a + h * t).full()));
    const SymTensor3 sminus = SymTensor3::fromFull(((a - h * t).full() * (a - h * t).full()));
    const SymTensor3 fd = (1.0 / (2.0 * h)) * (splus - sminus);
    CHECK((Tensor4::symProduct(a).apply(t) - fd).norm() <= 1e-6 * fd.norm());

    // Elastic tangent acts like lambda tr(e) I + 2 mu e, and its Voigt matrix
    // reproduces the same action on engineering strain vectors.
    const double lambda = 1.1e9, mu = 0.7e9;
    const Tensor4 cel = elasticTangent(lambda, mu);
    const SymTensor3 viaTensor = cel.apply(t);
    const SymTensor3 expected = lambda * t.trace() * SymTensor3::identity() + 2.0 * mu * t;
    CHECK((viaTensor - expected).norm() <= 1e-12 * expected.norm());
    const SymTensor3 viaVoigt = fromVoigtStress(cel.voigtMatrix() * toVoigtStrain(t));
    CHECK((viaVoigt - expected).norm() <= 1e-12 * expected.norm());
}
