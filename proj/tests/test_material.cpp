#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hhoplast/material/log_strain.hpp"
#include "hhoplast/material/plasticity.hpp"

#include <cmath>
#include <random>

using namespace hhoplast;

namespace {

MaterialParams steel()
{
    MaterialParams mp;
    mp.young = 206900.0;
    mp.poisson = 0.29;
    mp.hardening = 129.2;
    mp.sigma_y0 = 450.0;
    mp.sigma_yinf = 715.0;
    mp.saturation = 16.93;
    return mp;
}

MaterialParams soft_sphere()
{
    MaterialParams mp;
    mp.young = 28.85;
    mp.poisson = 0.499;
    mp.sigma_y0 = 6.0;
    mp.sigma_yinf = 6.0;
    return mp;
}

Mat3 sym_from(const std::array<double, 6>& v)
{
    Mat3 m;
    m << v[0], v[3], v[5], v[3], v[1], v[4], v[5], v[4], v[2];
    return m;
}

Mat3 random_sym(std::mt19937_64& rng, double amp)
{
    std::uniform_real_distribution<double> u(-amp, amp);
    std::array<double, 6> v;
    for (double& x : v)
        x = u(rng);
    return sym_from(v);
}

Mat3 random_defgrad(std::mt19937_64& rng, double amp)
{
    std::uniform_real_distribution<double> u(-amp, amp);
    while (true) {
        Mat3 f = Mat3::Identity();
        for (int i = 0; i < 3; i++)
            for (int j = 0; j < 3; j++)
                f(i, j) += u(rng);
        if (f.determinant() > 0.2)
            return f;
    }
}

} // namespace

TEST_CASE("yield curve reproduces hand-computed values")
{
    const MaterialParams mp = steel();
    CHECK(yield_radius(mp, 0.0) == doctest::Approx(450.0).epsilon(1e-14));
    CHECK(yield_radius(mp, 0.01) == doctest::Approx(492.56426899075836).epsilon(1e-14));
    CHECK(yield_radius(mp, 0.05) == doctest::Approx(607.7979211262623).epsilon(1e-14));
    CHECK(yield_radius(mp, 0.2) == doctest::Approx(731.8713978663261).epsilon(1e-14));
    CHECK(yield_radius_slope(mp, 0.0) == doctest::Approx(4615.65).epsilon(1e-14));
    CHECK(yield_radius_slope(mp, 0.01) == doctest::Approx(3916.9104859864597).epsilon(1e-14));
    CHECK(mp.mu() == doctest::Approx(80193.7984496124).epsilon(1e-15));
    CHECK(mp.lambda() == doctest::Approx(110743.81690660758).epsilon(1e-15));
}

TEST_CASE("radial return matches the frozen bisection solutions")
{
    // Reference values from a standalone bisection solver of the consistency
    // equation (200 halvings of [0, q_tr/3mu]); columns: dlambda, p_new, then
    // T_xx T_yy T_zz T_xy T_yz T_xz.
    struct Frozen {
        std::array<double, 6> strain, plastic;
        double p0;
        std::array<double, 8> expect;
    };
    const std::vector<Frozen> cases = {
        { { 0.004, -0.001, -0.001, 0.0005, 0, 0 },
          { 0, 0, 0, 0, 0, 0 },
          0.0,
          { 0.0014843618739628908, 0.0014843618739628908, 628.45749370735859,
            178.39030076536827, 178.39030076536827, 45.006719294199037, 0, 0 } },
        { { 0.010, -0.003, -0.002, 0.002, 0.001, 0 },
          { 0, 0, 0, 0, 0, 0 },
          0.0,
          { 0.006750203699575779, 0.006750203699575779, 1125.7049470236227,
            650.41475347629489, 686.97553759532002, 73.121568238050457,
            36.560784119025229, 0 } },
        { { 0.006, -0.002, -0.001, 0, 0, 0.0015 },
          { 0.002, -0.001, -0.001, 0.0004, 0, 0 },
          0.004,
          { 0.0015695509436561761, 0.0055695509436561761, 760.5739486986339,
            313.98244689932335, 403.30074725918541, -35.727320143944837, 0,
            133.97745053979315 } },
        { { -0.008, 0.003, 0.002, -0.001, 0.0005, 0 },
          { 0.001, -0.0005, -0.0005, 0, 0, 0 },
          0.02,
          { 0.0058492788978066219, 0.025849278897806624, -851.89180597117627,
            -290.52812104597564, -335.43721583999155, -44.90909479401607,
            22.454547397008035, 0 } },
        { { 0.0015, -0.0004, -0.0004, 0.0002, 0, 0 },
          { 0, 0, 0, 0, 0, 0 },
          0.0,
          { 0, 0, 318.10206718346251, 13.365633074935388, 13.365633074935388,
            32.077519379844958, 0, 0 } },
        { { 0.025, -0.010, -0.008, 0.004, -0.002, 0.001 },
          { 0.004, -0.002, -0.002, 0.001, 0, 0 },
          0.05,
          { 0.016544237783448996, 0.066544237783449006, 1562.8792513947233,
            920.57874773982576, 964.87533419878423, 66.444879688437652,
            -44.296586458958473, 22.148293229479236 } },
    };

    const MaterialParams mp = steel();
    for (const Frozen& f : cases) {
        MaterialPointState st;
        st.plastic_strain = sym_from(f.plastic);
        st.eq_plastic_strain = f.p0;
        const SmallStepResult r = small_plasticity(st, Mat3::Zero(), sym_from(f.strain), mp);
        CHECK(r.dlambda == doctest::Approx(f.expect[0]).epsilon(1e-12));
        CHECK(r.state.eq_plastic_strain == doctest::Approx(f.expect[1]).epsilon(1e-12));
        CHECK(r.stress(0, 0) == doctest::Approx(f.expect[2]).epsilon(1e-12));
        CHECK(r.stress(1, 1) == doctest::Approx(f.expect[3]).epsilon(1e-12));
        CHECK(r.stress(2, 2) == doctest::Approx(f.expect[4]).epsilon(1e-12));
        CHECK(r.stress(0, 1) == doctest::Approx(f.expect[5]).epsilon(1e-10));
        CHECK(r.stress(1, 2) == doctest::Approx(f.expect[6]).epsilon(1e-10));
        CHECK(r.stress(0, 2) == doctest::Approx(f.expect[7]).epsilon(1e-10));
    }

    // perfect plasticity at a large stretch (shell material)
    const MaterialParams mps = soft_sphere();
    Mat3 eps;
    eps << 0.5, 0.02, 0, 0.02, -0.24, 0, 0, 0, -0.25;
    const SmallStepResult r = small_plasticity(MaterialPointState {}, Mat3::Zero(), eps, mps);
    CHECK(r.dlambda == doctest::Approx(0.28940318703745516).epsilon(1e-12));
    CHECK(r.stress(0, 0) == doctest::Approx(52.078746846219552).epsilon(1e-12));
    CHECK(r.stress(1, 1) == doctest::Approx(46.125848860576994).epsilon(1e-12));
    CHECK(r.stress(0, 1) == doctest::Approx(0.16088913474709621).epsilon(1e-10));
}

TEST_CASE("radial return satisfies the discrete KKT conditions")
{
    const MaterialParams mp = steel();
    std::mt19937_64 rng(2024);
    const double tol = 1e-10 * mp.sigma_y0;

    for (int h = 0; h < 2000; h++) {
        MaterialPointState st;
        Mat3 strain = Mat3::Zero();
        for (int s = 0; s < 4; s++) {
            const Mat3 dstrain = random_sym(rng, 0.004);
            const SmallStepResult r = small_plasticity(st, strain, dstrain, mp);
            strain += dstrain;

            // yield admissibility and complementarity
            const Mat3 s_dev = dev(r.stress);
            const double q = std::sqrt(1.5) * s_dev.norm();
            const double radius = yield_radius(mp, r.state.eq_plastic_strain);
            CHECK(q <= radius + tol);
            CHECK(r.dlambda >= 0.0);
            if (r.plastic)
                CHECK(std::abs(q - radius) <= tol);
            // internal variable structure
            CHECK(std::abs(r.state.plastic_strain.trace()) < 1e-12);
            CHECK(r.state.eq_plastic_strain >= st.eq_plastic_strain - 1e-15);
            CHECK(r.state.eq_plastic_strain
                  == doctest::Approx(st.eq_plastic_strain + r.dlambda).epsilon(1e-12));
            st = r.state;
        }
    }
}

TEST_CASE("return map is a function of the total strain only")
{
    const MaterialParams mp = steel();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; i++) {
        MaterialPointState st;
        st.plastic_strain = dev(random_sym(rng, 0.002));
        st.eq_plastic_strain = std::abs(random_sym(rng, 0.01)(0, 0));
        const Mat3 a = random_sym(rng, 0.004), b = random_sym(rng, 0.004);
        const SmallStepResult r1 = small_plasticity(st, a, b, mp);
        const SmallStepResult r2 = small_plasticity(st, Mat3::Zero(), a + b, mp);
        CHECK((r1.stress - r2.stress).norm() <= 1e-12 * (1.0 + r2.stress.norm()));
        CHECK(r1.dlambda == doctest::Approx(r2.dlambda).epsilon(1e-10));
    }
}

TEST_CASE("algorithmic modulus differentiates the return map")
{
    const MaterialParams mp = steel();
    std::mt19937_64 rng(99);
    const double h = 1e-7;

    int plastic_seen = 0;
    for (int i = 0; i < 40; i++) {
        MaterialPointState st;
        if (i % 2) {
            st.plastic_strain = dev(random_sym(rng, 0.003));
            st.eq_plastic_strain = 0.01 * (i % 5);
        }
        const Mat3 strain = random_sym(rng, 0.006);
        const SmallStepResult r0 = small_plasticity(st, Mat3::Zero(), strain, mp);
        plastic_seen += r0.plastic ? 1 : 0;

        Mat9 fd = Mat9::Zero();
        for (int a = 0; a < 3; a++)
            for (int b = 0; b < 3; b++) {
                Mat3 de = Mat3::Zero();
                de(a, b) = de(b, a) = 0.5 * h; // symmetrized perturbation
                if (a == b)
                    de(a, b) = h;
                const Mat3 tp = small_plasticity(st, Mat3::Zero(), strain + de, mp).stress;
                const Mat3 tm = small_plasticity(st, Mat3::Zero(), strain - de, mp).stress;
                fd.col(vec_index(a, b)) = to_vec9((tp - tm) / (2.0 * h));
                if (a != b)
                    fd.col(vec_index(b, a)) = fd.col(vec_index(a, b));
            }
        CHECK((r0.tangent - fd).norm() <= 2e-5 * fd.norm());
    }
    CHECK(plastic_seen > 10);
}

TEST_CASE("log strain of a pure stretch is the log of the stretches")
{
    const Mat3 f = Eigen::Vector3d(1.3, 0.8, 1.0).asDiagonal();
    const LogStrain kin(f);
    CHECK(kin.strain()(0, 0) == doctest::Approx(std::log(1.3)).epsilon(1e-14));
    CHECK(kin.strain()(1, 1) == doctest::Approx(std::log(0.8)).epsilon(1e-14));
    CHECK(kin.strain()(2, 2) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(kin.strain()(0, 1) == doctest::Approx(0.0).epsilon(1e-14));

    // rotations produce zero strain
    const double a = 0.7;
    Mat3 rot;
    rot << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    CHECK(LogStrain(rot).strain().norm() <= 1e-14);
}

TEST_CASE("non-positive determinant is rejected")
{
    Mat3 f = Mat3::Identity();
    f(0, 0) = -0.5;
    CHECK_THROWS_AS(LogStrain{ f }, StepRejection);
    f(0, 0) = 0.0;
    CHECK_THROWS_AS(LogStrain{ f }, StepRejection);
}

TEST_CASE("strain derivative matches central differences")
{
    std::mt19937_64 rng(4321);
    const double h = 1e-6;

    auto check_one = [&](const Mat3& f) {
        const LogStrain kin(f);
        const Mat9& de = kin.strain_derivative();
        Mat9 fd;
        for (int a = 0; a < 3; a++)
            for (int b = 0; b < 3; b++) {
                Mat3 dp = f, dm = f;
                dp(a, b) += h;
                dm(a, b) -= h;
                fd.col(vec_index(a, b))
                    = to_vec9((LogStrain(dp).strain() - LogStrain(dm).strain()) / (2.0 * h));
            }
        CHECK((de - fd).norm() <= 1e-6 * fd.norm());
    };

    for (int i = 0; i < 60; i++)
        check_one(random_defgrad(rng, 0.35));

    // coalescent and near-coalescent principal stretches
    check_one(Mat3::Identity());
    check_one(1.2 * Mat3::Identity());
    for (int i = 0; i < 20; i++) {
        const Mat3 q = Eigen::Quaterniond::UnitRandom().toRotationMatrix();
        const double s = 0.9 + 0.01 * i;
        Vec3 sv(s, std::sqrt(s * s + 1e-7), 1.4);
        const Mat3 f = q * sv.asDiagonal() * q.transpose();
        check_one(f);
    }
}

TEST_CASE("stress-weighted second derivative matches central differences")
{
    std::mt19937_64 rng(777);
    const double h = 1e-5;

    for (int i = 0; i < 40; i++) {
        const Mat3 f = random_defgrad(rng, 0.3);
        const Mat3 t = 400.0 * random_sym(rng, 1.0);
        const LogStrain kin(f);
        const Mat9 d2 = kin.stress_second_derivative(t);

        // FD of g(F) = dE/dF^t : T = P(F)
        Mat9 fd;
        for (int a = 0; a < 3; a++)
            for (int b = 0; b < 3; b++) {
                Mat3 dp = f, dm = f;
                dp(a, b) += h;
                dm(a, b) -= h;
                const Mat3 gp = LogStrain(dp).pull_back_stress(t);
                const Mat3 gm = LogStrain(dm).pull_back_stress(t);
                fd.col(vec_index(a, b)) = to_vec9((gp - gm) / (2.0 * h));
            }
        CHECK((d2 - fd).norm() <= 2e-5 * fd.norm());
        CHECK((d2 - d2.transpose()).norm() <= 1e-10 * d2.norm());
    }
}

TEST_CASE("nominal tangent matches central differences of the Piola stress")
{
    const MaterialParams mp = steel();
    std::mt19937_64 rng(31);
    const double h = 1e-6;

    int plastic_seen = 0;
    for (int i = 0; i < 30; i++) {
        const Mat3 f_old = random_defgrad(rng, 0.002);
        const Mat3 f = f_old + random_defgrad(rng, 0.004) - Mat3::Identity();
        MaterialPointState st;
        const FiniteStepResult r = finite_plasticity(st, f_old, f, mp);
        plastic_seen += r.plastic ? 1 : 0;

        Mat9 fd;
        for (int a = 0; a < 3; a++)
            for (int b = 0; b < 3; b++) {
                Mat3 dp = f, dm = f;
                dp(a, b) += h;
                dm(a, b) -= h;
                fd.col(vec_index(a, b)) = to_vec9(
                    (finite_plasticity(st, f_old, dp, mp).piola
                     - finite_plasticity(st, f_old, dm, mp).piola)
                    / (2.0 * h));
            }
        CHECK((r.nominal_tangent - fd).norm() <= 5e-5 * fd.norm());
        CHECK((r.nominal_tangent - r.nominal_tangent.transpose()).norm()
              <= 1e-9 * r.nominal_tangent.norm());
    }
    CHECK(plastic_seen > 5);
}

TEST_CASE("energy densities differentiate to stress and yield radius")
{
    const MaterialParams mp = steel();
    std::mt19937_64 rng(555);
    const double h = 1e-7;

    for (int i = 0; i < 20; i++) {
        const Mat3 e = random_sym(rng, 0.01);
        const Mat3 t = apply_elastic(mp, e);
        for (int a = 0; a < 3; a++)
            for (int b = a; b < 3; b++) {
                Mat3 de = Mat3::Zero();
                de(a, b) = de(b, a) = (a == b) ? h : 0.5 * h;
                const double fd
                    = (elastic_energy(mp, e + de) - elastic_energy(mp, e - de)) / (2.0 * h);
                CHECK(fd == doctest::Approx(t(a, b)).epsilon(2e-5));
            }
    }
    for (double p : { 0.001, 0.01, 0.1, 0.5 }) {
        const double fd = (plastic_energy(mp, p + h) - plastic_energy(mp, p - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(yield_radius(mp, p)).epsilon(1e-8));
    }
    CHECK(plastic_energy(mp, 0.0) == 0.0);
    CHECK(elastic_energy(mp, Mat3::Zero()) == 0.0);
}

TEST_CASE("parameter validation rejects non-physical inputs")
{
    MaterialParams mp = steel();
    CHECK_NOTHROW(mp.validate());

    MaterialParams bad = mp;
    bad.young = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = mp;
    bad.poisson = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = mp;
    bad.sigma_y0 = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = mp;
    bad.sigma_yinf = 100.0; // below sigma_y0
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = mp;
    bad.hardening = -5.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("divided differences of the half-log are stable")
{
    // generic, confluent and nearly-confluent arguments against closed forms
    CHECK(log_divided_difference(4.0, 1.0, 1e-8)
          == doctest::Approx(0.5 * std::log(4.0) / 3.0).epsilon(1e-14));
    CHECK(log_divided_difference(2.0, 2.0, 1e-8) == doctest::Approx(0.25).epsilon(1e-14));
    const double a = 2.0, b = 2.0 * (1.0 + 1e-9);
    CHECK(log_divided_difference(a, b, 1e-8) == doctest::Approx(0.25).epsilon(1e-7));
    CHECK(log_divided_difference2(1.0, 1.0, 1.0, 1e-8)
          == doctest::Approx(-0.25).epsilon(1e-12)); // f''(1)/2 with f = 1/2 ln
}
