#include "oamqw/core.hpp"
#include "oamqw/errors.hpp"
#include "oamqw/walk.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace oamqw;
using oracle::I;

namespace {

double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// State with random amplitudes on [lo, hi] inside a wider window.
WalkState random_state(std::mt19937_64& rng, int lo, int hi, int m_min, int m_max) {
    std::normal_distribution<double> g;
    WalkState s(m_min, m_max);
    double n2 = 0.0;
    for (int m = lo; m <= hi; ++m) {
        const cplx a{g(rng), g(rng)};
        const cplx b{g(rng), g(rng)};
        s.set(Pol::L, m, a);
        s.set(Pol::R, m, b);
        n2 += std::norm(a) + std::norm(b);
    }
    return WalkState::from_vector(s.to_vector() / std::sqrt(n2), m_min, m_max);
}

}  // namespace

TEST_CASE("waveplate matrices agree with linear-basis Jones calculus") {
    for (double g : {0.0, 0.3, pi / 2.0, 2.0, pi, 5.5}) {
        for (double th : {0.0, 0.1, pi / 4.0, 1.3, pi / 2.0, 3.0}) {
            const Mat2 m = waveplate_op({g, th}).matrix;
            CHECK(max_diff(m, oracle::waveplate_circular(g, th)) < 1e-14);
            CHECK(max_diff(m.adjoint() * m, Mat2::Identity()) < 1e-14);
        }
    }
}

TEST_CASE("quarter-wave at 45 degrees and half-wave at 0") {
    const double r = 1.0 / std::sqrt(2.0);
    Mat2 qwp;
    qwp << r, -r, r, r;
    CHECK(max_diff(waveplate_op(WaveplateParams::quarter_wave(pi / 4.0)).matrix, qwp) < 1e-15);
    Mat2 hwp;
    hwp << 0.0, -I, -I, 0.0;
    CHECK(max_diff(waveplate_op(WaveplateParams::half_wave(0.0)).matrix, hwp) < 1e-15);
}

TEST_CASE("element parameters are range-checked") {
    CHECK_THROWS_AS(waveplate_op({-0.1, 0.0}), InvalidParameter);
    CHECK_THROWS_AS(waveplate_op({2.0 * pi, 0.0}), InvalidParameter);
    CHECK_THROWS_AS(waveplate_op({1.0, pi}), InvalidParameter);
    CHECK_THROWS_AS(qplate_op({1, 3.2, 0.0}), InvalidParameter);
    CHECK_THROWS_AS(qplate_op({1, -0.01, 0.0}), InvalidParameter);
    CHECK_NOTHROW(qplate_op({1, pi, 0.0}));
    CHECK_NOTHROW(qplate_op({1, 0.0, 0.0}));
}

TEST_CASE("tuned q-plate flips spin and shifts OAM by +-2q") {
    for (double a0 : {0.0, 0.7}) {
        const StepOperator qp = qplate_op({1, pi, a0});
        WalkState l = WalkState::localized({1.0, 0.0}, 0, -3, 3);
        WalkState out = apply(qp, l);
        CHECK(std::abs(out.amp(Pol::R, 1) - (-I * std::exp(2.0 * I * a0))) < 1e-15);
        CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-15));
        WalkState r = WalkState::localized({0.0, 1.0}, 0, -3, 3);
        out = apply(qp, r);
        CHECK(std::abs(out.amp(Pol::L, -1) - (-I * std::exp(-2.0 * I * a0))) < 1e-15);
    }
    // q = 1 moves by two sites.
    WalkState out = apply(qplate_op({2, pi, 0.0}), WalkState::localized({1.0, 0.0}, 0, -3, 3));
    CHECK(std::abs(out.amp(Pol::R, 2)) == doctest::Approx(1.0));
}

TEST_CASE("zero retardation q-plate is the identity") {
    const StepOperator qp = qplate_op({1, 0.0, 0.3});
    CHECK(max_diff(qp.dense(-4, 4), Eigen::MatrixXcd::Identity(18, 18)) < 1e-15);
}

TEST_CASE("banded q-plate matches the dense element formula") {
    for (int tq : {1, -1, 2, 3}) {
        for (double d : {0.0, 0.4, pi / 2.0, pi}) {
            const StepOperator qp = qplate_op({tq, d, 0.37});
            CHECK(max_diff(qp.dense(-6, 6), oracle::dense_qplate(d, tq, 0.37, -6, 6)) < 1e-15);
        }
    }
}

TEST_CASE("then() composes in beam order") {
    const CoinOperator qwp = waveplate_op(WaveplateParams::quarter_wave(pi / 4.0));
    const StepOperator qp = qplate_op({1, 1.1, 0.2});
    const CoinOperator hwp = waveplate_op(WaveplateParams::half_wave(0.3));
    const StepOperator step = compose_step({qwp, qp, hwp});
    const Eigen::MatrixXcd expected = oracle::dense_coin(hwp.matrix, -5, 5) *
                                      oracle::dense_qplate(1.1, 1, 0.2, -5, 5) *
                                      oracle::dense_coin(qwp.matrix, -5, 5);
    // Interior columns are unaffected by the window edge.
    const Eigen::MatrixXcd got = step.dense(-5, 5);
    CHECK(max_diff(got.middleCols(2, 18), expected.middleCols(2, 18)) < 1e-14);
    CHECK(step.min_shift() == -1);
    CHECK(step.max_shift() == 1);
    CHECK(step.elements().size() == 3);

    const StepOperator a = StepOperator::from_coin(qwp).then(qp).then(StepOperator::from_coin(hwp));
    for (int s = -1; s <= 1; ++s) {
        CHECK(max_diff(a.band(s), step.band(s)) < 1e-15);
    }
}

TEST_CASE("default operator is the identity") {
    const StepOperator id;
    CHECK(max_diff(id.dense(-2, 2), Eigen::MatrixXcd::Identity(10, 10)) == 0.0);
    CHECK(max_diff(compose_step({}).dense(-2, 2), Eigen::MatrixXcd::Identity(10, 10)) == 0.0);
}

TEST_CASE("window handling") {
    WalkState s(-2, 2);
    CHECK_THROWS_AS(s.set(Pol::L, 3, 1.0), WindowOverflow);
    CHECK_THROWS_AS(s.add(Pol::R, -3, 0.5), WindowOverflow);
    CHECK_NOTHROW(s.add(Pol::R, -3, 1e-14));
    CHECK(s.amp(Pol::L, 7) == cplx{0.0, 0.0});
    CHECK_THROWS_AS(WalkState(2, 1), InvalidParameter);

    // A walk that outruns its window reports it.
    const StepOperator qp = qplate_op({1, pi, 0.0});
    WalkState edge = WalkState::localized({1.0, 0.0}, 2, -2, 2);
    CHECK_THROWS_AS(apply(qp, edge), WindowOverflow);
    CHECK(default_half_width(4) == 6);
    CHECK(default_half_width(3, 2) == 8);
}

TEST_CASE("vector round trip uses the dense basis order") {
    std::mt19937_64 rng(3);
    const WalkState s = random_state(rng, -3, 3, -4, 4);
    const Eigen::VectorXcd v = s.to_vector();
    CHECK(v(oracle::idx(1, 2, -4)) == s.amp(Pol::R, 2));
    const WalkState t = WalkState::from_vector(v, -4, 4);
    CHECK((t.to_vector() - v).norm() == 0.0);
    CHECK_THROWS_AS(WalkState::from_vector(v, -4, 3), InvalidParameter);
}

TEST_CASE("norm is preserved for random states and random step operators") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> tq(-2, 2);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        int twice_q = tq(rng);
        if (twice_q == 0) {
            twice_q = 1;
        }
        const StepOperator step = compose_step(
            {waveplate_op({2.0 * pi * u(rng) * 0.999, pi * u(rng) * 0.999}),
             qplate_op({twice_q, pi * u(rng), 2.0 * pi * u(rng)}),
             waveplate_op({2.0 * pi * u(rng) * 0.999, pi * u(rng) * 0.999})});
        const WalkState s = random_state(rng, -4, 4, -10, 10);
        const WalkState out = apply(step, s);
        worst = std::max(worst, std::abs(out.norm() - 1.0));
        CHECK(out.to_vector().isApprox(step.dense(-10, 10) * s.to_vector(), 1e-13));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("evolve repeats the step") {
    const StepOperator step = compose_step(
        {waveplate_op(WaveplateParams::quarter_wave(pi / 4.0)), qplate_op({1, 2.0, 0.0})});
    const WalkState s0 = WalkState::localized({1.0, 0.0}, 0, -8, 8);
    WalkState s = s0;
    for (int k = 0; k < 5; ++k) {
        s = apply(step, s);
    }
    CHECK((evolve(s0, step, 5).to_vector() - s.to_vector()).norm() < 1e-15);
    CHECK((evolve(s0, step, 0).to_vector() - s0.to_vector()).norm() == 0.0);
    CHECK_THROWS_AS(evolve(s0, step, -1), InvalidParameter);
}

TEST_CASE("shift weights scale only shifted amplitudes") {
    const StepOperator qp = qplate_op({1, pi / 2.0, 0.0});
    const WalkState s = WalkState::localized({1.0, 0.0}, 0, -3, 3);
    const WalkState w = apply(qp, s, [](int, int) { return 0.5; });
    const WalkState plain = apply(qp, s);
    CHECK(w.amp(Pol::L, 0) == plain.amp(Pol::L, 0));
    CHECK(std::abs(w.amp(Pol::R, 1) - 0.5 * plain.amp(Pol::R, 1)) < 1e-16);
}

TEST_CASE("coin states") {
    CoinState c{{3.0, 0.0}, {0.0, 4.0}};
    CHECK_FALSE(c.is_normalized());
    CHECK(c.normalized().is_normalized());
    CHECK_THROWS_AS(CoinState({0.0, 0.0}, {0.0, 0.0}).normalized(), InvalidParameter);
}
