#include "oamqw/analysis.hpp"
#include "oamqw/errors.hpp"
#include "oamqw/two_photon.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace oamqw;

namespace {

const Label L0{PolLabel::L, 0};
const Label R0{PolLabel::R, 0};

// Outputs labelled (H, 0), (H, 1), ... so any n x n matrix can serve as U.
SingleParticleUnitary from_matrix(const Eigen::MatrixXcd& u) {
    std::vector<Label> labels;
    for (int i = 0; i < u.cols(); ++i) {
        labels.push_back({PolLabel::H, i});
    }
    std::vector<Label> in(labels.begin(), labels.begin() + u.rows());
    return {LabelSpace(in), LabelSpace(labels), u};
}

// Two photons a_1^dag a_2^dag |0> evolved to sum_pq U1p U2q a_p^dag a_q^dag |0>,
// projected on normalized Fock states |1_p 1_q> and |2_p>.
Eigen::MatrixXd fock_oracle(const Eigen::MatrixXcd& u, int r1, int r2) {
    const Eigen::Index n = u.cols();
    Eigen::MatrixXcd c(n, n);
    for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = 0; q < n; ++q) {
            c(p, q) = u(r1, p) * u(r2, q);
        }
    }
    Eigen::MatrixXd prob = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index p = 0; p < n; ++p) {
        prob(p, p) = std::norm(std::sqrt(2.0) * c(p, p));
        for (Eigen::Index q = p + 1; q < n; ++q) {
            prob(p, q) = std::norm(c(p, q) + c(q, p));
            prob(q, p) = prob(p, q);
        }
    }
    return prob;
}

// <I_p I_q> over 1024 equally spaced relative phases.
Eigen::MatrixXd phase_average_oracle(const Eigen::MatrixXcd& u, int r1, int r2) {
    const Eigen::Index n = u.cols();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    const int samples = 1024;
    for (int k = 0; k < samples; ++k) {
        const cplx ph = std::exp(oracle::I * (2.0 * pi * k / samples));
        Eigen::VectorXd inten(n);
        for (Eigen::Index p = 0; p < n; ++p) {
            inten(p) = std::norm(u(r1, p) + ph * u(r2, p));
        }
        g += inten * inten.transpose() / samples;
    }
    return g;
}

Eigen::MatrixXcd balanced_coupler() {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd u(2, 2);
    u << r, r, r, -r;
    return u;
}

double upper_sum(const Eigen::MatrixXd& m) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i; j < m.cols(); ++j) {
            s += m(i, j);
        }
    }
    return s;
}

}  // namespace

TEST_CASE("label space") {
    const LabelSpace w = LabelSpace::window(-1, 1);
    REQUIRE(w.size() == 6);
    CHECK(w[0] == Label{PolLabel::L, -1});
    CHECK(w[1] == Label{PolLabel::R, -1});
    CHECK(w.index_of({PolLabel::R, 1}) == 5);
    CHECK_FALSE(w.find({PolLabel::H, 0}).has_value());
    CHECK_THROWS_AS(w.index_of({PolLabel::L, 4}), InvalidParameter);
    CHECK(LabelSpace::window(0, 0, PolBasis::linear)[1] == Label{PolLabel::V, 0});
    CHECK_THROWS_AS(LabelSpace({L0, R0, L0}), InvalidParameter);
    for (const std::string s : {"L", "R", "H", "V"}) {
        CHECK(to_string(parse_pol_label(s)) == s);
    }
    CHECK_THROWS_AS(parse_pol_label("D"), InvalidParameter);
}

TEST_CASE("zero steps give the identity on the input labels") {
    const SingleParticleUnitary u = single_particle_unitary(WalkConfig::standard(0, {1.0, 0.0}));
    CHECK(std::abs(u.entries(0, static_cast<Eigen::Index>(u.outputs.index_of(L0))) - 1.0) < 1e-15);
    CHECK(std::abs(u.entries(1, static_cast<Eigen::Index>(u.outputs.index_of(R0))) - 1.0) < 1e-15);
    CHECK(u.entries.cwiseAbs().sum() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("rows are the dense-oracle amplitudes and orthonormal") {
    for (int n : {1, 3, 5}) {
        for (const auto& cfg : {WalkConfig::standard(n, {1.0, 0.0}),
                                WalkConfig::uniform(n, pi / 2.0, false, {1.0, 0.0})}) {
            const SingleParticleUnitary u = single_particle_unitary(cfg);
            const Eigen::MatrixXcd gram = u.entries * u.entries.adjoint();
            CHECK((gram - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

            const int h = cfg.half_width();
            for (int row = 0; row < 2; ++row) {
                WalkConfig c = cfg;
                c.coin_init = row == 0 ? CoinState{1.0, 0.0} : CoinState{0.0, 1.0};
                const Eigen::VectorXcd v = oracle::dense_walk(c, -h, h);
                for (int m = -h; m <= h; ++m) {
                    for (int pol = 0; pol < 2; ++pol) {
                        const Label l{pol == 0 ? PolLabel::L : PolLabel::R, m};
                        const auto j = u.outputs.find(l);
                        REQUIRE(j.has_value());
                        CHECK(std::abs(u.entries(row, static_cast<Eigen::Index>(*j)) -
                                       v(oracle::idx(pol, m, -h))) < 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("linear detection basis keeps rows normalized") {
    const WalkConfig cfg = WalkConfig::standard(3, {1.0, 0.0});
    const SingleParticleUnitary circ = single_particle_unitary(cfg);
    const SingleParticleUnitary lin = single_particle_unitary(cfg, default_two_photon_inputs, PolBasis::linear);
    CHECK(lin.outputs[0].pol == PolLabel::H);
    const Eigen::MatrixXcd gram = lin.entries * lin.entries.adjoint();
    CHECK((gram - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    // Same OAM marginals in either basis.
    for (int row = 0; row < 2; ++row) {
        for (int m = -3; m <= 3; ++m) {
            const auto pc = std::norm(circ.entries(row, static_cast<Eigen::Index>(circ.outputs.index_of({PolLabel::L, m})))) +
                            std::norm(circ.entries(row, static_cast<Eigen::Index>(circ.outputs.index_of({PolLabel::R, m}))));
            const auto pl = std::norm(lin.entries(row, static_cast<Eigen::Index>(lin.outputs.index_of({PolLabel::H, m})))) +
                            std::norm(lin.entries(row, static_cast<Eigen::Index>(lin.outputs.index_of({PolLabel::V, m}))));
            CHECK(pc == doctest::Approx(pl).epsilon(1e-12));
        }
    }
    // Linear inputs: H is (L + R)/sqrt2.
    const SingleParticleUnitary hv = single_particle_unitary(
        WalkConfig::standard(0, {1.0, 0.0}), {Label{PolLabel::H, 0}, Label{PolLabel::V, 0}});
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(hv.entries(0, static_cast<Eigen::Index>(hv.outputs.index_of(L0))) - r) < 1e-15);
    CHECK(std::abs(hv.entries(0, static_cast<Eigen::Index>(hv.outputs.index_of(R0))) - r) < 1e-15);
}

TEST_CASE("deterministic opposite shifts put both photons on one pair") {
    // A single tuned q-plate: (L,0) -> (R,+1), (R,0) -> (L,-1).
    const StepOperator qp = qplate_op({1, pi, 0.0});
    const LabelSpace out = LabelSpace::window(-2, 2);
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(2, static_cast<Eigen::Index>(out.size()));
    int row = 0;
    for (const CoinState& c : {CoinState{1.0, 0.0}, CoinState{0.0, 1.0}}) {
        const WalkState s = apply(qp, WalkState::localized(c, 0, -2, 2));
        for (std::size_t j = 0; j < out.size(); ++j) {
            e(row, static_cast<Eigen::Index>(j)) = s.amp(out[j].pol == PolLabel::L ? Pol::L : Pol::R, out[j].m);
        }
        ++row;
    }
    CHECK(std::abs(std::abs(e(0, static_cast<Eigen::Index>(out.index_of({PolLabel::R, 1})))) - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(e(1, static_cast<Eigen::Index>(out.index_of({PolLabel::L, -1})))) - 1.0) < 1e-15);

    const SingleParticleUnitary u{LabelSpace({L0, R0}), out, e};
    const auto a = static_cast<Eigen::Index>(out.index_of({PolLabel::L, -1}));
    const auto b = static_cast<Eigen::Index>(out.index_of({PolLabel::R, 1}));
    for (const auto model : {JointModel::bosonic, JointModel::distinguishable}) {
        const JointDistribution j = joint(model, u);
        CHECK(j.probs(a, b) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(j.total() == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("balanced coupler: bunching for bosons, none for distinguishable photons") {
    const SingleParticleUnitary u = from_matrix(balanced_coupler());
    const JointDistribution bos = joint_bosonic(u);
    const Eigen::MatrixXd fock = fock_oracle(balanced_coupler(), 0, 1);
    CHECK(bos.probs(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(bos.probs(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(bos.probs(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK((bos.probs - fock).cwiseAbs().maxCoeff() < 1e-15);

    const JointDistribution dis = joint_distinguishable(u);
    CHECK(dis.probs(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(dis.probs(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(dis.probs(1, 1) == doctest::Approx(0.25).epsilon(1e-15));

    CHECK_THROWS_AS(joint_bosonic(u, 0, 0), InvalidParameter);
    CHECK_THROWS_AS(joint_classical(u, 1, 1), InvalidParameter);
}

TEST_CASE("random unitaries: completeness, Fock oracle and distinguishable bound") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + t % 7;
        const Eigen::MatrixXcd m = oracle::random_unitary(n, rng);
        const SingleParticleUnitary u = from_matrix(m);
        const JointDistribution bos = joint_bosonic(u, 0, 1);
        const JointDistribution dis = joint_distinguishable(u, 0, 1);
        CHECK(bos.total() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(dis.total() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(upper_sum(bos.probs) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((bos.probs - fock_oracle(m, 0, 1)).cwiseAbs().maxCoeff() < 1e-13);
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                CHECK(2.0 * std::sqrt(dis.probs(p, p) * dis.probs(q, q)) - dis.probs(p, q) <= 1e-12);
            }
        }
    }
}

TEST_CASE("classical model matches a numeric phase average") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const int n = 2 + t % 5;
        const Eigen::MatrixXcd m = oracle::random_unitary(n, rng);
        const JointDistribution cl = joint_classical(from_matrix(m));
        REQUIRE(cl.gamma.has_value());
        const Eigen::MatrixXd g = phase_average_oracle(m, 0, 1);
        CHECK((*cl.gamma - g).cwiseAbs().maxCoeff() < 1e-10);

        // Gamma = (1 + delta_pq) Pbar up to overall scale.
        Eigen::MatrixXd pbar = g;
        pbar.diagonal() *= 0.5;
        pbar /= upper_sum(pbar);
        CHECK((cl.probs - pbar).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(cl.total() == doctest::Approx(1.0).epsilon(1e-12));
    }

    // Balanced coupler: closed form (a1+b1)(a2+b2) + 2 Re(c1 c2*).
    const Eigen::MatrixXcd bc = balanced_coupler();
    const JointDistribution cl = joint_classical(from_matrix(bc));
    cplx c[2];
    double ab[2];
    for (int p = 0; p < 2; ++p) {
        ab[p] = std::norm(bc(0, p)) + std::norm(bc(1, p));
        c[p] = std::conj(bc(0, p)) * bc(1, p);
    }
    CHECK((*cl.gamma)(0, 1) == doctest::Approx(ab[0] * ab[1] + 2.0 * std::real(c[0] * std::conj(c[1]))).epsilon(1e-14));
    CHECK((*cl.gamma)(0, 1) == doctest::Approx(phase_average_oracle(bc, 0, 1)(0, 1)).epsilon(1e-10));
}

TEST_CASE("classical source with a dark second input") {
    std::mt19937_64 rng(9);
    Eigen::MatrixXcd m = oracle::random_unitary(4, rng);
    m.row(1).setZero();
    const JointDistribution cl = joint_classical(from_matrix(m));
    for (int p = 0; p < 4; ++p) {
        for (int q = 0; q < 4; ++q) {
            CHECK((*cl.gamma)(p, q) == doctest::Approx(std::norm(m(0, p)) * std::norm(m(0, q))).epsilon(1e-14));
        }
    }
}

TEST_CASE("beam-splitter post-selection") {
    const SingleParticleUnitary u = single_particle_unitary(WalkConfig::standard(3, {1.0, 0.0}));
    const JointDistribution pre = joint_bosonic(u);
    const JointDistribution post = bs_postselect(pre);
    CHECK(post.stage == Stage::post_bs);
    const auto n = post.probs.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        CHECK(post.probs(i, i) == doctest::Approx(pre.probs(i, i) / 2.0));
        for (Eigen::Index j = i + 1; j < n; ++j) {
            CHECK(post.probs(i, j) == doctest::Approx(pre.probs(i, j) / 4.0));
            CHECK(post.probs(i, j) == post.probs(j, i));
        }
    }
    CHECK(post.total() < 1.0);
    CHECK(post.total() > 0.0);
    CHECK_THROWS_AS(bs_postselect(post), StageError);
}

TEST_CASE("symmetrized OAM joint") {
    const SingleParticleUnitary u = single_particle_unitary(WalkConfig::uniform(3, pi / 2.0, false, {1.0, 0.0}));
    for (const auto model : {JointModel::bosonic, JointModel::distinguishable, JointModel::classical}) {
        const JointDistribution pre = joint(model, u);
        const OamJoint j = symmetrized_oam_joint(bs_postselect(pre));
        double total = 0.0;
        for (const auto& [key, p] : j) {
            CHECK(p >= 0.0);
            CHECK(p == doctest::Approx(j.at({key.second, key.first})).epsilon(1e-15));
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(total_variation(j, j) == 0.0);
        CHECK_THROWS_AS(symmetrized_oam_joint(pre), StageError);
    }
}

TEST_CASE("bosonic and distinguishable statistics differ in the hybrid walk") {
    const SingleParticleUnitary u = single_particle_unitary(WalkConfig::uniform(3, pi / 2.0, false, {1.0, 0.0}));
    const OamJoint b = symmetrized_oam_joint(bs_postselect(joint_bosonic(u)));
    const OamJoint d = symmetrized_oam_joint(bs_postselect(joint_distinguishable(u)));
    const double tv = total_variation(b, d);
    CHECK(tv > 0.05);
    CHECK(tv <= 1.0);
    CHECK(total_variation(b, d) == doctest::Approx(total_variation(d, b)));
}
