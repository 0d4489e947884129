// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "oamqw/analysis.hpp"
#include "oamqw/modes.hpp"
#include "oamqw/two_photon.hpp"
#include "oamqw/walk.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

using namespace oamqw;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;  // 0: no runtime bound
    std::function<Outcome()> body;
};

const double r2 = 1.0 / std::sqrt(2.0);

Outcome table_golden_values() {
    const double table[4][4] = {{0.7854, 0.0982, 0.0368, 0.0192},
                                {0.8836, 0.0736, 0.0207, 0.0086},
                                {0.9204, 0.0575, 0.0129, 0.0045},
                                {0.9396, 0.0470, 0.0088, 0.0026}};
    double worst = 0.0;
    for (int m = 0; m <= 3; ++m) {
        const RadialCoeffs rc = qp_radial_coeffs(m, 3);
        for (int p = 0; p <= 3; ++p) {
            const double c = rc.coeffs.at(static_cast<std::size_t>(p));
            worst = std::max(worst, std::abs(c * c - table[m][p]));
        }
    }
    std::ostringstream os;
    os << "max |c_p|^2 deviation " << worst;
    return {worst <= 0.001, os.str()};
}

Outcome near_field_overlap() {
    const double at_zero = pupil_overlap(1, 0.0);
    const double at_tenth = pupil_overlap(1, 0.1);
    std::ostringstream os;
    os << "overlap(0) = " << at_zero << ", overlap(0.1) = " << at_tenth;
    return {at_zero == 1.0 && std::abs(at_tenth - 0.93) <= 0.01, os.str()};
}

bool forbidden(int m, int n_steps) { return ((m + n_steps) % 2 + 2) % 2 != 0; }

Outcome parity_law() {
    double worst = 0.0;
    const SingleParticleUnitary u = single_particle_unitary(WalkConfig::standard(3, {1.0, 0.0}));
    for (const JointModel model : {JointModel::bosonic, JointModel::distinguishable, JointModel::classical}) {
        const JointDistribution pre = joint(model, u);
        for (const JointDistribution& d : {pre, bs_postselect(pre)}) {
            for (std::size_t i = 0; i < d.labels.size(); ++i) {
                for (std::size_t j = 0; j < d.labels.size(); ++j) {
                    if (forbidden(d.labels.labels()[i].m, 3) || forbidden(d.labels.labels()[j].m, 3)) {
                        worst = std::max(worst, d.probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
                    }
                }
            }
        }
    }
    for (const CoinState& c : {CoinState{1.0, 0.0}, CoinState{0.0, 1.0}, CoinState{r2, cplx{0.0, r2}}}) {
        for (const auto& [m, p] : run_walk(WalkConfig::standard(4, c)).probs) {
            if (forbidden(m, 4)) {
                worst = std::max(worst, p);
            }
        }
    }
    std::ostringstream os;
    os << "max probability on forbidden sites " << worst;
    return {worst < 1e-12, os.str()};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> charge(0, 3);
    const int twice_q_choices[] = {1, -1, 2, -2};
    double worst = 0.0;
    int widest = 0;
    for (int t = 0; t < 100; ++t) {
        const int twice_q = twice_q_choices[charge(rng)];
        WalkConfig cfg = oracle::random_walk_config(rng, 8 / std::abs(twice_q));
        cfg.twice_q = twice_q;
        // Alternate between the default window and the full [-10, 10] window.
        const int h = t % 2 == 0 ? cfg.half_width() : 10;
        widest = std::max(widest, h);
        const WalkState banded =
            final_state(cfg, WalkState::localized(cfg.coin_init, 0, -h, h));
        const Eigen::VectorXcd dense = oracle::dense_walk(cfg, -h, h);
        for (int m = -h; m <= h; ++m) {
            for (const Pol pol : {Pol::L, Pol::R}) {
                const cplx b = banded.contains(m) ? banded.amp(pol, m) : cplx{};
                worst = std::max(worst, std::abs(b - dense(oracle::idx(static_cast<int>(pol), m, -h))));
            }
        }
    }
    std::ostringstream os;
    os << "100 configs, windows up to [-" << widest << ", " << widest << "], max amplitude difference " << worst;
    return {worst < 1e-12 && widest == 10, os.str()};
}

Outcome spread_exponents() {
    const WalkConfig coherent = WalkConfig::standard(1, {r2, cplx{0.0, r2}});
    WalkConfig dephased = coherent;
    dephased.dephase_sites = true;
    const double gq = spread_exponent(coherent, 4, 20);
    const double gc = spread_exponent(dephased, 4, 20);
    std::ostringstream os;
    os << "gamma coherent " << gq << ", dephased " << gc;
    return {gq > 1.8 && std::abs(gc - 1.0) < 0.1, os.str()};
}

double max_term(const JointDistribution& post, InequalityKind kind) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : inequality_terms(post, kind)) {
        m = std::max(m, t.t);
    }
    return m;
}

Outcome inequality_structure() {
    bool ok = true;
    std::ostringstream os;
    const struct {
        const char* name;
        WalkConfig cfg;
    } configs[] = {{"standard", WalkConfig::standard(3, {1.0, 0.0})},
                   {"hybrid", WalkConfig::uniform(3, pi / 2.0, false, {1.0, 0.0})}};
    for (const auto& c : configs) {
        const SingleParticleUnitary u = single_particle_unitary(c.cfg);
        const JointDistribution cl = bs_postselect(joint_classical(u));
        const JointDistribution dis = bs_postselect(joint_distinguishable(u));
        const JointDistribution bos = bs_postselect(joint_bosonic(u));
        const double t_cl = max_term(cl, InequalityKind::classical);
        const double t_dis = max_term(dis, InequalityKind::distinguishable);
        const std::size_t bos_violations = distinguishable_inequality(bos).pairs.size();
        ok = ok && t_cl <= 1e-12 && t_dis <= 1e-12 && bos_violations >= 1;
        os << c.name << ": max T classical " << t_cl << ", max T distinguishable " << t_dis
           << ", bosonic violations " << bos_violations << "; ";
        if (std::string(c.name) == "hybrid") {
            const double tv = total_variation(symmetrized_oam_joint(bos), symmetrized_oam_joint(dis));
            ok = ok && tv > 0.05;
            os << "TV(bosonic, distinguishable) " << tv;
        }
    }
    return {ok, os.str()};
}

Outcome gouy_robustness() {
    const WalkConfig cfg = WalkConfig::standard(4, {r2, cplx{0.0, r2}});
    const OamDistribution ideal = run_walk(cfg);
    auto with_gouy = [&](double d) {
        WalkHooks hooks;
        hooks.between_steps = [d](const WalkState& s) { return gouy_dephase(s, d); };
        return similarity(ideal, run_walk(cfg, hooks));
    };
    const double small = with_gouy(0.01);
    const double large = with_gouy(0.5);
    std::ostringstream os;
    os << "S(d=0.01) = " << small << ", S(d=0.5) = " << large;
    return {small > 0.999 && large < 0.99, os.str()};
}

Outcome similarity_metric() {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
    const std::vector<double> a{0.5, 0.5, 0.0, 0.0};
    const std::vector<double> b{0.0, 0.0, 0.3, 0.7};
    const std::vector<double> c{0.5, 0.5};
    const std::vector<double> d{1.0, 0.0};
    const double self = similarity(p, p);
    const double disjoint = similarity(a, b);
    const double half = similarity(c, d);
    std::ostringstream os;
    os << "S(P,P) = " << self << ", disjoint " << disjoint << ", half " << half;
    return {std::abs(self - 1.0) < 1e-12 && disjoint == 0.0 && std::abs(half - 0.5) <= 1e-12, os.str()};
}

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "radial power table", 1.0, table_golden_values},
        {2, "near-field overlap", 5.0, near_field_overlap},
        {3, "parity law", 0.0, parity_law},
        {4, "banded vs dense oracle", 10.0, oracle_equivalence},
        {5, "quantum vs classical spread", 30.0, spread_exponents},
        {6, "inequality structure", 30.0, inequality_structure},
        {7, "Gouy robustness", 0.0, gouy_robustness},
        {8, "similarity metric", 0.0, similarity_metric},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.body();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0.0 && elapsed >= c.time_limit_s) {
            out.ok = false;
            out.detail += " (runtime over limit)";
        }
        failures += out.ok ? 0 : 1;
        std::printf("%s criterion %d (%s): %s [%.3f s]\n", out.ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    out.detail.c_str(), elapsed);
    }
    return failures == 0 ? 0 : 1;
}
