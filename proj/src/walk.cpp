#include "oamqw/walk.hpp"

#include "oamqw/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace oamqw {

WalkConfig WalkConfig::uniform(int n_steps, double delta, bool hwp, const CoinState& coin) {
    WalkConfig cfg;
    cfg.n_steps = n_steps;
    cfg.delta_schedule.assign(static_cast<std::size_t>(std::max(n_steps, 0)), delta);
    cfg.include_hwp.assign(static_cast<std::size_t>(std::max(n_steps, 0)), hwp);
    cfg.coin_init = coin;
    return cfg;
}

void WalkConfig::validate() const {
    if (n_steps < 0) {
        throw InvalidParameter("n_steps must be non-negative");
    }
    const auto n = static_cast<std::size_t>(n_steps);
    if (delta_schedule.size() != n) {
        throw InvalidParameter("delta_schedule needs one entry per step (got " +
                               std::to_string(delta_schedule.size()) + " for " +
                               std::to_string(n_steps) + " steps)");
    }
    if (include_hwp.size() != n) {
        throw InvalidParameter("include_hwp needs one entry per step");
    }
    for (double d : delta_schedule) {
        if (!(d >= 0.0 && d <= pi)) {
            throw InvalidParameter("delta must lie in [0, pi], got " + std::to_string(d));
        }
    }
    if (!coin_init.is_normalized(1e-9)) {
        throw InvalidParameter("initial coin state is not normalized");
    }
    WaveplateParams::quarter_wave(qwp_orientation).validate();
    WaveplateParams::half_wave(hwp_orientation).validate();
}

StepOperator step_operator(const WalkConfig& cfg, int k) {
    const auto idx = static_cast<std::size_t>(k);
    const CoinOperator qwp = waveplate_op(WaveplateParams::quarter_wave(cfg.qwp_orientation));
    const StepOperator qp = qplate_op({cfg.twice_q, cfg.delta_schedule.at(idx), cfg.alpha0});
    if (cfg.include_hwp.at(idx)) {
        return compose_step({qwp, qp, waveplate_op(WaveplateParams::half_wave(cfg.hwp_orientation))});
    }
    return compose_step({qwp, qp});
}

namespace {

WalkState initial_state(const WalkConfig& cfg) {
    const int w = cfg.half_width();
    return WalkState::localized(cfg.coin_init, 0, -w, w);
}

// Applies step k element by element so the q-plate weight touches only the
// q-plate's shifted terms.
WalkState apply_step(const WalkConfig& cfg, int k, const WalkState& s, const WalkHooks& hooks) {
    if (!hooks.qplate_weight) {
        return apply(step_operator(cfg, k), s);
    }
    const auto idx = static_cast<std::size_t>(k);
    WalkState out = apply(StepOperator::from_coin(
                              waveplate_op(WaveplateParams::quarter_wave(cfg.qwp_orientation))),
                          s);
    out = apply(qplate_op({cfg.twice_q, cfg.delta_schedule[idx], cfg.alpha0}), out,
                hooks.qplate_weight);
    if (cfg.include_hwp[idx]) {
        out = apply(StepOperator::from_coin(
                        waveplate_op(WaveplateParams::half_wave(cfg.hwp_orientation))),
                    out);
    }
    return out;
}

// Site-diagonal density matrix: one 2x2 polarization block per OAM value.
struct SiteMixture {
    int m_min;
    std::vector<Mat2> blocks;
};

SiteMixture dephased_evolution(const WalkConfig& cfg, const WalkState& initial,
                               const WalkHooks& hooks) {
    if (hooks.between_steps) {
        throw InvalidParameter("between-step hooks act on pure states; not available with site dephasing");
    }
    SiteMixture rho{initial.m_min(), std::vector<Mat2>(initial.sites(), Mat2::Zero())};
    for (int m = initial.m_min(); m <= initial.m_max(); ++m) {
        const Eigen::Vector2cd v{initial.amp(Pol::L, m), initial.amp(Pol::R, m)};
        rho.blocks[static_cast<std::size_t>(m - rho.m_min)] = v * v.adjoint();
    }
    const int m_max = initial.m_max();
    for (int k = 0; k < cfg.n_steps; ++k) {
        const StepOperator op = step_operator(cfg, k);
        std::vector<Mat2> next(rho.blocks.size(), Mat2::Zero());
        for (int m = rho.m_min; m <= m_max; ++m) {
            const Mat2& b = rho.blocks[static_cast<std::size_t>(m - rho.m_min)];
            if (b.isZero(0.0)) {
                continue;
            }
            for (const auto& [shift, band] : op.bands()) {
                const int out = m + shift;
                double w = 1.0;
                if (shift != 0 && hooks.qplate_weight) {
                    w = hooks.qplate_weight(m, out);
                }
                const Mat2 contrib = (w * w) * (band * b * band.adjoint());
                if (out < rho.m_min || out > m_max) {
                    if (contrib.trace().real() > initial.truncation_tol()) {
                        throw WindowOverflow("dephased walk leaks outside the OAM window");
                    }
                    continue;
                }
                next[static_cast<std::size_t>(out - rho.m_min)] += contrib;
            }
        }
        rho.blocks = std::move(next);
    }
    return rho;
}

OamDistribution normalized(OamDistribution d) {
    const double t = d.total();
    if (t <= 0.0) {
        throw EmptyDistribution("walk output carries no probability");
    }
    if (std::abs(t - 1.0) > 1e-12) {
        for (auto& [m, p] : d.probs) {
            p /= t;
        }
    }
    return d;
}

}  // namespace

WalkState final_state(const WalkConfig& cfg, const WalkHooks& hooks) {
    cfg.validate();
    return final_state(cfg, initial_state(cfg), hooks);
}

WalkState final_state(const WalkConfig& cfg, const WalkState& initial, const WalkHooks& hooks) {
    cfg.validate();
    if (cfg.dephase_sites) {
        throw InvalidParameter("site-dephased walks have no pure final state");
    }
    WalkState s = initial;
    for (int k = 0; k < cfg.n_steps; ++k) {
        if (k > 0 && hooks.between_steps) {
            s = hooks.between_steps(s);
        }
        s = apply_step(cfg, k, s, hooks);
    }
    return s;
}

double OamDistribution::at(int m) const {
    const auto it = probs.find(m);
    return it == probs.end() ? 0.0 : it->second;
}

double OamDistribution::total() const {
    return std::accumulate(probs.begin(), probs.end(), 0.0,
                           [](double acc, const auto& kv) { return acc + kv.second; });
}

double OamDistribution::mean() const {
    double acc = 0.0;
    for (const auto& [m, p] : probs) {
        acc += m * p;
    }
    return acc / total();
}

double OamDistribution::variance() const {
    const double mu = mean();
    double acc = 0.0;
    for (const auto& [m, p] : probs) {
        acc += (m - mu) * (m - mu) * p;
    }
    return acc / total();
}

OamDistribution distribution(const WalkState& state, int n_steps) {
    OamDistribution d;
    d.n_steps = n_steps;
    for (int m = state.m_min(); m <= state.m_max(); ++m) {
        d.probs[m] = state.population(m);
    }
    return d;
}

OamDistribution run_walk(const WalkConfig& cfg, const WalkHooks& hooks) {
    cfg.validate();
    return run_walk(cfg, initial_state(cfg), hooks);
}

OamDistribution run_walk(const WalkConfig& cfg, const WalkState& initial, const WalkHooks& hooks) {
    cfg.validate();
    if (!cfg.dephase_sites) {
        return normalized(distribution(final_state(cfg, initial, hooks), cfg.n_steps));
    }
    const SiteMixture rho = dephased_evolution(cfg, initial, hooks);
    OamDistribution d;
    d.n_steps = cfg.n_steps;
    for (std::size_t i = 0; i < rho.blocks.size(); ++i) {
        d.probs[rho.m_min + static_cast<int>(i)] = rho.blocks[i].trace().real();
    }
    return normalized(std::move(d));
}

std::vector<OamDistribution> intermediate_distributions(const WalkConfig& cfg,
                                                        const WalkHooks& hooks) {
    cfg.validate();
    std::vector<OamDistribution> out;
    out.reserve(static_cast<std::size_t>(cfg.n_steps));
    for (int k = 1; k <= cfg.n_steps; ++k) {
        WalkConfig partial = cfg;
        for (int j = k; j < cfg.n_steps; ++j) {
            partial.delta_schedule[static_cast<std::size_t>(j)] = 0.0;
        }
        OamDistribution d = run_walk(partial, hooks);
        d.n_steps = k;
        out.push_back(std::move(d));
    }
    return out;
}

OamDistribution apply_detection_correction(const OamDistribution& raw,
                                           const std::map<int, double>& eta) {
    OamDistribution out;
    out.n_steps = raw.n_steps;
    for (const auto& [m, p] : raw.probs) {
        if (p == 0.0) {
            out.probs[m] = 0.0;
            continue;
        }
        const auto it = eta.find(m);
        if (it == eta.end() || !(it->second > 0.0)) {
            throw ZeroEfficiency("detection efficiency is zero or missing at m=" + std::to_string(m));
        }
        out.probs[m] = p / it->second;
    }
    return normalized(std::move(out));
}

double spread_exponent(const WalkConfig& base, int n_from, int n_to) {
    if (n_from < 1 || n_to <= n_from) {
        throw InvalidParameter("spread_exponent needs 1 <= n_from < n_to");
    }
    const double delta = base.delta_schedule.empty() ? pi : base.delta_schedule.front();
    const bool hwp = base.include_hwp.empty() ? true : static_cast<bool>(base.include_hwp.front());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (int n = n_from; n <= n_to; ++n) {
        WalkConfig cfg = WalkConfig::uniform(n, delta, hwp, base.coin_init);
        cfg.twice_q = base.twice_q;
        cfg.alpha0 = base.alpha0;
        cfg.qwp_orientation = base.qwp_orientation;
        cfg.hwp_orientation = base.hwp_orientation;
        cfg.dephase_sites = base.dephase_sites;
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(run_walk(cfg).variance());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace oamqw
