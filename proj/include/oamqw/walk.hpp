#pragma once

#include "oamqw/core.hpp"

#include <functional>
#include <map>
#include <span>
#include <vector>

namespace oamqw {

// One walk step is QWP(qwp_orientation) -> QP(delta_k) -> [HWP(hwp_orientation)].
struct WalkConfig {
    int n_steps = 0;
    std::vector<double> delta_schedule;  // one entry per step
    std::vector<bool> include_hwp;       // one entry per step
    CoinState coin_init;
    int twice_q = 1;
    double alpha0 = 0.0;
    double qwp_orientation = pi / 4.0;
    double hwp_orientation = 0.0;
    // Classical reference: drop coherences between OAM sites after every step.
    bool dephase_sites = false;

    static WalkConfig uniform(int n_steps, double delta, bool hwp, const CoinState& coin);
    static WalkConfig standard(int n_steps, const CoinState& coin) {
        return uniform(n_steps, pi, true, coin);
    }

    void validate() const;
    int half_width() const { return default_half_width(n_steps, std::abs(twice_q)); }
};

// Optional physics inserted into the ideal walk.
struct WalkHooks {
    ShiftWeight qplate_weight;                                  // radial losses at each QP
    std::function<WalkState(const WalkState&)> between_steps;  // e.g. Gouy dephasing
};

struct OamDistribution {
    std::map<int, double> probs;  // polarization-summed
    int n_steps = 0;

    double at(int m) const;
    double total() const;
    double mean() const;
    double variance() const;
};

// Operator of step k (0-based) of the configured walk.
StepOperator step_operator(const WalkConfig& cfg, int k);

// |coin_init> (x) |m = 0> evolved through all steps.
WalkState final_state(const WalkConfig& cfg, const WalkHooks& hooks = {});
WalkState final_state(const WalkConfig& cfg, const WalkState& initial, const WalkHooks& hooks = {});

OamDistribution distribution(const WalkState& state, int n_steps);

// Probabilities are renormalized to 1 when hooks introduce loss.
OamDistribution run_walk(const WalkConfig& cfg, const WalkHooks& hooks = {});
OamDistribution run_walk(const WalkConfig& cfg, const WalkState& initial, const WalkHooks& hooks = {});

// Entry k-1 is the walk with every q-plate after step k switched off (delta = 0);
// the waveplates of those steps stay in the beam.
std::vector<OamDistribution> intermediate_distributions(const WalkConfig& cfg,
                                                        const WalkHooks& hooks = {});

OamDistribution apply_detection_correction(const OamDistribution& raw,
                                           const std::map<int, double>& eta);

// Least-squares slope of log(variance) against log(n) for walks of n_from..n_to
// steps sharing base's per-step settings.
double spread_exponent(const WalkConfig& base, int n_from, int n_to);

}  // namespace oamqw
