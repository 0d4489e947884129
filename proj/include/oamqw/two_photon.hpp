#pragma once

#include "oamqw/core.hpp"
#include "oamqw/walk.hpp"

#include <Eigen/Dense>

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oamqw {

enum class PolLabel : int { L = 0, R = 1, H = 2, V = 3 };

std::string to_string(PolLabel p);
PolLabel parse_pol_label(const std::string& s);

struct Label {
    PolLabel pol = PolLabel::L;
    int m = 0;

    auto operator<=>(const Label&) const = default;
};

std::string to_string(const Label& l);

// Output polarization basis of the detection stage.
enum class PolBasis { circular, linear };

class LabelSpace {
public:
    LabelSpace() = default;
    explicit LabelSpace(std::vector<Label> labels);

    // Every (pol, m) on [m_min, m_max], ordered by m then polarization.
    static LabelSpace window(int m_min, int m_max, PolBasis basis = PolBasis::circular);

    const std::vector<Label>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }
    const Label& operator[](std::size_t i) const { return labels_[i]; }
    std::optional<std::size_t> find(const Label& l) const;
    std::size_t index_of(const Label& l) const;

private:
    std::vector<Label> labels_;
    std::map<Label, std::size_t> index_;
};

// entries(i, j) = amplitude for input label i to end in output label j.
struct SingleParticleUnitary {
    LabelSpace inputs;
    LabelSpace outputs;
    Eigen::MatrixXcd entries;
};

inline constexpr std::array<Label, 2> default_two_photon_inputs{Label{PolLabel::L, 0},
                                                                Label{PolLabel::R, 0}};

SingleParticleUnitary single_particle_unitary(const WalkConfig& cfg,
                                              std::array<Label, 2> inputs = default_two_photon_inputs,
                                              PolBasis basis = PolBasis::circular,
                                              const WalkHooks& hooks = {});

enum class Stage { pre_bs, post_bs };
enum class JointModel { bosonic, distinguishable, classical };

std::string to_string(JointModel m);
std::string to_string(Stage s);

// Pre-BS: symmetric matrix of P̄ over output labels; entry (p, q) for p != q is
// the probability of the unordered pair {p, q}.
// Post-BS: P(p, q) = probability of p at detector 1 and q at detector 2.
struct JointDistribution {
    Stage stage = Stage::pre_bs;
    JointModel model = JointModel::bosonic;
    LabelSpace labels;
    Eigen::MatrixXd probs;
    std::optional<Eigen::MatrixXd> gamma;  // intensity correlations, classical model only

    // Sum over unordered pairs (pre-BS) or ordered detector pairs (post-BS).
    double total() const;
};

JointDistribution joint_bosonic(const SingleParticleUnitary& u, std::size_t in1 = 0,
                                std::size_t in2 = 1);
JointDistribution joint_distinguishable(const SingleParticleUnitary& u, std::size_t in1 = 0,
                                        std::size_t in2 = 1);
// Two mutually incoherent classical fields of equal intensity in the two inputs.
// Gamma(p, q) = <I_p I_q> over the random relative phase; P̄ follows from
// Gamma = (1 + delta_pq) P̄, scaled to unit total.
JointDistribution joint_classical(const SingleParticleUnitary& u, std::size_t in1 = 0,
                                  std::size_t in2 = 1);

JointDistribution joint(JointModel model, const SingleParticleUnitary& u, std::size_t in1 = 0,
                        std::size_t in2 = 1);

// Non-polarizing 50:50 split keeping only events with one photon per port.
JointDistribution bs_postselect(const JointDistribution& pre);

using OamJoint = std::map<std::pair<int, int>, double>;

// Polarization-summed, (m1, m2) <-> (m2, m1) averaged, renormalized to 1.
OamJoint symmetrized_oam_joint(const JointDistribution& post);

double total_variation(const OamJoint& a, const OamJoint& b);

}  // namespace oamqw
