#include "oamqw/two_photon.hpp"

#include "oamqw/errors.hpp"

#include <cmath>
#include <set>

namespace oamqw {

namespace {

constexpr cplx I{0.0, 1.0};

CoinState coin_for(PolLabel p) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (p) {
    case PolLabel::L:
        return {1.0, 0.0};
    case PolLabel::R:
        return {0.0, 1.0};
    case PolLabel::H:
        return {r, r};
    case PolLabel::V:
        return {-I * r, I * r};
    }
    throw InvalidParameter("unknown polarization label");
}

// <out_pol | psi> for a state with circular components (l, r).
cplx project(PolLabel out_pol, cplx l, cplx r) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (out_pol) {
    case PolLabel::L:
        return l;
    case PolLabel::R:
        return r;
    case PolLabel::H:
        return s * (l + r);
    case PolLabel::V:
        return s * I * (l - r);
    }
    throw InvalidParameter("unknown polarization label");
}

void check_inputs(const SingleParticleUnitary& u, std::size_t in1, std::size_t in2) {
    const auto rows = static_cast<std::size_t>(u.entries.rows());
    if (in1 >= rows || in2 >= rows) {
        throw InvalidParameter("input row out of range");
    }
    if (in1 == in2) {
        throw InvalidParameter("the two photons must enter different input labels");
    }
}

JointDistribution make_pre(const SingleParticleUnitary& u, JointModel model) {
    JointDistribution d;
    d.stage = Stage::pre_bs;
    d.model = model;
    d.labels = u.outputs;
    const auto n = static_cast<Eigen::Index>(u.outputs.size());
    d.probs = Eigen::MatrixXd::Zero(n, n);
    return d;
}

}  // namespace

std::string to_string(PolLabel p) {
    switch (p) {
    case PolLabel::L:
        return "L";
    case PolLabel::R:
        return "R";
    case PolLabel::H:
        return "H";
    case PolLabel::V:
        return "V";
    }
    return "?";
}

PolLabel parse_pol_label(const std::string& s) {
    if (s == "L") return PolLabel::L;
    if (s == "R") return PolLabel::R;
    if (s == "H") return PolLabel::H;
    if (s == "V") return PolLabel::V;
    throw InvalidParameter("unknown polarization label '" + s + "' (expected L, R, H or V)");
}

std::string to_string(const Label& l) { return to_string(l.pol) + "," + std::to_string(l.m); }

std::string to_string(JointModel m) {
    switch (m) {
    case JointModel::bosonic:
        return "bosonic";
    case JointModel::distinguishable:
        return "distinguishable";
    case JointModel::classical:
        return "classical";
    }
    return "?";
}

std::string to_string(Stage s) { return s == Stage::pre_bs ? "pre_bs" : "post_bs"; }

LabelSpace::LabelSpace(std::vector<Label> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!index_.emplace(labels_[i], i).second) {
            throw InvalidParameter("duplicate label " + to_string(labels_[i]));
        }
    }
}

LabelSpace LabelSpace::window(int m_min, int m_max, PolBasis basis) {
    const PolLabel a = basis == PolBasis::circular ? PolLabel::L : PolLabel::H;
    const PolLabel b = basis == PolBasis::circular ? PolLabel::R : PolLabel::V;
    std::vector<Label> labels;
    for (int m = m_min; m <= m_max; ++m) {
        labels.push_back({a, m});
        labels.push_back({b, m});
    }
    return LabelSpace(std::move(labels));
}

std::optional<std::size_t> LabelSpace::find(const Label& l) const {
    const auto it = index_.find(l);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t LabelSpace::index_of(const Label& l) const {
    const auto i = find(l);
    if (!i) {
        throw InvalidParameter("label " + to_string(l) + " not in label space");
    }
    return *i;
}

SingleParticleUnitary single_particle_unitary(const WalkConfig& cfg, std::array<Label, 2> inputs,
                                              PolBasis basis, const WalkHooks& hooks) {
    cfg.validate();
    const int reach = std::max(std::abs(inputs[0].m), std::abs(inputs[1].m));
    const int w = cfg.half_width() + reach;

    SingleParticleUnitary u;
    u.inputs = LabelSpace({inputs[0], inputs[1]});
    u.outputs = LabelSpace::window(-w, w, basis);
    u.entries = Eigen::MatrixXcd::Zero(2, static_cast<Eigen::Index>(u.outputs.size()));

    for (Eigen::Index row = 0; row < 2; ++row) {
        const Label& in = inputs[static_cast<std::size_t>(row)];
        const WalkState out =
            final_state(cfg, WalkState::localized(coin_for(in.pol), in.m, -w, w), hooks);
        for (std::size_t j = 0; j < u.outputs.size(); ++j) {
            const Label& o = u.outputs[j];
            u.entries(row, static_cast<Eigen::Index>(j)) =
                project(o.pol, out.amp(Pol::L, o.m), out.amp(Pol::R, o.m));
        }
    }
    return u;
}

double JointDistribution::total() const {
    if (stage == Stage::post_bs) {
        return probs.sum();
    }
    double acc = 0.0;
    for (Eigen::Index p = 0; p < probs.rows(); ++p) {
        for (Eigen::Index q = p; q < probs.cols(); ++q) {
            acc += probs(p, q);
        }
    }
    return acc;
}

JointDistribution joint_bosonic(const SingleParticleUnitary& u, std::size_t in1, std::size_t in2) {
    check_inputs(u, in1, in2);
    JointDistribution d = make_pre(u, JointModel::bosonic);
    const auto u1 = u.entries.row(static_cast<Eigen::Index>(in1));
    const auto u2 = u.entries.row(static_cast<Eigen::Index>(in2));
    const Eigen::Index n = d.probs.rows();
    for (Eigen::Index p = 0; p < n; ++p) {
        d.probs(p, p) = 2.0 * std::norm(u1(p) * u2(p));
        for (Eigen::Index q = p + 1; q < n; ++q) {
            const double v = std::norm(u1(p) * u2(q) + u1(q) * u2(p));
            d.probs(p, q) = v;
            d.probs(q, p) = v;
        }
    }
    return d;
}

JointDistribution joint_distinguishable(const SingleParticleUnitary& u, std::size_t in1,
                                        std::size_t in2) {
    check_inputs(u, in1, in2);
    JointDistribution d = make_pre(u, JointModel::distinguishable);
    const auto u1 = u.entries.row(static_cast<Eigen::Index>(in1));
    const auto u2 = u.entries.row(static_cast<Eigen::Index>(in2));
    const Eigen::Index n = d.probs.rows();
    for (Eigen::Index p = 0; p < n; ++p) {
        d.probs(p, p) = std::norm(u1(p) * u2(p));
        for (Eigen::Index q = p + 1; q < n; ++q) {
            const double v = std::norm(u1(p) * u2(q)) + std::norm(u1(q) * u2(p));
            d.probs(p, q) = v;
            d.probs(q, p) = v;
        }
    }
    return d;
}

JointDistribution joint_classical(const SingleParticleUnitary& u, std::size_t in1, std::size_t in2) {
    check_inputs(u, in1, in2);
    JointDistribution d = make_pre(u, JointModel::classical);
    const auto u1 = u.entries.row(static_cast<Eigen::Index>(in1));
    const auto u2 = u.entries.row(static_cast<Eigen::Index>(in2));
    const Eigen::Index n = d.probs.rows();

    // I_p(theta) = A_p + 2 Re(e^{i theta} c_p), A_p = |U1p|^2 + |U2p|^2, c_p = conj(U1p) U2p;
    // averaging over theta leaves <I_p I_q> = A_p A_q + 2 Re(c_p conj(c_q)).
    Eigen::MatrixXd gamma(n, n);
    for (Eigen::Index p = 0; p < n; ++p) {
        const double ap = std::norm(u1(p)) + std::norm(u2(p));
        const cplx cp = std::conj(u1(p)) * u2(p);
        for (Eigen::Index q = 0; q < n; ++q) {
            const double aq = std::norm(u1(q)) + std::norm(u2(q));
            const cplx cq = std::conj(u1(q)) * u2(q);
            gamma(p, q) = ap * aq + 2.0 * std::real(cp * std::conj(cq));
        }
    }
    d.probs = gamma;
    d.probs.diagonal() *= 0.5;
    const double t = d.total();
    if (t > 0.0) {
        d.probs /= t;
    }
    d.gamma = std::move(gamma);
    return d;
}

JointDistribution joint(JointModel model, const SingleParticleUnitary& u, std::size_t in1,
                        std::size_t in2) {
    switch (model) {
    case JointModel::bosonic:
        return joint_bosonic(u, in1, in2);
    case JointModel::distinguishable:
        return joint_distinguishable(u, in1, in2);
    case JointModel::classical:
        return joint_classical(u, in1, in2);
    }
    throw InvalidParameter("unknown joint model");
}

JointDistribution bs_postselect(const JointDistribution& pre) {
    if (pre.stage != Stage::pre_bs) {
        throw StageError("beam-splitter post-selection needs a pre-BS distribution");
    }
    JointDistribution post;
    post.stage = Stage::post_bs;
    post.model = pre.model;
    post.labels = pre.labels;
    post.probs = pre.probs / 4.0;
    post.probs.diagonal() = pre.probs.diagonal() / 2.0;
    return post;
}

OamJoint symmetrized_oam_joint(const JointDistribution& post) {
    if (post.stage != Stage::post_bs) {
        throw StageError("symmetrized OAM joint needs a post-BS distribution");
    }
    OamJoint summed;
    const auto n = post.labels.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            summed[{post.labels[i].m, post.labels[j].m}] +=
                post.probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    OamJoint out;
    double total = 0.0;
    for (const auto& [key, v] : summed) {
        const auto swapped = summed.find({key.second, key.first});
        const double other = swapped == summed.end() ? 0.0 : swapped->second;
        const double avg = 0.5 * (v + other);
        out[key] = avg;
        total += avg;
    }
    if (total <= 0.0) {
        throw EmptyDistribution("post-selected distribution carries no probability");
    }
    for (auto& [key, v] : out) {
        v /= total;
    }
    return out;
}

double total_variation(const OamJoint& a, const OamJoint& b) {
    std::set<std::pair<int, int>> keys;
    for (const auto& [k, v] : a) keys.insert(k);
    for (const auto& [k, v] : b) keys.insert(k);
    double acc = 0.0;
    for (const auto& k : keys) {
        const auto ia = a.find(k);
        const auto ib = b.find(k);
        acc += std::abs((ia == a.end() ? 0.0 : ia->second) - (ib == b.end() ? 0.0 : ib->second));
    }
    return 0.5 * acc;
}

}  // namespace oamqw
