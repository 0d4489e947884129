#include "oamqw/analysis.hpp"

#include "oamqw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace oamqw {

namespace {

double similarity_core(const std::vector<std::pair<double, double>>& pairs) {
    double cross = 0.0;
    double sp = 0.0;
    double sq = 0.0;
    for (const auto& [a, b] : pairs) {
        if (a < 0.0 || b < 0.0 || !std::isfinite(a) || !std::isfinite(b)) {
            throw InvalidParameter("similarity needs finite non-negative entries");
        }
        cross += std::sqrt(a * b);
        sp += a;
        sq += b;
    }
    if (sp <= 0.0 || sq <= 0.0) {
        throw EmptyDistribution("similarity needs at least one nonzero entry in each distribution");
    }
    return std::min(1.0, cross * cross / (sp * sq));
}

template <class Key>
double similarity_maps(const std::map<Key, double>& p, const std::map<Key, double>& q) {
    std::set<Key> keys;
    for (const auto& [k, v] : p) keys.insert(k);
    for (const auto& [k, v] : q) keys.insert(k);
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(keys.size());
    for (const auto& k : keys) {
        const auto ip = p.find(k);
        const auto iq = q.find(k);
        pairs.emplace_back(ip == p.end() ? 0.0 : ip->second, iq == q.end() ? 0.0 : iq->second);
    }
    return similarity_core(pairs);
}

// A cell value in counts with its Poisson sigma (floored at one count).
struct Cell {
    double value;
    double sigma;
};

Cell diagonal_cell(const CountTable& t, const Label& p) {
    const auto n = static_cast<double>(t.cell(p, p));
    return {n, std::max(std::sqrt(n), 1.0)};
}

// Estimate of the ordered coincidence count "p at detector 1, q at detector 2".
Cell cross_cell(const CountTable& t, const Label& p, const Label& q) {
    const auto n = static_cast<double>(t.cell(p, q));
    const double sigma = std::max(std::sqrt(n), 1.0);
    if (t.merged) {
        return {n / 2.0, sigma / 2.0};
    }
    return {n, sigma};
}

std::vector<std::pair<Label, Label>> tested_pairs(const CountTable& t) {
    const std::vector<Label> labels = t.labels();
    std::vector<std::pair<Label, Label>> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (i == j || (t.merged && j < i)) {
                continue;
            }
            out.emplace_back(labels[i], labels[j]);
        }
    }
    return out;
}

ViolationReport report_from_counts(const CountTable& counts, InequalityKind kind, bool with_sigma) {
    if (counts.total() <= 0) {
        throw InsufficientCounts("count table is empty");
    }
    ViolationReport report;
    report.kind = kind;
    for (const auto& [p, q] : tested_pairs(counts)) {
        if (counts.cell(p, p) == 0 && counts.cell(q, q) == 0 && counts.cell(p, q) == 0) {
            continue;
        }
        PairViolation v = pair_significance(counts, p, q, kind);
        if (v.t > 0.0) {
            if (!with_sigma) {
                v.sigma_t.reset();
                v.significance.reset();
            }
            report.pairs.push_back(v);
        }
    }
    return report;
}

ViolationReport report_from_distribution(const JointDistribution& post, InequalityKind kind) {
    ViolationReport report;
    report.kind = kind;
    for (const auto& term : inequality_terms(post, kind)) {
        const auto i = static_cast<Eigen::Index>(post.labels.index_of(term.p));
        const auto j = static_cast<Eigen::Index>(post.labels.index_of(term.q));
        const double scale = std::max({post.probs(i, i), post.probs(j, j), post.probs(i, j)});
        // Ignore round-off on exact boundary cases.
        if (term.t > 1e-12 * scale) {
            report.pairs.push_back(term);
        }
    }
    return report;
}

std::pair<Label, Label> key_for(const Label& p, const Label& q, bool merged) {
    if (merged && q < p) {
        return {q, p};
    }
    return {p, q};
}

}  // namespace

double similarity(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw InvalidParameter("similarity needs distributions over the same index set");
    }
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        pairs.emplace_back(p[i], q[i]);
    }
    return similarity_core(pairs);
}

double similarity(const std::map<int, double>& p, const std::map<int, double>& q) {
    return similarity_maps(p, q);
}

double similarity(const OamDistribution& p, const OamDistribution& q) {
    return similarity_maps(p.probs, q.probs);
}

double similarity(const OamJoint& p, const OamJoint& q) { return similarity_maps(p, q); }

double bound_factor(InequalityKind kind) {
    return kind == InequalityKind::classical ? 1.0 / 3.0 : 1.0;
}

std::string to_string(InequalityKind kind) {
    return kind == InequalityKind::classical ? "classical" : "distinguishable";
}

void CountTable::add(const Label& p, const Label& q, std::int64_t n) {
    if (n < 0) {
        throw NegativeCount("negative coincidence count for (" + to_string(p) + "; " +
                            to_string(q) + ")");
    }
    counts[key_for(p, q, merged)] += n;
}

std::int64_t CountTable::cell(const Label& p, const Label& q) const {
    const auto it = counts.find(key_for(p, q, merged));
    return it == counts.end() ? 0 : it->second;
}

std::int64_t CountTable::total() const {
    std::int64_t acc = 0;
    for (const auto& [k, n] : counts) {
        acc += n;
    }
    return acc;
}

std::vector<Label> CountTable::labels() const {
    std::set<Label> s;
    for (const auto& [k, n] : counts) {
        s.insert(k.first);
        s.insert(k.second);
    }
    return {s.begin(), s.end()};
}

std::vector<PairViolation> inequality_terms(const JointDistribution& post, InequalityKind kind) {
    if (post.stage != Stage::post_bs) {
        throw StageError("inequalities are stated for post-BS coincidence probabilities");
    }
    const double k = bound_factor(kind);
    std::vector<PairViolation> out;
    const auto n = static_cast<Eigen::Index>(post.labels.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double pii = post.probs(i, i);
            const double pjj = post.probs(j, j);
            const double pij = post.probs(i, j);
            if (pii == 0.0 && pjj == 0.0 && pij == 0.0) {
                continue;
            }
            PairViolation v;
            v.p = post.labels[static_cast<std::size_t>(i)];
            v.q = post.labels[static_cast<std::size_t>(j)];
            v.t = k * std::sqrt(pii * pjj) - pij;
            out.push_back(v);
        }
    }
    return out;
}

ViolationReport classical_inequality(const JointDistribution& post) {
    return report_from_distribution(post, InequalityKind::classical);
}

ViolationReport distinguishable_inequality(const JointDistribution& post) {
    return report_from_distribution(post, InequalityKind::distinguishable);
}

ViolationReport classical_inequality(const CountTable& counts) {
    return report_from_counts(counts, InequalityKind::classical, false);
}

ViolationReport distinguishable_inequality(const CountTable& counts) {
    return report_from_counts(counts, InequalityKind::distinguishable, false);
}

PairViolation pair_significance(const CountTable& counts, const Label& p, const Label& q,
                                InequalityKind kind) {
    if (p == q) {
        throw InvalidParameter("inequality pairs need p != q");
    }
    const Cell a = diagonal_cell(counts, p);
    const Cell b = diagonal_cell(counts, q);
    const Cell c = cross_cell(counts, p, q);
    if (a.value == 0.0 && b.value == 0.0 && c.value == 0.0) {
        throw InsufficientCounts("no coincidences recorded for pair (" + to_string(p) + "; " +
                                 to_string(q) + ")");
    }
    const double total = static_cast<double>(counts.total());
    const double k = bound_factor(kind);

    const double t = k * std::sqrt(a.value * b.value) - c.value;
    // d sqrt(ab)/da = sqrt(b)/(2 sqrt(a)); a zero cell is evaluated at its one-count floor.
    const double dta = 0.5 * k * std::sqrt(b.value) / std::sqrt(std::max(a.value, 1.0));
    const double dtb = 0.5 * k * std::sqrt(a.value) / std::sqrt(std::max(b.value, 1.0));
    const double var = dta * dta * a.sigma * a.sigma + dtb * dtb * b.sigma * b.sigma +
                       c.sigma * c.sigma;

    PairViolation v;
    v.p = p;
    v.q = q;
    v.t = t / total;
    v.sigma_t = std::sqrt(var) / total;
    v.significance = t / std::sqrt(var);
    return v;
}

ViolationReport significance(const CountTable& counts, InequalityKind kind) {
    return report_from_counts(counts, kind, true);
}

double bootstrap_sigma(const CountTable& counts, const Label& p, const Label& q,
                       InequalityKind kind, int samples, std::uint64_t seed) {
    if (samples < 2) {
        throw InvalidParameter("bootstrap needs at least two samples");
    }
    const double total = static_cast<double>(counts.total());
    if (total <= 0.0) {
        throw InsufficientCounts("count table is empty");
    }
    const double k = bound_factor(kind);
    const auto npp = static_cast<double>(counts.cell(p, p));
    const auto nqq = static_cast<double>(counts.cell(q, q));
    const auto npq = static_cast<double>(counts.cell(p, q));
    const double cross_scale = counts.merged ? 0.5 : 1.0;

    std::mt19937_64 rng(seed);
    auto draw = [&rng](double mean) {
        if (mean <= 0.0) {
            return 0.0;
        }
        std::poisson_distribution<long long> d(mean);
        return static_cast<double>(d(rng));
    };
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = (k * std::sqrt(draw(npp) * draw(nqq)) - cross_scale * draw(npq)) / total;
        sum += t;
        sum_sq += t * t;
    }
    const double mean = sum / samples;
    return std::sqrt(std::max(0.0, (sum_sq - samples * mean * mean) / (samples - 1)));
}

}  // namespace oamqw
