#pragma once

#include "oamqw/two_photon.hpp"
#include "oamqw/walk.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace oamqw {

// S = (sum sqrt(P P'))^2 / (sum P * sum P'); 1 iff the two are proportional.
double similarity(std::span<const double> p, std::span<const double> q);
double similarity(const std::map<int, double>& p, const std::map<int, double>& q);
double similarity(const OamDistribution& p, const OamDistribution& q);
double similarity(const OamJoint& p, const OamJoint& q);

// Post-BS correlation inequalities T_pq = k sqrt(P_pp P_qq) - P_pq < 0 with
// k = 1/3 for two incoherent classical sources and k = 1 for two
// distinguishable photons. T > 0 certifies a violation.
enum class InequalityKind { classical, distinguishable };

double bound_factor(InequalityKind kind);
std::string to_string(InequalityKind kind);

struct PairViolation {
    Label p;
    Label q;
    double t = 0.0;
    std::optional<double> sigma_t;
    std::optional<double> significance;  // t / sigma_t
};

struct ViolationReport {
    InequalityKind kind = InequalityKind::classical;
    std::vector<PairViolation> pairs;  // only pairs with t > 0
};

// Coincidence counts keyed by (label at detector 1, label at detector 2).
// When `merged`, (p, q) and (q, p) share one cell stored under p <= q.
struct CountTable {
    std::map<std::pair<Label, Label>, std::int64_t> counts;
    bool merged = true;

    void add(const Label& p, const Label& q, std::int64_t n);
    std::int64_t cell(const Label& p, const Label& q) const;
    std::int64_t total() const;
    std::vector<Label> labels() const;
};

// Every tested pair p != q (unordered for symmetric data), including those
// that satisfy the bound; pairs whose three cells are all zero are skipped.
std::vector<PairViolation> inequality_terms(const JointDistribution& post, InequalityKind kind);

ViolationReport classical_inequality(const JointDistribution& post);
ViolationReport distinguishable_inequality(const JointDistribution& post);
ViolationReport classical_inequality(const CountTable& counts);
ViolationReport distinguishable_inequality(const CountTable& counts);

// T and its first-order Poisson uncertainty for one pair, in probability units
// (counts / table total). Zero cells carry sigma = 1 count.
PairViolation pair_significance(const CountTable& counts, const Label& p, const Label& q,
                                InequalityKind kind);

// Violating pairs with sigma and significance filled in.
ViolationReport significance(const CountTable& counts, InequalityKind kind);

// Parametric bootstrap of sigma_T: each cell redrawn from Poisson(observed).
double bootstrap_sigma(const CountTable& counts, const Label& p, const Label& q,
                       InequalityKind kind, int samples, std::uint64_t seed);

}  // namespace oamqw
