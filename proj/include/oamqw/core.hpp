#pragma once

// SAM (polarization) x OAM state space and the optical-element operators that
// make up one step of the walk.
//
// Conventions used throughout:
//   * Coin basis is circular, ordered {L, R}; 2x2 matrices act on column
//     vectors (amp_L, amp_R) and are indexed [out][in].
//   * In the linear (H, V) basis, |L> = (|H> + i|V>)/sqrt(2) and
//     |R> = (|H> - i|V>)/sqrt(2).
//   * Retarders are symmetric-phase Jones matrices with the fast axis at the
//     orientation angle, i.e. diag(e^{-i G/2}, e^{+i G/2}) in the axis frame.
//   * Global phases are kept everywhere; two-photon interference depends on
//     them.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace oamqw {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double pi = std::numbers::pi;

enum class Pol : int { L = 0, R = 1 };

inline constexpr std::size_t pol_index(Pol p) { return static_cast<std::size_t>(p); }

struct CoinState {
    cplx amp_L{1.0, 0.0};
    cplx amp_R{0.0, 0.0};

    double norm_squared() const { return std::norm(amp_L) + std::norm(amp_R); }
    bool is_normalized(double tol = 1e-12) const;
    CoinState normalized() const;
};

struct WaveplateParams {
    double retardation = 0.0;  // radians, [0, 2pi)
    double orientation = 0.0;  // radians from horizontal, [0, pi)

    static WaveplateParams quarter_wave(double orientation) { return {pi / 2.0, orientation}; }
    static WaveplateParams half_wave(double orientation) { return {pi, orientation}; }

    void validate() const;
};

// Polarization-only unitary. `source` records the plate it came from, if any.
struct CoinOperator {
    Mat2 matrix = Mat2::Identity();
    std::optional<WaveplateParams> source;
};

struct QPlateParams {
    int twice_q = 1;     // topological charge q = twice_q / 2
    double delta = pi;   // birefringent retardation, [0, pi]
    double alpha0 = 0.0; // optical-axis direction at phi = 0

    double q() const { return twice_q / 2.0; }
    int shift() const { return twice_q; }

    void validate() const;
};

using OpticalElement = std::variant<CoinOperator, QPlateParams>;

// Translation-invariant operator on the SAM x OAM space, stored as one 2x2
// polarization block per OAM shift: out(m + shift) += bands[shift] * in(m).
class StepOperator {
public:
    using Bands = std::map<int, Mat2>;

    StepOperator();  // identity

    static StepOperator from_coin(const CoinOperator& coin);
    static StepOperator from_qplate(const QPlateParams& params);

    const Bands& bands() const { return bands_; }
    const std::vector<OpticalElement>& elements() const { return elements_; }

    Mat2 band(int shift) const;
    int min_shift() const;
    int max_shift() const;

    // Operator for "apply *this, then next".
    StepOperator then(const StepOperator& next) const;

    // Dense matrix on the window [m_min, m_max]; basis index 2*(m - m_min) + pol.
    // Contributions that would leave the window are dropped.
    Eigen::MatrixXcd dense(int m_min, int m_max) const;

private:
    Bands bands_;
    std::vector<OpticalElement> elements_;
};

CoinOperator waveplate_op(const WaveplateParams& params);
StepOperator qplate_op(const QPlateParams& params);

using StepElement = std::variant<CoinOperator, StepOperator>;

// Product of the elements in beam-traversal order (first element acts first).
StepOperator compose_step(std::span<const StepElement> elements);
StepOperator compose_step(std::initializer_list<StepElement> elements);

class WalkState {
public:
    static constexpr double default_truncation_tol = 1e-12;

    WalkState(int m_min, int m_max, double truncation_tol = default_truncation_tol);

    static WalkState localized(const CoinState& coin, int m, int m_min, int m_max,
                               double truncation_tol = default_truncation_tol);

    int m_min() const { return m_min_; }
    int m_max() const { return m_max_; }
    std::size_t sites() const { return static_cast<std::size_t>(m_max_ - m_min_ + 1); }
    double truncation_tol() const { return truncation_tol_; }
    bool contains(int m) const { return m >= m_min_ && m <= m_max_; }

    cplx amp(Pol pol, int m) const;
    void set(Pol pol, int m, cplx value);
    void add(Pol pol, int m, cplx value);

    double norm() const;
    double population(int m) const;  // summed over polarization

    // Basis index 2*(m - m_min) + pol, matching StepOperator::dense.
    Eigen::VectorXcd to_vector() const;
    static WalkState from_vector(const Eigen::VectorXcd& v, int m_min, int m_max,
                                 double truncation_tol = default_truncation_tol);

private:
    std::size_t index(Pol pol, int m) const;

    int m_min_;
    int m_max_;
    double truncation_tol_;
    std::vector<cplx> amps_;
};

// Extra real factor on shifted (m_in != m_out) contributions; used for
// radial-mode losses at the q-plate.
using ShiftWeight = std::function<double(int m_in, int m_out)>;

WalkState apply(const StepOperator& op, const WalkState& state);
WalkState apply(const StepOperator& op, const WalkState& state, const ShiftWeight& weight);

WalkState evolve(const WalkState& state, const StepOperator& step, int n);

// Half-width of the default window for an n-step walk with per-step reach
// `max_shift`: [-(n*max_shift + 2), n*max_shift + 2].
inline int default_half_width(int n_steps, int max_shift = 1) { return n_steps * max_shift + 2; }

}  // namespace oamqw
