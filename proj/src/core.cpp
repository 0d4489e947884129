#include "oamqw/core.hpp"

#include "oamqw/errors.hpp"

#include <cmath>
#include <sstream>

namespace oamqw {

namespace {

constexpr cplx I{0.0, 1.0};

}  // namespace

bool CoinState::is_normalized(double tol) const { return std::abs(norm_squared() - 1.0) <= tol; }

CoinState CoinState::normalized() const {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) {
        throw InvalidParameter("coin state has zero norm");
    }
    return {amp_L / n, amp_R / n};
}

void WaveplateParams::validate() const {
    if (!(retardation >= 0.0 && retardation < 2.0 * pi)) {
        throw InvalidParameter("waveplate retardation must lie in [0, 2pi)");
    }
    if (!(orientation >= 0.0 && orientation < pi)) {
        throw InvalidParameter("waveplate orientation must lie in [0, pi)");
    }
}

void QPlateParams::validate() const {
    if (!(delta >= 0.0 && delta <= pi)) {
        throw InvalidParameter("q-plate retardation delta must lie in [0, pi]");
    }
    if (!std::isfinite(alpha0)) {
        throw InvalidParameter("q-plate alpha0 must be finite");
    }
}

CoinOperator waveplate_op(const WaveplateParams& params) {
    params.validate();
    const double c = std::cos(params.retardation / 2.0);
    const double s = std::sin(params.retardation / 2.0);
    const cplx e = std::exp(2.0 * I * params.orientation);
    Mat2 m;
    m(0, 0) = c;
    m(0, 1) = -I * s * std::conj(e);
    m(1, 0) = -I * s * e;
    m(1, 1) = c;
    return {m, params};
}

StepOperator::StepOperator() { bands_.emplace(0, Mat2::Identity()); }

StepOperator StepOperator::from_coin(const CoinOperator& coin) {
    StepOperator op;
    op.bands_[0] = coin.matrix;
    op.elements_.emplace_back(coin);
    return op;
}

StepOperator StepOperator::from_qplate(const QPlateParams& params) {
    params.validate();
    const double c = std::cos(params.delta / 2.0);
    const double s = std::sin(params.delta / 2.0);
    const int shift = params.shift();
    const cplx raise = -I * s * std::exp(2.0 * I * params.alpha0);   // L,m -> R,m+2q
    const cplx lower = -I * s * std::exp(-2.0 * I * params.alpha0);  // R,m -> L,m-2q

    StepOperator op;
    op.bands_.clear();
    op.bands_[0] = Mat2::Zero();
    op.bands_[0](0, 0) = c;
    op.bands_[0](1, 1) = c;
    if (shift == 0) {
        // q = 0: no OAM exchange, only a polarization flip.
        op.bands_[0](1, 0) += raise;
        op.bands_[0](0, 1) += lower;
    } else {
        Mat2 up = Mat2::Zero();
        up(1, 0) = raise;
        Mat2 down = Mat2::Zero();
        down(0, 1) = lower;
        op.bands_[shift] = up;
        op.bands_[-shift] = down;
    }
    op.elements_.emplace_back(params);
    return op;
}

StepOperator qplate_op(const QPlateParams& params) { return StepOperator::from_qplate(params); }

Mat2 StepOperator::band(int shift) const {
    const auto it = bands_.find(shift);
    return it == bands_.end() ? Mat2::Zero() : it->second;
}

int StepOperator::min_shift() const { return bands_.begin()->first; }

int StepOperator::max_shift() const { return bands_.rbegin()->first; }

StepOperator StepOperator::then(const StepOperator& next) const {
    StepOperator out;
    out.bands_.clear();
    for (const auto& [d_next, m_next] : next.bands_) {
        for (const auto& [d_this, m_this] : bands_) {
            auto [it, inserted] = out.bands_.try_emplace(d_next + d_this, Mat2::Zero());
            it->second += m_next * m_this;
        }
    }
    out.elements_ = elements_;
    out.elements_.insert(out.elements_.end(), next.elements_.begin(), next.elements_.end());
    return out;
}

Eigen::MatrixXcd StepOperator::dense(int m_min, int m_max) const {
    if (m_max < m_min) {
        throw InvalidParameter("dense export needs m_min <= m_max");
    }
    const int n = 2 * (m_max - m_min + 1);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(n, n);
    for (int m = m_min; m <= m_max; ++m) {
        for (const auto& [shift, block] : bands_) {
            const int out = m + shift;
            if (out < m_min || out > m_max) {
                continue;
            }
            u.block<2, 2>(2 * (out - m_min), 2 * (m - m_min)) += block;
        }
    }
    return u;
}

StepOperator compose_step(std::span<const StepElement> elements) {
    StepOperator acc;
    for (const auto& el : elements) {
        std::visit(
            [&acc](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, CoinOperator>) {
                    acc = acc.then(StepOperator::from_coin(e));
                } else {
                    acc = acc.then(e);
                }
            },
            el);
    }
    return acc;
}

StepOperator compose_step(std::initializer_list<StepElement> elements) {
    return compose_step(std::span<const StepElement>(elements.begin(), elements.size()));
}

WalkState::WalkState(int m_min, int m_max, double truncation_tol)
    : m_min_(m_min), m_max_(m_max), truncation_tol_(truncation_tol) {
    if (m_max < m_min) {
        throw InvalidParameter("OAM window needs m_min <= m_max");
    }
    if (!(truncation_tol >= 0.0)) {
        throw InvalidParameter("truncation tolerance must be non-negative");
    }
    amps_.assign(2 * sites(), cplx{0.0, 0.0});
}

WalkState WalkState::localized(const CoinState& coin, int m, int m_min, int m_max,
                               double truncation_tol) {
    WalkState s(m_min, m_max, truncation_tol);
    s.set(Pol::L, m, coin.amp_L);
    s.set(Pol::R, m, coin.amp_R);
    return s;
}

std::size_t WalkState::index(Pol pol, int m) const {
    return 2 * static_cast<std::size_t>(m - m_min_) + pol_index(pol);
}

cplx WalkState::amp(Pol pol, int m) const {
    return contains(m) ? amps_[index(pol, m)] : cplx{0.0, 0.0};
}

void WalkState::set(Pol pol, int m, cplx value) {
    if (!contains(m)) {
        std::ostringstream os;
        os << "m=" << m << " outside window [" << m_min_ << ", " << m_max_ << "]";
        throw WindowOverflow(os.str());
    }
    amps_[index(pol, m)] = value;
}

void WalkState::add(Pol pol, int m, cplx value) {
    if (!contains(m)) {
        if (std::abs(value) > truncation_tol_) {
            std::ostringstream os;
            os << "amplitude " << std::abs(value) << " leaks to m=" << m << " outside window ["
               << m_min_ << ", " << m_max_ << "]; enlarge the window";
            throw WindowOverflow(os.str());
        }
        return;
    }
    amps_[index(pol, m)] += value;
}

double WalkState::norm() const {
    double acc = 0.0;
    for (const auto& a : amps_) {
        acc += std::norm(a);
    }
    return std::sqrt(acc);
}

double WalkState::population(int m) const {
    return std::norm(amp(Pol::L, m)) + std::norm(amp(Pol::R, m));
}

Eigen::VectorXcd WalkState::to_vector() const {
    return Eigen::Map<const Eigen::VectorXcd>(amps_.data(), static_cast<Eigen::Index>(amps_.size()));
}

WalkState WalkState::from_vector(const Eigen::VectorXcd& v, int m_min, int m_max,
                                 double truncation_tol) {
    WalkState s(m_min, m_max, truncation_tol);
    if (static_cast<std::size_t>(v.size()) != s.amps_.size()) {
        throw InvalidParameter("vector length does not match the OAM window");
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        s.amps_[static_cast<std::size_t>(i)] = v(i);
    }
    return s;
}

WalkState apply(const StepOperator& op, const WalkState& state) {
    return apply(op, state, ShiftWeight{});
}

WalkState apply(const StepOperator& op, const WalkState& state, const ShiftWeight& weight) {
    WalkState out(state.m_min(), state.m_max(), state.truncation_tol());
    for (int m = state.m_min(); m <= state.m_max(); ++m) {
        const Eigen::Vector2cd in{state.amp(Pol::L, m), state.amp(Pol::R, m)};
        if (in.isZero(0.0)) {
            continue;
        }
        for (const auto& [shift, block] : op.bands()) {
            Eigen::Vector2cd v = block * in;
            if (shift != 0 && weight) {
                v *= weight(m, m + shift);
            }
            out.add(Pol::L, m + shift, v(0));
            out.add(Pol::R, m + shift, v(1));
        }
    }
    return out;
}

WalkState evolve(const WalkState& state, const StepOperator& step, int n) {
    if (n < 0) {
        throw InvalidParameter("number of steps must be non-negative");
    }
    WalkState s = state;
    for (int k = 0; k < n; ++k) {
        s = apply(step, s);
    }
    return s;
}

}  // namespace oamqw
