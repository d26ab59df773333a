#pragma once
// Finite-state transition matrices and the payoff data attached to an
// optimal stopping problem on states {0, 1, ..., N}.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace zeitnot {

// Convention for row 0, the "secured/out of the game" state of the model
// chains: either it absorbs (p00 = 1, the default used by the solvers) or it
// restarts the inspection process at state 1 (the published row, kept
// selectable for audits).
enum class ZeroStateRule { absorbing, restart };

// Validation regime. `stochastic` enforces unit row sums; `diagnostic`
// admits defective rows so that a formula can be inspected exactly as
// printed (the bivariant chain needs this).
enum class RowMode { stochastic, diagnostic };

class TransitionMatrix {
  public:
    explicit TransitionMatrix(int state_count, RowMode mode = RowMode::stochastic)
        : mode_(mode) {
        if (state_count < 1)
            throw std::invalid_argument("TransitionMatrix: need at least one state");
        rows_.assign(static_cast<std::size_t>(state_count),
                     std::vector<double>(static_cast<std::size_t>(state_count), 0.0));
    }

    int size() const { return static_cast<int>(rows_.size()); }
    RowMode mode() const { return mode_; }

    double& at(int i, int j) {
        return rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    double at(int i, int j) const {
        return rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    const std::vector<double>& row(int i) const {
        return rows_[static_cast<std::size_t>(i)];
    }

    std::vector<double> row_sums() const {
        std::vector<double> sums;
        sums.reserve(rows_.size());
        for (const auto& r : rows_) {
            double s = 0.0;
            for (double v : r) s += v;
            sums.push_back(s);
        }
        return sums;
    }

    // In stochastic mode every entry must be a probability and every row must
    // sum to 1 within 1e-12; diagnostic matrices only need finite entries.
    void validate() const {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            double sum = 0.0;
            for (double v : rows_[i]) {
                if (!std::isfinite(v))
                    throw std::invalid_argument("TransitionMatrix: non-finite entry in row " +
                                                std::to_string(i));
                if (mode_ == RowMode::stochastic && v < -1e-15)
                    throw std::invalid_argument("TransitionMatrix: negative entry in row " +
                                                std::to_string(i));
                sum += v;
            }
            if (mode_ == RowMode::stochastic && std::fabs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("TransitionMatrix: row " + std::to_string(i) +
                                            " sums to " + std::to_string(sum));
        }
    }

    // (Pv)(i) = sum_j p_ij v(j)
    std::vector<double> apply(const std::vector<double>& v) const {
        if (v.size() != rows_.size())
            throw std::invalid_argument("TransitionMatrix::apply: size mismatch");
        std::vector<double> out(rows_.size(), 0.0);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            double acc = 0.0;
            const auto& r = rows_[i];
            for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * v[j];
            out[i] = acc;
        }
        return out;
    }

  private:
    std::vector<std::vector<double>> rows_;
    RowMode mode_;
};

// Reward f (>= 0 per state), per-state fee c charged while continuing
// (may be negative), and discount alpha in (0, 1].
struct PayoffSpec {
    std::vector<double> reward;
    std::vector<double> fee;
    double alpha = 1.0;

    void validate(int states) const {
        if (static_cast<int>(reward.size()) != states ||
            static_cast<int>(fee.size()) != states)
            throw std::invalid_argument("PayoffSpec: vector length must match state count");
        for (double f : reward) {
            if (!std::isfinite(f) || f < 0.0)
                throw std::invalid_argument("PayoffSpec: rewards must be finite and >= 0");
        }
        for (double c : fee)
            if (!std::isfinite(c))
                throw std::invalid_argument("PayoffSpec: fees must be finite");
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("PayoffSpec: alpha must lie in (0, 1]");
    }
};

} // namespace zeitnot
