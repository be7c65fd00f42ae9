#pragma once

#include <cstddef>
#include <vector>

#include "iqpflow/errors.hpp"

namespace iqp {

/// Strict upper-triangular table of values indexed by pairs i < j, stored in
/// lexicographic (i, j) order. Used for both couplings J_ij and angles theta_ij.
class PairTable {
public:
    PairTable() = default;
    explicit PairTable(std::size_t n) : n_(n), values_(pair_count(n), 0.0) {}

    static constexpr std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

    /// Position of (i, j), i < j, in lexicographic order.
    static constexpr std::size_t index(std::size_t i, std::size_t j, std::size_t n) {
        return i * n - i * (i + 1) / 2 + (j - i - 1);
    }

    std::size_t size() const { return n_; }
    std::size_t pairs() const { return values_.size(); }

    /// Symmetric access; the diagonal reads as zero.
    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return i < j ? values_[index(i, j, n_)] : values_[index(j, i, n_)];
    }
    double& at(std::size_t i, std::size_t j) {
        if (i == j || i >= n_ || j >= n_) {
            throw DimensionError("pair index out of range or diagonal");
        }
        return i < j ? values_[index(i, j, n_)] : values_[index(j, i, n_)];
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    /// Dense symmetric n*n row-major copy with a zero diagonal.
    std::vector<double> dense() const {
        std::vector<double> m(n_ * n_, 0.0);
        std::size_t k = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j, ++k) {
                m[i * n_ + j] = values_[k];
                m[j * n_ + i] = values_[k];
            }
        }
        return m;
    }

    friend bool operator==(const PairTable&, const PairTable&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

}  // namespace iqp
