#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace ospat {

// Dense rows x cols matrix of pairing costs. An entry equal to kForbidden marks
// a pairing the solver must never return; every other entry must be finite.
class CostMatrix {
 public:
  static constexpr double kForbidden = std::numeric_limits<double>::infinity();

  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return cost_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return cost_[r * cols_ + c]; }
  bool forbidden(std::size_t r, std::size_t c) const { return (*this)(r, c) == kForbidden; }

  // Returns the matrix with rows and columns swapped.
  CostMatrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> cost_;
};

struct Assignment {
  // (row, col) pairs in ascending row order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;
};

// Minimum-cost rectangular assignment (Munkres/Hungarian with potentials).
//
// Returns min(rows, cols) pairs, or fewer when forbidden entries make a full
// matching impossible; the number of pairs is maximised first, then the cost
// is minimised. Among optimal matchings the lexicographically smallest pair
// list is returned. Throws InvalidInput on NaN or -inf entries.
Assignment solve_assignment(const CostMatrix& m);

// Exhaustive-enumeration reference with the same contract as
// solve_assignment. Throws SizeError when min(rows, cols) > 8 or
// max(rows, cols) > 12.
Assignment brute_force_assignment(const CostMatrix& m);

}  // namespace ospat
