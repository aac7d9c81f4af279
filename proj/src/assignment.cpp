#include "ospat/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include "ospat/errors.hpp"

namespace ospat {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), cost_(rows * cols, fill) {}

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  CostMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw InvalidInput("ragged cost matrix");
    std::copy(rows[r].begin(), rows[r].end(), m.cost_.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  return m;
}

CostMatrix CostMatrix::transposed() const {
  CostMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

namespace {

// Cost compared lexicographically: constraint violations (used while forcing
// pairs during tie-breaking), then forbidden pairs, then the real cost. This
// keeps forbidden entries exact instead of relying on a big-M constant.
struct LexCost {
  std::int64_t violations = 0;
  std::int64_t forbidden = 0;
  double value = 0.0;

  LexCost operator+(const LexCost& o) const { return {violations + o.violations, forbidden + o.forbidden, value + o.value}; }
  LexCost operator-(const LexCost& o) const { return {violations - o.violations, forbidden - o.forbidden, value - o.value}; }
  LexCost& operator+=(const LexCost& o) { return *this = *this + o; }
  LexCost& operator-=(const LexCost& o) { return *this = *this - o; }
  bool operator<(const LexCost& o) const {
    if (violations != o.violations) return violations < o.violations;
    if (forbidden != o.forbidden) return forbidden < o.forbidden;
    return value < o.value;
  }
};

constexpr LexCost kInfinity{std::int64_t{1} << 40, 0, 0.0};

struct SquareSolution {
  std::vector<std::size_t> col_of_row;
  std::vector<LexCost> u;  // row potentials, index 1..n
  std::vector<LexCost> v;  // column potentials, index 1..n
  LexCost total;
};

// Shortest-augmenting-path Hungarian method on an n x n matrix.
SquareSolution hungarian(const std::vector<LexCost>& a, std::size_t n) {
  std::vector<LexCost> u(n + 1), v(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<LexCost> minv(n + 1, kInfinity);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      LexCost delta = kInfinity;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const LexCost cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  SquareSolution s;
  s.col_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) s.col_of_row[p[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) s.total += a[i * n + s.col_of_row[i]];
  s.u = std::move(u);
  s.v = std::move(v);
  return s;
}

void validate(const CostMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double x = m(r, c);
      if (std::isnan(x) || x == -CostMatrix::kForbidden)
        throw InvalidInput("cost matrix entries must be finite or kForbidden");
    }
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-10 * std::max({1.0, std::abs(a), std::abs(b)}); }

bool same_optimum(const LexCost& a, const LexCost& b) {
  return a.violations == b.violations && a.forbidden == b.forbidden && near(a.value, b.value);
}

// Padded n x n problem: dummy rows/columns cost nothing and represent
// "unassigned".
class PaddedProblem {
 public:
  explicit PaddedProblem(const CostMatrix& m) : m_(m), n_(std::max(m.rows(), m.cols())), base_(n_ * n_) {
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c)
        base_[r * n_ + c] = m.forbidden(r, c) ? LexCost{0, 1, 0.0} : LexCost{0, 0, m(r, c)};
  }

  std::size_t n() const { return n_; }
  const std::vector<LexCost>& base() const { return base_; }

  bool real_pair(std::size_t r, std::size_t c) const { return r < m_.rows() && c < m_.cols() && !m_.forbidden(r, c); }

  // Solves with rows [0, fixed.size()) constrained: fixed[r] is a real column,
  // or nullopt meaning the row must stay unassigned.
  SquareSolution solve_fixed(const std::vector<std::optional<std::size_t>>& fixed) const {
    std::vector<LexCost> a = base_;
    for (std::size_t r = 0; r < fixed.size(); ++r) {
      if (fixed[r]) {
        const std::size_t c = *fixed[r];
        for (std::size_t j = 0; j < n_; ++j)
          if (j != c) a[r * n_ + j].violations += 1;
        for (std::size_t i = 0; i < n_; ++i)
          if (i != r) a[i * n_ + c].violations += 1;
      } else {
        for (std::size_t j = 0; j < n_; ++j)
          if (real_pair(r, j)) a[r * n_ + j].violations += 1;
      }
    }
    return hungarian(a, n_);
  }

 private:
  const CostMatrix& m_;
  std::size_t n_;
  std::vector<LexCost> base_;
};

Assignment to_assignment(const CostMatrix& m, const std::vector<std::size_t>& col_of_row) {
  Assignment out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const std::size_t c = col_of_row[r];
    if (c < m.cols() && !m.forbidden(r, c)) {
      out.pairs.emplace_back(r, c);
      out.total_cost += m(r, c);
    }
  }
  return out;
}

}  // namespace

Assignment solve_assignment(const CostMatrix& m) {
  validate(m);
  if (m.rows() == 0 || m.cols() == 0) return {};

  const PaddedProblem problem(m);
  const std::size_t n = problem.n();
  const SquareSolution best = hungarian(problem.base(), n);
  std::vector<std::size_t> current = best.col_of_row;

  // Lexicographic tie-break. Any optimal matching uses only edges that are
  // tight under the optimal potentials, so only those are tried as
  // alternatives to the current column of each row.
  auto tight = [&](std::size_t r, std::size_t c) {
    const LexCost reduced = problem.base()[r * n + c] - best.u[r + 1] - best.v[c + 1];
    return reduced.violations == 0 && reduced.forbidden == 0 && near(problem.base()[r * n + c].value, best.u[r + 1].value + best.v[c + 1].value);
  };

  std::vector<std::optional<std::size_t>> fixed;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const std::size_t cur = current[r];
    const std::size_t limit = problem.real_pair(r, cur) ? cur : m.cols();
    bool moved = false;
    for (std::size_t c = 0; c < limit && !moved; ++c) {
      if (!problem.real_pair(r, c) || !tight(r, c)) continue;
      if (std::find(fixed.begin(), fixed.end(), std::optional<std::size_t>(c)) != fixed.end()) continue;
      auto trial = fixed;
      trial.emplace_back(c);
      const SquareSolution s = problem.solve_fixed(trial);
      if (same_optimum(s.total, best.total)) {
        current = s.col_of_row;
        moved = true;
      }
    }
    fixed.push_back(problem.real_pair(r, current[r]) ? std::optional<std::size_t>(current[r]) : std::nullopt);
  }
  return to_assignment(m, current);
}

Assignment brute_force_assignment(const CostMatrix& m) {
  validate(m);
  if (std::min(m.rows(), m.cols()) > 8 || std::max(m.rows(), m.cols()) > 12)
    throw SizeError("brute_force_assignment supports min(rows, cols) <= 8 and max(rows, cols) <= 12");
  if (m.rows() == 0 || m.cols() == 0) return {};

  const bool transpose = m.rows() > m.cols();
  const CostMatrix small = transpose ? m.transposed() : m;  // rows <= cols
  const std::size_t k = small.rows();
  const std::size_t n = small.cols();
  bool any_forbidden = false;
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < n; ++c) any_forbidden |= small.forbidden(r, c);

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> choice(k, kNone), best_choice;
  std::vector<char> used(n, 0);
  std::size_t best_count = 0;
  double best_cost = 0.0;
  bool have_best = false;

  auto pairs_of = [&](const std::vector<std::size_t>& ch) {
    std::vector<std::pair<std::size_t, std::size_t>> p;
    for (std::size_t r = 0; r < k; ++r)
      if (ch[r] != kNone) p.emplace_back(transpose ? ch[r] : r, transpose ? r : ch[r]);
    std::sort(p.begin(), p.end());
    return p;
  };

  auto consider = [&](std::size_t count, double cost) {
    bool better = !have_best || count > best_count;
    if (have_best && count == best_count) {
      if (near(cost, best_cost))
        better = pairs_of(choice) < pairs_of(best_choice);
      else
        better = cost < best_cost;
    }
    if (better) {
      have_best = true;
      best_count = count;
      best_cost = cost;
      best_choice = choice;
    }
  };

  auto recurse = [&](auto&& self, std::size_t r, std::size_t count, double cost) -> void {
    if (r == k) {
      consider(count, cost);
      return;
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c] || small.forbidden(r, c)) continue;
      used[c] = 1;
      choice[r] = c;
      self(self, r + 1, count + 1, cost + small(r, c));
      used[c] = 0;
    }
    choice[r] = kNone;
    if (any_forbidden) self(self, r + 1, count, cost);
  };
  recurse(recurse, 0, 0, 0.0);

  Assignment out;
  out.pairs = pairs_of(best_choice);
  for (const auto& [r, c] : out.pairs) out.total_cost += m(r, c);
  return out;
}

}  // namespace ospat
