// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0
//
// IoU, the gated matching-distance matrix, and an exact linear assignment
// solver with deterministic tie-breaking.

#pragma once

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asad/core_model.hpp"

namespace asad {

inline constexpr double kDefaultIouThreshold = 0.5;

/// Shortest round-trip decimal, e.g. 0.5 -> "0.5", 0.75 -> "0.75".
inline std::string format_threshold(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

/// Metric label such as "AP@0.5" or "HL@0.75".
inline std::string metric_name(const std::string& prefix, double iou_threshold) {
  return prefix + "@" + format_threshold(iou_threshold);
}

inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

/// Dense row-major matrix of doubles.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CostMatrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      assert(row.size() == cols_);
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  CostMatrix transposed() const {
    CostMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Gated IoU distance: rows are ground truth, columns are predictions.
/// Every entry lies in [0,1] and equals 1 exactly where IoU < gate.
struct AssignmentProblem {
  CostMatrix cost;
  double iou_threshold = kDefaultIouThreshold;
};

struct MatchPair {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const MatchPair&, const MatchPair&) = default;
  friend auto operator<=>(const MatchPair&, const MatchPair&) = default;
};

struct Assignment {
  /// Pairs sorted by row. For gated problems these are the pairs that
  /// survive the gate filter.
  std::vector<MatchPair> pairs;
  /// Objective value of the full min(rows, cols) assignment, before gating.
  double total_cost = 0.0;

  /// Boolean matrix view, 1 where a pair was kept.
  std::vector<std::vector<bool>> as_matrix(std::size_t rows, std::size_t cols) const {
    std::vector<std::vector<bool>> m(rows, std::vector<bool>(cols, false));
    for (const auto& p : pairs) m[p.row][p.col] = true;
    return m;
  }
};

inline AssignmentProblem build_cost_matrix(std::span<const BoundingBox> gt,
                                           std::span<const BoundingBox> pred,
                                           double iou_threshold = kDefaultIouThreshold) {
  AssignmentProblem problem{CostMatrix(gt.size(), pred.size(), 1.0), iou_threshold};
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const double v = iou(gt[i], pred[j]);
      problem.cost(i, j) = v < iou_threshold ? 1.0 : 1.0 - v;
    }
  }
  return problem;
}

/// Sum of the selected entries, added in ascending order so that two
/// assignments using the same multiset of values report bit-identical totals.
inline double canonical_cost(const CostMatrix& cost, std::span<const MatchPair> pairs) {
  std::vector<double> values;
  values.reserve(pairs.size());
  for (const auto& p : pairs) values.push_back(cost(p.row, p.col));
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

namespace detail {

// Square Kuhn-Munkres with potentials. Returns the row->column matching and
// leaves dual potentials in u/v (1-based, slot 0 unused) such that
// cost(i,j) - u[i+1] - v[j+1] >= 0 with equality on matched edges.
inline std::vector<std::size_t> hungarian_square(const CostMatrix& cost, std::vector<double>& u,
                                                 std::vector<double>& v) {
  const std::size_t n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  u.assign(n + 1, 0.0);
  v.assign(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<double> minv(n + 1);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Moves the matching to the lexicographically smallest perfect matching of
// the equality subgraph (edges with zero reduced cost). Every such matching
// is optimal, so this only resolves ties.
inline void lexicographic_refine(const std::vector<std::vector<char>>& tight,
                                 std::vector<std::size_t>& row_to_col) {
  const std::size_t n = row_to_col.size();
  std::vector<std::size_t> col_to_row(n);
  for (std::size_t r = 0; r < n; ++r) col_to_row[row_to_col[r]] = r;
  std::vector<char> frozen_row(n, 0), frozen_col(n, 0), visited(n, 0);

  // Augmenting search: re-match row r to some free-able column, excluding
  // frozen rows/columns, ending at column target.
  auto dfs = [&](auto&& self, std::size_t r, std::size_t target) -> bool {
    for (std::size_t c = 0; c < n; ++c) {
      if (!tight[r][c] || frozen_col[c] || visited[c]) continue;
      visited[c] = 1;
      if (c == target) {
        row_to_col[r] = c;
        col_to_row[c] = r;
        return true;
      }
      const std::size_t other = col_to_row[c];
      if (frozen_row[other]) continue;
      if (self(self, other, target)) {
        row_to_col[r] = c;
        col_to_row[c] = r;
        return true;
      }
    }
    return false;
  };

  for (std::size_t r = 0; r < n; ++r) {
    frozen_row[r] = 1;
    for (std::size_t c = 0; c < row_to_col[r]; ++c) {
      if (!tight[r][c] || frozen_col[c]) continue;
      // Give column c to row r; its owner must then reach r's old column.
      const std::size_t old_col = row_to_col[r];
      const std::size_t owner = col_to_row[c];
      frozen_col[c] = 1;
      std::fill(visited.begin(), visited.end(), 0);
      if (dfs(dfs, owner, old_col)) {
        row_to_col[r] = c;
        col_to_row[c] = r;
        break;
      }
      frozen_col[c] = 0;
    }
    frozen_col[row_to_col[r]] = 1;
  }
}

}  // namespace detail

/// Exact minimum-cost assignment of size min(rows, cols) over an arbitrary
/// finite matrix. Among equal-cost optima the lexicographically smallest
/// (row, col) pair list is returned. Rectangular inputs are padded internally
/// with zero-cost dummies that never appear in the result.
inline Assignment solve_assignment(const CostMatrix& cost) {
  Assignment out;
  const std::size_t rows = cost.rows();
  const std::size_t cols = cost.cols();
  if (rows == 0 || cols == 0) return out;

  const std::size_t n = std::max(rows, cols);
  CostMatrix square(n, n, 0.0);
  double scale = 1.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      square(r, c) = cost(r, c);
      scale = std::max(scale, std::abs(cost(r, c)));
    }
  }

  std::vector<double> u, v;
  auto row_to_col = detail::hungarian_square(square, u, v);

  const double eps = 1e-12 * scale * static_cast<double>(n);
  std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      tight[r][c] = std::abs(square(r, c) - u[r + 1] - v[c + 1]) <= eps;
    }
    tight[r][row_to_col[r]] = 1;
  }
  detail::lexicographic_refine(tight, row_to_col);

  for (std::size_t r = 0; r < rows; ++r) {
    if (row_to_col[r] < cols) out.pairs.push_back({r, row_to_col[r]});
  }
  out.total_cost = canonical_cost(cost, out.pairs);
  return out;
}

/// Solves a gated problem, then drops every pair whose distance is 1
/// (IoU below the gate).
inline Assignment solve_assignment(const AssignmentProblem& problem) {
  Assignment out = solve_assignment(problem.cost);
  std::erase_if(out.pairs, [&](const MatchPair& p) { return problem.cost(p.row, p.col) >= 1.0; });
  return out;
}

/// Gated one-to-one box matching, as used by every metric family.
inline std::vector<MatchPair> match_boxes(std::span<const BoundingBox> gt,
                                          std::span<const BoundingBox> pred,
                                          double iou_threshold = kDefaultIouThreshold) {
  if (gt.empty() || pred.empty()) return {};
  return solve_assignment(build_cost_matrix(gt, pred, iou_threshold)).pairs;
}

struct ObservationPair {
  std::size_t gt = 0;    // index into the ground-truth record's observations
  std::size_t pred = 0;  // index into the predicted record's observations
  friend bool operator==(const ObservationPair&, const ObservationPair&) = default;
};

struct KeyframeMatches {
  std::int64_t keyframe = 0;
  std::vector<ObservationPair> pairs;
};

/// Gated optimal matching run independently at every keyframe present in
/// either record, ascending. Rows and columns are taken in record order.
/// Predictions scoring below min_score are left out.
inline std::vector<KeyframeMatches> match_keyframes(
    const VideoRecord& gt, const VideoRecord& pred, double iou_threshold = kDefaultIouThreshold,
    double min_score = -std::numeric_limits<double>::infinity()) {
  auto g_groups = group_by_keyframe(gt);
  auto p_groups = group_by_keyframe(pred);
  std::map<std::int64_t, int> keyframes;
  for (const auto& [kf, _] : g_groups) keyframes[kf];
  for (const auto& [kf, _] : p_groups) keyframes[kf];

  std::vector<KeyframeMatches> out;
  out.reserve(keyframes.size());
  for (const auto& [kf, _] : keyframes) {
    KeyframeMatches km{kf, {}};
    auto git = g_groups.find(kf);
    auto pit = p_groups.find(kf);
    if (git != g_groups.end() && pit != p_groups.end()) {
      std::vector<std::size_t> p_idx;
      for (std::size_t j : pit->second) {
        if (pred.observations[j].score >= min_score) p_idx.push_back(j);
      }
      std::vector<BoundingBox> gboxes, pboxes;
      for (std::size_t i : git->second) gboxes.push_back(gt.observations[i].box);
      for (std::size_t j : p_idx) pboxes.push_back(pred.observations[j].box);
      for (const auto& m : match_boxes(gboxes, pboxes, iou_threshold)) {
        km.pairs.push_back({git->second[m.row], p_idx[m.col]});
      }
    }
    out.push_back(std::move(km));
  }
  return out;
}

}  // namespace asad
