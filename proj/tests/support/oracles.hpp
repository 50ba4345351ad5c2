#pragma once

// Independent re-derivations used to check the library. Nothing here calls
// into the code paths under test.

#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace oracles {

// Brute-force window positions along one axis: every start position whose
// window fits, filtered to multiples of the stride, plus the flush-right
// window if pixels would otherwise stay uncovered.
inline std::vector<int> enumerate_offsets(int extent, int patch, int stride) {
  std::vector<int> out;
  for (int start = 0; start + patch <= extent; ++start) {
    if (start % stride == 0) out.push_back(start);
  }
  std::vector<bool> covered(static_cast<std::size_t>(extent), false);
  for (int o : out) {
    for (int i = o; i < o + patch; ++i) covered[i] = true;
  }
  for (bool c : covered) {
    if (!c) {
      out.push_back(extent - patch);
      break;
    }
  }
  return out;
}

// Unscaled Gaussian straight from the formula.
inline double gaussian_raw(int i, int j, int size, double sigma) {
  const double c = (size - 1) / 2.0;
  return std::exp(-((i - c) * (i - c) + (j - c) * (j - c)) / (2.0 * sigma * sigma));
}

// Largest raw weight found by scanning every cell.
inline double gaussian_peak(int size, double sigma) {
  double best = 0.0;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) best = std::max(best, gaussian_raw(i, j, size, sigma));
  }
  return best;
}

inline int majority(int a, int b, int c) {
  int ones = 0;
  for (int v : {a, b, c}) ones += v == 1;
  int zeros = 3 - ones;
  return ones > zeros ? 1 : 0;
}

// Set-based overlap counts over pixel indices.
struct SetCounts {
  std::size_t pred = 0;
  std::size_t truth = 0;
  std::size_t inter = 0;
  std::size_t uni = 0;
};

inline SetCounts set_counts(const std::vector<std::uint8_t>& pred, const std::vector<std::uint8_t>& truth) {
  std::set<std::size_t> p;
  std::set<std::size_t> t;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i]) p.insert(i);
    if (truth[i]) t.insert(i);
  }
  SetCounts c;
  c.pred = p.size();
  c.truth = t.size();
  for (auto i : p) c.inter += t.count(i);
  std::set<std::size_t> u = p;
  u.insert(t.begin(), t.end());
  c.uni = u.size();
  return c;
}

inline double cross_entropy(double p_bg, double p_tumor, double q_bg, double q_tumor) {
  double loss = 0.0;
  if (q_bg > 0) loss -= q_bg * std::log(p_bg);
  if (q_tumor > 0) loss -= q_tumor * std::log(p_tumor);
  return loss;
}

}  // namespace oracles
