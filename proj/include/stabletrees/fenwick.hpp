#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stabletrees {

// Fenwick (binary indexed) tree over non-negative weights with append,
// point update, prefix sums and inverse-CDF search, all O(log n).
// Backs length-proportional skeleton sampling and weighted vertex picks.
class FenwickTree {
 public:
  std::size_t size() const { return w_.size(); }
  double total() const { return prefix(w_.size()); }
  double get(std::size_t i) const { return w_[i]; }

  void push_back(double w) {
    w_.push_back(w);
    const std::size_t i = w_.size();  // 1-based node index
    // node i covers (i - lowbit(i), i]
    double s = w;
    for (std::size_t j = i - 1; j > i - lowbit(i); j -= lowbit(j)) s += t_[j - 1];
    t_.push_back(s);
  }

  void add(std::size_t i, double dw) {
    w_[i] += dw;
    for (std::size_t j = i + 1; j <= t_.size(); j += lowbit(j)) t_[j - 1] += dw;
  }

  void set(std::size_t i, double w) { add(i, w - w_[i]); }

  // sum of w[0..n)
  double prefix(std::size_t n) const {
    double s = 0.0;
    for (std::size_t j = n; j > 0; j -= lowbit(j)) s += t_[j - 1];
    return s;
  }

  // smallest i with prefix(i+1) > x; requires 0 <= x < total()
  std::size_t find(double x) const {
    std::size_t pos = 0;
    std::size_t mask = 1;
    while ((mask << 1) <= w_.size()) mask <<= 1;
    for (; mask > 0; mask >>= 1) {
      const std::size_t next = pos + mask;
      if (next <= w_.size() && t_[next - 1] <= x) {
        pos = next;
        x -= t_[next - 1];
      }
    }
    if (pos >= w_.size())
      throw std::runtime_error("FenwickTree::find: value beyond total weight");
    return pos;
  }

  // exact linear re-summation, for integrity checks
  double total_exact() const {
    double s = 0.0;
    for (double w : w_) s += w;
    return s;
  }

 private:
  static std::size_t lowbit(std::size_t j) { return j & (~j + 1); }

  std::vector<double> t_;  // 1-based implicit tree
  std::vector<double> w_;  // plain weights
};

}  // namespace stabletrees
