#pragma once

#include <cstdint>
#include <vector>

namespace brpv {

/// Equi-spaced grid {i/n : i = 0..n} on [0, 1].
class Grid {
 public:
  explicit Grid(std::int64_t n);

  std::int64_t n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) + 1; }
  double time(std::int64_t i) const { return static_cast<double>(i) / static_cast<double>(n_); }
  /// floor(n t) for t in [0, 1].
  std::int64_t index_of(double t) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::int64_t n_;
};

struct GridPath {
  Grid grid;
  std::vector<double> values;

  explicit GridPath(Grid g) : grid(g), values(g.size(), 0.0) {}
  GridPath(Grid g, std::vector<double> v);

  double increment(std::int64_t i) const {
    return values[static_cast<std::size_t>(i)] - values[static_cast<std::size_t>(i - 1)];
  }
};

}  // namespace brpv
