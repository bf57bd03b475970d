#include "brpv/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace brpv {

Grid::Grid(std::int64_t n) : n_(n) {
  if (n < 2) {
    throw std::invalid_argument("Grid: n must be at least 2, got " + std::to_string(n));
  }
}

std::int64_t Grid::index_of(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("Grid: time must lie in [0, 1]");
  }
  return static_cast<std::int64_t>(std::floor(t * static_cast<double>(n_)));
}

GridPath::GridPath(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("GridPath: expected " + std::to_string(grid.size()) +
                                " values, got " + std::to_string(values.size()));
  }
  for (double x : values) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("GridPath: values must be finite");
    }
  }
}

}  // namespace brpv
