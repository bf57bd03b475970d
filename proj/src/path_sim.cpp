#include "brpv/path_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "brpv/special.hpp"

namespace brpv::sim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Node {
  std::int64_t left;
  std::int64_t right;
  std::uint64_t id;
};

// Range-minimum tree with point assignment.
class MinTree {
 public:
  explicit MinTree(std::size_t n) {
    size_ = 1;
    while (size_ < n) {
      size_ <<= 1;
    }
    tree_.assign(2 * size_, kNegInf);
    for (std::size_t i = n; i < size_; ++i) {
      tree_[size_ + i] = std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = size_ - 1; i >= 1; --i) {
      tree_[i] = std::min(tree_[2 * i], tree_[2 * i + 1]);
    }
  }

  void set(std::size_t i, double v) {
    i += size_;
    tree_[i] = v;
    for (i >>= 1; i >= 1; i >>= 1) {
      tree_[i] = std::min(tree_[2 * i], tree_[2 * i + 1]);
    }
  }

  double global_min() const { return tree_[1]; }

  /// Minimum over [lo, hi], inclusive.
  double range_min(std::size_t lo, std::size_t hi) const {
    double r = std::numeric_limits<double>::infinity();
    lo += size_;
    hi += size_ + 1;
    while (lo < hi) {
      if (lo & 1u) {
        r = std::min(r, tree_[lo++]);
      }
      if (hi & 1u) {
        r = std::min(r, tree_[--hi]);
      }
      lo >>= 1;
      hi >>= 1;
    }
    return r;
  }

 private:
  std::size_t size_ = 1;
  std::vector<double> tree_;
};

// Bridge midpoint draw for the interval [l, r] of the clock.
inline double bridge_mid(const std::vector<double>& clock, const std::vector<double>& w,
                         std::int64_t l, std::int64_t m, std::int64_t r, double normal) {
  const double cl = clock[static_cast<std::size_t>(l)];
  const double cm = clock[static_cast<std::size_t>(m)];
  const double cr = clock[static_cast<std::size_t>(r)];
  const double span = cr - cl;
  const double wl = w[static_cast<std::size_t>(l)];
  const double wr = w[static_cast<std::size_t>(r)];
  const double mean = wl + (cm - cl) / span * (wr - wl);
  const double sd = std::sqrt((cm - cl) * (cr - cm) / span);
  return mean + sd * normal;
}

// Top-two bookkeeping across atoms, with the trees needed by the stop rule
// and by interval pruning.
struct TopTwo {
  explicit TopTwo(std::size_t points)
      : first(points, kNegInf),
        second(points, kNegInf),
        first_gen(points, 0),
        second_gen(points, 0),
        second_tree(points) {}

  void offer(std::size_t k, double z, std::int64_t gen) {
    if (z > first[k]) {
      second[k] = first[k];
      second_gen[k] = first_gen[k];
      first[k] = z;
      first_gen[k] = gen;
      second_tree.set(k, second[k]);
    } else if (z > second[k]) {
      second[k] = z;
      second_gen[k] = gen;
      second_tree.set(k, z);
    }
  }

  std::vector<double> first;
  std::vector<double> second;
  std::vector<std::int64_t> first_gen;
  std::vector<std::int64_t> second_gen;
  MinTree second_tree;
};

// Probability that a Brownian bridge exceeds the larger endpoint by
// sqrt(v * log(1/delta) / 2) is at most delta.
double prune_log_inverse(double epsilon) { return -std::log(epsilon * 1e-9); }

MaxStablePath assemble(const VolatilitySpec& h, const Grid& grid, const rng::Stream& stream,
                       const std::vector<double>& clock, const std::vector<std::int64_t>& gens,
                       const std::vector<double>& log_rs, TruncationDiag diag) {
  const std::size_t points = grid.size();
  std::vector<double> half(points);
  for (std::size_t k = 0; k < points; ++k) {
    half[k] = 0.5 * clock[k];
  }
  std::vector<SpectralAtom> atoms;
  atoms.reserve(gens.size());
  for (std::int64_t gen : gens) {
    const double log_r = log_rs[static_cast<std::size_t>(gen - 1)];
    const std::vector<double> w =
        sample_gaussian_integral(clock, stream.substream(static_cast<std::uint32_t>(gen)));
    std::vector<double> log_v(points);
    std::vector<double> z(points);
    for (std::size_t k = 0; k < points; ++k) {
      log_v[k] = w[k] - half[k];
      z[k] = log_r + w[k];
    }
    atoms.push_back(SpectralAtom{gen, log_r, GridPath(grid, std::move(log_v)),
                                 GridPath(grid, std::move(z))});
  }
  std::vector<double> log_eta(points, kNegInf);
  std::vector<std::int32_t> argmax(points, -1);
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const std::vector<double>& z = atoms[a].z_path.values;
    for (std::size_t k = 0; k < points; ++k) {
      if (z[k] > log_eta[k]) {
        log_eta[k] = z[k];
        argmax[k] = static_cast<std::int32_t>(a);
      }
    }
  }
  for (std::size_t k = 0; k < points; ++k) {
    log_eta[k] -= half[k];
  }
  MaxStablePath out{GridPath(grid), std::move(atoms), std::move(argmax), diag, h, std::move(half)};
  if (!out.atoms.empty()) {
    out.log_eta = GridPath(grid, std::move(log_eta));
  }
  return out;
}

}  // namespace

GridPath sample_brownian(const Grid& grid, const rng::Stream& stream) {
  GridPath path(grid);
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid.n()));
  for (std::int64_t i = 1; i <= grid.n(); ++i) {
    path.values[static_cast<std::size_t>(i)] =
        path.values[static_cast<std::size_t>(i - 1)] +
        scale * stream.normal_at(static_cast<std::uint64_t>(i - 1));
  }
  return path;
}

MaxTwoPaths sample_max_two_bm(const Grid& grid, const rng::Stream& stream) {
  const GridPath w1 = sample_brownian(grid, stream.substream(1));
  const GridPath w2 = sample_brownian(grid, stream.substream(2));
  MaxTwoPaths out{GridPath(grid), GridPath(grid)};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.maximum.values[k] = std::max(w1.values[k], w2.values[k]);
    out.difference.values[k] = w2.values[k] - w1.values[k];
  }
  return out;
}

std::vector<double> cumulative_variance(const VolatilitySpec& h, const Grid& grid) {
  std::vector<double> c(grid.size());
  for (std::int64_t k = 0; k <= grid.n(); ++k) {
    c[static_cast<std::size_t>(k)] = integrated_variance(h, 0.0, grid.time(k));
  }
  return c;
}

std::vector<double> sample_gaussian_integral(const std::vector<double>& clock,
                                             const rng::Stream& stream) {
  const std::int64_t n = static_cast<std::int64_t>(clock.size()) - 1;
  std::vector<double> w(clock.size(), 0.0);
  w[static_cast<std::size_t>(n)] = std::sqrt(clock.back() - clock.front()) * stream.normal_at(0);
  std::vector<Node> stack{{0, n, 1}};
  while (!stack.empty()) {
    const Node node = stack.back();
    stack.pop_back();
    if (node.right - node.left < 2) {
      continue;
    }
    const std::int64_t mid = (node.left + node.right) / 2;
    w[static_cast<std::size_t>(mid)] =
        bridge_mid(clock, w, node.left, mid, node.right, stream.normal_at(node.id));
    stack.push_back({node.left, mid, 2 * node.id});
    stack.push_back({mid, node.right, 2 * node.id + 1});
  }
  return w;
}

GridPath sample_spectral_log(const VolatilitySpec& h, const Grid& grid, const rng::Stream& stream) {
  const std::vector<double> clock = cumulative_variance(h, grid);
  std::vector<double> w = sample_gaussian_integral(clock, stream);
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] -= 0.5 * clock[k];
  }
  return GridPath(grid, std::move(w));
}

double envelope_quantile(const VolatilitySpec& h, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.01)) {
    throw std::domain_error("envelope_quantile: epsilon must lie in (0, 0.01]");
  }
  return std::sqrt(integrated_variance(h, 0.0, 1.0)) * normal_sf_inverse(0.5 * epsilon);
}

MaxStablePath sample_brown_resnick(const VolatilitySpec& h, const Grid& grid,
                                   const rng::Stream& stream, const BrownResnickOptions& opts) {
  const double q_eps = envelope_quantile(h, opts.epsilon);
  if (opts.atom_budget < 2) {
    throw std::invalid_argument("sample_brown_resnick: atom budget must be at least 2");
  }
  const std::vector<double> clock = cumulative_variance(h, grid);
  const std::int64_t n = grid.n();
  const std::size_t points = grid.size();
  const double prune_scale = 0.5 * prune_log_inverse(opts.epsilon);

  TopTwo top(points);
  std::vector<double> w(points, 0.0);
  std::vector<double> log_rs;
  std::vector<Node> stack;
  rng::Stream arrivals = stream.substream(0);
  double gamma = 0.0;
  TruncationDiag diag{0, 0.0, opts.epsilon};
  bool stopped = false;

  while (diag.atoms_generated < opts.atom_budget) {
    gamma += arrivals.exponential();
    const double log_r = -std::log(gamma);
    // Every later atom has a smaller R, so none can enter the top two
    // anywhere once this one cannot (up to the envelope probability).
    const double margin = top.second_tree.global_min() - (log_r + q_eps);
    if (margin > 0.0) {
      diag.stop_rule_margin = margin;
      stopped = true;
      break;
    }
    ++diag.atoms_generated;
    const std::int64_t gen = diag.atoms_generated;
    log_rs.push_back(log_r);
    const rng::Stream atom = stream.substream(static_cast<std::uint32_t>(gen));

    w[0] = 0.0;
    w[static_cast<std::size_t>(n)] = std::sqrt(clock.back()) * atom.normal_at(0);
    top.offer(0, log_r, gen);
    top.offer(static_cast<std::size_t>(n), log_r + w[static_cast<std::size_t>(n)], gen);
    stack.assign(1, Node{0, n, 1});
    while (!stack.empty()) {
      const Node node = stack.back();
      stack.pop_back();
      if (node.right - node.left < 2) {
        continue;
      }
      const auto l = static_cast<std::size_t>(node.left);
      const auto r = static_cast<std::size_t>(node.right);
      const double reach = std::max(w[l], w[r]) + std::sqrt((clock[r] - clock[l]) * prune_scale);
      if (log_r + reach < top.second_tree.range_min(l + 1, r - 1)) {
        continue;
      }
      const std::int64_t mid = (node.left + node.right) / 2;
      const auto m = static_cast<std::size_t>(mid);
      w[m] = bridge_mid(clock, w, node.left, mid, node.right, atom.normal_at(node.id));
      top.offer(m, log_r + w[m], gen);
      stack.push_back({node.left, mid, 2 * node.id});
      stack.push_back({mid, node.right, 2 * node.id + 1});
    }
  }

  std::vector<std::int64_t> gens;
  gens.reserve(2 * points);
  for (std::size_t k = 0; k < points; ++k) {
    gens.push_back(top.first_gen[k]);
    if (top.second_gen[k] > 0) {
      gens.push_back(top.second_gen[k]);
    }
  }
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  MaxStablePath path = assemble(h, grid, stream, clock, gens, log_rs, diag);
  if (!stopped) {
    throw TruncationError("sample_brown_resnick: atom budget of " +
                              std::to_string(opts.atom_budget) + " exhausted before the stop rule fired",
                          std::move(path));
  }
  return path;
}

}  // namespace brpv::sim
