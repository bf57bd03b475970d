#pragma once

// Grid simulation of Brownian motion, the maximum of two Brownian motions,
// exponential-martingale spectral processes and truncated Brown-Resnick
// processes eta = max_i R_i V_i.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "brpv/grid.hpp"
#include "brpv/rng.hpp"
#include "brpv/volatility.hpp"

namespace brpv::sim {

struct SpectralAtom {
  /// 1-based arrival index of the atom in the Poisson series.
  std::int64_t generation = 0;
  double log_r = 0.0;
  /// int_0^t H dW - (1/2) int_0^t H^2 ds.
  GridPath log_v_path;
  /// log_r + int_0^t H dW.
  GridPath z_path;
};

struct TruncationDiag {
  std::int64_t atoms_generated = 0;
  /// How far the last rejected arrival fell below the stop threshold.
  double stop_rule_margin = 0.0;
  double epsilon = 0.0;
};

struct MaxStablePath {
  GridPath log_eta;
  /// Retained atoms in increasing generation order.
  std::vector<SpectralAtom> atoms;
  /// Per grid point, position in `atoms` of the maximising atom.
  std::vector<std::int32_t> argmax_index;
  TruncationDiag truncation_diag;
  VolatilitySpec volatility;
  /// (1/2) int_0^{k/n} H^2 ds per grid point.
  std::vector<double> half_variance;
};

class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, MaxStablePath partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const MaxStablePath& partial() const noexcept { return partial_; }

 private:
  MaxStablePath partial_;
};

struct BrownResnickOptions {
  double epsilon = 1e-3;
  std::int64_t atom_budget = 1'000'000;
};

/// Standard Brownian motion on the grid, W_i = W_{i-1} + normal_i / sqrt(n).
GridPath sample_brownian(const Grid& grid, const rng::Stream& stream);

struct MaxTwoPaths {
  GridPath maximum;     ///< W1 v W2
  GridPath difference;  ///< W2 - W1
};

/// W1 from substream 1, W2 from substream 2 of `stream`.
MaxTwoPaths sample_max_two_bm(const Grid& grid, const rng::Stream& stream);

/// c_k = int_0^{k/n} H^2 ds, k = 0..n.
std::vector<double> cumulative_variance(const VolatilitySpec& h, const Grid& grid);

/// int_0^t H dW on the grid, drawn by Brownian-bridge refinement in the
/// clock c_k. The joint law equals that of independent per-step increments
/// with variance c_k - c_{k-1}.
std::vector<double> sample_gaussian_integral(const std::vector<double>& clock,
                                             const rng::Stream& stream);

/// log V_t = int_0^t H dW - (1/2) int_0^t H^2 ds.
GridPath sample_spectral_log(const VolatilitySpec& h, const Grid& grid, const rng::Stream& stream);

/// q_eps = sqrt(Sigma) * Phibar^{-1}(eps / 2), Sigma = int_0^1 H^2.
double envelope_quantile(const VolatilitySpec& h, double epsilon);

/// Arrivals from substream 0, atom i (1-based) from substream i.
MaxStablePath sample_brown_resnick(const VolatilitySpec& h, const Grid& grid,
                                   const rng::Stream& stream, const BrownResnickOptions& opts = {});

}  // namespace brpv::sim
