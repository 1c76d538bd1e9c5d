#ifndef HYBRIDAVG_HYBRID_SIM_HPP
#define HYBRIDAVG_HYBRID_SIM_HPP

#include <cstdint>
#include <vector>

#include "hybridavg/model.hpp"
#include "hybridavg/ode.hpp"
#include "hybridavg/trajectory.hpp"

namespace hybridavg {

enum class Recording {
  full,       ///< a sample after every accepted ODE step
  grid,       ///< samples at multiples of sample_dt (steps land on them)
  endpoints,  ///< initial and final state only
};

struct RecordOptions {
  Recording mode = Recording::full;
  double sample_dt = 0.1;
  bool events = true;
  /// After n hits 0, keep integrating dx/dt = g(x, 0)/epsilon up to t_end.
  /// When false the run stops at the absorption time.
  bool continue_after_absorption = true;
};

/// Simulates the slow-fast hybrid process
///   dx/dt = g(x, n)/epsilon,  n -> n+1 at rate b(x, n),  n -> n-1 at rate d(x, n)
/// by cumulative-hazard inversion: Lambda' = b + d is integrated alongside x
/// and a jump fires when Lambda reaches an Exp(1) draw. The crossing time is
/// located inside the bracketing step to |Lambda - E| <= ode.hazard_tol.
///
/// The run is a pure function of its arguments. Throws std::invalid_argument
/// on bad inputs and std::runtime_error on a non-finite state.
HybridTrajectory simulate_hybrid(const ModelSpec& model, double epsilon, double x0, Count n0,
                                 double t_end, std::uint64_t seed, const OdeOptions& ode = {},
                                 const RecordOptions& record = {});

struct PathPoint {
  double t = 0.0;
  double x = 0.0;
};

/// Frozen-n fast subsystem dx/dt = g(x, n)/epsilon, evaluated at `times`.
std::vector<PathPoint> solve_frozen_ode(const ModelSpec& model, Count n, double epsilon, double x0,
                                        const std::vector<double>& times,
                                        const OdeOptions& ode = {});

struct DeterministicPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Large-population limit
///   dx/dt = D(x_in - x) - (alpha/V) mu(x) y,  dy/dt = (beta mu(x) - gamma D) y
/// evaluated at `times`.
std::vector<DeterministicPoint> solve_deterministic_limit(const ModelParams& params, double x0,
                                                          double y0,
                                                          const std::vector<double>& times,
                                                          const OdeOptions& ode = {});

/// Right-hand side of the deterministic limit at (x, y).
std::array<double, 2> deterministic_field(const ModelParams& params, double x, double y);

/// Volume-rescaled process at epsilon = 1: V -> N V, the count k starts at
/// round(N * y0) and jumps at the unscaled rates of k, which are N times the
/// rates of the density k/N. The trajectory reports n = k/N (n_scale = N).
HybridTrajectory simulate_rescaled(const ModelParams& params, Count N, double x0, double y0,
                                   double t_end, std::uint64_t seed, const OdeOptions& ode = {},
                                   const RecordOptions& record = {});

/// sup over samples and jump points of max(|x - x_det|, |n/N - y_det|), with
/// the deterministic limit started from the trajectory's initial state.
double sup_distance_to_limit(const HybridTrajectory& traj, const ModelParams& params,
                             const OdeOptions& ode = {});

}  // namespace hybridavg

#endif  // HYBRIDAVG_HYBRID_SIM_HPP
