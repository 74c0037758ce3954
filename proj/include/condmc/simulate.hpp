#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "condmc/model.hpp"
#include "condmc/rng.hpp"

namespace condmc {

// Jump count exceeded the configured cap. The paper-side assumption is
// non-explosiveness; blowing through the cap is a loud error, never a
// silent truncation.
struct ExplosionError : std::runtime_error {
  ExplosionError(uint64_t jumps, double time)
      : std::runtime_error("simulation exceeded " + std::to_string(jumps) +
                           " jumps at time " + std::to_string(time) +
                           "; model may be explosive"),
        jumps(jumps),
        time(time) {}
  uint64_t jumps;
  double time;
};

inline constexpr uint64_t kDefaultJumpCap = 100000000;  // 1e8

// One exact CTMC trajectory on [t0, t1]. Stores jump times, fired reaction
// ids, and per-reaction cumulative intensity integrals at every jump, so any
// window integral costs O(log #jumps). States are reconstructed on demand
// from periodic checkpoints.
class Path {
 public:
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  const ReactionNetwork& network() const { return *net_; }
  size_t jump_count() const { return jump_times_.size(); }
  double jump_time(size_t j) const { return jump_times_[j]; }
  int32_t reaction_id(size_t j) const { return reaction_ids_[j]; }
  const State& initial_state() const { return x0_; }

  // State after the first `njumps` jumps; njumps = 0 gives the initial state.
  State state_after(size_t njumps) const;
  // Right-continuous state at time s in [t0, t1].
  State state_at(double s) const;
  const State& final_state() const { return final_state_; }

  // lambda_r on the constant segment `seg` (segments 0..jump_count()).
  double segment_intensity(size_t seg, size_t r) const;

  // Exact piecewise-constant integral of lambda_r over [a, b].
  double intensity_integral(size_t r, double a, double b) const;
  // Integral of lambda_0 = sum_r lambda_r over [a, b].
  double total_intensity_integral(double a, double b) const;
  // Fills out[r] = integral of lambda_r over [t1 - h, t1] for every r.
  void tail_integrals(double h, double* out) const;

 private:
  friend Path simulate_path(const ReactionNetwork&, const State&, double, double,
                            StreamRng&, uint64_t);

  // Cumulative integrals from t0 up to time s (one value per reaction).
  void cumulative_at(double s, double* out) const;
  size_t segment_of(double s) const;

  const ReactionNetwork* net_ = nullptr;
  double t0_ = 0;
  double t1_ = 0;
  State x0_;
  State final_state_;
  std::vector<double> jump_times_;
  std::vector<int32_t> reaction_ids_;
  // Row j = cumulative integrals at jump j; final row at t1. (J+1) x R.
  std::vector<double> cum_;
  std::vector<State> checkpoints_;  // state after (k+1)*kCheckpointStride jumps
  static constexpr size_t kCheckpointStride = 64;
};

// Exact simulation via the modified next reaction method: one unit-rate
// internal clock per reaction channel.
Path simulate_path(const ReactionNetwork& net, const State& x0, double t0, double t1,
                   StreamRng& rng, uint64_t jump_cap = kDefaultJumpCap);

// Same dynamics and random-variate sequence as simulate_path, but records
// nothing; returns the end state. `jumps` (optional) receives the jump count.
State simulate_end_state(const ReactionNetwork& net, const State& x0, double t0,
                         double t1, StreamRng& rng, uint64_t jump_cap = kDefaultJumpCap,
                         uint64_t* jumps = nullptr);

// m conditionally i.i.d. end states branched from path.state_at(t1 - h),
// each simulated over [t1 - h, t1] on its own stream
// seed.stream(lane, path_index, 1 + j).
std::vector<State> branch(const ReactionNetwork& net, const Path& path, double h,
                          int64_t m, const SeedSpec& seed, uint64_t lane,
                          uint64_t path_index, uint64_t jump_cap = kDefaultJumpCap);

}  // namespace condmc
