#include <algorithm>
#include <cmath>
#include <limits>

#include "condmc/simulate.hpp"

namespace condmc {

namespace {

// Core of the modified next reaction method. Calls
//   on_segment(seg_start, seg_end, lam)  for every constant segment
//   on_jump(t, r, x_after)               after each state change
// in time order; the last segment ends exactly at t1. Returns the number of
// jumps. The random-variate sequence is: R initial exponentials (reaction
// order), then one exponential per jump for the fired channel.
template <class OnSegment, class OnJump>
uint64_t run_mnrm(const ReactionNetwork& net, State& x, double t0, double t1,
                  StreamRng& rng, uint64_t jump_cap, OnSegment&& on_segment,
                  OnJump&& on_jump) {
  const size_t R = net.reaction_count();
  std::vector<double> lam(R), next_level(R), consumed(R);
  for (size_t r = 0; r < R; ++r) {
    lam[r] = net.intensity(r, x);
    next_level[r] = rng.exponential();
    consumed[r] = 0;
  }

  double t = t0;
  uint64_t jumps = 0;
  for (;;) {
    double best_dt = std::numeric_limits<double>::infinity();
    size_t best_r = R;
    for (size_t r = 0; r < R; ++r) {
      if (lam[r] <= 0) continue;
      double dt = (next_level[r] - consumed[r]) / lam[r];
      if (dt < best_dt) {
        best_dt = dt;
        best_r = r;
      }
    }
    double t_next = t + best_dt;
    if (best_r == R || !(t_next <= t1)) {
      on_segment(t, t1, lam.data());
      return jumps;
    }
    if (++jumps > jump_cap) throw ExplosionError(jump_cap, t_next);

    for (size_t r = 0; r < R; ++r) consumed[r] += lam[r] * best_dt;
    next_level[best_r] += rng.exponential();

    on_segment(t, t_next, lam.data());
    for (size_t i = 0; i < x.size(); ++i) x[i] += net.reactions()[best_r].zeta[i];
    on_jump(t_next, static_cast<int32_t>(best_r), x);
    for (int32_t r : net.affected_reactions(best_r)) lam[r] = net.intensity(r, x);
    t = t_next;
  }
}

void check_initial_state(const ReactionNetwork& net, const State& x0, double t0,
                         double t1) {
  if (x0.size() != net.species_count()) {
    throw std::invalid_argument("initial state has wrong dimension");
  }
  for (int64_t v : x0) {
    if (v < 0) throw std::invalid_argument("initial state must be non-negative");
  }
  if (!(t0 <= t1)) throw std::invalid_argument("simulation window has t0 > t1");
}

}  // namespace

Path simulate_path(const ReactionNetwork& net, const State& x0, double t0, double t1,
                   StreamRng& rng, uint64_t jump_cap) {
  check_initial_state(net, x0, t0, t1);
  const size_t R = net.reaction_count();

  Path path;
  path.net_ = &net;
  path.t0_ = t0;
  path.t1_ = t1;
  path.x0_ = x0;

  std::vector<double> cum_row(R, 0.0);
  State x = x0;
  run_mnrm(
      net, x, t0, t1, rng, jump_cap,
      [&](double a, double b, const double* lam) {
        const double dt = b - a;
        for (size_t r = 0; r < R; ++r) cum_row[r] += lam[r] * dt;
      },
      [&](double t, int32_t r, const State& x_after) {
        path.jump_times_.push_back(t);
        path.reaction_ids_.push_back(r);
        path.cum_.insert(path.cum_.end(), cum_row.begin(), cum_row.end());
        if (path.jump_times_.size() % Path::kCheckpointStride == 0) {
          path.checkpoints_.push_back(x_after);
        }
      });
  // Final row: cumulative integrals over the whole window.
  path.cum_.insert(path.cum_.end(), cum_row.begin(), cum_row.end());
  path.final_state_ = std::move(x);
  return path;
}

State simulate_end_state(const ReactionNetwork& net, const State& x0, double t0,
                         double t1, StreamRng& rng, uint64_t jump_cap,
                         uint64_t* jumps) {
  check_initial_state(net, x0, t0, t1);
  State x = x0;
  uint64_t n = run_mnrm(
      net, x, t0, t1, rng, jump_cap, [](double, double, const double*) {},
      [](double, int32_t, const State&) {});
  if (jumps) *jumps = n;
  return x;
}

State Path::state_after(size_t njumps) const {
  if (njumps > jump_times_.size()) throw std::out_of_range("jump index out of range");
  size_t cp = njumps / kCheckpointStride;  // checkpoints cover cp*stride jumps
  cp = std::min(cp, checkpoints_.size());
  State x = cp == 0 ? x0_ : checkpoints_[cp - 1];
  for (size_t j = cp * kCheckpointStride; j < njumps; ++j) {
    const auto& zeta = net_->reactions()[reaction_ids_[j]].zeta;
    for (size_t i = 0; i < x.size(); ++i) x[i] += zeta[i];
  }
  return x;
}

size_t Path::segment_of(double s) const {
  // Segment index = number of jumps at or before s (right continuity).
  return std::upper_bound(jump_times_.begin(), jump_times_.end(), s) -
         jump_times_.begin();
}

State Path::state_at(double s) const {
  if (s < t0_ || s > t1_) throw std::out_of_range("time outside the path window");
  return state_after(segment_of(s));
}

double Path::segment_intensity(size_t seg, size_t r) const {
  return net_->intensity(r, state_after(seg));
}

void Path::cumulative_at(double s, double* out) const {
  const size_t R = net_->reaction_count();
  const size_t seg = segment_of(s);
  const double seg_start = seg == 0 ? t0_ : jump_times_[seg - 1];
  const double* base = cum_.data() + (seg == 0 ? 0 : (seg - 1) * R);
  if (seg == 0) {
    for (size_t r = 0; r < R; ++r) out[r] = 0;
  } else {
    for (size_t r = 0; r < R; ++r) out[r] = base[r];
  }
  const double dt = s - seg_start;
  if (dt > 0) {
    State x = state_after(seg);
    for (size_t r = 0; r < R; ++r) out[r] += net_->intensity(r, x) * dt;
  }
}

double Path::intensity_integral(size_t r, double a, double b) const {
  if (a < t0_ || b > t1_ || a > b) throw std::out_of_range("integral window invalid");
  const size_t R = net_->reaction_count();
  std::vector<double> ca(R), cb(R);
  cumulative_at(a, ca.data());
  cumulative_at(b, cb.data());
  return cb[r] - ca[r];
}

double Path::total_intensity_integral(double a, double b) const {
  if (a < t0_ || b > t1_ || a > b) throw std::out_of_range("integral window invalid");
  const size_t R = net_->reaction_count();
  std::vector<double> ca(R), cb(R);
  cumulative_at(a, ca.data());
  cumulative_at(b, cb.data());
  double sum = 0;
  for (size_t r = 0; r < R; ++r) sum += cb[r] - ca[r];
  return sum;
}

void Path::tail_integrals(double h, double* out) const {
  if (h < 0 || t1_ - h < t0_) throw std::out_of_range("tail window invalid");
  const size_t R = net_->reaction_count();
  std::vector<double> ca(R);
  cumulative_at(t1_ - h, ca.data());
  const double* last = cum_.data() + jump_times_.size() * R;
  for (size_t r = 0; r < R; ++r) out[r] = last[r] - ca[r];
}

std::vector<State> branch(const ReactionNetwork& net, const Path& path, double h,
                          int64_t m, const SeedSpec& seed, uint64_t lane,
                          uint64_t path_index, uint64_t jump_cap) {
  if (m < 1) throw std::invalid_argument("branch count must be >= 1");
  if (h < 0 || path.t1() - h < path.t0()) {
    throw std::invalid_argument("branch window must lie inside the path");
  }
  const double split = path.t1() - h;
  const State x_split = path.state_at(split);
  std::vector<State> ends;
  ends.reserve(m);
  for (int64_t j = 0; j < m; ++j) {
    StreamRng rng = seed.stream(lane, path_index, static_cast<uint64_t>(j) + 1);
    ends.push_back(simulate_end_state(net, x_split, split, path.t1(), rng, jump_cap));
  }
  return ends;
}

}  // namespace condmc
