#pragma once

#include <cstdint>
#include <vector>

#include "qkd/params.hpp"
#include "qkd/records.hpp"

namespace qkd::sim {

// Polarization drift as a bounded random walk on two rotation angles, one
// per measurement basis. The walk reflects at +-pi/2; sin^2 is invariant
// under those reflections, so the unbounded closed form
//   E[sin^2 theta_t] = (1 - exp(-2 sigma^2 t)) / 2
// still holds exactly and serves as the test oracle.
struct DriftState {
    double angle[2] = {0.0, 0.0};        // walk, per basis
    double compensator[2] = {0.0, 0.0};  // controller's current setting
    uint64_t steps = 0;

    // Extra flip probability for a matched-basis detection.
    double flip_extra(Basis b) const;
};

struct ScanWindow {
    double t0 = 0.0;
    double t1 = 0.0;
};

DriftState step_drift(const DriftState& s, double step_rad, uint64_t seed,
                      uint64_t nsteps = 1);

// Coordinate-descent search over the compensator angles. Each probe reads
// the true residual error through gaussian measurement noise and costs one
// dwell; the returned scan duration feeds the discard-window list.
struct CompensateResult {
    DriftState state;
    double scan_duration_s = 0.0;
    uint32_t probes = 0;
};
CompensateResult compensate(const DriftState& s, const SystemParams& p,
                            uint64_t seed, uint64_t invocation);

// Closed-form expectation used by the Monte Carlo tests.
double expected_drift_flip(double step_rad, uint64_t nsteps);

// Time-driven wrapper owned by the simulator. advance() must be called with
// non-decreasing times; it steps the walk on its interval grid and runs the
// compensation controller on its own schedule.
class DriftModel {
  public:
    DriftModel(const SystemParams& p, uint64_t seed);

    void advance(double t);
    double flip_extra(Basis b) const { return state_.flip_extra(b); }
    bool in_scan(double t) const;
    const std::vector<ScanWindow>& scan_windows() const { return windows_; }
    const DriftState& state() const { return state_; }

  private:
    const SystemParams& p_;
    uint64_t seed_;
    DriftState state_;
    uint64_t next_interval_ = 1;
    uint64_t next_comp_ = 1;
    uint64_t comp_count_ = 0;
    std::vector<ScanWindow> windows_;
};

}  // namespace qkd::sim
