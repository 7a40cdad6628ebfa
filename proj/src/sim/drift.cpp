#include "qkd/sim/drift.hpp"

#include <cmath>

#include "qkd/rng.hpp"

namespace qkd::sim {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

// Fold into [-pi/2, pi/2] by reflection.
double fold(double x) {
    while (x > kHalfPi) x = 2 * kHalfPi - x;
    while (x < -kHalfPi) x = -2 * kHalfPi - x;
    return x;
}

double sin2(double x) {
    double s = std::sin(x);
    return s * s;
}

// Streams within the drift seed space.
constexpr uint64_t kWalkStream = 0xD41F7;
constexpr uint64_t kProbeStream = 0xC0437;

double gauss_at(uint64_t seed, uint64_t stream, uint64_t idx) {
    // Box-Muller from two counter-based uniforms; only the cosine branch,
    // so one value per index.
    double u1 = to_unit_double(hash3_u64(seed, stream, 2 * idx));
    double u2 = to_unit_double(hash3_u64(seed, stream, 2 * idx + 1));
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace

double DriftState::flip_extra(Basis b) const {
    int i = (b == Basis::X) ? 1 : 0;
    return sin2(angle[i] - compensator[i]);
}

DriftState step_drift(const DriftState& s, double step_rad, uint64_t seed,
                      uint64_t nsteps) {
    DriftState out = s;
    if (step_rad <= 0.0) {
        out.steps += nsteps;
        return out;
    }
    for (uint64_t k = 0; k < nsteps; ++k) {
        uint64_t idx = out.steps;
        out.angle[0] = fold(out.angle[0] +
                            step_rad * gauss_at(seed, kWalkStream, 2 * idx));
        out.angle[1] = fold(out.angle[1] +
                            step_rad * gauss_at(seed, kWalkStream, 2 * idx + 1));
        ++out.steps;
    }
    return out;
}

double expected_drift_flip(double step_rad, uint64_t nsteps) {
    double v = step_rad * step_rad * static_cast<double>(nsteps);
    return 0.5 * (1.0 - std::exp(-2.0 * v));
}

CompensateResult compensate(const DriftState& s, const SystemParams& p,
                            uint64_t seed, uint64_t invocation) {
    CompensateResult res;
    res.state = s;
    uint64_t probe_idx = invocation << 20;
    auto measure = [&](const double c[2]) {
        double q = 0.5 * (sin2(s.angle[0] - c[0]) + sin2(s.angle[1] - c[1]));
        double noise = 0.002 * gauss_at(seed, kProbeStream, probe_idx++);
        ++res.probes;
        return q + noise;
    };

    double c[2] = {s.compensator[0], s.compensator[1]};
    double best = measure(c);
    // Coordinate descent: walk each axis while the probe improves, both
    // directions, a few sweeps. Bounded probe count keeps scans short.
    for (int sweep = 0; sweep < 3; ++sweep) {
        for (int axis = 0; axis < 2; ++axis) {
            for (double dir : {+1.0, -1.0}) {
                for (;;) {
                    double trial[2] = {c[0], c[1]};
                    trial[axis] = fold(trial[axis] + dir * p.scan_step_rad);
                    double q = measure(trial);
                    if (q + 1e-4 < best && res.probes < 400) {
                        best = q;
                        c[0] = trial[0];
                        c[1] = trial[1];
                    } else {
                        break;
                    }
                }
            }
        }
    }
    res.state.compensator[0] = c[0];
    res.state.compensator[1] = c[1];
    res.scan_duration_s = res.probes * p.scan_dwell_s;
    return res;
}

DriftModel::DriftModel(const SystemParams& p, uint64_t seed)
    : p_(p), seed_(seed) {}

void DriftModel::advance(double t) {
    if (p_.drift_step_rad <= 0.0) return;
    // Walk steps due before t.
    uint64_t due = static_cast<uint64_t>(t / p_.drift_interval_s);
    if (due >= next_interval_) {
        uint64_t nsteps = due - next_interval_ + 1;
        state_ = step_drift(state_, p_.drift_step_rad, seed_, nsteps);
        next_interval_ = due + 1;
    }
    // Compensation controller on its own clock. It reads the residual
    // through noisy probes; below threshold it leaves the setting alone.
    uint64_t comp_due = static_cast<uint64_t>(t / p_.compensation_interval_s);
    while (comp_due >= next_comp_) {
        double t_check = static_cast<double>(next_comp_) * p_.compensation_interval_s;
        double resid = 0.5 * (state_.flip_extra(Basis::Z) + state_.flip_extra(Basis::X));
        if (resid > 0.5 * p_.compensation_threshold_qber) {
            CompensateResult r = compensate(state_, p_, seed_, comp_count_++);
            state_ = r.state;
            windows_.push_back({t_check, t_check + r.scan_duration_s});
        }
        ++next_comp_;
    }
}

bool DriftModel::in_scan(double t) const {
    for (auto it = windows_.rbegin(); it != windows_.rend(); ++it) {
        if (t >= it->t1) break;
        if (t >= it->t0) return true;
    }
    return false;
}

}  // namespace qkd::sim
