#include "cryf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cryf/errors.hpp"
#include "cryf/parallel.hpp"

namespace cryf {

namespace {

// RK4 real-axis stability limit, |1 + z + z²/2 + z³/6 + z⁴/24| <= 1 for z in [−2.785, 0].
constexpr double kRk4StabilityLimit = 2.785;

ConformalState stage(const ConformalState& base, const ScalarField& k, double scale,
                     double u_floor) {
  ScalarField u = base.u();
  for (std::size_t p = 0; p < u.size(); ++p) u[p] += scale * k[p];
  const double min_u = u.min();
  if (!(min_u > u_floor)) {
    std::ostringstream msg;
    msg << "RK4 stage left min u = " << min_u << " at or below the floor " << u_floor;
    throw PositivityError(msg.str(), min_u);
  }
  return base.with_u(std::move(u));
}

// One classical RK4 step of signed size dt.
ConformalState rk4_signed(const ConformalState& state, double dt, double u_floor) {
  const ScalarField k1 = time_derivative(state, u_floor);
  const ScalarField k2 = time_derivative(stage(state, k1, 0.5 * dt, u_floor), u_floor);
  const ScalarField k3 = time_derivative(stage(state, k2, 0.5 * dt, u_floor), u_floor);
  const ScalarField k4 = time_derivative(stage(state, k3, dt, u_floor), u_floor);
  ScalarField u = state.u();
  const double w = dt / 6.0;
  for (std::size_t p = 0; p < u.size(); ++p) {
    u[p] += w * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
  }
  const double min_u = u.min();
  if (!(min_u > u_floor)) {
    std::ostringstream msg;
    msg << "RK4 step left min u = " << min_u << " at or below the floor " << u_floor;
    throw PositivityError(msg.str(), min_u);
  }
  return ConformalState(state.geometry_ptr(), std::move(u), state.t() + dt);
}

double relative_discrepancy(const ScalarField& coarse, const ScalarField& fine) {
  double diff = 0.0;
  for (std::size_t p = 0; p < fine.size(); ++p) diff = std::max(diff, std::abs(coarse[p] - fine[p]));
  const double scale = fine.max_abs();
  return scale > 0.0 ? diff / scale : diff;
}

struct DoublingAttempt {
  ConformalState fine;
  double err;
};

DoublingAttempt doubling_attempt(const ConformalState& state, double dt, double u_floor) {
  const ConformalState coarse = rk4_signed(state, dt, u_floor);
  const ConformalState half = rk4_signed(state, 0.5 * dt, u_floor);
  ConformalState fine = rk4_signed(half, 0.5 * dt, u_floor);
  // Land exactly on t + dt regardless of how the two halves round.
  fine = fine.with_time(state.t() + dt);
  const double err = relative_discrepancy(coarse.u(), fine.u());
  return {std::move(fine), err};
}

}  // namespace

void FlowConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("flow config: " + what); };
  if (!(dt_min > 0.0)) fail("dt_min must be positive");
  if (!(dt_min <= dt_init)) fail("dt_min must not exceed dt_init");
  if (!(dt_init <= dt_max)) fail("dt_init must not exceed dt_max");
  if (!(err_tol > 0.0)) fail("err_tol must be positive");
  if (!(u_floor > 0.0)) fail("u_floor must be positive");
  if (!(safety > 0.0 && safety <= 1.0)) fail("safety must lie in (0, 1]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) fail("t_end must be finite and non-negative");
  if (record_every < 1) fail("record_every must be a positive integer");
  if (snapshot_every < 0) fail("snapshot_every must be >= 0");
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::ReachedTEnd:
      return "reached_t_end";
    case Termination::PositivityFloor:
      return "positivity_floor";
    case Termination::StepUnderflow:
      return "step_underflow";
  }
  return "unknown";
}

ScalarField time_derivative(const ConformalState& state, double u_floor) {
  ScalarField r = webster_curvature(state, u_floor);
  const double half_n = 0.5 * state.n();
  const ScalarField& u = state.u();
  parallel_for(r.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) r[p] = -half_n * r[p] * u[p];
  });
  return r;
}

ConformalState step_rk4(const ConformalState& state, double dt, double u_floor) {
  if (!(dt > 0.0)) throw ConfigError("step_rk4: dt must be positive");
  return rk4_signed(state, dt, u_floor);
}

double step_doubling_error(const ConformalState& state, double dt, double u_floor) {
  return doubling_attempt(state, dt, u_floor).err;
}

AdaptiveStep step_adaptive(const ConformalState& state, double dt_try, const FlowConfig& config) {
  config.validate();
  double dt = dt_try;
  int rejected = 0;
  for (;;) {
    double shrink = 0.5;
    try {
      DoublingAttempt attempt = doubling_attempt(state, dt, config.u_floor);
      if (attempt.err <= config.err_tol) {
        double dt_next = config.dt_max;
        if (attempt.err > 0.0) {
          dt_next = dt * config.safety * std::pow(config.err_tol / attempt.err, 0.2);
        }
        dt_next = std::clamp(dt_next, config.dt_min, config.dt_max);
        return {std::move(attempt.fine), dt, dt_next, attempt.err, rejected};
      }
      shrink = std::clamp(config.safety * std::pow(config.err_tol / attempt.err, 0.2), 0.1, 0.9);
      if (!(dt * shrink >= config.dt_min)) {
        std::ostringstream msg;
        msg << "step_adaptive: error " << attempt.err << " needs dt " << dt * shrink
            << " below dt_min " << config.dt_min;
        throw StepUnderflowError(msg.str(), dt * shrink);
      }
    } catch (const PositivityError&) {
      if (!(dt * shrink >= config.dt_min)) throw;
    }
    dt *= shrink;
    ++rejected;
  }
}

double stable_dt_estimate(const ConformalState& state) {
  const GridSpec& g = state.geometry().grid();
  const double x_max = static_cast<double>(g.nx - 1) / g.nx;
  const double y_row = 1.0 / g.hy() + x_max / g.hz();
  const double spectral_bound = 4.0 / (g.hx() * g.hx()) + 4.0 * y_row * y_row;
  const double n = state.n();
  const double coeff = (n + 1.0) / std::pow(state.u().min(), 2.0 / n);
  return kRk4StabilityLimit / (coeff * spectral_bound);
}

ConformalState integrate_fixed(const ConformalState& state, double duration, double max_substep,
                               double u_floor) {
  if (duration == 0.0) return state;
  double limit = 0.5 * stable_dt_estimate(state);
  if (max_substep > 0.0) limit = std::min(limit, max_substep);
  const auto steps = static_cast<long>(std::ceil(std::abs(duration) / limit));
  const double dt = duration / static_cast<double>(steps);
  ConformalState current = state;
  for (long s = 0; s < steps; ++s) current = rk4_signed(current, dt, u_floor);
  return current.with_time(state.t() + duration);
}

Trajectory run_flow(const ConformalState& initial, const FlowConfig& config) {
  config.validate();
  Trajectory traj;
  ConformalState state = initial;
  traj.records.push_back(diagnose(state, 0.0));
  if (config.snapshot_every > 0) traj.snapshots.push_back({state.t(), state.u()});

  const double t_end = config.t_end;
  double dt = config.dt_init;
  long since_record = 0;
  long since_snapshot = 0;
  bool last_recorded = true;
  double last_dt = 0.0;
  while (state.t() < t_end) {
    const double remaining = t_end - state.t();
    const bool final_step = dt >= remaining;
    const double dt_try = final_step ? remaining : dt;
    AdaptiveStep step{state, 0.0, 0.0, 0.0, 0};
    try {
      step = step_adaptive(state, dt_try, config);
    } catch (const PositivityError&) {
      traj.termination = Termination::PositivityFloor;
      break;
    } catch (const StepUnderflowError&) {
      traj.termination = Termination::StepUnderflow;
      break;
    }
    // Retries only shrink dt, so the step ends exactly at t_end only if accepted untouched.
    const bool landed = final_step && step.dt_used == dt_try;
    state = landed ? step.state.with_time(t_end) : step.state;
    ++traj.accepted_steps;
    traj.rejected_steps += step.rejected;
    dt = step.dt_next;
    last_dt = step.dt_used;

    last_recorded = false;
    if (++since_record >= config.record_every || landed) {
      traj.records.push_back(diagnose(state, step.dt_used));
      since_record = 0;
      last_recorded = true;
    }
    if (config.snapshot_every > 0 && ++since_snapshot >= config.snapshot_every) {
      traj.snapshots.push_back({state.t(), state.u()});
      since_snapshot = 0;
    }
    if (landed) break;
  }
  if (!last_recorded) traj.records.push_back(diagnose(state, last_dt));
  return traj;
}

}  // namespace cryf
