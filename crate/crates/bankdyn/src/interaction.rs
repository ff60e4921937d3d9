//! Delay-coupled dynamics of the {banks; clients} interaction.
//!
//! Each side's pool shrinks as the other side succeeds in starting
//! interactions. The decline seen by banks at time t depends on the
//! client pool as it was one client operation time ago and on the banks'
//! own pool one attention delay ago:
//!
//! ```text
//! dm_B/dt = -p_C lambda_C m_C(t - tau_C) m_B(t) / m_B(t - delta_B)
//! dm_C/dt = -p_B lambda_B m_B(t - tau_B) m_C(t) / m_C(t - delta_C)
//! ```
//!
//! Pre-history is the constant initial pool on t <= 0. Integration uses
//! the method of steps: derivative discontinuities enter at every sum of
//! up to three lags, so those times are forced to land on step
//! boundaries, and classic RK4 runs inside each smooth piece. Delayed
//! values come from cubic Hermite interpolation of the solution history,
//! which matches the fourth-order accuracy of the stepper.

use crate::kolmogorov::{Trajectory, NEGATIVITY_TOLERANCE};
use crate::model::{summarize_violations, InteractionConfig, SideParams, Violation};
use thiserror::Error;

/// A delayed denominator at or below this value ends the run: the model
/// divides by a pool that has effectively emptied.
pub const SINGULARITY_FLOOR: f64 = 1e-12;

/// Which pool of the interaction a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Bank,
    Client,
}

impl Side {
    fn index(self) -> usize {
        match self {
            Side::Bank => 0,
            Side::Client => 1,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Bank => write!(f, "bank"),
            Side::Client => write!(f, "client"),
        }
    }
}

/// Failure of a delayed-interaction run.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DdeError {
    #[error("invalid interaction config: {}", summarize_violations(.0))]
    InvalidConfig(Vec<Violation>),
    #[error("invalid output grid: {0}")]
    BadGrid(&'static str),
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("step {step} exceeds the smallest positive lag {lag}")]
    StepExceedsLag { step: f64, lag: f64 },
    #[error("delayed {side} pool reached the singularity floor at t = {time}")]
    Singularity { side: Side, time: f64 },
    #[error("{side} pool fell to {value:e} at t = {time}")]
    NegativeLevel { side: Side, time: f64, value: f64 },
    #[error("pools became non-finite at t = {time}")]
    NonFinite { time: f64 },
}

/// Writes the interaction right-hand side at time `t` into `out`.
///
/// `levels` holds the current [bank, client] pools; `delayed` resolves a
/// side's pool at an absolute past time. Zero lags read the current
/// `levels` directly, so the zero-delay system reduces exactly to an
/// ordinary one.
pub fn interaction_rhs<F>(
    config: &InteractionConfig,
    t: f64,
    levels: [f64; 2],
    mut delayed: F,
    out: &mut [f64; 2],
) -> Result<(), DdeError>
where
    F: FnMut(Side, f64) -> f64,
{
    let bank_own = if config.bank.attention_delay == 0.0 {
        levels[0]
    } else {
        delayed(Side::Bank, t - config.bank.attention_delay)
    };
    let bank_sees_client = if config.client.operation_time == 0.0 {
        levels[1]
    } else {
        delayed(Side::Client, t - config.client.operation_time)
    };
    let client_own = if config.client.attention_delay == 0.0 {
        levels[1]
    } else {
        delayed(Side::Client, t - config.client.attention_delay)
    };
    let client_sees_bank = if config.bank.operation_time == 0.0 {
        levels[0]
    } else {
        delayed(Side::Bank, t - config.bank.operation_time)
    };

    out[0] = side_rate(&config.client, bank_sees_client, levels[0], bank_own, Side::Bank, t)?;
    out[1] = side_rate(&config.bank, client_sees_bank, levels[1], client_own, Side::Client, t)?;
    Ok(())
}

/// Decline rate of one side's pool. Both sides go through this single
/// function in the same argument order, so swapping the roles in a
/// configuration mirrors the trajectories to round-off.
fn side_rate(
    partner: &SideParams,
    partner_pool_delayed: f64,
    own_now: f64,
    own_delayed: f64,
    side: Side,
    t: f64,
) -> Result<f64, DdeError> {
    if own_delayed <= SINGULARITY_FLOOR {
        return Err(DdeError::Singularity { side, time: t });
    }
    Ok(-(partner.success_probability * partner.productivity * partner_pool_delayed * own_now
        / own_delayed))
}

/// Default integration step: resolves the fastest initial decline, never
/// coarser than 1e-3, never longer than the smallest positive lag or the
/// horizon.
pub fn default_step(config: &InteractionConfig, t_end: f64) -> f64 {
    let bank_rate = config.client.success_probability * config.client.productivity
        * config.client.initial_pool
        / config.bank.initial_pool;
    let client_rate = config.bank.success_probability * config.bank.productivity
        * config.bank.initial_pool
        / config.client.initial_pool;
    let rate = bank_rate.max(client_rate);
    let mut dt = 1e-3_f64;
    if rate > 0.0 {
        dt = dt.min(0.1 / rate);
    }
    if let Some(lag) = config.min_positive_lag() {
        dt = dt.min(lag);
    }
    dt.min(t_end)
}

/// Solution history: node times with pool values and slopes, enough for
/// cubic Hermite reconstruction anywhere the integrator may look back.
struct History {
    times: Vec<f64>,
    values: Vec<[f64; 2]>,
    slopes: Vec<[f64; 2]>,
    initial: [f64; 2],
}

impl History {
    fn new(initial: [f64; 2]) -> Self {
        Self { times: Vec::new(), values: Vec::new(), slopes: Vec::new(), initial }
    }

    fn push(&mut self, t: f64, value: [f64; 2], slope: [f64; 2]) {
        self.times.push(t);
        self.values.push(value);
        self.slopes.push(slope);
    }

    /// Pool of `side` at absolute time `s`. Constant initial pool on
    /// s <= 0; cubic Hermite between recorded nodes afterwards.
    fn value(&self, side: Side, s: f64) -> f64 {
        let j = side.index();
        if s <= 0.0 || self.times.is_empty() {
            return self.initial[j];
        }
        let idx = self.times.partition_point(|&x| x <= s);
        if idx == 0 {
            return self.initial[j];
        }
        if idx == self.times.len() {
            // Round-off can push a stage time an ulp past the newest node.
            return self.values[idx - 1][j];
        }
        let i = idx - 1;
        if s == self.times[i] {
            return self.values[i][j];
        }
        let h = self.times[idx] - self.times[i];
        let theta = (s - self.times[i]) / h;
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + theta;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i][j]
            + h10 * h * self.slopes[i][j]
            + h01 * self.values[idx][j]
            + h11 * h * self.slopes[idx][j]
    }

    /// Drops nodes that can never be looked up again. The newest node at
    /// or before `horizon` stays so the segment crossing it survives.
    fn prune(&mut self, horizon: f64) {
        let idx = self.times.partition_point(|&x| x <= horizon);
        if idx > 1 {
            let keep_from = idx - 1;
            self.times.drain(..keep_from);
            self.values.drain(..keep_from);
            self.slopes.drain(..keep_from);
        }
    }
}

fn check_grid(grid: &[f64]) -> Result<(), DdeError> {
    if grid.is_empty() {
        return Err(DdeError::BadGrid("grid must contain at least one time"));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(DdeError::BadGrid("grid times must be finite"));
    }
    if grid[0] < 0.0 {
        return Err(DdeError::BadGrid("grid must start at or after t = 0"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DdeError::BadGrid("grid must be strictly increasing"));
    }
    Ok(())
}

/// Times in (0, t_end) where the solution loses smoothness: every sum of
/// up to three lags. Deeper generations are already C^3 there, which the
/// fourth-order stepper absorbs.
fn breakpoints(config: &InteractionConfig, t_end: f64) -> Vec<f64> {
    let lags = [
        config.bank.operation_time,
        config.client.operation_time,
        config.bank.attention_delay,
        config.client.attention_delay,
    ];
    let mut points = Vec::new();
    for k0 in 0..=3_u32 {
        for k1 in 0..=3 - k0 {
            for k2 in 0..=3 - k0 - k1 {
                for k3 in 0..=3 - k0 - k1 - k2 {
                    if k0 + k1 + k2 + k3 == 0 {
                        continue;
                    }
                    let sum = k0 as f64 * lags[0]
                        + k1 as f64 * lags[1]
                        + k2 as f64 * lags[2]
                        + k3 as f64 * lags[3];
                    if sum > 0.0 && sum < t_end {
                        points.push(sum);
                    }
                }
            }
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let eps = 1e-12 * t_end.max(1.0);
    let mut deduped: Vec<f64> = Vec::with_capacity(points.len());
    for p in points {
        if deduped.last().is_none_or(|&last| p - last > eps) {
            deduped.push(p);
        }
    }
    deduped
}

/// Integrates the delayed interaction from the initial pools, sampling
/// [bank, client] at every grid time. `dt` must not exceed the smallest
/// positive lag; that keeps every delayed lookup inside already-computed
/// history.
pub fn integrate(
    config: &InteractionConfig,
    grid: &[f64],
    dt: f64,
) -> Result<Trajectory, DdeError> {
    let report = config.validate();
    if !report.is_ok() {
        return Err(DdeError::InvalidConfig(report.violations));
    }
    check_grid(grid)?;
    if dt <= 0.0 || !dt.is_finite() {
        return Err(DdeError::BadStep(dt));
    }
    if let Some(lag) = config.min_positive_lag() {
        if dt > lag {
            return Err(DdeError::StepExceedsLag { step: dt, lag });
        }
    }

    let t_end = *grid.last().unwrap();
    let eps = 1e-12 * t_end.max(1.0);

    // One ordered pass of stop times: grid times are recorded, lag
    // breakpoints only force a step boundary. Breakpoints that coincide
    // with a grid time are served by the grid stop itself.
    let mut stops: Vec<(f64, bool)> = grid
        .iter()
        .filter(|&&g| g > 0.0)
        .map(|&g| (g, true))
        .collect();
    for b in breakpoints(config, t_end) {
        if !grid.iter().any(|&g| (g - b).abs() <= eps) {
            stops.push((b, false));
        }
    }
    stops.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut y = [config.bank.initial_pool, config.client.initial_pool];
    let mut history = History::new(y);
    let max_lag = config.max_lag();

    let eval = |t: f64, levels: [f64; 2], history: &History| -> Result<[f64; 2], DdeError> {
        let mut out = [0.0; 2];
        interaction_rhs(config, t, levels, |side, s| history.value(side, s), &mut out)?;
        Ok(out)
    };

    let mut dy = eval(0.0, y, &history)?;
    history.push(0.0, y, dy);

    let mut levels = Vec::with_capacity(grid.len() * 2);
    if grid[0] == 0.0 {
        levels.extend_from_slice(&y);
    }

    let mut t = 0.0_f64;
    for &(stop, record) in &stops {
        while t < stop {
            let h = (stop - t).min(dt);
            let k1 = dy;
            let mut stage = [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]];
            let k2 = eval(t + 0.5 * h, stage, &history)?;
            stage = [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]];
            let k3 = eval(t + 0.5 * h, stage, &history)?;
            stage = [y[0] + h * k3[0], y[1] + h * k3[1]];
            let k4 = eval(t + h, stage, &history)?;
            for i in 0..2 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t = if stop - t > dt { t + dt } else { stop };

            for (i, side) in [(0, Side::Bank), (1, Side::Client)] {
                if !y[i].is_finite() {
                    return Err(DdeError::NonFinite { time: t });
                }
                if y[i] < -NEGATIVITY_TOLERANCE {
                    return Err(DdeError::NegativeLevel { side, time: t, value: y[i] });
                }
            }

            // Slope at the new node doubles as next step's k1.
            dy = eval(t, y, &history)?;
            history.push(t, y, dy);
            if history.times.len() > 2048 {
                history.prune(t - max_lag - dt);
            }
        }
        if record {
            levels.extend_from_slice(&y);
        }
    }

    Ok(Trajectory::new(grid.to_vec(), 2, levels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::uniform_grid;

    #[allow(clippy::too_many_arguments)] // mirrors the ten config keys
    fn config(
        p_b: f64,
        lambda_b: f64,
        tau_b: f64,
        delta_b: f64,
        n_b: f64,
        p_c: f64,
        lambda_c: f64,
        tau_c: f64,
        delta_c: f64,
        n_c: f64,
    ) -> InteractionConfig {
        InteractionConfig {
            bank: SideParams {
                success_probability: p_b,
                productivity: lambda_b,
                operation_time: tau_b,
                attention_delay: delta_b,
                initial_pool: n_b,
            },
            client: SideParams {
                success_probability: p_c,
                productivity: lambda_c,
                operation_time: tau_c,
                attention_delay: delta_c,
                initial_pool: n_c,
            },
        }
    }

    #[test]
    fn first_interval_is_exponential() {
        // Within the first interval every delayed lookup lands in the
        // constant pre-history, so the bank pool is exactly
        // N_B exp(-p_C lambda_C N_C t / N_B).
        let cfg = config(0.3, 1.0, 1.0, 1.0, 10.0, 0.5, 0.2, 1.0, 1.0, 50.0);
        let grid = uniform_grid(0.5, 6).unwrap();
        let traj = integrate(&cfg, &grid, 1e-3).unwrap();
        let expected = 10.0 * (-0.25_f64).exp();
        assert!((traj.value(5, 0) - expected).abs() < 1e-6);
    }

    #[test]
    fn prehistory_is_constant_before_zero() {
        // All lags exceed the horizon, so every lookup hits t < 0 and the
        // run never leaves the first interval.
        let cfg = config(0.4, 0.7, 3.0, 2.5, 8.0, 0.5, 0.2, 3.0, 2.5, 50.0);
        let grid = uniform_grid(1.0, 3).unwrap();
        let traj = integrate(&cfg, &grid, 1e-3).unwrap();
        let rate = 0.5 * 0.2 * 50.0 / 8.0;
        let expected = 8.0 * (-rate * 1.0_f64).exp();
        assert!((traj.value(2, 0) - expected).abs() < 1e-6);
    }

    #[test]
    fn zero_success_probability_freezes_pools() {
        let cfg = config(0.0, 1.0, 0.5, 0.25, 10.0, 0.0, 2.0, 0.5, 0.25, 20.0);
        let grid = uniform_grid(3.0, 7).unwrap();
        let traj = integrate(&cfg, &grid, 0.05).unwrap();
        for k in 0..traj.len() {
            assert_eq!(traj.value(k, 0), 10.0);
            assert_eq!(traj.value(k, 1), 20.0);
        }
    }

    #[test]
    fn mirrored_config_mirrors_trajectories() {
        let cfg = config(0.3, 0.25, 0.5, 0.2, 12.0, 0.2, 0.15, 0.7, 0.3, 30.0);
        let mirrored = InteractionConfig { bank: cfg.client, client: cfg.bank };
        let grid = uniform_grid(5.0, 11).unwrap();
        let a = integrate(&cfg, &grid, 0.01).unwrap();
        let b = integrate(&mirrored, &grid, 0.01).unwrap();
        for k in 0..a.len() {
            assert!((a.value(k, 0) - b.value(k, 1)).abs() <= 1e-9);
            assert!((a.value(k, 1) - b.value(k, 0)).abs() <= 1e-9);
        }
    }

    #[test]
    fn zero_lag_system_matches_closed_form() {
        // With all lags zero the self-correction cancels and the system
        // is linear: dm_B/dt = -a m_C, dm_C/dt = -b m_B.
        let cfg = config(0.5, 0.6, 0.0, 0.0, 10.0, 0.4, 0.5, 0.0, 0.0, 15.0);
        let a = 0.4_f64 * 0.5;
        let b = 0.5_f64 * 0.6;
        let omega = (a * b).sqrt();
        let grid = uniform_grid(1.0, 5).unwrap();
        let traj = integrate(&cfg, &grid, 1e-3).unwrap();
        for (k, &t) in grid.iter().enumerate() {
            let coef_plus = 0.5 * (10.0 - a * 15.0 / omega);
            let coef_minus = 0.5 * (10.0 + a * 15.0 / omega);
            let expected = coef_plus * (omega * t).exp() + coef_minus * (-omega * t).exp();
            assert!((traj.value(k, 0) - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn emptied_pool_reports_singularity() {
        // With a zero bank attention delay the self-correction cancels
        // and the client side is inert, so the bank pool declines at the
        // constant rate p_C lambda_C N_C = 1 and empties at t = 10. The
        // stage evaluation there sees a denominator at the floor.
        let cfg = config(0.0, 1.0, 0.5, 0.0, 10.0, 0.5, 0.1, 0.5, 0.25, 20.0);
        let grid = uniform_grid(20.0, 5).unwrap();
        let err = integrate(&cfg, &grid, 0.1).unwrap_err();
        match err {
            DdeError::Singularity { side, time } => {
                assert_eq!(side, Side::Bank);
                assert!(time > 9.0 && time < 11.0);
            }
            other => panic!("expected Singularity, got {other:?}"),
        }
    }

    #[test]
    fn rhs_guards_the_delayed_denominator() {
        let cfg = config(0.3, 0.8, 0.5, 0.2, 12.0, 0.6, 0.4, 0.7, 0.3, 30.0);
        let mut out = [0.0; 2];
        let err = interaction_rhs(&cfg, 1.0, [5.0, 5.0], |_, _| 1e-13, &mut out).unwrap_err();
        assert_eq!(err, DdeError::Singularity { side: Side::Bank, time: 1.0 });
    }

    #[test]
    fn step_larger_than_smallest_lag_is_rejected() {
        let cfg = config(0.3, 0.8, 0.5, 0.1, 12.0, 0.6, 0.4, 0.7, 0.3, 30.0);
        let grid = uniform_grid(2.0, 5).unwrap();
        assert_eq!(
            integrate(&cfg, &grid, 0.5),
            Err(DdeError::StepExceedsLag { step: 0.5, lag: 0.1 })
        );
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = config(0.3, 0.8, 0.5, 0.2, 12.0, 0.6, 0.4, 0.7, 0.3, 30.0);
        cfg.bank.success_probability = -0.1;
        let grid = uniform_grid(1.0, 3).unwrap();
        assert!(matches!(
            integrate(&cfg, &grid, 0.01),
            Err(DdeError::InvalidConfig(_))
        ));
    }

    #[test]
    fn trajectory_shape_and_initial_row() {
        let cfg = config(0.3, 0.8, 0.5, 0.2, 12.0, 0.6, 0.4, 0.7, 0.3, 30.0);
        let grid = uniform_grid(1.0, 4).unwrap();
        let traj = integrate(&cfg, &grid, 0.01).unwrap();
        assert_eq!(traj.n_states, 2);
        assert_eq!(traj.len(), 4);
        assert_eq!(traj.row(0), &[12.0, 30.0]);
    }

    #[test]
    fn default_step_respects_lags_and_rates() {
        let cfg = config(0.3, 0.8, 0.5, 0.2, 12.0, 0.6, 0.4, 0.7, 0.3, 30.0);
        let dt = default_step(&cfg, 10.0);
        assert!(dt <= 0.2 && dt > 0.0);
        let fast = config(0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 400.0, 0.0, 0.0, 1.0);
        assert_eq!(default_step(&fast, 10.0), 0.1 / 400.0);
    }

    #[test]
    fn pools_decline_monotonically() {
        let cfg = config(0.3, 0.25, 0.5, 0.2, 12.0, 0.2, 0.15, 0.7, 0.3, 30.0);
        let grid = uniform_grid(4.0, 41).unwrap();
        let traj = integrate(&cfg, &grid, 0.01).unwrap();
        for k in 1..traj.len() {
            assert!(traj.value(k, 0) <= traj.value(k - 1, 0));
            assert!(traj.value(k, 1) <= traj.value(k - 1, 1));
        }
    }
}
