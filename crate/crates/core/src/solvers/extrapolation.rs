//! FISTA momentum schedule with fixed-period and adaptive restarts.
//!
//! `beta_t = (theta_{t-1} - 1) / theta_t`,
//! `theta_{t+1} = (1 + sqrt(1 + 4 theta_t^2)) / 2`, starting from and
//! resetting to `theta_{t-1} = theta_t = 1`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtrapolationState {
    pub theta_prev: f64,
    pub theta: f64,
    /// Betas emitted since the last reset (or since the start).
    pub iterations_since_restart: usize,
    /// Total resets applied so far.
    pub restarts: usize,
}

impl Default for ExtrapolationState {
    fn default() -> Self {
        Self { theta_prev: 1.0, theta: 1.0, iterations_since_restart: 0, restarts: 0 }
    }
}

/// Emits the next momentum coefficient.
///
/// The state is reset first when `adaptive_trigger` is set or when
/// `restart_period` betas have been emitted since the last reset. A
/// simultaneous trigger of both resets once.
pub fn next_beta(
    state: &ExtrapolationState,
    restart_period: Option<usize>,
    adaptive_trigger: bool,
) -> (f64, ExtrapolationState) {
    let mut s = *state;
    let periodic = restart_period.is_some_and(|p| s.iterations_since_restart >= p);
    if adaptive_trigger || periodic {
        s.theta_prev = 1.0;
        s.theta = 1.0;
        s.iterations_since_restart = 0;
        s.restarts += 1;
    }
    let beta = (s.theta_prev - 1.0) / s.theta;
    let next_theta = 0.5 * (1.0 + (1.0 + 4.0 * s.theta * s.theta).sqrt());
    s.theta_prev = s.theta;
    s.theta = next_theta;
    s.iterations_since_restart += 1;
    (beta, s)
}
