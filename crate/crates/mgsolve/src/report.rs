//! Solve reports: residual history, iteration count, convergence factor.

/// The convergence factor is the geometric mean residual reduction
/// ρ = exp((1/N) ln(‖r_N‖/‖r_0‖)).
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub rho: f64,
    pub converged: bool,
    pub diverged: bool,
    pub wall_time: std::time::Duration,
}

impl SolveReport {
    pub fn from_history(
        history: Vec<f64>,
        converged: bool,
        diverged: bool,
        wall_time: std::time::Duration,
    ) -> Self {
        let iterations = history.len().saturating_sub(1);
        let rho = recompute_rho(&history);
        SolveReport { iterations, residual_history: history, rho, converged, diverged, wall_time }
    }

    /// Recomputes ρ from the stored history; equals `self.rho` exactly.
    pub fn recompute_rho(&self) -> f64 {
        recompute_rho(&self.residual_history)
    }
}

pub fn recompute_rho(history: &[f64]) -> f64 {
    if history.len() < 2 {
        return 0.0;
    }
    let n = (history.len() - 1) as f64;
    let r0 = history[0];
    let rn = history[history.len() - 1];
    if r0 == 0.0 || rn == 0.0 {
        return 0.0;
    }
    ((rn / r0).ln() / n).exp()
}
