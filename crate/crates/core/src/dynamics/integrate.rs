use super::{CouplingConfig, Trajectory};
use crate::error::{Error, Result};

/// Default RK4 step, in trajectory time units.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Bloch vector `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)` sampled along a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochSeries {
    pub times: Vec<f64>,
    pub bloch: Vec<[f64; 3]>,
}

impl BlochSeries {
    pub fn last(&self) -> [f64; 3] {
        *self.bloch.last().expect("series is never empty")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Integrates `ṡ_x = −ω s_y`, `ṡ_y = ω s_x`, `ṡ_z = 0` with
/// `ω(t) = 2(ξ/ħ)θ̇(t)` by classical fixed-step RK4.
///
/// Steps are aligned to trajectory knots (each segment is split into
/// `⌈Δt/step⌉` equal substeps) so the piecewise-constant rate never
/// changes inside a step.
pub fn integrate_heisenberg(
    traj: &Trajectory,
    cfg: &CouplingConfig,
    bloch0: [f64; 3],
    step: f64,
) -> Result<BlochSeries> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Usage(format!("integration step must be positive, got {step}")));
    }
    let len = bloch0.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !len.is_finite() || len > 1.0 + 1e-12 {
        return Err(Error::Usage(format!("initial Bloch vector length {len} exceeds 1")));
    }

    let mut times = vec![traj.start_time()];
    let mut bloch = vec![bloch0];
    let mut s = bloch0;
    for seg in traj.samples().windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let dt = b.t - a.t;
        let omega = 2.0 * cfg.xi() / cfg.hbar() * (b.theta - a.theta) / dt;
        let n = (dt / step).ceil().max(1.0) as usize;
        let h = dt / n as f64;
        let f = |v: [f64; 3]| [-omega * v[1], omega * v[0], 0.0];
        for k in 0..n {
            let k1 = f(s);
            let k2 = f(axpy(s, 0.5 * h, k1));
            let k3 = f(axpy(s, 0.5 * h, k2));
            let k4 = f(axpy(s, h, k3));
            for i in 0..3 {
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            times.push(if k + 1 == n { b.t } else { a.t + (k + 1) as f64 * h });
            bloch.push(s);
        }
    }
    Ok(BlochSeries { times, bloch })
}

fn axpy(x: [f64; 3], a: f64, y: [f64; 3]) -> [f64; 3] {
    [x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]]
}
