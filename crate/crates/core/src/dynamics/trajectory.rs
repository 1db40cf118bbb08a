use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One knot of a planar path in polar coordinates centred on the line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    /// Unwrapped polar angle in radians.
    pub theta: f64,
    pub r: f64,
}

impl TrajectorySample {
    pub fn new(t: f64, theta: f64, r: f64) -> Self {
        Self { t, theta, r }
    }
}

/// Time-parameterized planar path, piecewise linear in `(t, θ, r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn new(samples: Vec<TrajectorySample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Usage(
                "trajectory needs at least two samples".into(),
            ));
        }
        for s in &samples {
            if !(s.t.is_finite() && s.theta.is_finite() && s.r.is_finite()) {
                return Err(Error::Usage(format!("non-finite trajectory sample {s:?}")));
            }
            if s.r <= 0.0 {
                return Err(Error::Usage(format!("radius must be positive at t = {}", s.t)));
            }
        }
        for w in samples.windows(2) {
            if w[1].t <= w[0].t {
                return Err(Error::Usage(format!(
                    "sample times must increase strictly ({} then {})",
                    w[0].t, w[1].t
                )));
            }
            if (w[1].theta - w[0].theta).abs() > PI {
                return Err(Error::Usage(format!(
                    "angle jumps by more than π between t = {} and t = {}; unwrap it",
                    w[0].t, w[1].t
                )));
            }
        }
        Ok(Self { samples })
    }

    /// Constant-radius, constant-rate arc from `theta0` to `theta1`.
    pub fn arc(t0: f64, t1: f64, theta0: f64, theta1: f64, r: f64) -> Result<Self> {
        if !(t1 > t0) {
            return Err(Error::Usage(format!("arc needs t1 > t0, got [{t0}, {t1}]")));
        }
        let sweep = theta1 - theta0;
        let pieces = ((sweep.abs() / (PI / 2.0)).ceil() as usize).max(1);
        let samples = (0..=pieces)
            .map(|k| {
                let f = k as f64 / pieces as f64;
                let t = if k == pieces { t1 } else { t0 + f * (t1 - t0) };
                let theta = if k == pieces { theta1 } else { theta0 + f * sweep };
                TrajectorySample::new(t, theta, r)
            })
            .collect();
        Self::new(samples)
    }

    /// Particle at rest at angle `theta`.
    pub fn stationary(t0: f64, t1: f64, theta: f64, r: f64) -> Result<Self> {
        Self::new(vec![
            TrajectorySample::new(t0, theta, r),
            TrajectorySample::new(t1, theta, r),
        ])
    }

    pub fn samples(&self) -> &[TrajectorySample] {
        &self.samples
    }

    pub fn start(&self) -> TrajectorySample {
        self.samples[0]
    }

    pub fn end(&self) -> TrajectorySample {
        *self.samples.last().expect("at least two samples")
    }

    pub fn start_time(&self) -> f64 {
        self.start().t
    }

    pub fn end_time(&self) -> f64 {
        self.end().t
    }

    pub fn duration(&self) -> f64 {
        self.end_time() - self.start_time()
    }

    pub fn delta_theta(&self) -> f64 {
        self.end().theta - self.start().theta
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start_time() && t <= self.end_time()
    }

    /// Index `k` of the segment `[samples[k], samples[k + 1]]` holding `t`.
    /// Knots belong to the segment on their right, except the final one.
    fn segment_index(&self, t: f64) -> usize {
        let last = self.samples.len() - 2;
        match self
            .samples
            .binary_search_by(|s| s.t.total_cmp(&t))
        {
            Ok(k) => k.min(last),
            Err(k) => k.saturating_sub(1).min(last),
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !self.contains(t) {
            return Err(Error::Usage(format!(
                "time {t} outside trajectory span [{}, {}]",
                self.start_time(),
                self.end_time()
            )));
        }
        Ok(())
    }

    pub fn theta_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let k = self.segment_index(t);
        let (a, b) = (self.samples[k], self.samples[k + 1]);
        Ok(a.theta + (b.theta - a.theta) * (t - a.t) / (b.t - a.t))
    }

    pub fn r_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let k = self.segment_index(t);
        let (a, b) = (self.samples[k], self.samples[k + 1]);
        Ok(a.r + (b.r - a.r) * (t - a.t) / (b.t - a.t))
    }

    /// Slope of θ on the segment holding `t` (right derivative at knots).
    pub fn angular_velocity_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let k = self.segment_index(t);
        let (a, b) = (self.samples[k], self.samples[k + 1]);
        Ok((b.theta - a.theta) / (b.t - a.t))
    }

    /// The part of the path between `t0` and `t1`, with interpolated ends.
    pub fn window(&self, t0: f64, t1: f64) -> Result<Self> {
        self.check_time(t0)?;
        self.check_time(t1)?;
        if !(t1 > t0) {
            return Err(Error::Usage(format!("empty window [{t0}, {t1}]")));
        }
        let mut samples = vec![TrajectorySample::new(t0, self.theta_at(t0)?, self.r_at(t0)?)];
        samples.extend(self.samples.iter().filter(|s| s.t > t0 && s.t < t1).copied());
        samples.push(TrajectorySample::new(t1, self.theta_at(t1)?, self.r_at(t1)?));
        Self::new(samples)
    }

    /// Follows `self` with `next`, shifting `next` in time and angle so it
    /// starts where `self` ends. The radius at the junction is taken from
    /// `self`.
    pub fn concat(&self, next: &Trajectory) -> Result<Self> {
        let end = self.end();
        let first = next.start();
        let mut samples = self.samples.clone();
        samples.extend(next.samples[1..].iter().map(|s| {
            TrajectorySample::new(
                end.t + (s.t - first.t),
                end.theta + (s.theta - first.theta),
                s.r,
            )
        }));
        Self::new(samples)
    }

    /// Same geometric path traversed with a different clock: `map` must be
    /// strictly increasing.
    pub fn retimed(&self, map: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.samples
                .iter()
                .map(|s| TrajectorySample::new(map(s.t), s.theta, s.r))
                .collect(),
        )
    }
}

/// Net number of turns about the line, `(θ_end − θ_start)/2π`.
pub fn winding_number(traj: &Trajectory) -> f64 {
    traj.delta_theta() / std::f64::consts::TAU
}
