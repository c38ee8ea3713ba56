//! Piecewise-constant control schedules and sampled trajectories.

use crate::state::{Bounds, StateVector};

/// One constant-control piece.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub level: f64,
}

/// A piecewise-constant control schedule starting at `t0`.
///
/// Durations are strictly positive; zero-length pieces are dropped on
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseControl {
    t0: f64,
    segments: Vec<Segment>,
}

impl PiecewiseControl {
    pub fn new(t0: f64, segments: Vec<(f64, f64)>) -> Self {
        let segments = segments
            .into_iter()
            .filter(|&(d, _)| d > 0.0)
            .map(|(duration, level)| Segment { duration, level })
            .collect();
        PiecewiseControl { t0, segments }
    }

    pub fn empty(t0: f64) -> Self {
        PiecewiseControl {
            t0,
            segments: Vec::new(),
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Total schedule duration.
    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// End time `t0 + total duration`.
    pub fn t_end(&self) -> f64 {
        self.t0 + self.duration()
    }

    /// Appends another schedule (its `t0` is ignored).
    pub fn extend(&mut self, other: &PiecewiseControl) {
        self.segments.extend_from_slice(&other.segments);
    }

    pub fn push(&mut self, duration: f64, level: f64) {
        if duration > 0.0 {
            self.segments.push(Segment { duration, level });
        }
    }

    /// Control level at time `t` (left-continuous at boundaries; the last
    /// level extends beyond the end).
    pub fn level_at(&self, t: f64) -> f64 {
        let mut acc = self.t0;
        for s in &self.segments {
            acc += s.duration;
            if t <= acc {
                return s.level;
            }
        }
        self.segments.last().map_or(0.0, |s| s.level)
    }

    /// Segment boundary times `t0, t0 + d1, t0 + d1 + d2, ...`.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut acc = self.t0;
        out.push(acc);
        for s in &self.segments {
            acc += s.duration;
            out.push(acc);
        }
        out
    }

    /// The prefix of the schedule truncated at absolute time `t`.
    pub fn truncated(&self, t: f64) -> PiecewiseControl {
        let mut out = PiecewiseControl::empty(self.t0);
        let mut remaining = t - self.t0;
        for s in &self.segments {
            if remaining <= 0.0 {
                break;
            }
            let d = s.duration.min(remaining);
            out.push(d, s.level);
            remaining -= s.duration;
        }
        out
    }

    /// True when every level magnitude respects `M_0`.
    pub fn admissible(&self, bounds: &Bounds) -> bool {
        let m0 = bounds.control();
        self.segments
            .iter()
            .all(|s| s.level.abs() <= m0 * (1.0 + 1e-12))
    }

    /// Number of control switches (level changes between consecutive
    /// pieces).
    pub fn switch_count(&self) -> usize {
        self.segments
            .windows(2)
            .filter(|w| w[0].level != w[1].level)
            .count()
    }
}

/// One trajectory sample.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: StateVector,
    pub u: f64,
}

/// A sampled trajectory together with the exact schedule that produced it.
///
/// The schedule and initial state are kept so that audits can examine the
/// closed-form polynomials between samples, not just the samples.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub x0: StateVector,
    pub control: PiecewiseControl,
    pub samples: Vec<TrajectorySample>,
    /// Terminal time.
    pub t_f: f64,
    /// Cost of the trajectory; for time-optimal runs this equals `t_f - t0`.
    pub cost: f64,
}

impl Trajectory {
    /// Writes the `t,u,x1,...,xn` CSV (>= 15 significant digits).
    pub fn to_csv(&self) -> String {
        let n = self.x0.order();
        let mut out = String::from("t,u");
        for k in 1..=n {
            out.push_str(&format!(",x{k}"));
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{:.16e},{:.16e}", s.t, s.u));
            for v in s.x.as_slice() {
                out.push_str(&format!(",{v:.16e}"));
            }
            out.push('\n');
        }
        out
    }
}
