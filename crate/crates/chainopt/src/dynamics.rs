//! Exact propagation of chain-of-integrator states under piecewise-constant
//! control, trajectory sampling, cost integrals, and constraint auditing.
//!
//! Everything here is closed-form polynomial arithmetic in the segment
//! times; no ODE stepping.  A fixed-step RK4 reference lives in
//! [`crate::oracle`] and is used only by tests.

use std::fmt;

use crate::control::{PiecewiseControl, Trajectory, TrajectorySample};
use crate::numeric;
use crate::state::{Bound, Bounds, StateVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DynError {
    /// State order does not match the requested component.
    OrderMismatch { order: usize, requested: usize },
}

impl fmt::Display for DynError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynError::OrderMismatch { order, requested } => {
                write!(f, "component {requested} out of range for order {order}")
            }
        }
    }
}

impl std::error::Error for DynError {}

const FACT: [f64; 13] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
];

fn factorial(j: usize) -> f64 {
    if j < FACT.len() {
        FACT[j]
    } else {
        (1..=j).map(|i| i as f64).product()
    }
}

/// Terminal state after running the whole schedule from `x0`.
///
/// Uses the superposition form: the free response of `x0` over the total
/// duration plus one `Δu_i (t_N - t_{i-1})^k / k!` term per control step.
pub fn propagate(x0: &StateVector, pc: &PiecewiseControl) -> StateVector {
    let n = x0.order();
    let total = pc.duration();
    let mut x = vec![0.0; n];
    for k in 1..=n {
        let mut v = 0.0;
        // free response
        let mut pw = 1.0;
        for j in 0..k {
            v += x0.get(k - j) * pw / factorial(j);
            pw *= total;
        }
        x[k - 1] = v;
    }
    // step responses
    let mut elapsed = 0.0;
    let mut u_prev = 0.0;
    for s in pc.segments() {
        let du = s.level - u_prev;
        let t_rem = total - elapsed;
        if du != 0.0 {
            let mut pw = t_rem;
            for k in 1..=n {
                x[k - 1] += du * pw / factorial(k);
                pw *= t_rem;
            }
        }
        u_prev = s.level;
        elapsed += s.duration;
    }
    StateVector::new(x)
}

/// State advanced across a single constant-control segment (local Taylor
/// step).  Shared by the sampling and integration paths.
fn step(x: &[f64], u: f64, dt: f64) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    for k in 1..=n {
        let mut v = 0.0;
        let mut pw = 1.0;
        for j in 0..k {
            v += x[k - 1 - j] * pw / factorial(j);
            pw *= dt;
        }
        out[k - 1] = v + u * pw / factorial(k);
    }
    out
}

/// Samples the trajectory at `t0, t0+dt, ...` plus every segment boundary,
/// with duplicates removed.  Each sample is produced by [`propagate`] on the
/// truncated schedule.
pub fn sample(x0: &StateVector, pc: &PiecewiseControl, dt: f64) -> Trajectory {
    assert!(dt > 0.0, "sample spacing must be positive");
    let t0 = pc.t0();
    let t_f = pc.t_end();
    let mut times = pc.boundaries();
    let mut t = t0;
    while t < t_f {
        times.push(t);
        t += dt;
    }
    times.push(t_f);
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));

    let samples = times
        .iter()
        .map(|&t| TrajectorySample {
            t,
            x: propagate(x0, &pc.truncated(t)),
            u: pc.level_at(t),
        })
        .collect();
    Trajectory {
        x0: x0.clone(),
        control: pc.clone(),
        samples,
        t_f,
        cost: t_f - t0,
    }
}

/// Local polynomial coefficients of `x_k` on one segment:
/// `x_k(s) = sum_j c_j s^j` with `c_j = x_{k-j}(0)/j!` and `c_k = u/k!`.
fn segment_poly(x_start: &[f64], u: f64, k: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(k + 1);
    for j in 0..k {
        c.push(x_start[k - 1 - j] / factorial(j));
    }
    c.push(u / factorial(k));
    c
}

fn poly_eval(c: &[f64], s: f64) -> f64 {
    let mut v = 0.0;
    for &ci in c.iter().rev() {
        v = v * s + ci;
    }
    v
}

/// Exact integral of `x_k` over the whole schedule, accumulated
/// segment-by-segment from the closed-form antiderivative (degree `k + 1`).
pub fn integral_of_state(
    x0: &StateVector,
    pc: &PiecewiseControl,
    k: usize,
) -> Result<f64, DynError> {
    let n = x0.order();
    if k == 0 || k > n {
        return Err(DynError::OrderMismatch {
            order: n,
            requested: k,
        });
    }
    let mut total = 0.0;
    let mut x = x0.as_slice().to_vec();
    for seg in pc.segments() {
        let c = segment_poly(&x, seg.level, k);
        let mut pw = seg.duration;
        for (j, cj) in c.iter().enumerate() {
            total += cj * pw / (j as f64 + 1.0);
            pw *= seg.duration;
        }
        x = step(&x, seg.level, seg.duration);
    }
    Ok(total)
}

/// Worst signed violation of one constraint and where it occurs.
#[derive(Clone, Copy, Debug)]
pub struct ConstraintAudit {
    /// `max |x_k| - M_k` over the trajectory (negative means margin);
    /// `-inf` for unbounded constraints.
    pub max_violation: f64,
    /// Time at which the worst magnitude is attained.
    pub at_time: f64,
    /// The worst magnitude itself.
    pub max_abs: f64,
}

/// Per-constraint audit of a trajectory against box bounds.
#[derive(Clone, Debug)]
pub struct AuditReport {
    /// One entry per state `x_1..x_n`.
    pub states: Vec<ConstraintAudit>,
    /// The control-magnitude audit.
    pub control: ConstraintAudit,
}

impl AuditReport {
    /// The largest signed violation across control and all states.
    pub fn worst(&self) -> f64 {
        self.states
            .iter()
            .map(|a| a.max_violation)
            .fold(self.control.max_violation, f64::max)
    }
}

/// Audits a trajectory against `bounds`, checking the recorded samples and
/// every interior extremum of the closed-form segment polynomials, so
/// violations between samples are caught.
///
/// Extrema of `x_k` are located at roots of `x_{k-1}` on the segment:
/// closed-form for derivative degree <= 3, bracketed bisection above.
pub fn audit(traj: &Trajectory, bounds: &Bounds) -> AuditReport {
    let n = traj.x0.order();
    assert_eq!(
        bounds.order(),
        n,
        "bounds order must match trajectory order"
    );

    let mut max_abs = vec![0.0f64; n];
    let mut at = vec![traj.control.t0(); n];
    let record = |k: usize, v: f64, t: f64, max_abs: &mut [f64], at: &mut [f64]| {
        if v.abs() > max_abs[k - 1] {
            max_abs[k - 1] = v.abs();
            at[k - 1] = t;
        }
    };

    for s in &traj.samples {
        for k in 1..=n {
            record(k, s.x.get(k), s.t, &mut max_abs, &mut at);
        }
    }

    // per-segment interior extrema
    let mut x = traj.x0.as_slice().to_vec();
    let mut t_start = traj.control.t0();
    for seg in traj.control.segments() {
        for k in 1..=n {
            let c = segment_poly(&x, seg.level, k);
            for s in extremum_candidates(&x, seg.level, k, seg.duration) {
                record(k, poly_eval(&c, s), t_start + s, &mut max_abs, &mut at);
            }
        }
        x = step(&x, seg.level, seg.duration);
        t_start += seg.duration;
    }

    let states = (1..=n)
        .map(|k| ConstraintAudit {
            max_violation: match bounds.state(k) {
                Bound::Finite(m) => max_abs[k - 1] - m,
                Bound::Unbounded => f64::NEG_INFINITY,
            },
            at_time: at[k - 1],
            max_abs: max_abs[k - 1],
        })
        .collect();

    let mut u_max = 0.0f64;
    let mut u_at = traj.control.t0();
    let mut t_acc = traj.control.t0();
    for seg in traj.control.segments() {
        if seg.level.abs() > u_max {
            u_max = seg.level.abs();
            u_at = t_acc;
        }
        t_acc += seg.duration;
    }
    AuditReport {
        states,
        control: ConstraintAudit {
            max_violation: u_max - bounds.control(),
            at_time: u_at,
            max_abs: u_max,
        },
    }
}

/// Exact range `(min, max)` of `x_k` over the schedule, from segment
/// endpoints plus interior extrema of the closed-form polynomials.
pub fn state_range(
    x0: &StateVector,
    pc: &PiecewiseControl,
    k: usize,
) -> Result<(f64, f64), DynError> {
    let n = x0.order();
    if k == 0 || k > n {
        return Err(DynError::OrderMismatch {
            order: n,
            requested: k,
        });
    }
    let mut lo = x0.get(k);
    let mut hi = x0.get(k);
    let mut x = x0.as_slice().to_vec();
    for seg in pc.segments() {
        let c = segment_poly(&x, seg.level, k);
        for s in extremum_candidates(&x, seg.level, k, seg.duration) {
            let v = poly_eval(&c, s);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        x = step(&x, seg.level, seg.duration);
        lo = lo.min(x[k - 1]);
        hi = hi.max(x[k - 1]);
    }
    Ok((lo, hi))
}

/// Interior roots of `d/ds x_k = x_{k-1}(s)` on `(0, duration)`.
fn extremum_candidates(x_start: &[f64], u: f64, k: usize, duration: f64) -> Vec<f64> {
    if k == 1 {
        return Vec::new(); // x_1 is affine in s
    }
    let d = segment_poly(x_start, u, k - 1);
    let deg = d.len() - 1;
    let roots = match deg {
        0 => Vec::new(),
        1 => {
            if d[1] == 0.0 {
                Vec::new()
            } else {
                vec![-d[0] / d[1]]
            }
        }
        2 => numeric::quadratic_roots(d[0], d[1], d[2]),
        3 => numeric::cubic_roots(d[0], d[1], d[2], d[3]),
        _ => numeric::scan_roots(|s| poly_eval(&d, s), 0.0, duration, 64),
    };
    roots
        .into_iter()
        .filter(|&s| s > 0.0 && s < duration)
        .collect()
}
