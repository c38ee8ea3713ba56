//! Physical-space planning: the exact optimal solution of the
//! velocity-constrained 4th-order sub-problem, the S-curve (MIM) baseline,
//! gap metrics, and the full rest-to-rest composer.
//!
//! States are `(x1, x2, x3, x4)` = (jerk, acceleration, velocity,
//! position) with snap control `u`.  The sub-problem starts at the
//! tangency `(x01, 0, M3, x04)` with `x01 < 0`; its optimal control
//! chatters into the cruise `x3 = M3`, while the MIM baseline reaches the
//! cruise directly.

use std::fmt;

use crate::chattering::{self, ChatteringConstants};
use crate::control::{PiecewiseControl, Trajectory, TrajectorySample};
use crate::dynamics::{integral_of_state, propagate, sample};
use crate::numeric::{bisect, golden_section_minimize};
use crate::state::{Bound, Bounds, StateVector};

#[derive(Clone, Debug, PartialEq)]
pub enum PlanError {
    /// The displacement is below the chattering-plus-cruise threshold; the
    /// structured solution does not apply.
    DisplacementTooSmall,
    /// No cruise arc at `x3 = M3` fits the displacement.
    CruiseImpossible,
    /// The acceleration-phase sub-planner found no admissible profile.
    SubPlannerFailure,
    Infeasible,
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::DisplacementTooSmall => write!(f, "displacement too small"),
            PlanError::CruiseImpossible => write!(f, "no cruise arc fits the displacement"),
            PlanError::SubPlannerFailure => write!(f, "acceleration sub-planner failed"),
            PlanError::Infeasible => write!(f, "infeasible boundary states"),
        }
    }
}

impl std::error::Error for PlanError {}

/// The velocity-constrained sub-problem: start at the tangency
/// `(x01, 0, M3, x04)` with `x01 < 0`, end at `(0, 0, M3, xf4)`.
#[derive(Clone, Copy, Debug)]
pub struct Problem7Spec {
    pub m0: f64,
    pub m3: f64,
    /// Initial jerk-state, strictly negative.
    pub x01: f64,
    pub x04: f64,
    pub xf4: f64,
}

impl Problem7Spec {
    fn validate(&self) -> Result<(), PlanError> {
        if !(self.m0 > 0.0 && self.m3 > 0.0 && self.x01 < 0.0) {
            return Err(PlanError::Infeasible);
        }
        Ok(())
    }

    /// Displacement threshold: the chattering phase alone covers
    /// `-(x01/M0) ((x01^3/M0^2) J* + M3 tau_inf*)`.
    pub fn min_displacement(&self, c: &ChatteringConstants) -> f64 {
        -(self.x01 / self.m0)
            * (self.x01.powi(3) / (self.m0 * self.m0) * c.j_star + self.m3 * c.tau_inf)
    }
}

/// A solved sub-problem plan.
#[derive(Clone, Debug)]
pub struct Problem7Plan {
    pub spec: Problem7Spec,
    /// Chattering limit time (cruise entry).
    pub t_inf: f64,
    /// Terminal time.
    pub t_f: f64,
    /// Position at the limit time.
    pub x_inf4: f64,
    /// Junction times `t_1, t_2, ...` (empty for the MIM baseline).
    pub junction_times: Vec<f64>,
    pub control: PiecewiseControl,
}

impl Problem7Plan {
    /// Initial physical state `(x01, 0, M3, x04)`.
    pub fn x0(&self) -> StateVector {
        StateVector::new(vec![self.spec.x01, 0.0, self.spec.m3, self.spec.x04])
    }

    /// Exact junction state `(alpha^i x01, 0, M3, x4(t_i))` where the
    /// position follows from the running-integral substitution:
    /// `x4(t_i) = x_inf4 - M3 (t_inf - t_i) + (x01^4/M0^3) J* alpha^(4i)`
    /// (the deviation from the cruise line decays like `alpha^(4i)` while
    /// the cruise shortfall decays like `alpha^i`).
    pub fn junction_state(&self, c: &ChatteringConstants, i: u32) -> StateVector {
        let a = c.alpha.powi(i as i32);
        let t_i = -self.spec.x01 / self.spec.m0 * c.junction_time(i);
        StateVector::new(vec![
            a * self.spec.x01,
            0.0,
            self.spec.m3,
            self.x_inf4 - self.spec.m3 * (self.t_inf - t_i)
                + self.spec.x01.powi(4) / self.spec.m0.powi(3) * c.j_star * a.powi(4),
        ])
    }

    pub fn trajectory(&self, dt: f64) -> Trajectory {
        sample(&self.x0(), &self.control, dt)
    }
}

/// Maps a scaled-time control into physical time: durations scale by
/// `-x01/M0`, levels by `-M0`.
fn map_control(spec: &Problem7Spec, y_control: &PiecewiseControl) -> PiecewiseControl {
    let tscale = -spec.x01 / spec.m0;
    PiecewiseControl::new(
        y_control.t0() * tscale,
        y_control
            .segments()
            .iter()
            .map(|s| (s.duration * tscale, -spec.m0 * s.level))
            .collect(),
    )
}

/// Solves the sub-problem exactly: chattering cycles scaled into physical
/// time, then the cruise `u = 0` at `x3 = M3` until `t_f`.
pub fn solve_problem7(
    spec: &Problem7Spec,
    c: &ChatteringConstants,
    n_cycles: u32,
) -> Result<Problem7Plan, PlanError> {
    spec.validate()?;
    let disp = spec.xf4 - spec.x04;
    if disp < spec.min_displacement(c) {
        return Err(PlanError::DisplacementTooSmall);
    }
    let tscale = -spec.x01 / spec.m0;
    let t_inf = tscale * c.tau_inf;
    let t_f = disp / spec.m3 + spec.x01.powi(4) * c.j_star / (spec.m0.powi(3) * spec.m3);
    let x_inf4 = spec.x04 + spec.min_displacement(c);
    let mut control = map_control(spec, &chattering_schedule_for(c, n_cycles));
    let junction_times = (1..=n_cycles)
        .map(|i| tscale * c.junction_time(i))
        .collect();
    let cruise = t_f - control.t_end();
    if cruise < -1e-9 * t_f.max(1.0) {
        return Err(PlanError::DisplacementTooSmall);
    }
    control.push(cruise, 0.0);
    Ok(Problem7Plan {
        spec: *spec,
        t_inf,
        t_f,
        x_inf4,
        junction_times,
        control,
    })
}

fn chattering_schedule_for(c: &ChatteringConstants, n_cycles: u32) -> PiecewiseControl {
    chattering::chattering_schedule(c, n_cycles)
}

/// The MIM baseline for the sub-problem: the scaled state runs the direct
/// two-switch maneuver to the origin (the `alpha = 0` family member) and
/// then cruises.
pub fn solve_problem7_mim(spec: &Problem7Spec) -> Result<Problem7Plan, PlanError> {
    spec.validate()?;
    let f0 = chattering::family_point(0.0, 1e-12).map_err(|_| PlanError::SubPlannerFailure)?;
    let disp = spec.xf4 - spec.x04;
    let tscale = -spec.x01 / spec.m0;
    let min_disp =
        -(spec.x01 / spec.m0) * (spec.x01.powi(3) / (spec.m0 * spec.m0) * f0.j + spec.m3 * f0.tau1);
    if disp < min_disp {
        return Err(PlanError::DisplacementTooSmall);
    }
    let t_inf = tscale * f0.tau1;
    let t_f = disp / spec.m3 + spec.x01.powi(4) * f0.j / (spec.m0.powi(3) * spec.m3);
    let mut control = map_control(spec, &f0.cycle_control());
    control.push(t_f - control.t_end(), 0.0);
    Ok(Problem7Plan {
        spec: *spec,
        t_inf,
        t_f,
        x_inf4: spec.x04 + min_disp,
        junction_times: Vec::new(),
        control,
    })
}

/// Maps a sampled scaled trajectory `(tau, y, v)` through the equivalence
/// substitutions into physical coordinates:
/// `t = -x01/M0 tau`, `u = -M0 v`, `x_k` component scalings, and `x4` via
/// the running integral of `y3`.
pub fn map_scaled_to_physical(spec: &Problem7Spec, y_traj: &Trajectory) -> Trajectory {
    let tscale = -spec.x01 / spec.m0;
    let k1 = spec.x01;
    let k2 = -spec.x01 * spec.x01 / spec.m0;
    let k3 = spec.x01.powi(3) / (spec.m0 * spec.m0);
    let k4 = -spec.x01.powi(4) / spec.m0.powi(3);
    let samples = y_traj
        .samples
        .iter()
        .map(|s| {
            let y3_int = integral_of_state(&y_traj.x0, &y_traj.control.truncated(s.t), 3)
                .expect("order-3 integral");
            let t = tscale * s.t;
            TrajectorySample {
                t,
                x: StateVector::new(vec![
                    k1 * s.x.get(1),
                    k2 * s.x.get(2),
                    k3 * s.x.get(3) + spec.m3,
                    k4 * y3_int + spec.m3 * t + spec.x04,
                ]),
                u: -spec.m0 * s.u,
            }
        })
        .collect();
    let control = map_control(spec, &y_traj.control);
    let t_f = control.t_end();
    Trajectory {
        x0: StateVector::new(vec![spec.x01, 0.0, spec.m3, spec.x04]),
        control,
        samples,
        t_f,
        cost: t_f,
    }
}

/// Rest-to-rest specification: order-4 bounds and the two rest positions.
#[derive(Clone, Debug)]
pub struct RestToRestSpec {
    pub bounds: Bounds,
    pub x4_from: f64,
    pub x4_to: f64,
}

impl RestToRestSpec {
    fn limits(&self) -> Result<(f64, f64, f64, f64), PlanError> {
        if self.bounds.order() != 4 {
            return Err(PlanError::Infeasible);
        }
        let need = |b: Bound| b.finite().ok_or(PlanError::Infeasible);
        let m0 = self.bounds.control();
        let m1 = need(self.bounds.state(1))?;
        let m2 = need(self.bounds.state(2))?;
        let m3 = need(self.bounds.state(3))?;
        if let Bound::Finite(m4) = self.bounds.state(4) {
            if self.x4_from.abs() > m4 || self.x4_to.abs() > m4 {
                return Err(PlanError::Infeasible);
            }
        }
        Ok((m0, m1, m2, m3))
    }
}

/// A composed rest-to-rest plan.
#[derive(Clone, Debug)]
pub struct RestToRestPlan {
    pub spec: RestToRestSpec,
    pub t_f_opt: f64,
    pub t_f_mim: f64,
    /// Optimized tangency jerk-state.
    pub x01_opt: f64,
    /// First chattering limit time.
    pub t_inf_first: f64,
    /// The full antisymmetric optimal schedule.
    pub control: PiecewiseControl,
}

impl RestToRestPlan {
    pub fn x0(&self) -> StateVector {
        StateVector::new(vec![0.0, 0.0, 0.0, self.x4_from()])
    }

    fn x4_from(&self) -> f64 {
        self.spec.x4_from
    }

    pub fn trajectory(&self, dt: f64) -> Trajectory {
        sample(&self.x0(), &self.control, dt)
    }
}

/// Acceleration phase `(0,0,0) -> (x01, 0, M3)` in `(x1, x2, x3)` space:
/// monotone acceleration profile with optional jerk and acceleration
/// holds, ending mid-descent with jerk `x01 <= 0`.
///
/// Returns the schedule, or `None` when no profile of this family fits.
type Legs = (Vec<(f64, f64)>, Vec<(f64, f64)>);

fn accel_phase(m0: f64, m1: f64, m2: f64, m3: f64, x01: f64) -> Option<PiecewiseControl> {
    let j = -x01 / m0; // d - e >= 0
    let legs = |acc_peak: f64| -> Option<Legs> {
        // rising leg (0,0) -> (0, acc_peak)
        let up = if acc_peak <= m1 * m1 / m0 + 1e-15 {
            let p = (acc_peak / m0).sqrt();
            vec![(p, m0), (p, -m0)]
        } else {
            let h = (acc_peak - m1 * m1 / m0) / m1;
            vec![(m1 / m0, m0), (h, 0.0), (m1 / m0, -m0)]
        };
        // falling leg (0, acc_peak) -> (x01, 0)
        if acc_peak < x01 * x01 / (2.0 * m0) - 1e-15 {
            return None;
        }
        let e = -j + (j * j / 2.0 + acc_peak / m0).sqrt();
        let d = e + j;
        let down = if m0 * d <= m1 + 1e-15 {
            vec![(d, -m0), (e, m0)]
        } else {
            let e2 = (x01 + m1) / m0;
            let h2 = (acc_peak - m1 * m1 / (2.0 * m0) - m1 * e2 + m0 * e2 * e2 / 2.0) / m1;
            if h2 < -1e-12 {
                return None;
            }
            vec![(m1 / m0, -m0), (h2.max(0.0), 0.0), (e2, m0)]
        };
        Some((up, down))
    };
    let dx3 = |acc_peak: f64| -> Option<f64> {
        let (up, down) = legs(acc_peak)?;
        let mut segs = up;
        segs.extend(down);
        let pc = PiecewiseControl::new(0.0, segs);
        Some(propagate(&StateVector::zero(3), &pc).get(3))
    };
    let a_lo = (x01 * x01 / (2.0 * m0)).max(1e-300);
    if a_lo > m2 {
        return None;
    }
    let v_hi = dx3(m2)?;
    let (acc_peak, hold) = if v_hi > m3 {
        let v_lo = dx3(a_lo)?;
        if v_lo > m3 {
            return None;
        }
        let a = bisect(|a| dx3(a).unwrap_or(f64::INFINITY) - m3, a_lo, m2);
        (a, 0.0)
    } else {
        (m2, (m3 - v_hi) / m2)
    };
    let (up, down) = legs(acc_peak)?;
    let mut segs = up;
    if hold > 0.0 {
        segs.push((hold, 0.0));
    }
    segs.extend(down);
    let pc = PiecewiseControl::new(0.0, segs);
    let end = propagate(&StateVector::zero(3), &pc);
    if (end.get(1) - x01).abs() > 1e-8 * m1.max(1.0)
        || end.get(2).abs() > 1e-8 * m2.max(1.0)
        || (end.get(3) - m3).abs() > 1e-8 * m3
    {
        return None;
    }
    Some(pc)
}

/// Time loss of one half (acceleration phase plus chattering entry)
/// relative to cruising: `T - D/M3 + J* x01^4 / (M0^3 M3)`.
fn half_time_loss(
    m0: f64,
    m1: f64,
    m2: f64,
    m3: f64,
    x01: f64,
    j_star: f64,
) -> Option<(f64, PiecewiseControl, f64)> {
    let pc = accel_phase(m0, m1, m2, m3, x01)?;
    let t = pc.duration();
    let d = propagate(&StateVector::zero(4), &pc).get(4);
    let loss = t - d / m3 + j_star * x01.powi(4) / (m0.powi(3) * m3);
    Some((loss, pc, d))
}

/// Plans the antisymmetric rest-to-rest trajectory.
///
/// One half is an acceleration phase to the tangency `(x01, 0, M3)`
/// followed by the scaled chattering entry; the tangency jerk `x01` is
/// chosen by golden-section minimization of the time loss relative to
/// cruising.  The MIM total uses the direct `x01 = 0` member (the plain
/// S-curve into the cruise).
pub fn plan_rest_to_rest(spec: &RestToRestSpec, tol: f64) -> Result<RestToRestPlan, PlanError> {
    assert!(tol > 0.0);
    let (m0, m1, m2, m3) = spec.limits()?;
    let displacement = spec.x4_to - spec.x4_from;
    if displacement <= 0.0 {
        return Err(PlanError::Infeasible);
    }
    let c = chattering::solve_constants(1e-12).map_err(|_| PlanError::SubPlannerFailure)?;
    let loss_at = |x01: f64| {
        half_time_loss(m0, m1, m2, m3, x01, c.j_star)
            .map(|(l, _, _)| l)
            .unwrap_or(f64::INFINITY)
    };
    let (l_mim, _, d_mim) =
        half_time_loss(m0, m1, m2, m3, 0.0, c.j_star).ok_or(PlanError::SubPlannerFailure)?;
    // bracket: stop where the family becomes infeasible
    let mut lo = -m1;
    while loss_at(lo).is_infinite() && lo < -1e-6 * m1 {
        lo *= 0.5;
    }
    if loss_at(lo).is_infinite() {
        return Err(PlanError::SubPlannerFailure);
    }
    let (x01_opt, l_opt) = golden_section_minimize(loss_at, lo, -1e-6 * m1, 1e-12 * m1);
    if !l_opt.is_finite() {
        return Err(PlanError::SubPlannerFailure);
    }
    let (_, accel, d_opt) =
        half_time_loss(m0, m1, m2, m3, x01_opt, c.j_star).ok_or(PlanError::SubPlannerFailure)?;

    let t_f_mim = displacement / m3 + 2.0 * l_mim;
    let t_f_opt = displacement / m3 + 2.0 * l_opt.min(l_mim);

    // cruise feasibility for the optimal composition
    let p7 = Problem7Spec {
        m0,
        m3,
        x01: x01_opt,
        x04: 0.0,
        xf4: 0.0,
    };
    let d_chat = p7.min_displacement(&c);
    if displacement < 2.0 * (d_opt + d_chat) - 1e-9 || displacement < 2.0 * d_mim - 1e-9 {
        return Err(PlanError::CruiseImpossible);
    }

    // assemble the full antisymmetric schedule
    let mut half: Vec<(f64, f64)> = accel
        .segments()
        .iter()
        .map(|s| (s.duration, s.level))
        .collect();
    let chat = map_control(&p7, &chattering_schedule_for(&c, 40));
    half.extend(chat.segments().iter().map(|s| (s.duration, s.level)));
    let half_time: f64 = half.iter().map(|s| s.0).sum();
    let cruise = t_f_opt - 2.0 * half_time;
    if cruise < -tol {
        return Err(PlanError::CruiseImpossible);
    }
    let mut segs = half.clone();
    segs.push((cruise.max(0.0), 0.0));
    segs.extend(half.iter().rev().map(|&(d, l)| (d, -l)));
    let control = PiecewiseControl::new(0.0, segs);
    let t_inf_first = accel.duration() + (-x01_opt / m0) * c.tau_inf;
    Ok(RestToRestPlan {
        spec: spec.clone(),
        t_f_opt,
        t_f_mim,
        x01_opt,
        t_inf_first,
        control,
    })
}

/// Which bound pair a gap surface varies.
#[derive(Clone, Copy, Debug)]
pub enum GapAxes {
    /// Vary `(M0, M1)` with the given `M2`.
    M0M1 { m2: f64 },
    /// Vary `(M1, M2)` with the given `M0`.
    M1M2 { m0: f64 },
}

/// A grid of `t_f_mim - t_f_opt` gaps (displacement-independent, assuming
/// a cruise arc exists).
#[derive(Clone, Debug)]
pub struct GapSurface {
    pub axes: GapAxes,
    pub m3: f64,
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    /// `gap[i][j]` for `(a_values[i], b_values[j])`; NaN where infeasible.
    pub gap: Vec<Vec<f64>>,
}

impl GapSurface {
    pub fn to_csv(&self) -> String {
        let (na, nb) = match self.axes {
            GapAxes::M0M1 { .. } => ("m0", "m1"),
            GapAxes::M1M2 { .. } => ("m1", "m2"),
        };
        let mut out = format!("{na},{nb},gap\n");
        for (i, &a) in self.a_values.iter().enumerate() {
            for (j, &b) in self.b_values.iter().enumerate() {
                out.push_str(&format!("{a:.16e},{b:.16e},{:.16e}\n", self.gap[i][j]));
            }
        }
        out
    }
}

/// Evaluates the MIM-minus-optimal gap over a bound grid; each cell is
/// `2 (L(0) - min_x01 L(x01))` for that cell's bounds.
pub fn gap_surface(
    axes: GapAxes,
    m3: f64,
    a_values: &[f64],
    b_values: &[f64],
) -> Result<GapSurface, PlanError> {
    let c = chattering::solve_constants(1e-12).map_err(|_| PlanError::SubPlannerFailure)?;
    let mut gap = vec![vec![f64::NAN; b_values.len()]; a_values.len()];
    for (i, &a) in a_values.iter().enumerate() {
        for (j, &b) in b_values.iter().enumerate() {
            let (m0, m1, m2) = match axes {
                GapAxes::M0M1 { m2 } => (a, b, m2),
                GapAxes::M1M2 { m0 } => (m0, a, b),
            };
            if !(m0 > 0.0 && m1 > 0.0 && m2 > 0.0) {
                continue;
            }
            let loss_at = |x01: f64| {
                half_time_loss(m0, m1, m2, m3, x01, c.j_star)
                    .map(|(l, _, _)| l)
                    .unwrap_or(f64::INFINITY)
            };
            let l0 = loss_at(0.0);
            if l0.is_infinite() {
                continue;
            }
            let mut lo = -m1;
            while loss_at(lo).is_infinite() && lo < -1e-6 * m1 {
                lo *= 0.5;
            }
            let (_, l_opt) = golden_section_minimize(loss_at, lo, -1e-6 * m1, 1e-11 * m1);
            if l_opt.is_finite() {
                gap[i][j] = 2.0 * (l0 - l_opt.min(l0));
            }
        }
    }
    Ok(GapSurface {
        axes,
        m3,
        a_values: a_values.to_vec(),
        b_values: b_values.to_vec(),
        gap,
    })
}
