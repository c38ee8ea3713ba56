//! Switching surfaces of the scaled problem for arbitrary initial states:
//! parameterizations of the surfaces where the optimal control switches or
//! feasibility is lost, region classification, and switch-time synthesis
//! for the one- and two-switch approach phases.
//!
//! Geometry (see [`RegionLabel`]): the feasibility boundary `Gamma_f` lies
//! below everything; between it and the switching sheet
//! `Gamma_+ ∪ Gamma_-` sits `Omega_+` (control `+1`); above the sheet sits
//! `Omega_-` (control `-1`).  The optimal trajectory alternates
//! `Omega_- -> Gamma_+ -> Omega_+ -> Gamma_-` and then chatters into the
//! origin from the first junction state `(a, 0, 0)`.

use std::fmt;

use crate::chattering::ChatteringConstants;
use crate::control::PiecewiseControl;
use crate::dynamics::propagate;
use crate::numeric::{bisect, scan_roots};
use crate::state::StateVector;

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceError {
    /// Surface parameters outside the stated parameter box.
    ParamOutOfRange,
    /// Query state has `y3 < -tol`.
    NegativeY3,
    /// No admissible control can keep `y3 >= 0` from this state.
    Infeasible,
    /// The state lies on the no-chatter curve; the direct-to-origin
    /// control (`v = -1` for the remaining time `y1`) applies instead.
    OnNoChatterCurve,
    NoConvergence,
}

impl fmt::Display for SurfaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceError::ParamOutOfRange => write!(f, "surface parameter out of range"),
            SurfaceError::NegativeY3 => write!(f, "state has negative y3"),
            SurfaceError::Infeasible => write!(f, "state is infeasible"),
            SurfaceError::OnNoChatterCurve => write!(f, "state lies on the no-chatter curve"),
            SurfaceError::NoConvergence => write!(f, "surface solve did not converge"),
        }
    }
}

impl std::error::Error for SurfaceError {}

/// Which switching surface a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    /// Two switches remain before the junction.
    GammaPlus,
    /// One switch remains before the junction.
    GammaMinus,
    /// Feasibility boundary.
    GammaF,
}

/// Classification of a scaled state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionLabel {
    /// Above the switching sheet: `v = -1` until `Gamma_+`.
    OmegaMinus,
    /// Between the feasibility boundary and the switching sheet:
    /// `v = +1` until `Gamma_-`.
    OmegaPlus,
    /// Below the feasibility boundary.
    OmegaInfeasible,
    OnGammaPlus,
    OnGammaMinus,
    OnGammaF,
    /// On `{(t, -t^2/2, t^3/6) : t >= 0}`: reaches the origin directly
    /// without chattering.
    NoChatterCurve,
}

const SHEET_SCAN_CELLS: usize = 2400;
const SHEET_SCAN_LO: f64 = 1e-9;

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegionLabel::OmegaMinus => "OmegaMinus",
            RegionLabel::OmegaPlus => "OmegaPlus",
            RegionLabel::OmegaInfeasible => "OmegaInfeasible",
            RegionLabel::OnGammaPlus => "OnGammaPlus",
            RegionLabel::OnGammaMinus => "OnGammaMinus",
            RegionLabel::OnGammaF => "OnGammaF",
            RegionLabel::NoChatterCurve => "NoChatterCurve",
        };
        write!(f, "{s}")
    }
}

/// A point on one of the surfaces with its parameters.
#[derive(Clone, Copy, Debug)]
pub struct SurfacePoint {
    pub surface: SurfaceKind,
    pub a: f64,
    /// `(t1, t2)` for `Gamma_+`; `(t, t)` for the single-parameter
    /// surfaces.
    pub params: (f64, f64),
    pub y: [f64; 3],
}

/// Pre-chattering approach: the control driving a state to its first
/// junction `(a, 0, 0)`, with the intermediate switch states.
#[derive(Clone, Debug)]
pub struct Approach {
    pub control: PiecewiseControl,
    /// Scale of the junction state reached.
    pub junction_scale: f64,
    /// Switch states in order (two for `Omega_-` starts, one for
    /// `Omega_+`).
    pub switch_points: Vec<[f64; 3]>,
}

/// Switching-surface geometry derived from the chattering constants.
#[derive(Clone, Debug)]
pub struct SwitchingSurfaces {
    constants: ChatteringConstants,
    /// Products `beta_k * tau1`.
    bt: [f64; 3],
    /// Critical point of the root-coupling function `f`.
    pub r_star: f64,
    /// Parameter box corners of `Gamma_+`.
    pub t1_star: f64,
    pub t2_star: f64,
    /// Sampled sheet points reused by every match query.
    sheet_samples: Vec<[f64; 3]>,
}

impl SwitchingSurfaces {
    /// Computes the surface constants: `r_star` as the unique critical
    /// point of `f(r) = r * prod_k (1 + beta_k tau1 / r)` on `(0, inf)`,
    /// and `(t1_star, t2_star)` from the coupled boundary system.
    pub fn new(c: &ChatteringConstants, tol: f64) -> Result<Self, SurfaceError> {
        assert!(tol > 0.0);
        let bt = [c.beta1 * c.tau1, c.beta2 * c.tau1, c.beta3 * c.tau1];
        // d(log f)/dr = sum 1/(r + bt_k) - 2/r has a single sign change
        let dlog = |r: f64| bt.iter().map(|&b| 1.0 / (r + b)).sum::<f64>() - 2.0 / r;
        let r_star = bisect(dlog, 0.5, 100.0);
        if !(dlog(0.5) < 0.0 && dlog(100.0) > 0.0) {
            return Err(SurfaceError::NoConvergence);
        }
        let mut s = SwitchingSurfaces {
            constants: *c,
            bt,
            r_star,
            t1_star: 0.0,
            t2_star: 0.0,
            sheet_samples: Vec::new(),
        };
        // boundary pair: f(t1) = f(t2) with the y3 component of Gamma_+
        // vanishing; solved by bisection on t1 > r_star
        let y3_at = |t1: f64| -> f64 {
            let t2 = s.gamma_plus_partner(t1);
            gamma_plus_unit(t1, t2)[2]
        };
        let mut hi = s.r_star * 1.5;
        while y3_at(hi) > 0.0 {
            hi *= 1.25;
            if hi > 1e4 {
                return Err(SurfaceError::NoConvergence);
            }
        }
        let t1_star = bisect(y3_at, s.r_star + 1e-9, hi);
        s.t1_star = t1_star;
        s.t2_star = s.gamma_plus_partner(t1_star);
        s.sheet_samples = (0..=SHEET_SCAN_CELLS)
            .map(|i| s.sheet_unit(s.sheet_theta(i)))
            .collect();
        Ok(s)
    }

    fn sheet_theta(&self, i: usize) -> f64 {
        SHEET_SCAN_LO + (self.t1_star - SHEET_SCAN_LO) * i as f64 / SHEET_SCAN_CELLS as f64
    }

    pub fn constants(&self) -> &ChatteringConstants {
        &self.constants
    }

    /// The root-coupling function `f(r) = prod_k (r + beta_k tau1) / r^2`.
    pub fn coupling(&self, r: f64) -> f64 {
        (r + self.bt[0]) * (r + self.bt[1]) * (r + self.bt[2]) / (r * r)
    }

    /// The `t2 <= r_star` partner with `f(t2) = f(t1)` for `t1 >= r_star`.
    ///
    /// Safeguarded Newton on the decreasing branch
    /// (`f' = f (sum 1/(r+c_k) - 2/r)`), falling back to bisection steps
    /// whenever Newton leaves the bracket or the derivative flattens near
    /// the critical point.
    pub fn gamma_plus_partner(&self, t1: f64) -> f64 {
        if t1 <= self.r_star {
            return self.r_star;
        }
        let target = self.coupling(t1);
        let mut lo = self.r_star * 0.5;
        while self.coupling(lo) < target {
            lo *= 0.5;
        }
        let mut hi = self.r_star;
        let mut t = 0.5 * (lo + hi);
        for _ in 0..80 {
            let ft = self.coupling(t);
            let h = ft - target;
            if h > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
            let dt = ft * (self.bt.iter().map(|&b| 1.0 / (t + b)).sum::<f64>() - 2.0 / t);
            let newton = t - h / dt;
            t = if dt.abs() > 1e-12 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        t
    }

    /// Closed-form surface point.
    pub fn eval(
        &self,
        surface: SurfaceKind,
        a: f64,
        params: (f64, f64),
    ) -> Result<SurfacePoint, SurfaceError> {
        if a < 0.0 {
            return Err(SurfaceError::ParamOutOfRange);
        }
        let unit = match surface {
            SurfaceKind::GammaPlus => {
                let (t1, t2) = params;
                let eps = 1e-9;
                if !(self.t2_star - eps <= t2
                    && t2 <= self.r_star + eps
                    && self.r_star - eps <= t1
                    && t1 <= self.t1_star + eps)
                {
                    return Err(SurfaceError::ParamOutOfRange);
                }
                // the two parameters must share a coupling value
                let rel = (self.coupling(t1) - self.coupling(t2)).abs() / self.coupling(t1);
                if rel > 1e-6 {
                    return Err(SurfaceError::ParamOutOfRange);
                }
                gamma_plus_unit(t1, t2)
            }
            SurfaceKind::GammaMinus => {
                let t = params.0;
                if !(0.0..=self.r_star + 1e-9).contains(&t) {
                    return Err(SurfaceError::ParamOutOfRange);
                }
                gamma_minus_unit(t)
            }
            SurfaceKind::GammaF => {
                let t = params.0;
                if !(0.0..=3.0 + 1e-9).contains(&t) {
                    return Err(SurfaceError::ParamOutOfRange);
                }
                gamma_f_unit(t)
            }
        };
        Ok(SurfacePoint {
            surface,
            a,
            params,
            y: scale_point(unit, a),
        })
    }

    /// The switching sheet `Gamma_+ ∪ Gamma_-` as one family:
    /// `theta <= r_star` is the `Gamma_-` branch at `t = theta`, beyond it
    /// the `Gamma_+` branch at `t1 = theta` with `t2` from the coupling.
    fn sheet_unit(&self, theta: f64) -> [f64; 3] {
        if theta <= self.r_star {
            gamma_minus_unit(theta)
        } else {
            gamma_plus_unit(theta, self.gamma_plus_partner(theta))
        }
    }

    /// Finds the unique sheet point sharing `(y2, y3)` with the query and
    /// returns `(theta, scale, y1_on_sheet)`.  `y3 > 0` required.
    ///
    /// Scans the cached sheet samples for sign changes of the cross-power
    /// residual and polishes each bracket with live evaluations.
    fn sheet_match(&self, y2: f64, y3: f64) -> Option<(f64, f64, f64)> {
        let res_of = |q: &[f64; 3]| y2.powi(3) * q[2] * q[2] - y3 * y3 * q[1].powi(3);
        let mut prev = res_of(&self.sheet_samples[0]);
        for i in 1..=SHEET_SCAN_CELLS {
            let cur = res_of(&self.sheet_samples[i]);
            if prev != 0.0 && cur != 0.0 && (prev < 0.0) == (cur < 0.0) {
                prev = cur;
                continue;
            }
            let th = bisect(
                |t| res_of(&self.sheet_unit(t)),
                self.sheet_theta(i - 1),
                self.sheet_theta(i),
            );
            if let Some(hit) = verify_scale(&self.sheet_unit(th), th, y2, y3) {
                return Some(hit);
            }
            prev = cur;
        }
        None
    }

    /// Same matching against the feasibility boundary.
    fn gamma_f_match(&self, y2: f64, y3: f64) -> Option<(f64, f64, f64)> {
        param_match(gamma_f_unit, 1e-9, 3.0, y2, y3)
    }

    /// Labels a scaled state by surface membership and region side tests.
    pub fn classify(&self, y: [f64; 3], tol: f64) -> Result<RegionLabel, SurfaceError> {
        assert!(tol > 0.0);
        let [y1, y2, y3] = y;
        if y3 < -tol {
            return Err(SurfaceError::NegativeY3);
        }
        let scale = y1.abs().max(y2.abs()).max(y3.abs()).max(1.0);
        // no-chatter curve {(t, -t^2/2, t^3/6): t >= 0}
        if y1 >= -tol
            && (y2 + y1 * y1 / 2.0).abs() <= tol * scale
            && (y3 - y1.powi(3) / 6.0).abs() <= tol * scale
        {
            return Ok(RegionLabel::NoChatterCurve);
        }
        if y3.abs() <= tol * scale && y2.abs() <= tol * scale {
            // junction axis: positive scale restarts the chattering cycle
            return if y1 > 0.0 {
                Ok(RegionLabel::OmegaMinus)
            } else {
                Ok(RegionLabel::OmegaInfeasible)
            };
        }
        if y3.abs() <= tol * scale {
            if y2 < 0.0 {
                // y3 = 0 with y2 < 0: the constraint is violated immediately
                return Ok(RegionLabel::OmegaInfeasible);
            }
            // y3 = 0, y2 > 0: a fresh start off the constraint; both the
            // feasibility boundary and the sheet reduce to their y3 = 0
            // edges (t = 3 and t1 = t1_star)
            let gf = gamma_f_unit(3.0);
            let y1f = (y2 / gf[1]).sqrt() * gf[0];
            if (y1 - y1f).abs() <= tol * scale {
                return Ok(RegionLabel::OnGammaF);
            }
            if y1 < y1f {
                return Ok(RegionLabel::OmegaInfeasible);
            }
            let gp = gamma_plus_unit(self.t1_star, self.t2_star);
            let y1s = (y2 / gp[1]).sqrt() * gp[0];
            if (y1 - y1s).abs() <= tol * scale {
                return Ok(RegionLabel::OnGammaPlus);
            }
            return Ok(if y1 > y1s {
                RegionLabel::OmegaMinus
            } else {
                RegionLabel::OmegaPlus
            });
        }
        if let Some((_, _, y1f)) = self.gamma_f_match(y2, y3) {
            if (y1 - y1f).abs() <= tol * scale {
                return Ok(RegionLabel::OnGammaF);
            }
            if y1 < y1f {
                return Ok(RegionLabel::OmegaInfeasible);
            }
        }
        let (theta, _, y1s) = self
            .sheet_match(y2, y3)
            .ok_or(SurfaceError::NoConvergence)?;
        if (y1 - y1s).abs() <= tol * scale {
            return Ok(if theta <= self.r_star {
                RegionLabel::OnGammaMinus
            } else {
                RegionLabel::OnGammaPlus
            });
        }
        Ok(if y1 > y1s {
            RegionLabel::OmegaMinus
        } else {
            RegionLabel::OmegaPlus
        })
    }

    /// Synthesizes the pre-chattering control (at most two switches)
    /// driving `y` to its first junction `(a, 0, 0)`.
    pub fn synthesize_approach(&self, y: [f64; 3], tol: f64) -> Result<Approach, SurfaceError> {
        let label = self.classify(y, tol)?;
        match label {
            RegionLabel::NoChatterCurve => Err(SurfaceError::OnNoChatterCurve),
            RegionLabel::OmegaInfeasible => Err(SurfaceError::Infeasible),
            RegionLabel::OmegaMinus => {
                if y[1].abs() <= tol && y[2].abs() <= tol && y[0] > 0.0 {
                    // already a junction state: the approach is the first
                    // chattering cycle itself
                    let c = &self.constants;
                    let a = y[0];
                    let d1 = c.beta1 * c.tau1 * a;
                    let d2 = (c.beta2 - c.beta1) * c.tau1 * a;
                    let d3 = (1.0 - c.beta2) * c.tau1 * a;
                    return self.assemble(y, d1, d2, d3, tol);
                }
                let d1 = self.flow_to_sheet(y, -1.0)?;
                let p = flow(y, -1.0, d1);
                let (theta, a, _) = self
                    .sheet_match(p[1], p[2])
                    .ok_or(SurfaceError::NoConvergence)?;
                if theta <= self.r_star {
                    // the -1 flow must cross on the Gamma_+ branch
                    return Err(SurfaceError::NoConvergence);
                }
                let t2 = self.gamma_plus_partner(theta);
                let d2 = a * (theta - t2);
                let d3 = a * t2;
                self.assemble(y, d1, d2, d3, tol)
            }
            RegionLabel::OnGammaPlus | RegionLabel::OmegaPlus => {
                let d2 = self.flow_to_sheet(y, 1.0)?;
                let p = flow(y, 1.0, d2);
                let (theta, a, _) = self
                    .sheet_match(p[1], p[2])
                    .ok_or(SurfaceError::NoConvergence)?;
                if theta > self.r_star {
                    return Err(SurfaceError::NoConvergence);
                }
                let d3 = a * theta;
                self.assemble(y, 0.0, d2, d3, tol)
            }
            RegionLabel::OnGammaMinus => {
                // one arc left: ride v = -1 for a * t down to the junction
                let (theta, a, _) = self
                    .sheet_match(y[1], y[2])
                    .ok_or(SurfaceError::NoConvergence)?;
                self.assemble(y, 0.0, 0.0, a * theta, tol)
            }
            RegionLabel::OnGammaF => Err(SurfaceError::Infeasible),
        }
    }

    /// Flow duration until the signed side test against the switching
    /// sheet crosses zero.
    fn flow_to_sheet(&self, y: [f64; 3], v: f64) -> Result<f64, SurfaceError> {
        let side = |s: f64| -> Option<f64> {
            let p = flow(y, v, s);
            if p[2] <= 0.0 {
                return None;
            }
            let (_, _, y1s) = self.sheet_match(p[1], p[2])?;
            Some(p[0] - y1s)
        };
        let want = -v; // side sign where the flow starts
        let mut lo = 0.0;
        let mut s = 1e-7;
        let mut g_lo = None;
        // expand until the side flips
        for _ in 0..200 {
            match side(s) {
                Some(g) if g * want > 0.0 => {
                    lo = s;
                    g_lo = Some(g);
                    s *= 1.7;
                }
                Some(_) => {
                    let glo = match g_lo {
                        Some(g) => g,
                        None => return Ok(0.0), // already at the sheet
                    };
                    let sign = if glo >= 0.0 { 1.0 } else { -1.0 };
                    let f = |t: f64| side(t).unwrap_or(-sign) * sign;
                    return Ok(bisect(f, lo, s));
                }
                None => {
                    s = 0.5 * (lo + s);
                    if s - lo < 1e-15 {
                        return Err(SurfaceError::NoConvergence);
                    }
                }
            }
            if s > 1e6 {
                break;
            }
        }
        Err(SurfaceError::NoConvergence)
    }

    /// Builds the approach control, forward-checks the junction state, and
    /// records the switch points.
    fn assemble(
        &self,
        y: [f64; 3],
        d1: f64,
        d2: f64,
        d3: f64,
        tol: f64,
    ) -> Result<Approach, SurfaceError> {
        let control = PiecewiseControl::new(0.0, vec![(d1, -1.0), (d2, 1.0), (d3, -1.0)]);
        let mut switch_points = Vec::new();
        if d1 > 0.0 {
            switch_points.push(flow(y, -1.0, d1));
        }
        if d2 > 0.0 {
            let p = flow(y, -1.0, d1);
            switch_points.push(flow(p, 1.0, d2));
        }
        let end = propagate(&StateVector::new(y.to_vec()), &control);
        let a = end.get(1);
        if end.get(2).abs() > tol.max(1e-9) || end.get(3).abs() > tol.max(1e-9) || a < 0.0 {
            return Err(SurfaceError::NoConvergence);
        }
        Ok(Approach {
            control,
            junction_scale: a,
            switch_points,
        })
    }

    /// CSV mesh dump (`surface,a,t1,t2,y1,y2,y3`) of all three surfaces.
    pub fn mesh_csv(&self, scales: &[f64], n_params: usize) -> String {
        let mut out = String::from("surface,a,t1,t2,y1,y2,y3\n");
        let mut row = |name: &str, a: f64, t1: f64, t2: Option<f64>, y: [f64; 3]| {
            let t2s = t2.map_or(String::new(), |v| format!("{v:.16e}"));
            out.push_str(&format!(
                "{name},{a:.16e},{t1:.16e},{t2s},{:.16e},{:.16e},{:.16e}\n",
                y[0], y[1], y[2]
            ));
        };
        for &a in scales {
            for i in 0..=n_params {
                let t1 = self.r_star + (self.t1_star - self.r_star) * i as f64 / n_params as f64;
                let t2 = self.gamma_plus_partner(t1);
                row(
                    "GammaPlus",
                    a,
                    t1,
                    Some(t2),
                    scale_point(gamma_plus_unit(t1, t2), a),
                );
            }
            for i in 0..=n_params {
                let t = self.r_star * i as f64 / n_params as f64;
                row(
                    "GammaMinus",
                    a,
                    t,
                    None,
                    scale_point(gamma_minus_unit(t), a),
                );
            }
            for i in 0..=n_params {
                let t = 3.0 * i as f64 / n_params as f64;
                row("GammaF", a, t, None, scale_point(gamma_f_unit(t), a));
            }
        }
        out
    }
}

/// `Gamma_+` at unit scale: the state two switches before the junction.
fn gamma_plus_unit(t1: f64, t2: f64) -> [f64; 3] {
    [
        1.0 - t1 + 2.0 * t2,
        -t1 - 2.0 * t1 * t2 + t1 * t1 / 2.0 + t2 * t2,
        t1 * t1 * t2 - t1 * t2 * t2 + t1 * t1 / 2.0 - t1.powi(3) / 6.0 + t2.powi(3) / 3.0,
    ]
}

/// `Gamma_-` at unit scale: the backward `v = -1` flow from `(1, 0, 0)`.
fn gamma_minus_unit(t: f64) -> [f64; 3] {
    [1.0 + t, -t - t * t / 2.0, t * t / 2.0 + t.powi(3) / 6.0]
}

/// `Gamma_f` at unit scale: the backward `v = +1` flow from `(1, 0, 0)`.
fn gamma_f_unit(t: f64) -> [f64; 3] {
    [1.0 - t, -t + t * t / 2.0, t * t / 2.0 - t.powi(3) / 6.0]
}

fn scale_point(unit: [f64; 3], a: f64) -> [f64; 3] {
    [a * unit[0], a * a * unit[1], a * a * a * unit[2]]
}

/// Forward flow of the scaled chain under constant `v` for duration `s`.
fn flow(y: [f64; 3], v: f64, s: f64) -> [f64; 3] {
    [
        y[0] + v * s,
        y[1] + y[0] * s + v * s * s / 2.0,
        y[2] + y[1] * s + y[0] * s * s / 2.0 + v * s.powi(3) / 6.0,
    ]
}

/// Matches a query `(y2, y3)` against a one-parameter unit family scaled by
/// `a > 0`: finds `theta` where the cross-power residual
/// `y2^3 q3^2 - y3^2 q2^3` changes sign and the scale is consistent.
/// Returns `(theta, a, a * q1)`.
fn param_match(
    unit: impl Fn(f64) -> [f64; 3],
    lo: f64,
    hi: f64,
    y2: f64,
    y3: f64,
) -> Option<(f64, f64, f64)> {
    let res = |th: f64| {
        let q = unit(th);
        y2.powi(3) * q[2] * q[2] - y3 * y3 * q[1].powi(3)
    };
    for th in scan_roots(res, lo, hi, 2400) {
        if let Some(hit) = verify_scale(&unit(th), th, y2, y3) {
            return Some(hit);
        }
    }
    None
}

/// Recovers the scale from the better-conditioned component and accepts
/// the match only when both components agree.
fn verify_scale(q: &[f64; 3], th: f64, y2: f64, y3: f64) -> Option<(f64, f64, f64)> {
    let a = if q[1].abs() >= 1e-7 && y2 * q[1] > 0.0 {
        (y2 / q[1]).sqrt()
    } else if q[2].abs() > 1e-10 && y3 * q[2] > 0.0 {
        (y3 / q[2]).cbrt()
    } else {
        return None;
    };
    let ok2 = (a * a * q[1] - y2).abs() <= 1e-7 * y2.abs().max(1.0);
    let ok3 = (a * a * a * q[2] - y3).abs() <= 1e-7 * y3.abs().max(1.0);
    if ok2 && ok3 {
        Some((th, a, a * q[0]))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chattering::solve_constants;

    fn surfaces() -> SwitchingSurfaces {
        SwitchingSurfaces::new(&solve_constants(1e-12).unwrap(), 1e-10).unwrap()
    }

    #[test]
    fn surface_constants_match_reference() {
        let s = surfaces();
        assert!((s.r_star - 6.4979).abs() < 1e-3, "r* = {}", s.r_star);
        assert!((s.t1_star - 16.8674).abs() < 1e-3);
        assert!((s.t2_star - 2.7289).abs() < 1e-3);
        // defining constraint
        assert!((s.coupling(s.t1_star) - s.coupling(s.t2_star)).abs() <= 1e-9);
    }

    #[test]
    fn gamma_f_examples() {
        let s = surfaces();
        let p = s.eval(SurfaceKind::GammaF, 1.0, (3.0, 3.0)).unwrap();
        assert!((p.y[0] + 2.0).abs() < 1e-12);
        assert!((p.y[1] - 1.5).abs() < 1e-12);
        assert!(p.y[2].abs() < 1e-12);
        let q = s.eval(SurfaceKind::GammaF, 1.0, (0.0, 0.0)).unwrap();
        assert_eq!(q.y, [1.0, 0.0, 0.0]);
        let r = s.eval(SurfaceKind::GammaMinus, 1.0, (0.0, 0.0)).unwrap();
        assert_eq!(r.y, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn param_boxes_enforced() {
        let s = surfaces();
        assert_eq!(
            s.eval(SurfaceKind::GammaF, 1.0, (3.5, 3.5)).unwrap_err(),
            SurfaceError::ParamOutOfRange
        );
        assert_eq!(
            s.eval(SurfaceKind::GammaMinus, 1.0, (s.r_star + 0.1, 0.0))
                .unwrap_err(),
            SurfaceError::ParamOutOfRange
        );
        assert!(s
            .eval(SurfaceKind::GammaPlus, 1.0, (s.r_star - 1.0, 3.0))
            .is_err());
    }

    #[test]
    fn homogeneous_scaling_exact() {
        let s = surfaces();
        let t1 = 0.5 * (s.r_star + s.t1_star);
        let t2 = s.gamma_plus_partner(t1);
        let unit = s.eval(SurfaceKind::GammaPlus, 1.0, (t1, t2)).unwrap().y;
        for a in [0.3, 2.0, 7.5] {
            let p = s.eval(SurfaceKind::GammaPlus, a, (t1, t2)).unwrap().y;
            assert_eq!(p[0], a * unit[0]);
            assert_eq!(p[1], a * a * unit[1]);
            assert_eq!(p[2], a * a * a * unit[2]);
        }
    }

    #[test]
    fn classify_examples() {
        let s = surfaces();
        assert_eq!(
            s.classify([1.0, 0.0, 0.0], 1e-9).unwrap(),
            RegionLabel::OmegaMinus
        );
        assert_eq!(
            s.classify([2.0, -2.0, 4.0 / 3.0], 1e-9).unwrap(),
            RegionLabel::NoChatterCurve
        );
        assert!(s.classify([0.0, 0.0, -1.0], 1e-9).is_err());
    }

    #[test]
    fn below_gamma_f_is_infeasible() {
        let s = surfaces();
        let p = s.eval(SurfaceKind::GammaF, 0.8, (1.3, 1.3)).unwrap().y;
        let bad = [p[0] - 1e-3, p[1], p[2]];
        assert_eq!(s.classify(bad, 1e-7).unwrap(), RegionLabel::OmegaInfeasible);
        let on = s.classify(p, 1e-7).unwrap();
        assert_eq!(on, RegionLabel::OnGammaF);
        // forward-simulation oracle: even full upward control cannot keep
        // y3 nonnegative from below the boundary
        let (y3_min, _) = crate::dynamics::state_range(
            &StateVector::new(bad.to_vec()),
            &PiecewiseControl::new(0.0, vec![(10.0, 1.0)]),
            3,
        )
        .unwrap();
        assert!(y3_min < -1e-7, "y3 min {y3_min}");
    }

    #[test]
    fn approach_from_e1_is_first_cycle() {
        let s = surfaces();
        let c = s.constants();
        let app = s.synthesize_approach([1.0, 0.0, 0.0], 1e-9).unwrap();
        assert!((app.junction_scale - c.alpha).abs() < 1e-8);
        let segs = app.control.segments();
        assert!((segs[0].duration - c.beta1 * c.tau1).abs() < 1e-9);
        assert!((segs[1].duration - (c.beta2 - c.beta1) * c.tau1).abs() < 1e-9);
    }

    #[test]
    fn no_chatter_curve_rejected_with_direct_control() {
        let s = surfaces();
        assert_eq!(
            s.synthesize_approach([2.0, -2.0, 4.0 / 3.0], 1e-9)
                .unwrap_err(),
            SurfaceError::OnNoChatterCurve
        );
    }

    #[test]
    fn gamma_plus_point_has_one_remaining_switch() {
        let s = surfaces();
        let t1 = 13.0;
        let t2 = s.gamma_plus_partner(t1);
        let p = s.eval(SurfaceKind::GammaPlus, 0.7, (t1, t2)).unwrap().y;
        assert_eq!(s.classify(p, 1e-7).unwrap(), RegionLabel::OnGammaPlus);
        let app = s.synthesize_approach(p, 1e-8).unwrap();
        assert_eq!(app.switch_points.len(), 1);
        // the single switch lies on Gamma_-
        let sw = app.switch_points[0];
        let lbl = s.classify(sw, 1e-6).unwrap();
        assert_eq!(lbl, RegionLabel::OnGammaMinus);
        // and it matches the coupled parameter t2
        let (theta, a, _) = s.sheet_match(sw[1], sw[2]).unwrap();
        assert!((theta - t2).abs() < 1e-6);
        assert!((a - 0.7).abs() < 1e-8);
    }
}
