//! The chattering-constants system, exact optimal cycles of the scaled
//! infinite-horizon problem, its costates, and the one-parameter cost
//! family.
//!
//! The scaled problem runs the 3rd-order chain `y1' = v, y2' = y1,
//! y3' = y2` from `y(0) = e1` under `|v| <= 1`, `y3 >= 0`, minimizing the
//! integral of `y3`.  Its optimal control chatters: cycles of three bang
//! arcs with switch fractions `beta1, beta2`, each cycle shrinking the
//! state by the attenuation rate `alpha` and the duration by the same
//! factor, accumulating at `tau_inf = tau1 / (1 - alpha)`.

use std::fmt;

use crate::control::PiecewiseControl;
use crate::dynamics::{integral_of_state, propagate, state_range};
use crate::numeric::{damped_newton, scan_roots};
use crate::state::StateVector;

/// Errors from the constants solver.
#[derive(Clone, Debug, PartialEq)]
pub enum SolveError {
    /// Newton failed from the seed and every fallback grid start.
    NoConvergence,
    /// A root was found but violates `0 < beta1 < beta2 < 1 < beta3` or
    /// `0 < alpha < 1`.
    NotInFeasibleBox,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::NoConvergence => write!(f, "constants solver did not converge"),
            SolveError::NotInFeasibleBox => {
                write!(f, "solution violates 0 < beta1 < beta2 < 1 < beta3")
            }
        }
    }
}

impl std::error::Error for SolveError {}

/// Errors from the one-parameter family evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyError {
    NoConvergence,
    /// The one-cycle trajectory dips `y3` below zero.
    Infeasible,
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::NoConvergence => write!(f, "family solve did not converge"),
            FamilyError::Infeasible => write!(f, "cycle dips y3 below zero"),
        }
    }
}

impl std::error::Error for FamilyError {}

/// The solved chattering constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChatteringConstants {
    /// Attenuation rate `alpha` in (0, 1).
    pub alpha: f64,
    /// First switch fraction in (0, 1).
    pub beta1: f64,
    /// Second switch fraction in (beta1, 1).
    pub beta2: f64,
    /// Third costate-root fraction, > 1.
    pub beta3: f64,
    /// First cycle duration.
    pub tau1: f64,
    /// Chattering limit time `tau1 / (1 - alpha)`.
    pub tau_inf: f64,
    /// Cost of the first cycle.
    pub j1: f64,
    /// Total cost `j1 / (1 - alpha^4)`.
    pub j_star: f64,
}

impl ChatteringConstants {
    /// Junction time `tau_i = (1 - alpha^i) / (1 - alpha) * tau1`.
    pub fn junction_time(&self, i: u32) -> f64 {
        (1.0 - self.alpha.powi(i as i32)) / (1.0 - self.alpha) * self.tau1
    }

    /// Duration of cycle `i >= 1`: `alpha^(i-1) * tau1`.
    pub fn cycle_duration(&self, i: u32) -> f64 {
        debug_assert!(i >= 1);
        self.alpha.powi(i as i32 - 1) * self.tau1
    }

    /// Residuals of the five defining equations at these constants.
    pub fn residuals(&self) -> [f64; 5] {
        eq13_residuals(self.alpha, self.beta1, self.beta2, self.beta3, self.tau1)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Residuals of the five defining equations in
/// `(alpha, beta1, beta2, beta3, tau1)`:
/// three cycle-endpoint equations (the state must reach `alpha * e1`), and
/// two costate-root recursion equations.
pub fn eq13_residuals(alpha: f64, b1: f64, b2: f64, b3: f64, tau1: f64) -> [f64; 5] {
    let c1 = 1.0 - 2.0 * (1.0 - b1) + 2.0 * (1.0 - b2);
    let c2 = 1.0 - 2.0 * (1.0 - b1).powi(2) + 2.0 * (1.0 - b2).powi(2);
    let c3 = 1.0 - 2.0 * (1.0 - b1).powi(3) + 2.0 * (1.0 - b2).powi(3);
    let s = b1 + b2 + b3;
    let q = b1 * b2 + b1 * b3 + b2 * b3;
    let p = b1 * b2 * b3;
    [
        c1 * tau1 - (1.0 - alpha),
        c2 * tau1 - 2.0,
        c3 * tau1 - 3.0,
        2.0 * s + (alpha * alpha - 1.0) * q - 3.0,
        s - q - p * (alpha.powi(3) - 1.0) - 1.0,
    ]
}

/// The two tau-free combinations of the cycle-endpoint equations.
pub fn eq31_residuals(alpha: f64, b1: f64, b2: f64) -> [f64; 2] {
    [
        4.0 * b1.powi(3) - 6.0 * b1 * b1 - 4.0 * b2.powi(3) + 6.0 * b2 * b2 - 1.0,
        (2.0 * b1 * b1 - 2.0 * b2 * b2 + 1.0) * (alpha - 1.0) - (4.0 * b1 - 4.0 * b2 + 2.0) * alpha,
    ]
}

/// Closed form for `beta3` given `(alpha, beta1, beta2)`, obtained by
/// eliminating the next-cycle root from the two junction-matching
/// conditions.
pub fn beta3_closed_form(alpha: f64, b1: f64, b2: f64) -> f64 {
    let s = b1 + b2;
    let q = b1 * b2;
    let f1 = s - s * s + q * (s + 2.0 * alpha - alpha * s);
    let f2 = alpha * q * (3.0 - 2.0 * s - q * (alpha * alpha - 1.0)) + s * (1.0 - s + q);
    f2 / f1
}

fn reduced_system(z: &[f64]) -> Vec<f64> {
    let (alpha, b1, b2) = (z[0], z[1], z[2]);
    let b3 = beta3_closed_form(alpha, b1, b2);
    let r31 = eq31_residuals(alpha, b1, b2);
    let q = b1 * b2 + b1 * b3 + b2 * b3;
    let rd = 2.0 * (b1 + b2 + b3) + (alpha * alpha - 1.0) * q - 3.0;
    vec![r31[0], r31[1], rd]
}

/// Solves the chattering-constants system to residuals below `tol`.
///
/// Damped Newton from the seed `(alpha, beta1, beta2) = (0.17, 0.47, 0.87)`,
/// falling back to the best cell of a coarse 50^3 grid scan if the seed
/// diverges.  `beta3` is back-substituted from its closed form, `tau1` from
/// the first cycle-endpoint equation, `tau_inf = tau1 / (1 - alpha)`.
pub fn solve_constants(tol: f64) -> Result<ChatteringConstants, SolveError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let newton_tol = (tol * 1e-2).min(1e-13);
    let mut sol = damped_newton(reduced_system, &[0.17, 0.47, 0.87], newton_tol, 80);
    if sol.is_none() {
        // coarse grid fallback
        let mut best = (f64::INFINITY, [0.0; 3]);
        let n = 50;
        for ia in 1..n {
            let alpha = ia as f64 / n as f64;
            for i1 in 1..n {
                let b1 = i1 as f64 / n as f64;
                for i2 in i1 + 1..n {
                    let b2 = i2 as f64 / n as f64;
                    let r = reduced_system(&[alpha, b1, b2]);
                    let norm = r.iter().map(|x| x * x).sum::<f64>();
                    if norm < best.0 {
                        best = (norm, [alpha, b1, b2]);
                    }
                }
            }
        }
        sol = damped_newton(reduced_system, &best.1, newton_tol, 120);
    }
    let z = sol.ok_or(SolveError::NoConvergence)?;
    let (alpha, b1, b2) = (z[0], z[1], z[2]);
    let b3 = beta3_closed_form(alpha, b1, b2);
    if !(0.0 < alpha && alpha < 1.0 && 0.0 < b1 && b1 < b2 && b2 < 1.0 && b3 > 1.0) {
        return Err(SolveError::NotInFeasibleBox);
    }
    let c1 = 1.0 - 2.0 * (1.0 - b1) + 2.0 * (1.0 - b2);
    let tau1 = (1.0 - alpha) / c1;
    let tau_inf = tau1 / (1.0 - alpha);
    let mut c = ChatteringConstants {
        alpha,
        beta1: b1,
        beta2: b2,
        beta3: b3,
        tau1,
        tau_inf,
        j1: 0.0,
        j_star: 0.0,
    };
    if c.max_residual() > tol {
        return Err(SolveError::NoConvergence);
    }
    c.j1 = integral_of_state(
        &StateVector::new(vec![1.0, 0.0, 0.0]),
        &cycle_control(&c, 1),
        3,
    )
    .expect("order-3 integral");
    c.j_star = c.j1 / (1.0 - alpha.powi(4));
    Ok(c)
}

/// The optimal control on cycle `i >= 1`: three bang arcs with levels
/// `(-1, +1, -1)` switching at fractions `beta1` and `beta2` of the cycle.
pub fn cycle_control(c: &ChatteringConstants, i: u32) -> PiecewiseControl {
    let delta = c.cycle_duration(i);
    PiecewiseControl::new(
        c.junction_time(i - 1),
        vec![
            (c.beta1 * delta, -1.0),
            ((c.beta2 - c.beta1) * delta, 1.0),
            ((1.0 - c.beta2) * delta, -1.0),
        ],
    )
}

/// Cycles `1..=n_cycles` concatenated, starting from `y(0) = e1`.  Stops
/// early once a cycle shrinks below `1e-15 * tau1`.
pub fn chattering_schedule(c: &ChatteringConstants, n_cycles: u32) -> PiecewiseControl {
    let mut pc = PiecewiseControl::empty(0.0);
    for i in 1..=n_cycles {
        if c.cycle_duration(i) < 1e-15 * c.tau1 {
            break;
        }
        pc.extend(&cycle_control(c, i));
    }
    pc
}

/// One costate interval: the cubic `p1` on `(tau_{i-1}, tau_i)` written by
/// its three roots, plus the `p3` jump at the interval's right junction.
#[derive(Clone, Copy, Debug)]
pub struct CostateArc {
    pub p0: f64,
    pub interval_index: u32,
    pub tau_start: f64,
    pub tau_end: f64,
    /// Roots `(1 - beta_k) tau_{i-1} + beta_k tau_i`; the third lies just
    /// past `tau_end` since `beta3 > 1`.
    pub roots: [f64; 3],
    /// Jump `p3(tau_i^+) - p3(tau_i^-) >= 0` matching the next arc.
    pub mu: f64,
}

impl CostateArc {
    /// `p1(tau) = -(p0/6) * prod_k (tau - root_k)`.
    pub fn p1(&self, tau: f64) -> f64 {
        -(self.p0 / 6.0) * (tau - self.roots[0]) * (tau - self.roots[1]) * (tau - self.roots[2])
    }

    /// `p2 = -dp1/dtau`.
    pub fn p2(&self, tau: f64) -> f64 {
        let [r1, r2, r3] = self.roots;
        (self.p0 / 6.0)
            * ((tau - r1) * (tau - r2) + (tau - r1) * (tau - r3) + (tau - r2) * (tau - r3))
    }

    /// `p3 = d^2 p1 / dtau^2 = -p0 tau + (p0/3) (r1 + r2 + r3)`.
    pub fn p3(&self, tau: f64) -> f64 {
        -self.p0 * tau + self.p0 / 3.0 * (self.roots[0] + self.roots[1] + self.roots[2])
    }
}

/// The costate cubic on interval `i >= 1` for the given multiplier
/// `p0 > 0`, with the junction jump `mu_i` computed as the `p3` difference
/// against the next arc.
pub fn costate_arc(c: &ChatteringConstants, p0: f64, i: u32) -> CostateArc {
    assert!(p0 > 0.0, "p0 must be positive");
    let ts = c.junction_time(i - 1);
    let te = c.junction_time(i);
    let root = |b: f64| (1.0 - b) * ts + b * te;
    let roots = [root(c.beta1), root(c.beta2), root(c.beta3)];
    // sum of next-arc roots minus this arc's: both share the (1-alpha)
    // structure, so the jump collapses to a closed form in the cycle length
    let delta = te - ts;
    let mu = p0 * delta / 3.0 * (3.0 - (1.0 - c.alpha) * (c.beta1 + c.beta2 + c.beta3));
    CostateArc {
        p0,
        interval_index: i,
        tau_start: ts,
        tau_end: te,
        roots,
        mu,
    }
}

/// One member of the cost family: the cycle that reaches `alpha * e1`
/// kinematically (first control `-1`), its duration, switch fractions, and
/// costs.
#[derive(Clone, Copy, Debug)]
pub struct AlphaFamilyPoint {
    pub alpha: f64,
    pub tau1: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// One-cycle cost.
    pub j1: f64,
    /// Total cost `j1 / (1 - alpha^4)`.
    pub j: f64,
}

impl AlphaFamilyPoint {
    /// The one-cycle control for this family member.
    pub fn cycle_control(&self) -> PiecewiseControl {
        PiecewiseControl::new(
            0.0,
            vec![
                (self.beta1 * self.tau1, -1.0),
                ((self.beta2 - self.beta1) * self.tau1, 1.0),
                ((1.0 - self.beta2) * self.tau1, -1.0),
            ],
        )
    }

    /// Residuals of the three cycle-endpoint equations.
    pub fn residuals(&self) -> [f64; 3] {
        let r = eq13_residuals(self.alpha, self.beta1, self.beta2, 2.0, self.tau1);
        [r[0], r[1], r[2]]
    }
}

/// Solves the cycle-endpoint equations for attenuation `alpha in [0, 1)`
/// with the first control fixed to `-1`, then evaluates the exact cost.
///
/// Reduction: with `b = 1 - beta1`, `c = 1 - beta2`, `d = b - c`,
/// `s = b + c`, the second equation fixes `s(d)` and the third becomes a
/// single scalar root-find in `d` on `(0, 1/2)`.
pub fn family_point(alpha: f64, tol: f64) -> Result<AlphaFamilyPoint, FamilyError> {
    assert!((0.0..1.0).contains(&alpha), "alpha must be in [0, 1)");
    assert!(tol > 0.0);
    let k2 = 2.0 / (1.0 - alpha);
    let k3 = 3.0 / (1.0 - alpha);
    let s_of = |d: f64| (1.0 - k2 * (1.0 - 2.0 * d)) / (2.0 * d);
    let g = |d: f64| {
        let s = s_of(d);
        1.0 - d * (3.0 * s * s + d * d) / 2.0 - k3 * (1.0 - 2.0 * d)
    };
    let mut found = None;
    for d in scan_roots(g, 1e-9, 0.5 - 1e-9, 4000) {
        let s = s_of(d);
        let b = (s + d) / 2.0;
        let c = (s - d) / 2.0;
        if (0.0..1.0).contains(&b) && (0.0..1.0).contains(&c) && c < b {
            found = Some((b, c));
            break;
        }
    }
    let (b, c) = found.ok_or(FamilyError::NoConvergence)?;
    let beta1 = 1.0 - b;
    let beta2 = 1.0 - c;
    let c1 = 1.0 - 2.0 * b + 2.0 * c;
    let tau1 = (1.0 - alpha) / c1;
    if !(tau1 > 0.0) {
        return Err(FamilyError::NoConvergence);
    }
    let mut fp = AlphaFamilyPoint {
        alpha,
        tau1,
        beta1,
        beta2,
        j1: 0.0,
        j: 0.0,
    };
    let r = fp.residuals();
    if r.iter().any(|v| v.abs() > tol.max(1e-9)) {
        return Err(FamilyError::NoConvergence);
    }
    let y0 = StateVector::new(vec![1.0, 0.0, 0.0]);
    let pc = fp.cycle_control();
    let (y3_min, _) = state_range(&y0, &pc, 3).expect("order-3 range");
    if y3_min < -1e-9 {
        return Err(FamilyError::Infeasible);
    }
    fp.j1 = integral_of_state(&y0, &pc, 3).expect("order-3 integral");
    fp.j = fp.j1 / (1.0 - alpha.powi(4));
    Ok(fp)
}

/// Max over the grid of `|y_k(tau; a) - a^k y_k(tau / a)|`, `k = 1..3`,
/// comparing the optimal schedule from `a * e1` against the scaled optimal
/// schedule from `e1`.
pub fn homogeneity_deviation(c: &ChatteringConstants, a: f64, grid: &[f64]) -> f64 {
    assert!(a > 0.0);
    let n_cycles = 40;
    let base = chattering_schedule(c, n_cycles);
    // schedule from a*e1: same structure, durations scaled by a
    let scaled = PiecewiseControl::new(
        0.0,
        base.segments()
            .iter()
            .map(|s| (s.duration * a, s.level))
            .collect(),
    );
    let e1 = StateVector::new(vec![1.0, 0.0, 0.0]);
    let ae1 = StateVector::new(vec![a, 0.0, 0.0]);
    let mut worst = 0.0f64;
    for &tau in grid {
        if tau < 0.0 || tau > scaled.duration() || tau / a > base.duration() {
            continue;
        }
        let ya = propagate(&ae1, &scaled.truncated(tau));
        let y = propagate(&e1, &base.truncated(tau / a));
        for k in 1..=3usize {
            let dev = (ya.get(k) - a.powi(k as i32) * y.get(k)).abs();
            worst = worst.max(dev);
        }
    }
    worst
}

/// Minimal normalized residual of one of the small one-switch systems over
/// its open domain, with the location of the minimum.
#[derive(Clone, Copy, Debug)]
pub struct SystemScan {
    pub min_residual: f64,
    /// `(tau1, tau_prime)` at the minimum.
    pub argmin: (f64, f64),
    pub v0: f64,
}

/// Numerical demonstration that the two one-switch systems have no solution
/// on their open domains.
///
/// * `to_origin`: a single switch driving `e1` to the origin (residual
///   stays far from zero everywhere).
/// * `to_alpha`: a single switch driving `e1` to `alpha * e1` with
///   `alpha` in `[0, 0.99]`; the system's only roots have `alpha = 1`
///   (degenerate, excluded), so the clamped residual stays bounded away
///   from zero.
#[derive(Clone, Copy, Debug)]
pub struct OneSwitchReport {
    pub to_origin: SystemScan,
    pub to_alpha: SystemScan,
}

/// Residual of the one-switch-to-origin system; `tp` is the switch time in
/// `(0, tau1]`.  Components are scale-normalized by `max(1, tau1)` powers.
pub fn one_switch_origin_residual(tau1: f64, tp: f64, v0: f64) -> f64 {
    let w = tau1 - tp;
    let r1 = 1.0 + v0 * (tau1 - 2.0 * w);
    let r2 = tau1 + v0 / 2.0 * (tau1 * tau1 - 2.0 * w * w);
    let r3 = tau1 * tau1 / 2.0 + v0 / 6.0 * (tau1.powi(3) - 2.0 * w.powi(3));
    let s = tau1.max(1.0);
    (r1 * r1 + (r2 / s).powi(2) + (r3 / (s * s)).powi(2)).sqrt()
}

/// Residual of the one-switch-to-`alpha * e1` system with `alpha` clamped
/// to `[0, alpha_max]`; the second piece has duration `tp`.
pub fn one_switch_alpha_residual(tau1: f64, tp: f64, v0: f64, alpha_max: f64) -> f64 {
    let a_implied = 1.0 + v0 * (tau1 - 2.0 * tp);
    let a = a_implied.clamp(0.0, alpha_max);
    let r1 = a_implied - a;
    let r2 = tau1 + v0 / 2.0 * (tau1 * tau1 - 2.0 * tp * tp);
    let r3 = tau1 * tau1 / 2.0 + v0 / 6.0 * (tau1.powi(3) - 2.0 * tp.powi(3));
    let s = tau1.max(1.0);
    (r1 * r1 + (r2 / s).powi(2) + (r3 / (s * s)).powi(2)).sqrt()
}

fn scan_min(res: impl Fn(f64, f64, f64) -> f64) -> SystemScan {
    let mut best = SystemScan {
        min_residual: f64::INFINITY,
        argmin: (0.0, 0.0),
        v0: 1.0,
    };
    for &v0 in &[1.0, -1.0] {
        for it in 1..=400 {
            let tau1 = 12.0 * it as f64 / 400.0;
            for ip in 1..=200 {
                let tp = tau1 * ip as f64 / 200.0;
                let r = res(tau1, tp, v0);
                if r < best.min_residual {
                    best = SystemScan {
                        min_residual: r,
                        argmin: (tau1, tp),
                        v0,
                    };
                }
            }
        }
    }
    // local grid refinement around the best cell
    let mut half = (12.0 / 400.0, 12.0 / 200.0);
    for _ in 0..40 {
        let (t0, p0) = best.argmin;
        for it in -6..=6 {
            for ip in -6..=6 {
                let tau1 = t0 + half.0 * it as f64 / 6.0;
                if tau1 <= 0.0 {
                    continue;
                }
                let tp = (p0 + half.1 * ip as f64 / 6.0).clamp(1e-12, tau1);
                let r = res(tau1, tp, best.v0);
                if r < best.min_residual {
                    best.min_residual = r;
                    best.argmin = (tau1, tp);
                }
            }
        }
        half = (half.0 * 0.6, half.1 * 0.6);
    }
    best
}

/// Scans both one-switch systems.  See [`OneSwitchReport`].
pub fn one_switch_infeasibility() -> OneSwitchReport {
    OneSwitchReport {
        to_origin: scan_min(one_switch_origin_residual),
        to_alpha: scan_min(|t, p, v| one_switch_alpha_residual(t, p, v, 0.99)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::audit;
    use crate::dynamics::sample;
    use crate::state::Bounds;

    fn constants() -> ChatteringConstants {
        solve_constants(1e-12).unwrap()
    }

    #[test]
    fn matches_reference_constants() {
        let c = constants();
        assert!((c.alpha - 0.1660687).abs() < 1e-6);
        assert!((c.beta1 - 0.4698574).abs() < 1e-6);
        assert!((c.beta2 - 0.8716996).abs() < 1e-6);
        assert!((c.beta3 - 1.0283610).abs() < 1e-6);
        assert!((c.tau1 - 4.2479105).abs() < 1e-6);
        assert!((c.tau_inf - 5.0938372).abs() < 1e-6);
    }

    #[test]
    fn defining_equation_residuals_tiny() {
        let c = constants();
        let r = c.residuals();
        assert!(r[1].abs() <= 1e-10, "second-equation residual {}", r[1]);
        assert!(c.max_residual() <= 1e-10);
    }

    #[test]
    fn tau_inf_exact_by_construction() {
        let c = constants();
        assert_eq!(c.tau_inf, c.tau1 / (1.0 - c.alpha));
        assert_eq!(c.j_star, c.j1 / (1.0 - c.alpha.powi(4)));
    }

    #[test]
    fn rejects_nonpositive_tol() {
        let r = std::panic::catch_unwind(|| solve_constants(-1.0));
        assert!(r.is_err());
    }

    #[test]
    fn cycle_reaches_attenuated_state() {
        let c = constants();
        let y = propagate(
            &StateVector::new(vec![1.0, 0.0, 0.0]),
            &cycle_control(&c, 1),
        );
        assert!((y.get(1) - c.alpha).abs() < 1e-9);
        assert!(y.get(2).abs() < 1e-9 && y.get(3).abs() < 1e-9);
    }

    #[test]
    fn second_cycle_duration() {
        let c = constants();
        // tau2 - tau1 = alpha * tau1 = 0.7054446 (to 7 digits)
        let d = c.junction_time(2) - c.junction_time(1);
        assert!((d - 0.7054446).abs() < 1e-6);
        assert!((d - c.cycle_duration(2)).abs() < 1e-14);
    }

    #[test]
    fn schedule_terminal_state_and_duration() {
        let c = constants();
        let pc = chattering_schedule(&c, 30);
        let y = propagate(&StateVector::new(vec![1.0, 0.0, 0.0]), &pc);
        // alpha^30 ~ 4.6e-24: below double-precision relevance
        assert!(y.get(1).abs() < 1e-12);
        let expect = c.tau1 * (1.0 - c.alpha.powi(30)) / (1.0 - c.alpha);
        assert!((pc.duration() - expect).abs() < 1e-12);
        assert!((pc.duration() - c.tau_inf).abs() < 1e-12);
    }

    #[test]
    fn five_cycle_schedule_keeps_y3_nonnegative() {
        let c = constants();
        let pc = chattering_schedule(&c, 5);
        let traj = sample(&StateVector::new(vec![1.0, 0.0, 0.0]), &pc, 0.01);
        for s in &traj.samples {
            assert!(s.x.get(3) >= -1e-9, "y3 = {} at t = {}", s.x.get(3), s.t);
        }
        // audit under (|y1| <= 1, |v| <= 1): y1 starts at the bound
        let b = Bounds::from_values(&[1.0, 1.0, f64::INFINITY, f64::INFINITY]).unwrap();
        assert!(audit(&traj, &b).worst() <= 1e-9);
    }

    #[test]
    fn costate_sign_pattern_matches_control() {
        let c = constants();
        let arc = costate_arc(&c, 1.0, 1);
        let t_a = 0.5 * c.beta1 * c.tau1; // inside the first (-1) piece
        let t_b = 0.5 * (c.beta1 + c.beta2) * c.tau1; // inside the (+1) piece
        let t_c = 0.5 * (c.beta2 + 1.0) * c.tau1; // inside the last (-1) piece
        assert!(arc.p1(t_a) > 0.0);
        assert!(arc.p1(t_b) < 0.0);
        assert!(arc.p1(t_c) > 0.0);
    }

    #[test]
    fn costate_continuous_at_junctions() {
        let c = constants();
        for i in 1..6 {
            let a = costate_arc(&c, 1.0, i);
            let b = costate_arc(&c, 1.0, i + 1);
            let tj = c.junction_time(i);
            // p1, p2 continuous; p1 nonzero at the junction (its roots
            // straddle tau_i since beta3 > 1)
            assert!((a.p1(tj) - b.p1(tj)).abs() < 1e-9 * a.p1(tj).abs());
            assert!((a.p2(tj) - b.p2(tj)).abs() < 1e-9 * a.p2(tj).abs());
            assert!(a.p1(tj) > 0.0);
            // and the p3 jump equals mu_i
            assert!((b.p3(tj) - a.p3(tj) - a.mu).abs() < 1e-9 * a.mu);
        }
    }

    #[test]
    fn mu_constant_is_first_jump() {
        let c = constants();
        let arc = costate_arc(&c, 1.0, 1);
        assert!((arc.mu - 1.4494594).abs() < 1e-5);
        // geometric decay with ratio alpha per cycle
        for i in 1..6 {
            let m = costate_arc(&c, 1.0, i).mu;
            assert!((m / c.alpha.powi(i as i32 - 1) - arc.mu).abs() < 1e-10);
        }
    }

    #[test]
    fn family_at_optimum_and_at_zero() {
        let c = constants();
        let fo = family_point(c.alpha, 1e-12).unwrap();
        assert!((fo.j - 1.3452202).abs() < 1e-6);
        let f0 = family_point(0.0, 1e-12).unwrap();
        assert!((f0.j - 1.3467626).abs() < 1e-6);
        assert!((f0.tau1 - 4.3903).abs() < 1e-3);
        let gap = (f0.j - fo.j) / fo.j;
        assert!((gap - 0.0011).abs() < 5e-5, "relative gap {gap}");
    }

    #[test]
    fn homogeneity_identity_and_cycle_shift() {
        let c = constants();
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.02).collect();
        assert_eq!(homogeneity_deviation(&c, 1.0, &grid), 0.0);
        // a = alpha is exactly the cycle-shift property
        let dev = homogeneity_deviation(&c, c.alpha, &grid);
        assert!(dev <= 1e-8, "cycle-shift deviation {dev}");
    }

    #[test]
    fn one_switch_systems_have_no_solution() {
        let rep = one_switch_infeasibility();
        assert!(rep.to_origin.min_residual >= 1e-3, "{:?}", rep.to_origin);
        assert!(rep.to_alpha.min_residual >= 1e-3, "{:?}", rep.to_alpha);
        // the to-alpha minimum sits near the excluded degenerate root
        // (tau1, tau') = (4, 2) where the implied alpha is 1
        let (t, p) = rep.to_alpha.argmin;
        assert!((t - 4.0).abs() < 0.2 && (p - 2.0).abs() < 0.2);
    }
}
