//! Junction-time recursions showing chattering cannot occur in the
//! lower-order cases: the 4th-order acceleration-constraint recursion and
//! its divergence diagnostics, plus the 3rd-order constrained-shortcut
//! check.
//!
//! Between consecutive grazes of the acceleration bound the control is
//! forced into quarter-length arcs, and uniqueness of the optimal control
//! forces each quarter length to satisfy `fc(tau_{i+2}; tau_i, tau_{i+1}) = 0`.
//! The resulting sequence decays too slowly to sum finitely (its Raabe
//! statistic tends to 1/4), so the junction times cannot accumulate.

use std::fmt;

use crate::numeric::det3;

#[derive(Clone, Debug, PartialEq)]
pub enum RecursionError {
    /// Inputs are not strictly decreasing positive quarter lengths.
    OrderViolated,
    /// The junction pair does not describe a positive-length arc.
    InvalidJunctionPair,
}

impl fmt::Display for RecursionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecursionError::OrderViolated => {
                write!(f, "quarter lengths must satisfy 0 < tau_(i+1) < tau_i")
            }
            RecursionError::InvalidJunctionPair => write!(f, "invalid junction pair"),
        }
    }
}

impl std::error::Error for RecursionError {}

/// The quartic-coefficient quadratic in `xi` whose positive root is the
/// next quarter length:
/// `(xi1^2 - xi2^2) xi^2 + (xi1^3 + 2 xi1^2 xi2 - xi2^3) xi
///  - xi1^3 xi2 - 2 xi1^2 xi2^2 + xi2^4`.
pub fn fc(xi: f64, xi1: f64, xi2: f64) -> f64 {
    (xi1 * xi1 - xi2 * xi2) * xi * xi + (xi1.powi(3) + 2.0 * xi1 * xi1 * xi2 - xi2.powi(3)) * xi
        - xi1.powi(3) * xi2
        - 2.0 * xi1 * xi1 * xi2 * xi2
        + xi2.powi(4)
}

/// The unique positive root of `fc(.; tau_i, tau_ip1)`, guaranteed to lie
/// in `(0, tau_ip1)` for strictly decreasing inputs.
pub fn next_tau(tau_i: f64, tau_ip1: f64) -> Result<f64, RecursionError> {
    if !(0.0 < tau_ip1 && tau_ip1 < tau_i) {
        return Err(RecursionError::OrderViolated);
    }
    let a = tau_i * tau_i - tau_ip1 * tau_ip1;
    let b = tau_i.powi(3) + 2.0 * tau_i * tau_i * tau_ip1 - tau_ip1.powi(3);
    let c = -tau_i.powi(3) * tau_ip1 - 2.0 * tau_i * tau_i * tau_ip1 * tau_ip1 + tau_ip1.powi(4);
    // a > 0, b > 0, c < 0: exactly one positive root; the stable branch
    // avoids cancellation in -b + sqrt(b^2 - 4ac)
    let disc = (b * b - 4.0 * a * c).sqrt();
    let root = -2.0 * c / (b + disc);
    debug_assert!(root > 0.0 && root < tau_ip1);
    Ok(root)
}

/// The quadratic coefficient `a_i = 3 + 1/(r_i (1 - r_i))` of the ratio
/// recursion.
pub fn a_coefficient(r_i: f64) -> f64 {
    3.0 + 1.0 / (r_i * (1.0 - r_i))
}

/// One step of the ratio recursion: `r_{i+1}` solves
/// `r^2 - a_i r + 1 = 0`, taking the root in `(0, 1)` in its
/// cancellation-free form.
pub fn next_ratio(r_i: f64) -> f64 {
    let a = a_coefficient(r_i);
    2.0 / (a + (a * a - 4.0).sqrt())
}

/// Recursion trace: quarter lengths, ratios, and divergence diagnostics.
#[derive(Clone, Debug)]
pub struct RecursionState {
    /// Quarter lengths `tau_1..` (capped at `keep_taus` entries).
    pub taus: Vec<f64>,
    /// Ratios `r_i = 1 - tau_{i+1}/tau_i` for every iterate.
    pub rs: Vec<f64>,
    /// `i * r_i` at the final iterate.
    pub final_i_r: f64,
    /// Raabe statistic `i (tau_i / tau_{i+1} - 1)` at the final iterate.
    pub final_raabe: f64,
    /// Partial sums of `tau_i` at powers of two.
    pub partial_sums: Vec<(usize, f64)>,
}

/// Runs the recursion from `(tau1, tau2)` for `n_steps` ratio iterations.
///
/// The first 100 steps iterate the quarter-length form directly (and check
/// it against the ratio form); beyond that only the ratio recursion runs,
/// with the lengths reconstructed via products.
pub fn run_recursion(
    tau1: f64,
    tau2: f64,
    n_steps: usize,
) -> Result<RecursionState, RecursionError> {
    if !(0.0 < tau2 && tau2 < tau1) {
        return Err(RecursionError::OrderViolated);
    }
    assert!(n_steps >= 10, "need at least 10 steps");
    let mut rs = Vec::with_capacity(n_steps);
    let mut taus = vec![tau1, tau2];
    let mut r = 1.0 - tau2 / tau1;
    rs.push(r);
    let mut tau = tau2;
    let mut sum = tau1 + tau2;
    let mut partial_sums = Vec::new();
    let mut next_pow = 4;
    for i in 1..n_steps {
        if i < 100 {
            let t_next = next_tau(taus[i - 1], taus[i])?;
            taus.push(t_next);
        }
        r = next_ratio(r);
        rs.push(r);
        tau *= 1.0 - r;
        sum += tau;
        let count = i + 2; // number of terms summed so far
        if count >= next_pow {
            partial_sums.push((count, sum));
            next_pow *= 2;
        }
    }
    let i_last = rs.len(); // r_i indexed from 1
    let r_last = *rs.last().unwrap();
    Ok(RecursionState {
        taus,
        rs: rs.clone(),
        final_i_r: i_last as f64 * r_last,
        final_raabe: i_last as f64 * (1.0 / (1.0 - r_last) - 1.0),
        partial_sums,
    })
}

/// The junction map over one four-graze block: total quarter time, cubic
/// sum, and the weighted cubic sum that fixes the position increment.
pub fn junction_map(taus: [f64; 4]) -> [f64; 3] {
    let f1 = taus.iter().sum();
    let f2 = taus.iter().map(|t| t.powi(3)).sum();
    let mut f3 = 0.0;
    for j in 0..4 {
        let tail: f64 = taus[j + 1..].iter().sum();
        f3 += taus[j].powi(3) * (taus[j] + 2.0 * tail);
    }
    [f1, f2, f3]
}

/// Determinant of the junction map's Jacobian with respect to the first
/// three quarter lengths.  Vanishes exactly on the recursion manifold and
/// factors as `6 (tau_{i+1} + tau_{i+2}) fc(tau_{i+2}; tau_i, tau_{i+1})`.
pub fn junction_jacobian_det(taus: [f64; 4]) -> f64 {
    let [a, b, c, d] = taus;
    let jac = [
        [1.0, 1.0, 1.0],
        [3.0 * a * a, 3.0 * b * b, 3.0 * c * c],
        [
            4.0 * a.powi(3) + 6.0 * a * a * (b + c + d),
            2.0 * a.powi(3) + 4.0 * b.powi(3) + 6.0 * b * b * (c + d),
            2.0 * a.powi(3) + 2.0 * b.powi(3) + 4.0 * c.powi(3) + 6.0 * c * c * d,
        ],
    ];
    det3(&jac)
}

/// Result of the 3rd-order shortcut comparison.
#[derive(Clone, Debug)]
pub struct ShortcutReport {
    /// Time of the constrained arc riding the acceleration bound.
    pub shortcut_time: f64,
    /// Time of the fastest admissible excursion arc connecting the same
    /// junction states.
    pub fastest_excursion_time: f64,
    /// Sampled (dip depth, excess time) pairs; excess is strictly
    /// increasing in depth.
    pub excursion_family: Vec<(f64, f64)>,
}

/// Verifies that riding the constraint between consecutive 3rd-order
/// junction states (`x_1 = 0`, `x_2 = M_2`) is strictly faster than any
/// unconstrained excursion covering the same `x_3` gap.
///
/// Excursions follow the forced quarter structure `(-M0, +M0, -M0)` with
/// durations `(w, 2w, w)`: the dip depth determines the time deficit in
/// closed form, and the gap pins `w`.
pub fn check_n3_shortcut(m0: f64, m2: f64, x3_gap: f64) -> Result<ShortcutReport, RecursionError> {
    if !(m0 > 0.0 && m2 > 0.0 && x3_gap > 0.0) {
        return Err(RecursionError::InvalidJunctionPair);
    }
    let shortcut_time = x3_gap / m2;
    // symmetric excursion of half-width 2w: covers 4 w m2 - 2 m0 w^3 of
    // x3 in time 4w, dipping x2 by m0 w^2
    let coverage = |w: f64| 4.0 * w * m2 - 2.0 * m0 * w.powi(3);
    // the fastest excursion covering the gap: smallest w with coverage = gap
    let w_max = (2.0 * m2 / (3.0 * m0)).sqrt(); // coverage maximum
    if coverage(w_max) < x3_gap {
        return Err(RecursionError::InvalidJunctionPair);
    }
    let w_star = crate::numeric::bisect(|w| coverage(w) - x3_gap, 0.0, w_max);
    let fastest_excursion_time = 4.0 * w_star;
    // each depth connects its own junction pair (the two return conditions
    // force the symmetric quarter structure); its excess over that pair's
    // shortcut is 4w - coverage(w)/m2 = 2 m0 w^3 / m2
    let mut excursion_family = Vec::new();
    for k in 1..=8 {
        let w = w_star * k as f64 / 4.0;
        let depth = m0 * w * w;
        excursion_family.push((depth, 2.0 * m0 * w.powi(3) / m2));
    }
    Ok(ShortcutReport {
        shortcut_time,
        fastest_excursion_time,
        excursion_family,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fc_closed_form_values() {
        // direct substitution
        assert_eq!(fc(1.0, 1.0, 1.0), 0.0);
        // fc(0; x1, x2) = -x1^3 x2 - 2 x1^2 x2^2 + x2^4 < 0 for 0 < x2 < x1
        for (x1, x2) in [(1.0, 0.5), (2.0, 1.9), (0.7, 0.1)] {
            let v = fc(0.0, x1, x2);
            let expect = -x1_cubed_x2(x1, x2);
            assert!((v - expect).abs() <= 1e-12 * expect.abs().max(1.0));
            assert!(v < 0.0);
        }
        // fc(x1; x1, x2) = (x1 - x2)(2 x1 - x2)(x1 + x2)^2
        for (x1, x2) in [(1.0, 0.5), (2.0, 1.9), (0.7, 0.1)] {
            let v = fc(x1, x1, x2);
            let expect = (x1 - x2) * (2.0 * x1 - x2) * (x1 + x2) * (x1 + x2);
            assert!((v - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
    }

    fn x1_cubed_x2(x1: f64, x2: f64) -> f64 {
        x1.powi(3) * x2 + 2.0 * x1 * x1 * x2 * x2 - x2.powi(4)
    }

    #[test]
    fn next_tau_examples() {
        // (1, 0.9): root of 0.19 xi^2 + 2.071 xi - 1.8639, cross-checked by
        // bisection on fc
        let r = next_tau(1.0, 0.9).unwrap();
        let by_bisect = crate::numeric::bisect(|x| fc(x, 1.0, 0.9), 0.0, 0.9);
        assert!((r - by_bisect).abs() < 1e-12);
        assert!(r < 0.9);
        assert_eq!(next_tau(1.0, 1.1), Err(RecursionError::OrderViolated));
        assert_eq!(next_tau(1.0, 0.0), Err(RecursionError::OrderViolated));
    }

    #[test]
    fn ratio_recursion_first_step() {
        // r1 = 0.5 -> a1 = 7 -> r2 = (7 - sqrt(45))/2
        let r2 = next_ratio(0.5);
        assert!((r2 - 0.145898033750315).abs() < 1e-12);
    }

    #[test]
    fn recursions_agree() {
        // tau-form and r-form agree to 1e-10 relative over the kept prefix
        let st = run_recursion(1.0, 0.9, 1000).unwrap();
        let mut tau = 0.9; // tau_2
        for k in 1..=98 {
            tau *= 1.0 - st.rs[k]; // tau_{k+2} = tau_{k+1} (1 - r_{k+1})
            let direct = st.taus[k + 1];
            assert!(
                (tau - direct).abs() <= 1e-10 * direct,
                "step {k}: {tau} vs {direct}"
            );
        }
    }

    #[test]
    fn tau_and_ratio_forms_agree_for_1000_steps() {
        let mut taus = (1.0f64, 0.9f64);
        let mut r = 1.0 - taus.1 / taus.0;
        let mut tau = taus.1;
        for i in 0..1000 {
            let next = next_tau(taus.0, taus.1).unwrap();
            r = next_ratio(r);
            tau *= 1.0 - r;
            assert!(
                (tau - next).abs() <= 1e-10 * next,
                "step {i}: {tau} vs {next}"
            );
            taus = (taus.1, next);
        }
    }

    #[test]
    fn fc_changes_sign_exactly_once_on_positive_axis() {
        for (a, b) in [(1.0, 0.9), (1.0, 0.5), (2.0, 1.99), (0.3, 0.05)] {
            let hi = 2.0 * a;
            let mut crossings = 0;
            let mut prev = fc(1e-12, a, b);
            for i in 1..=10_000 {
                let x = hi * i as f64 / 10_000.0;
                let v = fc(x, a, b);
                if prev < 0.0 && v >= 0.0 || prev > 0.0 && v <= 0.0 {
                    crossings += 1;
                }
                prev = v;
            }
            assert_eq!(crossings, 1, "({a}, {b})");
        }
    }

    #[test]
    fn monotone_contraction() {
        let st = run_recursion(1.0, 0.9, 2000).unwrap();
        for w in st.rs.windows(2) {
            assert!(w[1] < w[0] && w[1] > 0.0);
        }
        for w in st.taus.windows(2) {
            assert!(w[1] < w[0] && w[1] > 0.0);
        }
    }

    #[test]
    fn raabe_limit_quarter() {
        let st = run_recursion(1.0, 0.9, 100_000).unwrap();
        assert!(
            (st.final_i_r - 0.25).abs() <= 0.02 * 0.25,
            "{}",
            st.final_i_r
        );
        assert!(
            (st.final_raabe - 0.25).abs() <= 0.02 * 0.25,
            "{}",
            st.final_raabe
        );
    }

    #[test]
    fn partial_sums_diverge() {
        let st = run_recursion(1.0, 0.9, 1 << 17).unwrap();
        // S_{2N} - S_N stays bounded below: divergence signature
        for w in st.partial_sums.windows(2) {
            assert!(w[1].1 - w[0].1 > 0.05, "{:?}", st.partial_sums);
        }
    }

    #[test]
    fn jacobian_fact_identity_off_manifold() {
        // det = 6 (b + c) fc(c; a, b) identically
        let quads = [
            [1.0, 0.8, 0.5, 0.3],
            [2.0, 1.5, 1.2, 0.2],
            [0.9, 0.6, 0.55, 0.54],
        ];
        for q in quads {
            let det = junction_jacobian_det(q);
            let fact = 6.0 * (q[1] + q[2]) * fc(q[2], q[0], q[1]);
            assert!((det - fact).abs() <= 1e-10 * fact.abs().max(1.0), "{q:?}");
        }
    }

    #[test]
    fn jacobian_vanishes_on_manifold() {
        let mut a = 1.3;
        let mut b = 1.1;
        for _ in 0..20 {
            let c = next_tau(a, b).unwrap();
            let d = next_tau(b, c).unwrap();
            let det = junction_jacobian_det([a, b, c, d]);
            let scale = 6.0 * (b + c) * fc(b, a, b).abs();
            assert!(det.abs() <= 1e-9 * scale.max(1.0));
            a = b;
            b = c;
        }
    }

    #[test]
    fn shortcut_strictly_faster() {
        let rep = check_n3_shortcut(1.0, 1.0, 1.0).unwrap();
        assert!((rep.shortcut_time - 1.0).abs() < 1e-15);
        assert!(rep.fastest_excursion_time > rep.shortcut_time);
        // excess strictly increasing in dip depth
        for w in rep.excursion_family.windows(2) {
            assert!(w[1].0 > w[0].0);
            assert!(w[1].1 > w[0].1);
        }
    }

    #[test]
    fn zero_length_arc_rejected() {
        assert!(matches!(
            check_n3_shortcut(1.0, 1.0, 0.0),
            Err(RecursionError::InvalidJunctionPair)
        ));
    }
}
