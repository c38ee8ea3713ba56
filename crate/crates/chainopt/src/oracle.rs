//! Independent brute-force cross-checks used by the acceptance tests:
//! grid optimization of the cost family, a fixed-step RK4 integrator, and
//! grid-search residual landscapes.
//!
//! Deliberately slow and simple, sharing no numerics with the main
//! solvers, so the two paths cannot inherit the same bug.

use crate::chattering::family_point;
use crate::control::PiecewiseControl;
use crate::state::StateVector;

/// Evaluates the cost family on a grid and golden-refines the minimum.
/// Returns `(argmin alpha, min cost)`.
pub fn alpha_grid_optimum(grid: &[f64], tol: f64) -> (f64, f64) {
    let cost = |a: f64| family_point(a, 1e-10).map(|f| f.j).unwrap_or(f64::INFINITY);
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for (i, &a) in grid.iter().enumerate() {
        let j = cost(a);
        if j < best {
            best = j;
            best_i = i;
        }
    }
    // refine inside the neighboring cells
    let mut lo = if best_i == 0 {
        grid[0]
    } else {
        grid[best_i - 1]
    };
    let mut hi = if best_i + 1 == grid.len() {
        grid[best_i]
    } else {
        grid[best_i + 1]
    };
    // plain golden-section, written out independently of the shared helper
    let phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = cost(x1);
    let mut f2 = cost(x2);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = cost(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = cost(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    (xm, cost(xm))
}

/// Classical fixed-step RK4 on the integrator chain, stepping each segment
/// with stride `dt` (the last step of a segment is clipped to land on the
/// boundary).  Used only in tests.
pub fn rk4_reference(x0: &StateVector, pc: &PiecewiseControl, dt: f64) -> StateVector {
    assert!(dt > 0.0);
    let n = x0.order();
    let deriv = |x: &[f64], u: f64| -> Vec<f64> {
        let mut d = vec![0.0; n];
        d[0] = u;
        d[1..n].copy_from_slice(&x[..n - 1]);
        d
    };
    let mut x = x0.as_slice().to_vec();
    for seg in pc.segments() {
        let mut remaining = seg.duration;
        while remaining > 0.0 {
            let h = dt.min(remaining);
            let k1 = deriv(&x, seg.level);
            let xk: Vec<f64> = x.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
            let k2 = deriv(&xk, seg.level);
            let xk: Vec<f64> = x.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
            let k3 = deriv(&xk, seg.level);
            let xk: Vec<f64> = x.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
            let k4 = deriv(&xk, seg.level);
            for i in 0..n {
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            remaining -= h;
        }
    }
    StateVector::new(x)
}

/// Which residual system a landscape scans.
#[derive(Clone, Copy, Debug)]
pub enum LandscapeSystem {
    /// The chattering-constants system over `(alpha, beta1, beta2)`.
    ChatteringConstants,
    /// One switch from `e1` to the origin, over `(tau1, tau_prime)` per
    /// `v0` branch.
    OneSwitchToOrigin,
    /// One switch from `e1` to `alpha e1`, `alpha` clamped to `[0, 0.99]`.
    OneSwitchToAlpha,
    /// The cycle-endpoint system at a fixed attenuation, over
    /// `(beta1, beta2, tau1)`.
    CycleEndpoint { alpha: f64 },
    /// The switching-surface corner system over `(t1, t2)`; needs the
    /// products `beta_k tau1`.
    SurfaceCorner { bt: [f64; 3] },
}

/// Result of a landscape scan.
#[derive(Clone, Debug)]
pub struct Landscape {
    pub min_residual: f64,
    pub argmin: Vec<f64>,
    /// Refined distinct near-roots (residual below the refinement
    /// threshold); a "single basin" reports exactly one.
    pub roots: Vec<Vec<f64>>,
}

impl Landscape {
    pub fn basin_count(&self) -> usize {
        self.roots.len()
    }
}

fn residual(system: &LandscapeSystem, z: &[f64]) -> f64 {
    match *system {
        LandscapeSystem::ChatteringConstants => {
            let (al, b1, b2) = (z[0], z[1], z[2]);
            // independent re-statement of the defining equations
            let r1 = 4.0 * b1.powi(3) - 6.0 * b1 * b1 - 4.0 * b2.powi(3) + 6.0 * b2 * b2 - 1.0;
            let r2 = (2.0 * b1 * b1 - 2.0 * b2 * b2 + 1.0) * (al - 1.0)
                - (4.0 * b1 - 4.0 * b2 + 2.0) * al;
            // eliminate beta3 between the two recursion equations
            let s = b1 + b2;
            let q = b1 * b2;
            let den = s - s * s + q * (s + 2.0 * al - al * s);
            let num = al * q * (3.0 - 2.0 * s - q * (al * al - 1.0)) + s * (1.0 - s + q);
            if den.abs() < 1e-12 {
                return f64::INFINITY;
            }
            let b3 = num / den;
            let qq = q + s * b3;
            let r3 = 2.0 * (s + b3) + (al * al - 1.0) * qq - 3.0;
            let r4 = (s + b3) - qq - q * b3 * (al.powi(3) - 1.0) - 1.0;
            (r1 * r1 + r2 * r2 + r3 * r3 + r4 * r4).sqrt()
        }
        LandscapeSystem::OneSwitchToOrigin => {
            let (t, tp, v0) = (z[0], z[1], z[2]);
            let w = t - tp;
            let r1 = 1.0 + v0 * (t - 2.0 * w);
            let r2 = t + v0 / 2.0 * (t * t - 2.0 * w * w);
            let r3 = t * t / 2.0 + v0 / 6.0 * (t.powi(3) - 2.0 * w.powi(3));
            let s = t.max(1.0);
            (r1 * r1 + (r2 / s).powi(2) + (r3 / (s * s)).powi(2)).sqrt()
        }
        LandscapeSystem::OneSwitchToAlpha => {
            let (t, tp, v0) = (z[0], z[1], z[2]);
            let a_implied = 1.0 + v0 * (t - 2.0 * tp);
            let a = a_implied.clamp(0.0, 0.99);
            let r1 = a_implied - a;
            let r2 = t + v0 / 2.0 * (t * t - 2.0 * tp * tp);
            let r3 = t * t / 2.0 + v0 / 6.0 * (t.powi(3) - 2.0 * tp.powi(3));
            let s = t.max(1.0);
            (r1 * r1 + (r2 / s).powi(2) + (r3 / (s * s)).powi(2)).sqrt()
        }
        LandscapeSystem::CycleEndpoint { alpha } => {
            let (b1, b2, t1) = (z[0], z[1], z[2]);
            let c1 = 1.0 - 2.0 * (1.0 - b1) + 2.0 * (1.0 - b2);
            let c2 = 1.0 - 2.0 * (1.0 - b1).powi(2) + 2.0 * (1.0 - b2).powi(2);
            let c3 = 1.0 - 2.0 * (1.0 - b1).powi(3) + 2.0 * (1.0 - b2).powi(3);
            let r1 = c1 * t1 - (1.0 - alpha);
            let r2 = c2 * t1 - 2.0;
            let r3 = c3 * t1 - 3.0;
            (r1 * r1 + r2 * r2 + r3 * r3).sqrt()
        }
        LandscapeSystem::SurfaceCorner { bt } => {
            let (t1, t2) = (z[0], z[1]);
            if t1 <= 0.0 || t2 <= 0.0 {
                return f64::INFINITY;
            }
            let f = |r: f64| (r + bt[0]) * (r + bt[1]) * (r + bt[2]) / (r * r);
            let r1 = (f(t1) - f(t2)) / f(t1);
            let r2 = (t1 * t1 * t2 - t1 * t2 * t2 + t1 * t1 / 2.0 - t1.powi(3) / 6.0
                + t2.powi(3) / 3.0)
                / t1.powi(3);
            (r1 * r1 + r2 * r2).sqrt()
        }
    }
}

/// Dense grid scan of a residual system over `box_lo..box_hi` with
/// `resolution` cells per axis.
///
/// Two passes: a streaming scan at the full resolution for the global
/// minimum, and an in-memory pass at a coarsened resolution whose
/// grid-local minima are refined by pattern search; distinct refined
/// near-roots are reported.  For the two one-switch systems the scan runs
/// both `v0` branches and the box covers `(tau1, tau_prime/tau1)`.
pub fn residual_landscape(
    system: LandscapeSystem,
    box_lo: &[f64],
    box_hi: &[f64],
    resolution: usize,
) -> Landscape {
    assert_eq!(box_lo.len(), box_hi.len());
    let dim = box_lo.len();
    let one_switch = matches!(
        system,
        LandscapeSystem::OneSwitchToOrigin | LandscapeSystem::OneSwitchToAlpha
    );
    let v0s: &[f64] = if one_switch { &[1.0, -1.0] } else { &[0.0] };
    let eval = |z: &[f64]| -> f64 {
        if one_switch {
            // z = (tau1, fraction, v0); constrain tau_prime <= tau1
            residual(&system, &[z[0], z[0] * z[1].clamp(0.0, 1.0), z[2]])
        } else if matches!(system, LandscapeSystem::ChatteringConstants) && z[1] >= z[2] {
            // ordered-domain violation of the constants system
            f64::INFINITY
        } else {
            residual(&system, z)
        }
    };
    let coord_at = |res: usize, k: usize, i: usize| {
        box_lo[k] + (box_hi[k] - box_lo[k]) * (i as f64 + 0.5) / res as f64
    };

    // pass 1: streaming scan at full resolution
    let mut min_residual = f64::INFINITY;
    let mut argmin = vec![0.0; dim];
    let mut argmin_v0 = 0.0;
    let mut idx = vec![0usize; dim];
    'outer: loop {
        for &v0 in v0s {
            let mut z: Vec<f64> = (0..dim).map(|k| coord_at(resolution, k, idx[k])).collect();
            if one_switch {
                z.push(v0);
            }
            let r = eval(&z);
            if r < min_residual {
                min_residual = r;
                argmin = z[..dim].to_vec();
                argmin_v0 = v0;
            }
        }
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < resolution {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == dim {
                break 'outer;
            }
        }
    }

    // pass 2: grid-local minima on a coarsened in-memory grid
    let rc = resolution.min(if dim >= 3 { 60 } else { 300 });
    let total = rc.pow(dim as u32);
    let unravel = |mut flat: usize| -> Vec<usize> {
        let mut id = vec![0usize; dim];
        for slot in id.iter_mut() {
            *slot = flat % rc;
            flat /= rc;
        }
        id
    };
    let mut seeds: Vec<(f64, Vec<f64>)> = Vec::new();
    for &v0 in v0s {
        let mut values = vec![0.0f64; total];
        for (flat, v) in values.iter_mut().enumerate() {
            let id = unravel(flat);
            let mut z: Vec<f64> = (0..dim).map(|k| coord_at(rc, k, id[k])).collect();
            if one_switch {
                z.push(v0);
            }
            *v = eval(&z);
        }
        for flat in 0..total {
            if !values[flat].is_finite() || values[flat] >= 1e-1 {
                continue;
            }
            let id = unravel(flat);
            let mut is_min = true;
            'nb: for k in 0..dim {
                for d in [-1isize, 1] {
                    let j = id[k] as isize + d;
                    if j < 0 || j >= rc as isize {
                        continue;
                    }
                    let nflat = (flat as isize + d * rc.pow(k as u32) as isize) as usize;
                    if values[nflat] < values[flat] {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                let mut z: Vec<f64> = (0..dim).map(|k| coord_at(rc, k, id[k])).collect();
                if one_switch {
                    z.push(v0);
                }
                seeds.push((values[flat], z));
            }
        }
    }
    // always refine the full-resolution argmin as well
    {
        let mut z = argmin.clone();
        if one_switch {
            z.push(argmin_v0);
        }
        seeds.push((min_residual, z));
    }
    seeds.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // pattern-search refinement; only near-machine residuals count as roots
    let mut roots: Vec<Vec<f64>> = Vec::new();
    for (r0, z0) in seeds.iter().take(64) {
        let mut z = z0.clone();
        let mut h: Vec<f64> = (0..dim)
            .map(|k| (box_hi[k] - box_lo[k]) / rc as f64)
            .collect();
        let mut r = *r0;
        let mut iters = 0;
        while h.iter().cloned().fold(0.0, f64::max) > 1e-13 && iters < 600 {
            iters += 1;
            let mut improved = false;
            for k in 0..dim {
                for s in [-1.0, -0.5, 0.5, 1.0] {
                    let mut zt = z.clone();
                    zt[k] = (zt[k] + s * h[k]).clamp(box_lo[k], box_hi[k]);
                    let rt = eval(&zt);
                    if rt < r {
                        r = rt;
                        z = zt;
                        improved = true;
                    }
                }
            }
            if !improved {
                for hk in h.iter_mut() {
                    *hk *= 0.35;
                }
            }
        }
        if r < 1e-6 {
            let dup = roots.iter().any(|existing| {
                existing
                    .iter()
                    .zip(&z)
                    .take(dim)
                    .all(|(a, b)| (a - b).abs() < 1e-3 * (1.0 + a.abs()))
            });
            if !dup {
                roots.push(z);
            }
        }
    }
    Landscape {
        min_residual,
        argmin,
        roots,
    }
}
