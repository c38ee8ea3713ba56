//! States and box bounds for the integrator chain.
//!
//! A problem of order `n` has state `x = (x_1, ..., x_n)` where `x_1` is the
//! first integral of the control and each `x_{k+1}` integrates `x_k`.  The
//! bound vector `(M_0, M_1, ..., M_n)` caps the control magnitude (`M_0`,
//! always finite) and every state magnitude (`M_k`, possibly unbounded).

use std::fmt;

/// Relative slack used by feasibility checks: state constraints are treated
/// as `|x_k| <= M_k + FEASIBILITY_SLACK * max(1, M_k)`.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

/// One box limit: a finite positive magnitude or unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    /// The finite value, or `None` when unbounded.
    pub fn finite(self) -> Option<f64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Unbounded => None,
        }
    }

    /// True when `|value| <= bound` with the relative feasibility slack.
    pub fn admits(self, value: f64) -> bool {
        match self {
            Bound::Finite(m) => value.abs() <= m + FEASIBILITY_SLACK * m.max(1.0),
            Bound::Unbounded => true,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Unbounded => write!(f, "inf"),
        }
    }
}

/// Validation errors for [`Bounds`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundsError {
    /// Some `M_k` is zero, negative, or NaN.
    NonPositiveBound(usize),
    /// `M_0` must be finite.
    InfiniteControlBound,
    /// Fewer than two entries (need at least `M_0` and `M_1`).
    LengthMismatch,
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::NonPositiveBound(k) => write!(f, "bound M_{k} must be positive"),
            BoundsError::InfiniteControlBound => write!(f, "control bound M_0 must be finite"),
            BoundsError::LengthMismatch => {
                write!(f, "bounds need at least M_0 and M_1 (order >= 1)")
            }
        }
    }
}

impl std::error::Error for BoundsError {}

/// Control and state box limits `(M_0, M_1, ..., M_n)` for a chain of
/// order `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    m: Vec<Bound>,
}

impl Bounds {
    /// Builds bounds from `(M_0, ..., M_n)`, validating positivity and the
    /// finiteness of `M_0`.
    pub fn new(m: Vec<Bound>) -> Result<Self, BoundsError> {
        if m.len() < 2 {
            return Err(BoundsError::LengthMismatch);
        }
        if m[0].finite().is_none() {
            return Err(BoundsError::InfiniteControlBound);
        }
        for (k, b) in m.iter().enumerate() {
            if let Bound::Finite(v) = b {
                if !(*v > 0.0) {
                    return Err(BoundsError::NonPositiveBound(k));
                }
            }
        }
        Ok(Bounds { m })
    }

    /// Convenience constructor from finite values; non-finite entries become
    /// [`Bound::Unbounded`].
    pub fn from_values(values: &[f64]) -> Result<Self, BoundsError> {
        Bounds::new(
            values
                .iter()
                .map(|&v| {
                    if v.is_finite() {
                        Bound::Finite(v)
                    } else {
                        Bound::Unbounded
                    }
                })
                .collect(),
        )
    }

    /// Chain order `n = len(m) - 1`.
    pub fn order(&self) -> usize {
        self.m.len() - 1
    }

    /// Control bound `M_0`.
    pub fn control(&self) -> f64 {
        self.m[0].finite().expect("M_0 is validated finite")
    }

    /// State bound `M_k` for `1 <= k <= n`.
    pub fn state(&self, k: usize) -> Bound {
        self.m[k]
    }

    /// All entries `(M_0, ..., M_n)`.
    pub fn as_slice(&self) -> &[Bound] {
        &self.m
    }

    /// True when every component of `x` respects its bound within the
    /// feasibility slack.
    pub fn admits_state(&self, x: &StateVector) -> bool {
        x.as_slice()
            .iter()
            .enumerate()
            .all(|(i, &v)| self.m[i + 1].admits(v))
    }
}

/// State vector `(x_1, ..., x_n)`; `x_1` is the first integral of the
/// control.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(x: Vec<f64>) -> Self {
        StateVector(x)
    }

    /// Zero state of order `n`.
    pub fn zero(n: usize) -> Self {
        StateVector(vec![0.0; n])
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// Component `x_k`, 1-indexed as in the chain definition.
    pub fn get(&self, k: usize) -> f64 {
        self.0[k - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for StateVector {
    fn from(v: Vec<f64>) -> Self {
        StateVector(v)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_bounds_validate() {
        let b = Bounds::from_values(&[1.0, 1.0, 1.5, 4.0, 15.0]).unwrap();
        assert_eq!(b.order(), 4);
        assert_eq!(b.control(), 1.0);
    }

    #[test]
    fn unbounded_states_allowed() {
        let b = Bounds::new(vec![Bound::Finite(1.0), Bound::Unbounded, Bound::Unbounded]).unwrap();
        assert_eq!(b.order(), 2);
        assert!(b.state(1).admits(1e300));
    }

    #[test]
    fn zero_control_bound_rejected() {
        let err = Bounds::from_values(&[0.0, 1.0]).unwrap_err();
        assert_eq!(err, BoundsError::NonPositiveBound(0));
    }

    #[test]
    fn infinite_control_bound_rejected() {
        let err = Bounds::new(vec![Bound::Unbounded, Bound::Finite(1.0)]).unwrap_err();
        assert_eq!(err, BoundsError::InfiniteControlBound);
    }

    #[test]
    fn too_short_rejected() {
        let err = Bounds::new(vec![Bound::Finite(1.0)]).unwrap_err();
        assert_eq!(err, BoundsError::LengthMismatch);
    }

    #[test]
    fn feasibility_uses_relative_slack() {
        let b = Bounds::from_values(&[1.0, 2.0]).unwrap();
        assert!(b.admits_state(&StateVector::new(vec![2.0 + 1e-10])));
        assert!(!b.admits_state(&StateVector::new(vec![2.0 + 1e-7])));
    }

    #[test]
    fn feasibility_monotone_in_bounds() {
        // shrinking a bound never turns an infeasible state feasible
        let x = StateVector::new(vec![0.7, -1.2]);
        for m1 in [0.5, 0.69, 0.7, 0.8, 2.0] {
            for m2 in [0.5, 1.19, 1.2, 1.3, 3.0] {
                let big = Bounds::from_values(&[1.0, m1 + 0.1, m2 + 0.1]).unwrap();
                let small = Bounds::from_values(&[1.0, m1, m2]).unwrap();
                if !big.admits_state(&x) {
                    assert!(!small.admits_state(&x));
                }
            }
        }
    }
}
