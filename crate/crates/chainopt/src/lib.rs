//! Time-optimal control for chain-of-integrator systems with full state
//! constraints.
//!
//! The library covers the 4th-order / velocity-constraint case where the
//! optimal control chatters: the control switches infinitely many times in a
//! finite period, accumulating at a limit time.  It provides
//!
//! * exact propagation and auditing of piecewise-constant controls
//!   ([`dynamics`]),
//! * the chattering constants (attenuation rate `alpha`, switch fractions
//!   `beta_k`, cycle time `tau_1`) and the one-parameter cost family
//!   ([`chattering`]),
//! * switching surfaces and region classification for arbitrary scaled
//!   initial states ([`surfaces`]),
//! * physical-space planning: the velocity-constrained sub-problem, the
//!   S-curve (MIM) baseline, and a full rest-to-rest composer ([`planner`]),
//! * junction-time recursions showing chattering cannot occur in the
//!   lower-order cases ([`nonexistence`]),
//! * independent brute-force cross-checks used by the test suite
//!   ([`oracle`]).

pub mod asl;
pub mod chattering;
pub mod control;
pub mod dynamics;
pub mod nonexistence;
mod numeric;
pub mod oracle;
pub mod planner;
pub mod state;
pub mod surfaces;

pub use asl::{AslItem, AslParseError, AugmentedSwitchingLaw, Sign};
pub use chattering::{
    family_point, solve_constants, AlphaFamilyPoint, ChatteringConstants, CostateArc, FamilyError,
    SolveError,
};
pub use control::{PiecewiseControl, Segment, Trajectory, TrajectorySample};
pub use dynamics::{
    audit, integral_of_state, propagate, sample, state_range, AuditReport, DynError,
};
pub use planner::{PlanError, Problem7Plan, Problem7Spec, RestToRestPlan, RestToRestSpec};
pub use state::{Bound, Bounds, BoundsError, StateVector};
pub use surfaces::{RegionLabel, SurfaceError, SurfaceKind, SwitchingSurfaces};
