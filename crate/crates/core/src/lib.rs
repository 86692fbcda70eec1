//! Parametric time Petri nets with read and logical inhibitor arcs.
//!
//! The crate covers the net data model ([`net`]), the integer-time semantics
//! ([`semantics`]), explicit reachability graphs ([`statespace`]), timed CTL
//! checking ([`tctl`]), parameter synthesis by enumeration ([`synthesis`]),
//! observer composition and a circadian clock model ([`biomodels`]), and a
//! plain-text net format ([`format`]).

pub mod biomodels;
pub mod domain;
pub mod error;
pub mod format;
pub mod interval;
pub mod net;
pub mod scalar;
pub mod semantics;
pub mod statespace;
pub mod synthesis;
pub mod tctl;
pub mod testgen;

/// Exact coefficient type used for parameter constraints.
pub type Rational = num_rational::Ratio<i64>;
pub type Constraint = domain::LinearConstraint<Rational>;
pub type Domain = domain::ParamDomain<Rational>;

pub use domain::{domain_contains, eval_constraint, Relation, Valuation};
pub use error::{Error, Result};
pub use interval::{Bound, TimeInterval};
pub use net::{
    enabled_set, instantiate, newly_enabled_set, validate_net, ConcreteNet, Diagnostic,
    DiagnosticKind, Marking, Net, ParamExpr, ParamInterval,
};
pub use scalar::Scalar;
pub use semantics::{State, StepLabel};
pub use statespace::{build, ExploreLimits, ReachGraph};
