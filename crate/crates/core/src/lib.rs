//! Exact computations with partial actions of finite groups on quivers and
//! on their path algebras over the rationals.
//!
//! The crate is organized bottom-up:
//!
//! * [`group`]: finite groups as Cayley tables;
//! * [`setaction`]: partial actions on finite sets and their globalization;
//! * [`quiver`]: quivers, subquivers, morphisms, automorphisms, DOT output;
//! * [`quiver_paction`]: partial and global actions on quivers, restriction
//!   and enveloping actions;
//! * [`pathalg`]: path algebras, subalgebra spans, induced partial actions
//!   by subalgebras and globalization checks.
//!
//! ```
//! use std::sync::Arc;
//! use paction_core::{envelope_quiver_action, FiniteGroup, Quiver, QuiverPartialAction};
//!
//! let g = Arc::new(FiniteGroup::cyclic(3)?);
//! let q = Arc::new(Quiver::from_names(&["v1", "v2"], &[("f", "v1", "v2")])?);
//! let mut a = QuiverPartialAction::new(g, q);
//! a.define("t", &["v1"], &[], &[("v2", "v1")], &[])?;
//! a.define("t2", &["v2"], &[], &[("v1", "v2")], &[])?;
//! assert!(a.check().is_valid());
//!
//! let env = envelope_quiver_action(&a)?;
//! assert_eq!(env.global.quiver().vertex_count(), 3);
//! assert_eq!(env.global.quiver().arrow_count(), 3);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

mod dsu;
pub mod group;
pub mod linalg;
pub mod pathalg;
pub mod quiver;
pub mod quiver_paction;
pub mod report;
pub mod setaction;

pub use group::{Elem, FiniteGroup, GroupError};
pub use pathalg::{AlgebraElement, AlgebraError, AlgebraPartialAction, Path, PathAlgebra, SubalgebraSpan};
pub use quiver::{automorphisms, export_dot, Arrow, Quiver, QuiverError, QuiverMorphism, Subquiver};
pub use quiver_paction::{
    check_enveloping, envelope_quiver_action, enveloping_isomorphism, restrict_global_action, EnvelopeError,
    EnvelopingQuiverAction, GlobalQuiverAction, QuiverPartialAction,
};
pub use report::{Clause, Report};
pub use setaction::{globalize_set_action, restrict_set_action, ActionError, GlobalSetAction, SetPartialAction};
