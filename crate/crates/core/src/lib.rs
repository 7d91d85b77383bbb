//! Norms and bounds in free p-convex Banach lattices over finite-dimensional
//! normed spaces.
//!
//! Elements of the free vector lattice are expression trees ([`fvl`]) acting
//! on the dual space. [`fblnorm`] brackets their lattice norms, [`duals`]
//! evaluates norms of atom combinations in the dual lattice, [`pap`] builds
//! positive finite-rank approximations, and [`experiments`] reproduces the
//! finite-dimensional growth estimates.

pub mod duals;
pub mod error;
pub mod estimate;
pub mod experiments;
pub mod exponent;
pub mod fblnorm;
pub mod fvl;
pub mod pap;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
pub use estimate::{EstimateMeta, NormEstimate};
pub use duals::{AtomCombination, PartitionValue};
pub use fvl::{DualFunction, LatticeExpr, Node};
pub use pap::{ControllingFamilySpec, PointedPartition};
pub use spaces::{NormedSpace, SpaceKind, Vector};
