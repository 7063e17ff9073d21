//! Numerical core for studying the rise between potentials.
//!
//! The crate is `no_std` and only needs an allocator. It is split into:
//!
//! * [`rearrange`]: finite measure spaces, decreasing rearrangements and the
//!   Hardy–Littlewood–Pólya order on step functions.
//! * [`hull`]: lower convex envelopes of grid data in one and two dimensions.
//! * [`toric`]: convex potentials on a box, Legendre duality, Monge–Ampère
//!   pushforwards, envelopes and geodesics.
//! * [`rise`]: the rise between two potentials and the checks of its algebra.
//! * [`lagrangian`]: rearrangement invariant Lagrangians, actions and distances.
#![no_std]
// `!(x < y)` is how NaN gets rejected; index loops mirror the formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod check;
pub mod error;
pub mod hull;
pub mod lagrangian;
pub mod rearrange;
pub mod rise;
pub mod toric;

pub use check::Check;
pub use error::{Error, Result};
pub use lagrangian::{
    ActionValue, ConcaveWeight, FenchelFamily, FenchelMember, LagrangianSpec, Pairing, RadialWeight,
    SampledPath, Young,
};
pub use rearrange::{rearrange, StepFunction, WeightedSample};
pub use rise::Rise;
pub use toric::{ConvexPotential, GeodesicPath, Polytope, SpaceFunction, XGrid};
