//! Exact spread-relative homological algebra for representations of finite posets.
//!
//! The crate computes, over a prime field GF(p):
//!
//! * spread enumeration and spread combinatorics on finite posets and grid posets
//!   ([`poset`]),
//! * representations, Hom spaces, kernels and (co)limits ([`rep`]),
//! * minimal spread-approximations, spread-radical approximations, spread-resolutions
//!   and the spread-global dimension ([`approx`]), together with the endomorphism
//!   algebra of the sum of all spread representations ([`gamma`]),
//! * restriction, left Kan extension and contraction along aligned grid inclusions
//!   ([`kan`]),
//! * the window subgrids and the `g_m(k)` stabilization experiment for products of a
//!   chain with a fixed grid ([`stab`]).
//!
//! Everything is exact: no floating point anywhere. All values are immutable after
//! construction and all operations are pure, so read-only sharing across threads is
//! safe.
//!
//! ```
//! use std::sync::Arc;
//! use spreadhom::{FieldSpec, poset::build_grid};
//! use spreadhom::approx::{SpreadFamily, spread_gldim};
//!
//! let grid = build_grid(&[2, 2])?;
//! let family = SpreadFamily::all_spreads(Arc::new(grid.poset().clone()), FieldSpec::gf2());
//! assert_eq!(family.len(), 11);                 // spreads of the square
//! assert_eq!(spread_gldim(&family)?, 0);        // every module is spread-decomposable
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

// Index loops over matrix shapes read better than iterator chains here.
#![allow(clippy::needless_range_loop)]

pub mod approx;
pub mod gamma;
pub mod io;
pub mod kan;
pub mod linalg;
pub mod poset;
pub mod rep;
pub mod stab;
pub mod verify;

pub use linalg::{FieldSpec, Matrix};
pub use poset::{GridPoset, Poset, Spread, Subset};
pub use rep::{Rep, RepMorphism, Representation};
