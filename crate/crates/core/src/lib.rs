//! Conjugation-invariant norms on finite groups, integer lattices in `ℤ^m`,
//! exact ℓ∞ distances to affine cosets, rotation angles of circle
//! isotopies, and bookkeeping for diameter bounds.

pub mod bounds;
pub mod catalog;
pub mod circle;
pub mod coset;
pub mod group;
pub mod lattice;
pub mod rational;

pub use bounds::{BoundLedger, ManifoldContext, Verdict};
pub use circle::{CircleLift, MultiIsotopy, PLIsotopy, PLPath};
pub use coset::{AffineCoset, ThetaSup};
pub use group::{FiniteGroup, NormTable, NormValue, Permutation};
pub use lattice::{IntLattice, Order, QuotientInfo};
pub use rational::Q;
