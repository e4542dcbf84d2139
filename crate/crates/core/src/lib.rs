//! Exact combinatorics for inductive limits of homogeneous C*-algebras with
//! generalized diagonal connecting maps.
//!
//! The crate models a unital inductive system by a labeled Bratteli diagram:
//! summands carry a base space (a point or the unit interval) and a matrix
//! size, and every connecting edge carries a piecewise-linear eigenvalue
//! function. On top of that it provides
//!
//! * the path space of the canonical diagonal and its connected components
//!   ([`spectrum`]),
//! * a generator for diagrams with a component that no path of the input
//!   realizes ([`spectrum::witness`]),
//! * exact matrix-unit homomorphisms between finite-dimensional algebras that
//!   preserve the diagonal and its normalizer ([`cartan_hom`]), and
//! * a zigzag engine that turns ordered K0 data of two AF diagrams into a
//!   checkable, finite-depth certificate of an isomorphism of diagonal pairs
//!   ([`elliott`]).
//!
//! All arithmetic is exact. Data-parallel loops go through [`par`], which
//! uses rayon when the `parallel` feature is enabled (the default).

pub mod cartan_hom;
pub mod diagram;
pub mod elliott;
pub mod error;
pub mod fd_algebra;
pub mod int_matrix;
pub mod interval_maps;
pub mod k_theory;
pub mod par;
pub mod rational;
pub mod spectrum;

pub use error::{Error, Result};
pub use int_matrix::IntMatrix;
pub use rational::Q;
