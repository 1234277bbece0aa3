//! Galkin quandles, pointed abelian groups, and knot-coloring invariants.
//!
//! A pointed abelian group is a pair `(A, c)` of a finite abelian group and a
//! distinguished element. Every such pair yields a quandle on `Z3 x A` (the
//! Galkin construction), and two finite Galkin quandles are isomorphic exactly
//! when their pointed groups are. This crate classifies finite pointed abelian
//! q-groups by canonical orbit representatives, counts the isomorphism classes
//! two independent ways (orbit enumeration vs. the partition convolution
//! `sum p(m) p(n-m)`, OEIS A000712), realizes the underlying partition
//! bijections, and counts quandle colorings of knot diagrams.
//!
//! Module map:
//! - [`partitions`]: integer partitions, strict sequences, the herringbone
//!   encoding and Frobenius symbols, `p(n)` and the A000712 convolution.
//! - [`abelian`]: group shapes, index sequences, orbit representatives,
//!   canonical forms, a brute-force orbit oracle, and the data bijection.
//! - [`quandle`]: Cayley tables, the Galkin construction, axiom checking,
//!   induced homomorphisms, and isomorphism search.
//! - [`knots`]: diagram parsing and coloring counts.
//! - [`cli`]: the `galkinlab` command-line front end.

pub mod abelian;
pub mod cli;
pub mod knots;
pub mod partitions;
pub mod quandle;

pub use abelian::{GeneralPointedGroup, GroupElement, GroupShape, IndexSequence, PointedGroup};
pub use knots::KnotDiagram;
pub use partitions::{Partition, StrictSequence};
pub use quandle::FiniteQuandle;
