//! Witt vectors, lattices over finite chain rings, affine Weyl group
//! combinatorics and point counts of affine Deligne–Lusztig varieties.

pub mod adlv;
pub mod cache;
pub mod counts;
pub mod coweight;
pub mod error;
pub mod field;
pub mod galois;
pub mod gl2;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod ring;
pub mod satake;
pub mod series;
pub mod weyl;
pub mod witt;

pub use coweight::Coweight;
pub use error::{Error, Result};
pub use field::{FiniteField, FqElem};
pub use galois::{GaloisRing, GrElem};
pub use ring::{ChainRing, CoefficientRing, RingKind};
pub use series::{Series, TruncatedSeries};
pub use witt::{PadicWindow, WittVector};
pub use lattice::Lattice;
pub use poly::{Laurent, QPolynomial};
