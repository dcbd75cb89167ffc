//! Exact chain-level cube calculus: homotopy limits of diagrams of chain
//! complexes over finite posets, total fibers and cartesian degrees of
//! cubical diagrams, finite Taylor-stage and layer models, link-map
//! derivative cubes, and the multivariable polynomial analogy.
//!
//! All arithmetic is exact (arbitrary-precision integers or rationals);
//! the core is generic over the coefficient [`ring::Ring`], with the two
//! concrete instantiations aliased below.

pub mod chain;
pub mod error;
pub mod holim;
pub mod json;
pub mod linkmodel;
pub mod matrix;
pub mod polycalc;
pub mod poset;
pub mod random;
pub mod ring;
pub mod suite;
pub mod tower;

pub use chain::{connectivity, hofiber, ChainComplex, ChainMap, Connectivity, HomologySummary};
pub use error::{Error, Result};
pub use holim::{
    cartesian_degree, holim, holim_iterated, juxtapose, tfiber, tfiber_iterated, CubeDiagram,
    Diagram,
};
pub use matrix::Matrix;
pub use poset::{FinitePoset, IdealCover, MultiIndex};
pub use ring::{Int, Rat, Ring};

/// Integer-coefficient complex.
pub type ZComplex = ChainComplex<Int>;
/// Rational-coefficient complex.
pub type QComplex = ChainComplex<Rat>;
/// Integer-coefficient chain map.
pub type ZMap = ChainMap<Int>;
/// Rational-coefficient chain map.
pub type QMap = ChainMap<Rat>;
/// Integer matrix.
pub type ZMatrix = Matrix<Int>;
/// Rational matrix.
pub type QMatrix = Matrix<Rat>;
