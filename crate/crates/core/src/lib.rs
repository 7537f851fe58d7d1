//! Spectral numerics on the periodic torus 𝕋^{d−k}×𝕋^k.
//!
//! The core is generic over the floating scalar ([`Real`], implemented for
//! `f32` and `f64`); admissibility algebra additionally runs in exact
//! rational arithmetic. The aliases at the bottom fix `f64`, which is what
//! the experiments use.

pub mod admissibility;
pub mod ensemble;
pub mod error;
pub mod estimates;
pub mod field;
pub mod grid;
pub mod hartree;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod littlewood_paley;
pub mod meanfield;
pub mod nls;
pub mod norms;
pub mod sampling;
pub mod scalar;
pub mod thresholds;
pub mod trajectory;

pub use admissibility::{classify_triple, AdmissibleTriple, Region};
pub use ensemble::{make_ons, EnsembleKind, OrthonormalEnsemble};
pub use error::{Error, Result};
pub use field::SpectralField;
pub use grid::TorusGrid;
pub use lattice::{build_lattice, FrequencyLattice};
pub use linalg::{CMatrix, FiniteOperator};
pub use littlewood_paley::CutoffProfile;
pub use scalar::{Exponent, Real, C};
pub use thresholds::Thresholds;
pub use trajectory::{QuadratureRule, TimeGrid, Trajectory};

pub type Complex64 = C<f64>;
pub type Field = SpectralField<f64>;
pub type Grid = TorusGrid<f64>;
pub type Ensemble = OrthonormalEnsemble<f64>;
pub type Triple = AdmissibleTriple<f64>;
pub type RationalTriple = AdmissibleTriple<num_rational::Ratio<i64>>;
pub type Exp = Exponent<f64>;
