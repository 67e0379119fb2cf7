//! Divisor class groups, canonical modules and multigraded Hilbert functions
//! of multi-section rings `T(X; D_1, ..., D_s)` and `R(X; D_1, ..., D_s)`.
//!
//! The variety enters only through its class lattice `Cl(X) = Z^r`, the
//! canonical class, the effective and ample cones, and (optionally) an oracle
//! for `dim H^0(X, O_X(F))`.

mod bigint_serde;
pub mod cone;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod lp;

pub use error::{Error, Result};
pub use exec::Exec;
pub mod card;
pub mod geometry;
pub mod hilbert;
pub mod multisection;
pub mod report;
pub mod verify;

pub use card::AnalysisCard;
pub use geometry::{DivisorClass, SectionOracle, VarietyPresentation};
pub use hilbert::{DegreeWindow, HilbertTable, Marker, ShiftVerdict};
pub use multisection::{CanonicalReport, MultiSectionSetup, Ring, USet};
pub use report::{analyze, AnalysisReport};
