//! Exact arithmetic for joints and multijoints: finite and rational fields,
//! sparse polynomials with Hasse derivatives, affine geometry, incidence
//! counting, vanishing-polynomial construction and zero-set censuses.

pub mod affine;
pub mod field;
pub mod generators;
pub mod incidence;
pub mod limits;
pub mod linalg;
pub mod mpoly;
pub mod vanishing;
pub mod zeroset;

pub use affine::{AffineSubspace, Line, Point, SubspaceRepr};
pub use field::{Field, FieldValue};
pub use generators::{ConfigDescriptor, LineConfig, MultijointConfig};
pub use incidence::{JointRecord, LineFamily, MultijointRecord};
pub use limits::Limits;
pub use linalg::{Matrix, Vector};
pub use mpoly::{Monomial, MultiPoly, Multiplicity};
pub use vanishing::{Constraint, VanishingSpec};
pub use zeroset::{FactoredVariety, Partition};
