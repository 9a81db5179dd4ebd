//! Categorified division: smooth numbers, Burnside spans, the localized
//! category S⁻¹E, the Cantor space Ω_S with its 𝕋_S-action, and equivariant
//! sheaves on it.

pub mod burnside;
pub mod cantor;
pub mod linalg;
pub mod localized;
pub mod sheaf;
pub mod smooth;

pub use burnside::{FinMap, OChain, Simplex, Span};
pub use cantor::{CantorPoint, Clopen, LCFunction, OrbitWitness, TorsionElement};
pub use linalg::{Field, FieldTag, Matrix, PrimeField, Rationals};
pub use localized::{DivPresentation, FormalIndObject, K0Presentation, LocMorphism, LocObject, Localized};
pub use sheaf::{EqSheaf, EqSheafMap, HomSpace, Sheaves};
pub use smooth::{PrimeSet, SRational, SmoothNumber};
