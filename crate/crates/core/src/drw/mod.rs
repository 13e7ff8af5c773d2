//! Top-degree de Rham–Witt forms of `k[X_1, ..., X_d]` in normal form, and
//! three constructions of the Cartier operator on them.

pub mod form;
pub mod ops;
pub mod profile;
pub mod theta;
pub mod verify;

pub use form::{Factor, FormJson, FormKind, Placement, TermJson, TopForm};
pub use ops::{cartier, cartier_prime_table, frobenius_form, restriction_form};
pub use profile::WeightProfile;
pub use theta::{cartier_prime, theta, theta_inverse, trace_lift, PolyForm};
pub use verify::{verify_compatibility, verify_relations, CompatReport, RelationsReport};
