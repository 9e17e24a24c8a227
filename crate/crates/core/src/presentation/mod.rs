//! Polynomial presentation of the twisted tilting ring.
//!
//! [`jpoly`] holds the `P, Q, g, h` calculus over `Z[d_q, d]`,
//! [`relations`] the presentation map and its kernel,
//! [`surjectivity`] the graded reachability probe, and [`reduced`] the
//! squarefreeness and nonzerodivisor evidence built on [`squarefree`].

pub mod jpoly;
pub mod reduced;
pub mod relations;
pub mod squarefree;
pub mod surjectivity;

pub use jpoly::{
    cheb_p, cheb_q, dickson_g, dickson_h, verify_identities, Check, IdentitiesReport, JPoly,
};
pub use reduced::{nonzerodivisor_probe, radical_evidence, NonzerodivisorReport, RadicalReport};
pub use relations::{
    kernel_generators, phi_eval, verify_kernel, KernelReport, PMono, PhiEvaluator,
    PresentationPoly, Relation,
};
pub use squarefree::squarefree_check;
pub use surjectivity::{surjectivity_probe, SurjectivityReport};
