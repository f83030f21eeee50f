//! Exact entanglement analytics for entangled nonorthogonal states.
//!
//! The crate has two independent engines:
//!
//! * [`branch`]: superpositions of products of coherent states handled
//!   symbolically through analytic overlaps, with linear optics acting as maps
//!   on coherent labels;
//! * [`fock`]: dense state vectors over a truncated multimode Fock basis, used
//!   as a brute-force oracle and as the only engine for photon-number states.
//!
//! [`two_branch`] holds closed forms for two-branch and four-term states,
//! [`measures`] the entanglement measures shared by everything else, and
//! [`schemes`] the state-generation circuits checked against their targets.

pub mod branch;
pub mod error;
pub mod fock;
pub mod gates;
pub mod linalg;
pub mod measures;
pub mod schemes;
pub mod two_branch;
pub mod verify;

pub use branch::{coherent_overlap, BranchState};
pub use error::{Error, Result};
pub use fock::FockStateVector;
pub use gates::{Gate, LinearOp};
pub use measures::{DensityMatrix, SchmidtSpectrum};
pub use num_complex::Complex64 as C64;
pub use schemes::SchemeReport;
pub use two_branch::{FourTermDescriptor, TwoBranchDescriptor, TwoQubitAmplitudes};
