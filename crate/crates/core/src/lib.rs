//! Finite-field constructions of mutually unbiased bases, the generalized
//! Pauli group, generalized Bell states, a solver and simulator for the Mean
//! King problem in prime-power and odd dimensions, and the associated
//! discrete Weyl and Wigner representations.
//!
//! ```
//! use meanking_core::{run_protocol, MeanKingBasis, Mode, ProtocolMode, QuditSystem, DEFAULT_TOL};
//!
//! let sys = QuditSystem::new(Mode::Galois, 4)?;
//! let basis = MeanKingBasis::build(&sys.family, &sys.ctx, sys.ext.as_ref(), &sys.phases, DEFAULT_TOL)?;
//! assert!(basis.inference(2, 1, 3) < 4);
//! let report = run_protocol(&basis, &sys.family, ProtocolMode::Exhaustive, 0, 0, DEFAULT_TOL)?;
//! assert!(report.perfect());
//! # Ok::<(), meanking_core::Error>(())
//! ```

pub mod bell;
pub mod error;
pub mod galois;
pub mod linalg;
pub mod meanking;
pub mod mub;
pub mod pauli;
pub mod system;
pub mod verify;
pub mod wigner;

pub use bell::{bell_state, bell_transform, BellImage};
pub use error::{Error, Result};
pub use galois::{build_context, ArithmeticContext, ExtensionContext, Mode};
pub use linalg::{Ket, Operator, C64, DEFAULT_TOL};
pub use meanking::{infer_closed_form, run_protocol, MeanKingBasis, ProtocolMode, ProtocolReport};
pub use mub::MubFamily;
pub use pauli::PhaseSystem;
pub use system::QuditSystem;
pub use verify::{run_suite, Check, Suite, VerifyReport};
pub use wigner::WignerOperatorSet;
