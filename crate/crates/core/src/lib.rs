//! Construction and machine verification of generalized Yang-Baxter
//! operators that entangle product states into W-type states.
//!
//! The crate is organized around a case registry: every named operator
//! family is instantiated from its constraint formulas at a parameter
//! point, then pushed through a uniform pipeline that measures the
//! defining operator identity, braid and far-commutativity residuals,
//! the spectrum with multiplicities, unitarity, the entanglement class of
//! the generated state and the local-operator unitarizability obstruction.

pub mod error;
pub mod operators;
pub mod registry;
pub mod report;
pub mod search;
pub mod slocc;
pub mod spectral;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use registry::{all_case_ids, instantiate_case, CaseData, GybeInstance};
pub use tensor::{Matrix, PureState, C64};
pub use verify::{run_case, VerificationReport, VerifyOptions};
