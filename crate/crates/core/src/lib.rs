//! Randomized reduction from "is the witness set nonempty?" to "is its size
//! odd?" by filtering witnesses through the quadratic character of a prime
//! field, together with the exact character-sum machinery used to check it and
//! the Valiant-Vazirani hashing baseline it replaces.
//!
//! Module map:
//!
//! - [`modarith`]: 127-bit modular arithmetic, primality, Legendre symbol.
//! - [`charsum`]: exhaustive character sums, Weil-bound checks, exact parity.
//! - [`reduction`]: shift-and-filter trials and Monte Carlo estimation.
//! - [`vv_baseline`]: affine GF(2) hashing, isolation and parity amplification.
//! - [`sat_frontend`]: DIMACS parsing, brute-force model enumeration.
//! - [`cli`]: the `legendre-parity` command-line harness.

pub mod charsum;
pub mod cli;
pub mod error;
pub mod modarith;
pub mod reduction;
pub mod sat_frontend;
pub mod stream;
pub mod vv_baseline;

pub use charsum::{CharSumReport, ExactParityReport, ParityCheck, WitnessSet};
pub use error::{Error, Result};
pub use modarith::{FieldElement, FieldPrime, Trit};
pub use reduction::{MonteCarloEstimate, ReductionParams, TrialOutcome};
pub use sat_frontend::CnfFormula;
pub use vv_baseline::{AmplifiedTrial, BitWitnesses, Gf2Hash, IsolationTrial};
