//! State-vector simulation of Grover search used directly as a database
//! lookup.
//!
//! A control register holds the argument `I`, a target register holds the
//! value `f(I)`, and the reversible operator `U_f` maps `|I>|K>` to
//! `|I>|K xor f(I)>`. The search step
//! `U_f H_c S_c(0) H_c U_f S_t(f0)` amplifies the pairs `|I0>|f0>` with
//! `f(I0) = f0`, so measuring the control register returns a preimage of
//! `f0`.
//!
//! ```
//! use grover_db::{search, FunctionTable, SearchOptions};
//!
//! let table = FunctionTable::paper_example(); // f(I) = 3 - I
//! let outcome = search(&table, 2, 0, &SearchOptions::default()).unwrap();
//! assert_eq!(outcome.measured_i, 1);
//! assert!(outcome.verified);
//! ```

pub mod analytic;
pub mod database;
pub mod engine;
pub mod error;
pub mod kernels;
pub mod nmr;
pub mod state;
pub mod trace;

pub use analytic::{
    beta_of, dense_operator_oracle, predicted_success, rotation_step, DenseMatrix, DenseOperators,
    RotationModel,
};
pub use database::{FunctionTable, MultiplicityInfo};
pub use engine::{
    grover_operator, iteration_count, prepare_initial, project_subspace, search,
    search_with_state, success_weight, SearchOptions, SearchOutcome, SubspaceCoords,
};
pub use error::{Error, Result};
pub use nmr::NmrParams;
pub use state::TwoRegisterState;
