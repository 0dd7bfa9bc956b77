//! Bell expressions with sub-correlations, their classical and quantum
//! bounds, and Werner-state detectability analysis.
//!
//! Terms are written as strings with one symbol per party: `_` for an
//! absent party, `0`/`1` for a measurement setting. `"0_1"` is
//! `A_0 ⊗ I ⊗ C_1`.

pub mod classical;
pub mod error;
pub mod expr;
pub mod gamma;
pub mod linalg;
pub mod quantum;
pub mod rng;
pub mod tables;
pub mod werner;

pub use classical::{
    closed_form_classical, lhv_bound, lhv_bound_capped, strategy_value, ClassicalBound, DeterministicStrategy, StrategyMatrix,
};
pub use error::{Error, ErrorKind, Result};
pub use expr::{builtin, mermin, BellExpression, BlockView, ExpressionFile, Symbol, TermPattern};
pub use gamma::{algorithm1, gamma_for, GammaScanConfig, GammaScanResult};
pub use linalg::{max_abs_eigenvalue, ComplexMatrix, C64};
pub use quantum::{
    analytic_quantum_upper, bell_operator, composite_ratio_upper, seesaw_lower, ObservableAssignment, QubitObservable,
    SeesawOptions, SeesawResult,
};
pub use tables::Warning;
pub use werner::{DetectabilityReport, WernerFamily};
