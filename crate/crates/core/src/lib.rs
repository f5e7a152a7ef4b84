//! Actual causality and explanation in finite acyclic structural causal
//! models.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: signatures, structural equations, validation, solving and
//!   interventions.
//! * [`logic`]: causal formulas `[Y <- y] phi` and satisfaction.
//! * [`causality`]: the modified actual-cause test (AC1-AC3) and
//!   enumeration of minimal causes.
//! * [`explanation`]: explanations relative to an epistemic state, plus
//!   partial-explanation and prior-probability scores.
//! * [`dsl`]: the text formats for models, states, formulas and queries,
//!   and the report emitter.

pub mod causality;
pub mod dsl;
pub mod error;
pub mod explanation;
pub mod expr;
pub mod logic;
pub mod model;
mod subsets;
mod value;

pub use causality::{CandidateCause, CauseVerdict, Witness};
pub use error::{Error, Result};
pub use explanation::{EpistemicState, ExplanationScore, ExplanationVerdict, Probability};
pub use expr::Expr;
pub use logic::{BoolFormula, CausalFormula, Conjunction, PrimitiveEvent};
pub use model::{CausalModel, Context, Equation, Intervention, Range, Setting, Signature, Value, VarDecl};
