//! Independence-logic formulas: syntax, the DSL and both evaluators.

mod ast;
mod eval;
mod parse;
mod prob_eval;

pub use ast::Formula;
pub use eval::{eval_possibilistic, indep_atom_holds, EvalContext, Verdict};
pub use parse::{parse, parse_lines, parse_with_warnings, ParseError};
pub use prob_eval::{
    eval_probabilistic, eval_probabilistic_with, prob_indep_atom_holds, Witnesses,
};

use crate::team::TeamError;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("free variable `{0}` does not occur in the team")]
    Unbound(String),
    #[error("k_max and the budget must be positive")]
    BadContext,
    #[error("unsupported in probabilistic semantics: {0}")]
    Unsupported(String),
    #[error("no witness kernel supplied for `{0}`")]
    MissingWitness(String),
    #[error("no definite answer ({0})")]
    Inconclusive(Verdict),
    #[error(transparent)]
    Team(#[from] TeamError),
}
