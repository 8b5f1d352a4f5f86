// SPDX-License-Identifier: MIT
//! Teams, independence logic over teams, and the hidden-variable machinery
//! built on top of it.

pub mod constructions;
pub mod derivation;
pub mod formula;
pub mod io;
pub mod nogo;
pub mod prob;
pub mod properties;
pub mod random;
pub mod rational;
pub mod team;
pub mod value;

pub use formula::{
    eval_possibilistic, eval_probabilistic, parse, EvalContext, EvalError, Formula, Verdict,
};
pub use prob::{prob_realizes, prob_realizes_uniformly, ProbKernel, ProbTeam};
pub use properties::{build, check, check_prob, Property, PropertyError, RoleSplit};
pub use rational::Q;
pub use team::{realizes, Row, SetKernel, Team, TeamError};
pub use value::{Role, Value, Variable};
