//! Formulas, guarded commands, substitution, weakest preconditions and the
//! finite-scope semantics everything else is measured against.

mod ast;
mod command;
mod eval;
mod normalize;
mod parse;
mod predicate;
mod print;
mod sort;
mod subst;

pub use ast::{Expr, Field, Formula, Name, FREE_VAR};
pub use command::{wlp, GuardedCommand, Update};
pub use eval::{eval, eval_at, eval_term, ConcreteState, EvalError, Value};
pub use normalize::{alpha_normalize, conjuncts};
pub use parse::{parse, parse_field, ParseError};
pub use predicate::Predicate;
pub use print::{print, print_field};
pub use sort::{Signature, Sort, SortError};
pub use subst::{substitute, Subst};
