//! Timed CTL over markings: syntax, parsing, model checking and a reference
//! evaluator.

mod ast;
mod checker;
mod oracle;
mod parser;

pub use ast::{eval_gmec, Atom, Formula, Gmec, LeadsToMode};
pub use checker::{check, check_with, CheckOptions, Checker, Trace, TraceKind, Verdict};
pub use oracle::{brute_force_check, brute_force_check_with};
pub use parser::{parse_formula, parse_gmec};
