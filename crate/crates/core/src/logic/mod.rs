//! Terms, substitutions, unification, and the rule-file reader.

mod clause;
mod parser;
mod term;

pub use clause::{default_feature, Clause, Program};
pub use parser::{parse_atom, parse_clauses, parse_program, parse_query};
pub use term::{format_atoms, unify, Atom, Substitution, Term};
