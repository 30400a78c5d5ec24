use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::term::{format_atoms, Atom, Term};
use crate::symbol::Symbol;

/// A definite clause annotated with feature literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub id: Symbol,
    pub head: Atom,
    pub body: Vec<Atom>,
    pub features: Vec<Atom>,
}

impl Clause {
    /// One past the largest variable id used anywhere in the clause.
    pub fn var_span(&self) -> u32 {
        std::iter::once(&self.head)
            .chain(&self.body)
            .chain(&self.features)
            .filter_map(Atom::max_var)
            .max()
            .map_or(0, |m| m + 1)
    }

    /// Renames variables to fresh ids `>= fresh_base`, numbered in order of
    /// first occurrence (head, body, features).
    pub fn standardize_apart(&self, fresh_base: u32) -> Clause {
        let mut map: HashMap<u32, u32> = HashMap::new();
        let mut next = fresh_base;
        let mut rename = |v: u32| {
            *map.entry(v).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            })
        };
        let head = self.head.rename(&mut rename);
        let body = self.body.iter().map(|a| a.rename(&mut rename)).collect();
        let features = self.features.iter().map(|a| a.rename(&mut rename)).collect();
        Clause {
            id: self.id,
            head,
            body,
            features,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if self.body.is_empty() {
            f.write_str(" :- true")?;
        } else {
            write!(f, " :- {}", format_atoms(&self.body))?;
        }
        if !self.features.is_empty() {
            write!(f, " # {}", format_atoms(&self.features))?;
        }
        f.write_str(".")
    }
}

/// The default feature `id(cK)` for an unannotated clause.
pub fn default_feature(id: Symbol) -> Atom {
    Atom::new("id", vec![Term::Const(id)])
}

/// An immutable rule program indexed by head predicate.
#[derive(Clone, Debug, Default)]
pub struct Program {
    clauses: Vec<Clause>,
    by_head: HashMap<Symbol, Vec<usize>>,
    arities: HashMap<Symbol, usize>,
}

impl Program {
    pub fn from_clauses(clauses: Vec<Clause>) -> Result<Program> {
        let mut program = Program::default();
        for (i, clause) in clauses.iter().enumerate() {
            for atom in std::iter::once(&clause.head).chain(&clause.body) {
                program.note_arity(atom)?;
            }
            program
                .by_head
                .entry(clause.head.predicate)
                .or_default()
                .push(i);
        }
        program.clauses = clauses;
        Ok(program)
    }

    fn note_arity(&mut self, atom: &Atom) -> Result<()> {
        let expected = *self.arities.entry(atom.predicate).or_insert(atom.arity());
        if expected != atom.arity() {
            return Err(Error::Arity {
                predicate: atom.predicate.to_string(),
                expected,
                found: atom.arity(),
            });
        }
        Ok(())
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Clauses whose head predicate is `predicate`, in source order.
    pub fn clauses_for(&self, predicate: Symbol) -> impl Iterator<Item = &Clause> {
        self.by_head
            .get(&predicate)
            .into_iter()
            .flatten()
            .map(|&i| &self.clauses[i])
    }

    pub fn defines(&self, predicate: Symbol) -> bool {
        self.by_head.contains_key(&predicate)
    }

    /// Arity of every predicate mentioned in a head or body.
    pub fn arity(&self, predicate: Symbol) -> Option<usize> {
        self.arities.get(&predicate).copied()
    }

    pub fn predicates(&self) -> impl Iterator<Item = (Symbol, usize)> + '_ {
        self.arities.iter().map(|(p, a)| (*p, *a))
    }

    /// Pretty-prints the program; the output parses back to the same clauses.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for c in &self.clauses {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause() -> Clause {
        Clause {
            id: Symbol::intern("c1"),
            head: Atom::new("p", vec![Term::Var(0)]),
            body: vec![Atom::new("q", vec![Term::Var(0)])],
            features: vec![Atom::new("f", vec![])],
        }
    }

    #[test]
    fn standardize_apart_renames_from_base() {
        let c = clause().standardize_apart(100);
        assert_eq!(c.head.args, vec![Term::Var(100)]);
        assert_eq!(c.body[0].args, vec![Term::Var(100)]);
    }

    #[test]
    fn successive_renamings_are_disjoint() {
        let c = clause();
        let a = c.standardize_apart(10);
        let b = c.standardize_apart(10 + a.var_span());
        let va: Vec<u32> = a.head.vars().collect();
        let vb: Vec<u32> = b.head.vars().collect();
        assert!(va.iter().all(|v| !vb.contains(v)));
    }

    #[test]
    fn ground_clause_unchanged() {
        let c = Clause {
            id: Symbol::intern("c9"),
            head: Atom::new("p", vec![Term::constant("a")]),
            body: vec![],
            features: vec![],
        };
        assert_eq!(c.standardize_apart(7), c);
    }

    #[test]
    fn arity_conflict_rejected() {
        let mut other = clause();
        other.body = vec![Atom::new("q", vec![Term::Var(0), Term::Var(1)])];
        let err = Program::from_clauses(vec![clause(), other]).unwrap_err();
        assert!(matches!(err, Error::Arity { .. }));
    }
}
