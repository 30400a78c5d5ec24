use std::collections::HashMap;
use std::fmt;

use crate::symbol::Symbol;

/// A flat datalog term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Symbol),
    Var(u32),
}

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::Const(Symbol::intern(name))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write_constant(f, c.as_str()),
            Term::Var(v) => write!(f, "V{v}"),
        }
    }
}

pub(crate) fn is_plain_constant(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Writes a constant, single-quoting it when it would not re-parse as one.
pub(crate) fn write_constant(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    if is_plain_constant(s) {
        return f.write_str(s);
    }
    f.write_char('\'')?;
    for c in s.chars() {
        match c {
            '\'' => f.write_str("\\'")?,
            '\\' => f.write_str("\\\\")?,
            '\t' => f.write_str("\\t")?,
            '\n' => f.write_str("\\n")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('\'')
}

/// A predicate applied to flat terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Atom {
        Atom {
            predicate: Symbol::intern(predicate),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }

    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(*v),
            Term::Const(_) => None,
        })
    }

    pub fn max_var(&self) -> Option<u32> {
        self.vars().max()
    }

    pub fn rename(&self, mut f: impl FnMut(u32) -> u32) -> Atom {
        Atom {
            predicate: self.predicate,
            args: self
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Term::Var(f(*v)),
                    c => *c,
                })
                .collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.predicate.as_str())?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Writes a comma-separated conjunction.
pub fn format_atoms(atoms: &[Atom]) -> String {
    atoms
        .iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// A variable binding map kept in idempotent (fully resolved) form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: HashMap<u32, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, var: u32) -> Option<Term> {
        self.bindings.get(&var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, Term)> + '_ {
        self.bindings.iter().map(|(v, t)| (*v, *t))
    }

    pub fn resolve(&self, t: Term) -> Term {
        match t {
            Term::Var(v) => self.bindings.get(&v).copied().unwrap_or(t),
            c => c,
        }
    }

    /// Adds `var -> value`, rewriting existing bindings so the map stays
    /// idempotent. `value` must already be resolved and differ from `var`.
    fn bind(&mut self, var: u32, value: Term) {
        debug_assert_ne!(value, Term::Var(var));
        for t in self.bindings.values_mut() {
            if *t == Term::Var(var) {
                *t = value;
            }
        }
        self.bindings.insert(var, value);
    }

    pub fn apply_term(&self, t: Term) -> Term {
        self.resolve(t)
    }

    pub fn apply(&self, atom: &Atom) -> Atom {
        Atom {
            predicate: atom.predicate,
            args: atom.args.iter().map(|t| self.resolve(*t)).collect(),
        }
    }

    pub fn apply_all(&self, atoms: &[Atom]) -> Vec<Atom> {
        atoms.iter().map(|a| self.apply(a)).collect()
    }

    /// Unifies a pair of terms under this substitution, extending it.
    pub fn unify_terms(&mut self, a: Term, b: Term) -> bool {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (a, b) {
            _ if a == b => true,
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                self.bind(x, t);
                true
            }
            (Term::Const(_), Term::Const(_)) => false,
        }
    }

    /// Extends this substitution to unify `a` and `b`; on failure the
    /// substitution is left in an unspecified state.
    pub fn unify_atoms(&mut self, a: &Atom, b: &Atom) -> bool {
        if a.predicate != b.predicate || a.args.len() != b.args.len() {
            return false;
        }
        a.args
            .iter()
            .zip(&b.args)
            .all(|(x, y)| self.unify_terms(*x, *y))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pairs: Vec<_> = self.bindings.iter().collect();
        pairs.sort_by_key(|(v, _)| **v);
        f.write_str("{")?;
        for (i, (v, t)) in pairs.into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "V{v}->{t}")?;
        }
        f.write_str("}")
    }
}

/// Most general unifier of two atoms, or `None` when they do not unify.
pub fn unify(a: &Atom, b: &Atom) -> Option<Substitution> {
    let mut s = Substitution::new();
    s.unify_atoms(a, b).then_some(s)
}
