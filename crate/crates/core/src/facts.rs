//! Ground database facts loaded from tab-separated files.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::logic::{Atom, Substitution, Term};
use crate::symbol::Symbol;

#[derive(Clone, Debug, Default)]
struct Relation {
    arity: usize,
    tuples: Vec<Box<[Symbol]>>,
    seen: HashSet<Box<[Symbol]>>,
    /// One index per argument position: constant -> tuple ids.
    by_position: Vec<HashMap<Symbol, Vec<u32>>>,
}

impl Relation {
    fn new(arity: usize) -> Self {
        Relation {
            arity,
            by_position: vec![HashMap::new(); arity],
            ..Default::default()
        }
    }

    fn insert(&mut self, tuple: Box<[Symbol]>) -> bool {
        if !self.seen.insert(tuple.clone()) {
            return false;
        }
        let id = self.tuples.len() as u32;
        for (pos, sym) in tuple.iter().enumerate() {
            self.by_position[pos].entry(*sym).or_default().push(id);
        }
        self.tuples.push(tuple);
        true
    }

    /// Tuple ids that can match `query`, narrowed by the most selective bound
    /// argument. Ids are in insertion order.
    fn candidates(&self, query: &Atom) -> Candidates<'_> {
        let mut best: Option<&Vec<u32>> = None;
        for (pos, arg) in query.args.iter().enumerate() {
            if let Term::Const(c) = arg {
                match self.by_position[pos].get(c) {
                    None => return Candidates::Ids(&[]),
                    Some(ids) if best.is_none_or(|b| ids.len() < b.len()) => best = Some(ids),
                    Some(_) => {}
                }
            }
        }
        match best {
            Some(ids) => Candidates::Ids(ids),
            None => Candidates::All(self.tuples.len() as u32),
        }
    }
}

enum Candidates<'a> {
    Ids(&'a [u32]),
    All(u32),
}

impl Candidates<'_> {
    fn iter(&self) -> Box<dyn Iterator<Item = u32> + '_> {
        match self {
            Candidates::Ids(ids) => Box::new(ids.iter().copied()),
            Candidates::All(n) => Box::new(0..*n),
        }
    }
}

/// Read-only store of ground facts, indexed on every argument position.
#[derive(Clone, Debug, Default)]
pub struct FactStore {
    relations: HashMap<Symbol, Relation>,
    duplicates: usize,
}

fn parse_field(raw: &str, line: usize) -> Result<Symbol> {
    let field = raw.trim();
    let nonground = |message: String| Error::Facts { line, message };
    if field.is_empty() {
        return Err(nonground("empty argument".into()));
    }
    if field.len() >= 2 && field.starts_with('\'') && field.ends_with('\'') {
        return Ok(Symbol::intern(&field[1..field.len() - 1]));
    }
    let first = field.chars().next().unwrap();
    if first == '_' || first.is_uppercase() {
        return Err(nonground(format!("non-ground entry '{field}' (variable syntax)")));
    }
    Ok(Symbol::intern(field))
}

impl FactStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `predicate<TAB>arg1<TAB>...` lines. Blank lines and lines
    /// starting with `%` are skipped.
    pub fn load(source: &str) -> Result<FactStore> {
        let mut store = FactStore::new();
        store.extend_from_str(source)?;
        Ok(store)
    }

    pub fn extend_from_str(&mut self, source: &str) -> Result<()> {
        for (i, raw) in source.lines().enumerate() {
            let line = i + 1;
            let text = raw.trim_end_matches('\r');
            if text.trim().is_empty() || text.trim_start().starts_with('%') {
                continue;
            }
            let mut cols = text.split('\t');
            let predicate = cols.next().unwrap().trim();
            if predicate.is_empty() {
                return Err(Error::Facts {
                    line,
                    message: "missing predicate".into(),
                });
            }
            let args = cols
                .map(|c| parse_field(c, line))
                .collect::<Result<Vec<_>>>()?;
            self.insert(Symbol::intern(predicate), args.into_boxed_slice())
                .map_err(|message| Error::Facts { line, message })?;
        }
        Ok(())
    }

    /// Adds one ground fact; returns whether it was new.
    pub fn insert(
        &mut self,
        predicate: Symbol,
        args: Box<[Symbol]>,
    ) -> std::result::Result<bool, String> {
        let rel = self
            .relations
            .entry(predicate)
            .or_insert_with(|| Relation::new(args.len()));
        if rel.arity != args.len() {
            return Err(format!(
                "ragged arity for {predicate}: {} arguments, previously {}",
                args.len(),
                rel.arity
            ));
        }
        let added = rel.insert(args);
        if !added {
            self.duplicates += 1;
        }
        Ok(added)
    }

    pub fn insert_atom(&mut self, atom: &Atom) -> Result<bool> {
        let args = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Ok(*c),
                Term::Var(_) => Err(Error::Facts {
                    line: 0,
                    message: format!("non-ground fact {atom}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        self.insert(atom.predicate, args.into_boxed_slice())
            .map_err(|message| Error::Facts { line: 0, message })
    }

    /// Number of duplicate lines dropped while loading.
    pub fn duplicate_count(&self) -> usize {
        self.duplicates
    }

    pub fn contains_predicate(&self, predicate: Symbol) -> bool {
        self.relations.contains_key(&predicate)
    }

    pub fn arity(&self, predicate: Symbol) -> Option<usize> {
        self.relations.get(&predicate).map(|r| r.arity)
    }

    pub fn predicates(&self) -> impl Iterator<Item = (Symbol, usize)> + '_ {
        self.relations.iter().map(|(p, r)| (*p, r.arity))
    }

    /// Number of stored tuples for `predicate` (0 if unknown).
    pub fn count(&self, predicate: Symbol) -> usize {
        self.relations.get(&predicate).map_or(0, |r| r.tuples.len())
    }

    pub fn total_facts(&self) -> usize {
        self.relations.values().map(|r| r.tuples.len()).sum()
    }

    fn relation(&self, query: &Atom) -> Result<&Relation> {
        let rel = self
            .relations
            .get(&query.predicate)
            .ok_or_else(|| Error::UnknownPredicate(query.predicate.to_string()))?;
        if rel.arity != query.arity() {
            return Err(Error::Arity {
                predicate: query.predicate.to_string(),
                expected: rel.arity,
                found: query.arity(),
            });
        }
        Ok(rel)
    }

    /// Calls `visit` with the unifier of `query` against each matching tuple,
    /// in insertion order.
    pub fn for_each_match(
        &self,
        query: &Atom,
        mut visit: impl FnMut(Substitution),
    ) -> Result<()> {
        let rel = self.relation(query)?;
        let candidates = rel.candidates(query);
        for id in candidates.iter() {
            let tuple = &rel.tuples[id as usize];
            let mut s = Substitution::new();
            let ok = query
                .args
                .iter()
                .zip(tuple.iter())
                .all(|(q, c)| s.unify_terms(*q, Term::Const(*c)));
            if ok {
                visit(s);
            }
        }
        Ok(())
    }

    /// One substitution per matching tuple, in insertion order.
    pub fn matches(&self, query: &Atom) -> Result<Vec<Substitution>> {
        let mut out = Vec::new();
        self.for_each_match(query, |s| out.push(s))?;
        Ok(out)
    }

    /// Number of possible bindings for `query`.
    pub fn binding_count(&self, query: &Atom) -> Result<usize> {
        let mut n = 0;
        self.for_each_match(query, |_| n += 1)?;
        Ok(n)
    }

    /// All stored facts as atoms, grouped by predicate name.
    pub fn facts(&self) -> Vec<Atom> {
        let mut preds: Vec<_> = self.relations.keys().copied().collect();
        preds.sort();
        let mut out = Vec::new();
        for p in preds {
            for t in &self.relations[&p].tuples {
                out.push(Atom {
                    predicate: p,
                    args: t.iter().map(|c| Term::Const(*c)).collect(),
                });
            }
        }
        out
    }
}
