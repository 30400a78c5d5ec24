use crate::error::{Error, Result};
use crate::facts::FactStore;
use crate::logic::{parse_program, Atom, Program};
use crate::symbol::Symbol;

/// How a predicate is resolved during proof search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredicateKind {
    Rules,
    Database,
    Undefined,
}

/// A rule program together with its fact database, checked for consistency.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    program: Program,
    facts: FactStore,
}

impl KnowledgeBase {
    /// Rejects predicates defined both ways and arity disagreements between
    /// rule usage and stored facts.
    pub fn new(program: Program, facts: FactStore) -> Result<KnowledgeBase> {
        let mut preds: Vec<_> = facts.predicates().collect();
        preds.sort();
        for (predicate, arity) in preds {
            if program.defines(predicate) {
                return Err(Error::RuleFactOverlap(predicate.to_string()));
            }
            if let Some(expected) = program.arity(predicate) {
                if expected != arity {
                    return Err(Error::Arity {
                        predicate: predicate.to_string(),
                        expected,
                        found: arity,
                    });
                }
            }
        }
        Ok(KnowledgeBase { program, facts })
    }

    pub fn from_sources(rules: &str, facts: &str) -> Result<KnowledgeBase> {
        KnowledgeBase::new(parse_program(rules)?, FactStore::load(facts)?)
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn facts(&self) -> &FactStore {
        &self.facts
    }

    pub fn kind(&self, predicate: Symbol) -> PredicateKind {
        if self.program.defines(predicate) {
            PredicateKind::Rules
        } else if self.facts.contains_predicate(predicate) {
            PredicateKind::Database
        } else {
            PredicateKind::Undefined
        }
    }

    /// Checks that a query only mentions known predicates with the right arity.
    pub fn check_query(&self, query: &[Atom]) -> Result<()> {
        for atom in query {
            let expected = self
                .program
                .arity(atom.predicate)
                .or_else(|| self.facts.arity(atom.predicate))
                .ok_or_else(|| Error::UnknownPredicate(atom.predicate.to_string()))?;
            if expected != atom.arity() {
                return Err(Error::Arity {
                    predicate: atom.predicate.to_string(),
                    expected,
                    found: atom.arity(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_is_rejected() {
        let err = KnowledgeBase::from_sources("p(X) :- q(X).", "p\ta\n").unwrap_err();
        assert!(matches!(err, Error::RuleFactOverlap(_)));
    }

    #[test]
    fn fact_arity_must_match_rule_usage() {
        let err = KnowledgeBase::from_sources("p(X) :- q(X).", "q\ta\tb\n").unwrap_err();
        assert!(matches!(err, Error::Arity { .. }));
    }

    #[test]
    fn kinds() {
        let kb = KnowledgeBase::from_sources("p(X) :- q(X), r(X).", "q\ta\n").unwrap();
        assert_eq!(kb.kind(Symbol::intern("p")), PredicateKind::Rules);
        assert_eq!(kb.kind(Symbol::intern("q")), PredicateKind::Database);
        assert_eq!(kb.kind(Symbol::intern("r")), PredicateKind::Undefined);
        assert!(kb.check_query(&[Atom::new("zzz", vec![])]).is_err());
    }
}
