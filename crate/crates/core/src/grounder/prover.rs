use crate::error::{Error, Result};
use crate::feature::{Feature, FeatureVector};
use crate::grounder::node::ProofNode;
use crate::kb::{KnowledgeBase, PredicateKind};
use crate::logic::{unify, Atom};

/// Everything leaving one proof state except the solution self-loop.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub successors: Vec<(ProofNode, FeatureVector)>,
    pub restart: FeatureVector,
}

/// One SLD step over a knowledge base.
#[derive(Clone, Copy, Debug)]
pub struct Prover<'a> {
    kb: &'a KnowledgeBase,
    alpha: f64,
}

impl<'a> Prover<'a> {
    pub fn new(kb: &'a KnowledgeBase, alpha: f64) -> Self {
        Prover { kb, alpha }
    }

    pub fn kb(&self) -> &'a KnowledgeBase {
        self.kb
    }

    /// Successors of `node` obtained by resolving its leftmost subgoal
    /// against rule clauses (features from the clause annotation) or
    /// database facts (feature `db`). Restart edges are not included.
    pub fn expand(&self, node: &ProofNode) -> Result<Vec<(ProofNode, FeatureVector)>> {
        let Some(first) = node.goals().first() else {
            return Ok(Vec::new());
        };
        let rest = &node.goals()[1..];
        let mut out = Vec::new();
        match self.kb.kind(first.predicate) {
            PredicateKind::Rules => {
                let base = node.var_count();
                for clause in self.kb.program().clauses_for(first.predicate) {
                    let renamed = clause.standardize_apart(base);
                    let Some(theta) = unify(first, &renamed.head) else {
                        continue;
                    };
                    let mut phi = FeatureVector::new();
                    for lit in &renamed.features {
                        let g = theta.apply(lit);
                        if !g.is_ground() {
                            return Err(Error::NonGroundFeature {
                                clause: format!("{} ({})", clause.id, clause),
                                feature: lit.to_string(),
                            });
                        }
                        if phi.get(Feature::from_atom(&g)).is_none() {
                            phi.add(Feature::from_atom(&g), 1.0);
                        }
                    }
                    let goals: Vec<Atom> = renamed
                        .body
                        .iter()
                        .chain(rest)
                        .map(|a| theta.apply(a))
                        .collect();
                    let query = theta.apply_all(node.query());
                    out.push((ProofNode::new(query, goals), phi));
                }
            }
            PredicateKind::Database => {
                let db = Feature::db();
                self.kb.facts().for_each_match(first, |sigma| {
                    let query = sigma.apply_all(node.query());
                    let goals = sigma.apply_all(rest);
                    out.push((ProofNode::new(query, goals), FeatureVector::single(db, 1.0)));
                })?;
            }
            PredicateKind::Undefined => {}
        }
        Ok(out)
    }

    /// Restart-edge features for a state whose leftmost subgoal is `R`:
    /// `defRestart = 1` for rule-defined `R`, `n * alpha / (1 - alpha)` for a
    /// database goal with `n` bindings. A database goal with no bindings
    /// uses `n = 1`; such a node has no other edge, so only positivity matters.
    pub fn restart_features(&self, node: &ProofNode) -> Result<FeatureVector> {
        let Some(first) = node.goals().first() else {
            return Ok(FeatureVector::single(Feature::restart(), 1.0));
        };
        let n = match self.kb.kind(first.predicate) {
            PredicateKind::Database => self.kb.facts().binding_count(first)?,
            _ => return Ok(FeatureVector::single(Feature::restart(), 1.0)),
        };
        Ok(self.db_restart(n))
    }

    fn db_restart(&self, n: usize) -> FeatureVector {
        let n = n.max(1) as f64;
        FeatureVector::single(Feature::restart(), n * self.alpha / (1.0 - self.alpha))
    }

    /// `expand` and `restart_features` in one pass.
    pub fn expansion(&self, node: &ProofNode) -> Result<Expansion> {
        let successors = self.expand(node)?;
        let restart = match node.goals().first() {
            Some(first) if self.kb.kind(first.predicate) == PredicateKind::Database => {
                self.db_restart(successors.len())
            }
            _ => FeatureVector::single(Feature::restart(), 1.0),
        };
        Ok(Expansion {
            successors,
            restart,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_query;
    use crate::testutil::{hyperlink_kb, LABEL_PROPAGATION_RULES};

    fn node(goals: &str) -> ProofNode {
        let g = parse_query(goals).unwrap();
        ProofNode::new(g.clone(), g)
    }

    #[test]
    fn about_expands_via_base_and_prop() {
        let kb = hyperlink_kb("handLabeled\ta\tfashion\n");
        let prover = Prover::new(&kb, 0.2);
        let succ = prover.expand(&node("about(a,Z)")).unwrap();
        assert_eq!(succ.len(), 2);
        assert_eq!(succ[0].1, FeatureVector::single(Feature::named("base"), 1.0));
        assert_eq!(succ[1].1, FeatureVector::single(Feature::named("prop"), 1.0));
        assert_eq!(succ[1].0.to_string(), "about(a,V0) | sim(a,V1),about(V1,V0)");
    }

    #[test]
    fn db_goal_expands_per_binding() {
        let kb = hyperlink_kb("hasWord\ta\tsprinter\nhasWord\ta\tfashion\n");
        let prover = Prover::new(&kb, 0.2);
        let succ = prover.expand(&node("hasWord(a,W)")).unwrap();
        assert_eq!(succ.len(), 2);
        assert!(succ.iter().all(|(_, f)| *f == FeatureVector::single(Feature::db(), 1.0)));
        assert!(succ.iter().all(|(n, _)| n.is_solution()));
    }

    #[test]
    fn unmatched_goal_is_dead_end() {
        let kb = hyperlink_kb("hasWord\ta\tsprinter\n");
        let prover = Prover::new(&kb, 0.2);
        assert!(prover.expand(&node("hasWord(b,W)")).unwrap().is_empty());
        assert!(prover.expand(&node("links(a,W)")).unwrap().is_empty());
    }

    #[test]
    fn restart_feature_values() {
        let facts: String = (0..4).map(|i| format!("hasWord\ta\tw{i}\n")).collect();
        let kb = hyperlink_kb(&facts);
        let prover = Prover::new(&kb, 0.2);
        let rule = prover.restart_features(&node("about(b,Z)")).unwrap();
        assert_eq!(rule.get(Feature::restart()), Some(1.0));
        let db = prover.restart_features(&node("hasWord(a,W)")).unwrap();
        assert!((db.get(Feature::restart()).unwrap() - 1.0).abs() < 1e-12);
        let exp = prover.expansion(&node("hasWord(a,W)")).unwrap();
        assert_eq!(exp.restart, db);
    }

    #[test]
    fn non_ground_feature_is_an_error() {
        let rules = format!("{LABEL_PROPAGATION_RULES}\nbad(X) :- hasWord(X,W) # by(W).\n");
        let kb = KnowledgeBase::from_sources(&rules, "hasWord\ta\tb\n").unwrap();
        let err = Prover::new(&kb, 0.2).expand(&node("bad(a)")).unwrap_err();
        match err {
            Error::NonGroundFeature { clause, feature } => {
                assert!(clause.starts_with("c6"));
                assert!(feature.starts_with("by("));
            }
            e => panic!("unexpected {e}"),
        }
    }
}
