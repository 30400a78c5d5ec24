use std::collections::HashMap;
use std::fmt;

use crate::logic::{format_atoms, Atom};

/// A proof state: the query under the bindings found so far, and the
/// remaining subgoals. Variables are numbered left to right across the
/// query then the subgoals, so alpha-equivalent states compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProofNode {
    query: Vec<Atom>,
    goals: Vec<Atom>,
}

impl ProofNode {
    pub fn new(query: Vec<Atom>, goals: Vec<Atom>) -> ProofNode {
        let mut map: HashMap<u32, u32> = HashMap::new();
        let mut rename = |v: u32| {
            let next = map.len() as u32;
            *map.entry(v).or_insert(next)
        };
        let query = query.iter().map(|a| a.rename(&mut rename)).collect();
        let goals = goals.iter().map(|a| a.rename(&mut rename)).collect();
        ProofNode { query, goals }
    }

    /// The root state `(Q, Q)`.
    pub fn root(query: &[Atom]) -> ProofNode {
        ProofNode::new(query.to_vec(), query.to_vec())
    }

    pub fn query(&self) -> &[Atom] {
        &self.query
    }

    pub fn goals(&self) -> &[Atom] {
        &self.goals
    }

    pub fn is_solution(&self) -> bool {
        self.goals.is_empty()
    }

    /// Number of distinct variables (ids are `0..var_count`).
    pub fn var_count(&self) -> u32 {
        self.query
            .iter()
            .chain(&self.goals)
            .filter_map(Atom::max_var)
            .max()
            .map_or(0, |m| m + 1)
    }

    /// The transformed query as text, used to name answers.
    pub fn answer_text(&self) -> String {
        format_atoms(&self.query)
    }
}

impl fmt::Display for ProofNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.goals.is_empty() {
            write!(f, "{} | []", format_atoms(&self.query))
        } else {
            write!(f, "{} | {}", format_atoms(&self.query), format_atoms(&self.goals))
        }
    }
}
