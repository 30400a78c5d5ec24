use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::grounder::{GroundedGraph, Label};
use crate::inference::{CompiledGraph, FeatureTable};
use crate::logic::{format_atoms, parse_atom, parse_query, Atom};

/// A query with its correct and incorrect answers.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingExample {
    pub query: Vec<Atom>,
    pub positives: Vec<Atom>,
    pub negatives: Vec<Atom>,
}

impl TrainingExample {
    pub fn query_text(&self) -> String {
        format_atoms(&self.query)
    }

    pub fn relevant(&self) -> HashSet<String> {
        self.positives.iter().map(|a| a.to_string()).collect()
    }

    /// Parses `query<TAB>+pos<TAB>-neg...` lines.
    pub fn parse_file(text: &str) -> Result<Vec<TrainingExample>> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('%') {
                continue;
            }
            let bad = |message: String| Error::Format {
                what: "examples",
                line: i + 1,
                message,
            };
            let mut cols = line.split('\t');
            let query = parse_query(cols.next().unwrap()).map_err(|e| bad(e.to_string()))?;
            let mut ex = TrainingExample {
                query,
                positives: Vec::new(),
                negatives: Vec::new(),
            };
            for col in cols {
                let col = col.trim();
                if col.is_empty() {
                    continue;
                }
                let (sign, atom) = col.split_at(1);
                let atom = parse_atom(atom).map_err(|e| bad(e.to_string()))?;
                if !atom.is_ground() {
                    return Err(bad(format!("non-ground answer {atom}")));
                }
                match sign {
                    "+" => ex.positives.push(atom),
                    "-" => ex.negatives.push(atom),
                    _ => return Err(bad(format!("answer '{col}' lacks a +/- prefix"))),
                }
            }
            let pos: HashSet<&Atom> = ex.positives.iter().collect();
            if ex.negatives.iter().any(|a| pos.contains(a)) {
                return Err(bad("an answer is both positive and negative".into()));
            }
            out.push(ex);
        }
        Ok(out)
    }

    pub fn to_line(&self) -> String {
        let mut s = self.query_text();
        for p in &self.positives {
            s.push_str(&format!("\t+{p}"));
        }
        for n in &self.negatives {
            s.push_str(&format!("\t-{n}"));
        }
        s
    }

    /// Labels the solution nodes of `g` that match this example's answers.
    pub fn label(&self, g: &mut GroundedGraph) {
        for p in &self.positives {
            g.set_label(&p.to_string(), Label::Positive);
        }
        for n in &self.negatives {
            g.set_label(&n.to_string(), Label::Negative);
        }
    }
}

/// A compiled grounding with its labeled solution nodes.
#[derive(Clone, Debug)]
pub struct GroundedExample {
    pub query: String,
    pub graph: CompiledGraph,
    pub positives: Vec<usize>,
    pub negatives: Vec<usize>,
    /// Pairs lost because one side has no node in the grounding.
    pub missing_pairs: usize,
}

impl GroundedExample {
    /// Uses the labels stored on `g`'s solutions. `expected` gives the
    /// number of labeled answers (I, J) so that missing nodes can be
    /// counted; pass `None` to count only what the graph holds.
    pub fn new(
        g: &GroundedGraph,
        table: &mut FeatureTable,
        expected: Option<(usize, usize)>,
    ) -> Result<GroundedExample> {
        let graph = CompiledGraph::compile(g, table)?;
        let mut positives = Vec::new();
        let mut negatives = Vec::new();
        for s in &g.solutions {
            match s.label {
                Some(Label::Positive) => positives.push(s.node),
                Some(Label::Negative) => negatives.push(s.node),
                None => {}
            }
        }
        let (i, j) = expected.unwrap_or((positives.len(), negatives.len()));
        Ok(GroundedExample {
            query: g.query.clone(),
            graph,
            missing_pairs: i * j - positives.len().min(i) * negatives.len().min(j),
            positives,
            negatives,
        })
    }

    pub fn pair_count(&self) -> usize {
        self.positives.len() * self.negatives.len()
    }

    pub fn usable(&self) -> bool {
        self.pair_count() > 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples_file() {
        let text = "samebib(c1,X)\t+samebib(c1,c2)\t-samebib(c1,c9)\t-samebib(c1,c7)\n";
        let ex = TrainingExample::parse_file(text).unwrap();
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].positives.len(), 1);
        assert_eq!(ex[0].negatives.len(), 2);
        // Variables come back in canonical form.
        let line = ex[0].to_line();
        assert!(line.starts_with("samebib(c1,V0)\t+samebib(c1,c2)"));
        assert_eq!(TrainingExample::parse_file(&line).unwrap(), ex);
    }

    #[test]
    fn rejects_overlap_and_unsigned() {
        assert!(TrainingExample::parse_file("p(X)\t+p(a)\t-p(a)\n").is_err());
        assert!(TrainingExample::parse_file("p(X)\tp(a)\n").is_err());
        assert!(TrainingExample::parse_file("p(X)\t+p(Y)\n").is_err());
    }
}
