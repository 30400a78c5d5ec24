use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::Result;
use crate::inference::{auc, average_precision};
use crate::learner::TrainingExample;

use super::commands::{answer_queries, read, read_answers, RunConfig};

/// Ranking quality of answers against labeled examples.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    /// `(query, average precision)` for examples with a positive answer.
    pub per_query: Vec<(String, f64)>,
    pub map: f64,
    /// AUC over every labeled answer of every example, pooled.
    pub auc: f64,
    /// Labeled answers that never appeared in an answer list.
    pub missing: usize,
}

impl EvalReport {
    /// `query<TAB>ap` lines, then `MAP<TAB>..` and `AUC<TAB>..`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (q, ap) in &self.per_query {
            writeln!(out, "{q}\t{ap:.6}").unwrap();
        }
        writeln!(out, "MAP\t{:.6}", self.map).unwrap();
        writeln!(out, "AUC\t{:.6}", self.auc).unwrap();
        out
    }
}

/// `(score, is_positive)` for every labeled answer of `ex`. Labeled answers
/// absent from `ranked` score `-inf`, below everything that was retrieved.
pub fn labeled_scores(ex: &TrainingExample, ranked: &[(String, f64)]) -> Vec<(f64, bool)> {
    let score = |a: &str| {
        ranked
            .iter()
            .find(|(x, _)| x == a)
            .map_or(f64::NEG_INFINITY, |(_, s)| *s)
    };
    let pos = ex.positives.iter().map(|a| (score(&a.to_string()), true));
    let neg = ex.negatives.iter().map(|a| (score(&a.to_string()), false));
    pos.chain(neg).collect()
}

/// Scores `answers` (ranked lists keyed by canonical query text) against
/// `examples`. A query without answers counts as an empty list.
pub fn evaluate(
    examples: &[TrainingExample],
    answers: &HashMap<String, Vec<(String, f64)>>,
) -> EvalReport {
    let empty = Vec::new();
    let mut per_query = Vec::new();
    let mut pooled = Vec::new();
    for ex in examples {
        let query = ex.query_text();
        let ranked = answers.get(&query).unwrap_or(&empty);
        let relevant = ex.relevant();
        if !relevant.is_empty() {
            per_query.push((query, average_precision(ranked, &relevant)));
        }
        pooled.extend(labeled_scores(ex, ranked));
    }
    let map = if per_query.is_empty() {
        f64::NAN
    } else {
        per_query.iter().map(|(_, ap)| ap).sum::<f64>() / per_query.len() as f64
    };
    EvalReport {
        per_query,
        map,
        auc: auc(&pooled),
        missing: pooled.iter().filter(|(s, _)| *s == f64::NEG_INFINITY).count(),
    }
}

/// Evaluates `--test` examples, reading ranked answers from `--answers` or
/// computing them with the current parameters.
pub fn cmd_eval(cfg: &RunConfig) -> Result<EvalReport> {
    let examples = cfg.examples(&cfg.test, "--test")?;
    let answers = match &cfg.answers {
        Some(path) => read_answers(&read(path)?)?,
        None => {
            let queries = examples
                .iter()
                .map(|e| (e.query_text(), Ok(e.query.clone())))
                .collect();
            answer_queries(cfg, queries)?
                .into_iter()
                .map(|r| {
                    let scored = r.result.map(|a| a.scored()).unwrap_or_default();
                    (r.query, scored)
                })
                .collect()
        }
    };
    Ok(evaluate(&examples, &answers))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn examples(text: &str) -> Vec<TrainingExample> {
        TrainingExample::parse_file(text).unwrap()
    }

    #[test]
    fn perfect_ranking() {
        let ex = examples("p(a,X)\t+p(a,b)\t-p(a,c)\n");
        let answers = HashMap::from([(
            "p(a,V0)".to_string(),
            vec![("p(a,b)".to_string(), 0.7), ("p(a,c)".to_string(), 0.3)],
        )]);
        let r = evaluate(&ex, &answers);
        assert_eq!((r.map, r.auc, r.missing), (1.0, 1.0, 0));
    }

    #[test]
    fn missing_answers_rank_last() {
        let ex = examples("p(a,X)\t+p(a,b)\t-p(a,c)\t-p(a,d)\n");
        let answers = HashMap::from([(
            "p(a,V0)".to_string(),
            vec![("p(a,c)".to_string(), 1.0)],
        )]);
        let r = evaluate(&ex, &answers);
        assert_eq!(r.map, 0.0);
        // positive (-inf) loses to c, ties with the missing d
        assert_eq!(r.auc, 0.25);
        assert_eq!(r.missing, 2);
    }
}
