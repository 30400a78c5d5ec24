use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::feature::ParameterVector;
use crate::grounder::{ground_full, pagerank_nibble_prove, GroundedGraph, GroundingParams};
use crate::inference::{extract_answers, power_iterate, AnswerList, DEFAULT_TOL};
use crate::kb::KnowledgeBase;
use crate::learner::{
    ground_examples, parallel_map, train_set, SgdConfig, TrainReport, TrainingExample, TrainingSet,
};
use crate::logic::{format_atoms, parse_query, Atom};
use crate::synth::{
    bag_of_words_corpus, citation_corpus, hyperlink_db, CitationSpec, SyntheticDbSpec,
    BAG_OF_WORDS_RULES, ENTITY_RESOLUTION_RULES, LABEL_PROPAGATION_RULES,
};

/// Everything a command needs: input paths, grounding and learning
/// settings, and the run seed from which all randomness is derived.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub rules: Option<PathBuf>,
    pub facts: Option<PathBuf>,
    pub queries: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub params_in: Option<PathBuf>,
    /// Cached groundings written by `ground`.
    pub groundings: Option<PathBuf>,
    /// Answers written by `answer`, for `eval`.
    pub answers: Option<PathBuf>,
    pub grounding: GroundingParams,
    pub sgd: SgdConfig,
    /// Answer with full grounding and power iteration instead of local
    /// grounding.
    pub exact: bool,
    pub threads: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.grounding.validate()?;
        self.sgd.validate()?;
        if self.threads == 0 {
            return Err(Error::InvalidParams("threads must be >= 1".into()));
        }
        Ok(())
    }

    pub(crate) fn required<'a>(&self, path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
        path.as_deref()
            .ok_or_else(|| Error::InvalidParams(format!("{flag} is required")))
    }

    pub(crate) fn knowledge_base(&self) -> Result<KnowledgeBase> {
        let rules = read(self.required(&self.rules, "--rules")?)?;
        let facts = match &self.facts {
            Some(p) => read(p)?,
            None => String::new(),
        };
        KnowledgeBase::from_sources(&rules, &facts)
    }

    pub(crate) fn weights(&self) -> Result<ParameterVector> {
        match &self.params_in {
            Some(p) => ParameterVector::from_tsv(&read(p)?),
            None => Ok(ParameterVector::new()),
        }
    }

    pub(crate) fn examples(&self, path: &Option<PathBuf>, flag: &str) -> Result<Vec<TrainingExample>> {
        TrainingExample::parse_file(&read(self.required(path, flag)?)?)
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

/// Wall-clock time split between building groundings and running PageRank
/// on them.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timing {
    pub grounding: Duration,
    pub ppr: Duration,
}

impl Timing {
    pub fn line(&self, queries: usize) -> String {
        format!(
            "timing\tqueries\t{queries}\tgrounding_secs\t{:.6}\tppr_secs\t{:.6}",
            self.grounding.as_secs_f64(),
            self.ppr.as_secs_f64()
        )
    }
}

/// Outcome for one query of `answer`.
#[derive(Debug)]
pub struct QueryAnswers {
    /// The query line as parsed (canonical form), or verbatim if it did
    /// not parse.
    pub query: String,
    pub result: Result<AnswerList>,
    pub timing: Timing,
}

/// Queries file: one conjunctive query per line; blank and `%` lines are
/// skipped. Lines that fail to parse are returned as errors in place.
pub fn parse_queries(text: &str) -> Vec<(String, Result<Vec<Atom>>)> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'))
        .map(|l| match parse_query(l) {
            Ok(q) => (format_atoms(&q), Ok(q)),
            Err(e) => (l.to_string(), Err(e)),
        })
        .collect()
}

fn answer_one(
    kb: &KnowledgeBase,
    query: &[Atom],
    w: &ParameterVector,
    cfg: &RunConfig,
) -> (Result<AnswerList>, Timing) {
    let f = cfg.sgd.weight_fn;
    let params = &cfg.grounding;
    let start = Instant::now();
    let mut timing = Timing::default();
    let result = if cfg.exact {
        ground_full(query, kb, params).and_then(|g| {
            timing.grounding = start.elapsed();
            let t = Instant::now();
            let v = power_iterate(&g, w, f, params.alpha_prime, params.max_t, DEFAULT_TOL);
            timing.ppr = t.elapsed();
            v.map(|v| extract_answers(&g, v.as_slice()))
        })
    } else {
        pagerank_nibble_prove(query, kb, params, w, f).map(|o| {
            timing.grounding = start.elapsed();
            extract_answers(&o.graph, &o.estimate)
        })
    };
    if timing.grounding.is_zero() {
        timing.grounding = start.elapsed();
    }
    (result, timing)
}

/// Answers every query of `--queries`, in parallel across queries. A
/// failing query yields an error record and does not stop the run.
pub fn cmd_answer(cfg: &RunConfig) -> Result<Vec<QueryAnswers>> {
    let queries = parse_queries(&read(cfg.required(&cfg.queries, "--queries")?)?);
    answer_queries(cfg, queries)
}

/// Answers already-parsed queries; see [`cmd_answer`].
pub(crate) fn answer_queries(
    cfg: &RunConfig,
    queries: Vec<(String, Result<Vec<Atom>>)>,
) -> Result<Vec<QueryAnswers>> {
    cfg.validate()?;
    let kb = cfg.knowledge_base()?;
    let w = cfg.weights()?;
    let mut texts = Vec::new();
    let mut parsed = Vec::new();
    let mut failures = Vec::new();
    for (text, q) in queries {
        texts.push(text);
        match q {
            Ok(q) => {
                parsed.push(Some(q));
                failures.push(None);
            }
            Err(e) => {
                parsed.push(None);
                failures.push(Some(e));
            }
        }
    }
    let answered = parallel_map(&parsed, cfg.threads, |q| {
        q.as_ref().map(|q| answer_one(&kb, q, &w, cfg))
    });
    Ok(texts
        .into_iter()
        .zip(answered)
        .zip(failures)
        .map(|((query, answered), failure)| {
            let (result, timing) = match (answered, failure) {
                (Some(a), _) => a,
                (None, Some(e)) => (Err(e), Timing::default()),
                (None, None) => unreachable!("every query either parses or fails"),
            };
            QueryAnswers {
                query,
                result,
                timing,
            }
        })
        .collect())
}

/// `query<TAB>rank<TAB>probability<TAB>answer` per answer, and
/// `query<TAB>error<TAB>kind<TAB>message` for failed queries.
pub fn write_answers(results: &[QueryAnswers]) -> String {
    let mut out = String::new();
    for r in results {
        match &r.result {
            Ok(list) => {
                for line in list.to_tsv().lines() {
                    writeln!(out, "{}\t{line}", r.query).unwrap();
                }
            }
            Err(e) => {
                let message = e.to_string().replace(['\n', '\t'], " ");
                writeln!(out, "{}\terror\t{}\t{message}", r.query, e.kind()).unwrap();
            }
        }
    }
    out
}

/// Reads [`write_answers`] output into ranked `(answer, probability)`
/// lists per query. Error records give an empty list.
pub fn read_answers(text: &str) -> Result<HashMap<String, Vec<(String, f64)>>> {
    let mut out: HashMap<String, Vec<(String, f64)>> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: &str| Error::Format {
            what: "answers",
            line: i + 1,
            message: message.into(),
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 4 {
            return Err(bad("expected 4 tab-separated columns"));
        }
        let entry = out.entry(cols[0].to_string()).or_default();
        if cols[1] == "error" {
            continue;
        }
        let p: f64 = cols[2].parse().map_err(|_| bad("bad probability"))?;
        entry.push((cols[3].to_string(), p));
    }
    Ok(out)
}

/// Serialized groundings plus the queries that ended up without any
/// labeled solution.
#[derive(Clone, Debug)]
pub struct GroundOutput {
    pub graphs: Vec<GroundedGraph>,
    pub unlabeled: Vec<String>,
}

impl GroundOutput {
    pub fn records(&self) -> String {
        let mut out = String::new();
        for g in &self.graphs {
            g.write_record(&mut out);
        }
        out
    }
}

/// Locally grounds each query of `--train` and labels its solutions.
pub fn cmd_ground(cfg: &RunConfig) -> Result<GroundOutput> {
    cfg.validate()?;
    let kb = cfg.knowledge_base()?;
    let data = cfg.examples(&cfg.train, "--train")?;
    let graphs = ground_examples(&data, &kb, &cfg.grounding, cfg.sgd.weight_fn, cfg.threads)?;
    let unlabeled = graphs
        .iter()
        .filter(|g| g.solutions.iter().all(|s| s.label.is_none()))
        .map(|g| g.query.clone())
        .collect();
    Ok(GroundOutput { graphs, unlabeled })
}

/// Trains from `--groundings` when given (labels come from the records),
/// otherwise grounds `--train` first.
pub fn cmd_train(cfg: &RunConfig) -> Result<TrainReport> {
    cfg.validate()?;
    let sgd = SgdConfig {
        threads: cfg.threads,
        ..cfg.sgd
    };
    let set = match &cfg.groundings {
        Some(path) => {
            let graphs = GroundedGraph::read_records(&read(path)?)?;
            let expected = match &cfg.train {
                Some(_) => Some(
                    cfg.examples(&cfg.train, "--train")?
                        .iter()
                        .map(|e| (e.positives.len(), e.negatives.len()))
                        .collect::<Vec<_>>(),
                ),
                None => None,
            };
            if let Some(e) = &expected {
                if e.len() != graphs.len() {
                    return Err(Error::InvalidParams(format!(
                        "{} groundings but {} training examples",
                        graphs.len(),
                        e.len()
                    )));
                }
            }
            TrainingSet::from_graphs(&graphs, expected.as_deref())?
        }
        None => {
            let kb = cfg.knowledge_base()?;
            let data = cfg.examples(&cfg.train, "--train")?;
            if data.is_empty() {
                return Err(Error::NoUsableExamples);
            }
            let graphs = ground_examples(&data, &kb, &cfg.grounding, sgd.weight_fn, sgd.threads)?;
            let expected: Vec<(usize, usize)> = data
                .iter()
                .map(|e| (e.positives.len(), e.negatives.len()))
                .collect();
            TrainingSet::from_graphs(&graphs, Some(&expected))?
        }
    };
    train_set(&set, &sgd)
}

/// Which synthetic corpus to generate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum SynthKind {
    /// Hyperlink database for the label-propagation program.
    #[default]
    Hyperlink,
    /// Citation matching for the entity-resolution program.
    Citation,
    /// Two-class documents for the bag-of-words program.
    BagOfWords,
}

/// Generated files, by file name.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthOutput {
    pub files: Vec<(&'static str, String)>,
}

impl SynthOutput {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| s.as_str())
    }
}

/// Generates a corpus with its program. Labeled corpora are split into
/// `train.tsv` and `test.tsv` by alternating examples.
pub fn cmd_synth(kind: SynthKind, spec: &SyntheticDbSpec) -> Result<SynthOutput> {
    let files = match kind {
        SynthKind::Hyperlink => {
            let db = hyperlink_db(spec)?;
            vec![
                ("rules.ppr", LABEL_PROPAGATION_RULES.to_string()),
                ("facts.tsv", db.facts.clone()),
                ("queries.txt", db.queries_text()),
            ]
        }
        SynthKind::Citation | SynthKind::BagOfWords => {
            let (rules, corpus) = if kind == SynthKind::Citation {
                let papers = spec.entity_count.max(2);
                let c = citation_corpus(&CitationSpec {
                    papers,
                    seed: spec.seed,
                    ..Default::default()
                });
                (ENTITY_RESOLUTION_RULES, c)
            } else {
                (BAG_OF_WORDS_RULES, bag_of_words_corpus(spec.entity_count, spec.seed))
            };
            let lines = |odd: bool| -> String {
                corpus
                    .examples
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (i % 2 == 1) == odd)
                    .map(|(_, e)| e.to_line() + "\n")
                    .collect()
            };
            vec![
                ("rules.ppr", rules.to_string()),
                ("facts.tsv", corpus.facts.clone()),
                ("queries.txt", corpus.queries_text()),
                ("train.tsv", lines(false)),
                ("test.tsv", lines(true)),
            ]
        }
    };
    Ok(SynthOutput { files })
}
