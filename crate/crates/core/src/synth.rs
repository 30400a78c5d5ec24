//! Built-in programs and seeded generators for synthetic corpora: a
//! hyperlink database of any size with fixed per-entity degree, a
//! citation-matching corpus for entity resolution, and a two-class
//! bag-of-words corpus.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::learner::TrainingExample;
use crate::logic::{parse_atom, Atom};
use crate::seed::named_rng;

/// Label propagation over hyperlinks and shared words.
pub const LABEL_PROPAGATION_RULES: &str = "\
about(X,Z) :- handLabeled(X,Z) # base.
about(X,Z) :- sim(X,Y),about(Y,Z) # prop.
sim(X,Y) :- links(X,Y) # sim,link.
sim(X,Y) :- hasWord(X,W),hasWord(Y,W),linkedBy(X,Y,W) # sim,word.
linkedBy(X,Y,W) :- true # by(W).
";

/// Entity resolution for bibliography citations: two citations match when
/// their author, title or venue fields share a key word, closed under
/// transitivity.
pub const ENTITY_RESOLUTION_RULES: &str = "\
samebib(BC1,BC2) :- author(BC1,A1),sameauthor(A1,A2),authorinverse(A2,BC2) # author.
samebib(BC1,BC2) :- title(BC1,A1),sametitle(A1,A2),titleinverse(A2,BC2) # title.
samebib(BC1,BC2) :- venue(BC1,A1),samevenue(A1,A2),venueinverse(A2,BC2) # venue.
samebib(BC1,BC2) :- samebib(BC1,BC3),samebib(BC3,BC2) # tcbib.
sameauthor(A1,A2) :- haswordauthor(A1,W),haswordauthorinverse(W,A2),keyauthorword(W) # authorword.
sameauthor(A1,A2) :- sameauthor(A1,A3),sameauthor(A3,A2) # tcauthor.
sametitle(A1,A2) :- haswordtitle(A1,W),haswordtitleinverse(W,A2),keytitleword(W) # titleword.
sametitle(A1,A2) :- sametitle(A1,A3),sametitle(A3,A2) # tctitle.
samevenue(A1,A2) :- haswordvenue(A1,W),haswordvenueinverse(W,A2),keyvenueword(W) # venueword.
samevenue(A1,A2) :- samevenue(A1,A3),samevenue(A3,A2) # tcvenue.
keyauthorword(W) :- true # authorWord(W).
keytitleword(W) :- true # titleWord(W).
keyvenueword(W) :- true # venueWord(W).
";

/// [`ENTITY_RESOLUTION_RULES`] without the transitive-closure clauses. Its
/// proof graphs are finite, so it can be grounded completely.
pub fn entity_resolution_rules_without_closure() -> String {
    ENTITY_RESOLUTION_RULES
        .lines()
        .filter(|l| !l.contains("# tc"))
        .map(|l| format!("{l}\n"))
        .collect()
}

/// Bag-of-words classifier: each word of a document votes for a class with
/// a learned per-(word, class) weight.
pub const BAG_OF_WORDS_RULES: &str = "\
predictedClass(Doc,Y) :- possibleClass(Y),hasWord(Doc,W),related(W,Y) # c1.
related(W,Y) :- true # relatedFeature(W,Y).
";

/// Facts plus labeled queries, as files.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub facts: String,
    pub examples: Vec<TrainingExample>,
}

impl Corpus {
    pub fn examples_text(&self) -> String {
        self.examples.iter().map(|e| e.to_line() + "\n").collect()
    }

    pub fn queries_text(&self) -> String {
        self.examples.iter().map(|e| e.query_text() + "\n").collect()
    }
}

fn atom(text: &str) -> Atom {
    parse_atom(text).expect("generated atoms are well formed")
}

/// Size and shape of a synthetic hyperlink database.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticDbSpec {
    pub entity_count: usize,
    /// Out-links per entity (rounded to the nearest integer).
    pub link_density: f64,
    /// Words per entity. The vocabulary has one word per entity, so each
    /// word also occurs in `vocab_size` documents on average.
    pub vocab_size: usize,
    pub seed: u64,
}

impl Default for SyntheticDbSpec {
    fn default() -> Self {
        SyntheticDbSpec {
            entity_count: 16,
            link_density: 2.0,
            vocab_size: 2,
            seed: 0,
        }
    }
}

/// Number of queries emitted by [`hyperlink_db`].
pub const SYNTH_QUERY_COUNT: usize = 16;
const TOPICS: [&str; 4] = ["fashion", "sport", "finance", "science"];

/// Generated hyperlink database and its `about(e,Z)` queries.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticDb {
    pub facts: String,
    pub queries: Vec<Atom>,
}

impl SyntheticDb {
    pub fn queries_text(&self) -> String {
        self.queries.iter().map(|q| format!("{q}\n")).collect()
    }
}

/// Hyperlink-style facts (`links`, `hasWord`, `handLabeled`) where every
/// entity has the same out-degree and word count whatever the database
/// size, so local neighborhoods look alike at every scale.
pub fn hyperlink_db(spec: &SyntheticDbSpec) -> Result<SyntheticDb> {
    let n = spec.entity_count;
    if n < 2 {
        return Err(Error::InvalidParams(format!(
            "entity_count {n} must be at least 2"
        )));
    }
    if !(spec.link_density >= 0.0 && spec.link_density.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "link_density {} must be >= 0",
            spec.link_density
        )));
    }
    let degree = (spec.link_density.round() as usize).min(n - 1);
    let words = spec.vocab_size.min(n);
    let mut rng = named_rng(spec.seed, "synth");
    let mut facts = String::new();
    let others = |rng: &mut ChaCha8Rng, e: usize, k: usize| -> Vec<usize> {
        let mut picked = BTreeSet::new();
        while picked.len() < k {
            let t = rng.gen_range(0..n);
            if t != e {
                picked.insert(t);
            }
        }
        picked.into_iter().collect()
    };
    for e in 0..n {
        for t in others(&mut rng, e, degree) {
            writeln!(facts, "links\te{e}\te{t}").unwrap();
        }
    }
    for e in 0..n {
        let mut ws = BTreeSet::new();
        while ws.len() < words {
            ws.insert(rng.gen_range(0..n));
        }
        for w in ws {
            writeln!(facts, "hasWord\te{e}\tw{w}").unwrap();
        }
    }
    for e in 0..n {
        if e % 4 == 0 {
            let topic = TOPICS[rng.gen_range(0..TOPICS.len())];
            writeln!(facts, "handLabeled\te{e}\t{topic}").unwrap();
        }
    }
    let mut entities: Vec<usize> = (0..n).collect();
    entities.shuffle(&mut rng);
    let queries = (0..SYNTH_QUERY_COUNT)
        .map(|k| atom(&format!("about(e{},Z)", entities[k % n])))
        .collect();
    Ok(SyntheticDb { facts, queries })
}

/// Shape of a synthetic citation-matching corpus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CitationSpec {
    /// Distinct papers.
    pub papers: usize,
    /// Citations per paper.
    pub citations_per_paper: usize,
    /// Papers fall into this many topics; papers of one topic share title
    /// vocabulary and venues.
    pub topics: usize,
    /// Chance that a field word survives in a citation.
    pub keep: f64,
    /// Chance that a surviving distinctive word is misspelled.
    pub typo: f64,
    /// Consecutive papers written by the same authors for the same venue.
    pub lab_size: usize,
    /// Authors per paper.
    pub authors: usize,
    /// Chance that a citation includes each of its author and venue fields.
    pub field_keep: f64,
    pub seed: u64,
}

impl Default for CitationSpec {
    fn default() -> Self {
        CitationSpec {
            papers: 24,
            citations_per_paper: 4,
            topics: 2,
            keep: 0.7,
            typo: 0.2,
            lab_size: 3,
            authors: 2,
            field_keep: 0.5,
            seed: 0,
        }
    }
}

const TOPIC_WORDS: usize = 10;
const INITIALS: [&str; 6] = ["j", "m", "d", "r", "s", "a"];
const VENUE_WORDS: [&str; 3] = ["proc", "conf", "intl"];

/// A citation-matching corpus for [`ENTITY_RESOLUTION_RULES`].
///
/// Papers come in labs of `lab_size` that share authors (a surname plus a
/// widely shared initial each) and a venue. Each paper has a title of two
/// distinctive words and three words from its topic's vocabulary (earlier
/// words are more frequent). A citation keeps each word with probability
/// `keep`, may misspell distinctive words, may omit its author or venue
/// field entirely, and picks up venue boilerplate. Only the distinctive
/// title words separate a paper from its lab mates; initials, topic words
/// and venues are shared across many papers.
///
/// Each query `samebib(c,X)` labels the other citations of the same paper
/// positive and the citations of other papers that share any word with
/// `c` negative. The query citation itself is left unlabeled.
pub fn citation_corpus(spec: &CitationSpec) -> Corpus {
    let mut rng = named_rng(spec.seed, "synth");
    let topics = spec.topics.max(1);
    let zipf = |rng: &mut ChaCha8Rng| -> usize {
        // P(j) proportional to 1/(j+1).
        let total: f64 = (1..=TOPIC_WORDS).map(|j| 1.0 / j as f64).sum();
        let mut x = rng.gen_range(0.0..total);
        for j in 0..TOPIC_WORDS {
            x -= 1.0 / (j + 1) as f64;
            if x <= 0.0 {
                return j;
            }
        }
        TOPIC_WORDS - 1
    };
    let mut fields: Vec<[BTreeSet<String>; 3]> = Vec::new();
    let mut paper_of = Vec::new();
    for p in 0..spec.papers {
        let t = p % topics;
        let lab = p / spec.lab_size.max(1);
        let surnames: Vec<String> = (0..spec.authors).map(|k| format!("au{lab}x{k}")).collect();
        let initials: Vec<&str> = (0..spec.authors)
            .map(|_| INITIALS[rng.gen_range(0..INITIALS.len())])
            .collect();
        let rare: Vec<String> = (0..2).map(|k| format!("tw{p}x{k}")).collect();
        let mut topical = BTreeSet::new();
        while topical.len() < 3 {
            topical.insert(format!("t{t}w{}", zipf(&mut rng)));
        }
        let venue = format!("v{t}x{}", lab % 2);
        for c in 0..spec.citations_per_paper {
            let distinctive = |rng: &mut ChaCha8Rng, words: &[String]| -> BTreeSet<String> {
                let mut out = BTreeSet::new();
                for w in words {
                    if !rng.gen_bool(spec.keep) {
                        continue;
                    }
                    out.insert(if rng.gen_bool(spec.typo) {
                        format!("{w}y{c}")
                    } else {
                        w.clone()
                    });
                }
                out
            };
            let mut au = BTreeSet::new();
            if rng.gen_bool(spec.field_keep) {
                au = distinctive(&mut rng, &surnames);
                au.extend(initials.iter().map(|s| s.to_string()));
            }
            let mut ti = distinctive(&mut rng, &rare);
            ti.extend(topical.iter().filter(|_| rng.gen_bool(spec.keep)).cloned());
            ti.insert(format!("t{t}w{}", zipf(&mut rng)));
            let mut ve = BTreeSet::new();
            if rng.gen_bool(spec.field_keep) {
                if rng.gen_bool(spec.keep) {
                    ve.insert(venue.clone());
                }
                ve.insert(VENUE_WORDS[rng.gen_range(0..VENUE_WORDS.len())].to_string());
            }
            fields.push([au, ti, ve]);
            paper_of.push(p);
        }
    }
    let mut facts = String::new();
    let names = ["author", "title", "venue"];
    for (c, fs) in fields.iter().enumerate() {
        for (k, words) in fs.iter().enumerate() {
            if words.is_empty() {
                continue;
            }
            let name = names[k];
            writeln!(facts, "{name}\tc{c}\t{name}{c}").unwrap();
            writeln!(facts, "{name}inverse\t{name}{c}\tc{c}").unwrap();
            for w in words {
                writeln!(facts, "hasword{name}\t{name}{c}\t{w}").unwrap();
                writeln!(facts, "hasword{name}inverse\t{w}\t{name}{c}").unwrap();
            }
        }
    }
    let mut by_word: HashMap<&str, Vec<usize>> = HashMap::new();
    for (c, fs) in fields.iter().enumerate() {
        for w in fs.iter().flatten() {
            by_word.entry(w.as_str()).or_default().push(c);
        }
    }
    let examples = (0..fields.len())
        .map(|c| {
            let mut candidates = BTreeSet::new();
            for w in fields[c].iter().flatten() {
                candidates.extend(by_word[w.as_str()].iter().copied());
            }
            let mut positives = Vec::new();
            let mut negatives = Vec::new();
            for (d, &p) in paper_of.iter().enumerate() {
                if d == c {
                    continue;
                }
                if p == paper_of[c] {
                    positives.push(atom(&format!("samebib(c{c},c{d})")));
                } else if candidates.contains(&d) {
                    negatives.push(atom(&format!("samebib(c{c},c{d})")));
                }
            }
            TrainingExample {
                query: vec![atom(&format!("samebib(c{c},X)"))],
                positives,
                negatives,
            }
        })
        .collect();
    Corpus { facts, examples }
}

/// A two-class corpus for [`BAG_OF_WORDS_RULES`]: each document mixes
/// words typical of its class with words drawn from both classes.
pub fn bag_of_words_corpus(docs: usize, seed: u64) -> Corpus {
    const CLASSES: [&str; 2] = ["pos", "neg"];
    let mut rng = named_rng(seed, "synth");
    let mut facts = String::new();
    for y in CLASSES {
        writeln!(facts, "possibleClass\t{y}").unwrap();
    }
    let mut examples = Vec::new();
    for d in 0..docs {
        let class = d % 2;
        let mut words = BTreeSet::new();
        while words.len() < 4 {
            let typical = rng.gen_bool(0.6);
            let owner = if typical { class } else { rng.gen_range(0..2) };
            words.insert(format!("{}{}", CLASSES[owner], rng.gen_range(0..6)));
        }
        for w in words {
            writeln!(facts, "hasWord\td{d}\t{w}").unwrap();
        }
        examples.push(TrainingExample {
            query: vec![atom(&format!("predictedClass(d{d},Y)"))],
            positives: vec![atom(&format!("predictedClass(d{d},{})", CLASSES[class]))],
            negatives: vec![atom(&format!("predictedClass(d{d},{})", CLASSES[1 - class]))],
        });
    }
    Corpus { facts, examples }
}
