use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::feature::WeightFn;
use crate::grounder::GroundingParams;
use crate::learner::{Loss, SgdConfig};
use crate::synth::SyntheticDbSpec;

use super::commands::{
    cmd_answer, cmd_ground, cmd_synth, cmd_train, write_answers, RunConfig, SynthKind, Timing,
};
use super::eval::cmd_eval;

#[derive(Debug, Parser)]
#[command(name = "proppr", version, about = "Probabilistic logic programs answered by personalized PageRank")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank the answers of each query.
    Answer {
        #[command(flatten)]
        program: ProgramArgs,
        /// One query per line.
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        params_in: Option<PathBuf>,
        /// Write answers here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Ground fully and run power iteration instead of local grounding.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        grounding: GroundingArgs,
        #[arg(long, default_value_t = WeightFn::Linear)]
        weightfn: WeightFn,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Locally ground labeled queries and write the labeled graphs.
    Ground {
        #[command(flatten)]
        program: ProgramArgs,
        /// Labeled examples: `query<TAB>+answer<TAB>-answer...`.
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        grounding: GroundingArgs,
        #[arg(long, default_value_t = WeightFn::Linear)]
        weightfn: WeightFn,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Learn feature weights from labeled examples or cached groundings.
    Train {
        #[command(flatten)]
        program: OptionalProgramArgs,
        /// Labeled examples; with --groundings, only used to count missing pairs.
        #[arg(long, required_unless_present = "groundings")]
        train: Option<PathBuf>,
        /// Groundings written by `ground`.
        #[arg(long)]
        groundings: Option<PathBuf>,
        /// Write learned weights here instead of stdout.
        #[arg(long)]
        params_out: Option<PathBuf>,
        /// Per-epoch objective, `epoch<TAB>loss`.
        #[arg(long)]
        loss_log: Option<PathBuf>,
        #[command(flatten)]
        grounding: GroundingArgs,
        #[command(flatten)]
        learning: LearningArgs,
    },
    /// Report per-query average precision, MAP and AUC on labeled examples.
    Eval {
        #[command(flatten)]
        program: OptionalProgramArgs,
        #[arg(long)]
        test: PathBuf,
        /// Answers written by `answer`; computed from the program otherwise.
        #[arg(long)]
        answers: Option<PathBuf>,
        #[arg(long)]
        params_in: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        grounding: GroundingArgs,
        #[arg(long, default_value_t = WeightFn::Linear)]
        weightfn: WeightFn,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Generate a synthetic program, database and queries.
    Synth {
        #[arg(long, value_enum, default_value_t = SynthKind::Hyperlink)]
        kind: SynthKind,
        /// Entities (hyperlink), papers (citation) or documents (bag-of-words).
        #[arg(long, default_value_t = 16)]
        entities: usize,
        #[arg(long, default_value_t = 2.0)]
        link_density: f64,
        #[arg(long, default_value_t = 2)]
        vocab_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ProgramArgs {
    /// Rule file.
    #[arg(long)]
    pub rules: PathBuf,
    /// Facts, `predicate<TAB>arg...` per line.
    #[arg(long)]
    pub facts: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptionalProgramArgs {
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub facts: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GroundingArgs {
    /// Restart calibration for database goals.
    #[arg(long, default_value_t = GroundingParams::default().alpha)]
    pub alpha: f64,
    /// Minimum restart probability at every node.
    #[arg(long, default_value_t = GroundingParams::default().alpha_prime)]
    pub alpha_prime: f64,
    /// Push threshold per out-edge.
    #[arg(long, default_value_t = GroundingParams::default().epsilon)]
    pub epsilon: f64,
    /// Power-iteration cap and full-grounding depth.
    #[arg(long, default_value_t = GroundingParams::default().max_t)]
    pub max_t: usize,
    /// Proof states allowed per query.
    #[arg(long, default_value_t = GroundingParams::default().max_nodes)]
    pub max_nodes: usize,
}

impl GroundingArgs {
    fn params(&self) -> GroundingParams {
        GroundingParams {
            alpha: self.alpha,
            alpha_prime: self.alpha_prime,
            epsilon: self.epsilon,
            max_t: self.max_t,
            max_nodes: self.max_nodes,
        }
    }
}

#[derive(Debug, Args)]
pub struct LearningArgs {
    #[arg(long, default_value_t = SgdConfig::default().mu)]
    pub mu: f64,
    #[arg(long, default_value_t = SgdConfig::default().eta)]
    pub eta: f64,
    #[arg(long, default_value_t = SgdConfig::default().epochs)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// `squared` (squared hinge) or `log`.
    #[arg(long, default_value_t = Loss::SquaredHinge)]
    pub loss: Loss,
    #[arg(long, default_value_t = WeightFn::Linear)]
    pub weightfn: WeightFn,
    /// Unrolled power-iteration steps per example.
    #[arg(long, default_value_t = SgdConfig::default().steps)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::File {
            path: p.display().to_string(),
            source,
        }),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

/// Runs a parsed command line. Results go to `out` (or the named output
/// files); warnings and timing go to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Answer {
            program,
            queries,
            params_in,
            output,
            exact,
            grounding,
            weightfn,
            threads,
        } => {
            let cfg = RunConfig {
                rules: Some(program.rules),
                facts: program.facts,
                queries: Some(queries),
                params_in,
                grounding: grounding.params(),
                sgd: SgdConfig {
                    weight_fn: weightfn,
                    alpha_prime: grounding.alpha_prime,
                    ..Default::default()
                },
                exact,
                threads,
                ..Default::default()
            };
            let results = cmd_answer(&cfg)?;
            write_output(output.as_deref(), &write_answers(&results), out)?;
            let total = results.iter().fold(Timing::default(), |t, r| Timing {
                grounding: t.grounding + r.timing.grounding,
                ppr: t.ppr + r.timing.ppr,
            });
            writeln!(err, "{}", total.line(results.len()))?;
        }
        Command::Ground {
            program,
            train,
            output,
            grounding,
            weightfn,
            threads,
        } => {
            let cfg = RunConfig {
                rules: Some(program.rules),
                facts: program.facts,
                train: Some(train),
                grounding: grounding.params(),
                sgd: SgdConfig {
                    weight_fn: weightfn,
                    alpha_prime: grounding.alpha_prime,
                    ..Default::default()
                },
                threads,
                ..Default::default()
            };
            let ground = cmd_ground(&cfg)?;
            for q in &ground.unlabeled {
                writeln!(err, "warning\tno_labeled_solutions\t{q}")?;
            }
            write_output(output.as_deref(), &ground.records(), out)?;
        }
        Command::Train {
            program,
            train,
            groundings,
            params_out,
            loss_log,
            grounding,
            learning,
        } => {
            if groundings.is_none() && program.rules.is_none() {
                return Err(Error::InvalidParams(
                    "train needs --rules (with --train) or --groundings".into(),
                ));
            }
            let cfg = RunConfig {
                rules: program.rules,
                facts: program.facts,
                train,
                groundings,
                grounding: grounding.params(),
                sgd: SgdConfig {
                    mu: learning.mu,
                    eta: learning.eta,
                    epochs: learning.epochs,
                    threads: learning.threads,
                    loss: learning.loss,
                    weight_fn: learning.weightfn,
                    alpha_prime: grounding.alpha_prime,
                    steps: learning.steps,
                    seed: learning.seed,
                    ..Default::default()
                },
                threads: learning.threads,
                ..Default::default()
            };
            let report = cmd_train(&cfg)?;
            for q in &report.skipped {
                writeln!(err, "warning\tskipped_example\t{q}")?;
            }
            if report.missing_pairs > 0 {
                writeln!(err, "warning\tmissing_pairs\t{}", report.missing_pairs)?;
            }
            if let Some(path) = &loss_log {
                write_output(Some(path), &report.loss_log(), out)?;
            }
            write_output(params_out.as_deref(), &report.params.to_tsv(), out)?;
        }
        Command::Eval {
            program,
            test,
            answers,
            params_in,
            exact,
            grounding,
            weightfn,
            threads,
        } => {
            if answers.is_none() && program.rules.is_none() {
                return Err(Error::InvalidParams(
                    "eval needs --answers or --rules".into(),
                ));
            }
            let cfg = RunConfig {
                rules: program.rules,
                facts: program.facts,
                test: Some(test),
                answers,
                params_in,
                grounding: grounding.params(),
                sgd: SgdConfig {
                    weight_fn: weightfn,
                    alpha_prime: grounding.alpha_prime,
                    ..Default::default()
                },
                exact,
                threads,
                ..Default::default()
            };
            let report = cmd_eval(&cfg)?;
            if report.missing > 0 {
                writeln!(err, "warning\tmissing_labeled_answers\t{}", report.missing)?;
            }
            out.write_all(report.to_tsv().as_bytes())?;
        }
        Command::Synth {
            kind,
            entities,
            link_density,
            vocab_size,
            seed,
            out_dir,
        } => {
            let spec = SyntheticDbSpec {
                entity_count: entities,
                link_density,
                vocab_size,
                seed,
            };
            let output = cmd_synth(kind, &spec)?;
            std::fs::create_dir_all(&out_dir).map_err(|source| Error::File {
                path: out_dir.display().to_string(),
                source,
            })?;
            for (name, text) in &output.files {
                let path = out_dir.join(name);
                write_output(Some(&path), text, out)?;
                writeln!(out, "{}", path.display())?;
            }
        }
    }
    Ok(())
}
