//! The `qcsp` command line: argument parsing and subcommand dispatch.
//!
//! Exit codes: 0 when the computed truth is true or the run is informational
//! (`witness`, `classify`, `transform`, agreeing `verify`), 1 when the truth is
//! false or `verify` finds a disagreement, 2 on any error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::{switchability_witness_with, Execution, SwitchabilityWitness, WitnessConfig, WitnessVerdict};
use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::format::{
    read_instance, read_language, read_sentence, sentence_to_json, serialize_instance, serialize_language,
    serialize_sentence, Format, SentenceOptions,
};
use crate::model::{ConstraintLanguage, CspInstance, QuantifiedSentence};
use crate::report::{emit_report, MethodOutcome, OutputFormat, Report, SolveReport, TraceStep, VerifyReport};
use crate::solvers::{
    classify, oracle_qcsp, reduce_pgp_to_csp, reduce_to_pi2, solve_csp, solve_pi2, solve_power_csp, ClassifyOptions,
    ReductionBundle, ReductionOptions, SolveVerdict,
};
use crate::transforms::{
    eliminate_universals, move_universals_left, normalize_alternating, omega, power_csp_to_qcsp, power_language,
    qcsp_to_power_csp, reduce_universal_count, zeta_with, AlternatingSentence, DecodedSentence,
};

#[derive(Parser, Debug, Clone)]
#[command(name = "qcsp", version, about = "Quantified constraint satisfaction over finite domains")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Language file (`.json` for the JSON format).
    #[arg(long, global = true)]
    pub language: Option<PathBuf>,
    /// Sentence file.
    #[arg(long, global = true)]
    pub sentence: Option<PathBuf>,
    /// CSP instance file: a sentence whose variables are all existential.
    #[arg(long, global = true)]
    pub instance: Option<PathBuf>,
    /// Switch bound.
    #[arg(long, global = true, default_value_t = 2)]
    pub r: usize,
    /// Largest polymorphism arity used by switchability witnesses.
    #[arg(long, global = true, default_value_t = 3)]
    pub max_arity: usize,
    /// Largest power checked by switchability witnesses.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_power: usize,
    /// Largest A^n a closure may index.
    #[arg(long, global = true)]
    pub budget_closure: Option<u128>,
    /// Largest number of matrix copies an expansion may produce.
    #[arg(long, global = true)]
    pub budget_copies: Option<u128>,
    /// Largest number of search nodes.
    #[arg(long, global = true)]
    pub budget_nodes: Option<u128>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Write a JSON list of transformation steps to stderr.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Run reductions without a switchability witness; results are conditional.
    #[arg(long, global = true)]
    pub override_witness: bool,
    /// Do all work on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Decide the truth of a sentence (or satisfiability of an instance).
    Solve {
        #[arg(long, value_enum, default_value_t = SolveMethod::Oracle)]
        method: SolveMethod,
    },
    /// Apply one transformation and print the result.
    Transform {
        #[arg(value_enum)]
        name: TransformName,
        /// 1-based ω indices, comma separated.
        #[arg(long, value_delimiter = ',')]
        indices: Vec<usize>,
        /// Also write the language of the result here.
        #[arg(long)]
        output_language: Option<PathBuf>,
    },
    /// Check switchability of the language's polymorphisms at bounded powers.
    Witness,
    /// Classify QCSP of the language via WNU polymorphisms of its power language.
    Classify {
        #[arg(long, default_value_t = 3)]
        wnu_arity: usize,
    },
    /// Run several methods on one input and compare their answers.
    Verify {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "oracle,pgp-csp")]
        methods: Vec<SolveMethod>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    Oracle,
    Csp,
    PgpCsp,
    Pi2,
    PowerCsp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransformName {
    Normalize,
    Omega,
    Eliminate,
    MoveLeft,
    ReduceCount,
    Zeta,
    ToPi2,
    PowerCsp,
    PowerBack,
}

/// Runs the command, writing the report to `out` and diagnostics to `err`; returns the exit code.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(config, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

struct Context<'a> {
    config: &'a RunConfig,
    budgets: Budgets,
    exec: Execution,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn required<'p>(path: &'p Option<PathBuf>, flag: &str) -> Result<&'p Path> {
    path.as_deref()
        .ok_or_else(|| Error::InvalidArgument(format!("`--{flag}` is required")))
}

impl Context<'_> {
    fn language(&self) -> Result<Arc<ConstraintLanguage>> {
        let path = required(&self.config.language, "language")?;
        Ok(Arc::new(read_language(&read(path)?, Format::from_path(path))?))
    }

    /// Reads `--sentence`; `$`-names are accepted so transform outputs can be fed back in.
    fn sentence(&self, lang: &Arc<ConstraintLanguage>) -> Result<QuantifiedSentence> {
        let path = required(&self.config.sentence, "sentence")?;
        Ok(read_sentence(
            &read(path)?,
            lang.clone(),
            Format::from_path(path),
            SentenceOptions { allow_reserved: true },
        )?)
    }

    /// Reads `--instance` against `lang` extended with the constant relations.
    fn instance(&self, lang: &ConstraintLanguage) -> Result<CspInstance> {
        let path = required(&self.config.instance, "instance")?;
        let language = Arc::new(lang.with_constants()?);
        read_instance(&read(path)?, language, Format::from_path(path))
    }

    fn witness(&self, lang: &ConstraintLanguage) -> Result<SwitchabilityWitness> {
        let config = WitnessConfig {
            r: self.config.r,
            max_arity: self.config.max_arity,
            max_power: self.config.max_power,
        };
        switchability_witness_with(lang, config, &self.budgets, self.exec)
    }

    /// The witness the reductions need, or none when overridden; fails without one.
    fn gate_witness(&self, lang: &ConstraintLanguage) -> Result<Option<SwitchabilityWitness>> {
        if self.config.override_witness {
            return Ok(None);
        }
        let w = self.witness(lang)?;
        if w.verdict != WitnessVerdict::Witnessed {
            return Err(Error::InvalidArgument(format!(
                "switchability for r = {} is {} (powers up to {}, arities up to {}); pass --override-witness to run a conditional reduction",
                self.config.r,
                w.verdict.label(),
                self.config.max_power,
                self.config.max_arity
            )));
        }
        Ok(Some(w))
    }

    fn print<R: Report>(&self, out: &mut dyn Write, value: &R) -> Result<()> {
        out.write_all(emit_report(value, self.config.format).as_bytes())?;
        Ok(())
    }
}

fn exit_for(truth: bool) -> i32 {
    if truth {
        0
    } else {
        1
    }
}

fn execute(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut budgets = Budgets::from_env().map_err(Error::InvalidArgument)?;
    if let Some(v) = config.budget_closure {
        budgets.max_closure = v;
    }
    if let Some(v) = config.budget_copies {
        budgets.max_copies = v;
    }
    if let Some(v) = config.budget_nodes {
        budgets.max_oracle_nodes = v;
    }
    let ctx = Context {
        config,
        budgets,
        exec: if config.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    match &config.command {
        Command::Solve { method } => {
            let lang = ctx.language()?;
            let (report, bundle) = solve(&ctx, &lang, *method)?;
            ctx.print(out, &report)?;
            if let Some(b) = bundle {
                if config.format == OutputFormat::Text {
                    ctx.print(out, &b)?;
                }
            }
            Ok(exit_for(report.verdict.truth))
        }
        Command::Transform {
            name,
            indices,
            output_language,
        } => transform(&ctx, *name, indices, output_language.as_deref(), out, err),
        Command::Witness => {
            let lang = ctx.language()?;
            let w = ctx.witness(&lang)?;
            ctx.print(out, &w)?;
            Ok(0)
        }
        Command::Classify { wnu_arity } => {
            let lang = ctx.language()?;
            let witness = if config.override_witness {
                None
            } else {
                Some(ctx.witness(&lang)?)
            };
            let options = ClassifyOptions {
                r: config.r,
                wnu_arity: *wnu_arity,
                witness: witness.as_ref(),
                override_witness: config.override_witness,
            };
            let report = classify(&lang, options, &ctx.budgets)?;
            ctx.print(out, &report)?;
            Ok(0)
        }
        Command::Verify { methods } => {
            if methods.is_empty() {
                return Err(Error::InvalidArgument("`--methods` needs at least one method".into()));
            }
            let lang = ctx.language()?;
            let mut outcomes = Vec::new();
            for &m in methods {
                let (report, _) = solve(&ctx, &lang, m)?;
                outcomes.push(MethodOutcome {
                    method: report.verdict.method,
                    truth: report.verdict.truth,
                    conditional: report.conditional,
                });
            }
            let agreement = outcomes.windows(2).all(|w| w[0].truth == w[1].truth);
            ctx.print(
                out,
                &VerifyReport {
                    methods: outcomes,
                    agreement,
                },
            )?;
            Ok(exit_for(agreement))
        }
    }
}

fn solve(
    ctx: &Context<'_>,
    lang: &Arc<ConstraintLanguage>,
    method: SolveMethod,
) -> Result<(SolveReport, Option<ReductionBundle>)> {
    let budgets = &ctx.budgets;
    let plain = |verdict: SolveVerdict| SolveReport {
        verdict,
        conditional: false,
    };
    match method {
        SolveMethod::Oracle => {
            let s = match (&ctx.config.sentence, &ctx.config.instance) {
                (None, Some(_)) => ctx.instance(lang)?.to_sentence(),
                _ => ctx.sentence(lang)?,
            };
            Ok((plain(oracle_qcsp(&s, budgets)?), None))
        }
        SolveMethod::Csp => {
            let inst = match (&ctx.config.sentence, &ctx.config.instance) {
                (Some(_), None) => CspInstance::from_sentence(ctx.sentence(lang)?)?,
                _ => ctx.instance(lang)?,
            };
            Ok((plain(solve_csp(&inst, budgets)?), None))
        }
        SolveMethod::PgpCsp | SolveMethod::Pi2 | SolveMethod::PowerCsp => {
            let s = ctx.sentence(lang)?;
            let witness = ctx.gate_witness(lang)?;
            let options = ReductionOptions {
                r: ctx.config.r,
                witness: witness.as_ref(),
                override_witness: ctx.config.override_witness,
                exec: ctx.exec,
            };
            let conditional = options.gate(&s)?;
            match method {
                SolveMethod::PgpCsp => {
                    let bundle = reduce_pgp_to_csp(&s, options, budgets)?;
                    let report = SolveReport {
                        verdict: bundle.verdict(),
                        conditional,
                    };
                    Ok((report, Some(bundle)))
                }
                SolveMethod::Pi2 => Ok((
                    SolveReport {
                        verdict: solve_pi2(&s, options, budgets)?,
                        conditional,
                    },
                    None,
                )),
                _ => Ok((
                    SolveReport {
                        verdict: solve_power_csp(&s, options, budgets)?,
                        conditional,
                    },
                    None,
                )),
            }
        }
    }
}

enum Output {
    Sentence(QuantifiedSentence),
    Instance(CspInstance),
    False(String),
}

impl Output {
    fn size(&self) -> usize {
        match self {
            Output::Sentence(s) => s.size(),
            Output::Instance(i) => i.variables().len() + i.atoms().len(),
            Output::False(_) => 0,
        }
    }
}

fn transform(
    ctx: &Context<'_>,
    name: TransformName,
    indices: &[usize],
    output_language: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let budgets = &ctx.budgets;
    let lang = ctx.language()?;
    let (rule, before, result) = match name {
        TransformName::PowerBack => {
            let power = power_language(&lang, budgets)?;
            let path = required(&ctx.config.instance, "instance")?;
            let j = read_instance(&read(path)?, Arc::new(power), Format::from_path(path))?;
            let before = j.variables().len() + j.atoms().len();
            let result = match power_csp_to_qcsp(&j, &lang, budgets)? {
                DecodedSentence::Sentence(s) => Output::Sentence(s),
                DecodedSentence::False { variable } => Output::False(variable),
            };
            ("power-back", before, result)
        }
        _ => {
            let s = ctx.sentence(&lang)?;
            let before = s.size();
            let result = match name {
                TransformName::Normalize => Output::Sentence(normalize_alternating(&s).into_sentence()),
                TransformName::Omega => {
                    let alt = AlternatingSentence::new(s.clone())
                        .map_err(|e| Error::InvalidArgument(format!("ω needs an alternating sentence: {e}")))?;
                    Output::Sentence(omega(&alt, indices)?)
                }
                TransformName::Eliminate => Output::Instance(eliminate_universals(&s, budgets)?),
                TransformName::MoveLeft => Output::Sentence(move_universals_left(&s, budgets)?),
                TransformName::ReduceCount => Output::Sentence(reduce_universal_count(&s, budgets)?),
                TransformName::Zeta => {
                    let alt = AlternatingSentence::new(s.clone())
                        .map_err(|e| Error::InvalidArgument(format!("ζ needs an alternating sentence: {e}")))?;
                    Output::Sentence(zeta_with(&alt, budgets, ctx.exec)?)
                }
                TransformName::ToPi2 => {
                    let witness = ctx.gate_witness(&lang)?;
                    let options = ReductionOptions {
                        r: ctx.config.r,
                        witness: witness.as_ref(),
                        override_witness: ctx.config.override_witness,
                        exec: ctx.exec,
                    };
                    Output::Sentence(reduce_to_pi2(&s, options, budgets)?)
                }
                TransformName::PowerCsp => Output::Instance(qcsp_to_power_csp(&s, budgets)?),
                TransformName::PowerBack => unreachable!("handled above"),
            };
            (name_label(name), before, result)
        }
    };

    if ctx.config.trace {
        let trace = vec![TraceStep {
            step: 1,
            rule: rule.to_string(),
            size_before: before,
            size_after: result.size(),
        }];
        writeln!(err, "{}", serde_json::to_string(&trace).expect("trace serializes"))?;
    }
    let json = ctx.config.format == OutputFormat::Json;
    let language_of_result = match &result {
        Output::Sentence(s) => Some(s.language().clone()),
        Output::Instance(i) => Some(i.language().clone()),
        Output::False(_) => None,
    };
    match &result {
        Output::Sentence(s) if json => writeln!(out, "{}", sentence_to_json(s))?,
        Output::Sentence(s) => out.write_all(serialize_sentence(s).as_bytes())?,
        Output::Instance(i) if json => writeln!(out, "{}", sentence_to_json(&i.to_sentence()))?,
        Output::Instance(i) => out.write_all(serialize_instance(i).as_bytes())?,
        Output::False(v) if json => writeln!(out, "{}", serde_json::json!({ "false": true, "variable": v }))?,
        Output::False(v) => writeln!(out, "# FALSE: variable `{v}` carries two different γ constraints")?,
    }
    if let (Some(path), Some(l)) = (output_language, language_of_result) {
        let text = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            crate::format::language_to_json(&l)
        } else {
            serialize_language(&l)
        };
        std::fs::write(path, text)?;
    }
    Ok(0)
}

fn name_label(name: TransformName) -> &'static str {
    match name {
        TransformName::Normalize => "normalize",
        TransformName::Omega => "omega",
        TransformName::Eliminate => "eliminate",
        TransformName::MoveLeft => "move-left",
        TransformName::ReduceCount => "reduce-count",
        TransformName::Zeta => "zeta",
        TransformName::ToPi2 => "to-pi2",
        TransformName::PowerCsp => "power-csp",
        TransformName::PowerBack => "power-back",
    }
}
