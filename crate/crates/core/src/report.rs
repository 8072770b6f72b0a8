//! Human-readable and JSON renderings of verdicts, bundles, witnesses and classifications.
//!
//! JSON output uses the serialized field names of the underlying types, so
//! the keys are stable across releases.

use std::fmt::Write as _;

use serde::Serialize;

use crate::algebra::SwitchabilityWitness;
use crate::solvers::{ClassificationReport, Method, ReductionBundle, SolveVerdict, CONDITIONAL_CAVEAT};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

/// A verdict together with the conditions under which it was computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    #[serde(flatten)]
    pub verdict: SolveVerdict,
    pub conditional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub truth: bool,
    pub conditional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub methods: Vec<MethodOutcome>,
    pub agreement: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub rule: String,
    pub size_before: usize,
    pub size_after: usize,
}

/// Something the CLI can print.
pub trait Report: Serialize {
    fn text(&self) -> String;
}

pub fn emit_report<R: Report>(value: &R, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => value.text(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
            s.push('\n');
            s
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl Report for SolveReport {
    fn text(&self) -> String {
        let v = &self.verdict;
        let mut s = String::new();
        let _ = writeln!(s, "truth      {}", v.truth);
        let _ = writeln!(s, "method     {}", v.method.label());
        let _ = writeln!(s, "nodes      {}", v.stats.nodes);
        let _ = writeln!(s, "instances  {}", v.stats.instances);
        if let Some(w) = &v.witness {
            let pairs: Vec<String> = w.iter().map(|(k, x)| format!("{k}={x}")).collect();
            let _ = writeln!(s, "witness    {}", pairs.join(" "));
        }
        if self.conditional {
            let _ = writeln!(s, "{CONDITIONAL_CAVEAT}");
        }
        s
    }
}

impl Report for ReductionBundle {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "r {}, pairs {}, instances {}, combined {}",
            self.r,
            self.pairs,
            self.members.len(),
            self.combined
        );
        let _ = writeln!(s, "{:<16} {:>10} {:>10} {:>8} {:>12}", "indices", "universals", "variables", "atoms", "satisfiable");
        for m in &self.members {
            let idx: Vec<String> = m.indices.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(
                s,
                "{:<16} {:>10} {:>10} {:>8} {:>12}",
                format!("{{{}}}", idx.join(",")),
                m.universals,
                m.variables,
                m.atoms,
                yes_no(m.satisfiable)
            );
        }
        if self.conditional {
            let _ = writeln!(s, "{CONDITIONAL_CAVEAT}");
        }
        s
    }
}

impl Report for SwitchabilityWitness {
    fn text(&self) -> String {
        let mut s = String::new();
        let arities: Vec<String> = self.arities_used.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(s, "r          {}", self.r);
        let _ = writeln!(s, "verdict    {}", self.verdict.label());
        let _ = writeln!(s, "arities    {}", arities.join(","));
        let _ = writeln!(s, "operations {}", self.operation_count);
        let _ = writeln!(s, "{:<4} generated", "n");
        for p in &self.powers {
            let _ = writeln!(s, "{:<4} {}", p.n, yes_no(p.generated));
        }
        if let Some(b) = &self.stopped_by {
            let _ = writeln!(s, "stopped by {b}");
        }
        s
    }
}

impl Report for ClassificationReport {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verdict      {}", self.verdict.label());
        let _ = writeln!(s, "r            {}", self.r);
        let _ = writeln!(s, "wnu arity    {}", self.wnu_arity);
        if let Some(size) = self.power_domain_size {
            let _ = writeln!(s, "power domain {size} elements");
        }
        let _ = writeln!(s, "candidates   {} of {}", self.candidates_examined, self.search_space);
        if let Some(base) = &self.base_wnu {
            let entries: Vec<String> = base.table().iter().map(|e| e.to_string()).collect();
            let _ = writeln!(s, "base wnu     {}", entries.join(" "));
            let _ = writeln!(s, "             (lifted coordinatewise to the power domain)");
        }
        let _ = writeln!(s, "{}", self.caveat);
        s
    }
}

impl Report for VerifyReport {
    fn text(&self) -> String {
        let mut s = String::new();
        for m in &self.methods {
            let cond = if m.conditional { " (conditional)" } else { "" };
            let _ = writeln!(s, "{:<10} {}{cond}", m.method.label(), m.truth);
        }
        let _ = writeln!(s, "agreement  {}", self.agreement);
        s
    }
}

impl Report for Vec<TraceStep> {
    fn text(&self) -> String {
        let mut s = String::new();
        for t in self {
            let _ = writeln!(s, "{:>3} {:<22} {:>8} -> {}", t.step, t.rule, t.size_before, t.size_after);
        }
        s
    }
}
