//! The `qmcheck` command line.
//!
//! Machine reports are JSON lines, one flat object per record, with fields
//! in this order:
//!
//! | field        | meaning                                          |
//! |--------------|--------------------------------------------------|
//! | `command`    | subcommand that produced the record              |
//! | `item`       | check item or table row                          |
//! | `status`     | `pass`, `fail`, `n/a` or `info`                  |
//! | `checked`    | quantifier instances evaluated                   |
//! | `failures`   | quantifier instances that failed                 |
//! | `exhaustive` | `false` when the quantifier was sampled          |
//! | `value`      | rational `p/q`, float, or empty                  |
//! | `detail`     | witnesses or covers, `; `-separated              |
//!
//! Exit codes: 0 when everything passes, 1 on any failed check, 2 on input
//! errors.

mod args;

use std::fs;
use std::io::{self, Write};
use std::ops::Range;
use std::path::PathBuf;

use serde::Serialize;

pub use args::{main_with_args, parse_seed_range};

use crate::cover::{outer, OuterMeasureCache};
use crate::error::{Error, Result};
use crate::extension::{extend, measurable_family, verify_premeasure, Measurability};
use crate::instance::{parse_instance, InstanceSpec};
use crate::interval::{exp_eval, verify_example_axioms, IntervalSet};
use crate::quasi::{check_axioms, CoverMode, QuasiMeasure, Variant};
use crate::report::{AxiomReport, Status};
use crate::set::{GroundSet, SubsetMask};
use crate::testkit::search_theorem_instances;
use crate::value::format_ratio;
use crate::Budget;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Check,
    Outer { set: String },
    Extend,
    Example { samples: usize, seed: u64, tol: f64 },
    Search { seeds: Range<u64> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Outer { .. } => "outer",
            Command::Extend => "extend",
            Command::Example { .. } => "example",
            Command::Search { .. } => "search",
        }
    }

    fn needs_input(&self) -> bool {
        matches!(
            self,
            Command::Check | Command::Outer { .. } | Command::Extend
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Machine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub variant: Variant,
    pub cover_mode: CoverMode,
    /// Largest ground set for loops over all subsets.
    pub max_n: usize,
    /// Largest cover considered by cover subadditivity; the coat size when unset.
    pub max_cover: Option<usize>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input: None,
            variant: Variant::default(),
            cover_mode: CoverMode::default(),
            max_n: Budget::default().max_exhaustive_n,
            max_cover: None,
            format: OutputFormat::default(),
            out: None,
        }
    }

    pub fn with_input(mut self, path: impl Into<PathBuf>) -> Self {
        self.input = Some(path.into());
        self
    }
}

/// One output line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub command: &'static str,
    pub item: String,
    pub status: &'static str,
    pub checked: u64,
    pub failures: u64,
    pub exhaustive: bool,
    pub value: String,
    pub detail: String,
    #[serde(skip)]
    lines: Vec<String>,
}

impl Record {
    fn info(command: &'static str, item: impl Into<String>, value: impl Into<String>) -> Self {
        Self {
            command,
            item: item.into(),
            status: "info",
            checked: 0,
            failures: 0,
            exhaustive: true,
            value: value.into(),
            detail: String::new(),
            lines: Vec::new(),
        }
    }

    fn with_lines(mut self, lines: Vec<String>) -> Self {
        self.detail = lines.join("; ");
        self.lines = lines;
        self
    }

    fn failed(&self) -> bool {
        self.status == Status::Fail.as_str()
    }
}

fn report_records(
    command: &'static str,
    report: &AxiomReport,
    ground: Option<&GroundSet>,
) -> Vec<Record> {
    report
        .items
        .iter()
        .map(|o| {
            let mut lines: Vec<String> = o.witnesses.iter().map(|w| w.describe(ground)).collect();
            if let Some(note) = &o.note {
                lines.push(note.clone());
            }
            Record {
                command,
                item: format!("{}/{}", report.name, o.item),
                status: o.status.as_str(),
                checked: o.checked,
                failures: o.failures,
                exhaustive: o.exhaustive,
                value: String::new(),
                detail: String::new(),
                lines: Vec::new(),
            }
            .with_lines(lines)
        })
        .collect()
}

fn render_cover(qm: &QuasiMeasure, chosen: &[usize]) -> String {
    let g = qm.ground();
    let parts: Vec<String> = chosen.iter().map(|&i| g.render(qm.coat().get(i))).collect();
    format!("[{}]", parts.join(" "))
}

fn load(config: &RunConfig) -> Result<(InstanceSpec, QuasiMeasure), String> {
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| format!("`{}` needs an input file", config.command.name()))?;
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let spec = parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let qm = spec.quasi_measure().map_err(|e| e.to_string())?;
    Ok((spec, qm))
}

/// Resolves `--set`: a set expression over named sets, else element labels
/// separated by spaces or commas, optionally braced.
pub fn resolve_target(spec: &InstanceSpec, text: &str) -> Result<SubsetMask> {
    if let Ok(mask) = spec.resolve(text) {
        return Ok(mask);
    }
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    spec.ground.subset(
        inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty()),
    )
}

fn check_budget(config: &RunConfig, n: usize) -> Result<(), String> {
    if n > config.max_n {
        return Err(Error::BudgetExceeded {
            n,
            max: config.max_n,
        }
        .to_string());
    }
    Ok(())
}

fn execute(config: &RunConfig) -> Result<Vec<Record>, String> {
    let name = config.command.name();
    let loaded = if config.command.needs_input() {
        Some(load(config)?)
    } else {
        None
    };
    let mut records = Vec::new();
    match &config.command {
        Command::Check => {
            let (_, qm) = loaded.expect("loaded above");
            let max_cover = config.max_cover.unwrap_or(qm.coat().len());
            let report = check_axioms(&qm, config.variant, config.cover_mode, max_cover);
            records.push(Record::info(name, "variant", config.variant.as_str()));
            records.push(Record::info(name, "cover-mode", config.cover_mode.as_str()));
            records.extend(report_records(name, &report, Some(qm.ground())));
        }
        Command::Outer { set } => {
            let (spec, qm) = loaded.expect("loaded above");
            let target = resolve_target(&spec, set).map_err(|e| e.to_string())?;
            let (value, solution) = outer(&qm, target, &mut OuterMeasureCache::new());
            let cover = render_cover(&qm, &solution.chosen);
            let mut r = Record::info(name, qm.ground().render(target), value.to_string());
            r.detail = format!("cover {cover}");
            records.push(r);
        }
        Command::Extend => {
            let (_, qm) = loaded.expect("loaded above");
            check_budget(config, qm.ground().len())?;
            let table = extend(&qm);
            for (mask, value, cover) in table.rows() {
                let mut r = Record::info(name, qm.ground().render(mask), value.to_string());
                r.detail = format!("cover {}", render_cover(&qm, &cover.chosen));
                records.push(r);
            }
            records.extend(report_records(
                name,
                &verify_premeasure(&table),
                Some(qm.ground()),
            ));
            let budget = Budget {
                max_exhaustive_n: config.max_n,
            };
            let family = measurable_family(&qm, budget).map_err(|e| e.to_string())?;
            let failures: Vec<String> = family
                .tested
                .iter()
                .filter_map(|(w, m)| match m {
                    Measurability::NotMeasurable { a, whole, split } => Some(format!(
                        "W={} A={} : {} != {}",
                        qm.ground().render(*w),
                        qm.ground().render(*a),
                        format_ratio(whole),
                        format_ratio(split)
                    )),
                    _ => None,
                })
                .collect();
            records.push(
                Record {
                    command: name,
                    item: "measurability/algebra-members".into(),
                    status: if failures.is_empty() { "pass" } else { "fail" },
                    checked: family.tested.len() as u64,
                    failures: failures.len() as u64,
                    exhaustive: true,
                    value: String::new(),
                    detail: String::new(),
                    lines: Vec::new(),
                }
                .with_lines(
                    failures
                        .into_iter()
                        .take(crate::report::MAX_WITNESSES)
                        .collect(),
                ),
            );
        }
        Command::Example { samples, seed, tol } => {
            let ln2 = std::f64::consts::LN_2;
            let shapes = [
                ("[0,ln 2]", IntervalSet::closed(0.0, ln2)),
                ("empty", Ok(IntervalSet::empty())),
                ("[0,inf)", Ok(IntervalSet::positive_reals())),
                (
                    "[0,1) u (2,3]",
                    IntervalSet::interval(0.0, true, 1.0, false).and_then(|a| {
                        IntervalSet::interval(2.0, false, 3.0, true).map(|b| a.union(&b))
                    }),
                ),
            ];
            for (label, shape) in shapes {
                let shape = shape.map_err(|e| e.to_string())?;
                let value = exp_eval(&shape).map_err(|e| e.to_string())?;
                let mut r = Record::info(name, format!("exp_eval {label}"), value.to_string());
                r.detail = shape.to_string();
                records.push(r);
            }
            let report = verify_example_axioms(*samples, *seed, *tol);
            records.extend(report_records(name, &report, None));
        }
        Command::Search { seeds } => {
            let s = search_theorem_instances(seeds.clone(), config.variant);
            records.push(Record::info(name, "variant", config.variant.as_str()));
            records.push(Record::info(name, "instances", s.instances.to_string()));
            records.push(Record::info(name, "axioms-pass", s.axioms_pass.to_string()));
            records.push(Record::info(name, "axioms-fail", s.axioms_fail.to_string()));
            records.push(Record::info(
                name,
                "premeasure-verified",
                s.premeasure_verified.to_string(),
            ));
            records.push(Record::info(
                name,
                "fail-with-additivity-failure",
                s.fail_with_additivity_failure.to_string(),
            ));
            let seeds: Vec<String> = s
                .counterexamples
                .iter()
                .map(|x| format!("seed {x}"))
                .collect();
            records.push(
                Record {
                    command: name,
                    item: "counterexamples".into(),
                    status: if seeds.is_empty() { "pass" } else { "fail" },
                    checked: s.axioms_pass,
                    failures: seeds.len() as u64,
                    exhaustive: true,
                    value: seeds.len().to_string(),
                    detail: String::new(),
                    lines: Vec::new(),
                }
                .with_lines(seeds),
            );
        }
    }
    Ok(records)
}

fn write_records(out: &mut dyn Write, records: &[Record], format: OutputFormat) -> io::Result<()> {
    match format {
        OutputFormat::Machine => {
            for r in records {
                let line = serde_json::to_string(r).expect("records serialise");
                writeln!(out, "{line}")?;
            }
        }
        OutputFormat::Text => {
            for r in records {
                let status = r.status.to_uppercase();
                write!(out, "{status:<5} {}", r.item)?;
                if !r.value.is_empty() {
                    write!(out, " = {}", r.value)?;
                }
                if r.status != "info" {
                    write!(out, "  (checked {}, failures {}", r.checked, r.failures)?;
                    if !r.exhaustive {
                        write!(out, ", sampled")?;
                    }
                    write!(out, ")")?;
                }
                writeln!(out)?;
                if r.lines.is_empty() && !r.detail.is_empty() {
                    writeln!(out, "      {}", r.detail)?;
                }
                for line in &r.lines {
                    writeln!(out, "      {line}")?;
                }
            }
            let failed = records.iter().filter(|r| r.failed()).count();
            if failed == 0 {
                writeln!(out, "result: pass")?;
            } else {
                writeln!(out, "result: fail ({failed} items)")?;
            }
        }
    }
    Ok(())
}

/// Runs `config`, writing the report to `out`, and returns the exit code.
/// Input errors go to `err`.
pub fn run_to(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if config.max_n == 0 || config.max_cover == Some(0) {
        let _ = writeln!(err, "error: budgets must be positive");
        return EXIT_INPUT;
    }
    if let Command::Example { samples: 0, .. } = config.command {
        let _ = writeln!(err, "error: --samples must be positive");
        return EXIT_INPUT;
    }
    let records = match execute(config) {
        Ok(r) => r,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            return EXIT_INPUT;
        }
    };
    if let Err(e) = write_records(out, &records, config.format) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INPUT;
    }
    if records.iter().any(Record::failed) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}

/// Runs `config` against stdout or `--out`.
pub fn run(config: &RunConfig) -> i32 {
    let mut stderr = io::stderr();
    match &config.out {
        Some(path) => {
            let mut buf = Vec::new();
            let code = run_to(config, &mut buf, &mut stderr);
            if let Err(e) = fs::write(path, &buf) {
                let _ = writeln!(stderr, "error: {}: {e}", path.display());
                return EXIT_INPUT;
            }
            code
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            let code = run_to(config, &mut lock, &mut stderr);
            let _ = lock.flush();
            code
        }
    }
}
