//! Check reports with re-evaluable failure witnesses.

use std::fmt::Write as _;

use num_rational::BigRational;

use crate::interval::IntervalSet;
use crate::set::{GroundSet, SubsetMask};
use crate::value::format_ratio;

/// Witnesses kept per check item; the failure count is always exact.
pub const MAX_WITNESSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    /// A precondition of the item did not hold, so it was not evaluated.
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessSet {
    Finite(SubsetMask),
    Interval(IntervalSet),
}

impl From<SubsetMask> for WitnessSet {
    fn from(m: SubsetMask) -> Self {
        WitnessSet::Finite(m)
    }
}

impl From<IntervalSet> for WitnessSet {
    fn from(s: IntervalSet) -> Self {
        WitnessSet::Interval(s)
    }
}

impl WitnessSet {
    pub fn as_mask(&self) -> Option<SubsetMask> {
        match self {
            WitnessSet::Finite(m) => Some(*m),
            WitnessSet::Interval(_) => None,
        }
    }

    fn render(&self, ground: Option<&GroundSet>) -> String {
        match (self, ground) {
            (WitnessSet::Finite(m), Some(g)) => g.render(*m),
            (WitnessSet::Finite(m), None) => m.to_string(),
            (WitnessSet::Interval(s), _) => s.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `lhs = rhs` was required.
    NotEqual { lhs: BigRational, rhs: BigRational },
    /// `lhs ≤ rhs` was required.
    Exceeds { lhs: BigRational, rhs: BigRational },
    /// No set of the required kind carries `value`.
    NoWitness { value: BigRational },
    /// `|lhs - rhs| ≤ tol` (or `lhs ≤ rhs + tol`) was required.
    Inexact { lhs: f64, rhs: f64, tol: f64 },
    /// A set that must exist in the family is missing.
    Absent,
}

impl Violation {
    fn describe(&self) -> String {
        match self {
            Violation::NotEqual { lhs, rhs } => {
                format!("{} != {}", format_ratio(lhs), format_ratio(rhs))
            }
            Violation::Exceeds { lhs, rhs } => {
                format!("{} > {}", format_ratio(lhs), format_ratio(rhs))
            }
            Violation::NoWitness { value } => {
                format!("no witness with value {}", format_ratio(value))
            }
            Violation::Inexact { lhs, rhs, tol } => {
                format!("{lhs:e} vs {rhs:e} beyond tol {tol:e}")
            }
            Violation::Absent => "missing from family".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub sets: Vec<(&'static str, WitnessSet)>,
    pub violation: Violation,
}

impl Witness {
    pub fn new(sets: Vec<(&'static str, WitnessSet)>, violation: Violation) -> Self {
        Self { sets, violation }
    }

    /// The mask bound to `role`, if any.
    pub fn mask(&self, role: &str) -> Option<SubsetMask> {
        self.sets
            .iter()
            .find(|(r, _)| *r == role)
            .and_then(|(_, s)| s.as_mask())
    }

    /// Every mask bound to `role`, in order (covers repeat a role).
    pub fn masks(&self, role: &str) -> Vec<SubsetMask> {
        self.sets
            .iter()
            .filter(|(r, _)| *r == role)
            .filter_map(|(_, s)| s.as_mask())
            .collect()
    }

    pub fn describe(&self, ground: Option<&GroundSet>) -> String {
        let mut out = String::new();
        for (role, set) in &self.sets {
            let _ = write!(out, "{role}={} ", set.render(ground));
        }
        out.push_str(": ");
        out.push_str(&self.violation.describe());
        out
    }
}

/// Outcome of one check item, e.g. the splitting identity over all pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub item: &'static str,
    pub status: Status,
    pub checked: u64,
    pub failures: u64,
    /// `false` when the quantifier was sampled rather than exhausted.
    pub exhaustive: bool,
    pub witnesses: Vec<Witness>,
    pub note: Option<String>,
}

impl CheckOutcome {
    pub fn new(item: &'static str) -> Self {
        Self {
            item,
            status: Status::Pass,
            checked: 0,
            failures: 0,
            exhaustive: true,
            witnesses: Vec::new(),
            note: None,
        }
    }

    pub fn pass(&mut self) {
        self.checked += 1;
    }

    pub fn fail(&mut self, witness: Witness) {
        self.checked += 1;
        self.failures += 1;
        self.status = Status::Fail;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        if ok {
            self.pass()
        } else {
            self.fail(witness())
        }
    }

    pub fn sampled(mut self) -> Self {
        self.exhaustive = false;
        self
    }

    pub fn not_applicable(mut self, note: impl Into<String>) -> Self {
        self.status = Status::NotApplicable;
        self.note = Some(note.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub name: &'static str,
    pub items: Vec<CheckOutcome>,
}

impl AxiomReport {
    pub fn new(name: &'static str) -> Self {
        Self {
            name,
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, outcome: CheckOutcome) {
        self.items.push(outcome);
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(CheckOutcome::passed)
    }

    pub fn item(&self, id: &str) -> Option<&CheckOutcome> {
        self.items.iter().find(|o| o.item == id)
    }

    pub fn failed_items(&self) -> Vec<&'static str> {
        self.items
            .iter()
            .filter(|o| !o.passed())
            .map(|o| o.item)
            .collect()
    }

    pub fn total_failures(&self) -> u64 {
        self.items.iter().map(|o| o.failures).sum()
    }
}
