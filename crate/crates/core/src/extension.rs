//! Carathéodory measurability and extension of a quasi-measure to the
//! generated algebra.

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::{outer, CoverSolution, OuterMeasureCache};
use crate::error::{Error, Result};
use crate::quasi::{check_axioms_default, QuasiMeasure};
use crate::report::{AxiomReport, CheckOutcome, Violation, Witness};
use crate::set::{AlgebraFamily, GroundSet, SubsetMask};
use crate::value::QValue;
use crate::Budget;

/// Ground sets up to this size also get every subset audited by
/// [`measurable_family`].
pub const AUDIT_MAX_N: usize = 5;

/// Disjoint triples checked by [`verify_premeasure`] before the triple
/// audit is skipped.
pub const DEFAULT_TRIPLE_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Measurability {
    Measurable,
    /// `p*(a) ≠ p*(a ∩ W) + p*(a ∩ 𝒞(W))`.
    NotMeasurable {
        a: SubsetMask,
        whole: BigRational,
        split: BigRational,
    },
    /// Sampling found no counterexample. Never a certificate.
    NotFalsified {
        samples: u64,
    },
}

impl Measurability {
    pub fn is_measurable(&self) -> bool {
        matches!(self, Measurability::Measurable)
    }

    pub fn counterexample(&self) -> Option<SubsetMask> {
        match self {
            Measurability::NotMeasurable { a, .. } => Some(*a),
            _ => None,
        }
    }
}

fn splits(
    qm: &QuasiMeasure,
    w: SubsetMask,
    a: SubsetMask,
    cache: &mut OuterMeasureCache,
) -> Option<Measurability> {
    let whole = outer(qm, a, cache).0.into_ratio();
    let split =
        outer(qm, a.meet(w), cache).0.into_ratio() + outer(qm, a.minus(w), cache).0.into_ratio();
    (whole != split).then_some(Measurability::NotMeasurable { a, whole, split })
}

/// Exact test of the splitting identity for `w` against every `A ⊆ Ω`.
/// Returns the first violating `A` in mask order.
pub fn is_caratheodory_measurable(
    qm: &QuasiMeasure,
    w: SubsetMask,
    cache: &mut OuterMeasureCache,
    budget: Budget,
) -> Result<Measurability> {
    let g = qm.ground();
    if g.len() > budget.max_exhaustive_n {
        return Err(Error::BudgetExceeded {
            n: g.len(),
            max: budget.max_exhaustive_n,
        });
    }
    for a in g.subsets() {
        if let Some(bad) = splits(qm, w, a, cache) {
            return Ok(bad);
        }
    }
    Ok(Measurability::Measurable)
}

/// Sampled variant for ground sets beyond the exhaustive budget.
pub fn sample_measurability(
    qm: &QuasiMeasure,
    w: SubsetMask,
    cache: &mut OuterMeasureCache,
    samples: u64,
    seed: u64,
) -> Measurability {
    let n = qm.ground().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a = SubsetMask::from_bits(rng.gen::<u32>(), n);
        if let Some(bad) = splits(qm, w, a, cache) {
            return bad;
        }
    }
    Measurability::NotFalsified { samples }
}

#[derive(Debug, Clone)]
pub struct MeasurabilityReport {
    /// Every member of the generated algebra.
    pub tested: Vec<(SubsetMask, Measurability)>,
    /// Every subset of the ground set, when small enough to audit.
    pub audit: Option<Vec<(SubsetMask, Measurability)>>,
    /// Whether the restricted axioms hold, so every algebra member must be
    /// measurable.
    pub axioms_hold: bool,
}

impl MeasurabilityReport {
    /// Algebra members that are not measurable even though the axioms hold.
    pub fn theorem_violations(&self) -> Vec<SubsetMask> {
        if !self.axioms_hold {
            return Vec::new();
        }
        self.tested
            .iter()
            .filter(|(_, m)| !m.is_measurable())
            .map(|(w, _)| *w)
            .collect()
    }

    /// The audited measurable family, when available.
    pub fn measurable_sets(&self) -> Option<Vec<SubsetMask>> {
        self.audit.as_ref().map(|a| {
            a.iter()
                .filter(|(_, m)| m.is_measurable())
                .map(|(w, _)| *w)
                .collect()
        })
    }
}

/// Measurability of every member of the algebra generated by the coat,
/// plus an audit of all subsets on small ground sets.
pub fn measurable_family(qm: &QuasiMeasure, budget: Budget) -> Result<MeasurabilityReport> {
    let mut cache = OuterMeasureCache::new();
    let algebra = qm.coat().generate_algebra();
    let mut tested = Vec::with_capacity(algebra.len());
    for &w in algebra.members() {
        tested.push((w, is_caratheodory_measurable(qm, w, &mut cache, budget)?));
    }
    let audit = if qm.ground().len() <= AUDIT_MAX_N {
        let mut all = Vec::new();
        for w in qm.ground().subsets() {
            all.push((w, is_caratheodory_measurable(qm, w, &mut cache, budget)?));
        }
        Some(all)
    } else {
        None
    };
    Ok(MeasurabilityReport {
        tested,
        audit,
        axioms_hold: check_axioms_default(qm).passed(),
    })
}

/// Exterior values on the generated algebra, with optimal covers.
#[derive(Debug, Clone)]
pub struct MeasureTable {
    ground: GroundSet,
    algebra: AlgebraFamily,
    values: Vec<QValue>,
    provenance: Vec<CoverSolution>,
}

impl MeasureTable {
    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn algebra(&self) -> &AlgebraFamily {
        &self.algebra
    }

    pub fn value(&self, mask: SubsetMask) -> Option<&QValue> {
        self.algebra.position(mask).map(|i| &self.values[i])
    }

    pub fn cover(&self, mask: SubsetMask) -> Option<&CoverSolution> {
        self.algebra.position(mask).map(|i| &self.provenance[i])
    }

    /// `(set, value, cover)` rows in mask order.
    pub fn rows(&self) -> impl Iterator<Item = (SubsetMask, &QValue, &CoverSolution)> {
        self.algebra
            .members()
            .iter()
            .copied()
            .zip(self.values.iter())
            .zip(self.provenance.iter())
            .map(|((m, v), c)| (m, v, c))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Computes the exterior value of every member of the generated algebra.
/// Makes no verification claim; see [`verify_premeasure`].
pub fn extend(qm: &QuasiMeasure) -> MeasureTable {
    extend_with(qm, &mut OuterMeasureCache::new())
}

pub fn extend_with(qm: &QuasiMeasure, cache: &mut OuterMeasureCache) -> MeasureTable {
    let algebra = qm.coat().generate_algebra();
    let (values, provenance) = algebra
        .members()
        .iter()
        .map(|&m| outer(qm, m, cache))
        .unzip();
    MeasureTable {
        ground: qm.ground().clone(),
        algebra,
        values,
        provenance,
    }
}

pub fn verify_premeasure(table: &MeasureTable) -> AxiomReport {
    verify_premeasure_with(table, DEFAULT_TRIPLE_BUDGET)
}

/// Checks endpoints, nonnegativity, additivity on every disjoint pair and,
/// when the number of disjoint triples fits `triple_budget`, on every
/// disjoint triple as well.
pub fn verify_premeasure_with(table: &MeasureTable, triple_budget: u64) -> AxiomReport {
    let g = table.ground();
    let members = table.algebra().members();
    let value = |m: SubsetMask| table.value(m).map(|v| v.ratio().clone());
    let mut report = AxiomReport::new("pre-measure");

    let mut ends = CheckOutcome::new("endpoints");
    for (m, want) in [(g.empty(), QValue::zero()), (g.full(), QValue::one())] {
        match table.value(m) {
            Some(v) => ends.record(*v == want, || {
                Witness::new(
                    vec![("E", m.into())],
                    Violation::NotEqual {
                        lhs: v.ratio().clone(),
                        rhs: want.into_ratio(),
                    },
                )
            }),
            None => ends.fail(Witness::new(vec![("E", m.into())], Violation::Absent)),
        }
    }
    report.push(ends);

    let mut nonneg = CheckOutcome::new("nonnegative");
    for (m, v, _) in table.rows() {
        nonneg.record(*v.ratio() >= BigRational::zero(), || {
            Witness::new(
                vec![("E", m.into())],
                Violation::Exceeds {
                    lhs: BigRational::zero(),
                    rhs: v.ratio().clone(),
                },
            )
        });
    }
    report.push(nonneg);

    let additive = |parts: &[SubsetMask], out: &mut CheckOutcome| {
        let union = parts.iter().fold(g.empty(), |u, &p| u.join(p));
        let mut sets: Vec<(&'static str, _)> = parts.iter().map(|&p| ("E", p.into())).collect();
        sets.push(("union", union.into()));
        let Some(lhs) = value(union) else {
            out.fail(Witness::new(sets, Violation::Absent));
            return;
        };
        let rhs = parts.iter().fold(BigRational::zero(), |acc, &p| {
            acc + value(p).expect("algebra member")
        });
        out.record(lhs == rhs, || {
            Witness::new(
                sets,
                Violation::NotEqual {
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                },
            )
        });
    };

    let mut pairs = CheckOutcome::new("pair-additive");
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            if a.is_disjoint(b) {
                additive(&[a, b], &mut pairs);
            }
        }
    }
    report.push(pairs);

    let mut triples = CheckOutcome::new("triple-additive");
    let nonempty: Vec<SubsetMask> = members.iter().copied().filter(|m| !m.is_empty()).collect();
    let k = nonempty.len() as u64;
    if k.saturating_mul(k).saturating_mul(k) / 6 <= triple_budget {
        for (i, &a) in nonempty.iter().enumerate() {
            for (j, &b) in nonempty.iter().enumerate().skip(i + 1) {
                if !a.is_disjoint(b) {
                    continue;
                }
                for &c in &nonempty[j + 1..] {
                    if a.join(b).is_disjoint(c) {
                        additive(&[a, b, c], &mut triples);
                    }
                }
            }
        }
        report.push(triples);
    } else {
        report.push(triples.not_applicable(format!(
            "{k} nonempty members exceed the triple budget {triple_budget}"
        )));
    }
    report
}
