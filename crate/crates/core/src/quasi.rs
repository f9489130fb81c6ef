//! Quasi-measures on refinements and mechanical checks of their axioms.

use num_rational::BigRational;

use crate::cover::{CoverConstraints, CoverSearch};
use crate::error::{Error, Result};
use crate::report::{AxiomReport, CheckOutcome, Violation, Witness};
use crate::set::{Coat, GroundSet, Refinement, SubsetMask};
use crate::value::QValue;

/// Where the witness sets `W` (for `X ∩ Y`) and `Z` (for `X ∩ 𝒞(Y)`) may
/// be drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Any refinement member. `X ∩ Y` itself always qualifies.
    Literal,
    /// Coat members only.
    #[default]
    Restricted,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Literal => "literal",
            Variant::Restricted => "restricted",
        }
    }
}

/// Which finite covers the subadditivity item quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CoverMode {
    #[default]
    All,
    DisjointOnly,
}

impl CoverMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverMode::All => "all",
            CoverMode::DisjointOnly => "disjoint-only",
        }
    }
}

/// An exact `[0,1]`-valued map on the refinement of a coat.
///
/// Values are stored by mask, so two expressions denoting the same set
/// always share one value.
#[derive(Debug, Clone)]
pub struct QuasiMeasure {
    coat: Coat,
    refinement: Refinement,
    values: Vec<QValue>,
}

impl QuasiMeasure {
    /// Builds a quasi-measure from `(mask, value)` pairs. Every refinement
    /// member needs a value; repeats must agree; `∅ ↦ 0` and `Ω ↦ 1`.
    pub fn new<I>(coat: Coat, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetMask, QValue)>,
    {
        let refinement = coat.refine();
        let ground = coat.ground();
        let mut slots: Vec<Option<QValue>> = vec![None; refinement.len()];
        for (mask, value) in values {
            let i = refinement
                .position(mask)
                .ok_or_else(|| Error::NotInRefinement(ground.render(mask)))?;
            match &slots[i] {
                Some(existing) if *existing != value => {
                    return Err(Error::ConflictingValue(ground.render(mask)))
                }
                _ => slots[i] = Some(value),
            }
        }
        let mut out = Vec::with_capacity(slots.len());
        for (i, slot) in slots.into_iter().enumerate() {
            let v =
                slot.ok_or_else(|| Error::MissingValue(ground.render(refinement.members()[i])))?;
            out.push(v);
        }
        let qm = Self {
            coat,
            refinement,
            values: out,
        };
        let ground = qm.ground();
        if !qm.value_at(ground.empty()).is_zero() {
            return Err(Error::EndpointValue("empty must map to 0".into()));
        }
        if !qm.value_at(ground.full()).is_one() {
            return Err(Error::EndpointValue("omega must map to 1".into()));
        }
        Ok(qm)
    }

    pub fn from_fn<F>(coat: Coat, mut f: F) -> Result<Self>
    where
        F: FnMut(SubsetMask) -> QValue,
    {
        let members = coat.refine().members().to_vec();
        Self::new(coat, members.into_iter().map(|m| (m, f(m))))
    }

    pub fn coat(&self) -> &Coat {
        &self.coat
    }

    pub fn ground(&self) -> &GroundSet {
        self.coat.ground()
    }

    pub fn refinement(&self) -> &Refinement {
        &self.refinement
    }

    pub fn value(&self, mask: SubsetMask) -> Option<&QValue> {
        self.refinement.position(mask).map(|i| &self.values[i])
    }

    /// Value of a refinement member.
    ///
    /// Panics if `mask` is not in the refinement.
    pub fn value_at(&self, mask: SubsetMask) -> &QValue {
        self.value(mask)
            .unwrap_or_else(|| panic!("{} is not a refinement member", self.ground().render(mask)))
    }

    /// `(mask, value)` pairs in refinement order.
    pub fn entries(&self) -> impl Iterator<Item = (SubsetMask, &QValue)> {
        self.refinement
            .members()
            .iter()
            .copied()
            .zip(self.values.iter())
    }

    /// Values of the coat members, in coat order.
    pub fn coat_weights(&self) -> Vec<BigRational> {
        self.coat
            .members()
            .iter()
            .map(|&m| self.value_at(m).ratio().clone())
            .collect()
    }

    fn ratio(&self, mask: SubsetMask) -> &BigRational {
        self.value_at(mask).ratio()
    }

    fn coat_pairs(&self) -> impl Iterator<Item = (SubsetMask, SubsetMask)> + '_ {
        let members = self.coat.members();
        members
            .iter()
            .flat_map(move |&x| members.iter().map(move |&y| (x, y)))
    }
}

fn endpoints(qm: &QuasiMeasure) -> CheckOutcome {
    let g = qm.ground();
    let mut out = CheckOutcome::new("endpoints");
    for (mask, want) in [(g.empty(), QValue::zero()), (g.full(), QValue::one())] {
        let got = qm.value_at(mask);
        out.record(*got == want, || {
            Witness::new(
                vec![("E", mask.into())],
                Violation::NotEqual {
                    lhs: got.ratio().clone(),
                    rhs: want.into_ratio(),
                },
            )
        });
    }
    out
}

/// `p(X) = p(X ∩ Y) + p(X ∩ 𝒞(Y))` for all ordered coat pairs.
fn splitting(qm: &QuasiMeasure) -> CheckOutcome {
    let mut out = CheckOutcome::new("splitting");
    for (x, y) in qm.coat_pairs() {
        let lhs = qm.ratio(x);
        let rhs = qm.ratio(x.meet(y)) + qm.ratio(x.minus(y));
        out.record(*lhs == rhs, || {
            Witness::new(
                vec![("X", x.into()), ("Y", y.into())],
                Violation::NotEqual {
                    lhs: lhs.clone(),
                    rhs,
                },
            )
        });
    }
    out
}

/// For each `X, Y`, some candidate superset of `part(X, Y)` carries the
/// same value.
fn outer_witness<F>(
    qm: &QuasiMeasure,
    item: &'static str,
    role: &'static str,
    candidates: &[SubsetMask],
    part: F,
) -> CheckOutcome
where
    F: Fn(SubsetMask, SubsetMask) -> SubsetMask,
{
    let mut out = CheckOutcome::new(item);
    for (x, y) in qm.coat_pairs() {
        let target = part(x, y);
        let value = qm.ratio(target);
        let found = candidates
            .iter()
            .any(|&w| target.is_subset_of(w) && qm.ratio(w) == value);
        out.record(found, || {
            Witness::new(
                vec![("X", x.into()), ("Y", y.into()), (role, target.into())],
                Violation::NoWitness {
                    value: value.clone(),
                },
            )
        });
    }
    out
}

/// `p(X) ≤ Σ p(Sₙ)` for every admissible finite cover of every coat
/// member, checked by comparing `p(X)` with the cheapest admissible cover.
fn cover_subadditivity(qm: &QuasiMeasure, mode: CoverMode, max_cover_size: usize) -> CheckOutcome {
    let coat = qm.coat();
    let max = max_cover_size.min(coat.len());
    let constraints = CoverConstraints {
        max_members: (max < coat.len()).then_some(max),
        pairwise_disjoint: mode == CoverMode::DisjointOnly,
    };
    let sets: Vec<u64> = coat.members().iter().map(|m| m.bits() as u64).collect();
    let mut search = CoverSearch::new(sets, qm.coat_weights(), constraints);
    let mut out = CheckOutcome::new("cover-subadditivity");
    for &x in coat.members() {
        let lhs = qm.ratio(x);
        match search.solve(x.bits() as u64) {
            Some(best) if best.cost < *lhs => {
                let mut sets = vec![("X", x.into())];
                sets.extend(best.chosen.iter().map(|&i| ("S", coat.get(i).into())));
                out.fail(Witness::new(
                    sets,
                    Violation::Exceeds {
                        lhs: lhs.clone(),
                        rhs: best.cost,
                    },
                ));
            }
            _ => out.pass(),
        }
    }
    out.with_note(format!(
        "covers: {}, at most {} members",
        mode.as_str(),
        max
    ))
}

/// Checks the five quasi-measure axioms: endpoint values, the splitting
/// identity, outer witnesses for `X ∩ Y` and `X ∩ 𝒞(Y)`, and finite cover
/// subadditivity. Failures are reported with witnesses, never raised.
pub fn check_axioms(
    qm: &QuasiMeasure,
    variant: Variant,
    cover_mode: CoverMode,
    max_cover_size: usize,
) -> AxiomReport {
    let candidates: &[SubsetMask] = match variant {
        Variant::Literal => qm.refinement().members(),
        Variant::Restricted => qm.coat().members(),
    };
    let mut report = AxiomReport::new("quasi-measure axioms");
    report.push(endpoints(qm));
    report.push(splitting(qm));
    report.push(outer_witness(
        qm,
        "meet-witness",
        "X&Y",
        candidates,
        |x, y| x.meet(y),
    ));
    report.push(outer_witness(
        qm,
        "diff-witness",
        "X&!Y",
        candidates,
        |x, y| x.minus(y),
    ));
    report.push(cover_subadditivity(qm, cover_mode, max_cover_size));
    report
}

/// The restricted axioms with every finite cover: the configuration the
/// extension pipeline relies on.
pub fn check_axioms_default(qm: &QuasiMeasure) -> AxiomReport {
    check_axioms(qm, Variant::Restricted, CoverMode::All, qm.coat().len())
}

fn monotone(qm: &QuasiMeasure, item: &'static str) -> CheckOutcome {
    let mut out = CheckOutcome::new(item);
    for (x, s) in qm.coat_pairs() {
        if !x.is_subset_of(s) {
            continue;
        }
        let (lhs, rhs) = (qm.ratio(x), qm.ratio(s));
        out.record(lhs <= rhs, || {
            Witness::new(
                vec![("X", x.into()), ("S", s.into())],
                Violation::Exceeds {
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                },
            )
        });
    }
    out
}

/// The alternative sufficient conditions: endpoints, monotonicity on the
/// coat, splitting, an inner `K` and outer `W` in the coat squeezing
/// `X ∩ Y` with equal values, and an outer `Z` in the coat for `X ∩ 𝒞(Y)`.
pub fn check_alt_conditions(qm: &QuasiMeasure) -> AxiomReport {
    let coat = qm.coat().members();
    let mut report = AxiomReport::new("alternative conditions");
    report.push(endpoints(qm));
    report.push(monotone(qm, "monotone"));
    report.push(splitting(qm));

    let mut squeeze = CheckOutcome::new("meet-squeeze");
    for (x, y) in qm.coat_pairs() {
        let target = x.meet(y);
        let value = qm.ratio(target);
        let inner = coat
            .iter()
            .any(|&k| k.is_subset_of(target) && qm.ratio(k) == value);
        let outer = coat
            .iter()
            .any(|&w| target.is_subset_of(w) && qm.ratio(w) == value);
        squeeze.record(inner && outer, || {
            Witness::new(
                vec![("X", x.into()), ("Y", y.into()), ("X&Y", target.into())],
                Violation::NoWitness {
                    value: value.clone(),
                },
            )
        });
    }
    report.push(squeeze);
    report.push(outer_witness(qm, "diff-witness", "X&!Y", coat, |x, y| {
        x.minus(y)
    }));
    report
}

/// Subadditivity for single-member covers, i.e. `p(X) ≤ p(S)` whenever
/// `X ⊆ S` in the coat. This is what the monotonicity condition buys.
pub fn monotonicity_note_check(qm: &QuasiMeasure) -> AxiomReport {
    let mut report = AxiomReport::new("singleton covers");
    report.push(monotone(qm, "singleton-cover"));
    report
}
