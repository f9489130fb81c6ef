//! Exterior quasi-measure as an exact minimum-weight set cover.
//!
//! The exterior value of `A` is the cheapest total value of a finite
//! subcollection of the coat whose union contains `A`. With finitely many
//! coat members the infimum is a minimum, so every answer carries a
//! witness cover.
//!
//! Ties between optimal covers are broken by fewer members, then by the
//! lexicographically smallest ascending list of coat indices.

use std::collections::{BTreeMap, HashMap};
use std::ops::Add;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quasi::{check_axioms, CoverMode, QuasiMeasure, Variant};
use crate::report::{AxiomReport, CheckOutcome, Violation, Witness};
use crate::set::{SubsetMask, MAX_GROUND};
use crate::value::QValue;

/// Largest coat accepted by [`outer_exhaustive`].
pub const MAX_ENUMERATED_COAT: usize = 20;

/// Seed of the subset sampler used when a quantifier is too large to
/// exhaust.
pub const SAMPLE_SEED: u64 = 0x005e_ed0f_0ca7;

/// Costs the cover search can minimise: exact rationals or floats.
pub trait CoverCost: Clone + PartialOrd + Add<Output = Self> + Zero {}

impl<T: Clone + PartialOrd + Add<Output = T> + Zero> CoverCost for T {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSolution<C = BigRational> {
    /// Coat indices, ascending, without repeats.
    pub chosen: Vec<usize>,
    pub cost: C,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoverConstraints {
    pub max_members: Option<usize>,
    pub pairwise_disjoint: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Key {
    pos: usize,
    uncovered: u64,
    used: u64,
    budget: usize,
}

#[derive(Debug, Clone)]
struct Node<C> {
    cost: C,
    count: usize,
    include: bool,
}

/// Exact minimum-weight cover search over bit-mask sets.
///
/// Members are decided in index order (take, then skip). Branches whose
/// remaining members cannot cover the uncovered elements are cut, and the
/// best completion of each `(position, uncovered)` state is memoised, so
/// one search answers many targets.
#[derive(Debug, Clone)]
pub struct CoverSearch<C> {
    sets: Vec<u64>,
    weights: Vec<C>,
    suffix: Vec<u64>,
    constraints: CoverConstraints,
    memo: HashMap<Key, Option<Node<C>>>,
}

impl<C: CoverCost> CoverSearch<C> {
    pub fn new(sets: Vec<u64>, weights: Vec<C>, constraints: CoverConstraints) -> Self {
        assert_eq!(sets.len(), weights.len());
        let mut suffix = vec![0u64; sets.len() + 1];
        for i in (0..sets.len()).rev() {
            suffix[i] = suffix[i + 1] | sets[i];
        }
        Self {
            sets,
            weights,
            suffix,
            constraints,
            memo: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Cheapest admissible cover of `target`, or `None` if none exists.
    pub fn solve(&mut self, target: u64) -> Option<CoverSolution<C>> {
        let budget = self.constraints.max_members.unwrap_or(usize::MAX);
        let mut key = Key {
            pos: 0,
            uncovered: target,
            used: 0,
            budget,
        };
        let root = self.best(key)?;
        let mut chosen = Vec::with_capacity(root.count);
        while key.uncovered != 0 {
            let node = self.best(key).expect("memoised path is feasible");
            if node.include {
                chosen.push(key.pos);
                key = self.take(key);
            } else {
                key = self.skip(key);
            }
        }
        Some(CoverSolution {
            chosen,
            cost: root.cost,
        })
    }

    fn take(&self, key: Key) -> Key {
        let set = self.sets[key.pos];
        Key {
            pos: key.pos + 1,
            uncovered: key.uncovered & !set,
            used: if self.constraints.pairwise_disjoint {
                key.used | set
            } else {
                0
            },
            budget: key.budget.saturating_sub(1),
        }
    }

    fn skip(&self, key: Key) -> Key {
        Key {
            pos: key.pos + 1,
            ..key
        }
    }

    fn best(&mut self, key: Key) -> Option<Node<C>> {
        if key.uncovered == 0 {
            return Some(Node {
                cost: C::zero(),
                count: 0,
                include: false,
            });
        }
        if key.budget == 0 || self.suffix[key.pos] & key.uncovered != key.uncovered {
            return None;
        }
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let set = self.sets[key.pos];
        let usable = set & key.uncovered != 0
            && !(self.constraints.pairwise_disjoint && set & key.used != 0);
        let take = if usable {
            self.best(self.take(key)).map(|sub| Node {
                cost: self.weights[key.pos].clone() + sub.cost,
                count: sub.count + 1,
                include: true,
            })
        } else {
            None
        };
        let skip = self.best(self.skip(key)).map(|sub| Node {
            include: false,
            ..sub
        });
        // a taken index sorts before every list that skips it, so it wins
        // ties on (cost, count)
        let best = match (take, skip) {
            (Some(t), Some(s)) => {
                if better(&s, &t) {
                    Some(s)
                } else {
                    Some(t)
                }
            }
            (t, s) => t.or(s),
        };
        self.memo.insert(key, best.clone());
        best
    }
}

fn better<C: PartialOrd>(a: &Node<C>, b: &Node<C>) -> bool {
    match a.cost.partial_cmp(&b.cost) {
        Some(std::cmp::Ordering::Less) => true,
        Some(std::cmp::Ordering::Equal) => a.count < b.count,
        _ => false,
    }
}

/// Memo of solved targets for one quasi-measure.
#[derive(Debug, Clone, Default)]
pub struct OuterMeasureCache {
    binding: Option<Vec<(SubsetMask, BigRational)>>,
    search: Option<CoverSearch<BigRational>>,
    solved: BTreeMap<SubsetMask, CoverSolution>,
}

impl OuterMeasureCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.solved.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solved.is_empty()
    }

    /// Cached solutions in mask order.
    pub fn entries(&self) -> impl Iterator<Item = (&SubsetMask, &CoverSolution)> {
        self.solved.iter()
    }

    fn bind(&mut self, qm: &QuasiMeasure) {
        let fingerprint: Vec<(SubsetMask, BigRational)> = qm
            .coat()
            .members()
            .iter()
            .map(|&m| (m, qm.value_at(m).ratio().clone()))
            .collect();
        match &self.binding {
            Some(b) => assert!(
                *b == fingerprint,
                "OuterMeasureCache reused with a different quasi-measure"
            ),
            None => {
                let sets = fingerprint.iter().map(|(m, _)| m.bits() as u64).collect();
                let weights = fingerprint.iter().map(|(_, w)| w.clone()).collect();
                self.search = Some(CoverSearch::new(sets, weights, CoverConstraints::default()));
                self.binding = Some(fingerprint);
            }
        }
    }
}

/// Exterior value of `a` with an optimal cover.
pub fn outer(
    qm: &QuasiMeasure,
    a: SubsetMask,
    cache: &mut OuterMeasureCache,
) -> (QValue, CoverSolution) {
    cache.bind(qm);
    let solution = match cache.solved.get(&a) {
        Some(s) => s.clone(),
        None => {
            let search = cache.search.as_mut().expect("bound above");
            let s = search
                .solve(a.bits() as u64)
                .expect("omega is in every coat, so a cover exists");
            cache.solved.insert(a, s.clone());
            s
        }
    };
    let value = QValue::new(solution.cost.clone()).expect("cheapest cover costs at most p(omega)");
    (value, solution)
}

/// Same contract as [`outer`], by enumerating all `2^|coat|`
/// subcollections. Used as an independent oracle.
pub fn outer_exhaustive(qm: &QuasiMeasure, a: SubsetMask) -> Result<(QValue, CoverSolution)> {
    let members = qm.coat().members();
    if members.len() > MAX_ENUMERATED_COAT {
        return Err(Error::CoatTooLarge {
            size: members.len(),
            max: MAX_ENUMERATED_COAT,
        });
    }
    let weights = qm.coat_weights();
    let mut best: Option<(BigRational, Vec<usize>)> = None;
    for pick in 0u64..(1u64 << members.len()) {
        let chosen: Vec<usize> = (0..members.len())
            .filter(|i| pick & (1 << i) != 0)
            .collect();
        let union = chosen
            .iter()
            .fold(SubsetMask::empty(a.width()), |u, &i| u.join(members[i]));
        if !a.is_subset_of(union) {
            continue;
        }
        let cost = chosen
            .iter()
            .fold(BigRational::zero(), |acc, &i| acc + &weights[i]);
        let wins = match &best {
            None => true,
            Some((c, l)) => (&cost, chosen.len(), &chosen) < (c, l.len(), l),
        };
        if wins {
            best = Some((cost, chosen));
        }
    }
    let (cost, chosen) = best.expect("omega covers everything");
    let value = QValue::new(cost.clone()).expect("cheapest cover costs at most p(omega)");
    Ok((value, CoverSolution { chosen, cost }))
}

/// Exterior values of every subset, indexed by mask bits.
pub fn outer_table(qm: &QuasiMeasure, cache: &mut OuterMeasureCache) -> Vec<BigRational> {
    qm.ground()
        .subsets()
        .map(|a| outer(qm, a, cache).0.into_ratio())
        .collect()
}

/// Combinations of unordered triples `(i ≤ j ≤ k)` evaluated exhaustively
/// before switching to sampling.
const TRIPLE_BUDGET: u64 = 4_000_000;

/// Checks the exterior-measure properties: endpoints, nonnegativity,
/// monotonicity, agreement with the quasi-measure on the coat, and finite
/// subadditivity over pairs and triples.
///
/// Quantifiers run over all `2^n` subsets when `2^n ≤ subset_budget` and
/// over a sample of `subset_budget` draws from [`SAMPLE_SEED`] otherwise.
pub fn check_outer_properties(qm: &QuasiMeasure, subset_budget: u64) -> AxiomReport {
    let g = qm.ground();
    let n = g.len();
    let mut cache = OuterMeasureCache::new();
    let mut report = AxiomReport::new("exterior measure");
    let exhaustive = g.subset_count() <= subset_budget && n <= MAX_GROUND;
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let draw = |rng: &mut ChaCha8Rng| SubsetMask::from_bits(rng.gen::<u32>(), n);

    let table: Option<Vec<BigRational>> = exhaustive.then(|| outer_table(qm, &mut cache));
    let value = |a: SubsetMask, cache: &mut OuterMeasureCache| -> BigRational {
        match &table {
            Some(t) => t[a.bits() as usize].clone(),
            None => outer(qm, a, cache).0.into_ratio(),
        }
    };
    let sample_note = format!("sampled {subset_budget} draws, seed {SAMPLE_SEED:#x}");
    let mark = |o: CheckOutcome, exhaustive: bool| {
        if exhaustive {
            o
        } else {
            o.sampled().with_note(sample_note.clone())
        }
    };

    let mut ends = CheckOutcome::new("endpoints");
    for (a, want) in [
        (g.empty(), BigRational::zero()),
        (g.full(), num_traits::One::one()),
    ] {
        let got = value(a, &mut cache);
        ends.record(got == want, || {
            Witness::new(
                vec![("A", a.into())],
                Violation::NotEqual {
                    lhs: got.clone(),
                    rhs: want,
                },
            )
        });
    }
    report.push(ends);

    let subsets: Vec<SubsetMask> = if exhaustive {
        g.subsets().collect()
    } else {
        (0..subset_budget).map(|_| draw(&mut rng)).collect()
    };

    let mut nonneg = CheckOutcome::new("nonnegative");
    for &a in &subsets {
        let v = value(a, &mut cache);
        nonneg.record(v >= BigRational::zero(), || {
            Witness::new(
                vec![("A", a.into())],
                Violation::Exceeds {
                    lhs: BigRational::zero(),
                    rhs: v.clone(),
                },
            )
        });
    }
    report.push(mark(nonneg, exhaustive));

    let mut mono = CheckOutcome::new("monotone");
    let check_pair =
        |a: SubsetMask, b: SubsetMask, mono: &mut CheckOutcome, cache: &mut OuterMeasureCache| {
            let (va, vb) = (value(a, cache), value(b, cache));
            mono.record(va <= vb, || {
                Witness::new(
                    vec![("A", a.into()), ("B", b.into())],
                    Violation::Exceeds {
                        lhs: va.clone(),
                        rhs: vb.clone(),
                    },
                )
            });
        };
    if exhaustive {
        for b in g.subsets() {
            // every submask of b
            let mut sub = b.bits();
            loop {
                check_pair(SubsetMask::from_bits(sub, n), b, &mut mono, &mut cache);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & b.bits();
            }
        }
    } else {
        for _ in 0..subset_budget {
            let b = draw(&mut rng);
            let a = b.meet(draw(&mut rng));
            check_pair(a, b, &mut mono, &mut cache);
        }
    }
    report.push(mark(mono, exhaustive));

    let precondition = check_axioms(qm, Variant::Literal, CoverMode::All, qm.coat().len());
    let cover_ok = precondition
        .item("cover-subadditivity")
        .map(CheckOutcome::passed)
        .unwrap_or(false);
    let mut agree = CheckOutcome::new("agrees-on-coat");
    if cover_ok {
        for &x in qm.coat().members() {
            let got = value(x, &mut cache);
            let want = qm.value_at(x).ratio().clone();
            agree.record(got == want, || {
                Witness::new(
                    vec![("X", x.into())],
                    Violation::NotEqual {
                        lhs: got.clone(),
                        rhs: want,
                    },
                )
            });
        }
        report.push(agree.with_note("precondition: cover subadditivity holds"));
    } else {
        report.push(agree.not_applicable("precondition failed: cover subadditivity does not hold"));
    }

    let mut sub = CheckOutcome::new("subadditive");
    let check_union =
        |parts: &[SubsetMask], sub: &mut CheckOutcome, cache: &mut OuterMeasureCache| {
            let union = parts.iter().fold(g.empty(), |u, &p| u.join(p));
            let lhs = value(union, cache);
            let rhs = parts
                .iter()
                .fold(BigRational::zero(), |acc, &p| acc + value(p, cache));
            sub.record(lhs <= rhs, || {
                Witness::new(
                    parts.iter().map(|&p| ("A", p.into())).collect(),
                    Violation::Exceeds {
                        lhs: lhs.clone(),
                        rhs: rhs.clone(),
                    },
                )
            });
        };
    let count = subsets.len() as u64;
    let triples_exhaustive = exhaustive && count * count * count / 6 <= TRIPLE_BUDGET;
    if exhaustive {
        for i in 0..subsets.len() {
            for j in i..subsets.len() {
                check_union(&[subsets[i], subsets[j]], &mut sub, &mut cache);
            }
        }
    } else {
        for _ in 0..subset_budget {
            let parts = [draw(&mut rng), draw(&mut rng)];
            check_union(&parts, &mut sub, &mut cache);
        }
    }
    if triples_exhaustive {
        for i in 0..subsets.len() {
            for j in i..subsets.len() {
                for k in j..subsets.len() {
                    check_union(&[subsets[i], subsets[j], subsets[k]], &mut sub, &mut cache);
                }
            }
        }
        report.push(sub);
    } else {
        let draws = subset_budget.min(TRIPLE_BUDGET);
        for _ in 0..draws {
            let parts = [draw(&mut rng), draw(&mut rng), draw(&mut rng)];
            check_union(&parts, &mut sub, &mut cache);
        }
        let note = format!("triples sampled ({draws} draws, seed {SAMPLE_SEED:#x})");
        report.push(sub.sampled().with_note(note));
    }
    report
}
