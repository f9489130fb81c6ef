//! Instance generators, ground-truth measures and the theorem search
//! harness.

use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::extension::{extend, verify_premeasure};
use crate::quasi::{check_axioms, CoverMode, QuasiMeasure, Variant};
use crate::set::{Coat, GroundSet, SubsetMask};
use crate::value::QValue;

/// Default bound on weight denominators.
pub const DEFAULT_DENOMINATOR_BOUND: u64 = 64;

/// A probability measure on a finite ground set given by atom weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrueMeasure {
    ground: GroundSet,
    weights: Vec<QValue>,
}

impl TrueMeasure {
    pub fn new(ground: GroundSet, weights: Vec<QValue>) -> Result<Self> {
        if weights.len() != ground.len() {
            return Err(Error::EndpointValue(format!(
                "{} weights for {} atoms",
                weights.len(),
                ground.len()
            )));
        }
        let total = weights
            .iter()
            .fold(BigRational::zero(), |acc, w| acc + w.ratio());
        if !total.is_one() {
            return Err(Error::EndpointValue(format!(
                "atom weights sum to {}",
                crate::value::format_ratio(&total)
            )));
        }
        Ok(Self { ground, weights })
    }

    pub fn uniform(ground: GroundSet) -> Self {
        let n = ground.len() as i64;
        let weights = vec![QValue::from_ints(1, n).expect("1/n is a probability"); ground.len()];
        Self { ground, weights }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn weights(&self) -> &[QValue] {
        &self.weights
    }

    pub fn measure(&self, mask: SubsetMask) -> BigRational {
        mask.elements()
            .fold(BigRational::zero(), |acc, i| acc + self.weights[i].ratio())
    }
}

/// Restriction of a true measure to the refinement of `coat`.
pub fn induce(tm: &TrueMeasure, coat: &Coat) -> QuasiMeasure {
    assert_eq!(
        tm.ground(),
        coat.ground(),
        "measure and coat disagree on the ground set"
    );
    QuasiMeasure::from_fn(coat.clone(), |m| {
        QValue::new(tm.measure(m)).expect("sub-probability of a probability measure")
    })
    .expect("a probability measure has the endpoint values")
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize, denominator_bound: u64) -> Vec<QValue> {
    let denom = rng.gen_range(1..=denominator_bound.max(1));
    let mut cuts: Vec<u64> = (0..n - 1).map(|_| rng.gen_range(0..=denom)).collect();
    cuts.push(0);
    cuts.push(denom);
    cuts.sort_unstable();
    cuts.windows(2)
        .map(|w| {
            QValue::new(BigRational::new(
                BigInt::from(w[1] - w[0]),
                BigInt::from(denom),
            ))
            .expect("parts of a unit")
        })
        .collect()
}

fn random_measure(rng: &mut ChaCha8Rng, ground: &GroundSet, bound: u64) -> TrueMeasure {
    let weights = random_weights(rng, ground.len(), bound);
    TrueMeasure::new(ground.clone(), weights).expect("weights sum to one")
}

fn random_coat(rng: &mut ChaCha8Rng, ground: &GroundSet, coat_size: usize) -> Coat {
    let total = ground.subset_count() as usize;
    let target = coat_size.clamp(2, total);
    let mut proper: Vec<u32> = (1..(total as u32 - 1)).collect();
    proper.shuffle(rng);
    let picks = proper
        .into_iter()
        .take(target - 2)
        .map(|b| SubsetMask::from_bits(b, ground.len()));
    Coat::with_endpoints(ground.clone(), picks)
}

/// Deterministic random instance: ground set `1..=n`, atom weights with
/// denominator at most `weight_denominator_bound`, a coat of `coat_size`
/// members (capped by `2^n`, always holding `∅` and `Ω`), and the induced
/// quasi-measure.
pub fn random_instance(
    seed: u64,
    n: usize,
    coat_size: usize,
    weight_denominator_bound: u64,
) -> (TrueMeasure, Coat, QuasiMeasure) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ground = GroundSet::numbered(n).expect("n within caps");
    let tm = random_measure(&mut rng, &ground, weight_denominator_bound);
    let coat = random_coat(&mut rng, &ground, coat_size);
    let qm = induce(&tm, &coat);
    (tm, coat, qm)
}

/// Power-set coat with random exact weights.
pub fn random_power_set_instance(seed: u64, n: usize) -> (TrueMeasure, QuasiMeasure) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ground = GroundSet::numbered(n).expect("n within caps");
    let tm = random_measure(&mut rng, &ground, DEFAULT_DENOMINATOR_BOUND);
    let qm = induce(&tm, &Coat::power_set(ground));
    (tm, qm)
}

/// Shapes of generated instances in the search corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Random coat, random weights.
    RandomCoat,
    /// Coat made of every union of the blocks of a random partition.
    BlockAlgebra,
    /// Random coat, weight on at most two atoms.
    Sparse,
    /// Induced values with one non-endpoint refinement value replaced.
    Perturbed,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::RandomCoat,
        Family::BlockAlgebra,
        Family::Sparse,
        Family::Perturbed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::RandomCoat => "random-coat",
            Family::BlockAlgebra => "block-algebra",
            Family::Sparse => "sparse",
            Family::Perturbed => "perturbed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub seed: u64,
    pub family: Family,
    /// Ground truth when the values are induced.
    pub true_measure: Option<TrueMeasure>,
    pub quasi: QuasiMeasure,
}

/// Caps for [`corpus_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusCaps {
    pub max_n: usize,
    pub max_coat: usize,
    pub denominator_bound: u64,
}

impl Default for CorpusCaps {
    fn default() -> Self {
        Self {
            max_n: 5,
            max_coat: 8,
            denominator_bound: DEFAULT_DENOMINATOR_BOUND,
        }
    }
}

fn block_algebra(rng: &mut ChaCha8Rng, ground: &GroundSet, max_coat: usize) -> Coat {
    let n = ground.len();
    let mut max_blocks = 1;
    while max_blocks < n && (1usize << (max_blocks + 1)) <= max_coat {
        max_blocks += 1;
    }
    let blocks = rng.gen_range(1..=max_blocks);
    let mut owner: Vec<usize> = (0..n).map(|i| i % blocks).collect();
    owner.shuffle(rng);
    let block_masks: Vec<SubsetMask> = (0..blocks)
        .map(|b| {
            let bits = owner
                .iter()
                .enumerate()
                .filter(|(_, &o)| o == b)
                .fold(0u32, |acc, (i, _)| acc | (1 << i));
            SubsetMask::from_bits(bits, n)
        })
        .collect();
    let unions = (0u32..(1 << blocks)).map(|pick| {
        block_masks
            .iter()
            .enumerate()
            .filter(|(b, _)| pick & (1 << b) != 0)
            .fold(ground.empty(), |u, (_, &m)| u.join(m))
    });
    Coat::with_endpoints(ground.clone(), unions)
}

fn sparse_measure(rng: &mut ChaCha8Rng, ground: &GroundSet, bound: u64) -> TrueMeasure {
    let n = ground.len();
    let mut weights = vec![QValue::zero(); n];
    let first = rng.gen_range(0..n);
    let second = rng.gen_range(0..n);
    if first == second {
        weights[first] = QValue::one();
    } else {
        let denom = rng.gen_range(2..=bound.max(2)) as i64;
        let part = rng.gen_range(1..denom);
        weights[first] = QValue::from_ints(part, denom).expect("proper fraction");
        weights[second] = QValue::from_ints(denom - part, denom).expect("proper fraction");
    }
    TrueMeasure::new(ground.clone(), weights).expect("weights sum to one")
}

fn perturb(rng: &mut ChaCha8Rng, qm: &QuasiMeasure, bound: u64) -> QuasiMeasure {
    let candidates: Vec<SubsetMask> = qm
        .refinement()
        .members()
        .iter()
        .copied()
        .filter(|m| !m.is_empty() && !m.is_full())
        .collect();
    let Some(&victim) = candidates.choose(rng) else {
        return qm.clone();
    };
    let denom = rng.gen_range(1..=bound.max(1)) as i64;
    let numer = rng.gen_range(0..=denom);
    let replacement = QValue::from_ints(numer, denom).expect("within [0,1]");
    QuasiMeasure::from_fn(qm.coat().clone(), |m| {
        if m == victim {
            replacement.clone()
        } else {
            qm.value_at(m).clone()
        }
    })
    .expect("endpoints untouched")
}

/// The corpus member for `seed`: the family cycles with the seed, the rest
/// is drawn from a generator seeded by it.
pub fn corpus_instance(seed: u64, caps: CorpusCaps) -> Instance {
    let family = Family::ALL[(seed % Family::ALL.len() as u64) as usize];
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ 0xc0a7);
    let n = rng.gen_range(1..=caps.max_n.max(1));
    let ground = GroundSet::numbered(n).expect("n within caps");
    let coat_size = rng.gen_range(2..=caps.max_coat.max(2));
    let (tm, coat) = match family {
        Family::BlockAlgebra => {
            let coat = block_algebra(&mut rng, &ground, caps.max_coat);
            (
                random_measure(&mut rng, &ground, caps.denominator_bound),
                coat,
            )
        }
        Family::Sparse => {
            let coat = random_coat(&mut rng, &ground, coat_size);
            (
                sparse_measure(&mut rng, &ground, caps.denominator_bound),
                coat,
            )
        }
        Family::RandomCoat | Family::Perturbed => {
            let coat = random_coat(&mut rng, &ground, coat_size);
            (
                random_measure(&mut rng, &ground, caps.denominator_bound),
                coat,
            )
        }
    };
    let induced = induce(&tm, &coat);
    let (true_measure, quasi) = if family == Family::Perturbed {
        (None, perturb(&mut rng, &induced, caps.denominator_bound))
    } else {
        (Some(tm), induced)
    };
    Instance {
        seed,
        family,
        true_measure,
        quasi,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchSummary {
    pub instances: u64,
    pub axioms_pass: u64,
    pub axioms_fail: u64,
    /// Passing instances whose extension verified as a pre-measure.
    pub premeasure_verified: u64,
    /// Seeds of passing instances whose extension failed verification.
    pub counterexamples: Vec<u64>,
    /// Failing instances whose extension also failed verification.
    pub fail_with_additivity_failure: u64,
}

impl SearchSummary {
    pub fn merge(mut self, other: SearchSummary) -> SearchSummary {
        self.instances += other.instances;
        self.axioms_pass += other.axioms_pass;
        self.axioms_fail += other.axioms_fail;
        self.premeasure_verified += other.premeasure_verified;
        self.counterexamples.extend(other.counterexamples);
        self.fail_with_additivity_failure += other.fail_with_additivity_failure;
        self
    }
}

/// Partitions the corpus over `seeds` by whether the axioms (under
/// `filter`) hold, extends every instance, and verifies the extension.
pub fn search_theorem_instances(seeds: Range<u64>, filter: Variant) -> SearchSummary {
    search_with_caps(seeds, filter, CorpusCaps::default())
}

pub fn search_with_caps(seeds: Range<u64>, filter: Variant, caps: CorpusCaps) -> SearchSummary {
    let mut summary = SearchSummary::default();
    for seed in seeds {
        let inst = corpus_instance(seed, caps);
        let qm = &inst.quasi;
        let axioms = check_axioms(qm, filter, CoverMode::All, qm.coat().len());
        let verified = verify_premeasure(&extend(qm)).passed();
        summary.instances += 1;
        if axioms.passed() {
            summary.axioms_pass += 1;
            if verified {
                summary.premeasure_verified += 1;
            } else {
                summary.counterexamples.push(seed);
            }
        } else {
            summary.axioms_fail += 1;
            if !verified {
                summary.fail_with_additivity_failure += 1;
            }
        }
    }
    summary
}
