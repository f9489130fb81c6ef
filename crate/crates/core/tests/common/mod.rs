//! Brute-force oracles shared by the integration tests. They only use raw
//! bit masks and rationals, not the library's search or closure code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use quasi_measure::QuasiMeasure;

/// Coat members as raw bits with their values.
pub fn coat_weights(qm: &QuasiMeasure) -> Vec<(u32, BigRational)> {
    qm.coat()
        .members()
        .iter()
        .map(|&m| (m.bits(), qm.value_at(m).ratio().clone()))
        .collect()
}

/// Cheapest cover of `target` by enumerating every subcollection.
pub fn brute_outer(weights: &[(u32, BigRational)], target: u32) -> BigRational {
    let k = weights.len();
    assert!(k <= 20, "oracle enumerates 2^k subcollections");
    let mut best: Option<BigRational> = None;
    for pick in 0u32..(1u32 << k) {
        let mut union = 0u32;
        let mut cost = BigRational::zero();
        for (i, (bits, w)) in weights.iter().enumerate() {
            if pick >> i & 1 == 1 {
                union |= bits;
                cost += w;
            }
        }
        if union & target == target && best.as_ref().is_none_or(|b| cost < *b) {
            best = Some(cost);
        }
    }
    best.expect("omega covers everything")
}

/// Cheapest cover of every target in `0..2^n`.
pub fn brute_outer_table(qm: &QuasiMeasure) -> Vec<BigRational> {
    let weights = coat_weights(qm);
    (0u32..(1u32 << qm.ground().len()))
        .map(|t| brute_outer(&weights, t))
        .collect()
}

/// Closure of `family` under complement and pairwise union within `n` bits.
pub fn brute_algebra(family: &[u32], n: usize) -> BTreeSet<u32> {
    let full = (1u32 << n) - 1;
    let mut sets: BTreeSet<u32> = family.iter().copied().collect();
    sets.insert(0);
    sets.insert(full);
    loop {
        let current: Vec<u32> = sets.iter().copied().collect();
        let mut grew = false;
        for &a in &current {
            grew |= sets.insert(full & !a);
            for &b in &current {
                grew |= sets.insert(a | b);
            }
        }
        if !grew {
            return sets;
        }
    }
}
