//! Finite ground sets, subsets as bit masks, coats, refinements and
//! generated algebras.
//!
//! Element `i` of a [`GroundSet`] (in declaration order) is bit `i` of a
//! [`SubsetMask`]. "Mask order" everywhere in this crate means ascending
//! integer value of the bits.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Largest ground set accepted. Exhaustive loops over all subsets are
/// separately budgeted (see [`crate::Budget`]).
pub const MAX_GROUND: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyGround);
        }
        if labels.len() > MAX_GROUND {
            return Err(Error::GroundTooLarge {
                n: labels.len(),
                max: MAX_GROUND,
            });
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Ground set labelled `1..=n`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn empty(&self) -> SubsetMask {
        SubsetMask::empty(self.len())
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.len())
    }

    /// `Ω ∖ a`.
    pub fn complement(&self, a: SubsetMask) -> SubsetMask {
        debug_assert_eq!(a.width(), self.len());
        a.complement()
    }

    /// The subset holding exactly the given labels.
    pub fn subset<I, S>(&self, labels: I) -> Result<SubsetMask>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = 0u32;
        for label in labels {
            let label = label.as_ref();
            let i = self
                .position(label)
                .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
            bits |= 1 << i;
        }
        Ok(SubsetMask::from_bits(bits, self.len()))
    }

    /// Number of subsets, `2^n`.
    pub fn subset_count(&self) -> u64 {
        1u64 << self.len()
    }

    /// Every subset of the ground set, in mask order.
    pub fn subsets(&self) -> impl Iterator<Item = SubsetMask> {
        let width = self.len();
        (0..(1u64 << width)).map(move |b| SubsetMask::from_bits(b as u32, width))
    }

    /// Renders a subset as `{a,b,c}` using element labels.
    pub fn render(&self, mask: SubsetMask) -> String {
        let inner: Vec<&str> = mask.elements().map(|i| self.labels[i].as_str()).collect();
        format!("{{{}}}", inner.join(","))
    }
}

/// A subset of a ground set of `width` elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    bits: u32,
    width: u8,
}

impl SubsetMask {
    pub fn from_bits(bits: u32, width: usize) -> Self {
        assert!(width <= MAX_GROUND, "mask width {width} over cap");
        Self {
            bits: bits & Self::full_bits(width),
            width: width as u8,
        }
    }

    pub fn empty(width: usize) -> Self {
        Self::from_bits(0, width)
    }

    pub fn full(width: usize) -> Self {
        Self::from_bits(u32::MAX, width)
    }

    fn full_bits(width: usize) -> u32 {
        if width >= 32 {
            u32::MAX
        } else {
            (1u32 << width) - 1
        }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn is_full(self) -> bool {
        self.bits == Self::full_bits(self.width())
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(self, element: usize) -> bool {
        element < self.width() && self.bits & (1 << element) != 0
    }

    pub fn complement(self) -> Self {
        Self::from_bits(!self.bits, self.width())
    }

    /// Intersection.
    pub fn meet(self, other: Self) -> Self {
        debug_assert_eq!(self.width, other.width);
        Self {
            bits: self.bits & other.bits,
            ..self
        }
    }

    /// Union.
    pub fn join(self, other: Self) -> Self {
        debug_assert_eq!(self.width, other.width);
        Self {
            bits: self.bits | other.bits,
            ..self
        }
    }

    /// `self ∩ 𝒞(other)`.
    pub fn minus(self, other: Self) -> Self {
        debug_assert_eq!(self.width, other.width);
        Self {
            bits: self.bits & !other.bits,
            ..self
        }
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.bits & other.bits == 0
    }

    /// Element indices in ascending order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..self.width()).filter(move |i| bits & (1 << i) != 0)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.elements().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", inner.join(","))
    }
}

/// An indexed family of subsets that contains `∅` and `Ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coat {
    ground: GroundSet,
    members: Vec<SubsetMask>,
}

impl Coat {
    /// Validating constructor; member order is preserved.
    pub fn new(ground: GroundSet, members: Vec<SubsetMask>) -> Result<Self> {
        let mut seen = HashSet::new();
        for &m in &members {
            assert_eq!(
                m.width(),
                ground.len(),
                "mask width differs from ground set"
            );
            if !seen.insert(m) {
                return Err(Error::DuplicateCoatMember(ground.render(m)));
            }
        }
        if !seen.contains(&ground.empty()) {
            return Err(Error::CoatMissingEmpty);
        }
        if !seen.contains(&ground.full()) {
            return Err(Error::CoatMissingOmega);
        }
        Ok(Self { ground, members })
    }

    /// Builds a coat from arbitrary members: `∅` and `Ω` are put first and
    /// repeated masks are dropped (first occurrence wins).
    pub fn with_endpoints<I>(ground: GroundSet, members: I) -> Self
    where
        I: IntoIterator<Item = SubsetMask>,
    {
        let mut out = vec![ground.empty(), ground.full()];
        let mut seen: HashSet<SubsetMask> = out.iter().copied().collect();
        for m in members {
            assert_eq!(
                m.width(),
                ground.len(),
                "mask width differs from ground set"
            );
            if seen.insert(m) {
                out.push(m);
            }
        }
        Self {
            ground,
            members: out,
        }
    }

    /// The coat of every subset, in mask order.
    pub fn power_set(ground: GroundSet) -> Self {
        let members = ground.subsets().collect();
        Self { ground, members }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, index: usize) -> SubsetMask {
        self.members[index]
    }

    pub fn position(&self, mask: SubsetMask) -> Option<usize> {
        self.members.iter().position(|&m| m == mask)
    }

    pub fn contains(&self, mask: SubsetMask) -> bool {
        self.members.contains(&mask)
    }

    pub fn is_complement_closed(&self) -> bool {
        self.members.iter().all(|m| self.contains(m.complement()))
    }

    /// All `X ∩ Y` and `X ∩ 𝒞(Y)` for `X, Y` in the coat, keyed by mask.
    ///
    /// Coat members come first in coat order, followed by new masks in order
    /// of first formation. Every formation is kept as provenance.
    pub fn refine(&self) -> Refinement {
        let mut members: Vec<SubsetMask> = Vec::new();
        let mut provenance: Vec<Vec<Provenance>> = Vec::new();
        let mut index: HashMap<SubsetMask, usize> = HashMap::new();
        for &m in &self.members {
            index.insert(m, members.len());
            members.push(m);
            provenance.push(Vec::new());
        }
        for (i, &x) in self.members.iter().enumerate() {
            for (j, &y) in self.members.iter().enumerate() {
                for (kind, mask) in [(Formation::Meet, x.meet(y)), (Formation::Diff, x.minus(y))] {
                    let slot = *index.entry(mask).or_insert_with(|| {
                        members.push(mask);
                        provenance.push(Vec::new());
                        members.len() - 1
                    });
                    provenance[slot].push(Provenance {
                        left: i,
                        right: j,
                        kind,
                    });
                }
            }
        }
        Refinement {
            members,
            provenance,
            index,
        }
    }

    /// The smallest algebra containing the coat: closure under complement
    /// and pairwise union, iterated to a fixpoint.
    pub fn generate_algebra(&self) -> AlgebraFamily {
        let bound = self.ground.subset_count() as usize;
        let mut seen: HashSet<SubsetMask> = HashSet::new();
        let mut members: Vec<SubsetMask> = Vec::new();
        let mut frontier: Vec<SubsetMask> = Vec::new();
        let insert = |m: SubsetMask,
                      seen: &mut HashSet<SubsetMask>,
                      members: &mut Vec<SubsetMask>,
                      frontier: &mut Vec<SubsetMask>| {
            if seen.insert(m) {
                members.push(m);
                frontier.push(m);
            }
        };
        for &m in &self.members {
            insert(m, &mut seen, &mut members, &mut frontier);
        }
        while let Some(x) = frontier.pop() {
            insert(x.complement(), &mut seen, &mut members, &mut frontier);
            let mut i = 0;
            while i < members.len() {
                let u = members[i].join(x);
                insert(u, &mut seen, &mut members, &mut frontier);
                i += 1;
            }
            assert!(members.len() <= bound, "algebra larger than the power set");
        }
        AlgebraFamily::from_members(members)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formation {
    /// `Sᵢ ∩ Sⱼ`
    Meet,
    /// `Sᵢ ∩ 𝒞(Sⱼ)`
    Diff,
}

/// One way a refinement member arises from a pair of coat members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub left: usize,
    pub right: usize,
    pub kind: Formation,
}

impl Provenance {
    pub fn evaluate(&self, coat: &Coat) -> SubsetMask {
        let (x, y) = (coat.get(self.left), coat.get(self.right));
        match self.kind {
            Formation::Meet => x.meet(y),
            Formation::Diff => x.minus(y),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Refinement {
    members: Vec<SubsetMask>,
    provenance: Vec<Vec<Provenance>>,
    index: HashMap<SubsetMask, usize>,
}

impl Refinement {
    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, mask: SubsetMask) -> Option<usize> {
        self.index.get(&mask).copied()
    }

    pub fn contains(&self, mask: SubsetMask) -> bool {
        self.index.contains_key(&mask)
    }

    /// Witness records for the member at `index`. Empty only for coat
    /// members that are never formed, which cannot happen for a valid coat.
    pub fn provenance(&self, index: usize) -> &[Provenance] {
        &self.provenance[index]
    }
}

/// A family of subsets closed under complement and union, sorted in mask
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraFamily {
    members: Vec<SubsetMask>,
}

impl AlgebraFamily {
    fn from_members(mut members: Vec<SubsetMask>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, mask: SubsetMask) -> Option<usize> {
        self.members.binary_search(&mask).ok()
    }

    pub fn contains(&self, mask: SubsetMask) -> bool {
        self.position(mask).is_some()
    }

    /// Minimal nonempty members. Every member is a disjoint union of atoms.
    pub fn atoms(&self) -> Vec<SubsetMask> {
        self.members
            .iter()
            .copied()
            .filter(|m| !m.is_empty())
            .filter(|&m| {
                !self
                    .members
                    .iter()
                    .any(|&o| !o.is_empty() && o != m && o.is_subset_of(m))
            })
            .collect()
    }
}

/// Whether `family` contains `∅`, `Ω` and is closed under complement and
/// pairwise union (hence intersection).
pub fn is_algebra(family: &[SubsetMask], width: usize) -> bool {
    let set: HashSet<SubsetMask> = family.iter().copied().collect();
    set.contains(&SubsetMask::empty(width))
        && set.contains(&SubsetMask::full(width))
        && family.iter().all(|m| set.contains(&m.complement()))
        && family
            .iter()
            .all(|&a| family.iter().all(|&b| set.contains(&a.join(b))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ground4() -> GroundSet {
        GroundSet::numbered(4).unwrap()
    }

    fn sets(g: &GroundSet, lists: &[&[&str]]) -> Vec<SubsetMask> {
        lists.iter().map(|l| g.subset(l.iter()).unwrap()).collect()
    }

    fn two_overlap_coat() -> Coat {
        let g = ground4();
        let members = sets(&g, &[&[], &["1", "2", "3", "4"], &["1", "2"], &["2", "3"]]);
        Coat::new(g, members).unwrap()
    }

    #[test]
    fn complement_examples() {
        let g = ground4();
        assert_eq!(g.complement(g.empty()), g.full());
        assert_eq!(
            g.complement(g.subset(["1", "2"]).unwrap()),
            g.subset(["3", "4"]).unwrap()
        );
        assert_eq!(
            g.complement(g.subset(["2", "3"]).unwrap()),
            g.subset(["1", "4"]).unwrap()
        );
    }

    #[test]
    fn ground_rejects_bad_labels() {
        assert_eq!(
            GroundSet::new(Vec::<String>::new()),
            Err(Error::EmptyGround)
        );
        assert_eq!(
            GroundSet::new(["a", "b", "a"]),
            Err(Error::DuplicateLabel("a".into()))
        );
        assert!(matches!(
            GroundSet::numbered(25),
            Err(Error::GroundTooLarge { n: 25, .. })
        ));
        assert!(GroundSet::numbered(24).is_ok());
    }

    #[test]
    fn coat_requires_endpoints() {
        let g = ground4();
        let a = g.subset(["1"]).unwrap();
        assert_eq!(
            Coat::new(g.clone(), vec![g.full(), a]),
            Err(Error::CoatMissingEmpty)
        );
        assert_eq!(
            Coat::new(g.clone(), vec![g.empty(), a]),
            Err(Error::CoatMissingOmega)
        );
        assert!(matches!(
            Coat::new(g.clone(), vec![g.empty(), g.full(), a, a]),
            Err(Error::DuplicateCoatMember(_))
        ));
    }

    #[test]
    fn refine_trivial_coat() {
        let g = ground4();
        let coat = Coat::new(g.clone(), vec![g.empty(), g.full()]).unwrap();
        let r = coat.refine();
        assert_eq!(r.members(), &[g.empty(), g.full()]);
    }

    #[test]
    fn refine_two_overlapping_sets() {
        let coat = two_overlap_coat();
        let g = coat.ground().clone();
        let r = coat.refine();
        let got: HashSet<SubsetMask> = r.members().iter().copied().collect();
        let want: HashSet<SubsetMask> = sets(
            &g,
            &[
                &[],
                &["1", "2", "3", "4"],
                &["1", "2"],
                &["2", "3"],
                &["2"],
                &["1"],
                &["3"],
                &["3", "4"],
                &["1", "4"],
            ],
        )
        .into_iter()
        .collect();
        assert_eq!(got, want);
        assert_eq!(r.len(), 9);
        for (i, &m) in r.members().iter().enumerate() {
            assert!(!r.provenance(i).is_empty());
            for p in r.provenance(i) {
                assert_eq!(p.evaluate(&coat), m);
            }
        }
    }

    #[test]
    fn refine_single_proper_set() {
        let g = GroundSet::numbered(2).unwrap();
        let a = g.subset(["1"]).unwrap();
        let coat = Coat::new(g.clone(), vec![g.empty(), g.full(), a]).unwrap();
        let got: HashSet<SubsetMask> = coat.refine().members().iter().copied().collect();
        let want: HashSet<SubsetMask> = [g.empty(), g.full(), a, g.subset(["2"]).unwrap()]
            .into_iter()
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn algebra_examples() {
        let g = ground4();
        let trivial = Coat::new(g.clone(), vec![g.empty(), g.full()]).unwrap();
        assert_eq!(trivial.generate_algebra().members(), &[g.empty(), g.full()]);

        let alg = two_overlap_coat().generate_algebra();
        assert_eq!(alg.len(), 16);
        assert_eq!(alg.atoms().len(), 4);

        let g3 = GroundSet::numbered(3).unwrap();
        let one = g3.subset(["1"]).unwrap();
        let coat = Coat::new(g3.clone(), vec![g3.empty(), g3.full(), one]).unwrap();
        assert_eq!(
            coat.generate_algebra().members(),
            &[g3.empty(), one, g3.subset(["2", "3"]).unwrap(), g3.full()]
        );
    }

    #[test]
    fn render_uses_labels() {
        let g = GroundSet::new(["a", "b", "c"]).unwrap();
        assert_eq!(g.render(g.subset(["c", "a"]).unwrap()), "{a,c}");
        assert_eq!(g.render(g.empty()), "{}");
    }
}
