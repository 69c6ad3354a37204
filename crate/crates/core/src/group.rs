//! Conjugation-invariant word norms on small permutation groups.
//!
//! Groups are stored as the full, lexicographically sorted list of their
//! elements. Every norm here is a breadth-first distance in a Cayley graph
//! whose generating set is closed under inversion and conjugation, so the
//! resulting tables can be checked exhaustively against the norm axioms.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

/// Largest supported permutation degree.
pub const MAX_DEGREE: usize = 12;
/// Largest group that `generate` will enumerate.
pub const MAX_ORDER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("group closure exceeds {cap} elements")]
    ClosureTooLarge { cap: usize },
    #[error("degree {0} is outside 1..={MAX_DEGREE}")]
    DegreeOutOfRange(usize),
    #[error("permutation degree {found} does not match group degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("not a permutation: {0}")]
    InvalidPermutation(String),
    #[error("{0} is not an element of the group")]
    NotAMember(String),
    #[error("generating set is not closed under inversion")]
    NotSymmetric,
    #[error("generating set is not closed under conjugation")]
    NotConjInvariant,
    #[error("zeta norm needs a non-identity element")]
    IdentityGenerator,
    #[error("quotient norm needs a non-empty subset")]
    EmptySubset,
    #[error("the trivial group has no proper normal subgroup structure to report")]
    TrivialGroup,
    #[error("subgroup is not normal")]
    NotNormal,
}

/// A permutation of `{0, …, n-1}` stored as its image array.
///
/// Products compose right to left: `(g * h)(x) = g(h(x))`. The derived
/// ordering is lexicographic on the image array, which is the canonical
/// element order used everywhere in this module.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation((0..degree as u8).collect())
    }

    pub fn from_images(images: &[usize]) -> Result<Self, GroupError> {
        let n = images.len();
        if n == 0 || n > MAX_DEGREE {
            return Err(GroupError::DegreeOutOfRange(n));
        }
        let mut seen = [false; MAX_DEGREE];
        for &i in images {
            if i >= n || seen[i] {
                return Err(GroupError::InvalidPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images.iter().map(|&i| i as u8).collect()))
    }

    /// Builds a permutation from disjoint-or-not cycles, applied right to left.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self, GroupError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(GroupError::DegreeOutOfRange(degree));
        }
        let mut p = Permutation::identity(degree);
        for cycle in cycles.iter().rev() {
            let mut images: Vec<usize> = (0..degree).collect();
            let mut seen = HashSet::new();
            for (k, &a) in cycle.iter().enumerate() {
                if a >= degree || !seen.insert(a) {
                    return Err(GroupError::InvalidPermutation(format!("{cycle:?}")));
                }
                images[a] = cycle[(k + 1) % cycle.len()];
            }
            p = Permutation::from_images(&images)?.compose(&p);
        }
        Ok(p)
    }

    /// Parses cycle notation such as `"(0 1 2)(3 4)"`; `"()"` and `"e"` are the identity.
    pub fn parse_cycles(degree: usize, s: &str) -> Result<Self, GroupError> {
        let bad = || GroupError::InvalidPermutation(s.to_string());
        let t = s.trim();
        if t == "e" {
            return Permutation::from_cycles(degree, &[]);
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let cycle = body[..close]
                .split(|c: char| c == ' ' || c == ',')
                .filter(|w| !w.is_empty())
                .map(|w| w.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = body[close + 1..].trim_start();
        }
        let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
        Permutation::from_cycles(degree, &refs)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Permutation(inv)
    }

    /// `h self h⁻¹`.
    pub fn conjugate_by(&self, h: &Permutation) -> Permutation {
        h.compose(self).compose(&h.inverse())
    }

    /// `[self, other] = self other self⁻¹ other⁻¹`.
    pub fn commutator(&self, other: &Permutation) -> Permutation {
        self.compose(other).compose(&self.inverse()).compose(&other.inverse())
    }

    /// Cycles of length ≥ 2, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (k, x) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A finite permutation group, fully enumerated.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    degree: usize,
    elements: Vec<Permutation>,
    generators: Vec<Permutation>,
}

impl FiniteGroup {
    /// Closure of `generators` under products; the identity alone generates the trivial group.
    pub fn generate(degree: usize, generators: &[Permutation]) -> Result<Self, GroupError> {
        Self::generate_capped(degree, generators, MAX_ORDER)
    }

    pub fn generate_capped(
        degree: usize,
        generators: &[Permutation],
        cap: usize,
    ) -> Result<Self, GroupError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(GroupError::DegreeOutOfRange(degree));
        }
        for g in generators {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch { expected: degree, found: g.degree() });
            }
        }
        let id = Permutation::identity(degree);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for s in generators {
                let y = x.compose(s);
                if !seen.contains(&y) {
                    if seen.len() >= cap {
                        return Err(GroupError::ClosureTooLarge { cap });
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Permutation> = seen.into_iter().collect();
        elements.sort();
        let mut gens = generators.to_vec();
        gens.sort();
        gens.dedup();
        Ok(FiniteGroup { degree, elements, generators: gens })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn index_of(&self, g: &Permutation) -> Option<usize> {
        self.elements.binary_search(g).ok()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.index_of(g).is_some()
    }

    fn require(&self, g: &Permutation) -> Result<usize, GroupError> {
        if g.degree() != self.degree {
            return Err(GroupError::DegreeMismatch { expected: self.degree, found: g.degree() });
        }
        self.index_of(g).ok_or_else(|| GroupError::NotAMember(g.to_string()))
    }

    /// Same element set as `other` (generators may differ).
    pub fn same_elements(&self, other: &FiniteGroup) -> bool {
        self.elements == other.elements
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .all(|a| self.generators.iter().all(|b| a.compose(b) == b.compose(a)))
    }

    pub fn is_normal_subgroup(&self, n: &FiniteGroup) -> bool {
        n.degree == self.degree
            && n.elements.iter().all(|x| self.contains(x))
            && self
                .generators
                .iter()
                .all(|g| n.generators.iter().all(|x| n.contains(&x.conjugate_by(g))))
    }

    /// `C(g) = { h g h⁻¹ : h ∈ G }`, sorted.
    pub fn conjugacy_class(&self, g: &Permutation) -> Result<Vec<Permutation>, GroupError> {
        self.require(g)?;
        let mut class: Vec<Permutation> =
            self.elements.iter().map(|h| g.conjugate_by(h)).collect();
        class.sort();
        class.dedup();
        Ok(class)
    }

    /// All conjugacy classes, ordered by their least element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<Permutation>> {
        let mut assigned = vec![false; self.order()];
        let mut classes = Vec::new();
        for (i, g) in self.elements.iter().enumerate() {
            if assigned[i] {
                continue;
            }
            let class = self.conjugacy_class(g).expect("element of the group");
            for x in &class {
                assigned[self.index_of(x).expect("closed under conjugation")] = true;
            }
            classes.push(class);
        }
        classes
    }

    /// `C_g = C(g) ∪ C(g⁻¹)`.
    pub fn symmetric_class(&self, g: &Permutation) -> Result<Vec<Permutation>, GroupError> {
        let mut s = self.conjugacy_class(g)?;
        s.extend(self.conjugacy_class(&g.inverse())?);
        s.sort();
        s.dedup();
        Ok(s)
    }

    /// `N(g)`, the normal subgroup generated by `g`.
    pub fn normal_closure(&self, g: &Permutation) -> Result<FiniteGroup, GroupError> {
        let class = self.symmetric_class(g)?;
        FiniteGroup::generate(self.degree, &class)
    }
}

/// A value in `ℤ≥0 ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormValue {
    Finite(u64),
    Infinite,
}

impl NormValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            NormValue::Finite(v) => Some(v),
            NormValue::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, NormValue::Finite(_))
    }

    /// `k · self` with `0 · ∞ = 0`.
    pub fn scale(self, k: u64) -> NormValue {
        match self {
            NormValue::Finite(v) => NormValue::Finite(k * v),
            NormValue::Infinite if k == 0 => NormValue::Finite(0),
            NormValue::Infinite => NormValue::Infinite,
        }
    }
}

impl Add for NormValue {
    type Output = NormValue;
    fn add(self, rhs: NormValue) -> NormValue {
        match (self, rhs) {
            (NormValue::Finite(a), NormValue::Finite(b)) => NormValue::Finite(a + b),
            _ => NormValue::Infinite,
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Finite(v) => write!(f, "{v}"),
            NormValue::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            NormValue::Finite(v) => s.serialize_u64(*v),
            NormValue::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Norm values indexed by the canonical element order of a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormTable {
    elements: Vec<Permutation>,
    values: Vec<NormValue>,
}

impl NormTable {
    pub fn get(&self, g: &Permutation) -> Option<NormValue> {
        self.elements.binary_search(g).ok().map(|i| self.values[i])
    }

    pub fn value(&self, g: &Permutation) -> NormValue {
        self.get(g).expect("element of the table's group")
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Permutation, NormValue)> {
        self.elements.iter().zip(self.values.iter().copied())
    }

    pub fn values(&self) -> &[NormValue] {
        &self.values
    }

    /// Largest value, i.e. the diameter of the norm.
    pub fn sup(&self) -> NormValue {
        self.values.iter().copied().max().unwrap_or(NormValue::Finite(0))
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &NormTable) -> bool {
        self.elements == other.elements
            && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// JSON map from cycle notation to an integer or `"inf"`, in canonical element order.
impl Serialize for NormTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.values.len()))?;
        for (g, v) in self.iter() {
            map.serialize_entry(&g.to_string(), &v)?;
        }
        map.end()
    }
}

/// A generating set checked to be closed under inversion and conjugation in a group.
#[derive(Clone, Debug)]
pub struct SymmetricSet {
    members: Vec<Permutation>,
}

impl SymmetricSet {
    pub fn new(group: &FiniteGroup, members: &[Permutation]) -> Result<Self, GroupError> {
        let mut members = members.to_vec();
        members.sort();
        members.dedup();
        for s in &members {
            group.require(s)?;
        }
        let has = |x: &Permutation| members.binary_search(x).is_ok();
        if !members.iter().all(|s| has(&s.inverse())) {
            return Err(GroupError::NotSymmetric);
        }
        for h in group.elements() {
            if !members.iter().all(|s| has(&s.conjugate_by(h))) {
                return Err(GroupError::NotConjInvariant);
            }
        }
        Ok(SymmetricSet { members })
    }

    pub fn members(&self) -> &[Permutation] {
        &self.members
    }
}

/// `q_(G,S)`: breadth-first distance from the identity in the Cayley graph of `S`.
pub fn word_norm(group: &FiniteGroup, set: &SymmetricSet) -> NormTable {
    let n = group.order();
    let mut values = vec![NormValue::Infinite; n];
    let e = group.index_of(&group.identity()).expect("identity");
    values[e] = NormValue::Finite(0);
    let mut queue = VecDeque::from([e]);
    while let Some(i) = queue.pop_front() {
        let d = values[i].finite().expect("visited");
        for s in set.members() {
            let j = group.index_of(&group.elements[i].compose(s)).expect("closed");
            if values[j] == NormValue::Infinite {
                values[j] = NormValue::Finite(d + 1);
                queue.push_back(j);
            }
        }
    }
    NormTable { elements: group.elements.clone(), values }
}

/// All commutators `[a, b]`, sorted.
pub fn commutator_set(group: &FiniteGroup) -> Vec<Permutation> {
    let mut hit = vec![false; group.order()];
    for a in group.elements() {
        for b in group.elements() {
            hit[group.index_of(&a.commutator(b)).expect("closed")] = true;
        }
    }
    group
        .elements()
        .iter()
        .zip(hit)
        .filter_map(|(g, h)| h.then(|| g.clone()))
        .collect()
}

/// Commutator length `cl`; `∞` outside the commutator subgroup.
pub fn commutator_length(group: &FiniteGroup) -> NormTable {
    let set = SymmetricSet { members: commutator_set(group) };
    word_norm(group, &set)
}

/// `ζ_g`, the word norm of `C(g) ∪ C(g⁻¹)`.
pub fn zeta_norm(group: &FiniteGroup, g: &Permutation) -> Result<NormTable, GroupError> {
    group.require(g)?;
    if g.is_identity() {
        return Err(GroupError::IdentityGenerator);
    }
    let set = SymmetricSet { members: group.symmetric_class(g)? };
    Ok(word_norm(group, &set))
}

/// `q_/S(f) = min_{a ∈ S} q(f a⁻¹)`.
pub fn quotient_norm(
    table: &NormTable,
    subset: &[Permutation],
    f: &Permutation,
) -> Result<NormValue, GroupError> {
    if subset.is_empty() {
        return Err(GroupError::EmptySubset);
    }
    let lookup = |x: &Permutation| table.get(x).ok_or_else(|| GroupError::NotAMember(x.to_string()));
    lookup(f)?;
    let mut best = NormValue::Infinite;
    for a in subset {
        best = best.min(lookup(&f.compose(&a.inverse()))?);
    }
    Ok(best)
}

/// `q_/S` on every element of the table's group.
pub fn quotient_table(table: &NormTable, subset: &[Permutation]) -> Result<NormTable, GroupError> {
    let values = table
        .elements
        .iter()
        .map(|f| quotient_norm(table, subset, f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NormTable { elements: table.elements.clone(), values })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Simplicity {
    Simple,
    WeaklySimple,
    NotWeaklySimple,
}

#[derive(Clone, Debug)]
pub struct WeaklySimpleSet {
    /// `S_G = { g : N(g) ≠ G }`, sorted.
    pub set: Vec<Permutation>,
    pub simplicity: Simplicity,
}

/// `S_G`, the union of all proper normal subgroups, with the resulting classification.
pub fn weakly_simple_set(group: &FiniteGroup) -> Result<WeaklySimpleSet, GroupError> {
    if group.order() == 1 {
        return Err(GroupError::TrivialGroup);
    }
    let mut set = Vec::new();
    for class in group.conjugacy_classes() {
        if group.normal_closure(&class[0])?.order() != group.order() {
            set.extend(class);
        }
    }
    set.sort();
    let simplicity = if set.len() == 1 {
        Simplicity::Simple
    } else if set.len() < group.order() {
        Simplicity::WeaklySimple
    } else {
        Simplicity::NotWeaklySimple
    };
    Ok(WeaklySimpleSet { set, simplicity })
}

/// `G/N` realised as the left-regular action of `G` on the cosets of `N`.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    pub group: FiniteGroup,
    projection: Vec<Permutation>,
}

impl QuotientGroup {
    pub fn new(group: &FiniteGroup, normal: &FiniteGroup) -> Result<Self, GroupError> {
        if !group.is_normal_subgroup(normal) {
            return Err(GroupError::NotNormal);
        }
        // coset table: element index -> coset id, cosets numbered by first appearance
        let mut coset_of = vec![usize::MAX; group.order()];
        let mut reps = Vec::new();
        for (i, g) in group.elements().iter().enumerate() {
            if coset_of[i] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(g.clone());
            for x in normal.elements() {
                coset_of[group.index_of(&g.compose(x)).expect("closed")] = id;
            }
        }
        let index = reps.len();
        if index > MAX_DEGREE {
            return Err(GroupError::DegreeOutOfRange(index));
        }
        let act = |x: &Permutation| {
            let images: Vec<usize> = reps
                .iter()
                .map(|r| coset_of[group.index_of(&x.compose(r)).expect("closed")])
                .collect();
            Permutation::from_images(&images).expect("regular action on cosets")
        };
        let projection: Vec<Permutation> = group.elements().iter().map(act).collect();
        let gens: Vec<Permutation> = group.generators().iter().map(act).collect();
        let quotient = FiniteGroup::generate(index, &gens)?;
        Ok(QuotientGroup { group: quotient, projection })
    }

    /// Image of an element of the parent group, indexed by the parent's canonical order.
    pub fn project(&self, parent: &FiniteGroup, g: &Permutation) -> Result<Permutation, GroupError> {
        let i = parent.require(g)?;
        Ok(self.projection[i].clone())
    }
}

/// Outcome of an exhaustive norm-axiom check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    ZeroAway(String),
    NonZeroIdentity,
    Asymmetric(String),
    Triangle(String, String),
    NotConjugationInvariant(String, String),
}

/// Checks zero-only-at-identity, symmetry, subadditivity and conjugation invariance.
pub fn check_norm_axioms(group: &FiniteGroup, table: &NormTable) -> Result<(), AxiomViolation> {
    for (g, v) in table.iter() {
        if g.is_identity() {
            if v != NormValue::Finite(0) {
                return Err(AxiomViolation::NonZeroIdentity);
            }
        } else if v == NormValue::Finite(0) {
            return Err(AxiomViolation::ZeroAway(g.to_string()));
        }
        if table.value(&g.inverse()) != v {
            return Err(AxiomViolation::Asymmetric(g.to_string()));
        }
    }
    for g in group.elements() {
        let qg = table.value(g);
        for h in group.elements() {
            if table.value(&g.compose(h)) > qg + table.value(h) {
                return Err(AxiomViolation::Triangle(g.to_string(), h.to_string()));
            }
            if table.value(&g.conjugate_by(h)) != qg {
                return Err(AxiomViolation::NotConjugationInvariant(g.to_string(), h.to_string()));
            }
        }
    }
    Ok(())
}

impl FromStr for Simplicity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "simple" => Ok(Simplicity::Simple),
            "weakly_simple" => Ok(Simplicity::WeaklySimple),
            "not_weakly_simple" => Ok(Simplicity::NotWeaklySimple),
            _ => Err(format!("unknown simplicity {s:?}")),
        }
    }
}

/// Standard small groups used throughout the tests and the CLI.
pub mod named {
    use super::*;

    fn perm(degree: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(degree, cycles).expect("valid cycle")
    }

    pub fn symmetric(n: usize) -> FiniteGroup {
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(perm(n, &[&[0, 1]]));
            let long: Vec<usize> = (0..n).collect();
            gens.push(perm(n, &[&long]));
        }
        FiniteGroup::generate(n, &gens).expect("small symmetric group")
    }

    pub fn alternating(n: usize) -> FiniteGroup {
        let gens: Vec<Permutation> = (2..n).map(|i| perm(n, &[&[0, 1, i]])).collect();
        FiniteGroup::generate(n, &gens).expect("small alternating group")
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        let long: Vec<usize> = (0..n).collect();
        FiniteGroup::generate(n, &[perm(n, &[&long])]).expect("small cyclic group")
    }

    /// The Klein four-group inside `S4`.
    pub fn klein_four() -> FiniteGroup {
        FiniteGroup::generate(4, &[perm(4, &[&[0, 1], &[2, 3]]), perm(4, &[&[0, 2], &[1, 3]])])
            .expect("V4")
    }

    /// Action of `S4` on the three pairings `{01|23}, {02|13}, {03|12}`.
    ///
    /// Its kernel is the Klein four-group, so this is an explicit
    /// isomorphism `S4/V4 ≅ S3` onto `symmetric(3)`.
    pub fn s4_pairing_action(g: &Permutation) -> Permutation {
        const PAIRINGS: [[[usize; 2]; 2]; 3] =
            [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]];
        let key = |p: [[usize; 2]; 2]| {
            let mut blocks = p.map(|mut b| {
                b.sort();
                b
            });
            blocks.sort();
            blocks
        };
        let images: Vec<usize> = PAIRINGS
            .iter()
            .map(|p| {
                let moved = key(p.map(|b| b.map(|x| g.apply(x))));
                PAIRINGS.iter().position(|q| key(*q) == moved).expect("pairing")
            })
            .collect();
        Permutation::from_images(&images).expect("bijection on pairings")
    }
}
