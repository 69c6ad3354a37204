//! Certified bounds for norms on diffeomorphism groups of a manifold
//! relative to `m` embedded circles.
//!
//! Nothing here computes a norm of an actual diffeomorphism. The inputs are
//! the lattice `A` (or what is known about it), the minimal coset norm `θ_f`
//! of an element, and a [`ManifoldContext`] whose topological flags are
//! asserted by the caller. The outputs are interval bounds, each tagged with
//! the rules that produced it.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{IntLattice, LatticeError, LatticeSpec, QuotientInfo};
use crate::rational::{floor, fmt_q, parse_q, q, qi, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundsError {
    #[error("C + D must be positive")]
    ZeroDenominator,
    #[error("theta must be non-negative, got {0}")]
    NegativeTheta(String),
    #[error("context describes {expected} circles but the lattice lives in Z^{found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("inconsistent ledger: {quantity} has lower bound {lower} above upper bound {upper}")]
    InconsistentLedger { quantity: Quantity, lower: Bound, upper: Bound },
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedOrOpen {
    /// Compact without boundary.
    Closed,
    /// Non-compact without boundary.
    Open,
    /// Non-empty boundary.
    WithBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    Smooth,
    FiniteR,
}

/// Caller-asserted facts about the pair `(M, L)`: `dim M = n`, `L` a union of `m` circles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifoldContext {
    pub n: u32,
    pub m: usize,
    pub connected: bool,
    pub closed_or_open: ClosedOrOpen,
    pub regularity: Regularity,
    /// The perfectness assumption used by the upper bounds; automatic for smooth maps.
    #[serde(rename = "assumption_P", default)]
    pub assumption_p: bool,
}

impl ManifoldContext {
    pub fn new(
        n: u32,
        m: usize,
        connected: bool,
        closed_or_open: ClosedOrOpen,
        regularity: Regularity,
        assumption_p: bool,
    ) -> Result<Self, BoundsError> {
        ManifoldContext { n, m, connected, closed_or_open, regularity, assumption_p }.validated()
    }

    /// Closed, connected, smooth.
    pub fn closed_smooth(n: u32, m: usize) -> Self {
        ManifoldContext::new(n, m, true, ClosedOrOpen::Closed, Regularity::Smooth, true).expect("valid context")
    }

    /// Checks ranges and forces `assumption_P` for smooth contexts.
    pub fn validated(mut self) -> Result<Self, BoundsError> {
        if self.n < 2 {
            return Err(BoundsError::InvalidContext(format!("n = {} < 2", self.n)));
        }
        if self.m < 1 {
            return Err(BoundsError::InvalidContext("m = 0".into()));
        }
        if self.regularity == Regularity::Smooth {
            self.assumption_p = true;
        }
        Ok(self)
    }

    fn odd_dim_bounds(&self) -> bool {
        self.n % 2 == 1 && self.closed_or_open != ClosedOrOpen::WithBoundary
    }

    fn even_dim_bounds(&self) -> bool {
        self.n % 2 == 0 && self.n >= 6 && self.closed_or_open != ClosedOrOpen::WithBoundary
    }

    /// Caller-asserted hypotheses, echoed into every ledger and verdict.
    pub fn assumptions(&self) -> Vec<String> {
        let mut out = vec![format!("dim M = {}, L is a disjoint union of {} circles in Int M", self.n, self.m)];
        out.push(
            match self.closed_or_open {
                ClosedOrOpen::Closed => "M is closed",
                ClosedOrOpen::Open => "M is open (non-compact, no boundary)",
                ClosedOrOpen::WithBoundary => "M has non-empty boundary",
            }
            .into(),
        );
        if self.connected {
            out.push("M is connected".into());
        }
        out.push(
            match self.regularity {
                Regularity::Smooth => "regularity C^inf, so assumption P holds",
                Regularity::FiniteR if self.assumption_p => "regularity C^r with r finite, r != n+1; assumption P asserted",
                Regularity::FiniteR => "regularity C^r with r finite; assumption P not asserted",
            }
            .into(),
        );
        if self.closed_or_open == ClosedOrOpen::Open && self.even_dim_bounds() {
            out.push("M is the interior of a compact manifold".into());
        }
        out
    }
}

/// An upper or lower bound: a number, "finite" with no number, or `∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Value(Q),
    Finite,
    Infinite,
}

impl Bound {
    pub fn int(n: i64) -> Self {
        Bound::Value(qi(n))
    }

    pub fn zero() -> Self {
        Bound::Value(Q::zero())
    }

    pub fn value(&self) -> Option<&Q> {
        match self {
            Bound::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Bound::Infinite)
    }

    /// `c·self` for `c > 0`.
    pub fn scale(&self, c: &Q) -> Self {
        match self {
            Bound::Value(v) => Bound::Value(v * c),
            other => other.clone(),
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        match s.trim() {
            "inf" => Ok(Bound::Infinite),
            "finite" => Ok(Bound::Finite),
            t => parse_q(t).map(Bound::Value).map_err(|e| e.to_string()),
        }
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        fn rank(b: &Bound) -> u8 {
            match b {
                Bound::Value(_) => 0,
                Bound::Finite => 1,
                Bound::Infinite => 2,
            }
        }
        match (self, other) {
            (Bound::Value(a), Bound::Value(b)) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Bound {
    type Output = Bound;
    fn add(self, other: &Bound) -> Bound {
        match (self, other) {
            (Bound::Infinite, _) | (_, Bound::Infinite) => Bound::Infinite,
            (Bound::Value(a), Bound::Value(b)) => Bound::Value(a + b),
            _ => Bound::Finite,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Value(v) => write!(f, "{}", fmt_q(v)),
            Bound::Finite => write!(f, "finite"),
            Bound::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Str(s) => Bound::parse(&s).map_err(serde::de::Error::custom),
            Raw::Int(i) => Ok(Bound::int(i)),
        }
    }
}

/// Quantities tracked by a [`BoundLedger`]. Those ending in `_f` concern one
/// element `f`; the others are diameters of a whole group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "cl_f")]
    ClF,
    #[serde(rename = "clb_f")]
    ClbF,
    #[serde(rename = "cl_modG_f")]
    ClModGF,
    #[serde(rename = "clb_modG_f")]
    ClbModGF,
    #[serde(rename = "zeta")]
    Zeta,
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "cld")]
    Cld,
    #[serde(rename = "clbd")]
    Clbd,
    #[serde(rename = "cld_G")]
    CldG,
    #[serde(rename = "clbd_G")]
    ClbdG,
}

impl Quantity {
    pub const ALL: [Quantity; 10] = [
        Quantity::ClF,
        Quantity::ClbF,
        Quantity::ClModGF,
        Quantity::ClbModGF,
        Quantity::Zeta,
        Quantity::Eta,
        Quantity::Cld,
        Quantity::Clbd,
        Quantity::CldG,
        Quantity::ClbdG,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Quantity::ClF => "cl_f",
            Quantity::ClbF => "clb_f",
            Quantity::ClModGF => "cl_modG_f",
            Quantity::ClbModGF => "clb_modG_f",
            Quantity::Zeta => "zeta",
            Quantity::Eta => "eta",
            Quantity::Cld => "cld",
            Quantity::Clbd => "clbd",
            Quantity::CldG => "cld_G",
            Quantity::ClbdG => "clbd_G",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    #[serde(default = "Bound::zero")]
    pub lower: Bound,
    #[serde(default = "infinite")]
    pub upper: Bound,
    #[serde(default)]
    pub rules: Vec<String>,
}

fn infinite() -> Bound {
    Bound::Infinite
}

impl Default for Entry {
    fn default() -> Self {
        Entry { lower: Bound::zero(), upper: Bound::Infinite, rules: Vec::new() }
    }
}

/// Interval bounds per [`Quantity`], each with the rules that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BoundLedger {
    pub entries: BTreeMap<Quantity, Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assumptions: Vec<String>,
}

impl BoundLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, qty: Quantity) -> Option<&Entry> {
        self.entries.get(&qty)
    }

    pub fn upper(&self, qty: Quantity) -> Bound {
        self.entries.get(&qty).map_or(Bound::Infinite, |e| e.upper.clone())
    }

    pub fn lower(&self, qty: Quantity) -> Bound {
        self.entries.get(&qty).map_or(Bound::zero(), |e| e.lower.clone())
    }

    fn cite(entry: &mut Entry, rule: &str) {
        if !entry.rules.iter().any(|r| r == rule) {
            entry.rules.push(rule.to_string());
        }
    }

    /// Lowers the upper bound if `bound` is tighter. Returns whether anything changed.
    pub fn tighten_upper(&mut self, qty: Quantity, bound: Bound, rule: &str) -> bool {
        if bound >= self.upper(qty) {
            return false;
        }
        let e = self.entries.entry(qty).or_default();
        e.upper = bound;
        Self::cite(e, rule);
        true
    }

    /// Raises the lower bound if `bound` is tighter. Returns whether anything changed.
    pub fn raise_lower(&mut self, qty: Quantity, bound: Bound, rule: &str) -> bool {
        if bound == Bound::Finite || bound <= self.lower(qty) {
            return false;
        }
        let e = self.entries.entry(qty).or_default();
        e.lower = bound;
        Self::cite(e, rule);
        true
    }

    /// Keeps the tighter side of every entry.
    pub fn merge(&mut self, other: &BoundLedger) {
        for (qty, e) in &other.entries {
            for rule in &e.rules {
                self.tighten_upper(*qty, e.upper.clone(), rule);
                self.raise_lower(*qty, e.lower.clone(), rule);
            }
        }
        for a in &other.assumptions {
            if !self.assumptions.contains(a) {
                self.assumptions.push(a.clone());
            }
        }
    }

    /// Every entry must have `lower ≤ upper` and cite a rule.
    pub fn check(&self) -> Result<(), BoundsError> {
        for (qty, e) in &self.entries {
            let bad = match (&e.lower, &e.upper) {
                (Bound::Value(l), Bound::Value(u)) => l > u,
                (Bound::Infinite, u) => u.is_finite(),
                _ => false,
            };
            if bad {
                return Err(BoundsError::InconsistentLedger { quantity: *qty, lower: e.lower.clone(), upper: e.upper.clone() });
            }
        }
        Ok(())
    }
}

pub mod rules {
    pub const CL_LE_CLB: &str = "cl f <= clb f";
    pub const CLB_LE_2ETA: &str = "clb f <= 2 eta(f)";
    pub const ZETA_LE_4CLB: &str = "zeta_g(f) <= 4 clb f";
    pub const CL_QUOTIENT: &str = "cl f <= cl_/G f + cld G";
    pub const CLB_QUOTIENT: &str = "clb f <= clb_/G f + clbd G";
    pub const CL_MODG_LE_CLB_MODG: &str = "cl_/G f <= clb_/G f";
    pub const QM_LOWER: &str = "cl f >= (theta_f + D)/(C + D) with D = 1, C = 3 for nu";
    pub const CLB_MODG_ELL: &str = "clb_/G f <= 2l + 1 for the least integer l > theta_f";
    pub const KHAT_DIAMETER: &str = "rank A = m: clb_/G diameter <= k^ = 2 floor(k/2) + 3";
    pub const CLD_KHAT: &str = "rank A = m: cld <= k^ + cld G";
    pub const CLBD_KHAT: &str = "rank A = m: clbd <= k^ + clbd G";
    pub const ODD_DIM_CLD: &str = "n odd, M - L open: cld Diff_c(M - L)_0 <= 4";
    pub const ODD_DIM_CLBD: &str = "n odd, M - L open: clbd Diff_c(M - L)_0 <= 2n + 4";
    pub const EVEN_DIM: &str = "n even >= 6, M - L interior of a compact manifold: cld and clbd of Diff_c(M - L)_0 finite";
    pub const LOWER_M1: &str = "m = 1: cld >= (k + 2)/8";
    pub const LOWER_THETA: &str = "cld >= (sup theta + 1)/4";
    pub const RANK_DEFICIENT: &str = "rank A < m: surjective quasimorphism, group not uniformly perfect";
}

/// `(θ + D)/(C + D)`.
pub fn lower_cl(theta: &Q, d: &Q, c: &Q) -> Result<Q, BoundsError> {
    let den = c + d;
    if !den.is_positive() {
        return Err(BoundsError::ZeroDenominator);
    }
    Ok((theta + d) / den)
}

/// `2ℓ + 1` with `ℓ = ⌊θ⌋ + 1`, the least integer strictly above `θ`.
pub fn upper_clb_modg(theta: &Q) -> Result<u64, BoundsError> {
    if theta.is_negative() {
        return Err(BoundsError::NegativeTheta(fmt_q(theta)));
    }
    let ell = floor(theta) + 1u32;
    let ell: u64 = ell.try_into().map_err(|_| BoundsError::NegativeTheta(fmt_q(theta)))?;
    Ok(2 * ell + 1)
}

fn group_bounds(ctx: &ManifoldContext, ledger: &mut BoundLedger) {
    if ctx.odd_dim_bounds() {
        ledger.tighten_upper(Quantity::CldG, Bound::int(4), rules::ODD_DIM_CLD);
        ledger.tighten_upper(Quantity::ClbdG, Bound::int(2 * i64::from(ctx.n) + 4), rules::ODD_DIM_CLBD);
    } else if ctx.even_dim_bounds() {
        ledger.tighten_upper(Quantity::CldG, Bound::Finite, rules::EVEN_DIM);
        ledger.tighten_upper(Quantity::ClbdG, Bound::Finite, rules::EVEN_DIM);
    }
}

/// Bounds for one element `f` with minimal coset norm `θ_f`.
pub fn element_ledger(ctx: &ManifoldContext, theta: &Q) -> Result<BoundLedger, BoundsError> {
    let ctx = ctx.clone().validated()?;
    let mut ledger = BoundLedger { assumptions: ctx.assumptions(), ..Default::default() };
    let lower = lower_cl(theta, &Q::one(), &qi(3))?;
    let upper = upper_clb_modg(theta)?;
    ledger.raise_lower(Quantity::ClF, Bound::Value(lower), rules::QM_LOWER);
    if ctx.assumption_p {
        let u = Bound::Value(Q::from_integer(upper.into()));
        ledger.tighten_upper(Quantity::ClbModGF, u.clone(), rules::CLB_MODG_ELL);
        ledger.tighten_upper(Quantity::ClModGF, u, rules::CLB_MODG_ELL);
    }
    group_bounds(&ctx, &mut ledger);
    Ok(ledger)
}

/// Diameter bounds for `Diff(M, L)_0`.
///
/// `theta_sup_lower` is a certified lower bound for `sup θ` over all cosets
/// (see [`crate::coset::theta_sup`]); for `m = 1` the exact value `k/2` is used.
pub fn diameter_ledger(
    ctx: &ManifoldContext,
    info: &QuotientInfo,
    theta_sup_lower: Option<&Q>,
) -> Result<BoundLedger, BoundsError> {
    let ctx = ctx.clone().validated()?;
    if info.m != ctx.m {
        return Err(BoundsError::DimensionMismatch { expected: ctx.m, found: info.m });
    }
    let mut ledger = BoundLedger { assumptions: ctx.assumptions(), ..Default::default() };
    group_bounds(&ctx, &mut ledger);
    match info.k_finite() {
        None => {
            ledger.raise_lower(Quantity::Cld, Bound::Infinite, rules::RANK_DEFICIENT);
            ledger.raise_lower(Quantity::Clbd, Bound::Infinite, rules::RANK_DEFICIENT);
        }
        Some(k) => {
            let k_hat = info.k_hat.expect("full rank has k^");
            if ctx.assumption_p {
                let kh = Bound::Value(Q::from_integer(k_hat.into()));
                ledger.tighten_upper(Quantity::ClbModGF, kh.clone(), rules::KHAT_DIAMETER);
                ledger.tighten_upper(Quantity::ClModGF, kh.clone(), rules::KHAT_DIAMETER);
                let cld = &kh + &ledger.upper(Quantity::CldG);
                let clbd = &kh + &ledger.upper(Quantity::ClbdG);
                ledger.tighten_upper(Quantity::Cld, cld, rules::CLD_KHAT);
                ledger.tighten_upper(Quantity::Clbd, clbd, rules::CLBD_KHAT);
            }
            if ctx.m == 1 {
                let k = i64::try_from(k).expect("k fits in i64");
                ledger.raise_lower(Quantity::Cld, Bound::Value(q(k + 2, 8)), rules::LOWER_M1);
            } else if let Some(t) = theta_sup_lower {
                let lower = lower_cl(t, &Q::one(), &qi(3))?;
                ledger.raise_lower(Quantity::Cld, Bound::Value(lower), rules::LOWER_THETA);
            }
        }
    }
    ledger.check()?;
    Ok(ledger)
}

fn apply_le(l: &mut BoundLedger, a: Quantity, factor: i64, b: Quantity, rule: &str) -> bool {
    let f = qi(factor);
    let mut changed = l.tighten_upper(a, l.upper(b).scale(&f), rule);
    let lower_b = match l.lower(a) {
        Bound::Value(v) => Bound::Value(v / &f),
        other => other,
    };
    changed |= l.raise_lower(b, lower_b, rule);
    changed
}

fn apply_le_sum(l: &mut BoundLedger, a: Quantity, b: Quantity, c: Quantity, rule: &str) -> bool {
    let mut changed = l.tighten_upper(a, &l.upper(b) + &l.upper(c), rule);
    for (x, y) in [(b, c), (c, b)] {
        // a ≤ x + y  ⇒  x ≥ a - y
        let lower = match (l.lower(a), l.upper(y)) {
            (Bound::Value(la), Bound::Value(uy)) => Bound::Value(la - uy),
            (Bound::Infinite, uy) if uy.is_finite() => Bound::Infinite,
            _ => continue,
        };
        changed |= l.raise_lower(x, lower, rule);
    }
    changed
}

/// Applies the relations between the quantities until nothing changes.
pub fn relation_close(ledger: &BoundLedger) -> Result<BoundLedger, BoundsError> {
    use Quantity::*;
    let mut l = ledger.clone();
    loop {
        let mut changed = false;
        changed |= apply_le(&mut l, ClF, 1, ClbF, rules::CL_LE_CLB);
        changed |= apply_le(&mut l, ClbF, 2, Eta, rules::CLB_LE_2ETA);
        changed |= apply_le(&mut l, Zeta, 4, ClbF, rules::ZETA_LE_4CLB);
        changed |= apply_le_sum(&mut l, ClF, ClModGF, CldG, rules::CL_QUOTIENT);
        changed |= apply_le_sum(&mut l, ClbF, ClbModGF, ClbdG, rules::CLB_QUOTIENT);
        changed |= apply_le(&mut l, ClModGF, 1, ClbModGF, rules::CL_MODG_LE_CLB_MODG);
        if !changed {
            break;
        }
    }
    l.check()?;
    Ok(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Bounded,
    Unbounded,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub justification: Vec<String>,
}

/// What is known about `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeKnowledge {
    Exact(IntLattice),
    /// `A` contains this lattice.
    Contains(IntLattice),
    /// `rank A ≤ rank` in `ℤ^m`.
    RankAtMost { m: usize, rank: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnowledgeSpec {
    Exact(LatticeSpec),
    Contains(LatticeSpec),
    RankAtMost { m: usize, rank: usize },
}

impl KnowledgeSpec {
    pub fn build(&self) -> Result<LatticeKnowledge, LatticeError> {
        Ok(match self {
            KnowledgeSpec::Exact(s) => LatticeKnowledge::Exact(IntLattice::from_spec(s)?),
            KnowledgeSpec::Contains(s) => LatticeKnowledge::Contains(IntLattice::from_spec(s)?),
            KnowledgeSpec::RankAtMost { m, rank } => LatticeKnowledge::RankAtMost { m: *m, rank: *rank },
        })
    }
}

impl LatticeKnowledge {
    pub fn dim(&self) -> usize {
        match self {
            LatticeKnowledge::Exact(a) | LatticeKnowledge::Contains(a) => a.dim(),
            LatticeKnowledge::RankAtMost { m, .. } => *m,
        }
    }
}

/// Verdict when `A` is known exactly.
pub fn verdict(ctx: &ManifoldContext, a: &IntLattice) -> Result<Verdict, BoundsError> {
    verdict_from_knowledge(ctx, &LatticeKnowledge::Exact(a.clone()))
}

pub fn verdict_from_knowledge(ctx: &ManifoldContext, know: &LatticeKnowledge) -> Result<Verdict, BoundsError> {
    let ctx = ctx.clone().validated()?;
    if know.dim() != ctx.m {
        return Err(BoundsError::DimensionMismatch { expected: ctx.m, found: know.dim() });
    }
    let m = ctx.m;
    let mut chain = Vec::new();
    // rank information: Some(true) full rank, Some(false) deficient, None unknown
    let full = match know {
        LatticeKnowledge::Exact(a) => {
            let info = a.quotient_info();
            chain.push(format!("A = {a}, rank A = {}", info.rank));
            if info.full_rank() {
                chain.push(format!("k = {}, k^ = {}", info.k_max, info.k_hat.expect("full rank")));
                Some(true)
            } else {
                let phi = a.kernel_functional()?;
                chain.push(format!("rank A = {} < m = {m}", info.rank));
                chain.push(format!("kernel functional {phi:?} vanishes on A"));
                Some(false)
            }
        }
        LatticeKnowledge::Contains(b) => {
            chain.push(format!("A contains {b}"));
            if b.is_full_rank() {
                let info = b.quotient_info();
                chain.push(format!(
                    "rank A = m = {m}, k <= {} so k^ <= {}",
                    info.k_max,
                    info.k_hat.expect("full rank")
                ));
                Some(true)
            } else {
                chain.push(format!("rank A >= {}, exact rank unknown", b.rank()));
                None
            }
        }
        LatticeKnowledge::RankAtMost { rank, .. } => {
            chain.push(format!("rank A <= {rank}"));
            if *rank < m {
                chain.push(format!("rank A < m = {m}"));
                Some(false)
            } else {
                None
            }
        }
    };
    let status = match full {
        Some(false) => {
            chain.push("composing nu^ with a functional killing A gives a surjective quasimorphism".into());
            chain.push("Diff(M, L)_0 is neither bounded nor uniformly perfect".into());
            Status::Unbounded
        }
        None => {
            chain.push("rank of A undetermined".into());
            Status::Unknown
        }
        Some(true) => {
            let mut gaps = Vec::new();
            if ctx.n == 2 || ctx.n == 4 {
                gaps.push(format!("n = {} is excluded (n must not be 2 or 4)", ctx.n));
            }
            if !ctx.connected {
                gaps.push("M is not asserted connected".to_string());
            }
            if !ctx.assumption_p {
                gaps.push("assumption P is not asserted".to_string());
            }
            if ctx.closed_or_open == ClosedOrOpen::WithBoundary {
                gaps.push("M has boundary".to_string());
            }
            if gaps.is_empty() {
                chain.push(rules::KHAT_DIAMETER.into());
                chain.push(if ctx.n % 2 == 1 { rules::ODD_DIM_CLD } else { rules::EVEN_DIM }.into());
                chain.push(format!("n = {} not in {{2, 4}}, M connected, assumption P", ctx.n));
                chain.push("cld and clbd are finite, so Diff(M, L)_0 is bounded".into());
                Status::Bounded
            } else {
                chain.extend(gaps);
                Status::Unknown
            }
        }
    };
    chain.extend(ctx.assumptions().into_iter().map(|a| format!("assumed: {a}")));
    Ok(Verdict { status, justification: chain })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ub(l: &BoundLedger, qty: Quantity) -> Bound {
        l.upper(qty)
    }

    #[test]
    fn lower_cl_examples() {
        let (one, three) = (qi(1), qi(3));
        assert_eq!(lower_cl(&qi(3), &one, &three).unwrap(), qi(1));
        assert_eq!(lower_cl(&qi(0), &one, &three).unwrap(), q(1, 4));
        assert_eq!(lower_cl(&q(5, 2), &one, &three).unwrap(), q(7, 8));
        assert_eq!(lower_cl(&qi(1), &qi(1), &qi(-1)), Err(BoundsError::ZeroDenominator));
    }

    #[test]
    fn upper_clb_modg_examples() {
        assert_eq!(upper_clb_modg(&q(5, 2)).unwrap(), 7);
        assert_eq!(upper_clb_modg(&qi(0)).unwrap(), 3);
        assert_eq!(upper_clb_modg(&qi(1)).unwrap(), 5);
        assert!(upper_clb_modg(&q(-1, 2)).is_err());
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(&Bound::int(3) + &Bound::Finite, Bound::Finite);
        assert_eq!(&Bound::Finite + &Bound::Infinite, Bound::Infinite);
        assert!(Bound::int(1_000_000) < Bound::Finite);
        assert!(Bound::Finite < Bound::Infinite);
        assert_eq!(Bound::parse("finite").unwrap(), Bound::Finite);
        assert_eq!(Bound::parse("7/2").unwrap(), Bound::Value(q(7, 2)));
    }

    #[test]
    fn torus_knot_ledger() {
        let ctx = ManifoldContext::closed_smooth(3, 1);
        let info = IntLattice::cyclic(1).quotient_info();
        let l = diameter_ledger(&ctx, &info, None).unwrap();
        assert_eq!(info.k_hat, Some(3));
        assert_eq!(ub(&l, Quantity::Cld), Bound::int(7));
        assert_eq!(ub(&l, Quantity::Clbd), Bound::int(13));
        assert_eq!(l.lower(Quantity::Cld), Bound::Value(q(3, 8)));
        assert!(l.entries.values().all(|e| !e.rules.is_empty()));
    }

    #[test]
    fn hopf_three_has_no_finite_diameter() {
        let ctx = ManifoldContext::closed_smooth(3, 3);
        let a = IntLattice::normalize(3, &[vec![1, 1, 1]]).unwrap();
        let l = diameter_ledger(&ctx, &a.quotient_info(), None).unwrap();
        assert_eq!(ub(&l, Quantity::Cld), Bound::Infinite);
        assert_eq!(l.lower(Quantity::Cld), Bound::Infinite);
        let v = verdict(&ctx, &a).unwrap();
        assert_eq!(v.status, Status::Unbounded);
        assert!(v.justification.iter().any(|s| s.contains("[1, -1, 0]")));
    }

    #[test]
    fn even_dimension_gives_finite_token() {
        let ctx = ManifoldContext::closed_smooth(6, 1);
        let l = diameter_ledger(&ctx, &IntLattice::cyclic(2).quotient_info(), None).unwrap();
        assert_eq!(ub(&l, Quantity::ClbModGF), Bound::int(5));
        assert_eq!(ub(&l, Quantity::Cld), Bound::Finite);
        assert_eq!(ub(&l, Quantity::Clbd), Bound::Finite);
    }

    #[test]
    fn dimensions_two_and_four_emit_no_diameter_upper() {
        for n in [2, 4] {
            let ctx = ManifoldContext::closed_smooth(n, 1);
            let l = diameter_ledger(&ctx, &IntLattice::cyclic(1).quotient_info(), None).unwrap();
            assert_eq!(ub(&l, Quantity::Cld), Bound::Infinite);
            assert_eq!(verdict(&ctx, &IntLattice::cyclic(1)).unwrap().status, Status::Unknown);
        }
    }

    #[test]
    fn relation_close_examples() {
        assert!(relation_close(&BoundLedger::new()).unwrap().is_empty());

        let mut l = BoundLedger::new();
        l.tighten_upper(Quantity::ClbModGF, Bound::int(7), "given");
        l.tighten_upper(Quantity::ClbdG, Bound::int(10), "given");
        let c = relation_close(&l).unwrap();
        assert_eq!(ub(&c, Quantity::ClbF), Bound::int(17));
        assert_eq!(ub(&c, Quantity::ClModGF), Bound::int(7));

        let mut l = BoundLedger::new();
        l.tighten_upper(Quantity::ClbF, Bound::int(5), "given");
        let c = relation_close(&l).unwrap();
        assert_eq!(ub(&c, Quantity::ClF), Bound::int(5));
        assert_eq!(ub(&c, Quantity::Zeta), Bound::int(20));
        assert_eq!(c.get(Quantity::Zeta).unwrap().rules, vec![rules::ZETA_LE_4CLB.to_string()]);
    }

    #[test]
    fn relation_close_propagates_lowers_and_detects_conflicts() {
        let mut l = BoundLedger::new();
        l.raise_lower(Quantity::ClF, Bound::int(6), "given");
        let c = relation_close(&l).unwrap();
        assert_eq!(c.lower(Quantity::ClbF), Bound::int(6));
        assert_eq!(c.lower(Quantity::Eta), Bound::int(3));

        l.tighten_upper(Quantity::ClbF, Bound::int(5), "given");
        assert!(matches!(relation_close(&l), Err(BoundsError::InconsistentLedger { .. })));
    }

    #[test]
    fn element_ledger_in_odd_dimension() {
        // cl f <= 2l + 5 and clb f <= 2l + 2n + 5
        let ctx = ManifoldContext::closed_smooth(5, 2);
        let l = relation_close(&element_ledger(&ctx, &q(5, 2)).unwrap()).unwrap();
        assert_eq!(ub(&l, Quantity::ClF), Bound::int(11));
        assert_eq!(ub(&l, Quantity::ClbF), Bound::int(21));
        assert_eq!(l.lower(Quantity::ClF), Bound::Value(q(7, 8)));
    }

    #[test]
    fn verdict_examples() {
        let ctx = ManifoldContext::closed_smooth(3, 1);
        assert_eq!(verdict(&ctx, &IntLattice::cyclic(1)).unwrap().status, Status::Bounded);
        let ctx4 = ManifoldContext::closed_smooth(4, 1);
        assert_eq!(verdict(&ctx4, &IntLattice::cyclic(1)).unwrap().status, Status::Unknown);
        let zero = IntLattice::cyclic(0);
        assert_eq!(verdict(&ctx, &zero).unwrap().status, Status::Unbounded);
        let wrong = IntLattice::full(2).unwrap();
        assert!(matches!(verdict(&ctx, &wrong), Err(BoundsError::DimensionMismatch { .. })));
    }

    #[test]
    fn knowledge_verdicts() {
        let ctx = ManifoldContext::closed_smooth(3, 2);
        let v = verdict_from_knowledge(&ctx, &LatticeKnowledge::RankAtMost { m: 2, rank: 1 }).unwrap();
        assert_eq!(v.status, Status::Unbounded);
        let c1 = ManifoldContext::closed_smooth(3, 1);
        let v = verdict_from_knowledge(&c1, &LatticeKnowledge::Contains(IntLattice::cyclic(3))).unwrap();
        assert_eq!(v.status, Status::Bounded);
        let v = verdict_from_knowledge(&c1, &LatticeKnowledge::Contains(IntLattice::cyclic(0))).unwrap();
        assert_eq!(v.status, Status::Unknown);
    }

    #[test]
    fn smooth_forces_assumption_p() {
        let ctx = ManifoldContext::new(3, 1, true, ClosedOrOpen::Closed, Regularity::Smooth, false).unwrap();
        assert!(ctx.assumption_p);
        let raw = r#"{"n":3,"m":1,"connected":true,"closed_or_open":"closed","regularity":"finite_r","assumption_P":false}"#;
        let ctx: ManifoldContext = serde_json::from_str(raw).unwrap();
        assert_eq!(verdict(&ctx, &IntLattice::cyclic(1)).unwrap().status, Status::Unknown);
        assert!(ManifoldContext::new(1, 1, true, ClosedOrOpen::Closed, Regularity::Smooth, true).is_err());
    }

    #[test]
    fn ledger_json_shape() {
        let ctx = ManifoldContext::closed_smooth(3, 1);
        let l = diameter_ledger(&ctx, &IntLattice::cyclic(1).quotient_info(), None).unwrap();
        let v = serde_json::to_value(&l).unwrap();
        assert_eq!(v["entries"]["cld"]["upper"], "7");
        assert_eq!(v["entries"]["cld"]["lower"], "3/8");
        let back: BoundLedger = serde_json::from_value(v).unwrap();
        assert_eq!(back, l);
    }
}
