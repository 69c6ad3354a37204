//! Rotation angles of piecewise-linear paths and isotopies on `ℝ/ℤ`.
//!
//! A circle homeomorphism isotopic to the identity is stored as a lift
//! `f: ℝ → ℝ` with `f(x + 1) = f(x) + 1`, given by its breakpoints in one
//! period. An isotopy is a list of time samples with one lift per sample and
//! straight-line interpolation between consecutive lifts. Convex
//! combinations of increasing periodic lifts stay increasing and periodic,
//! so the interpolated family is itself a continuous family of lifts, and
//! the trace of a point is a lifted path whose endpoint difference is the
//! rotation angle.
//!
//! Products and inverses are taken frame by frame on a merged time grid.
//! The result agrees with the true pointwise product at every sample and is
//! joined to it by the straight-line homotopy of lifts between samples, so
//! it has the same endpoint lifts and the same rotation angle at every point.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coset::AffineCoset;
use crate::lattice::{IntLattice, LatticeError};
use crate::rational::{floor, floor_q, fmt_q, frac, q, qi, serde_q, serde_q_vec, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircleError {
    #[error("a lift needs at least one breakpoint")]
    EmptyLift,
    #[error("breakpoint {0} is outside [0, 1)")]
    BreakpointOutOfRange(String),
    #[error("lift is not strictly increasing over one period")]
    NotIncreasing,
    #[error("time samples must start at 0, end at 1 and increase strictly")]
    BadTimes,
    #[error("expected {expected} frames, found {found}")]
    FrameCount { expected: usize, found: usize },
    #[error("end frame of the first isotopy differs from the start frame of the second")]
    FrameMismatch,
    #[error("components disagree: {0}")]
    ComponentMismatch(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Lift of an orientation-preserving PL homeomorphism of `ℝ/ℤ`.
///
/// Breakpoints `xs` lie in `[0, 1)` and increase strictly; values `ys`
/// increase strictly and satisfy `ys[last] < ys[0] + 1`. Redundant
/// (collinear) breakpoints are removed on construction, so two lifts are
/// equal as functions iff they are equal as values. A pure translation
/// keeps the single breakpoint `x = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleLift {
    xs: Vec<Q>,
    ys: Vec<Q>,
    /// `slopes[i]` is the slope from breakpoint `i` to the next one (wrapping).
    slopes: Vec<Q>,
}

fn slope(x0: &Q, y0: &Q, x1: &Q, y1: &Q) -> Q {
    (y1 - y0) / (x1 - x0)
}

impl CircleLift {
    pub fn new(points: Vec<(Q, Q)>) -> Result<Self, CircleError> {
        if points.is_empty() {
            return Err(CircleError::EmptyLift);
        }
        for (x, _) in &points {
            if x.is_negative() || *x >= Q::one() {
                return Err(CircleError::BreakpointOutOfRange(fmt_q(x)));
            }
        }
        let (xs, ys): (Vec<Q>, Vec<Q>) = points.into_iter().unzip();
        let increasing = |v: &[Q]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&xs) || !increasing(&ys) || ys[ys.len() - 1] >= &ys[0] + Q::one() {
            return Err(CircleError::NotIncreasing);
        }
        Ok(Self::canonical(xs, ys))
    }

    /// Drops breakpoints where the slope does not change.
    fn canonical(xs: Vec<Q>, ys: Vec<Q>) -> Self {
        let n = xs.len();
        let one = Q::one();
        let slopes: Vec<Q> = (0..n)
            .map(|i| {
                if i + 1 < n {
                    slope(&xs[i], &ys[i], &xs[i + 1], &ys[i + 1])
                } else {
                    slope(&xs[i], &ys[i], &(&xs[0] + &one), &(&ys[0] + &one))
                }
            })
            .collect();
        Self::with_slopes(xs, ys, slopes)
    }

    fn with_slopes(xs: Vec<Q>, ys: Vec<Q>, slopes: Vec<Q>) -> Self {
        let n = xs.len();
        let keep: Vec<bool> = (0..n).map(|i| slopes[(i + n - 1) % n] != slopes[i]).collect();
        if !keep.iter().any(|&k| k) {
            // slope 1 everywhere: a translation
            return Self::translation(&ys[0] - &xs[0]);
        }
        if keep.iter().all(|&k| k) {
            return CircleLift { xs, ys, slopes };
        }
        let mut lift = CircleLift { xs: Vec::new(), ys: Vec::new(), slopes: Vec::new() };
        for (((x, y), m), k) in xs.into_iter().zip(ys).zip(slopes).zip(keep) {
            if k {
                lift.xs.push(x);
                lift.ys.push(y);
                lift.slopes.push(m);
            }
        }
        lift
    }

    pub fn translation(by: Q) -> Self {
        CircleLift { xs: vec![Q::zero()], ys: vec![by], slopes: vec![Q::one()] }
    }

    pub fn identity() -> Self {
        Self::translation(Q::zero())
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.xs.iter().zip(&self.ys)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn eval(&self, x: &Q) -> Q {
        if !x.is_negative() && x.numer() < x.denom() {
            return self.eval_period(x);
        }
        let n = floor(x);
        let r = x - Q::from_integer(n.clone());
        self.eval_period(&r) + Q::from_integer(n)
    }

    /// `eval` for `0 ≤ r < 1`.
    fn eval_period(&self, r: &Q) -> Q {
        let k = self.xs.len();
        let idx = self.xs.partition_point(|a| a <= r);
        if idx == 0 {
            &self.ys[k - 1] - Q::one() + (r - &self.xs[k - 1] + Q::one()) * &self.slopes[k - 1]
        } else {
            &self.ys[idx - 1] + (r - &self.xs[idx - 1]) * &self.slopes[idx - 1]
        }
    }

    pub fn inverse(&self) -> Self {
        let mut pts: Vec<(Q, Q)> = self
            .xs
            .iter()
            .zip(&self.ys)
            .map(|(x, y)| {
                let n = floor_q(y);
                (y - &n, x - &n)
            })
            .collect();
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        let (xs, ys) = pts.into_iter().unzip();
        Self::canonical(xs, ys)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &CircleLift) -> Self {
        let other_inv = other.inverse();
        let mut xs: Vec<Q> = other.xs.clone();
        xs.extend(self.xs.iter().map(|x| frac(&other_inv.eval(x))));
        xs.sort();
        xs.dedup();
        let ys = xs.iter().map(|x| self.eval(&other.eval(x))).collect();
        Self::canonical(xs, ys)
    }

    /// `(1 - s)·self + s·other`.
    pub fn lerp(&self, other: &CircleLift, s: &Q) -> Self {
        if s.is_zero() {
            return self.clone();
        }
        if s.is_one() {
            return other.clone();
        }
        let mut xs: Vec<Q> = self.xs.iter().chain(&other.xs).cloned().collect();
        xs.sort();
        xs.dedup();
        let r = Q::one() - s;
        let ys = xs.iter().map(|x| &r * self.eval(x) + s * other.eval(x)).collect();
        Self::canonical(xs, ys)
    }

    pub fn shifted(&self, n: &Q) -> Self {
        CircleLift { xs: self.xs.clone(), ys: self.ys.iter().map(|y| y + n).collect(), slopes: self.slopes.clone() }
    }

    /// Integer `n` with `self = other + n`, i.e. both lift the same circle map.
    pub fn integer_offset(&self, other: &CircleLift) -> Option<BigInt> {
        let d = &self.ys[0] - other.eval(&self.xs[0]);
        (d.is_integer() && *self == other.shifted(&d)).then(|| d.to_integer())
    }

    /// Lifts the identity circle map.
    pub fn is_identity_map(&self) -> bool {
        self.integer_offset(&CircleLift::identity()).is_some()
    }
}

/// A path in `ℝ/ℤ` given by a piecewise-linear lift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLPath {
    times: Vec<Q>,
    values: Vec<Q>,
}

fn check_times(times: &[Q]) -> Result<(), CircleError> {
    let ok = times.len() >= 2
        && times[0].is_zero()
        && times[times.len() - 1].is_one()
        && times.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(CircleError::BadTimes)
    }
}

impl PLPath {
    pub fn new(times: Vec<Q>, values: Vec<Q>) -> Result<Self, CircleError> {
        check_times(&times)?;
        if values.len() != times.len() {
            return Err(CircleError::FrameCount { expected: times.len(), found: values.len() });
        }
        Ok(PLPath { times, values })
    }

    /// `δ_σ(t) = σt`.
    pub fn delta(sigma: Q) -> Self {
        PLPath { times: vec![Q::zero(), Q::one()], values: vec![Q::zero(), sigma] }
    }

    pub fn constant(at: Q) -> Self {
        PLPath { times: vec![Q::zero(), Q::one()], values: vec![at.clone(), at] }
    }

    pub fn times(&self) -> &[Q] {
        &self.times
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn eval(&self, t: &Q) -> Q {
        let i = self.times.partition_point(|a| a <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (&self.times[i - 1], &self.times[i]);
        let (v0, v1) = (&self.values[i - 1], &self.values[i]);
        v0 + (t - t0) * slope(t0, v0, t1, v1)
    }

    /// Shifts the lift by an integer; the path on the circle is unchanged.
    pub fn shift_lift(&self, n: i64) -> Self {
        PLPath { times: self.times.clone(), values: self.values.iter().map(|v| v + qi(n)).collect() }
    }

    /// `α ∗ β`, defined when `α(1) = β(0)` on the circle.
    pub fn concat(&self, other: &PLPath) -> Result<Self, CircleError> {
        let gap = &self.values[self.values.len() - 1] - &other.values[0];
        if !gap.is_integer() {
            return Err(CircleError::FrameMismatch);
        }
        let half = q(1, 2);
        let mut times: Vec<Q> = self.times.iter().map(|t| t * &half).collect();
        let mut values = self.values.clone();
        times.extend(other.times.iter().skip(1).map(|t| &half + t * &half));
        values.extend(other.values.iter().skip(1).map(|v| v + &gap));
        Ok(PLPath { times, values })
    }

    /// `γ ∘ σ` for a monotone PL reparametrization `σ` of `[0, 1]` fixing the endpoints.
    pub fn reparametrize(&self, sigma: &PLPath) -> Result<Self, CircleError> {
        let ends_fixed = sigma.values[0].is_zero() && sigma.values[sigma.values.len() - 1].is_one();
        if !ends_fixed || sigma.values.windows(2).any(|w| w[0] > w[1]) {
            return Err(CircleError::BadTimes);
        }
        // breakpoints of γ∘σ: those of σ plus preimages of γ's breakpoints
        let mut times = sigma.times.clone();
        for s in &self.times {
            for w in 0..sigma.times.len() - 1 {
                let (v0, v1) = (&sigma.values[w], &sigma.values[w + 1]);
                if v0 < v1 && v0 <= s && s <= v1 {
                    let (t0, t1) = (&sigma.times[w], &sigma.times[w + 1]);
                    times.push(t0 + (s - v0) * (t1 - t0) / (v1 - v0));
                }
            }
        }
        times.sort();
        times.dedup();
        let values = times.iter().map(|t| self.eval(&sigma.eval(t))).collect();
        Ok(PLPath { times, values })
    }
}

/// `λ(γ) = γ̃(1) - γ̃(0)`.
pub fn rotation_angle(path: &PLPath) -> Q {
    &path.values[path.values.len() - 1] - &path.values[0]
}

/// An isotopy of `ℝ/ℤ` sampled at rational times with linear interpolation of lifts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLIsotopy {
    times: Vec<Q>,
    frames: Vec<CircleLift>,
}

fn merge_times(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut t: Vec<Q> = a.iter().chain(b).cloned().collect();
    t.sort();
    t.dedup();
    t
}

impl PLIsotopy {
    pub fn new(times: Vec<Q>, frames: Vec<CircleLift>) -> Result<Self, CircleError> {
        check_times(&times)?;
        if frames.len() != times.len() {
            return Err(CircleError::FrameCount { expected: times.len(), found: frames.len() });
        }
        Ok(PLIsotopy { times, frames })
    }

    pub fn identity() -> Self {
        Self::constant(CircleLift::identity())
    }

    pub fn constant(f: CircleLift) -> Self {
        PLIsotopy { times: vec![Q::zero(), Q::one()], frames: vec![f.clone(), f] }
    }

    /// Rigid rotation by `σt`.
    pub fn rotation(sigma: Q) -> Self {
        Self::rotation_from(Q::zero(), sigma)
    }

    /// Rigid rotation from angle `start` to `start + sigma`.
    pub fn rotation_from(start: Q, sigma: Q) -> Self {
        let end = &start + sigma;
        PLIsotopy {
            times: vec![Q::zero(), Q::one()],
            frames: vec![CircleLift::translation(start), CircleLift::translation(end)],
        }
    }

    pub fn times(&self) -> &[Q] {
        &self.times
    }

    pub fn frames(&self) -> &[CircleLift] {
        &self.frames
    }

    pub fn start(&self) -> &CircleLift {
        &self.frames[0]
    }

    pub fn end(&self) -> &CircleLift {
        &self.frames[self.frames.len() - 1]
    }

    /// Starts at the identity.
    pub fn is_based(&self) -> bool {
        self.start().is_identity_map()
    }

    /// Starts and ends at the identity.
    pub fn is_loop(&self) -> bool {
        self.is_based() && self.end().is_identity_map()
    }

    pub fn frame_at(&self, t: &Q) -> CircleLift {
        let i = self.times.partition_point(|a| a <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (&self.times[i - 1], &self.times[i]);
        let s = (t - t0) / (t1 - t0);
        self.frames[i - 1].lerp(&self.frames[i], &s)
    }

    /// Same isotopy sampled on `times` (which must contain the current samples).
    pub fn refined(&self, times: &[Q]) -> Self {
        if times == self.times.as_slice() {
            return self.clone();
        }
        PLIsotopy { times: times.to_vec(), frames: times.iter().map(|t| self.frame_at(t)).collect() }
    }

    /// The lifted path `t ↦ F̃_t(p)`.
    pub fn trace(&self, p: &Q) -> PLPath {
        PLPath { times: self.times.clone(), values: self.frames.iter().map(|f| f.eval(p)).collect() }
    }

    /// `μ_p(F) = λ(F_p)`.
    pub fn mu(&self, p: &Q) -> Q {
        rotation_angle(&self.trace(p))
    }

    /// The straight segment between the end lifts. Lifts form a convex set,
    /// so this is homotopic to `self` relative to the endpoints and every
    /// `μ_p` agrees.
    pub fn straightened(&self) -> Self {
        PLIsotopy { times: vec![Q::zero(), Q::one()], frames: vec![self.start().clone(), self.end().clone()] }
    }

    /// `F̃_t(x)` without building the interpolated frame.
    pub fn eval(&self, t: &Q, x: &Q) -> Q {
        let i = self.times.partition_point(|a| a <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (&self.times[i - 1], &self.times[i]);
        let a = self.frames[i - 1].eval(x);
        if t == t0 {
            return a;
        }
        let b = self.frames[i].eval(x);
        if t == t1 {
            return b;
        }
        let s = (t - t0) / (t1 - t0);
        &a + (b - &a) * s
    }

    /// `(FG)_t = F_t G_t`.
    pub fn compose(&self, other: &PLIsotopy) -> Self {
        let times = merge_times(&self.times, &other.times);
        let a = self.refined(&times);
        let b = other.refined(&times);
        let frames = a.frames.iter().zip(&b.frames).map(|(f, g)| f.compose(g)).collect();
        PLIsotopy { times, frames }
    }

    /// `(F⁻¹)_t = (F_t)⁻¹`.
    pub fn invert(&self) -> Self {
        PLIsotopy { times: self.times.clone(), frames: self.frames.iter().map(|f| f.inverse()).collect() }
    }

    /// `[F, G] = F G F⁻¹ G⁻¹`.
    pub fn commutator(&self, other: &PLIsotopy) -> Self {
        self.compose(other).compose(&self.invert()).compose(&other.invert())
    }

    /// `h F`.
    pub fn left_mul(&self, h: &CircleLift) -> Self {
        PLIsotopy { times: self.times.clone(), frames: self.frames.iter().map(|f| h.compose(f)).collect() }
    }

    /// `F h`.
    pub fn right_mul(&self, h: &CircleLift) -> Self {
        PLIsotopy { times: self.times.clone(), frames: self.frames.iter().map(|f| f.compose(h)).collect() }
    }

    /// `F ∗ G`: `F` on `[0, 1/2]`, then `G` on `[1/2, 1]`.
    pub fn concat(&self, other: &PLIsotopy) -> Result<Self, CircleError> {
        let n = self.end().integer_offset(other.start()).ok_or(CircleError::FrameMismatch)?;
        let shift = Q::from_integer(n);
        let half = q(1, 2);
        let mut times: Vec<Q> = self.times.iter().map(|t| t * &half).collect();
        let mut frames = self.frames.clone();
        times.extend(other.times.iter().skip(1).map(|t| &half + t * &half));
        frames.extend(other.frames.iter().skip(1).map(|f| f.shifted(&shift)));
        Ok(PLIsotopy { times, frames })
    }
}

/// Trace of `p` under the frame-wise product `F¹ F² ⋯ Fᵏ` (rightmost acts first).
///
/// Equal to `F¹.compose(F²)…​.trace(p)` but only evaluates at one point per sample.
pub fn product_trace(factors: &[&PLIsotopy], p: &Q) -> PLPath {
    let times = factors.iter().fold(Vec::new(), |acc, f| merge_times(&acc, f.times()));
    let values = times
        .iter()
        .map(|t| factors.iter().rev().fold(p.clone(), |x, f| f.eval(t, &x)))
        .collect();
    PLPath { times, values }
}

fn product_mu(factors: &[&PLIsotopy], p: &Q) -> Q {
    rotation_angle(&product_trace(factors, p))
}

/// An isotopy of `m` disjoint circles, each with a basepoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIsotopy {
    components: Vec<PLIsotopy>,
    basepoints: Vec<Q>,
}

impl MultiIsotopy {
    /// Components are resampled on the union of their time grids.
    pub fn new(components: Vec<PLIsotopy>, basepoints: Vec<Q>) -> Result<Self, CircleError> {
        if components.is_empty() || components.len() != basepoints.len() {
            return Err(CircleError::ComponentMismatch(format!(
                "{} components, {} basepoints",
                components.len(),
                basepoints.len()
            )));
        }
        for p in &basepoints {
            if p.is_negative() || *p >= Q::one() {
                return Err(CircleError::BreakpointOutOfRange(fmt_q(p)));
            }
        }
        let times = components.iter().fold(Vec::new(), |acc, c| merge_times(&acc, c.times()));
        let components = components.iter().map(|c| c.refined(&times)).collect();
        Ok(MultiIsotopy { components, basepoints })
    }

    pub fn identity(m: usize) -> Self {
        MultiIsotopy { components: vec![PLIsotopy::identity(); m], basepoints: vec![Q::zero(); m] }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[PLIsotopy] {
        &self.components
    }

    pub fn basepoints(&self) -> &[Q] {
        &self.basepoints
    }

    pub fn is_loop(&self) -> bool {
        self.components.iter().all(PLIsotopy::is_loop)
    }

    fn zip_with(&self, other: &MultiIsotopy, f: impl Fn(&PLIsotopy, &PLIsotopy) -> PLIsotopy) -> Result<Self, CircleError> {
        if self.basepoints != other.basepoints {
            return Err(CircleError::ComponentMismatch("basepoints differ".into()));
        }
        let components = self.components.iter().zip(&other.components).map(|(a, b)| f(a, b)).collect();
        MultiIsotopy::new(components, self.basepoints.clone())
    }

    pub fn compose(&self, other: &MultiIsotopy) -> Result<Self, CircleError> {
        self.zip_with(other, PLIsotopy::compose)
    }

    pub fn commutator(&self, other: &MultiIsotopy) -> Result<Self, CircleError> {
        self.zip_with(other, PLIsotopy::commutator)
    }

    pub fn invert(&self) -> Self {
        MultiIsotopy {
            components: self.components.iter().map(PLIsotopy::invert).collect(),
            basepoints: self.basepoints.clone(),
        }
    }

    /// `ν(F) = (μ_{p_i}(F_i))_i`.
    pub fn nu(&self) -> Vec<Q> {
        self.components.iter().zip(&self.basepoints).map(|(c, p)| c.mu(p)).collect()
    }

    /// `ν̂(f) = ν(F) + A` for the endpoint `f` of `F`.
    pub fn nu_hat(&self, lattice: &IntLattice) -> Result<AffineCoset, CircleError> {
        if lattice.dim() != self.dim() {
            return Err(LatticeError::DimensionMismatch { expected: self.dim(), found: lattice.dim() }.into());
        }
        Ok(AffineCoset::new(lattice.clone(), self.nu()).expect("dimensions checked"))
    }
}

// ---------------------------------------------------------------------------
// file formats

/// One breakpoint `[x, f̃(x)]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSpec(#[serde(with = "serde_q")] pub Q, #[serde(with = "serde_q")] pub Q);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsotopySpec {
    #[serde(with = "serde_q_vec")]
    pub times: Vec<Q>,
    pub frames: Vec<Vec<PointSpec>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiIsotopySpec {
    pub components: Vec<IsotopySpec>,
    #[serde(with = "serde_q_vec")]
    pub basepoints: Vec<Q>,
}

impl IsotopySpec {
    pub fn build(&self) -> Result<PLIsotopy, CircleError> {
        let frames = self
            .frames
            .iter()
            .map(|pts| CircleLift::new(pts.iter().map(|p| (p.0.clone(), p.1.clone())).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        PLIsotopy::new(self.times.clone(), frames)
    }

    pub fn from_isotopy(iso: &PLIsotopy) -> Self {
        IsotopySpec {
            times: iso.times.clone(),
            frames: iso
                .frames
                .iter()
                .map(|f| f.breakpoints().map(|(x, y)| PointSpec(x.clone(), y.clone())).collect())
                .collect(),
        }
    }
}

impl MultiIsotopySpec {
    pub fn build(&self) -> Result<MultiIsotopy, CircleError> {
        let comps = self.components.iter().map(IsotopySpec::build).collect::<Result<Vec<_>, _>>()?;
        MultiIsotopy::new(comps, self.basepoints.clone())
    }
}

// ---------------------------------------------------------------------------
// random instances and the defect experiment

/// Denominator of random breakpoints and basepoints.
const GRID: i64 = 24;

/// Seeded generator of random PL lifts and isotopies.
pub struct IsotopySampler {
    rng: ChaCha8Rng,
}

impl IsotopySampler {
    /// Independent stream `stream` of the generator seeded with `seed`.
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        IsotopySampler { rng }
    }

    pub fn point(&mut self) -> Q {
        q(self.rng.gen_range(0..GRID), GRID)
    }

    /// 2 to 8 breakpoints, lift value at the first breakpoint within `±max_shift`.
    pub fn lift(&mut self, max_shift: i64) -> CircleLift {
        let k = self.rng.gen_range(2..=8usize);
        let mut xs: Vec<i64> = rand::seq::index::sample(&mut self.rng, GRID as usize, k)
            .into_iter()
            .map(|i| i as i64)
            .collect();
        xs.sort();
        let gaps: Vec<i64> = (0..k).map(|_| self.rng.gen_range(1..=6)).collect();
        let total: i64 = gaps.iter().sum();
        let y0 = q(self.rng.gen_range(-max_shift * GRID..=max_shift * GRID), GRID);
        // y_j = y0 + S_j / total with S_j the partial sums of the gaps
        let mut ys = Vec::with_capacity(k);
        let mut acc = 0;
        for g in &gaps {
            ys.push(&y0 + q(acc, total));
            acc += g;
        }
        let slopes = (0..k)
            .map(|j| {
                let dx = if j + 1 < k { xs[j + 1] - xs[j] } else { xs[0] + GRID - xs[j] };
                q(gaps[j] * GRID, total * dx)
            })
            .collect();
        let xs = xs.into_iter().map(|x| q(x, GRID)).collect();
        CircleLift::with_slopes(xs, ys, slopes)
    }

    fn times(&mut self) -> Vec<Q> {
        let inner = self.rng.gen_range(0..=4usize);
        let mut ts: Vec<i64> = rand::seq::index::sample(&mut self.rng, (GRID - 1) as usize, inner)
            .into_iter()
            .map(|i| i as i64 + 1)
            .collect();
        ts.sort();
        let mut times = vec![Q::zero()];
        times.extend(ts.into_iter().map(|t| q(t, GRID)));
        times.push(Q::one());
        times
    }

    /// Random element of `Isot_0`: starts at the identity, 2 to 6 time samples.
    pub fn based_isotopy(&mut self) -> PLIsotopy {
        let times = self.times();
        let mut frames = vec![CircleLift::identity()];
        frames.extend((1..times.len()).map(|_| self.lift(2)));
        PLIsotopy::new(times, frames).expect("valid grid")
    }

    /// Random loop based at the identity with winding in `-3..=3`.
    pub fn loop_isotopy(&mut self) -> PLIsotopy {
        let times = self.times();
        let mut frames = vec![CircleLift::identity()];
        frames.extend((2..times.len()).map(|_| self.lift(2)));
        frames.push(CircleLift::translation(qi(self.rng.gen_range(-3..=3))));
        PLIsotopy::new(times, frames).expect("valid grid")
    }

    pub fn loop_multi(&mut self, m: usize) -> MultiIsotopy {
        let comps = (0..m).map(|_| self.loop_isotopy()).collect();
        let base = (0..m).map(|_| self.point()).collect();
        MultiIsotopy::new(comps, base).expect("consistent components")
    }

    pub fn based_multi(&mut self, m: usize) -> MultiIsotopy {
        let comps = (0..m).map(|_| self.based_isotopy()).collect();
        let base = (0..m).map(|_| self.point()).collect();
        MultiIsotopy::new(comps, base).expect("consistent components")
    }
}

/// The quantities bounded by the defect inequalities, for one sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectSample {
    /// `|μ(hF) - μ(F)|`, must be `< 1`.
    pub left_translate: Q,
    /// `|μ(Fh) - μ(F)|`, must be `< 1`.
    pub right_translate: Q,
    /// `|μ(FG) - μ(F) - μ(G)|`, must be `< 1`.
    pub product: Q,
    /// `μ(F⁻¹) + μ(f⁻¹F)`, must be exactly `0`.
    pub inverse_identity: Q,
    /// `|μ(F) + μ(F⁻¹)|`, must be `< 1`.
    pub inverse: Q,
    /// `|μ([F, G])|`, must be `< 3`.
    pub commutator: Q,
    /// `|λ(F_q) - λ(F_p)|`, must be `< 1`.
    pub basepoint: Q,
}

pub const DEFECT_NAMES: [&str; 7] =
    ["left_translate", "right_translate", "product", "inverse_identity", "inverse", "commutator", "basepoint"];

impl DefectSample {
    pub fn values(&self) -> [&Q; 7] {
        [
            &self.left_translate,
            &self.right_translate,
            &self.product,
            &self.inverse_identity,
            &self.inverse,
            &self.commutator,
            &self.basepoint,
        ]
    }

    /// Which of the seven inequalities fail.
    pub fn violations(&self) -> [bool; 7] {
        let one = Q::one();
        [
            self.left_translate >= one,
            self.right_translate >= one,
            self.product >= one,
            !self.inverse_identity.is_zero(),
            self.inverse >= one,
            self.commutator >= qi(3),
            self.basepoint >= one,
        ]
    }
}

/// Evaluates every defect quantity for `F, G ∈ Isot_0`, `h` and basepoints `p, q`.
pub fn defect_sample(f: &PLIsotopy, g: &PLIsotopy, h: &CircleLift, p: &Q, q: &Q) -> DefectSample {
    let mu_f = f.mu(p);
    let mu_g = g.mu(p);
    let f_inv = f.invert();
    let g_inv = g.invert();
    let mu_f_inv = f_inv.mu(p);
    let h = PLIsotopy::constant(h.clone());
    let end_inv = PLIsotopy::constant(f.end().inverse());
    DefectSample {
        left_translate: (product_mu(&[&h, f], p) - &mu_f).abs(),
        right_translate: (product_mu(&[f, &h], p) - &mu_f).abs(),
        product: (product_mu(&[f, g], p) - &mu_f - &mu_g).abs(),
        inverse_identity: &mu_f_inv + product_mu(&[&end_inv, f], p),
        inverse: (&mu_f + &mu_f_inv).abs(),
        commutator: product_mu(&[f, g, &f_inv, &g_inv], p).abs(),
        basepoint: (f.mu(q) - &mu_f).abs(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectReport {
    pub seed: u64,
    pub trials: u64,
    /// Per inequality: largest observed value, as a rational string.
    pub max_observed: Vec<(String, String)>,
    /// Per inequality: number of samples where it failed.
    pub violations: Vec<(String, u64)>,
    pub total_violations: u64,
    /// Trials also evaluated on the full sampled isotopies.
    pub cross_checked: u64,
    /// Cross-checked trials where the two evaluations differ.
    pub route_mismatches: u64,
}

impl DefectReport {
    pub fn all_hold(&self) -> bool {
        self.total_violations == 0 && self.route_mismatches == 0
    }
}

/// Every this many trials the sample is also evaluated on the unstraightened isotopies.
const CROSS_CHECK_EVERY: u64 = 64;

/// Runs `trials` independent random samples; trial `i` uses stream `i` of `seed`.
///
/// Samples are evaluated on straightened isotopies, which have the same
/// rotation angles at a fraction of the cost.
pub fn defect_experiment(seed: u64, trials: u64) -> DefectReport {
    let mut max: [Q; 7] = std::array::from_fn(|_| Q::zero());
    let mut counts = [0u64; 7];
    let (mut cross_checked, mut route_mismatches) = (0, 0);
    for trial in 0..trials {
        let mut s = IsotopySampler::new(seed, trial);
        let f = s.based_isotopy();
        let g = s.based_isotopy();
        let h = s.lift(2);
        let (p, q) = (s.point(), s.point());
        let sample = defect_sample(&f.straightened(), &g.straightened(), &h, &p, &q);
        if trial % CROSS_CHECK_EVERY == 0 {
            cross_checked += 1;
            route_mismatches += u64::from(defect_sample(&f, &g, &h, &p, &q) != sample);
        }
        for (i, v) in sample.values().into_iter().enumerate() {
            if v.abs().cmp(&max[i]) == Ordering::Greater {
                max[i] = v.abs();
            }
        }
        for (i, bad) in sample.violations().into_iter().enumerate() {
            counts[i] += u64::from(bad);
        }
    }
    DefectReport {
        seed,
        trials,
        max_observed: DEFECT_NAMES.iter().zip(&max).map(|(n, v)| (n.to_string(), fmt_q(v))).collect(),
        violations: DEFECT_NAMES.iter().zip(counts).map(|(n, c)| (n.to_string(), c)).collect(),
        total_violations: counts.iter().sum(),
        cross_checked,
        route_mismatches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lift(pts: &[(i64, i64, i64, i64)]) -> CircleLift {
        CircleLift::new(pts.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d))).collect()).unwrap()
    }

    #[test]
    fn lift_validation() {
        assert_eq!(CircleLift::new(vec![]).unwrap_err(), CircleError::EmptyLift);
        assert!(matches!(
            CircleLift::new(vec![(qi(1), qi(0))]),
            Err(CircleError::BreakpointOutOfRange(_))
        ));
        // wraparound violation: last value must stay below first + 1
        assert_eq!(
            CircleLift::new(vec![(qi(0), qi(0)), (q(1, 2), q(5, 4))]).unwrap_err(),
            CircleError::NotIncreasing
        );
        assert_eq!(
            CircleLift::new(vec![(qi(0), qi(0)), (q(1, 2), qi(0))]).unwrap_err(),
            CircleError::NotIncreasing
        );
    }

    #[test]
    fn canonical_form_drops_collinear_points() {
        let t = lift(&[(0, 1, 1, 4), (1, 2, 3, 4)]);
        assert_eq!(t, CircleLift::translation(q(1, 4)));
        let f = lift(&[(0, 1, 0, 1), (1, 4, 1, 4), (1, 2, 1, 2), (3, 4, 7, 8)]);
        assert_eq!(f.len(), 3);
        assert_eq!(f, lift(&[(0, 1, 0, 1), (1, 2, 1, 2), (3, 4, 7, 8)]));
    }

    #[test]
    fn eval_is_periodic_and_piecewise_linear() {
        let f = lift(&[(0, 1, 0, 1), (1, 2, 3, 4)]);
        assert_eq!(f.eval(&q(1, 4)), q(3, 8));
        assert_eq!(f.eval(&q(3, 4)), q(7, 8));
        assert_eq!(f.eval(&q(5, 4)), q(11, 8));
        assert_eq!(f.eval(&q(-1, 4)), q(-1, 8));
    }

    #[test]
    fn inverse_and_compose() {
        let f = lift(&[(0, 1, 1, 3), (1, 2, 3, 4)]);
        let g = lift(&[(1, 8, -2, 1), (1, 3, -7, 4), (5, 6, -3, 2)]);
        assert!(f.compose(&f.inverse()).is_identity_map());
        assert_eq!(f.compose(&f.inverse()), CircleLift::identity());
        assert_eq!(g.inverse().compose(&g), CircleLift::identity());
        let fg = f.compose(&g);
        for k in -10..10 {
            let x = q(k, 7);
            assert_eq!(fg.eval(&x), f.eval(&g.eval(&x)));
        }
    }

    #[test]
    fn rotation_angle_examples() {
        assert_eq!(rotation_angle(&PLPath::delta(q(7, 3))), q(7, 3));
        assert_eq!(rotation_angle(&PLPath::constant(q(1, 5))), qi(0));
        let winding = PLPath::new(vec![qi(0), q(1, 3), qi(1)], vec![q(1, 10), q(-1, 2), q(21, 10)]).unwrap();
        assert_eq!(rotation_angle(&winding), qi(2));
        assert_eq!(PLPath::new(vec![qi(0)], vec![qi(0)]).unwrap_err(), CircleError::BadTimes);
    }

    #[test]
    fn path_concat_and_reparametrize() {
        let a = PLPath::delta(q(1, 2));
        let b = PLPath::delta(q(3, 4)).shift_lift(5);
        let b = PLPath::new(b.times().to_vec(), b.values().iter().map(|v| v + q(1, 2)).collect()).unwrap();
        let ab = a.concat(&b).unwrap();
        assert_eq!(rotation_angle(&ab), q(5, 4));
        assert_eq!(a.concat(&PLPath::constant(q(1, 3))).unwrap_err(), CircleError::FrameMismatch);

        let sigma = PLPath::new(vec![qi(0), q(1, 2), qi(1)], vec![qi(0), q(1, 5), qi(1)]).unwrap();
        let gamma = PLPath::new(vec![qi(0), q(1, 3), qi(1)], vec![qi(0), qi(2), q(-1, 2)]).unwrap();
        let re = gamma.reparametrize(&sigma).unwrap();
        assert_eq!(rotation_angle(&re), rotation_angle(&gamma));
        assert_eq!(re.eval(&q(1, 4)), gamma.eval(&q(1, 10)));
    }

    #[test]
    fn mu_examples() {
        for p in [qi(0), q(1, 3), q(5, 7)] {
            assert_eq!(PLIsotopy::rotation(q(3, 2)).mu(&p), q(3, 2));
            assert_eq!(PLIsotopy::identity().mu(&p), qi(0));
        }
        let turn = PLIsotopy::new(
            vec![qi(0), q(1, 2), qi(1)],
            vec![CircleLift::identity(), CircleLift::translation(q(1, 2)), CircleLift::translation(qi(1))],
        )
        .unwrap();
        assert!(turn.is_loop());
        assert_eq!(turn.mu(&q(1, 4)), qi(1));
    }

    #[test]
    fn isotopy_group_operations() {
        let mut s = IsotopySampler::new(7, 0);
        let f = s.based_isotopy();
        let id = f.compose(&f.invert());
        assert!(id.frames().iter().all(|fr| *fr == CircleLift::identity()));

        let half = PLIsotopy::rotation(q(1, 2));
        let rest = PLIsotopy::rotation_from(q(1, 2), q(1, 2));
        assert_eq!(half.concat(&rest).unwrap().mu(&qi(0)), qi(1));
        assert_eq!(half.concat(&half).unwrap_err(), CircleError::FrameMismatch);
    }

    #[test]
    fn composition_matches_endpoint_lifts() {
        // μ of a product depends only on composed endpoint lifts
        let mut s = IsotopySampler::new(11, 3);
        for _ in 0..20 {
            let f = s.based_isotopy();
            let g = s.based_isotopy();
            let p = s.point();
            let direct = f.end().eval(&g.end().eval(&p)) - f.start().eval(&g.start().eval(&p));
            assert_eq!(f.compose(&g).mu(&p), direct);
            let c = f.commutator(&g);
            let fi = f.end().inverse();
            let gi = g.end().inverse();
            let e = f.end().eval(&g.end().eval(&fi.eval(&gi.eval(&p))));
            assert_eq!(c.mu(&p), e - &p);
        }
    }

    #[test]
    fn product_trace_matches_framewise_product() {
        let mut s = IsotopySampler::new(3, 1);
        for _ in 0..10 {
            let f = s.based_isotopy();
            let g = s.based_isotopy();
            let p = s.point();
            let fi = f.invert();
            assert_eq!(product_trace(&[&f, &g], &p), f.compose(&g).trace(&p));
            assert_eq!(product_trace(&[&f, &g, &fi], &p), f.compose(&g).compose(&fi).trace(&p));
            let t = q(1, 7);
            assert_eq!(f.eval(&t, &p), f.frame_at(&t).eval(&p));
        }
    }

    #[test]
    fn sampled_lifts_match_validated_construction() {
        let mut s = IsotopySampler::new(4, 4);
        for _ in 0..50 {
            let f = s.lift(2);
            let rebuilt = CircleLift::new(f.breakpoints().map(|(x, y)| (x.clone(), y.clone())).collect()).unwrap();
            assert_eq!(f, rebuilt);
        }
    }

    #[test]
    fn identity_defect_sample_is_zero() {
        let id = PLIsotopy::identity();
        let sample = defect_sample(&id, &id, &CircleLift::identity(), &qi(0), &qi(0));
        assert!(sample.values().iter().all(|v| v.is_zero()));
        assert!(!sample.violations().iter().any(|&b| b));
    }

    #[test]
    fn defect_experiment_small_run() {
        let report = defect_experiment(1, 200);
        assert!(report.all_hold(), "{report:?}");
        assert_eq!(defect_experiment(1, 20), defect_experiment(1, 20));
    }

    #[test]
    fn nu_examples() {
        let loops = MultiIsotopy::new(
            vec![PLIsotopy::rotation(qi(1)), PLIsotopy::rotation(qi(-2))],
            vec![qi(0), q(1, 2)],
        )
        .unwrap();
        assert!(loops.is_loop());
        assert_eq!(loops.nu(), vec![qi(1), qi(-2)]);
        assert_eq!(MultiIsotopy::identity(3).nu(), vec![qi(0); 3]);

        let a = IntLattice::normalize(2, &[vec![2, 0], vec![0, 3]]).unwrap();
        let shifted = MultiIsotopy::new(
            vec![PLIsotopy::rotation(q(6, 5)), PLIsotopy::rotation(q(-5, 2))],
            vec![qi(0), qi(0)],
        )
        .unwrap();
        assert_eq!(shifted.nu_hat(&a).unwrap().theta().theta, q(4, 5));
        assert_eq!(loops.nu_hat(&IntLattice::full(2).unwrap()).unwrap().theta().theta, qi(0));
        let one = MultiIsotopy::new(vec![PLIsotopy::rotation(q(5, 2))], vec![qi(0)]).unwrap();
        assert_eq!(one.nu_hat(&IntLattice::cyclic(2)).unwrap().theta().theta, q(1, 2));
        assert!(one.nu_hat(&a).is_err());
    }

    #[test]
    fn multi_isotopy_refines_to_common_grid() {
        let mut s = IsotopySampler::new(5, 9);
        let m = s.based_multi(3);
        let t = m.components()[0].times().to_vec();
        assert!(m.components().iter().all(|c| c.times() == t.as_slice()));
    }

    #[test]
    fn spec_round_trip() {
        let mut s = IsotopySampler::new(2, 2);
        let f = s.based_isotopy();
        let json = serde_json::to_string(&IsotopySpec::from_isotopy(&f)).unwrap();
        let back: IsotopySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.build().unwrap(), f);
    }
}
