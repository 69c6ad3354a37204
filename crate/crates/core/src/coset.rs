//! Minimal ℓ∞ representatives of affine cosets `x + A`.
//!
//! The search walks the Hermite basis one pivot at a time. Row `j` is the
//! only basis row that still varies at pivot column `p_j` once rows
//! `1..j-1` are fixed, so each coefficient has an exact integer range for any
//! radius bound, and every column left of `p_{j+1}` is final after row `j`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::lattice::{IntLattice, LatticeError};
use crate::rational::{ceil, q, sup_norm, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CosetError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("operation needs a full-rank lattice (rank {rank} < {dim})")]
    RankDeficient { rank: usize, dim: usize },
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
}

/// The coset `offset + A` in `ℝ^m / A`.
#[derive(Debug, Clone)]
pub struct AffineCoset {
    lattice: IntLattice,
    offset: Vec<Q>,
}

/// `θ_z` and the finite set `Θ_z` of points of `z` attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearestData {
    pub theta: Q,
    /// Lexicographically sorted.
    pub points: Vec<Vec<Q>>,
    /// Norm of the starting representative; the search is complete inside this radius.
    pub radius: Q,
}

fn int(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

/// Shift into `(-d/2, d/2]` by a multiple of `d`; returns the multiple subtracted.
fn centered_multiple(x: &Q, d: i64) -> BigInt {
    // x/d - t ∈ (-1/2, 1/2]  ⇔  t = ⌈x/d - 1/2⌉
    ceil(&(x / int(d) - q(1, 2)))
}

impl AffineCoset {
    pub fn new(lattice: IntLattice, offset: Vec<Q>) -> Result<Self, CosetError> {
        if offset.len() != lattice.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: lattice.dim(),
                found: offset.len(),
            }
            .into());
        }
        Ok(AffineCoset { lattice, offset })
    }

    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    pub fn offset(&self) -> &[Q] {
        &self.offset
    }

    /// Whether `y` lies in this coset.
    pub fn contains(&self, y: &[Q]) -> Result<bool, CosetError> {
        if y.len() != self.lattice.dim() {
            return Err(LatticeError::DimensionMismatch { expected: self.lattice.dim(), found: y.len() }.into());
        }
        let diff: Vec<Q> = y.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
        if diff.iter().any(|d| !d.is_integer()) {
            return Ok(false);
        }
        let v: Vec<i64> = diff
            .iter()
            .map(|d| i64::try_from(d.to_integer()).map_err(|_| LatticeError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(self.lattice.member(&v)?)
    }

    /// Offset reduced against the basis so each pivot coordinate lies in `(-d_j/2, d_j/2]`.
    fn reduced_offset(&self) -> Vec<Q> {
        let mut y = self.offset.clone();
        for (row, &p) in self.lattice.basis().iter().zip(self.lattice.pivots()) {
            let t = Q::from_integer(centered_multiple(&y[p], row[p]));
            for (yi, &b) in y.iter_mut().zip(row) {
                *yi -= &t * int(b);
            }
        }
        y
    }

    /// The representative in `J_A = ∏ (-k_i/2, k_i/2]` picked by coordinate-wise
    /// reduction against the triangular basis.
    pub fn canonical_rep(&self) -> Result<Vec<Q>, CosetError> {
        if !self.lattice.is_full_rank() {
            return Err(CosetError::RankDeficient { rank: self.lattice.rank(), dim: self.lattice.dim() });
        }
        Ok(self.reduced_offset())
    }

    /// Exact `θ_z = min ‖z‖∞` and all minimizers.
    pub fn theta(&self) -> NearestData {
        let reduced = self.reduced_offset();
        // the reduced point can be far out when the pivots are unbalanced
        let start = if sup_norm(&self.offset) < sup_norm(&reduced) { self.offset.clone() } else { reduced };
        let radius = sup_norm(&start);
        let mut search = Search {
            basis: self.lattice.basis(),
            pivots: self.lattice.pivots(),
            dim: self.lattice.dim(),
            best: radius.clone(),
            points: Vec::new(),
        };
        let mut y = start;
        search.descend(0, &mut y);
        let mut points = search.points;
        points.sort();
        points.dedup();
        NearestData { theta: search.best, points, radius }
    }
}

struct Search<'a> {
    basis: &'a [Vec<i64>],
    pivots: &'a [usize],
    dim: usize,
    best: Q,
    points: Vec<Vec<Q>>,
}

impl Search<'_> {
    /// Columns in `lo..hi` are final; prune when any exceeds the current best.
    fn columns_ok(&self, y: &[Q], lo: usize, hi: usize) -> bool {
        y[lo..hi].iter().all(|x| x.abs() <= self.best)
    }

    fn descend(&mut self, j: usize, y: &mut [Q]) {
        let first = self.pivots.get(j).copied().unwrap_or(self.dim);
        let prev_end = if j == 0 { 0 } else { self.pivots[j - 1] + 1 };
        if !self.columns_ok(y, prev_end, first) {
            return;
        }
        if j == self.basis.len() {
            let norm = sup_norm(y);
            if norm < self.best {
                self.best = norm.clone();
                self.points.clear();
            }
            if norm == self.best {
                self.points.push(y.to_vec());
            }
            return;
        }
        let row = &self.basis[j];
        // t in zigzag order from the value that centers y[first]; |y_first + t d|
        // grows on each side, so a side stops at the first value above best
        let mut t_up = -centered_multiple(&y[first], row[first]);
        let mut t_down: BigInt = &t_up - 1;
        let (mut up, mut down) = (true, true);
        while up || down {
            if up {
                up = self.visit(j, y, &Q::from_integer(t_up.clone()));
                t_up += 1;
            }
            if down {
                down = self.visit(j, y, &Q::from_integer(t_down.clone()));
                t_down -= 1;
            }
        }
    }

    /// Adds `t` times row `j`, recurses, and undoes; false if that row multiple is already too far.
    fn visit(&mut self, j: usize, y: &mut [Q], t: &Q) -> bool {
        let basis = self.basis;
        let row = &basis[j];
        let p = self.pivots[j];
        if (&y[p] + t * int(row[p])).abs() > self.best {
            return false;
        }
        shift(y, row, t);
        self.descend(j + 1, y);
        shift(y, row, &-t);
        true
    }
}

fn shift(y: &mut [Q], row: &[i64], t: &Q) {
    for (yi, &b) in y.iter_mut().zip(row) {
        if b != 0 {
            *yi += t * int(b);
        }
    }
}

/// A certified enclosure `lo ≤ θ_φ ≤ hi`, or `θ_φ = ∞` for rank-deficient `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThetaSup {
    Interval { lo: Q, hi: Q },
    Infinite,
}

impl ThetaSup {
    pub fn is_exact(&self) -> bool {
        matches!(self, ThetaSup::Interval { lo, hi } if lo == hi)
    }
}

/// `sup_z θ_z` over `ℝ^m/A`.
///
/// Exact `k/2` for `m = 1`. Otherwise branch and bound over boxes covering
/// `J_A`: `θ` is 1-Lipschitz for ℓ∞, so a box with center `c` and
/// half-width `h` satisfies `sup θ ≤ θ(c) + h`; corners and centers supply
/// the lower bound. Boxes are refined until `hi - lo ≤ epsilon`.
pub fn theta_sup(lattice: &IntLattice, epsilon: &Q) -> Result<ThetaSup, CosetError> {
    if !epsilon.is_positive() {
        return Err(CosetError::NonPositiveEpsilon);
    }
    if !lattice.is_full_rank() {
        return Ok(ThetaSup::Infinite);
    }
    let info = lattice.quotient_info();
    let k = info.k_finite().expect("full rank has finite orders");
    let half_k = q(k as i64, 2);
    if lattice.dim() == 1 {
        return Ok(ThetaSup::Interval { lo: half_k.clone(), hi: half_k });
    }
    let halves: Vec<Q> = info
        .k
        .iter()
        .map(|o| match o {
            crate::lattice::Order::Finite(k) => q(*k as i64, 2),
            crate::lattice::Order::Infinite => unreachable!("full rank"),
        })
        .collect();
    let theta_at = |x: &[Q]| {
        AffineCoset::new(lattice.clone(), x.to_vec()).expect("dimension").theta().theta
    };
    let m = lattice.dim();
    // boxes as (center, half-widths); all share the same half-widths per level
    let mut centers = vec![vec![Q::zero(); m]];
    let mut widths = halves.clone();
    let mut lo = Q::zero();
    loop {
        let h = widths.iter().max().cloned().expect("m ≥ 1");
        let mut upper = Q::zero();
        let mut scored = Vec::with_capacity(centers.len());
        for c in &centers {
            let t = theta_at(c);
            if t > lo {
                lo = t.clone();
            }
            for corner in 0..(1usize << m) {
                let x: Vec<Q> = (0..m)
                    .map(|i| if corner >> i & 1 == 1 { &c[i] + &widths[i] } else { &c[i] - &widths[i] })
                    .collect();
                let tc = theta_at(&x);
                if tc > lo {
                    lo = tc;
                }
            }
            let ub = &t + &h;
            if ub > upper {
                upper = ub.clone();
            }
            scored.push((c.clone(), ub));
        }
        let hi = if upper < half_k { upper } else { half_k.clone() };
        if &hi - &lo <= *epsilon {
            return Ok(ThetaSup::Interval { lo, hi });
        }
        let next_widths: Vec<Q> = widths.iter().map(|w| w / int(2)).collect();
        let mut next = Vec::new();
        for (c, ub) in scored {
            if ub <= lo {
                continue;
            }
            for child in 0..(1usize << m) {
                next.push(
                    (0..m)
                        .map(|i| {
                            if child >> i & 1 == 1 {
                                &c[i] + &next_widths[i]
                            } else {
                                &c[i] - &next_widths[i]
                            }
                        })
                        .collect(),
                );
            }
        }
        centers = next;
        widths = next_widths;
    }
}
