//! Sublattices `A < ℤ^m` in row-style Hermite normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::rational::Q;

/// Ambient dimensions above this are refused.
pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ambient dimension {0} is outside 1..={MAX_DIM}")]
    DimensionOutOfRange(usize),
    #[error("integer overflow during reduction")]
    Overflow,
    #[error("lattice has full rank, no annihilating functional exists")]
    FullRank,
}

/// Serialized form: `{"m": 2, "generators": [[2,0],[0,3]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub m: usize,
    pub generators: Vec<Vec<i64>>,
}

/// A sublattice of `ℤ^m` together with its Hermite normal form.
///
/// The basis rows are linearly independent, upper triangular with strictly
/// increasing pivot columns, positive pivots, and entries above each pivot
/// reduced into `[0, pivot)`. That makes the basis unique for the lattice,
/// and equality compares lattices, not the generators they were built from.
#[derive(Debug, Clone)]
pub struct IntLattice {
    dim: usize,
    generators: Vec<Vec<i64>>,
    basis: Vec<Vec<i64>>,
    pivots: Vec<usize>,
}

impl PartialEq for IntLattice {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.basis == other.basis
    }
}

impl Eq for IntLattice {}

fn narrow(x: i128) -> Result<i64, LatticeError> {
    i64::try_from(x).map_err(|_| LatticeError::Overflow)
}

/// `target -= factor * source`, entrywise.
fn sub_multiple(target: &mut [i64], source: &[i64], factor: i64) -> Result<(), LatticeError> {
    for (t, s) in target.iter_mut().zip(source) {
        *t = narrow(*t as i128 - factor as i128 * *s as i128)?;
    }
    Ok(())
}

fn hermite_normal_form(dim: usize, rows: &[Vec<i64>]) -> Result<Vec<Vec<i64>>, LatticeError> {
    let mut mat: Vec<Vec<i64>> = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let mut r = 0;
    for col in 0..dim {
        if r == mat.len() {
            break;
        }
        loop {
            // smallest nonzero entry in this column becomes the working pivot
            let best = (r..mat.len())
                .filter(|&i| mat[i][col] != 0)
                .min_by_key(|&i| mat[i][col].unsigned_abs());
            let Some(best) = best else { break };
            mat.swap(r, best);
            let mut done = true;
            for i in r + 1..mat.len() {
                if mat[i][col] != 0 {
                    let f = Integer::div_floor(&mat[i][col], &mat[r][col]);
                    let pivot_row = mat[r].clone();
                    sub_multiple(&mut mat[i], &pivot_row, f)?;
                    if mat[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if mat[r][col] == 0 {
            continue;
        }
        if mat[r][col] < 0 {
            for x in mat[r].iter_mut() {
                *x = x.checked_neg().ok_or(LatticeError::Overflow)?;
            }
        }
        let pivot_row = mat[r].clone();
        for i in 0..r {
            let f = Integer::div_floor(&mat[i][col], &pivot_row[col]);
            sub_multiple(&mut mat[i], &pivot_row, f)?;
        }
        r += 1;
    }
    mat.truncate(r);
    Ok(mat)
}

impl IntLattice {
    /// The lattice spanned by `generators` in `ℤ^dim`.
    pub fn normalize(dim: usize, generators: &[Vec<i64>]) -> Result<Self, LatticeError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(LatticeError::DimensionOutOfRange(dim));
        }
        for g in generators {
            if g.len() != dim {
                return Err(LatticeError::DimensionMismatch { expected: dim, found: g.len() });
            }
        }
        let basis = hermite_normal_form(dim, generators)?;
        let pivots = basis
            .iter()
            .map(|row| row.iter().position(|&x| x != 0).expect("nonzero basis row"))
            .collect();
        Ok(IntLattice { dim, generators: generators.to_vec(), basis, pivots })
    }

    pub fn from_spec(spec: &LatticeSpec) -> Result<Self, LatticeError> {
        Self::normalize(spec.m, &spec.generators)
    }

    pub fn to_spec(&self) -> LatticeSpec {
        LatticeSpec { m: self.dim, generators: self.generators.clone() }
    }

    /// `ℤ^dim` itself.
    pub fn full(dim: usize) -> Result<Self, LatticeError> {
        let gens = (0..dim)
            .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
            .collect::<Vec<_>>();
        Self::normalize(dim, &gens)
    }

    /// `kℤ ⊂ ℤ`.
    pub fn cyclic(k: i64) -> Self {
        Self::normalize(1, &[vec![k]]).expect("one-dimensional lattice")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    fn check_len(&self, len: usize) -> Result<(), LatticeError> {
        if len == self.dim {
            Ok(())
        } else {
            Err(LatticeError::DimensionMismatch { expected: self.dim, found: len })
        }
    }

    /// Exact membership test by back-substitution against the basis.
    pub fn member(&self, v: &[i64]) -> Result<bool, LatticeError> {
        self.check_len(v.len())?;
        let mut rest = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if rest[..p].iter().any(|&x| x != 0) {
                return Ok(false);
            }
            if rest[p] % row[p] != 0 {
                return Ok(false);
            }
            let f = rest[p] / row[p];
            sub_multiple(&mut rest, row, f)?;
        }
        Ok(rest.iter().all(|&x| x == 0))
    }

    /// Rational coefficients `c` with `Σ c_j b_j = v`, if `v` lies in the ℚ-span.
    pub fn rational_coordinates(&self, v: &[Q]) -> Result<Option<Vec<Q>>, LatticeError> {
        self.check_len(v.len())?;
        let mut rest: Vec<Q> = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.rank());
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if rest[..p].iter().any(|x| !x.is_zero()) {
                return Ok(None);
            }
            let c = &rest[p] / Q::from_integer(BigInt::from(row[p]));
            for (r, &b) in rest.iter_mut().zip(row) {
                *r -= &c * Q::from_integer(BigInt::from(b));
            }
            coeffs.push(c);
        }
        Ok(rest.iter().all(|x| x.is_zero()).then_some(coeffs))
    }

    /// Invariant factors of the basis matrix (Smith normal form diagonal).
    pub fn invariant_factors(&self) -> Vec<u64> {
        smith_diagonal(&self.basis)
    }

    /// `min{t ≥ 1 : t·e_i ∈ A}`, or infinite when `e_i` is outside the ℚ-span of `A`.
    pub fn coordinate_order(&self, i: usize) -> Order {
        let e: Vec<Q> = (0..self.dim).map(|j| if j == i { Q::one() } else { Q::zero() }).collect();
        match self.rational_coordinates(&e).expect("length matches") {
            None => Order::Infinite,
            Some(c) => {
                let l = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                Order::Finite(l.to_u64().expect("order fits in u64"))
            }
        }
    }

    pub fn quotient_info(&self) -> QuotientInfo {
        let orders: Vec<Order> = (0..self.dim).map(|i| self.coordinate_order(i)).collect();
        let k = orders.iter().copied().max().unwrap_or(Order::Finite(1));
        let rank = self.rank();
        let k_hat = match (rank == self.dim, k) {
            (true, Order::Finite(k)) => Some(k_hat(k)),
            _ => None,
        };
        let cyclic_generator = (self.dim == 1).then(|| self.basis.first().map_or(0, |r| r[0] as u64));
        QuotientInfo {
            rank,
            k: orders,
            m: self.dim,
            k_max: k,
            k_hat,
            invariant_factors: self.invariant_factors(),
            cyclic_generator,
            extension: rank < self.dim,
        }
    }

    /// A primitive integer vector annihilating `A`, for rank-deficient `A`.
    ///
    /// It is the unique primitive vector supported on the pivot columns plus
    /// the first non-pivot column, with that column's entry normalized so the
    /// first nonzero entry is positive.
    pub fn kernel_functional(&self) -> Result<Vec<i64>, LatticeError> {
        let free = (0..self.dim)
            .find(|c| !self.pivots.contains(c))
            .ok_or(LatticeError::FullRank)?;
        let mut c = vec![Q::zero(); self.dim];
        c[free] = Q::one();
        for (row, &p) in self.basis.iter().zip(&self.pivots).rev() {
            let s: Q = (p + 1..self.dim)
                .map(|k| &c[k] * Q::from_integer(BigInt::from(row[k])))
                .sum();
            c[p] = -s / Q::from_integer(BigInt::from(row[p]));
        }
        let den = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut ints: Vec<BigInt> = c.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let first_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
        for x in ints.iter_mut() {
            *x = &*x / &g;
            if first_negative {
                *x = -&*x;
            }
        }
        ints.iter().map(|x| x.to_i64().ok_or(LatticeError::Overflow)).collect()
    }
}

impl fmt::Display for IntLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.basis.is_empty() {
            return write!(f, "{{0}} < Z^{}", self.dim);
        }
        write!(f, "<")?;
        for (i, row) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{row:?}")?;
        }
        write!(f, "> < Z^{}", self.dim)
    }
}

/// `2⌊k/2⌋ + 3`.
pub fn k_hat(k: u64) -> u64 {
    2 * (k / 2) + 3
}

/// Diagonal of the Smith normal form, zeros dropped.
pub fn smith_diagonal(rows: &[Vec<i64>]) -> Vec<u64> {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let nr = a.len();
    let nc = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    for t in 0..nr.min(nc) {
        loop {
            let pos = (t..nr)
                .flat_map(|i| (t..nc).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].unsigned_abs());
            let Some((pi, pj)) = pos else { break };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..nr {
                let f = Integer::div_floor(&a[i][t], &p);
                if f != 0 {
                    for j in t..nc {
                        a[i][j] -= f * a[t][j];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..nc {
                let f = Integer::div_floor(&a[t][j], &p);
                if f != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= f * row[t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // the pivot must divide the remaining block
            let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in t..nc {
                        let v = a[i][j];
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        if a[t][t] == 0 {
            break;
        }
        diag.push(a[t][t].unsigned_abs() as u64);
    }
    diag
}

/// Order of a coset in `ℤ^m/A`: a positive integer or `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Finite(k) => s.serialize_u64(*k),
            Order::Infinite => s.serialize_str("inf"),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

/// Invariants of `ℤ^m/A`.
///
/// `k` lists the per-coordinate orders `ord[e_i]`. When `rank < m` the
/// infinite orders are a convention of this crate (`extension = true`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientInfo {
    pub rank: usize,
    pub k: Vec<Order>,
    pub m: usize,
    pub k_max: Order,
    pub k_hat: Option<u64>,
    pub invariant_factors: Vec<u64>,
    /// For `m = 1`, the unique `k ≥ 0` with `A = kℤ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cyclic_generator: Option<u64>,
    pub extension: bool,
}

impl QuotientInfo {
    pub fn full_rank(&self) -> bool {
        self.rank == self.m
    }

    pub fn k_finite(&self) -> Option<u64> {
        match self.k_max {
            Order::Finite(k) if self.full_rank() => Some(k),
            _ => None,
        }
    }
}
