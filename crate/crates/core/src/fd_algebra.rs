//! Exact arithmetic in `⊕_j M_{n_j}` with the diagonal as Cartan subalgebra.
//!
//! Elements are stored per summand as sparse maps `(row, col) → scalar` in
//! row-major order, with no stored zeros. Scalars are complex numbers with
//! rational real and imaginary parts; arithmetic is checked and panics on
//! overflow rather than wrapping.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type R = Ratio<i128>;

/// Complex rational. Both parts are kept in lowest terms, so equality is
/// structural.
#[derive(Clone, Copy, Debug)]
pub struct Scalar {
    re: R,
    im: R,
}

fn checked<T>(x: Option<T>) -> T {
    x.expect("scalar arithmetic overflowed i128")
}

impl Scalar {
    pub fn new(re: R, im: R) -> Self {
        Scalar { re, im }
    }

    pub fn real(n: i128, d: i128) -> Self {
        Scalar::new(R::new(n, d), R::zero())
    }

    pub fn complex(re: (i128, i128), im: (i128, i128)) -> Self {
        Scalar::new(R::new(re.0, re.1), R::new(im.0, im.1))
    }

    pub fn zero() -> Self {
        Scalar::new(R::zero(), R::zero())
    }

    pub fn one() -> Self {
        Scalar::new(R::one(), R::zero())
    }

    pub fn re(&self) -> R {
        self.re
    }

    pub fn im(&self) -> R {
        self.im
    }

    pub fn is_zero(&self) -> bool {
        *self.re.numer() == 0 && *self.im.numer() == 0
    }

    pub fn is_one(&self) -> bool {
        *self.re.numer() == 1 && *self.re.denom() == 1 && *self.im.numer() == 0
    }

    fn is_real(&self) -> bool {
        *self.im.numer() == 0
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re, -self.im)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        self.re.numer() == o.re.numer()
            && self.re.denom() == o.re.denom()
            && self.im.numer() == o.im.numer()
            && self.im.denom() == o.im.denom()
    }
}

impl Eq for Scalar {}

impl std::hash::Hash for Scalar {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        (self.re.numer(), self.re.denom(), self.im.numer(), self.im.denom()).hash(h);
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        if self.is_real() && o.is_real() {
            return Scalar::new(checked(self.re.checked_add(&o.re)), R::zero());
        }
        Scalar::new(
            checked(self.re.checked_add(&o.re)),
            checked(self.im.checked_add(&o.im)),
        )
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        Scalar::new(
            checked(self.re.checked_sub(&o.re)),
            checked(self.im.checked_sub(&o.im)),
        )
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        if self.is_one() {
            return o;
        }
        if o.is_one() {
            return self;
        }
        if self.is_real() && o.is_real() {
            return Scalar::new(checked(self.re.checked_mul(&o.re)), R::zero());
        }
        let rr = checked(self.re.checked_mul(&o.re));
        let ii = checked(self.im.checked_mul(&o.im));
        let ri = checked(self.re.checked_mul(&o.im));
        let ir = checked(self.im.checked_mul(&o.re));
        Scalar::new(checked(rr.checked_sub(&ii)), checked(ri.checked_add(&ir)))
    }
}

fn fmt_ratio(x: &R) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", fmt_ratio(&self.re))
        } else {
            write!(f, "{}+{}i", fmt_ratio(&self.re), fmt_ratio(&self.im))
        }
    }
}

/// Summand sizes of `⊕_j M_{n_j}`. Cloning is cheap.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct AlgebraShape(Arc<[usize]>);

impl TryFrom<Vec<usize>> for AlgebraShape {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        AlgebraShape::new(v)
    }
}

impl From<AlgebraShape> for Vec<usize> {
    fn from(s: AlgebraShape) -> Vec<usize> {
        s.0.to_vec()
    }
}

impl AlgebraShape {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Argument("an algebra needs at least one summand".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::Argument("summand sizes must be positive".into()));
        }
        Ok(AlgebraShape(sizes.into()))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn summands(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self, j: usize) -> usize {
        self.0[j]
    }

    /// Dimension of the diagonal, `Σ n_j`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// All matrix units `e^j_{pq}`, summand-major then row-major.
    pub fn units(&self) -> Vec<MatrixUnitRef> {
        let mut out = Vec::new();
        for (summand, &n) in self.0.iter().enumerate() {
            for row in 0..n {
                for col in 0..n {
                    out.push(MatrixUnitRef { summand, row, col });
                }
            }
        }
        out
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| format!("M{n}")).collect();
        write!(f, "{}", parts.join("⊕"))
    }
}

/// The matrix unit `e^summand_{row,col}` (zero-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixUnitRef {
    pub summand: usize,
    pub row: usize,
    pub col: usize,
}

impl MatrixUnitRef {
    pub fn new(summand: usize, row: usize, col: usize) -> Self {
        MatrixUnitRef { summand, row, col }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockMatrix {
    shape: AlgebraShape,
    blocks: Vec<Block>,
}

/// Nonzero entries of one summand, sorted by `(row, col)`.
pub type Block = Vec<((usize, usize), Scalar)>;

/// Sorts, merges duplicate positions and drops zeros.
fn normalize(mut b: Block) -> Block {
    b.sort_unstable_by_key(|e| e.0);
    let mut out: Block = Vec::with_capacity(b.len());
    for (k, x) in b {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 = last.1 + x,
            _ => out.push((k, x)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

/// Debug serialization: per summand, `(row, col, re, im)` with one-based
/// indices and fraction strings.
pub type Triplets = Vec<Vec<(usize, usize, String, String)>>;

impl BlockMatrix {
    pub fn zero(shape: &AlgebraShape) -> Self {
        BlockMatrix {
            shape: shape.clone(),
            blocks: vec![Vec::new(); shape.summands()],
        }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        let mut m = Self::zero(shape);
        for (j, &n) in shape.sizes().iter().enumerate() {
            for p in 0..n {
                m.blocks[j].push(((p, p), Scalar::one()));
            }
        }
        m
    }

    pub fn unit(shape: &AlgebraShape, r: MatrixUnitRef) -> Result<Self> {
        check_ref(shape, r)?;
        let mut m = Self::zero(shape);
        m.blocks[r.summand].push(((r.row, r.col), Scalar::one()));
        Ok(m)
    }

    pub fn from_entries<I>(shape: &AlgebraShape, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MatrixUnitRef, Scalar)>,
    {
        let mut m = Self::zero(shape);
        for (r, x) in entries {
            check_ref(shape, r)?;
            m.add_entry(r.summand, r.row, r.col, x);
        }
        Ok(m)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn block(&self, j: usize) -> &[((usize, usize), Scalar)] {
        &self.blocks[j]
    }

    pub fn get(&self, j: usize, row: usize, col: usize) -> Scalar {
        let b = &self.blocks[j];
        b.binary_search_by_key(&(row, col), |e| e.0)
            .map_or_else(|_| Scalar::zero(), |i| b[i].1)
    }

    pub fn nnz(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub(crate) fn add_entry(&mut self, j: usize, row: usize, col: usize, x: Scalar) {
        if x.is_zero() {
            return;
        }
        let b = &mut self.blocks[j];
        match b.binary_search_by_key(&(row, col), |e| e.0) {
            Ok(i) => {
                b[i].1 = b[i].1 + x;
                if b[i].1.is_zero() {
                    b.remove(i);
                }
            }
            Err(i) => b.insert(i, ((row, col), x)),
        }
    }

    fn same_shape(&self, other: &BlockMatrix) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!("{} vs {}", self.shape, other.shape)));
        }
        Ok(())
    }

    pub fn add(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    /// In-place sum; panics on a shape mismatch.
    pub(crate) fn add_assign(&mut self, other: &BlockMatrix) {
        assert_eq!(self.shape, other.shape, "shape mismatch");
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            if b.is_empty() {
                continue;
            }
            let mut merged = std::mem::take(a);
            merged.extend_from_slice(b);
            *a = normalize(merged);
        }
    }

    pub fn sub(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        self.add(&other.scale(-Scalar::one()))
    }

    pub fn scale(&self, s: Scalar) -> BlockMatrix {
        BlockMatrix {
            shape: self.shape.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| normalize(b.iter().map(|&(k, x)| (k, x * s)).collect()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        self.same_shape(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let mut prod = Vec::new();
                for &((i, k), x) in a {
                    let start = b.partition_point(|e| e.0 .0 < k);
                    for &((_, c), y) in b[start..].iter().take_while(|e| e.0 .0 == k) {
                        prod.push(((i, c), x * y));
                    }
                }
                normalize(prod)
            })
            .collect();
        Ok(BlockMatrix { shape: self.shape.clone(), blocks })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> BlockMatrix {
        BlockMatrix {
            shape: self.shape.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    let mut t: Block = b.iter().map(|&((r, c), x)| ((c, r), x.conj())).collect();
                    t.sort_unstable_by_key(|e| e.0);
                    t
                })
                .collect(),
        }
    }

    /// Copy of summand `j` with every other summand zeroed.
    pub fn restrict(&self, j: usize) -> BlockMatrix {
        let mut out = BlockMatrix::zero(&self.shape);
        out.blocks[j] = self.blocks[j].clone();
        out
    }

    pub fn is_diagonal(&self) -> bool {
        self.blocks.iter().flatten().all(|((r, c), _)| r == c)
    }

    /// Sum of the diagonal entries of summand `j`.
    pub fn trace(&self, j: usize) -> Scalar {
        self.blocks[j]
            .iter()
            .filter(|((r, c), _)| r == c)
            .fold(Scalar::zero(), |acc, e| acc + e.1)
    }

    /// At most one nonzero entry in every row and every column of every
    /// summand.
    pub fn is_in_normalizer(&self) -> bool {
        self.blocks.iter().zip(self.shape.sizes()).all(|(b, &n)| {
            // entries are sorted by row, so repeated rows are adjacent
            if b.windows(2).any(|w| w[0].0 .0 == w[1].0 .0) {
                return false;
            }
            if b.len() <= 16 {
                return b.iter().enumerate().all(|(i, x)| b[..i].iter().all(|y| y.0 .1 != x.0 .1));
            }
            let mut cols = vec![false; n];
            b.iter().all(|&((_, c), _)| !std::mem::replace(&mut cols[c], true))
        })
    }

    pub fn is_unitary(&self) -> bool {
        let one = BlockMatrix::identity(&self.shape);
        let adj = self.adjoint();
        self.mul(&adj).is_ok_and(|p| p == one) && adj.mul(self).is_ok_and(|p| p == one)
    }

    /// `u · a · u*`.
    pub fn ad(u: &BlockMatrix, a: &BlockMatrix) -> Result<BlockMatrix> {
        u.same_shape(a)?;
        if !u.is_unitary() {
            return Err(Error::Precondition("conjugating element is not unitary".into()));
        }
        Ok(Self::ad_unchecked(u, a))
    }

    pub(crate) fn ad_unchecked(u: &BlockMatrix, a: &BlockMatrix) -> BlockMatrix {
        u.mul(a)
            .and_then(|ua| ua.mul(&u.adjoint()))
            .expect("shapes checked by caller")
    }

    pub fn to_triplets(&self) -> Triplets {
        self.blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|((r, c), x)| (r + 1, c + 1, fmt_ratio(&x.re), fmt_ratio(&x.im)))
                    .collect()
            })
            .collect()
    }

    /// Inverse of [`Self::permutation_table`].
    pub fn from_permutation_table(shape: &AlgebraShape, table: &[Vec<usize>]) -> Result<Self> {
        if table.len() != shape.summands() {
            return Err(Error::Shape(format!("permutation table for {} summands", table.len())));
        }
        let mut m = Self::zero(shape);
        for (j, perm) in table.iter().enumerate() {
            let n = shape.size(j);
            let mut seen = vec![false; n];
            if perm.len() != n || perm.iter().any(|&r| r >= n || std::mem::replace(&mut seen[r], true)) {
                return Err(Error::Argument(format!("summand {} has no valid permutation", j + 1)));
            }
            for (c, &r) in perm.iter().enumerate() {
                m.blocks[j].push(((r, c), Scalar::one()));
            }
            m.blocks[j].sort_unstable_by_key(|e| e.0);
        }
        Ok(m)
    }

    /// For a 0/1 permutation matrix, the image slot of every column per
    /// summand (`perm[j][c] = r` when entry `(r, c)` is 1). `None` otherwise.
    pub fn permutation_table(&self) -> Option<Vec<Vec<usize>>> {
        let mut out = Vec::with_capacity(self.blocks.len());
        for (j, b) in self.blocks.iter().enumerate() {
            let n = self.shape.size(j);
            let mut perm = vec![usize::MAX; n];
            let mut rows = vec![false; n];
            for ((r, c), x) in b {
                let (r, c) = (*r, *c);
                if !x.is_one() || perm[c] != usize::MAX || rows[r] {
                    return None;
                }
                perm[c] = r;
                rows[r] = true;
            }
            if perm.contains(&usize::MAX) {
                return None;
            }
            out.push(perm);
        }
        Some(out)
    }
}

pub(crate) fn check_ref(shape: &AlgebraShape, r: MatrixUnitRef) -> Result<()> {
    match shape.sizes().get(r.summand) {
        Some(&n) if r.row < n && r.col < n => Ok(()),
        _ => Err(Error::Range(format!(
            "matrix unit e^{}_({},{}) is not in {}",
            r.summand + 1,
            r.row + 1,
            r.col + 1,
            shape
        ))),
    }
}
