//! Exact piecewise-linear self-maps of `[0,1]`.
//!
//! These are the eigenvalue functions that label the edges of a diagram. A map
//! is stored by its breakpoints and the values at those breakpoints, with
//! affine interpolation in between. Every constructor returns the canonical
//! form (no redundant breakpoints), so structural equality is pointwise
//! equality.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_fraction, in_unit_interval, q, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PLMapRepr", into = "PLMapRepr")]
pub struct PLMap {
    breakpoints: Vec<Q>,
    values: Vec<Q>,
}

#[derive(Serialize, Deserialize)]
struct PLMapRepr {
    #[serde(with = "crate::rational::fraction_vec")]
    breakpoints: Vec<Q>,
    #[serde(with = "crate::rational::fraction_vec")]
    values: Vec<Q>,
}

impl TryFrom<PLMapRepr> for PLMap {
    type Error = Error;

    fn try_from(r: PLMapRepr) -> Result<Self> {
        PLMap::new(r.breakpoints, r.values)
    }
}

impl From<PLMap> for PLMapRepr {
    fn from(m: PLMap) -> Self {
        PLMapRepr {
            breakpoints: m.breakpoints,
            values: m.values,
        }
    }
}

/// A closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn unit() -> Self {
        Interval::new(Q::zero(), Q::one())
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_fraction(&self.lo), format_fraction(&self.hi))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapProfile {
    pub constant: bool,
    pub monotone: bool,
    pub injective: bool,
    pub surjective: bool,
    pub homeomorphism: bool,
    pub image: Interval,
}

/// Structural recognition of the named maps used throughout the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelKind {
    Identity,
    Constant(Q),
    Tent,
    /// `t ↦ t/2`
    HalfLower,
    /// `t ↦ (t+1)/2`
    HalfUpper,
    General,
}

impl PLMap {
    /// Builds a map from breakpoints and values, then reduces it to canonical
    /// form.
    pub fn new(breakpoints: Vec<Q>, values: Vec<Q>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Argument("a PL map needs at least two breakpoints".into()));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::Argument(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if !breakpoints[0].is_zero() || !breakpoints[breakpoints.len() - 1].is_one() {
            return Err(Error::Argument("breakpoints must start at 0 and end at 1".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("breakpoints must be strictly increasing".into()));
        }
        if let Some(v) = values.iter().find(|v| !in_unit_interval(v)) {
            return Err(Error::Argument(format!(
                "value {} lies outside [0,1]",
                format_fraction(v)
            )));
        }
        Ok(Self::canonical(breakpoints, values))
    }

    fn canonical(breakpoints: Vec<Q>, values: Vec<Q>) -> Self {
        let mut bs: Vec<Q> = Vec::with_capacity(breakpoints.len());
        let mut vs: Vec<Q> = Vec::with_capacity(values.len());
        for (b, v) in breakpoints.into_iter().zip(values) {
            while bs.len() >= 2 {
                let n = bs.len();
                let (b0, v0) = (&bs[n - 2], &vs[n - 2]);
                let (b1, v1) = (&bs[n - 1], &vs[n - 1]);
                // (b1, v1) is redundant iff it lies on the chord from (b0, v0) to (b, v)
                if (v1 - v0) * (&b - b1) == (&v - v1) * (b1 - b0) {
                    bs.pop();
                    vs.pop();
                } else {
                    break;
                }
            }
            bs.push(b);
            vs.push(v);
        }
        PLMap {
            breakpoints: bs,
            values: vs,
        }
    }

    pub fn identity() -> Self {
        PLMap {
            breakpoints: vec![Q::zero(), Q::one()],
            values: vec![Q::zero(), Q::one()],
        }
    }

    pub fn constant(c: Q) -> Result<Self> {
        if !in_unit_interval(&c) {
            return Err(Error::Argument(format!(
                "constant {} lies outside [0,1]",
                format_fraction(&c)
            )));
        }
        Ok(PLMap {
            breakpoints: vec![Q::zero(), Q::one()],
            values: vec![c.clone(), c],
        })
    }

    /// The full tent map: 0 ↦ 0, 1/2 ↦ 1, 1 ↦ 0.
    pub fn tent() -> Self {
        PLMap {
            breakpoints: vec![Q::zero(), q(1, 2), Q::one()],
            values: vec![Q::zero(), Q::one(), Q::zero()],
        }
    }

    /// `t ↦ t/2`
    pub fn half_lower() -> Self {
        PLMap {
            breakpoints: vec![Q::zero(), Q::one()],
            values: vec![Q::zero(), q(1, 2)],
        }
    }

    /// `t ↦ (t+1)/2`
    pub fn half_upper() -> Self {
        PLMap {
            breakpoints: vec![Q::zero(), Q::one()],
            values: vec![q(1, 2), Q::one()],
        }
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn pieces(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn eval(&self, t: &Q) -> Result<Q> {
        if !in_unit_interval(t) {
            return Err(Error::Domain(format!(
                "argument {} lies outside [0,1]",
                format_fraction(t)
            )));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: &Q) -> Q {
        let bs = &self.breakpoints;
        // first index with breakpoint > t, clamped to a valid right end
        let k = bs.partition_point(|b| b <= t).clamp(1, bs.len() - 1);
        let (b0, b1) = (&bs[k - 1], &bs[k]);
        let (v0, v1) = (&self.values[k - 1], &self.values[k]);
        if t == b0 {
            return v0.clone();
        }
        v0 + (v1 - v0) * (t - b0) / (b1 - b0)
    }

    /// `self ∘ inner`, in canonical form.
    pub fn compose(&self, inner: &PLMap) -> PLMap {
        let mut ts: Vec<Q> = inner.breakpoints.clone();
        let interior = &self.breakpoints[1..self.breakpoints.len() - 1];
        for k in 0..inner.pieces() {
            let (a, b) = (&inner.breakpoints[k], &inner.breakpoints[k + 1]);
            let (va, vb) = (&inner.values[k], &inner.values[k + 1]);
            if va == vb {
                continue;
            }
            let (lo, hi) = if va < vb { (va, vb) } else { (vb, va) };
            for c in interior.iter().filter(|c| lo < *c && *c < hi) {
                ts.push(a + (c - va) * (b - a) / (vb - va));
            }
        }
        ts.sort();
        ts.dedup();
        let vs = ts
            .iter()
            .map(|t| self.eval_unchecked(&inner.eval_unchecked(t)))
            .collect();
        Self::canonical(ts, vs)
    }

    /// `self` composed with itself `n` times; `n = 0` gives the identity.
    pub fn iterate(&self, n: usize) -> PLMap {
        (0..n).fold(PLMap::identity(), |acc, _| acc.compose(self))
    }

    pub fn image(&self) -> Interval {
        let lo = self.values.iter().min().expect("nonempty").clone();
        let hi = self.values.iter().max().expect("nonempty").clone();
        Interval::new(lo, hi)
    }

    /// Image of a subinterval of `[0,1]`.
    pub fn image_of(&self, iv: &Interval) -> Interval {
        let mut lo = self.eval_unchecked(&iv.lo);
        let mut hi = lo.clone();
        let candidates = std::iter::once(self.eval_unchecked(&iv.hi)).chain(
            self.breakpoints
                .iter()
                .zip(&self.values)
                .filter(|(b, _)| iv.lo < **b && **b < iv.hi)
                .map(|(_, v)| v.clone()),
        );
        for v in candidates {
            if v < lo {
                lo = v;
            } else if v > hi {
                hi = v;
            }
        }
        Interval::new(lo, hi)
    }

    pub fn analyze(&self) -> MapProfile {
        let vs = &self.values;
        let nondecreasing = vs.windows(2).all(|w| w[0] <= w[1]);
        let nonincreasing = vs.windows(2).all(|w| w[0] >= w[1]);
        let increasing = vs.windows(2).all(|w| w[0] < w[1]);
        let decreasing = vs.windows(2).all(|w| w[0] > w[1]);
        let image = self.image();
        let constant = image.is_degenerate();
        let injective = increasing || decreasing;
        let surjective = image.lo.is_zero() && image.hi.is_one();
        MapProfile {
            constant,
            monotone: nondecreasing || nonincreasing,
            injective,
            surjective,
            homeomorphism: injective && surjective,
            image,
        }
    }

    pub fn kind(&self) -> LabelKind {
        if *self == PLMap::identity() {
            LabelKind::Identity
        } else if self.breakpoints.len() == 2 && self.values[0] == self.values[1] {
            LabelKind::Constant(self.values[0].clone())
        } else if *self == PLMap::tent() {
            LabelKind::Tent
        } else if *self == PLMap::half_lower() {
            LabelKind::HalfLower
        } else if *self == PLMap::half_upper() {
            LabelKind::HalfUpper
        } else {
            LabelKind::General
        }
    }

    /// Short display name: `id`, `const(1/2)`, `tent`, `g`, `h` or `pl`.
    pub fn short_name(&self) -> String {
        match self.kind() {
            LabelKind::Identity => "id".into(),
            LabelKind::Constant(c) => format!("const({})", format_fraction(&c)),
            LabelKind::Tent => "tent".into(),
            LabelKind::HalfLower => "g".into(),
            LabelKind::HalfUpper => "h".into(),
            LabelKind::General => "pl".into(),
        }
    }

    /// `Some(k)` when the map equals the `k`-fold iterate of the tent map,
    /// `k ≥ 1`.
    pub fn tent_iterate_order(&self) -> Option<usize> {
        let pieces = self.pieces();
        if pieces < 2 || !pieces.is_power_of_two() {
            return None;
        }
        let k = pieces.trailing_zeros() as usize;
        (*self == PLMap::tent().iterate(k)).then_some(k)
    }
}

impl fmt::Display for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            LabelKind::General => {
                write!(f, "pl[")?;
                for (i, (b, v)) in self.breakpoints.iter().zip(&self.values).enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}:{}", format_fraction(b), format_fraction(v))?;
                }
                write!(f, "]")
            }
            _ => write!(f, "{}", self.short_name()),
        }
    }
}
