//! Ordered K0 data of finite-dimensional stages, positive unital maps between
//! them, the factorization search of the intertwining argument, and
//! supernatural numbers of single-summand towers.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::diagram::LabeledBratteliDiagram;
use crate::error::{Error, Result};
use crate::int_matrix::IntMatrix;
use crate::par::Exec;

/// `(Z^N, N^N, u)` for a stage with summand sizes `u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StageK0 {
    order_unit: Vec<u64>,
}

impl StageK0 {
    pub fn new(order_unit: Vec<u64>) -> Result<Self> {
        if order_unit.is_empty() {
            return Err(Error::Precondition("a stage needs at least one summand".into()));
        }
        if order_unit.contains(&0) {
            return Err(Error::Precondition(format!(
                "order unit {order_unit:?} is not strictly positive"
            )));
        }
        Ok(StageK0 { order_unit })
    }

    pub fn rank(&self) -> usize {
        self.order_unit.len()
    }

    pub fn order_unit(&self) -> &[u64] {
        &self.order_unit
    }

    pub(crate) fn unit_i64(&self) -> Result<Vec<i64>> {
        self.order_unit
            .iter()
            .map(|&x| i64::try_from(x).map_err(|_| Error::Overflow(format!("order unit entry {x}"))))
            .collect()
    }
}

pub fn stage_k0(d: &LabeledBratteliDiagram, n: usize) -> Result<StageK0> {
    StageK0::new(d.sizes(n)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrderedGroupMap {
    pub matrix: IntMatrix,
    pub source: StageK0,
    pub target: StageK0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MapCheck {
    pub positive: bool,
    pub unit_preserving: bool,
}

impl MapCheck {
    pub fn ok(&self) -> bool {
        self.positive && self.unit_preserving
    }
}

impl OrderedGroupMap {
    pub fn new(matrix: IntMatrix, source: StageK0, target: StageK0) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::Shape(format!(
                "matrix {} is {}x{} but maps Z^{} to Z^{}",
                matrix,
                matrix.rows(),
                matrix.cols(),
                source.rank(),
                target.rank()
            )));
        }
        Ok(OrderedGroupMap {
            matrix,
            source,
            target,
        })
    }

    pub fn check(&self) -> Result<MapCheck> {
        check_map(&self.matrix, &self.source, &self.target)
    }
}

/// Positivity (entrywise) and preservation of the order unit.
pub fn check_map(matrix: &IntMatrix, source: &StageK0, target: &StageK0) -> Result<MapCheck> {
    if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
        return Err(Error::Shape(format!(
            "{}x{} matrix cannot map Z^{} to Z^{}",
            matrix.rows(),
            matrix.cols(),
            source.rank(),
            target.rank()
        )));
    }
    let image = matrix.mul_vec(source.order_unit())?;
    Ok(MapCheck {
        positive: matrix.is_nonnegative(),
        unit_preserving: image
            .iter()
            .zip(target.order_unit())
            .all(|(&a, &b)| u64::try_from(a).is_ok_and(|a| a == b)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Factorization {
    /// Zero-based stage of the target diagram and the factoring map.
    Found { stage: usize, map: OrderedGroupMap },
    /// No factorization at any stage up to this level number. A bounded
    /// search result, not a proof that none exists.
    NotFoundUpTo(usize),
}

/// One factorization problem: find the smallest stage `m` of `y` with
/// `from_stage ≤ m < search_bound` and a nonnegative integer matrix `X` with
///
/// * `X · through = S_{m←at} · value` and
/// * `X · unit(source) = unit_y(m)`,
///
/// where `S_{m←at}` is the composite multiplicity matrix of `y`.
#[derive(Clone, Debug)]
pub struct FactorProblem<'a> {
    pub source: &'a StageK0,
    pub through: &'a IntMatrix,
    pub value: &'a IntMatrix,
    pub at: usize,
    pub from_stage: usize,
}

impl FactorProblem<'_> {
    fn check(&self) -> Result<()> {
        if self.through.rows() != self.source.rank() {
            return Err(Error::Shape(format!(
                "through-matrix has {} rows, source rank is {}",
                self.through.rows(),
                self.source.rank()
            )));
        }
        if self.value.cols() != self.through.cols() {
            return Err(Error::Shape(format!(
                "value matrix has {} columns, expected {}",
                self.value.cols(),
                self.through.cols()
            )));
        }
        Ok(())
    }
}

/// Solves a [`FactorProblem`]. Stages are tried in increasing order; within
/// a stage the lexicographically first `X` (row-major) is returned. Rows are
/// independent and are searched concurrently.
pub fn solve_factorization(
    problem: &FactorProblem<'_>,
    y: &LabeledBratteliDiagram,
    search_bound: usize,
    exec: Exec,
) -> Result<Factorization> {
    problem.check()?;
    let y = y.unrolled(search_bound)?;
    for m in problem.from_stage.max(problem.at)..search_bound.min(y.depth()) {
        if let Some(map) = factorizations_at(problem, &y, m, 1, exec)?.pop() {
            return Ok(Factorization::Found { stage: m, map });
        }
    }
    Ok(Factorization::NotFoundUpTo(search_bound))
}

/// Up to `limit` solutions of `problem` at stage `m` of `y` (which must
/// already have that many levels), in lexicographic order.
pub fn factorizations_at(
    problem: &FactorProblem<'_>,
    y: &LabeledBratteliDiagram,
    m: usize,
    limit: usize,
    exec: Exec,
) -> Result<Vec<OrderedGroupMap>> {
    problem.check()?;
    let unit_src = problem.source.unit_i64()?;
    let rhs = y.multiplicity_between(problem.at, m)?.mul(problem.value)?;
    let unit_m = stage_k0(y, m)?;
    let unit_y = unit_m.unit_i64()?;
    let rows = exec.map_range(rhs.rows(), |r| {
        solve_row(problem.through, &unit_src, rhs.row(r), unit_y[r], limit)
    });
    if rows.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    // lexicographic product of the per-row solution lists
    let mut out = Vec::new();
    let mut idx = vec![0usize; rows.len()];
    while out.len() < limit {
        let pick: Vec<Vec<i64>> = idx.iter().zip(&rows).map(|(&i, r)| r[i].clone()).collect();
        out.push(OrderedGroupMap::new(IntMatrix::from_rows(pick)?, problem.source.clone(), unit_m.clone())?);
        let Some(r) = (0..rows.len()).rev().find(|&r| idx[r] + 1 < rows[r].len()) else {
            break;
        };
        idx[r] += 1;
        idx[r + 1..].iter_mut().for_each(|i| *i = 0);
    }
    Ok(out)
}

/// The first `limit` nonnegative `x`, in lexicographic order, with
/// `x · through = target` and `x · unit = unit_target`. Entries are bounded
/// by the unit equation.
fn solve_row(through: &IntMatrix, unit: &[i64], target: &[i64], unit_target: i64, limit: usize) -> Vec<Vec<i64>> {
    struct Search<'a> {
        through: &'a IntMatrix,
        unit: &'a [i64],
        target: &'a [i64],
        prune: bool,
        limit: usize,
        x: Vec<i64>,
        acc: Vec<i64>,
        out: Vec<Vec<i64>>,
    }
    impl Search<'_> {
        fn go(&mut self, c: usize, remaining: i64) {
            if self.out.len() >= self.limit {
                return;
            }
            if c + 1 == self.unit.len() {
                // the unit equation forces the last entry
                if remaining % self.unit[c] != 0 {
                    return;
                }
                let v = remaining / self.unit[c];
                let row = self.through.row(c);
                if self.acc.iter().zip(row).zip(self.target).all(|((&a, &t), &y)| a + v * t == y) {
                    self.x[c] = v;
                    self.out.push(self.x.clone());
                }
                return;
            }
            for v in 0..=remaining / self.unit[c] {
                self.x[c] = v;
                let row = self.through.row(c);
                for (a, &t) in self.acc.iter_mut().zip(row) {
                    *a += v * t;
                }
                let ok = !self.prune || self.acc.iter().zip(self.target).all(|(a, t)| a <= t);
                if ok {
                    self.go(c + 1, remaining - v * self.unit[c]);
                }
                for (a, &t) in self.acc.iter_mut().zip(row) {
                    *a -= v * t;
                }
                if !ok || self.out.len() >= self.limit {
                    break;
                }
            }
        }
    }
    let mut s = Search {
        through,
        unit,
        target,
        prune: through.is_nonnegative(),
        limit,
        x: vec![0; unit.len()],
        acc: vec![0; target.len()],
        out: Vec::new(),
    };
    s.go(0, unit_target);
    s.out
}

/// The plain form of the search: a map `g: K0(A_n) → K0(B_at)` is pushed
/// forward to the first stage of `b` where it becomes positive and unital.
pub fn factor_through(
    g: &OrderedGroupMap,
    at: usize,
    b: &LabeledBratteliDiagram,
    search_bound: usize,
) -> Result<Factorization> {
    let id = IntMatrix::identity(g.source.rank());
    solve_factorization(
        &FactorProblem {
            source: &g.source,
            through: &id,
            value: &g.matrix,
            at,
            from_stage: at,
        },
        b,
        search_bound,
        Exec::default(),
    )
}

/// First positive unital map from `source` into a stage `≥ from_stage` of `b`.
pub fn factor_unit(
    source: &StageK0,
    b: &LabeledBratteliDiagram,
    from_stage: usize,
    search_bound: usize,
) -> Result<Factorization> {
    let unit_col = IntMatrix::column(&source.unit_i64()?);
    let b0 = stage_k0(b, 0)?;
    let b0_col = IntMatrix::column(&b0.unit_i64()?);
    solve_factorization(
        &FactorProblem {
            source,
            through: &unit_col,
            value: &b0_col,
            at: 0,
            from_stage,
        },
        b,
        search_bound,
        Exec::default(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Exponent {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(e) => write!(f, "{e}"),
            Exponent::Infinite => f.write_str("∞"),
        }
    }
}

/// Formal product of prime powers with exponents in `N ∪ {∞}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SupernaturalNumber {
    pub factors: BTreeMap<u64, Exponent>,
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (p, e)) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}:{e}")?;
        }
        f.write_str("}")
    }
}

fn factorize(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

/// Prime factorization of the size at level `depth` (one-based count of
/// levels, at least the diagram's own depth). Primes dividing the repeated
/// multiplicity grow forever and get exponent `∞`.
pub fn supernatural_invariant(d: &LabeledBratteliDiagram, depth: usize) -> Result<SupernaturalNumber> {
    if d.levels().iter().any(|l| l.len() != 1) {
        return Err(Error::Unsupported("supernatural numbers need a single-summand diagram".into()));
    }
    if !d.is_af() {
        return Err(Error::Precondition("supernatural numbers need point bases".into()));
    }
    let depth = depth.max(d.depth());
    let full = d.unrolled(depth)?;
    let size = full.sizes(depth - 1)?[0];
    let mut factors: BTreeMap<u64, Exponent> = factorize(size)
        .into_iter()
        .map(|(p, e)| (p, Exponent::Finite(e)))
        .collect();
    if d.repeats() && d.depth() >= 2 {
        let k = d.multiplicity_matrix(d.depth() - 2)?.get(0, 0) as u64;
        for p in factorize(k).into_keys() {
            factors.insert(p, Exponent::Infinite);
        }
    }
    Ok(SupernaturalNumber { factors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stage(u: &[u64]) -> StageK0 {
        StageK0::new(u.to_vec()).unwrap()
    }

    fn m(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn check_map_examples() {
        let c = check_map(&m(vec![vec![2, 1]]), &stage(&[2, 3]), &stage(&[7])).unwrap();
        assert_eq!(c, MapCheck { positive: true, unit_preserving: true });
        let c = check_map(&m(vec![vec![3]]), &stage(&[1]), &stage(&[2])).unwrap();
        assert_eq!(c, MapCheck { positive: true, unit_preserving: false });
        let c = check_map(&m(vec![vec![-1, 3]]), &stage(&[2, 3]), &stage(&[7])).unwrap();
        assert_eq!(c, MapCheck { positive: false, unit_preserving: true });
        assert!(check_map(&m(vec![vec![1]]), &stage(&[2, 3]), &stage(&[7])).is_err());
        assert!(StageK0::new(vec![]).is_err());
        assert!(StageK0::new(vec![1, 0]).is_err());
    }

    #[test]
    fn stage_k0_examples() {
        let d = LabeledBratteliDiagram::point_tower(&[1, 2, 4], false).unwrap();
        assert_eq!(stage_k0(&d, 0).unwrap().order_unit(), &[1]);
        assert_eq!(stage_k0(&d, 2).unwrap().rank(), 1);
        assert!(stage_k0(&d, 3).is_err());
        let t = d.telescope(&[0, 2]).unwrap();
        let s = t.multiplicity_matrix(0).unwrap();
        assert_eq!(s.mul_vec(&[1]).unwrap(), vec![4]);
        assert_eq!(stage_k0(&t, 1).unwrap().order_unit(), &[4]);
    }

    #[test]
    fn factor_through_examples() {
        let car = LabeledBratteliDiagram::point_tower(&[1, 2, 4, 8], true).unwrap();
        let g = OrderedGroupMap::new(IntMatrix::identity(1), stage(&[4]), stage(&[4])).unwrap();
        match factor_through(&g, 2, &car, 4).unwrap() {
            Factorization::Found { stage, map } => {
                assert_eq!(stage, 2);
                assert_eq!(map.matrix, IntMatrix::identity(1));
            }
            other => panic!("{other:?}"),
        }

        let four = LabeledBratteliDiagram::point_tower(&[1, 4, 16], true).unwrap();
        match factor_unit(&stage(&[2]), &four, 0, 6).unwrap() {
            Factorization::Found { stage, map } => {
                assert_eq!(stage, 1);
                assert_eq!(map.matrix, m(vec![vec![2]]));
            }
            other => panic!("{other:?}"),
        }
        let three = LabeledBratteliDiagram::point_tower(&[1, 3, 9], true).unwrap();
        assert_eq!(
            factor_unit(&stage(&[2]), &three, 0, 6).unwrap(),
            Factorization::NotFoundUpTo(6)
        );
    }

    #[test]
    fn negative_map_becomes_positive_later() {
        // [1,-1] from Z^2 into a stage that merges both summands
        let d = LabeledBratteliDiagram::new(
            vec![
                vec![crate::diagram::SummandShape::point(1), crate::diagram::SummandShape::point(1)],
                vec![crate::diagram::SummandShape::point(2)],
            ],
            vec![
                crate::diagram::EdgeBundle { level: 0, source: 0, target: 0, labels: vec![crate::interval_maps::PLMap::identity()] },
                crate::diagram::EdgeBundle { level: 0, source: 1, target: 0, labels: vec![crate::interval_maps::PLMap::identity()] },
            ],
            false,
        )
        .unwrap();
        let g = OrderedGroupMap::new(m(vec![vec![2, -1], vec![-1, 2]]), stage(&[1, 1]), stage(&[1, 1])).unwrap();
        match factor_through(&g, 0, &d, 2).unwrap() {
            Factorization::Found { stage, map } => {
                assert_eq!(stage, 1);
                assert_eq!(map.matrix, m(vec![vec![1, 1]]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn supernatural_examples() {
        let two = LabeledBratteliDiagram::point_tower(&[2, 4, 8, 16, 32], true).unwrap();
        let s = supernatural_invariant(&two, 5).unwrap();
        assert_eq!(s.to_string(), "{2:∞}");
        let three = LabeledBratteliDiagram::point_tower(&[3, 9], true).unwrap();
        assert_eq!(supernatural_invariant(&three, 5).unwrap().to_string(), "{3:∞}");
        let flat = LabeledBratteliDiagram::point_tower(&[6, 6, 6], true).unwrap();
        assert_eq!(supernatural_invariant(&flat, 4).unwrap().to_string(), "{2:1, 3:1}");
        let mixed = LabeledBratteliDiagram::point_tower(&[3, 6, 12], true).unwrap();
        assert_eq!(supernatural_invariant(&mixed, 3).unwrap().to_string(), "{2:∞, 3:1}");
        let t = two.unrolled(7).unwrap().telescope(&[0, 2, 4, 6]).unwrap();
        assert_eq!(supernatural_invariant(&t, 5).unwrap(), s);
    }
}
