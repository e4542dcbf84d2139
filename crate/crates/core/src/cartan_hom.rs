//! Diagonal-preserving matrix-unit homomorphisms between finite-dimensional
//! algebras, and the normalizing unitaries that conjugate two of them with
//! the same multiplicities into each other.
//!
//! A homomorphism `φ: ⊕_j M_{n_j} → ⊕_i M_{m_i}` with multiplicities `k_ij` is
//! stored as a partition of the diagonal slots of every target summand `i`
//! into sets `H^{ij}_p` of size `k_ij`, one per source summand `j` and source
//! slot `p`. With both slot sets enumerated ascending,
//! `φ(e^j_{pq}) = Σ_i Σ_s h^i_{u_s v_s}` where `u_s ∈ H^{ij}_p`, `v_s ∈ H^{ij}_q`.

use serde::{Deserialize, Serialize};

use crate::diagram::LabeledBratteliDiagram;
use crate::error::{Error, Result};
use crate::fd_algebra::{check_ref, AlgebraShape, BlockMatrix, MatrixUnitRef, Scalar};
use crate::int_matrix::IntMatrix;
use crate::par::Exec;

/// Embedding multiplicities `k_ij`: rows index target summands, columns
/// source summands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiplicityMatrix(IntMatrix);

impl MultiplicityMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if !m.is_nonnegative() {
            return Err(Error::Argument(format!("negative multiplicity in {m}")));
        }
        Ok(MultiplicityMatrix(m))
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn k(&self, i: usize, j: usize) -> usize {
        self.0.get(i, j) as usize
    }

    /// `Σ_j k_ij n_j = m_i` for every target summand `i`.
    pub fn check_unital(&self, source: &AlgebraShape, target: &AlgebraShape) -> Result<()> {
        if self.0.rows() != target.summands() || self.0.cols() != source.summands() {
            return Err(Error::Shape(format!(
                "multiplicity matrix is {}x{} but {} → {} needs {}x{}",
                self.0.rows(),
                self.0.cols(),
                source,
                target,
                target.summands(),
                source.summands()
            )));
        }
        for i in 0..target.summands() {
            let got: usize = (0..source.summands())
                .map(|j| self.k(i, j) * source.size(j))
                .sum();
            if got != target.size(i) {
                return Err(Error::Precondition(format!(
                    "multiplicities {} are not unital: target summand {} has size {} but receives {}",
                    self.0,
                    i + 1,
                    target.size(i),
                    got
                )));
            }
        }
        Ok(())
    }
}

/// Slot sets `H^{ij}_p`, indexed `[i][j][p]`, each ascending.
pub type Partition = Vec<Vec<Vec<Vec<usize>>>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixUnitHom {
    source: AlgebraShape,
    target: AlgebraShape,
    mult: MultiplicityMatrix,
    partition: Partition,
}

impl MatrixUnitHom {
    /// The homomorphism with the canonical contiguous layout: inside target
    /// summand `i`, `H^{ij}_p` is the `p`-th run of `k_ij` consecutive slots
    /// after all slots used by source summands `j' < j`.
    pub fn build(
        source: &AlgebraShape,
        target: &AlgebraShape,
        mult: &MultiplicityMatrix,
    ) -> Result<Self> {
        mult.check_unital(source, target)?;
        let partition = (0..target.summands())
            .map(|i| {
                let mut offset = 0;
                (0..source.summands())
                    .map(|j| {
                        let k = mult.k(i, j);
                        (0..source.size(j))
                            .map(|_| {
                                let run = (offset..offset + k).collect();
                                offset += k;
                                run
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(MatrixUnitHom {
            source: source.clone(),
            target: target.clone(),
            mult: mult.clone(),
            partition,
        })
    }

    /// A homomorphism with an arbitrary slot layout. Slot sets are sorted;
    /// sizes, disjointness and coverage are checked.
    pub fn from_partition(
        source: &AlgebraShape,
        target: &AlgebraShape,
        mult: &MultiplicityMatrix,
        mut partition: Partition,
    ) -> Result<Self> {
        mult.check_unital(source, target)?;
        if partition.len() != target.summands() {
            return Err(Error::Shape("partition has the wrong number of target summands".into()));
        }
        for (i, per_i) in partition.iter_mut().enumerate() {
            if per_i.len() != source.summands() {
                return Err(Error::Shape(format!(
                    "partition of target summand {} has the wrong number of source summands",
                    i + 1
                )));
            }
            let mut used = vec![false; target.size(i)];
            for (j, per_j) in per_i.iter_mut().enumerate() {
                if per_j.len() != source.size(j) {
                    return Err(Error::Shape(format!(
                        "partition H^({},{}) needs {} slot sets",
                        i + 1,
                        j + 1,
                        source.size(j)
                    )));
                }
                for (p, set) in per_j.iter_mut().enumerate() {
                    set.sort_unstable();
                    if set.len() != mult.k(i, j) {
                        return Err(Error::Precondition(format!(
                            "H^({},{})_{} has {} slots, expected {}",
                            i + 1,
                            j + 1,
                            p + 1,
                            set.len(),
                            mult.k(i, j)
                        )));
                    }
                    for &u in set.iter() {
                        if u >= target.size(i) || std::mem::replace(&mut used[u], true) {
                            return Err(Error::Precondition(format!(
                                "slot {} of target summand {} is out of range or used twice",
                                u + 1,
                                i + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(MatrixUnitHom {
            source: source.clone(),
            target: target.clone(),
            mult: mult.clone(),
            partition,
        })
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        let n = shape.summands();
        let mut m = IntMatrix::zeros(n, n);
        for j in 0..n {
            m.set(j, j, 1);
        }
        Self::build(shape, shape, &MultiplicityMatrix(m)).expect("identity is unital")
    }

    /// Connecting map from level `n` to level `n+1` of a diagram. The
    /// canonical layout coincides with the diagram's slot layout.
    pub fn connecting(d: &LabeledBratteliDiagram, n: usize) -> Result<Self> {
        let source = shape_of(d, n)?;
        let target = shape_of(d, n + 1)?;
        Self::build(&source, &target, &MultiplicityMatrix::new(d.multiplicity_matrix(n)?)?)
    }

    /// Reads a homomorphism off its values on matrix units. Fails unless the
    /// map has the matrix-unit form with ascending pairing.
    pub fn from_images<F>(source: &AlgebraShape, target: &AlgebraShape, f: F) -> Result<Self>
    where
        F: Fn(MatrixUnitRef) -> Result<BlockMatrix>,
    {
        let not_of_form = |why: String| Error::Precondition(format!("not a matrix-unit homomorphism: {why}"));
        let mut partition: Partition =
            vec![vec![Vec::new(); source.summands()]; target.summands()];
        let mut mult = IntMatrix::zeros(target.summands(), source.summands());
        for j in 0..source.summands() {
            for p in 0..source.size(j) {
                let img = f(MatrixUnitRef::new(j, p, p))?;
                if img.shape() != target {
                    return Err(Error::Shape(format!("image lies in {}, not {}", img.shape(), target)));
                }
                for (i, slots) in partition.iter_mut().enumerate() {
                    let mut set = Vec::new();
                    for &((r, c), x) in img.block(i) {
                        if r != c || !x.is_one() {
                            return Err(not_of_form(format!(
                                "image of e^{}_({},{}) is not a diagonal projection",
                                j + 1,
                                p + 1,
                                p + 1
                            )));
                        }
                        set.push(r);
                    }
                    if p == 0 {
                        mult.set(i, j, set.len() as i64);
                    }
                    slots[j].push(set);
                }
            }
        }
        let hom = Self::from_partition(source, target, &MultiplicityMatrix(mult), partition)?;
        for r in source.units() {
            if f(r)? != hom.image_of_unit(r)? {
                return Err(not_of_form(format!(
                    "image of e^{}_({},{}) does not pair slots in ascending order",
                    r.summand + 1,
                    r.row + 1,
                    r.col + 1
                )));
            }
        }
        Ok(hom)
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &MatrixUnitHom, inner: &MatrixUnitHom) -> Result<Self> {
        if inner.target != outer.source {
            return Err(Error::Shape(format!(
                "cannot compose {} → {} after {} → {}",
                outer.source, outer.target, inner.source, inner.target
            )));
        }
        Self::from_images(&inner.source, &outer.target, |r| {
            outer.apply(&inner.image_of_unit(r)?)
        })
    }

    pub fn source(&self) -> &AlgebraShape {
        &self.source
    }

    pub fn target(&self) -> &AlgebraShape {
        &self.target
    }

    pub fn mult(&self) -> &MultiplicityMatrix {
        &self.mult
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn slots(&self, i: usize, j: usize, p: usize) -> &[usize] {
        &self.partition[i][j][p]
    }

    /// `φ(e^j_{pq}) = Σ_i f^{ij}_{pq}`.
    pub fn image_of_unit(&self, r: MatrixUnitRef) -> Result<BlockMatrix> {
        check_ref(&self.source, r)?;
        let mut out = BlockMatrix::zero(&self.target);
        self.accumulate(&mut out, r, Scalar::one());
        Ok(out)
    }

    fn accumulate(&self, out: &mut BlockMatrix, r: MatrixUnitRef, x: Scalar) {
        for (i, per_i) in self.partition.iter().enumerate() {
            let us = &per_i[r.summand][r.row];
            let vs = &per_i[r.summand][r.col];
            for (&u, &v) in us.iter().zip(vs) {
                out.add_entry(i, u, v, x);
            }
        }
    }

    /// Linear extension to arbitrary elements.
    pub fn apply(&self, a: &BlockMatrix) -> Result<BlockMatrix> {
        if *a.shape() != self.source {
            return Err(Error::Shape(format!(
                "element of {} given to a map on {}",
                a.shape(),
                self.source
            )));
        }
        let mut out = BlockMatrix::zero(&self.target);
        for j in 0..self.source.summands() {
            for &((p, q), x) in a.block(j) {
                self.accumulate(&mut out, MatrixUnitRef::new(j, p, q), x);
            }
        }
        Ok(out)
    }

    pub fn verify(&self) -> HomReport {
        self.verify_with(Exec::default())
    }

    pub fn verify_with(&self, exec: Exec) -> HomReport {
        verify_star_hom(
            &self.source,
            &self.target,
            self.mult.matrix(),
            |r| self.image_of_unit(r).expect("unit in range"),
            exec,
        )
    }

    pub fn to_record(&self) -> HomRecord {
        HomRecord {
            source: self.source.sizes().to_vec(),
            target: self.target.sizes().to_vec(),
            mult: self.mult.matrix().clone(),
            partition: self
                .partition
                .iter()
                .map(|per_i| {
                    per_i
                        .iter()
                        .map(|per_j| {
                            per_j
                                .iter()
                                .map(|set| set.iter().map(|u| u + 1).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_record(rec: &HomRecord) -> Result<Self> {
        let partition = rec
            .partition
            .iter()
            .map(|per_i| {
                per_i
                    .iter()
                    .map(|per_j| {
                        per_j
                            .iter()
                            .map(|set| {
                                set.iter()
                                    .map(|&u| {
                                        u.checked_sub(1).ok_or_else(|| {
                                            Error::Argument("slots are numbered from 1".into())
                                        })
                                    })
                                    .collect::<Result<Vec<_>>>()
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_partition(
            &AlgebraShape::new(rec.source.clone())?,
            &AlgebraShape::new(rec.target.clone())?,
            &MultiplicityMatrix::new(rec.mult.clone())?,
            partition,
        )
    }
}

/// Serialized homomorphism: shapes, multiplicities and the slot table with
/// one-based slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomRecord {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub mult: IntMatrix,
    pub partition: Vec<Vec<Vec<Vec<usize>>>>,
}

pub(crate) fn shape_of(d: &LabeledBratteliDiagram, n: usize) -> Result<AlgebraShape> {
    AlgebraShape::new(
        d.sizes(n)?
            .into_iter()
            .map(|s| {
                usize::try_from(s).map_err(|_| Error::Overflow(format!("summand size {s}")))
            })
            .collect::<Result<_>>()?,
    )
}

/// Outcome of checking the homomorphism axioms on matrix units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomReport {
    pub multiplicative: bool,
    pub adjoint: bool,
    pub unital: bool,
    pub diagonal: bool,
    pub normalizer: bool,
    pub k0: bool,
    /// First counterexample per failed axiom.
    pub notes: Vec<String>,
}

impl HomReport {
    pub fn all_pass(&self) -> bool {
        self.multiplicative && self.adjoint && self.unital && self.diagonal && self.normalizer && self.k0
    }
}

fn unit_name(r: MatrixUnitRef) -> String {
    format!("e^{}_({},{})", r.summand + 1, r.row + 1, r.col + 1)
}

/// Checks that the linear map determined by `f` on matrix units is a unital
/// *-homomorphism that maps the diagonal into the diagonal and the
/// normalizer into the normalizer, and that its K0 matrix is `expected_k0`.
pub fn verify_star_hom<F>(
    source: &AlgebraShape,
    target: &AlgebraShape,
    expected_k0: &IntMatrix,
    f: F,
    exec: Exec,
) -> HomReport
where
    F: Fn(MatrixUnitRef) -> BlockMatrix + Sync + Send,
{
    let units = source.units();
    let offsets: Vec<usize> = source
        .sizes()
        .iter()
        .scan(0, |acc, n| {
            let start = *acc;
            *acc += n * n;
            Some(start)
        })
        .collect();
    let index = |r: MatrixUnitRef| -> usize { offsets[r.summand] + r.row * source.size(r.summand) + r.col };
    let images: Vec<BlockMatrix> = exec.map(&units, |&r| f(r));
    let mut notes = Vec::new();

    // Multiplicativity on all pairs of units follows from
    //   φ(e_p1)φ(e_1q) = φ(e_pq),  φ(e_1p)φ(e_q1) = δ_pq φ(e_11)
    // inside every summand, plus orthogonality of the images of diagonal
    // units from different summands.
    let img = |j: usize, p: usize, q: usize| &images[index(MatrixUnitRef::new(j, p, q))];
    let mut mult_fail: Vec<Option<String>> = Vec::new();
    for (j, &n) in source.sizes().iter().enumerate() {
        mult_fail.extend(exec.map_range(n * n, |pq| {
            let (p, q) = (pq / n, pq % n);
            let name = |a: usize, b: usize| unit_name(MatrixUnitRef::new(j, a, b));
            if img(j, p, 0).mul(img(j, 0, q)).expect("same shape") != *img(j, p, q) {
                return Some(format!("φ({})φ({}) ≠ φ({})", name(p, 0), name(0, q), name(p, q)));
            }
            let prod = img(j, 0, p).mul(img(j, q, 0)).expect("same shape");
            (if p == q { prod != *img(j, 0, 0) } else { !prod.is_zero() })
                .then(|| format!("φ({})φ({}) ≠ φ({}·{})", name(0, p), name(q, 0), name(0, p), name(q, 0)))
        }));
    }
    let diag_units: Vec<MatrixUnitRef> = units.iter().copied().filter(|r| r.row == r.col).collect();
    if diag_units.iter().all(|r| images[index(*r)].is_diagonal()) {
        // diagonal images: orthogonal iff their supports are disjoint
        let mut owner = std::collections::HashMap::new();
        'supports: for r in &diag_units {
            for (i, (u, _)) in (0..target.summands())
                .flat_map(|i| images[index(*r)].block(i).iter().map(move |e| (i, e.0)))
            {
                if let Some(prev) = owner.insert((i, u), *r) {
                    if prev.summand != r.summand {
                        mult_fail.push(Some(format!(
                            "φ({})φ({}) ≠ 0",
                            unit_name(prev),
                            unit_name(*r)
                        )));
                        break 'supports;
                    }
                }
            }
        }
    } else {
        mult_fail.extend(exec.map(&diag_units, |&a| {
            diag_units
                .iter()
                .filter(|b| b.summand != a.summand)
                .find(|b| !images[index(a)].mul(&images[index(**b)]).expect("same shape").is_zero())
                .map(|b| format!("φ({})φ({}) ≠ 0", unit_name(a), unit_name(*b)))
        }));
    }
    let multiplicative = first_failure(&mut notes, mult_fail);

    let adj_fail = exec.map(&units, |&a| {
        let t = MatrixUnitRef::new(a.summand, a.col, a.row);
        (images[index(a)].adjoint() != images[index(t)])
            .then(|| format!("φ({})* ≠ φ({})", unit_name(a), unit_name(t)))
    });
    let adjoint = first_failure(&mut notes, adj_fail);

    let mut one = BlockMatrix::zero(target);
    for r in units.iter().filter(|r| r.row == r.col) {
        one.add_assign(&images[index(*r)]);
    }
    let unital = one == BlockMatrix::identity(target);
    if !unital {
        notes.push("φ(1) ≠ 1".into());
    }

    let diag_fail = units
        .iter()
        .filter(|r| r.row == r.col)
        .find(|r| !images[index(**r)].is_diagonal())
        .map(|r| format!("φ({}) is not diagonal", unit_name(*r)));
    let diagonal = first_failure(&mut notes, vec![diag_fail]);

    // matrix units plus one cyclic permutation unitary per summand
    let mut norm_fail = units
        .iter()
        .find(|r| !images[index(**r)].is_in_normalizer())
        .map(|r| format!("φ({}) leaves the normalizer", unit_name(*r)));
    if norm_fail.is_none() {
        for (j, &n) in source.sizes().iter().enumerate() {
            let mut cyc = BlockMatrix::zero(target);
            for p in 0..n {
                cyc.add_assign(&images[index(MatrixUnitRef::new(j, p, (p + 1) % n))]);
            }
            if !cyc.is_in_normalizer() {
                norm_fail = Some(format!("image of the cyclic shift of summand {} leaves the normalizer", j + 1));
                break;
            }
        }
    }
    let normalizer = first_failure(&mut notes, vec![norm_fail]);

    let mut k0 = expected_k0.rows() == target.summands() && expected_k0.cols() == source.summands();
    if k0 {
        'outer: for r in units.iter().filter(|r| r.row == r.col) {
            for i in 0..target.summands() {
                let tr = images[index(*r)].trace(i);
                let k = expected_k0.get(i, r.summand);
                if tr != Scalar::real(k as i128, 1) {
                    notes.push(format!(
                        "trace of φ({}) in target summand {} is {}, expected {}",
                        unit_name(*r),
                        i + 1,
                        tr,
                        k
                    ));
                    k0 = false;
                    break 'outer;
                }
            }
        }
    } else {
        notes.push("K0 matrix has the wrong dimensions".into());
    }

    HomReport {
        multiplicative,
        adjoint,
        unital,
        diagonal,
        normalizer,
        k0,
        notes,
    }
}

fn first_failure(notes: &mut Vec<String>, results: Vec<Option<String>>) -> bool {
    match results.into_iter().flatten().next() {
        Some(n) => {
            notes.push(n);
            false
        }
        None => true,
    }
}

/// A normalizing unitary `U` with `ψ = Ad(U) ∘ φ`.
///
/// Within each target summand `i` and source summand `j`, `v^{ij}_1` pairs the
/// ascending slots of `ψ(e^j_{11})` with those of `φ(e^j_{11})`, and
/// `v^{ij}_p = ψ_i(e^j_{p1}) v^{ij}_1 φ_i(e^j_{1p})`. `U` is the sum of all
/// `v^{ij}_p`.
pub fn conjugating_unitary(phi: &MatrixUnitHom, psi: &MatrixUnitHom) -> Result<BlockMatrix> {
    if phi.source != psi.source || phi.target != psi.target {
        return Err(Error::Shape(format!(
            "{} → {} vs {} → {}",
            phi.source, phi.target, psi.source, psi.target
        )));
    }
    if phi.mult != psi.mult {
        return Err(Error::Precondition(format!(
            "K0 data differ: {} vs {}",
            phi.mult.matrix(),
            psi.mult.matrix()
        )));
    }
    let target = &phi.target;
    let mut u = BlockMatrix::zero(target);
    for i in 0..target.summands() {
        for j in 0..phi.source.summands() {
            if phi.mult.k(i, j) == 0 {
                continue;
            }
            let mut v1 = BlockMatrix::zero(target);
            for (&a, &b) in psi.slots(i, j, 0).iter().zip(phi.slots(i, j, 0)) {
                v1.add_entry(i, a, b, Scalar::one());
            }
            for p in 0..phi.source.size(j) {
                let left = psi.image_of_unit(MatrixUnitRef::new(j, p, 0))?.restrict(i);
                let right = phi.image_of_unit(MatrixUnitRef::new(j, 0, p))?.restrict(i);
                u = u.add(&left.mul(&v1)?.mul(&right)?)?;
            }
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(s: &[usize]) -> AlgebraShape {
        AlgebraShape::new(s.to_vec()).unwrap()
    }

    fn mult(rows: Vec<Vec<i64>>) -> MultiplicityMatrix {
        MultiplicityMatrix::from_rows(rows).unwrap()
    }

    fn h(sh: &AlgebraShape, i: usize, u: usize, v: usize) -> BlockMatrix {
        BlockMatrix::unit(sh, MatrixUnitRef::new(i, u, v)).unwrap()
    }

    #[test]
    fn canonical_layout_examples() {
        let hom = MatrixUnitHom::build(&shape(&[2, 3]), &shape(&[7]), &mult(vec![vec![2, 1]])).unwrap();
        assert_eq!(hom.slots(0, 0, 0), &[0, 1]);
        assert_eq!(hom.slots(0, 0, 1), &[2, 3]);
        assert_eq!(hom.slots(0, 1, 0), &[4]);
        assert_eq!(hom.slots(0, 1, 1), &[5]);
        assert_eq!(hom.slots(0, 1, 2), &[6]);

        let id = MatrixUnitHom::build(&shape(&[1]), &shape(&[1]), &mult(vec![vec![1]])).unwrap();
        assert_eq!(id, MatrixUnitHom::identity(&shape(&[1])));

        let d = MatrixUnitHom::build(&shape(&[2]), &shape(&[4]), &mult(vec![vec![2]])).unwrap();
        assert_eq!(d.slots(0, 0, 0), &[0, 1]);
        assert_eq!(d.slots(0, 0, 1), &[2, 3]);
        assert!(d.verify().all_pass());

        let err = MatrixUnitHom::build(&shape(&[2]), &shape(&[5]), &mult(vec![vec![2]]));
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn images_of_units() {
        let t4 = shape(&[4]);
        let d = MatrixUnitHom::build(&shape(&[2]), &t4, &mult(vec![vec![2]])).unwrap();
        let img = d.image_of_unit(MatrixUnitRef::new(0, 0, 1)).unwrap();
        assert_eq!(img, h(&t4, 0, 0, 2).add(&h(&t4, 0, 1, 3)).unwrap());

        let t7 = shape(&[7]);
        let hom = MatrixUnitHom::build(&shape(&[2, 3]), &t7, &mult(vec![vec![2, 1]])).unwrap();
        assert_eq!(hom.image_of_unit(MatrixUnitRef::new(1, 0, 1)).unwrap(), h(&t7, 0, 4, 5));
        let diag = hom.image_of_unit(MatrixUnitRef::new(0, 1, 1)).unwrap();
        assert_eq!(diag, h(&t7, 0, 2, 2).add(&h(&t7, 0, 3, 3)).unwrap());
        assert!(hom.image_of_unit(MatrixUnitRef::new(1, 3, 0)).is_err());
    }

    #[test]
    fn any_partition_is_a_hom_but_a_dropped_term_is_not() {
        let src = shape(&[2, 3]);
        let tgt = shape(&[7]);
        let m = mult(vec![vec![2, 1]]);
        let good = MatrixUnitHom::build(&src, &tgt, &m).unwrap();
        let mut part = good.partition().clone();
        part[0][0][0] = vec![0, 4];
        part[0][1][0] = vec![1];
        let shuffled = MatrixUnitHom::from_partition(&src, &tgt, &m, part).unwrap();
        assert!(shuffled.verify().all_pass());

        let e12 = MatrixUnitRef::new(0, 0, 1);
        let r = verify_star_hom(
            &src,
            &tgt,
            m.matrix(),
            |r| {
                if r == e12 {
                    h(&tgt, 0, 0, 2)
                } else {
                    good.image_of_unit(r).unwrap()
                }
            },
            Exec::Sequential,
        );
        assert!(!r.multiplicative && !r.adjoint);
        assert!(r.unital && r.diagonal && r.k0);
        assert!(!r.all_pass());
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn from_partition_rejects_bad_tables() {
        let src = shape(&[2]);
        let tgt = shape(&[4]);
        let m = mult(vec![vec![2]]);
        assert!(MatrixUnitHom::from_partition(&src, &tgt, &m, vec![vec![vec![vec![0, 1], vec![1, 2]]]]).is_err());
        assert!(MatrixUnitHom::from_partition(&src, &tgt, &m, vec![vec![vec![vec![0], vec![1, 2, 3]]]]).is_err());
        assert!(MatrixUnitHom::from_partition(&src, &tgt, &m, vec![vec![vec![vec![0, 9], vec![1, 2]]]]).is_err());
        let ok = MatrixUnitHom::from_partition(&src, &tgt, &m, vec![vec![vec![vec![3, 0], vec![1, 2]]]]).unwrap();
        assert_eq!(ok.slots(0, 0, 0), &[0, 3]);
        assert!(ok.verify().all_pass());
    }

    #[test]
    fn identity_hom_passes() {
        let sh = shape(&[2, 1, 3]);
        let id = MatrixUnitHom::identity(&sh);
        let r = id.verify();
        assert!(r.all_pass(), "{r:?}");
        let a = h(&sh, 2, 0, 2).scale(Scalar::complex((1, 3), (2, 5)));
        assert_eq!(id.apply(&a).unwrap(), a);
    }

    #[test]
    fn conjugating_unitary_examples() {
        let src = shape(&[2]);
        let tgt = shape(&[4]);
        let m = mult(vec![vec![2]]);
        let phi = MatrixUnitHom::build(&src, &tgt, &m).unwrap();
        assert_eq!(conjugating_unitary(&phi, &phi).unwrap(), BlockMatrix::identity(&tgt));

        let psi = MatrixUnitHom::from_partition(&src, &tgt, &m, vec![vec![vec![vec![0, 2], vec![1, 3]]]]).unwrap();
        let u = conjugating_unitary(&phi, &psi).unwrap();
        assert!(u.is_unitary() && u.is_in_normalizer());
        for r in src.units() {
            let lhs = BlockMatrix::ad(&u, &phi.image_of_unit(r).unwrap()).unwrap();
            assert_eq!(lhs, psi.image_of_unit(r).unwrap());
        }

        let src = shape(&[1, 1]);
        let tgt = shape(&[2]);
        let m = mult(vec![vec![1, 1]]);
        let phi = MatrixUnitHom::build(&src, &tgt, &m).unwrap();
        let psi = MatrixUnitHom::from_partition(&src, &tgt, &m, vec![vec![vec![vec![1]], vec![vec![0]]]]).unwrap();
        let u = conjugating_unitary(&phi, &psi).unwrap();
        assert_eq!(u, h(&tgt, 0, 0, 1).add(&h(&tgt, 0, 1, 0)).unwrap());

        let other = MatrixUnitHom::build(&shape(&[1, 1]), &shape(&[2]), &m).unwrap();
        let two = MatrixUnitHom::build(&shape(&[1, 1]), &shape(&[2]), &mult(vec![vec![2, 0]])).unwrap();
        assert!(conjugating_unitary(&other, &two).is_err());
    }

    #[test]
    fn compose_and_from_images() {
        let a = shape(&[1, 2]);
        let b = shape(&[3, 2]);
        let c = shape(&[7]);
        let f = MatrixUnitHom::build(&a, &b, &mult(vec![vec![1, 1], vec![0, 1]])).unwrap();
        let g = MatrixUnitHom::build(&b, &c, &mult(vec![vec![1, 2]])).unwrap();
        let gf = MatrixUnitHom::compose(&g, &f).unwrap();
        assert_eq!(gf.mult().matrix(), &g.mult().matrix().mul(f.mult().matrix()).unwrap());
        assert!(gf.verify().all_pass());
        for r in a.units() {
            assert_eq!(
                gf.image_of_unit(r).unwrap(),
                g.apply(&f.image_of_unit(r).unwrap()).unwrap()
            );
        }
        assert!(MatrixUnitHom::compose(&f, &g).is_err());

        // a swap of two slot pairings is not of ascending form
        let m2 = shape(&[2]);
        let bad = MatrixUnitHom::from_images(&m2, &m2, |r| {
            let (p, q) = (1 - r.row, 1 - r.col);
            let x = if r.row == r.col { Scalar::one() } else { -Scalar::one() };
            Ok(h(&m2, 0, p, q).scale(x))
        });
        assert!(bad.is_err());
    }

    #[test]
    fn record_round_trip() {
        let hom = MatrixUnitHom::build(&shape(&[2, 3]), &shape(&[7, 5]), &mult(vec![vec![2, 1], vec![1, 1]])).unwrap();
        let rec = hom.to_record();
        assert_eq!(rec.partition[0][0][0], vec![1, 2]);
        assert_eq!(MatrixUnitHom::from_record(&rec).unwrap(), hom);
    }

    #[test]
    fn connecting_hom_matches_diagram_layout() {
        use crate::diagram::{EdgeBundle, SummandShape};
        use crate::interval_maps::PLMap;
        let d = LabeledBratteliDiagram::new(
            vec![
                vec![SummandShape::point(2), SummandShape::point(1)],
                vec![SummandShape::point(5), SummandShape::point(3)],
            ],
            vec![
                EdgeBundle { level: 0, source: 0, target: 0, labels: vec![PLMap::identity(); 2] },
                EdgeBundle { level: 0, source: 1, target: 0, labels: vec![PLMap::identity(); 1] },
                EdgeBundle { level: 0, source: 0, target: 1, labels: vec![PLMap::identity(); 1] },
                EdgeBundle { level: 0, source: 1, target: 1, labels: vec![PLMap::identity(); 1] },
            ],
            false,
        )
        .unwrap();
        let hom = MatrixUnitHom::connecting(&d, 0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s = d.label_count(0, j, i);
                for p in 0..d.sizes(0).unwrap()[j] {
                    let expect: Vec<usize> = (0..s)
                        .map(|y| d.arrival_slot(0, j, i, y, p) as usize)
                        .collect();
                    assert_eq!(hom.slots(i, j, p as usize), expect.as_slice());
                }
            }
        }
    }
}
