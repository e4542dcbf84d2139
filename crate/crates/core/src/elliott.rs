//! The zigzag of an exact intertwining between two AF diagrams, lifted to
//! diagonal-preserving homomorphisms and corrected by normalizing unitaries.
//!
//! A certificate of depth `d` consists of stages
//! `n_1 < … < n_{d+1}` of `A` and `m_1 < … < m_d` of `B`, homomorphisms
//! `f_k: A_{n_k} → B_{m_k}` and `g_k: B_{m_k} → A_{n_{k+1}}`, and unitaries
//! in the normalizers of the diagonals with
//!
//! * `g_k ∘ f_k = Ad(U_{k+1}) ∘ φ_{n_k n_{k+1}}` for `k = 1..d`,
//! * `f_{k+1} ∘ g_k = Ad(V_{k+1}) ∘ ψ_{m_k m_{k+1}}` for `k = 1..d-1`,
//!
//! where `φ`, `ψ` are the connecting maps of the two diagrams.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan_hom::{conjugating_unitary, shape_of, HomRecord, HomReport, MatrixUnitHom, MultiplicityMatrix};
use crate::diagram::LabeledBratteliDiagram;
use crate::error::{Error, Result};
use crate::fd_algebra::{AlgebraShape, BlockMatrix};
use crate::int_matrix::IntMatrix;
use crate::k_theory::{
    factorizations_at, stage_k0, supernatural_invariant, FactorProblem,
    OrderedGroupMap, SupernaturalNumber,
};
use crate::par::Exec;

/// How the first K0 map `α_1` is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Seed {
    /// The first positive unital map out of stage `a_stage` of `A`.
    Auto { a_stage: usize },
    /// A given map `K0(A_{a_stage}) → K0(B_{b_stage})`, pushed forward to
    /// the first stage of `B` where it is positive and unital.
    Matrix {
        a_stage: usize,
        b_stage: usize,
        matrix: IntMatrix,
    },
}

impl Default for Seed {
    fn default() -> Self {
        Seed::Auto { a_stage: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

/// Which arrow of the zigzag could not be found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Arrow {
    /// `α_k: K0(A_{n_k}) → K0(B_{m_k})`
    Down(usize),
    /// `β_k: K0(B_{m_k}) → K0(A_{n_{k+1}})`
    Up(usize),
}

/// A bounded search failure. It never proves that no isomorphism exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundedRefutation {
    pub arrow: Arrow,
    /// Zero-based stage the missing map starts from.
    pub source_stage: usize,
    pub bound: usize,
}

impl fmt::Display for BoundedRefutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, side) = match self.arrow {
            Arrow::Down(k) => (format!("α_{k}"), "A"),
            Arrow::Up(k) => (format!("β_{k}"), "B"),
        };
        write!(
            f,
            "no positive unital factorization {} out of {} stage {} up to level {} (bounded search, not a proof)",
            name,
            side,
            self.source_stage + 1,
            self.bound
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntertwiningCertificate {
    pub stages_a: Vec<usize>,
    pub stages_b: Vec<usize>,
    pub downs: Vec<MatrixUnitHom>,
    pub ups: Vec<MatrixUnitHom>,
    pub unitaries_a: Vec<BlockMatrix>,
    pub unitaries_b: Vec<BlockMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intertwining {
    Certificate(IntertwiningCertificate),
    NotFound(BoundedRefutation),
}

/// Search bound used when none is given: the larger level count, plus room
/// for `2·depth` further stages when a diagram repeats.
pub fn default_search_bound(a: &LabeledBratteliDiagram, b: &LabeledBratteliDiagram, depth: usize) -> usize {
    let base = a.depth().max(b.depth());
    if a.repeats() || b.repeats() {
        base + 2 * depth
    } else {
        base
    }
}

fn require_af(d: &LabeledBratteliDiagram, name: &str) -> Result<()> {
    if !d.is_af() {
        return Err(Error::Unsupported(format!(
            "diagram {name} has interval summands; only AF diagrams are supported"
        )));
    }
    Ok(())
}

/// Connecting map from level `from` to level `to` (identity when equal).
pub fn connecting_map(d: &LabeledBratteliDiagram, from: usize, to: usize) -> Result<MatrixUnitHom> {
    if from > to {
        return Err(Error::Argument(format!("no connecting map from level {} down to {}", from + 1, to + 1)));
    }
    let mut acc = MatrixUnitHom::identity(&shape_of(d, from)?);
    for n in from..to {
        acc = MatrixUnitHom::compose(&MatrixUnitHom::connecting(d, n)?, &acc)?;
    }
    Ok(acc)
}

/// Candidate K0 maps tried per stage and zigzag step.
const CANDIDATES_PER_STAGE: usize = 16;
/// Solutions inspected per stage before the continuation filter.
const CANDIDATES_SCANNED: usize = 1024;
/// Factorization problems solved before the zigzag search gives up.
const ZIGZAG_BUDGET: usize = 4096;

/// Depth-first search for the K0 zigzag `α_1, β_1, α_2, …, β_d`. Step `s`
/// is `α_{s/2+1}` for even `s` and `β_{(s+1)/2}` for odd `s`. Candidates
/// are tried by increasing stage, lexicographically within a stage.
struct Zigzag<'a> {
    a: &'a LabeledBratteliDiagram,
    b: &'a LabeledBratteliDiagram,
    seed: &'a Seed,
    depth: usize,
    bound: usize,
    budget: usize,
    maps: Vec<IntMatrix>,
    stages: Vec<usize>,
    /// Deepest failing step and its refutation.
    worst: Option<(usize, BoundedRefutation)>,
}

impl Zigzag<'_> {
    fn step(&mut self) -> Result<bool> {
        let s = self.maps.len();
        if s == 2 * self.depth {
            return Ok(true);
        }
        let (n, m) = self.current();
        let (arrow, source_stage) = if s.is_multiple_of(2) { (Arrow::Down(s / 2 + 1), n) } else { (Arrow::Up(s / 2 + 1), m) };
        let (src_diagram, tgt) = if s.is_multiple_of(2) { (self.a, self.b) } else { (self.b, self.a) };
        let source = stage_k0(src_diagram, source_stage)?;
        let identity = |d: &LabeledBratteliDiagram, k: usize| -> Result<IntMatrix> { Ok(IntMatrix::identity(d.level(k)?.len())) };
        // X · through = S_{stage←at} · value, X · unit = unit
        let (through, value, at, from) = match (s, self.seed) {
            (0, Seed::Auto { .. }) => {
                let unit = IntMatrix::column(&source.unit_i64()?);
                let b0 = IntMatrix::column(&stage_k0(self.b, 0)?.unit_i64()?);
                (unit, b0, 0, 0)
            }
            (0, Seed::Matrix { b_stage, matrix, .. }) => {
                // validates the seed against both stages
                OrderedGroupMap::new(matrix.clone(), source.clone(), stage_k0(self.b, *b_stage)?)?;
                (identity(self.a, n)?, matrix.clone(), *b_stage, *b_stage)
            }
            (_, _) if s % 2 == 1 => (self.maps[s - 1].clone(), identity(self.a, n)?, n, n + 1),
            _ => (self.maps[s - 1].clone(), identity(self.b, m)?, m, m + 1),
        };
        let problem = FactorProblem { source: &source, through: &through, value: &value, at, from_stage: from };
        // The next step needs Y·X = connecting map out of `source_stage`, so
        // the row space of the farthest such map must lie in that of X.
        // Skipped when that product overflows.
        let far = if s + 1 < 2 * self.depth {
            let last = self.bound.min(src_diagram.depth()).max(source_stage + 1) - 1;
            src_diagram.multiplicity_between(source_stage, last).ok()
        } else {
            None
        };
        for stage in from.max(at)..self.bound.min(tgt.depth()) {
            if self.budget == 0 {
                break;
            }
            self.budget -= 1;
            let candidates = factorizations_at(&problem, tgt, stage, CANDIDATES_SCANNED, Exec::default())?
                .into_iter()
                .filter(|x| far.as_ref().is_none_or(|f| x.matrix.row_space_contains(f)))
                .take(CANDIDATES_PER_STAGE);
            for map in candidates {
                self.maps.push(map.matrix);
                self.stages.push(stage);
                if self.step()? {
                    return Ok(true);
                }
                self.maps.pop();
                self.stages.pop();
            }
        }
        if self.worst.as_ref().is_none_or(|(w, _)| s > *w) {
            self.worst = Some((s, BoundedRefutation { arrow, source_stage, bound: self.bound }));
        }
        Ok(false)
    }

    /// Current stages `(n, m)` of `A` and `B`; `m` is meaningless before `α_1`.
    fn current(&self) -> (usize, usize) {
        let a0 = match self.seed {
            Seed::Auto { a_stage } | Seed::Matrix { a_stage, .. } => *a_stage,
        };
        let n = self.stages.iter().skip(1).step_by(2).next_back().copied().unwrap_or(a0);
        let m = self.stages.iter().step_by(2).next_back().copied().unwrap_or(0);
        (n, m)
    }
}

/// Builds the K0 zigzag by repeated factorization, lifts every arrow to the
/// canonical homomorphism and corrects every triangle by a normalizing
/// unitary.
pub fn build_intertwining(
    a: &LabeledBratteliDiagram,
    b: &LabeledBratteliDiagram,
    seed: &Seed,
    depth: usize,
    search_bound: usize,
) -> Result<Intertwining> {
    require_af(a, "A")?;
    require_af(b, "B")?;
    if depth < 1 {
        return Err(Error::Argument("certificate depth must be at least 1".into()));
    }
    let a = a.unrolled(search_bound)?;
    let b = b.unrolled(search_bound)?;
    let mut search = Zigzag {
        a: &a,
        b: &b,
        seed,
        depth,
        bound: search_bound,
        budget: ZIGZAG_BUDGET,
        maps: Vec::new(),
        stages: Vec::new(),
        worst: None,
    };
    if !search.step()? {
        let (_, refutation) = search.worst.expect("a failed search records its failure");
        return Ok(Intertwining::NotFound(refutation));
    }
    let a0 = match seed {
        Seed::Auto { a_stage } | Seed::Matrix { a_stage, .. } => *a_stage,
    };
    let mut stages_a = vec![a0];
    let mut stages_b = Vec::new();
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    for (s, (stage, map)) in search.stages.iter().zip(search.maps).enumerate() {
        if s.is_multiple_of(2) {
            stages_b.push(*stage);
            alphas.push(map);
        } else {
            stages_a.push(*stage);
            betas.push(map);
        }
    }

    let lift = |src: &LabeledBratteliDiagram, s: usize, tgt: &LabeledBratteliDiagram, t: usize, mat: &IntMatrix| {
        MatrixUnitHom::build(&shape_of(src, s)?, &shape_of(tgt, t)?, &MultiplicityMatrix::new(mat.clone())?)
    };
    let mut downs = Vec::with_capacity(depth);
    let mut ups = Vec::with_capacity(depth);
    for k in 0..depth {
        downs.push(lift(&a, stages_a[k], &b, stages_b[k], &alphas[k])?);
        ups.push(lift(&b, stages_b[k], &a, stages_a[k + 1], &betas[k])?);
    }
    let mut unitaries_a = Vec::with_capacity(depth);
    for k in 0..depth {
        let phi = connecting_map(&a, stages_a[k], stages_a[k + 1])?;
        let gf = MatrixUnitHom::compose(&ups[k], &downs[k])?;
        unitaries_a.push(conjugating_unitary(&phi, &gf)?);
    }
    let mut unitaries_b = Vec::with_capacity(depth.saturating_sub(1));
    for k in 0..depth - 1 {
        let psi = connecting_map(&b, stages_b[k], stages_b[k + 1])?;
        let fg = MatrixUnitHom::compose(&downs[k + 1], &ups[k])?;
        unitaries_b.push(conjugating_unitary(&psi, &fg)?);
    }
    Ok(Intertwining::Certificate(IntertwiningCertificate {
        stages_a,
        stages_b,
        downs,
        ups,
        unitaries_a,
        unitaries_b,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    pub side: Side,
    /// One-based index `k` of the triangle.
    pub index: usize,
    pub commutes: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub downs: Vec<HomReport>,
    pub ups: Vec<HomReport>,
    /// Per unitary: unitary and normalizing.
    pub unitaries_a: Vec<bool>,
    pub unitaries_b: Vec<bool>,
    pub triangles: Vec<TriangleReport>,
}

impl CertificateReport {
    pub fn all_pass(&self) -> bool {
        self.downs.iter().chain(&self.ups).all(HomReport::all_pass)
            && self.unitaries_a.iter().chain(&self.unitaries_b).all(|&u| u)
            && self.triangles.iter().all(|t| t.commutes)
    }
}

impl IntertwiningCertificate {
    pub fn depth(&self) -> usize {
        self.downs.len()
    }

    fn check_dimensions(&self, a: &LabeledBratteliDiagram, b: &LabeledBratteliDiagram) -> Result<()> {
        let d = self.depth();
        let bad = |why: String| Err(Error::Argument(format!("certificate does not fit the diagrams: {why}")));
        let expected_a = if d == 0 { self.stages_a.len().min(1) } else { d + 1 };
        if self.ups.len() != d
            || self.stages_b.len() != d
            || self.stages_a.len() != expected_a
            || self.unitaries_a.len() != d
            || self.unitaries_b.len() != d.saturating_sub(1)
        {
            return bad("inconsistent lengths".into());
        }
        if self.stages_a.windows(2).any(|w| w[0] >= w[1]) || self.stages_b.windows(2).any(|w| w[0] >= w[1]) {
            return bad("stages are not strictly increasing".into());
        }
        for k in 0..d {
            let (n, m, n1) = (self.stages_a[k], self.stages_b[k], self.stages_a[k + 1]);
            if *self.downs[k].source() != shape_of(a, n)? || *self.downs[k].target() != shape_of(b, m)? {
                return bad(format!("f_{} does not map A_{} to B_{}", k + 1, n + 1, m + 1));
            }
            if *self.ups[k].source() != shape_of(b, m)? || *self.ups[k].target() != shape_of(a, n1)? {
                return bad(format!("g_{} does not map B_{} to A_{}", k + 1, m + 1, n1 + 1));
            }
            if *self.unitaries_a[k].shape() != shape_of(a, n1)? {
                return bad(format!("U_{} does not lie in A_{}", k + 2, n1 + 1));
            }
        }
        for k in 0..d.saturating_sub(1) {
            if *self.unitaries_b[k].shape() != shape_of(b, self.stages_b[k + 1])? {
                return bad(format!("V_{} does not lie in B_{}", k + 2, self.stages_b[k + 1] + 1));
            }
        }
        Ok(())
    }

    /// Rechecks every homomorphism, unitary and triangle by exact
    /// computation on matrix units.
    pub fn verify(&self, a: &LabeledBratteliDiagram, b: &LabeledBratteliDiagram) -> Result<CertificateReport> {
        self.verify_with(a, b, Exec::default())
    }

    pub fn verify_with(
        &self,
        a: &LabeledBratteliDiagram,
        b: &LabeledBratteliDiagram,
        exec: Exec,
    ) -> Result<CertificateReport> {
        let last_a = self.stages_a.last().copied().unwrap_or(0);
        let last_b = self.stages_b.last().copied().unwrap_or(0);
        let a = a.unrolled(last_a + 1)?;
        let b = b.unrolled(last_b + 1)?;
        self.check_dimensions(&a, &b)?;
        let d = self.depth();
        let downs = self.downs.iter().map(|h| h.verify_with(exec)).collect();
        let ups = self.ups.iter().map(|h| h.verify_with(exec)).collect();
        let ok_unitary = |u: &BlockMatrix| u.is_unitary() && u.is_in_normalizer();
        let unitaries_a = self.unitaries_a.iter().map(ok_unitary).collect();
        let unitaries_b = self.unitaries_b.iter().map(ok_unitary).collect();
        let mut triangles = Vec::new();
        for k in 0..d {
            let phi = connecting_map(&a, self.stages_a[k], self.stages_a[k + 1])?;
            triangles.push(check_triangle(
                Side::A,
                k + 1,
                &self.downs[k],
                &self.ups[k],
                &phi,
                &self.unitaries_a[k],
                exec,
            )?);
        }
        for k in 0..d.saturating_sub(1) {
            let psi = connecting_map(&b, self.stages_b[k], self.stages_b[k + 1])?;
            triangles.push(check_triangle(
                Side::B,
                k + 1,
                &self.ups[k],
                &self.downs[k + 1],
                &psi,
                &self.unitaries_b[k],
                exec,
            )?);
        }
        Ok(CertificateReport {
            downs,
            ups,
            unitaries_a,
            unitaries_b,
            triangles,
        })
    }

    pub fn to_record(&self) -> CertificateRecord {
        let unitary = |u: &BlockMatrix| UnitaryRecord {
            shape: u.shape().sizes().to_vec(),
            permutation: u
                .permutation_table()
                .map(|t| t.into_iter().map(|p| p.into_iter().map(|r| r + 1).collect()).collect()),
            entries: if u.permutation_table().is_some() {
                None
            } else {
                Some(u.to_triplets())
            },
        };
        CertificateRecord {
            depth: self.depth(),
            stages_a: self.stages_a.iter().map(|n| n + 1).collect(),
            stages_b: self.stages_b.iter().map(|n| n + 1).collect(),
            downs: self.downs.iter().map(MatrixUnitHom::to_record).collect(),
            ups: self.ups.iter().map(MatrixUnitHom::to_record).collect(),
            unitaries_a: self.unitaries_a.iter().map(unitary).collect(),
            unitaries_b: self.unitaries_b.iter().map(unitary).collect(),
        }
    }

    pub fn from_record(rec: &CertificateRecord) -> Result<Self> {
        let stage = |s: &usize| {
            s.checked_sub(1)
                .ok_or_else(|| Error::Argument("stages are numbered from 1".into()))
        };
        let unitary = |u: &UnitaryRecord| -> Result<BlockMatrix> {
            let shape = AlgebraShape::new(u.shape.clone())?;
            let table = u
                .permutation
                .as_ref()
                .ok_or_else(|| Error::Unsupported("only permutation unitaries can be read back".into()))?;
            let table = table
                .iter()
                .map(|p| p.iter().map(stage).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            BlockMatrix::from_permutation_table(&shape, &table)
        };
        Ok(IntertwiningCertificate {
            stages_a: rec.stages_a.iter().map(stage).collect::<Result<_>>()?,
            stages_b: rec.stages_b.iter().map(stage).collect::<Result<_>>()?,
            downs: rec.downs.iter().map(MatrixUnitHom::from_record).collect::<Result<_>>()?,
            ups: rec.ups.iter().map(MatrixUnitHom::from_record).collect::<Result<_>>()?,
            unitaries_a: rec.unitaries_a.iter().map(unitary).collect::<Result<_>>()?,
            unitaries_b: rec.unitaries_b.iter().map(unitary).collect::<Result<_>>()?,
        })
    }

    /// Pretty JSON with one-based stages, slots and permutation tables.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: CertificateRecord =
            serde_json::from_str(text).map_err(|e| Error::Argument(format!("certificate: {e}")))?;
        Self::from_record(&rec)
    }
}

/// `second ∘ first = Ad(u) ∘ conn` on every matrix unit of the source.
fn check_triangle(
    side: Side,
    index: usize,
    first: &MatrixUnitHom,
    second: &MatrixUnitHom,
    conn: &MatrixUnitHom,
    u: &BlockMatrix,
    exec: Exec,
) -> Result<TriangleReport> {
    let units = first.source().units();
    let u_star = u.adjoint();
    let failures = exec.map(&units, |&r| {
        let lhs = second.apply(&first.image_of_unit(r).ok()?).ok()?;
        let rhs = u.mul(&conn.image_of_unit(r).ok()?).ok()?.mul(&u_star).ok()?;
        (lhs != rhs).then(|| format!("differs on e^{}_({},{})", r.summand + 1, r.row + 1, r.col + 1))
    });
    let note = failures.into_iter().flatten().next();
    let fits = first.target() == second.source() && second.target() == conn.target() && conn.source() == first.source();
    Ok(TriangleReport {
        side,
        index,
        commutes: fits && note.is_none(),
        note: if fits { note } else { Some("shapes do not fit".into()) },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitaryRecord {
    pub shape: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub permutation: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub entries: Option<crate::fd_algebra::Triplets>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub depth: usize,
    pub stages_a: Vec<usize>,
    pub stages_b: Vec<usize>,
    pub downs: Vec<HomRecord>,
    pub ups: Vec<HomRecord>,
    pub unitaries_a: Vec<UnitaryRecord>,
    pub unitaries_b: Vec<UnitaryRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Yes(IntertwiningCertificate),
    NoWitness {
        refutation: BoundedRefutation,
        /// Supernatural numbers of `A` and `B` when both are single-summand.
        supernatural: Option<(SupernaturalNumber, SupernaturalNumber)>,
    },
}

/// Builds and verifies a certificate; falls back to a bounded refutation,
/// paired with supernatural numbers for single-summand towers.
pub fn decide_af_pair_isomorphic(
    a: &LabeledBratteliDiagram,
    b: &LabeledBratteliDiagram,
    seed: &Seed,
    depth: usize,
    search_bound: Option<usize>,
) -> Result<Decision> {
    let bound = search_bound.unwrap_or_else(|| default_search_bound(a, b, depth));
    match build_intertwining(a, b, seed, depth, bound)? {
        Intertwining::Certificate(cert) => {
            let report = cert.verify(a, b)?;
            if !report.all_pass() {
                return Err(Error::Precondition(format!(
                    "constructed certificate failed verification: {:?}",
                    report.triangles.iter().find(|t| !t.commutes)
                )));
            }
            Ok(Decision::Yes(cert))
        }
        Intertwining::NotFound(refutation) => {
            let single = |d: &LabeledBratteliDiagram| d.levels().iter().all(|l| l.len() == 1);
            let supernatural = if single(a) && single(b) {
                Some((
                    supernatural_invariant(a, bound)?,
                    supernatural_invariant(b, bound)?,
                ))
            } else {
                None
            };
            Ok(Decision::NoWitness {
                refutation,
                supernatural,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(sizes: &[u64]) -> LabeledBratteliDiagram {
        LabeledBratteliDiagram::point_tower(sizes, true).unwrap()
    }

    fn certificate(a: &LabeledBratteliDiagram, b: &LabeledBratteliDiagram, depth: usize) -> IntertwiningCertificate {
        match build_intertwining(a, b, &Seed::default(), depth, default_search_bound(a, b, depth)).unwrap() {
            Intertwining::Certificate(c) => c,
            Intertwining::NotFound(r) => panic!("{r}"),
        }
    }

    #[test]
    fn car_against_its_telescope() {
        let a = tower(&[1, 2, 4, 8]);
        let b = tower(&[1, 4, 16]);
        let cert = certificate(&a, &b, 3);
        assert_eq!(cert.stages_a, vec![0, 1, 2, 4]);
        assert_eq!(cert.stages_b, vec![0, 1, 2]);
        assert!(cert.verify(&a, &b).unwrap().all_pass());
    }

    #[test]
    fn identical_presentations_give_identities() {
        let a = tower(&[2, 2]);
        let cert = certificate(&a, &a, 3);
        for (k, f) in cert.downs.iter().enumerate() {
            assert_eq!(*f, MatrixUnitHom::identity(f.source()), "f_{}", k + 1);
        }
        for u in cert.unitaries_a.iter().chain(&cert.unitaries_b) {
            assert_eq!(*u, BlockMatrix::identity(u.shape()));
        }
        assert!(cert.verify(&a, &a).unwrap().all_pass());
    }

    #[test]
    fn two_against_three() {
        let a = tower(&[2, 4, 8, 16]);
        let b = tower(&[3, 9, 27, 81]);
        match decide_af_pair_isomorphic(&a, &b, &Seed::default(), 5, None).unwrap() {
            Decision::NoWitness {
                refutation,
                supernatural: Some((sa, sb)),
            } => {
                assert_eq!(refutation.arrow, Arrow::Down(1));
                assert_eq!(refutation.source_stage, 0);
                assert_eq!(sa.to_string(), "{2:∞}");
                assert_eq!(sb.to_string(), "{3:∞}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn replacing_a_nontrivial_unitary_breaks_a_triangle() {
        // two summands merged in both orders force a swap
        use crate::diagram::{EdgeBundle, SummandShape};
        use crate::interval_maps::PLMap;
        let id = || vec![PLMap::identity()];
        let a = LabeledBratteliDiagram::new(
            vec![
                vec![SummandShape::point(1), SummandShape::point(1)],
                vec![SummandShape::point(2)],
            ],
            vec![
                EdgeBundle { level: 0, source: 0, target: 0, labels: id() },
                EdgeBundle { level: 0, source: 1, target: 0, labels: id() },
            ],
            false,
        )
        .unwrap();
        let seed = Seed::Matrix {
            a_stage: 0,
            b_stage: 0,
            matrix: IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap(),
        };
        let cert = match build_intertwining(&a, &a, &seed, 1, 2).unwrap() {
            Intertwining::Certificate(c) => c,
            Intertwining::NotFound(r) => panic!("{r}"),
        };
        assert!(cert.verify(&a, &a).unwrap().all_pass());
        let k = cert
            .unitaries_a
            .iter()
            .position(|u| *u != BlockMatrix::identity(u.shape()))
            .expect("a nontrivial correction");
        let mut broken = cert.clone();
        broken.unitaries_a[k] = BlockMatrix::identity(cert.unitaries_a[k].shape());
        let report = broken.verify(&a, &a).unwrap();
        assert!(!report.all_pass());
        assert!(report.triangles[k].note.is_some());
    }

    #[test]
    fn empty_certificate_passes() {
        let a = tower(&[1, 2]);
        let empty = IntertwiningCertificate {
            stages_a: vec![],
            stages_b: vec![],
            downs: vec![],
            ups: vec![],
            unitaries_a: vec![],
            unitaries_b: vec![],
        };
        assert!(empty.verify(&a, &a).unwrap().all_pass());
    }

    #[test]
    fn json_round_trip() {
        let a = tower(&[1, 2, 4, 8]);
        let b = tower(&[1, 4, 16]);
        let cert = certificate(&a, &b, 2);
        let text = cert.to_json();
        assert_eq!(IntertwiningCertificate::from_json(&text).unwrap(), cert);
        assert_eq!(cert.to_json(), certificate(&a, &b, 2).to_json());
    }

    #[test]
    fn rejects_bad_input() {
        let a = tower(&[1, 2]);
        assert!(build_intertwining(&a, &a, &Seed::default(), 0, 4).is_err());
        let ai = crate::spectrum::build_goodearl(&[1, 2], &[crate::rational::q(1, 2)]).unwrap();
        assert!(matches!(
            build_intertwining(&ai, &a, &Seed::default(), 1, 4),
            Err(Error::Unsupported(_))
        ));
    }
}
