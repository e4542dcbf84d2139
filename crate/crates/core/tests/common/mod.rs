#![allow(dead_code)]

use bratteli_core::cartan_hom::{MatrixUnitHom, MultiplicityMatrix, Partition};
use bratteli_core::diagram::{EdgeBundle, LabeledBratteliDiagram, SummandShape};
use bratteli_core::fd_algebra::{AlgebraShape, BlockMatrix, MatrixUnitRef};
use bratteli_core::interval_maps::PLMap;
use bratteli_core::IntMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

/// Ordered tuples of positive integers with sum at most `max`.
pub fn compositions(max: usize) -> Vec<Vec<usize>> {
    fn go(left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for x in 1..=left {
            cur.push(x);
            go(left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(max, &mut Vec::new(), &mut out);
    out
}

/// Calls `f` with every nonnegative integer matrix `K` (as rows) with
/// `K · n = m`.
pub fn for_each_unital_matrix<F: FnMut(&[Vec<i64>])>(n: &[usize], m: &[usize], mut f: F) {
    fn row(n: &[usize], j: usize, left: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if j == n.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=left / n[j] {
            cur.push(k as i64);
            row(n, j + 1, left - k * n[j], cur, out);
            cur.pop();
        }
    }
    let choices: Vec<Vec<Vec<i64>>> = m
        .iter()
        .map(|&mi| {
            let mut out = Vec::new();
            row(n, 0, mi, &mut Vec::new(), &mut out);
            out
        })
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; m.len()];
    let mut rows: Vec<Vec<i64>> = idx.iter().zip(&choices).map(|(&k, c)| c[k].clone()).collect();
    loop {
        f(&rows);
        // odometer over the row choices
        let mut i = m.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                rows[i] = choices[i][idx[i]].clone();
                break;
            }
            idx[i] = 0;
            rows[i] = choices[i][0].clone();
        }
    }
}

pub struct Instance {
    pub source: AlgebraShape,
    pub target: AlgebraShape,
    pub mult: MultiplicityMatrix,
}

pub fn instance(n: &[usize], rows: Vec<Vec<i64>>) -> Instance {
    let m: Vec<usize> = rows
        .iter()
        .map(|r| r.iter().zip(n).map(|(&k, &x)| k as usize * x).sum())
        .collect();
    Instance {
        source: AlgebraShape::new(n.to_vec()).unwrap(),
        target: AlgebraShape::new(m).unwrap(),
        mult: MultiplicityMatrix::from_rows(rows).unwrap(),
    }
}

/// A random instance with `1..=3` summands of size `1..=4` on each side
/// and multiplicities in `0..=3`, every target row nonzero.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let s = rng.gen_range(1..=3);
    let t = rng.gen_range(1..=3);
    let n: Vec<usize> = (0..s).map(|_| rng.gen_range(1..=4)).collect();
    let rows: Vec<Vec<i64>> = (0..t)
        .map(|_| loop {
            let r: Vec<i64> = (0..s).map(|_| rng.gen_range(0..=3)).collect();
            if r.iter().any(|&x| x > 0) {
                break r;
            }
        })
        .collect();
    instance(&n, rows)
}

/// A uniformly shuffled slot layout for the instance.
pub fn random_partition<R: Rng>(inst: &Instance, rng: &mut R) -> Partition {
    (0..inst.target.summands())
        .map(|i| {
            let mut slots: Vec<usize> = (0..inst.target.size(i)).collect();
            slots.shuffle(rng);
            let mut it = slots.into_iter();
            (0..inst.source.summands())
                .map(|j| {
                    (0..inst.source.size(j))
                        .map(|_| it.by_ref().take(inst.mult.k(i, j)).collect())
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// `x` has exactly the entries 0 and 1, at most one per row and column.
pub fn is_partial_permutation(x: &BlockMatrix) -> bool {
    (0..x.shape().summands()).all(|j| {
        let b = x.block(j);
        let mut rows = std::collections::BTreeSet::new();
        let mut cols = std::collections::BTreeSet::new();
        b.iter().all(|((r, c), v)| v.is_one() && rows.insert(r) && cols.insert(c))
    })
}

/// Brute-force check of every axiom on every pair of matrix units.
pub fn brute_force_hom(phi: &MatrixUnitHom) -> Result<(), String> {
    let source = phi.source();
    let target = phi.target();
    let units = source.units();
    let img: Vec<BlockMatrix> = units.iter().map(|&r| phi.image_of_unit(r).unwrap()).collect();
    let at = |r: MatrixUnitRef| units.iter().position(|&u| u == r).unwrap();
    for (a, &ra) in units.iter().enumerate() {
        if img[a].adjoint() != img[at(MatrixUnitRef::new(ra.summand, ra.col, ra.row))] {
            return Err(format!("adjoint fails at {ra:?}"));
        }
        if !is_partial_permutation(&img[a]) {
            return Err(format!("image of {ra:?} is not a partial permutation"));
        }
        if ra.row == ra.col && !img[a].is_diagonal() {
            return Err(format!("image of diagonal unit {ra:?} is not diagonal"));
        }
        for (b, &rb) in units.iter().enumerate() {
            let expected = if ra.summand == rb.summand && ra.col == rb.row {
                img[at(MatrixUnitRef::new(ra.summand, ra.row, rb.col))].clone()
            } else {
                BlockMatrix::zero(target)
            };
            if img[a].mul(&img[b]).unwrap() != expected {
                return Err(format!("φ({ra:?})φ({rb:?}) is wrong"));
            }
        }
    }
    let mut one = BlockMatrix::zero(target);
    for (a, &ra) in units.iter().enumerate() {
        if ra.row == ra.col {
            one = one.add(&img[a]).unwrap();
        }
    }
    if one != BlockMatrix::identity(target) {
        return Err("not unital".into());
    }
    for i in 0..target.summands() {
        for j in 0..source.summands() {
            let rank = img[at(MatrixUnitRef::new(j, 0, 0))].block(i).len();
            if rank != phi.mult().k(i, j) {
                return Err(format!("K0 entry ({i},{j}) is {rank}, expected {}", phi.mult().k(i, j)));
            }
        }
    }
    Ok(())
}

/// Every row and column of every block holds exactly one entry of modulus 1.
pub fn is_monomial_unitary(u: &BlockMatrix) -> bool {
    (0..u.shape().summands()).all(|j| {
        let b = u.block(j);
        let n = u.shape().size(j);
        let mut rows = vec![0; n];
        let mut cols = vec![0; n];
        for &((r, c), v) in b {
            let modulus = v.re() * v.re() + v.im() * v.im();
            if modulus != num_rational::Ratio::from_integer(1) {
                return false;
            }
            rows[r] += 1;
            cols[c] += 1;
        }
        rows.iter().chain(&cols).all(|&x| x == 1)
    })
}

/// Multi-summand AF diagram from repeated multiplicity matrices.
pub fn af_diagram(first: &[u64], layers: &[Vec<Vec<i64>>], repeat: bool) -> LabeledBratteliDiagram {
    let mut levels = vec![first.iter().map(|&s| SummandShape::point(s)).collect::<Vec<_>>()];
    let mut bundles = Vec::new();
    for (n, rows) in layers.iter().enumerate() {
        let m = IntMatrix::from_rows(rows.clone()).unwrap();
        let prev: Vec<u64> = levels[n].iter().map(|s| s.size).collect();
        let next = m.mul_vec(&prev).unwrap();
        levels.push(next.iter().map(|&s| SummandShape::point(s as u64)).collect());
        for (j, row) in rows.iter().enumerate() {
            for (i, &k) in row.iter().enumerate() {
                if k > 0 {
                    bundles.push(EdgeBundle {
                        level: n,
                        source: i,
                        target: j,
                        labels: vec![PLMap::identity(); k as usize],
                    });
                }
            }
        }
    }
    LabeledBratteliDiagram::new(levels, bundles, repeat).unwrap()
}

pub fn tower(sizes: &[u64]) -> LabeledBratteliDiagram {
    LabeledBratteliDiagram::point_tower(sizes, true).unwrap()
}

/// `[[1,1],[1,0]]` repeated: sizes (1,1), (2,1), (3,2), (5,3).
pub fn fibonacci() -> LabeledBratteliDiagram {
    let s = vec![vec![1, 1], vec![1, 0]];
    af_diagram(&[1, 1], &[s.clone(), s.clone(), s], true)
}

/// Random nonnegative `rows × cols` matrix with entries `0..=max` and no
/// zero row or column.
pub fn random_connected_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, max: i64) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..=max)).collect()).collect();
    for r in 0..rows {
        if m[r].iter().all(|&x| x == 0) {
            m[r][rng.gen_range(0..cols)] = 1;
        }
    }
    for c in 0..cols {
        if m.iter().all(|row| row[c] == 0) {
            m[rng.gen_range(0..rows)][c] = 1;
        }
    }
    m
}

/// Random AF diagram with `layers` layers, at most 3 summands per level and
/// multiplicities in `0..=2`. The last layer's matrix is square so that the
/// repetition rule applies.
pub fn random_af<R: Rng>(rng: &mut R, layers: usize, repeat: bool) -> LabeledBratteliDiagram {
    let first: Vec<u64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=3)).collect();
    let mut widths = vec![first.len()];
    for _ in 0..layers {
        widths.push(rng.gen_range(1..=3));
    }
    if repeat && layers > 0 {
        widths[layers] = widths[layers - 1];
    }
    let mats: Vec<Vec<Vec<i64>>> =
        (0..layers).map(|n| random_connected_matrix(rng, widths[n + 1], widths[n], 2)).collect();
    af_diagram(&first, &mats, repeat && layers > 0)
}
