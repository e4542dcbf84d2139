mod common;

use bratteli_core::k_theory::{
    check_map, factor_unit, factorizations_at, solve_factorization, stage_k0, supernatural_invariant, Exponent, FactorProblem,
    Factorization, StageK0,
};
use bratteli_core::par::Exec;
use bratteli_core::IntMatrix;
use common::{random_af, tower};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every nonnegative vector below `bounds`, in lexicographic order.
fn boxes(bounds: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Exhaustive search over every stage and every bounded matrix, row by row.
fn brute_force(problem: &FactorProblem<'_>, y: &bratteli_core::diagram::LabeledBratteliDiagram, bound: usize) -> Factorization {
    let y = y.unrolled(bound).unwrap();
    let unit_src: Vec<i64> = problem.source.order_unit().iter().map(|&u| u as i64).collect();
    for m in problem.from_stage.max(problem.at)..bound.min(y.depth()) {
        let rhs = y.multiplicity_between(problem.at, m).unwrap().mul(problem.value).unwrap();
        let unit_y = stage_k0(&y, m).unwrap();
        let mut rows = Vec::new();
        for (r, &uy) in unit_y.order_unit().iter().enumerate() {
            let bounds: Vec<i64> = unit_src.iter().map(|&u| uy as i64 / u).collect();
            let hit = boxes(&bounds).into_iter().find(|x| {
                x.iter().zip(&unit_src).map(|(a, b)| a * b).sum::<i64>() == uy as i64
                    && (0..problem.through.cols())
                        .all(|c| x.iter().enumerate().map(|(k, &a)| a * problem.through.get(k, c)).sum::<i64>() == rhs.get(r, c))
            });
            match hit {
                Some(x) => rows.push(x),
                None => break,
            }
        }
        if rows.len() == unit_y.rank() {
            let map = bratteli_core::k_theory::OrderedGroupMap::new(
                IntMatrix::from_rows(rows).unwrap(),
                problem.source.clone(),
                unit_y,
            )
            .unwrap();
            return Factorization::Found { stage: m, map };
        }
    }
    Factorization::NotFoundUpTo(bound)
}

/// Every solution matrix at stage `m`, row-major lexicographic.
fn all_at_stage(problem: &FactorProblem<'_>, y: &bratteli_core::diagram::LabeledBratteliDiagram, m: usize) -> Vec<IntMatrix> {
    let unit_src: Vec<i64> = problem.source.order_unit().iter().map(|&u| u as i64).collect();
    let rhs = y.multiplicity_between(problem.at, m).unwrap().mul(problem.value).unwrap();
    let unit_y = stage_k0(y, m).unwrap();
    let per_row: Vec<Vec<Vec<i64>>> = unit_y
        .order_unit()
        .iter()
        .enumerate()
        .map(|(r, &uy)| {
            let bounds: Vec<i64> = unit_src.iter().map(|&u| uy as i64 / u).collect();
            boxes(&bounds)
                .into_iter()
                .filter(|x| {
                    x.iter().zip(&unit_src).map(|(a, b)| a * b).sum::<i64>() == uy as i64
                        && (0..problem.through.cols()).all(|c| {
                            x.iter().enumerate().map(|(k, &a)| a * problem.through.get(k, c)).sum::<i64>() == rhs.get(r, c)
                        })
                })
                .collect()
        })
        .collect();
    let mut out: Vec<Vec<Vec<i64>>> = vec![Vec::new()];
    for choices in per_row {
        out = out
            .into_iter()
            .flat_map(|m| {
                choices.iter().map(move |row| {
                    let mut m = m.clone();
                    m.push(row.clone());
                    m
                })
            })
            .collect();
    }
    out.into_iter().map(|rows| IntMatrix::from_rows(rows).unwrap()).collect()
}

#[test]
fn supernatural_examples() {
    let car = supernatural_invariant(&tower(&[1, 2, 4, 8]), 4).unwrap();
    assert_eq!(car.factors.into_iter().collect::<Vec<_>>(), vec![(2, Exponent::Infinite)]);
    let six = supernatural_invariant(&tower(&[3, 18, 108]), 3).unwrap();
    assert_eq!(six.to_string(), "{2:∞, 3:∞}");
    let finite = supernatural_invariant(&bratteli_core::diagram::LabeledBratteliDiagram::point_tower(&[2, 12], false).unwrap(), 2).unwrap();
    assert_eq!(finite.factors.into_iter().collect::<Vec<_>>(), vec![(2, Exponent::Finite(2)), (3, Exponent::Finite(1))]);
    assert!(supernatural_invariant(&common::fibonacci(), 4).is_err());
}

#[test]
fn unit_factorization_example() {
    let s = StageK0::new(vec![1, 2]).unwrap();
    let d = tower(&[1, 3, 9]);
    match factor_unit(&s, &d, 0, 5).unwrap() {
        Factorization::Found { stage, map } => {
            assert_eq!(stage, 0);
            assert_eq!(map.matrix, IntMatrix::from_rows(vec![vec![1, 0]]).unwrap());
        }
        other => panic!("{other:?}"),
    }
    // lexicographically first solution of x·(1,2) = 3
    match factor_unit(&s, &d, 1, 5).unwrap() {
        Factorization::Found { stage, map } => {
            assert_eq!(stage, 1);
            assert_eq!(map.matrix, IntMatrix::from_rows(vec![vec![1, 1]]).unwrap());
            assert!(map.check().unwrap().ok());
        }
        other => panic!("{other:?}"),
    }
    let two = StageK0::new(vec![2]).unwrap();
    assert_eq!(factor_unit(&two, &d, 0, 5).unwrap(), Factorization::NotFoundUpTo(5));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn factor_search_matches_brute_force(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let y = random_af(&mut r, 2, true);
        let at = r.gen_range(0..2);
        let width = y.levels()[at].len();
        let rank = r.gen_range(1..=3);
        let source = StageK0::new((0..rank).map(|_| r.gen_range(1..=3)).collect()).unwrap();
        let k = r.gen_range(1..=2);
        let lo = if r.gen_bool(0.3) { -1 } else { 0 };
        let through = IntMatrix::from_rows((0..rank).map(|_| (0..k).map(|_| r.gen_range(lo..=2)).collect()).collect()).unwrap();
        let value = IntMatrix::from_rows((0..width).map(|_| (0..k).map(|_| r.gen_range(0..=2)).collect()).collect()).unwrap();
        let problem = FactorProblem { source: &source, through: &through, value: &value, at, from_stage: at };
        let bound = 5;
        let fast = solve_factorization(&problem, &y, bound, Exec::Sequential).unwrap();
        prop_assert_eq!(&fast, &brute_force(&problem, &y, bound));
        prop_assert_eq!(fast.clone(), solve_factorization(&problem, &y, bound, Exec::Parallel).unwrap());
        if let Factorization::Found { map, .. } = fast {
            let check = check_map(&map.matrix, &map.source, &map.target).unwrap();
            prop_assert!(check.ok());
        }
    }

    #[test]
    fn connecting_matrices_are_positive_and_unital(seed in any::<u64>()) {
        let d = random_af(&mut ChaCha8Rng::seed_from_u64(seed), 3, true).unrolled(5).unwrap();
        for n in 0..4 {
            let c = check_map(&d.multiplicity_matrix(n).unwrap(), &stage_k0(&d, n).unwrap(), &stage_k0(&d, n + 1).unwrap()).unwrap();
            prop_assert!(c.ok());
        }
    }

    #[test]
    fn factor_through_reproduces_the_pushed_forward_map(seed in any::<u64>(), from in 0usize..2, at in 1usize..3) {
        let b = random_af(&mut ChaCha8Rng::seed_from_u64(seed), 2, true).unrolled(4).unwrap();
        let from = from.min(at - 1);
        // the composite connecting matrix is a positive unital map into stage `at`
        let g = b.multiplicity_between(from, at).unwrap();
        let map = bratteli_core::k_theory::OrderedGroupMap::new(g.clone(), stage_k0(&b, from).unwrap(), stage_k0(&b, at).unwrap()).unwrap();
        match bratteli_core::k_theory::factor_through(&map, at, &b, 6).unwrap() {
            Factorization::Found { stage, map: x } => {
                prop_assert_eq!(stage, at);
                prop_assert_eq!(&x.matrix, &g);
                prop_assert_eq!(b.multiplicity_between(at, stage).unwrap().mul(&g).unwrap(), x.matrix);
            }
            Factorization::NotFoundUpTo(_) => prop_assert!(false, "a positive unital map factors at its own stage"),
        }
    }

    #[test]
    fn candidate_lists_match_brute_force(seed in any::<u64>(), limit in 1usize..20) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let y = random_af(&mut r, 2, true).unrolled(4).unwrap();
        let rank = r.gen_range(1..=3);
        let source = StageK0::new((0..rank).map(|_| r.gen_range(1..=2)).collect()).unwrap();
        let unit = IntMatrix::column(&source.order_unit().iter().map(|&u| u as i64).collect::<Vec<_>>());
        let b0 = IntMatrix::column(&stage_k0(&y, 0).unwrap().order_unit().iter().map(|&u| u as i64).collect::<Vec<_>>());
        let problem = FactorProblem { source: &source, through: &unit, value: &b0, at: 0, from_stage: 0 };
        for m in 0..3 {
            let fast: Vec<IntMatrix> = factorizations_at(&problem, &y, m, limit, Exec::Sequential)
                .unwrap()
                .into_iter()
                .map(|g| g.matrix)
                .collect();
            let all = all_at_stage(&problem, &y, m);
            prop_assert_eq!(&fast[..], &all[..all.len().min(limit)]);
        }
    }

    #[test]
    fn supernatural_is_telescope_invariant(a in 1u64..4, b in 2u64..5, c in 2u64..5) {
        // sizes a, ab, abc, abc², … with repeated multiplicity c
        let d = tower(&[a, a * b, a * b * c]);
        let even = d.unrolled(7).unwrap().telescope(&[0, 2, 4, 6]).unwrap();
        prop_assert!(even.repeats());
        for k in 3..=6 {
            prop_assert_eq!(
                supernatural_invariant(&even, k).unwrap(),
                supernatural_invariant(&d, 2 * k - 1).unwrap()
            );
        }
    }
}
