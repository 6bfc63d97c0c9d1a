//! Library results against values computed here by independent means.

use std::collections::BTreeMap;

use mcshane::cantor::{box_dimension_estimate, branch_ratio, centered_removal, dimension_series, triple_at};
use mcshane::identity::{interval_layout, mcshane_sum};
use mcshane::{enumerate_tree, solve_c, validate_params, Budget, Exact, FrickeParams, MovePath, Real};

fn q(n: i64, d: i64) -> Exact {
    Exact::from_ratio(n, d)
}

// Markoff triples x <= y <= z <= limit by direct search.
fn brute_markoff(limit: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for z in 1..=limit {
        for y in 1..=z {
            for x in 1..=y {
                if x * x + y * y + z * z == 3 * x * y * z {
                    out.push((x, y, z));
                }
            }
        }
    }
    out
}

// Each triple with largest entry m contributes one geodesic per ordered pair
// (x, y); the whole torus counts it three times over its three entries.
fn summand_f64(m: f64) -> f64 {
    let t = (3.0 * m + (9.0 * m * m - 4.0).sqrt()) / 2.0;
    1.0 / (1.0 + t * t)
}

#[test]
fn checkpoint_sum_matches_markoff_oracle() {
    let mut oracle = 0.0;
    for (x, y, z) in brute_markoff(29) {
        let ordered = if x == y { 1.0 } else { 2.0 };
        oracle += 3.0 * ordered * summand_f64(z as f64);
    }
    let r = mcshane_sum(&FrickeParams::modular(), &Budget::max_z(29), 256).unwrap();
    let got = r.normalized.to_f64();
    assert!((got - oracle).abs() < 1e-14, "library {got} oracle {oracle}");
    assert!((got - 0.499_278_881_397_177).abs() < 1e-14);
}

#[test]
fn node_multiplicities_match_markoff_triples() {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for n in enumerate_tree(&FrickeParams::modular(), &Budget::max_z(1000)).unwrap() {
        let z = &n.triple.z;
        assert_eq!(*z.denom(), 1);
        *counts.entry(z.numer().to_u64().unwrap()).or_default() += 1;
    }
    let mut expected: BTreeMap<u64, usize> = BTreeMap::new();
    for (x, y, z) in brute_markoff(1000) {
        let ordered = if x == y { 1 } else { 2 };
        *expected.entry(z).or_default() += if z <= 2 { ordered } else { 3 * ordered };
    }
    // only the minimal root carries z = 1; z = 2 also appears at the ν-root
    expected.insert(1, 1);
    expected.insert(2, 3);
    assert_eq!(counts, expected);
    assert!(counts.contains_key(&89));
}

#[test]
fn first_branch_ratio_in_closed_form() {
    let p = FrickeParams::modular();
    let t = triple_at(&p, &"mL".parse::<MovePath>().unwrap());
    assert_eq!((t.x.clone(), t.y.clone(), t.z.clone()), (q(1, 1), q(1, 1), q(2, 1)));
    // width 3 - 2√2 over the gap √5 - 2, both inverted to avoid cancellation
    let oracle = (5f64.sqrt() + 2.0) / (3.0 + 2.0 * 2f64.sqrt());
    let got = branch_ratio(&t, &p, 128).unwrap().to_f64();
    assert!((got - oracle).abs() < 1e-15, "{got} vs {oracle}");
}

#[test]
fn layout_and_sum_agree() {
    let p = FrickeParams::modular();
    let prec = 256;
    let layout = interval_layout(&p, &Budget::depth(10)).unwrap();
    layout.check().unwrap();
    let total = layout.total_excised(prec);
    let r = mcshane_sum(&p, &Budget::depth(10), prec).unwrap();
    assert!(total < Real::from_int(3, prec));
    // the sum drops subtrees whose gaps are below its floor; the layout keeps them
    let missing = total - &r.partial_sum;
    let slack = Real::pow2(24 - prec as i32, prec);
    assert!(missing.clone() + &slack > Real::from_int(0, prec));
    assert!(missing < r.pruned_bound.clone() + &slack);
}

#[test]
fn non_modular_deficiency_shrinks() {
    let p = validate_params(q(5, 2), q(41, 12), q(89, 24)).unwrap();
    let d: Vec<f64> = [6, 10, 14]
        .iter()
        .map(|&k| mcshane_sum(&p, &Budget::depth(k), 256).unwrap().deficiency.to_f64())
        .collect();
    assert!(d[0] > d[1] && d[1] > d[2] && d[2] > 0.0, "{d:?}");
}

#[test]
fn real_and_exact_sums_agree() {
    let prec = 256;
    let exact = mcshane_sum(&FrickeParams::modular(), &Budget::depth(8), prec).unwrap();
    let three = Real::from_int(3, prec);
    let real = validate_params(three.clone(), three.clone(), three).unwrap();
    let r = mcshane_sum(&real, &Budget::depth(8), prec).unwrap();
    assert!(exact.normalized.rel_diff(&r.normalized) < Real::pow2(-200, prec));
}

#[test]
fn solved_c_reproduces_the_modular_point() {
    let c = solve_c(&Real::from_int(3, 128), &Real::from_int(3, 128)).unwrap();
    assert!((c.to_f64() - 3.0).abs() < 1e-30);
    assert_eq!(solve_c(&q(3, 1), &q(3, 1)).unwrap(), q(3, 1));
}

#[test]
fn middle_thirds_slope() {
    let prec = 128;
    let g = centered_removal(12, &(Real::from_int(1, prec) / &Real::from_int(3, prec)));
    let scales: Vec<Real> = (4..=10).map(|k| Real::from_int(1, prec) / &Real::from_int(3i64.pow(k), prec)).collect();
    let d = box_dimension_estimate(&g, &scales).unwrap();
    let oracle = 2f64.ln() / 3f64.ln();
    assert!((d.fit_slope.to_f64() - oracle).abs() < 0.01, "{}", d.fit_slope.to_f64());
}

#[test]
fn dimension_estimates_fall_with_depth() {
    let s = dimension_series(&FrickeParams::modular(), &[5, 8, 11, 14], 256).unwrap();
    for w in s.windows(2) {
        assert!(w[1].estimate < w[0].estimate);
    }
}
