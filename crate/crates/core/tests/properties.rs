use mcshane::identity::{geodesic_length, node_gap, node_gap_start, node_interval, summand, summand_from_length};
use mcshane::moebius::{expected_height_change, raises_height};
use mcshane::tree::node_at;
use mcshane::fricke::satisfies_adjusted;
use mcshane::{validate_params, Error, Exact, FrickeParams, HLine, Mat2, Move, MovePath, Real, RootTag, Scalar};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Exact {
    Exact::from_ratio(n, d)
}

fn non_modular() -> FrickeParams<Exact> {
    validate_params(q(5, 2), q(41, 12), q(89, 24)).unwrap()
}

fn path_strategy() -> impl Strategy<Value = MovePath> {
    (any::<bool>(), prop::collection::vec(any::<bool>(), 0..14)).prop_map(|(nu, steps)| {
        let root = if nu { RootTag::NuRoot } else { RootTag::Minimal };
        MovePath::new(root, steps.into_iter().map(|l| if l { Move::Lambda } else { Move::Rho }).collect())
    })
}

fn check_node(params: &FrickeParams<Exact>, path: &MovePath) -> Result<(), TestCaseError> {
    let n = node_at(params, path);
    let [e, f, g] = n.matrices();
    prop_assert_eq!(&(&(&g * &f) * &e), &Mat2::translation(&params.a));
    for m in [&e, &f, &g] {
        prop_assert!(m.is_order_two());
    }
    prop_assert_eq!(e.gamma.abs(), n.triple.z.clone());
    prop_assert_eq!(f.gamma.abs(), n.triple.y.clone());
    prop_assert_eq!(g.gamma.abs(), n.triple.x.clone());
    prop_assert!(satisfies_adjusted(&n.triple, params));
    prop_assert_eq!(n.depth, path.depth());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn node_invariants_modular(path in path_strategy()) {
        check_node(&FrickeParams::modular(), &path)?;
    }

    #[test]
    fn node_invariants_non_modular(path in path_strategy()) {
        check_node(&non_modular(), &path)?;
    }

    #[test]
    fn children_grow_and_nest(path in path_strategy(), left in any::<bool>()) {
        let p = non_modular();
        let parent = node_at(&p, &path);
        let child = node_at(&p, &path.child(if left { Move::Lambda } else { Move::Rho }));
        // endpoint margins shrink like 1/z^2 of the grandchildren
        let z = &child.triple.z.0;
        let bits = z.numer().significant_bits().saturating_sub(z.denom().significant_bits()).max(1);
        let prec = 128 + 8 * bits;
        let gap = |n: &mcshane::TreeNode<Exact>| {
            let start = node_gap_start(n, &p, prec);
            let end = start.clone() + &node_gap(&n.triple, &p.a, prec);
            (start, end)
        };
        prop_assert!(child.triple.z > parent.triple.z);
        // a node's interval splits its gap; the child's gap lies on one side
        let (ps, pe) = gap(&parent);
        let iv = node_interval(&parent, &p);
        let (lo, hi) = (iv.lo(prec), iv.hi(prec));
        prop_assert!(lo > ps && hi < pe);
        let (cs, ce) = gap(&child);
        let slack = Real::pow2(16 - prec as i32, prec);
        let left_side = cs.clone() + &slack >= ps && ce <= lo.clone() + &slack;
        let right_side = cs + &slack >= hi && ce <= pe + &slack;
        prop_assert!(left_side || right_side);
    }

    #[test]
    fn path_text_is_stable(path in path_strategy()) {
        let text = path.to_string();
        prop_assert_eq!(text.parse::<MovePath>().unwrap(), path.clone());
        prop_assert_eq!(text.len(), 1 + path.steps().len());
    }

    #[test]
    fn height_lemma(
        c in -320i64..320, g in 8i64..128, neg in any::<bool>(),
        x in -512i64..512, r in 2i64..192,
    ) {
        let gamma = q(if neg { -g } else { g }, 32);
        let a = Mat2::order_two(&q(c, 64), &gamma);
        let line = HLine::new(q(x, 64), q(r, 64));
        let verdict = a.uplift_region().unwrap().classify(&line.apex());
        match raises_height(&a, &line) {
            Ok(h) => prop_assert_eq!(h, expected_height_change(verdict)),
            Err(Error::PoleOnCircle) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn height_lemma_on_the_boundaries(c in -320i64..320, g in 8i64..128, x in -512i64..512, s in 65i64..256, upper in any::<bool>()) {
        let gamma = q(g, 32);
        let a = Mat2::order_two(&q(c, 64), &gamma);
        let region = a.uplift_region().unwrap();
        let line = if upper {
            let x = q(x, 64);
            HLine::from_center_sq(x.clone(), region.upper_boundary_height_sq(&x))
        } else {
            let x = region.center.clone() + &(q(s, 64) / &gamma);
            HLine::from_center_sq(x.clone(), region.lower_boundary_height_sq(&x))
        };
        let verdict = region.classify(&line.apex());
        prop_assert!(verdict.is_boundary());
        match raises_height(&a, &line) {
            Ok(h) => prop_assert_eq!(h, expected_height_change(verdict)),
            Err(Error::PoleOnCircle) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn width_matches_length_form(u in 1e-9f64..1.0, scale in 0u32..7) {
        let prec = 256;
        let p = FrickeParams::modular().to_real(prec);
        let lo = Real::from_int(2, prec) / &p.a;
        let z = lo + &Real::from_f64(u * 10f64.powi(scale as i32), prec);
        let w = summand(&z, &p, prec).unwrap();
        let l = geodesic_length(&z, &p, prec).unwrap();
        prop_assert!(w.rel_diff(&summand_from_length(&l)) < Real::pow2(32 - prec as i32, prec));
    }
}
