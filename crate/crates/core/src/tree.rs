//! The tree of generator triples joined at the ν edge, and its best-first
//! enumeration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rug::Rational;

use crate::error::{Error, Result};
use crate::fricke::{apply_move, minimal_triple, FrickeParams, FrickeTriple, Move, MovePath, RootTag};
use crate::moebius::{Mat2, Point};
use crate::scalar::Scalar;

/// An order-two element stored as its fixed point: `center = alpha/gamma` and the
/// signed lower-left entry `gamma`. The matrix is [`Mat2::order_two`].
#[derive(Clone, Debug, PartialEq)]
pub struct HalfTurn<S> {
    pub center: S,
    pub gamma: S,
}

impl<S: Scalar> HalfTurn<S> {
    pub fn from_matrix(m: &Mat2<S>) -> Result<Self> {
        if !m.trace().is_zero() {
            return Err(Error::NotOrderTwo);
        }
        Ok(HalfTurn { center: m.center()?, gamma: m.gamma.clone() })
    }

    pub fn matrix(&self) -> Mat2<S> {
        Mat2::order_two(&self.center, &self.gamma)
    }

    /// `|gamma|`, the inverse height of the fixed point.
    pub fn inverse_height(&self) -> S {
        self.gamma.abs()
    }

    pub fn fixed_point(&self) -> Point<S> {
        Point::from_height_sq(self.center.clone(), self.gamma.int(1) / &self.gamma.square())
    }

    /// Conjugate by the translation `t`: `S^t A S^-t`.
    pub fn translated(&self, t: &S) -> Self {
        HalfTurn { center: self.center.clone() + t, gamma: self.gamma.clone() }
    }
}

/// A node: its address, its triple, and the elements `(E, F, G)` with
/// `G·F·E = S^a` and inverse fixed-point heights `(z, y, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode<S> {
    pub path: MovePath,
    pub triple: FrickeTriple<S>,
    pub elements: [HalfTurn<S>; 3],
    pub depth: usize,
}

impl<S: Scalar> TreeNode<S> {
    /// `(T0, T1, T2)` at the minimal triple.
    pub fn root(params: &FrickeParams<S>) -> Self {
        let (a, b, c) = (&params.a, &params.b, &params.c);
        let e = HalfTurn { center: a.int(0), gamma: c.clone() / a };
        let f = HalfTurn { center: a.square() / &(b.clone() * c), gamma: b.clone() / a };
        let g = HalfTurn { center: a.clone() - &(b.clone() / c), gamma: a.int(1) };
        TreeNode {
            path: MovePath::root(RootTag::Minimal),
            triple: minimal_triple(params),
            elements: [e, f, g],
            depth: 0,
        }
    }

    pub fn nu_root(params: &FrickeParams<S>) -> Self {
        step(&TreeNode::root(params), Move::Nu, params)
    }

    pub fn e(&self) -> &HalfTurn<S> {
        &self.elements[0]
    }

    pub fn f(&self) -> &HalfTurn<S> {
        &self.elements[1]
    }

    pub fn g(&self) -> &HalfTurn<S> {
        &self.elements[2]
    }

    pub fn matrices(&self) -> [Mat2<S>; 3] {
        [self.e().matrix(), self.f().matrix(), self.g().matrix()]
    }

    pub fn z(&self) -> &S {
        &self.triple.z
    }

    pub fn children(&self, params: &FrickeParams<S>) -> [TreeNode<S>; 2] {
        [step(self, Move::Lambda, params), step(self, Move::Rho, params)]
    }
}

/// Applies a move to the elements and the triple together.
///
/// The new `E` is a conjugate whose centre follows from the slide normal form
/// (`E` at 0, `F` at `x/(yz)`, `G` at `a - y/(xz)`), which avoids cancellation:
///
/// - λ: `(E, F, G) -> (EFE⁻¹, E, G)`, new centre `c_E - x/(z z')`
/// - ρ: `(E, F, G) -> (FGF⁻¹, F, S^a E S^-a)`, new centre `c_F - z/(y z')`
/// - ν: `(E, F, G) -> (FEF⁻¹, G, S^a F S^-a)`, new centre `c_G - y/(x z')`
///
/// `z'` is the new last triple entry; the sign of the new `gamma` is that of
/// `F`, `G` and `E` respectively.
pub fn apply_move_matrices<S: Scalar>(n: &TreeNode<S>, m: Move, params: &FrickeParams<S>) -> Result<TreeNode<S>> {
    if m == Move::Nu && n.path != MovePath::root(RootTag::Minimal) {
        return Err(Error::NuNotAtRoot);
    }
    Ok(step(n, m, params))
}

fn step<S: Scalar>(n: &TreeNode<S>, m: Move, params: &FrickeParams<S>) -> TreeNode<S> {
    let t = apply_move(&n.triple, m, params).expect("ν only at the root");
    let FrickeTriple { x, y, z } = &n.triple;
    let [e, f, g] = &n.elements;
    let z_new = &t.z;
    let signed = |like: &S| if like.sign() == Ordering::Less { -z_new.clone() } else { z_new.clone() };
    let (elements, path) = match m {
        Move::Lambda => {
            let e_new = HalfTurn {
                center: e.center.clone() - &(x.clone() / &(z.clone() * z_new)),
                gamma: signed(&f.gamma),
            };
            ([e_new, e.clone(), g.clone()], n.path.child(m))
        }
        Move::Rho => {
            let e_new = HalfTurn {
                center: f.center.clone() - &(z.clone() / &(y.clone() * z_new)),
                gamma: signed(&g.gamma),
            };
            ([e_new, f.clone(), e.translated(&params.a)], n.path.child(m))
        }
        Move::Nu => {
            let e_new = HalfTurn {
                center: g.center.clone() - &(y.clone() / &(x.clone() * z_new)),
                gamma: signed(&e.gamma),
            };
            ([e_new, g.clone(), f.translated(&params.a)], MovePath::root(RootTag::NuRoot))
        }
    };
    TreeNode { depth: path.depth(), path, triple: t, elements }
}

/// The defining products, evaluated literally: for order-two `X`, `X⁻¹ = -X`.
pub fn conjugation_step<S: Scalar>(mats: &[Mat2<S>; 3], m: Move, a: &S) -> [Mat2<S>; 3] {
    let [e, f, g] = mats;
    let s = Mat2::translation(a);
    match m {
        Move::Lambda => [e.conj(f), e.clone(), g.clone()],
        Move::Rho => [f.conj(g), f.clone(), s.conj(e)],
        Move::Nu => [f.conj(e), g.clone(), s.conj(f)],
    }
}

/// Bounds on enumeration. A node is emitted iff its depth and `z` are within
/// bounds; at most `max_nodes` nodes are emitted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Budget {
    pub max_depth: Option<usize>,
    pub max_z: Option<Rational>,
    pub max_nodes: Option<usize>,
}

impl Budget {
    pub fn depth(d: usize) -> Self {
        Budget { max_depth: Some(d), ..Budget::default() }
    }

    pub fn max_z(z: i64) -> Self {
        Budget { max_z: Some(Rational::from(z)), ..Budget::default() }
    }

    pub fn nodes(n: usize) -> Self {
        Budget { max_nodes: Some(n), ..Budget::default() }
    }

    /// Sets `max_z` from a decimal or `p/q` string.
    pub fn with_max_z(mut self, z: &str) -> Result<Self> {
        self.max_z = Some(crate::scalar::Exact::parse(z)?.0);
        Ok(self)
    }

    pub fn check(&self) -> Result<()> {
        if self.max_nodes == Some(0) {
            return Err(Error::BudgetZero);
        }
        if self.max_depth.is_none() && self.max_z.is_none() && self.max_nodes.is_none() {
            return Err(Error::UnboundedBudget);
        }
        Ok(())
    }
}

struct Entry<S>(TreeNode<S>);

impl<S: Scalar> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Entry<S> {}

impl<S: Scalar> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Entry<S> {
    // reversed: BinaryHeap pops the maximum
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.z().total_cmp(self.0.z()).then_with(|| other.0.path.cmp(&self.0.path))
    }
}

/// Nodes waiting to be emitted, popped in ascending `(z, path)`.
///
/// Children have strictly larger `z` than their parent, so popping and pushing
/// children yields the global order.
pub struct Frontier<S: Scalar> {
    heap: BinaryHeap<Entry<S>>,
}

impl<S: Scalar> Default for Frontier<S> {
    fn default() -> Self {
        Frontier { heap: BinaryHeap::new() }
    }
}

impl<S: Scalar> Frontier<S> {
    pub fn push(&mut self, n: TreeNode<S>) {
        self.heap.push(Entry(n));
    }

    pub fn pop(&mut self) -> Option<TreeNode<S>> {
        self.heap.pop().map(|e| e.0)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

/// Lazy stream of [`enumerate_tree`].
pub struct TreeIter<S: Scalar> {
    params: FrickeParams<S>,
    frontier: Frontier<S>,
    max_depth: Option<usize>,
    max_z: Option<S>,
    remaining: Option<usize>,
}

impl<S: Scalar> TreeIter<S> {
    fn admits(&self, n: &TreeNode<S>) -> bool {
        self.max_depth.is_none_or(|d| n.depth <= d) && self.max_z.as_ref().is_none_or(|z| n.z() <= z)
    }
}

impl<S: Scalar> Iterator for TreeIter<S> {
    type Item = TreeNode<S>;

    fn next(&mut self) -> Option<TreeNode<S>> {
        if self.remaining == Some(0) {
            return None;
        }
        let n = self.frontier.pop()?;
        if let Some(r) = self.remaining.as_mut() {
            *r -= 1;
        }
        if n.path == MovePath::root(RootTag::Minimal) {
            let nu = step(&n, Move::Nu, &self.params);
            if self.admits(&nu) {
                self.frontier.push(nu);
            }
        }
        for c in n.children(&self.params) {
            if self.admits(&c) {
                self.frontier.push(c);
            }
        }
        Some(n)
    }
}

/// Both roots and their λ/ρ descendants within budget, in ascending `z` with
/// ties broken by path. Equal triples at different paths are distinct nodes.
pub fn enumerate_tree<S: Scalar>(params: &FrickeParams<S>, budget: &Budget) -> Result<TreeIter<S>> {
    budget.check()?;
    let mut it = TreeIter {
        params: params.clone(),
        frontier: Frontier::default(),
        max_depth: budget.max_depth,
        max_z: budget.max_z.as_ref().map(|z| params.a.from_rational(z)),
        remaining: budget.max_nodes,
    };
    let root = TreeNode::root(params);
    if it.admits(&root) {
        it.frontier.push(root);
    }
    Ok(it)
}

/// Follows a path from its root.
pub fn node_at<S: Scalar>(params: &FrickeParams<S>, path: &MovePath) -> TreeNode<S> {
    let start = match path.root {
        RootTag::Minimal => TreeNode::root(params),
        RootTag::NuRoot => TreeNode::nu_root(params),
    };
    path.steps().iter().fold(start, |n, &m| step(&n, m, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fricke::validate_params;
    use crate::moebius::generator_matrices;
    use crate::scalar::Exact;

    fn q(n: i64, d: i64) -> Exact {
        Exact::from_ratio(n, d)
    }

    fn m(a: i64, b: i64, c: i64, d: i64) -> Mat2<Exact> {
        Mat2::new(q(a, 1), q(b, 1), q(c, 1), q(d, 1))
    }

    fn skewed() -> FrickeParams<Exact> {
        validate_params(q(5, 2), q(41, 12), q(89, 24)).unwrap()
    }

    #[test]
    fn root_matches_generators() {
        for p in [FrickeParams::modular(), skewed()] {
            assert_eq!(TreeNode::root(&p).matrices(), generator_matrices(&p));
        }
    }

    #[test]
    fn modular_nu_root() {
        let p = FrickeParams::modular();
        let n = TreeNode::nu_root(&p);
        assert_eq!(n.e().matrix(), m(3, -5, 2, -3));
        assert_eq!(n.triple, FrickeTriple::new(q(1, 1), q(1, 1), q(2, 1)));
        let [l, r] = TreeNode::root(&p).children(&p);
        assert_eq!(l.e().center, q(-1, 2));
        assert_eq!(r.e().center, q(1, 2));
    }

    #[test]
    fn recurrences_agree_with_conjugation() {
        for p in [FrickeParams::modular(), skewed()] {
            let s = Mat2::translation(&p.a);
            let mut nodes = vec![(TreeNode::root(&p), generator_matrices(&p))];
            let nu = conjugation_step(&nodes[0].1, Move::Nu, &p.a);
            nodes.push((TreeNode::nu_root(&p), nu));
            let mut i = 0;
            while i < nodes.len() && nodes.len() < 60 {
                let (n, mats) = nodes[i].clone();
                assert_eq!(n.matrices(), mats, "at {}", n.path);
                let [e, f, g] = &mats;
                assert_eq!(&(g * f) * e, s);
                for mv in [Move::Lambda, Move::Rho] {
                    let c = apply_move_matrices(&n, mv, &p).unwrap();
                    nodes.push((c, conjugation_step(&mats, mv, &p.a)));
                }
                i += 1;
            }
        }
    }

    #[test]
    fn nu_only_from_the_minimal_root() {
        let p = FrickeParams::modular();
        let n = TreeNode::nu_root(&p);
        assert_eq!(apply_move_matrices(&n, Move::Nu, &p), Err(Error::NuNotAtRoot));
    }

    #[test]
    fn depth_one() {
        let p = FrickeParams::modular();
        let zs: Vec<_> = enumerate_tree(&p, &Budget::depth(1)).unwrap().map(|n| n.triple.z).collect();
        assert_eq!(zs, vec![q(1, 1), q(2, 1), q(2, 1), q(2, 1)]);
    }

    #[test]
    fn z_budget_and_order() {
        let p = FrickeParams::modular();
        let nodes: Vec<_> = enumerate_tree(&p, &Budget::max_z(30)).unwrap().collect();
        let mut counts = std::collections::BTreeMap::new();
        for n in &nodes {
            *counts.entry(n.triple.z.clone()).or_insert(0) += 1;
        }
        let expect: Vec<_> = [(1, 1), (2, 3), (5, 6), (13, 6), (29, 6)].iter().map(|&(z, c)| (q(z, 1), c)).collect();
        assert_eq!(counts.into_iter().collect::<Vec<_>>(), expect);
        let paths: Vec<_> = nodes[..4].iter().map(|n| n.path.to_string()).collect();
        assert_eq!(paths, ["m", "mL", "mR", "n"]);
        for w in nodes.windows(2) {
            assert!((&w[0].triple.z, &w[0].path) < (&w[1].triple.z, &w[1].path));
        }
    }

    #[test]
    fn budgets() {
        let p = FrickeParams::modular();
        assert!(matches!(enumerate_tree(&p, &Budget::nodes(0)), Err(Error::BudgetZero)));
        assert!(matches!(enumerate_tree(&p, &Budget::default()), Err(Error::UnboundedBudget)));
        assert_eq!(enumerate_tree(&p, &Budget::nodes(7)).unwrap().count(), 7);
    }

    #[test]
    fn node_at_follows_paths() {
        let p = skewed();
        for n in enumerate_tree(&p, &Budget::depth(4)).unwrap() {
            assert_eq!(node_at(&p, &n.path), n);
        }
    }
}
