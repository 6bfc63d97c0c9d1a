//! Excision intervals on the horocycle `Y = a/2` and the McShane sum.
//!
//! Each node contributes the interval `(c + r_a(z), c + a - r_a(z))`, where `c`
//! is the centre of its `E` and `z = |gamma_E|`. Two more intervals come from
//! `T1` and from `T2` translated by `-a`. The widths over `2a` are the terms
//! `1/(1 + e^l)` of the identity, and they sum to `1/2`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fricke::{FrickeParams, FrickeTriple, MovePath};
use crate::scalar::{cmp_with_sqrts, Real, Scalar};
use crate::tree::{enumerate_tree, Budget, Frontier, HalfTurn, TreeNode};

fn check_domain<S: Scalar>(z: &S, a: &S) -> Result<()> {
    if (a.clone() * z).total_cmp(&a.int(2)) != Ordering::Greater {
        return Err(Error::DomainError(format!("need z > 2/a, got z = {z}")));
    }
    Ok(())
}

/// `a²/4 - 1/z²`, exactly in the scalar type.
pub fn r_a_squared<S: Scalar>(z: &S, a: &S) -> S {
    a.square() / &a.int(4) - &(a.int(1) / &z.square())
}

/// `√(a²/4 - 1/z²)`.
pub fn r_a<S: Scalar>(z: &S, a: &S, prec: u32) -> Result<Real> {
    check_domain(z, a)?;
    Ok(r_a_squared(z, a).to_real(prec).sqrt())
}

/// `√(a²/4 + 1/z²)`.
#[allow(non_snake_case)]
pub fn R_a<S: Scalar>(z: &S, a: &S, prec: u32) -> Result<Real> {
    if z.sign() != Ordering::Greater {
        return Err(Error::DomainError(format!("need z > 0, got z = {z}")));
    }
    let sq = a.square() / &a.int(4) + &(a.int(1) / &z.square());
    Ok(sq.to_real(prec).sqrt())
}

/// `a - √(a² - 4/z²)`, evaluated as `(4/z²)/(a + √(a² - 4/z²))`.
pub fn width<S: Scalar>(z: &S, a: &S, prec: u32) -> Result<Real> {
    check_domain(z, a)?;
    let four_over = (a.int(4) / &z.square()).to_real(prec);
    let root = (a.square().to_real(prec) - &four_over).sqrt();
    Ok(four_over / &(a.to_real(prec) + &root))
}

/// `width / (2a)`, the term `1/(1 + e^l)`.
pub fn summand<S: Scalar>(z: &S, params: &FrickeParams<S>, prec: u32) -> Result<Real> {
    let a = params.a.to_real(prec);
    Ok(width(z, &params.a, prec)? / &(a.int(2) * &a))
}

/// `2 ln((t + √(t² - 4))/2)` with `t = a z`.
pub fn geodesic_length<S: Scalar>(z: &S, params: &FrickeParams<S>, prec: u32) -> Result<Real> {
    let t = params.a.clone() * z;
    if t.total_cmp(&t.int(2)) != Ordering::Greater {
        return Err(Error::NotHyperbolic { trace: t.to_decimal() });
    }
    let t = t.to_real(prec);
    let eps = (t.clone() + &(t.square() - &t.int(4)).sqrt()) / &t.int(2);
    Ok(t.int(2) * &eps.ln())
}

/// `1/(1 + e^l)` evaluated literally from the length.
pub fn summand_from_length(len: &Real) -> Real {
    let one = len.int(1);
    one.clone() / &(one + &len.exp())
}

/// Origin of an excision interval.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalSource {
    /// The `E` entry of a tree node.
    Node(MovePath),
    /// `T1`.
    SpecialT1,
    /// `S^-a T2 S^a`.
    SpecialT2,
}

impl std::fmt::Display for IntervalSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IntervalSource::Node(p) => write!(f, "{p}"),
            IntervalSource::SpecialT1 => f.write_str("T1"),
            IntervalSource::SpecialT2 => f.write_str("T2"),
        }
    }
}

/// The open interval `(c + r, c + a - r)` on `Y = a/2`, with `r² = a²/4 - 1/z²`
/// kept exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExcisionInterval<S> {
    pub source: IntervalSource,
    pub center: S,
    pub z: S,
    pub r_sq: S,
    pub a: S,
}

impl<S: Scalar> ExcisionInterval<S> {
    pub fn r(&self, prec: u32) -> Real {
        self.r_sq.to_real(prec).sqrt()
    }

    pub fn lo(&self, prec: u32) -> Real {
        self.center.to_real(prec) + &self.r(prec)
    }

    pub fn hi(&self, prec: u32) -> Real {
        self.center.to_real(prec) + &self.a.to_real(prec) - &self.r(prec)
    }

    pub fn width(&self, prec: u32) -> Real {
        width(&self.z, &self.a, prec).expect("constructed inside the domain")
    }

    /// Midpoint `c + a/2`.
    pub fn midpoint(&self) -> S {
        self.center.clone() + &(self.a.clone() / &self.a.int(2))
    }

    /// True if `self` ends no later than `other` starts.
    pub fn precedes(&self, other: &Self) -> bool {
        // c1 + a - r1 <= c2 + r2  <=>  c2 - c1 - a >= -r1 - r2
        let d = other.center.clone() - &self.center - &self.a;
        if S::EXACT {
            cmp_with_sqrts(&d, -1, &self.r_sq, -1, &other.r_sq) != Ordering::Less
        } else {
            let prec = self.a.precision().unwrap_or(crate::DEFAULT_PRECISION);
            let slack = slack(&self.a, prec);
            self.hi(prec) <= other.lo(prec) + &slack
        }
    }
}

fn slack<S: Scalar>(a: &S, prec: u32) -> Real {
    Real::pow2(24 - prec as i32, prec) * &a.to_real(prec)
}

/// Excision interval of an order-two element; needs `|gamma| > 2/a`.
pub fn excision_interval<S: Scalar>(
    element: &HalfTurn<S>,
    source: IntervalSource,
    params: &FrickeParams<S>,
) -> Result<ExcisionInterval<S>> {
    let z = element.inverse_height();
    check_domain(&z, &params.a)?;
    Ok(ExcisionInterval {
        source,
        center: element.center.clone(),
        r_sq: r_a_squared(&z, &params.a),
        z,
        a: params.a.clone(),
    })
}

/// The intervals of `T1` and of `T2` shifted by `-a`; inverse heights `b/a` and 1.
pub fn special_intervals<S: Scalar>(params: &FrickeParams<S>) -> [ExcisionInterval<S>; 2] {
    let root = TreeNode::root(params);
    let t2 = root.g().translated(&-params.a.clone());
    [
        excision_interval(&t2, IntervalSource::SpecialT2, params).expect("1 > 2/a"),
        excision_interval(root.f(), IntervalSource::SpecialT1, params).expect("b/a > 2/a"),
    ]
}

pub fn node_interval<S: Scalar>(n: &TreeNode<S>, params: &FrickeParams<S>) -> ExcisionInterval<S> {
    excision_interval(n.e(), IntervalSource::Node(n.path.clone()), params).expect("z >= 1 > 2/a")
}

/// The length-`a` interval `(c + r, c + r + a)` with `c = c_T2 - a`, `r = r_a(1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ambient<S> {
    pub center: S,
    pub r_sq: S,
    pub a: S,
}

impl<S: Scalar> Ambient<S> {
    pub fn new(params: &FrickeParams<S>) -> Self {
        let g = TreeNode::root(params).elements[2].clone();
        Ambient {
            center: g.center - &params.a,
            r_sq: r_a_squared(&params.a.int(1), &params.a),
            a: params.a.clone(),
        }
    }

    pub fn lo(&self, prec: u32) -> Real {
        self.center.to_real(prec) + &self.r_sq.to_real(prec).sqrt()
    }

    pub fn hi(&self, prec: u32) -> Real {
        self.lo(prec) + &self.a.to_real(prec)
    }

    pub fn contains(&self, iv: &ExcisionInterval<S>) -> bool {
        let d = iv.center.clone() - &self.center;
        if S::EXACT {
            // c + r >= c0 + r0 and c + a - r <= c0 + r0 + a
            cmp_with_sqrts(&d, 1, &self.r_sq, -1, &iv.r_sq) != Ordering::Less
                && cmp_with_sqrts(&d, 1, &self.r_sq, 1, &iv.r_sq) != Ordering::Greater
        } else {
            let prec = self.a.precision().unwrap_or(crate::DEFAULT_PRECISION);
            let s = slack(&self.a, prec);
            iv.lo(prec) + &s >= self.lo(prec) && iv.hi(prec) <= self.hi(prec) + &s
        }
    }
}

/// Neumaier's compensated sum.
#[derive(Clone, Debug)]
pub struct Compensated {
    sum: Real,
    comp: Real,
}

impl Compensated {
    pub fn new(prec: u32) -> Self {
        Compensated { sum: Real::from_int(0, prec), comp: Real::from_int(0, prec) }
    }

    pub fn add(&mut self, x: &Real) {
        let t = self.sum.clone() + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp.clone() + &(self.sum.clone() - &t + x);
        } else {
            self.comp = self.comp.clone() + &(x.clone() - &t + &self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> Real {
        self.sum.clone() + &self.comp
    }
}

/// Pruning floor for sums: `2^-(p+8)·a`.
pub fn sum_floor<S: Scalar>(params: &FrickeParams<S>, prec: u32) -> Real {
    Real::pow2(-(prec as i32) - 8, prec) * &params.a.to_real(prec)
}

/// Length of the gap a node and all its descendants are confined to.
///
/// Equals `r_a(x) + r_a(y) - z/(xy)`; the two roots of the triple equation give
/// `z/(xy) = a/2 ± s` with `s = √(a²/4 - 1/x² - 1/y²)`. Below the root the sign
/// is `+` and the difference is rewritten without cancellation:
/// `uv (1/(r_x + s) + 1/(a/2 + r_y)) / ((r_y + s)(r_x + a/2))`, `u = 1/x²`, `v = 1/y²`.
pub fn node_gap<S: Scalar>(t: &FrickeTriple<S>, a: &S, prec: u32) -> Real {
    let FrickeTriple { x, y, z } = t;
    let u = (a.int(1) / &x.square()).to_real(prec);
    let v = (a.int(1) / &y.square()).to_real(prec);
    let quarter = (a.square() / &a.int(4)).to_real(prec);
    let half = (a.clone() / &a.int(2)).to_real(prec);
    let rx = (quarter.clone() - &u).sqrt();
    let ry = (quarter.clone() - &v).sqrt();
    let s_sq = quarter - &u - &v;
    let s = if s_sq.sign() == Ordering::Less { s_sq.int(0) } else { s_sq.sqrt() };
    let upper_root = (a.int(2) * z).total_cmp(&(a.clone() * x * y)) == Ordering::Greater;
    if upper_root {
        let k = (rx.int(1) / &(rx.clone() + &s) + &(rx.int(1) / &(half.clone() + &ry)))
            / &((ry.clone() + &s) * &(rx.clone() + &half));
        u * &v * &k
    } else {
        rx + &ry - &half + &s
    }
}

/// Statistics of a pruned walk.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PruneStats {
    pub visited: usize,
    pub pruned_nodes: usize,
    /// Sum of the node gaps of the pruned subtrees.
    pub pruned_length: Real,
    pub max_depth: usize,
}

/// How a walk met a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Visit {
    /// In budget and not pruned; its interval is excised.
    Included,
    /// Node gap below the floor; the subtree is skipped.
    Pruned,
    /// Child of an included node, outside the budget.
    Frontier,
}

/// Best-first walk that skips every subtree whose node gap is below `floor`.
///
/// Budget semantics are those of [`enumerate_tree`]. Included nodes are
/// reported in ascending `(z, path)`; every pruned or frontier node is reported
/// once, with its node gap, so the gaps of non-included nodes tile the
/// complement of the included intervals.
pub fn walk_pruned<S: Scalar>(
    params: &FrickeParams<S>,
    budget: &Budget,
    floor: &Real,
    prec: u32,
    mut visit: impl FnMut(&TreeNode<S>, Visit, &Real),
) -> Result<PruneStats> {
    budget.check()?;
    let max_z = budget.max_z.as_ref().map(|z| params.a.from_rational(z));
    let mut stats = PruneStats { visited: 0, pruned_nodes: 0, pruned_length: Real::from_int(0, prec), max_depth: 0 };
    let mut frontier = Frontier::default();
    let mut pending = vec![TreeNode::root(params)];
    loop {
        for n in pending.drain(..) {
            let in_budget =
                budget.max_depth.is_none_or(|d| n.depth <= d) && max_z.as_ref().is_none_or(|z| n.z() <= z);
            let gap = node_gap(&n.triple, &params.a, prec);
            if !in_budget {
                visit(&n, Visit::Frontier, &gap);
            } else if gap < *floor {
                stats.pruned_nodes += 1;
                stats.pruned_length = stats.pruned_length.clone() + &gap;
                visit(&n, Visit::Pruned, &gap);
            } else {
                frontier.push(n);
            }
        }
        let Some(n) = frontier.pop() else { break };
        if budget.max_nodes.is_some_and(|m| stats.visited >= m) {
            for rest in std::iter::once(n).chain(std::iter::from_fn(|| frontier.pop())) {
                visit(&rest, Visit::Frontier, &node_gap(&rest.triple, &params.a, prec));
            }
            break;
        }
        stats.visited += 1;
        stats.max_depth = stats.max_depth.max(n.depth);
        if n.depth == 0 {
            pending.push(TreeNode::nu_root(params));
        }
        pending.extend(n.children(params));
        let gap = node_gap(&n.triple, &params.a, prec);
        visit(&n, Visit::Included, &gap);
    }
    Ok(stats)
}

/// Left end `c_G - r_a(x)` of the node gap: the right end of the interval of `S^-a G S^a`.
pub fn node_gap_start<S: Scalar>(n: &TreeNode<S>, params: &FrickeParams<S>, prec: u32) -> Real {
    n.g().center.to_real(prec) - &r_a_squared(&n.triple.x, &params.a).to_real(prec).sqrt()
}

/// Evidence that the partial sums never decreased and stayed below `1/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Monotonicity {
    pub terms: usize,
    pub all_terms_positive: bool,
    pub non_decreasing: bool,
    pub max_normalized: Real,
    /// `max_normalized <= 1/2 + 2^-100`.
    pub below_half: bool,
}

/// Result of [`mcshane_sum`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumReport {
    /// Total excised length.
    pub partial_sum: Real,
    /// `partial_sum / (2a)`.
    pub normalized: Real,
    /// `1/2 - normalized`.
    pub deficiency: Real,
    pub node_count: usize,
    pub max_z: String,
    pub max_depth: usize,
    pub pruned_nodes: usize,
    /// Upper bound on the normalized contribution of pruned subtrees.
    pub pruned_bound: Real,
    pub precision: u32,
    pub monotonicity: Monotonicity,
}

/// Sums `width/(2a)` over the two specials and every node in budget, in
/// ascending `z`, with compensated accumulation.
pub fn mcshane_sum<S: Scalar>(params: &FrickeParams<S>, budget: &Budget, prec: u32) -> Result<SumReport> {
    let two_a = (params.a.int(2) * &params.a).to_real(prec);
    let mut acc = Compensated::new(prec);
    let mut mono = Monotonicity {
        terms: 0,
        all_terms_positive: true,
        non_decreasing: true,
        max_normalized: Real::from_int(0, prec),
        below_half: true,
    };
    let mut last = Real::from_int(0, prec);
    let mut add = |w: Real, acc: &mut Compensated, mono: &mut Monotonicity| {
        let term = w / &two_a;
        mono.terms += 1;
        mono.all_terms_positive &= term.sign() == Ordering::Greater;
        acc.add(&term);
        let now = acc.value();
        mono.non_decreasing &= now >= last;
        last = now.clone();
        mono.max_normalized = mono.max_normalized.clone().max_of(now);
    };
    for iv in special_intervals(params) {
        add(iv.width(prec), &mut acc, &mut mono);
    }
    let mut max_z = params.a.int(0);
    let stats = walk_pruned(params, budget, &sum_floor(params, prec), prec, |n, how, _| {
        if how != Visit::Included {
            return;
        }
        add(width(n.z(), &params.a, prec).expect("z >= 1"), &mut acc, &mut mono);
        if *n.z() > max_z {
            max_z = n.z().clone();
        }
    })?;
    let normalized = acc.value();
    let half = Real::from_int(1, prec) / &Real::from_int(2, prec);
    mono.below_half = mono.max_normalized <= half.clone() + &Real::pow2(-100, prec);
    Ok(SumReport {
        partial_sum: normalized.clone() * &two_a,
        deficiency: half - &normalized,
        normalized,
        node_count: stats.visited,
        max_z: max_z.to_decimal(),
        max_depth: stats.max_depth,
        pruned_nodes: stats.pruned_nodes,
        pruned_bound: stats.pruned_length / &two_a,
        precision: prec,
        monotonicity: mono,
    })
}

/// All intervals at a budget, sorted by position, with the ambient interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Layout<S> {
    pub ambient: Ambient<S>,
    pub intervals: Vec<ExcisionInterval<S>>,
}

impl<S: Scalar> Layout<S> {
    pub fn total_excised(&self, prec: u32) -> Real {
        let mut acc = Compensated::new(prec);
        for iv in &self.intervals {
            acc.add(&iv.width(prec));
        }
        acc.value()
    }

    /// Checks that consecutive intervals (by midpoint) are disjoint and that
    /// all lie in the ambient interval; pairwise disjointness follows.
    pub fn check(&self) -> Result<()> {
        for w in self.intervals.windows(2) {
            if !w[0].precedes(&w[1]) {
                return Err(Error::OverlapDetected(format!("{} and {}", w[0].source, w[1].source)));
            }
        }
        if let Some(iv) = self.intervals.iter().find(|iv| !self.ambient.contains(iv)) {
            return Err(Error::OverlapDetected(format!("{} leaves the ambient interval", iv.source)));
        }
        Ok(())
    }
}

pub fn layout_from<S: Scalar>(params: &FrickeParams<S>, nodes: impl IntoIterator<Item = TreeNode<S>>) -> Layout<S> {
    let mut intervals: Vec<_> = special_intervals(params).into_iter().collect();
    intervals.extend(nodes.into_iter().map(|n| node_interval(&n, params)));
    intervals.sort_by(|l, r| l.center.total_cmp(&r.center).then_with(|| l.source.cmp(&r.source)));
    Layout { ambient: Ambient::new(params), intervals }
}

/// Excision intervals of the specials and of every node in budget; fails with
/// `OverlapDetected` if the layout is not disjoint and contained.
pub fn interval_layout<S: Scalar>(params: &FrickeParams<S>, budget: &Budget) -> Result<Layout<S>> {
    let layout = layout_from(params, enumerate_tree(params, budget)?);
    layout.check()?;
    Ok(layout)
}

/// One line of the length spectrum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumLine<S> {
    pub z: S,
    pub length: Real,
    pub multiplicity: usize,
}

/// Lengths of the geodesics of the specials and nodes in budget, grouped by `z`.
pub fn length_spectrum<S: Scalar>(params: &FrickeParams<S>, budget: &Budget, prec: u32) -> Result<Vec<SpectrumLine<S>>> {
    let mut zs: Vec<S> = special_intervals(params).into_iter().map(|iv| iv.z).collect();
    zs.extend(enumerate_tree(params, budget)?.map(|n| n.triple.z));
    zs.sort_by(|l, r| l.total_cmp(r));
    let mut out: Vec<SpectrumLine<S>> = Vec::new();
    for z in zs {
        match out.last_mut() {
            Some(line) if line.z.near(&z, &z, 8) => line.multiplicity += 1,
            _ => out.push(SpectrumLine { length: geodesic_length(&z, params, prec)?, z, multiplicity: 1 }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use crate::DEFAULT_PRECISION as P;

    fn q(n: i64, d: i64) -> Exact {
        Exact::from_ratio(n, d)
    }

    fn real(s: &str) -> Real {
        Real::parse(s, P).unwrap()
    }

    fn close(x: &Real, y: f64, tol: f64) -> bool {
        (x.to_f64() - y).abs() < tol
    }

    #[test]
    fn radii() {
        let three = q(3, 1);
        let r = r_a(&q(1, 1), &three, P).unwrap();
        assert!((r.clone() * &r).rel_diff(&real("1.25")).to_f64() < 1e-70);
        assert!(close(&R_a(&q(1, 1), &three, P).unwrap(), 13f64.sqrt() / 2.0, 1e-15));
        assert!(matches!(r_a(&q(2, 3), &three, P), Err(Error::DomainError(_))));
    }

    #[test]
    fn widths() {
        let three = q(3, 1);
        assert!(close(&width(&q(1, 1), &three, P).unwrap(), 0.763_932_0, 1e-7));
        assert!(close(&width(&q(2, 1), &three, P).unwrap(), 0.171_572_9, 1e-7));
        let z = Real::from_int(1_000_000_000, P);
        let w = width(&z, &Real::from_int(3, P), P).unwrap();
        let expect = real("4e-18") / &Real::from_int(6, P);
        // the exact value is below 4/(6 z²) by a relative 1/(9 z²)·... ≈ 1e-19
        assert!(w.rel_diff(&expect).to_f64() < 1e-18);
        let naive = Real::from_int(3, 53) - &(Real::from_int(9, 53) - &real("4e-18").with_prec(53)).sqrt();
        assert!(naive.is_zero());
    }

    #[test]
    fn lengths_and_summands() {
        let p = FrickeParams::modular();
        let l1 = geodesic_length(&q(1, 1), &p, P).unwrap();
        assert!(close(&l1, 1.924_847_3, 1e-7));
        assert!(close(&geodesic_length(&q(2, 1), &p, P).unwrap(), 3.525_494_3, 1e-7));
        assert!(matches!(geodesic_length(&q(2, 3), &p, P), Err(Error::NotHyperbolic { .. })));
        let s1 = summand(&q(1, 1), &p, P).unwrap();
        assert!(close(&s1, 0.127_322_0, 1e-7));
        assert!(s1.rel_diff(&summand_from_length(&l1)).to_f64() < 1e-70);
        assert!(close(&summand(&q(2, 1), &p, P).unwrap(), 0.028_595_5, 1e-7));
    }

    #[test]
    fn modular_intervals() {
        let p = FrickeParams::modular();
        let root = TreeNode::root(&p);
        let iv = node_interval(&root, &p);
        assert!(close(&iv.lo(P), 1.118_03, 1e-5) && close(&iv.hi(P), 1.881_97, 1e-5));
        let t1 = excision_interval(root.f(), IntervalSource::SpecialT1, &p).unwrap();
        assert!(close(&t1.lo(P), 1.0 + 1.25f64.sqrt(), 1e-12) && close(&t1.hi(P), 4.0 - 1.25f64.sqrt(), 1e-12));
        assert!(iv.width(P).rel_diff(&(iv.hi(P) - &iv.lo(P))).to_f64() < 1e-70);
        let amb = Ambient::new(&p);
        assert!(close(&amb.lo(P), 0.118_03, 1e-5));
        assert!(amb.contains(&iv));
        let high = HalfTurn { center: q(0, 1), gamma: q(1, 2) };
        assert!(matches!(excision_interval(&high, IntervalSource::SpecialT1, &p), Err(Error::DomainError(_))));
    }

    #[test]
    fn node_gaps() {
        let a = q(3, 1);
        let d = node_gap(&FrickeTriple::new(q(1, 1), q(1, 1), q(2, 1)), &a, P);
        assert!(d.rel_diff(&(Real::from_int(5, P).sqrt() - &Real::from_int(2, P))).to_f64() < 1e-70);
        let d = node_gap(&FrickeTriple::new(q(1, 1), q(1, 1), q(1, 1)), &a, P);
        assert!(d.rel_diff(&(Real::from_int(5, P).sqrt() - &Real::from_int(1, P))).to_f64() < 1e-70);
    }

    #[test]
    fn small_sums() {
        let p = FrickeParams::modular();
        let r = mcshane_sum(&p, &Budget::depth(0), P).unwrap();
        assert!(close(&r.normalized, 0.381_966_0, 1e-7));
        let r = mcshane_sum(&p, &Budget::depth(1), P).unwrap();
        assert!(close(&r.normalized, 0.467_76, 1e-5));
        assert_eq!(r.node_count, 4);
        assert!(r.monotonicity.non_decreasing && r.monotonicity.below_half);
        assert_eq!(mcshane_sum(&p, &Budget::nodes(0), P), Err(Error::BudgetZero));
    }

    #[test]
    fn layout_is_disjoint_at_small_depth() {
        let p = FrickeParams::modular();
        let l = interval_layout(&p, &Budget::depth(6)).unwrap();
        assert_eq!(l.intervals.len(), 2 + 127 + 63);
        let r = mcshane_sum(&p, &Budget::depth(6), P).unwrap();
        assert!(l.total_excised(P).rel_diff(&r.partial_sum).to_f64() < 1e-70);
    }

    #[test]
    fn overlap_is_detected() {
        let p = FrickeParams::modular();
        let mut l = interval_layout(&p, &Budget::depth(2)).unwrap();
        l.intervals[3].center = l.intervals[4].center.clone();
        assert!(matches!(l.check(), Err(Error::OverlapDetected(_))));
    }

    #[test]
    fn spectrum() {
        let p = FrickeParams::modular();
        let s = length_spectrum(&p, &Budget::max_z(5), P).unwrap();
        let got: Vec<_> = s.iter().map(|l| (l.z.clone(), l.multiplicity)).collect();
        assert_eq!(got, vec![(q(1, 1), 3), (q(2, 1), 3), (q(5, 1), 6)]);
        assert!(s.windows(2).all(|w| w[0].length < w[1].length));
    }
}
