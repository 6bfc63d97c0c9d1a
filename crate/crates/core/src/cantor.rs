//! The Cantor set left in the ambient interval once the excision intervals are
//! removed: gap sets, box counting, branch ratios and the growth bound along
//! branches.

use std::cmp::Ordering;

use rand::Rng;
use rug::{Float, Integer};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fricke::{apply_move, minimal_triple, FrickeParams, FrickeTriple, Move, MovePath, RootTag};
use crate::identity::{node_gap, node_gap_start, special_intervals, walk_pruned, width, Ambient, PruneStats, Visit};
use crate::scalar::{Real, Scalar};
use crate::tree::Budget;

/// Pruning floor for gap sets: `2^-(p-32)·a`.
pub fn gap_floor<S: Scalar>(params: &FrickeParams<S>, prec: u32) -> Real {
    Real::pow2(32 - prec as i32, prec) * &params.a.to_real(prec)
}

/// Closed remnants of the ambient interval, sorted and disjoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapSet {
    pub depth: usize,
    pub lo: Real,
    pub hi: Real,
    /// `(left end, length)`.
    pub gaps: Vec<(Real, Real)>,
    /// Total length of the excised intervals.
    pub excised: Real,
    pub pruned: Option<PruneStats>,
}

impl GapSet {
    pub fn total(&self) -> Real {
        self.gaps.iter().fold(self.lo.int(0), |acc, (_, len)| acc + len)
    }

    pub fn largest(&self) -> Option<Real> {
        self.gaps.iter().map(|(_, len)| len.clone()).reduce(Real::max_of)
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }
}

struct Remnant {
    depth: usize,
    pruned: bool,
    start: Real,
    len: Real,
}

// Every node that is met but not included, with all included widths by depth.
struct Walk {
    remnants: Vec<Remnant>,
    widths: Vec<(usize, Real)>,
    stats: PruneStats,
    lo: Real,
    hi: Real,
}

fn walk_for_gaps<S: Scalar>(params: &FrickeParams<S>, depth: usize, prec: u32) -> Result<Walk> {
    let mut remnants = Vec::new();
    let mut widths: Vec<(usize, Real)> = special_intervals(params).iter().map(|iv| (0, iv.width(prec))).collect();
    let stats = walk_pruned(params, &Budget::depth(depth), &gap_floor(params, prec), prec, |n, how, gap| {
        if how == Visit::Included {
            widths.push((n.depth, width(n.z(), &params.a, prec).expect("z >= 1")));
        }
        if how == Visit::Pruned || n.depth >= 1 {
            remnants.push(Remnant {
                depth: n.depth,
                pruned: how == Visit::Pruned,
                start: node_gap_start(n, params, prec),
                len: gap.clone(),
            });
        }
    })?;
    remnants.sort_by(|l, r| l.start.total_cmp(&r.start));
    let amb = Ambient::new(params);
    Ok(Walk { remnants, widths, stats, lo: amb.lo(prec), hi: amb.hi(prec) })
}

impl Walk {
    // Nodes of depth d + 1 are the children of the deepest included layer; a
    // pruned node keeps its whole gap.
    fn gaps_at(&self, depth: usize, prec: u32) -> GapSet {
        let gaps = self
            .remnants
            .iter()
            .filter(|r| r.depth == depth + 1 || (r.pruned && r.depth <= depth + 1))
            .map(|r| (r.start.clone(), r.len.clone()))
            .collect();
        let excised = self.widths.iter().filter(|w| w.0 <= depth).fold(Real::from_int(0, prec), |a, w| a + &w.1);
        GapSet { depth, lo: self.lo.clone(), hi: self.hi.clone(), gaps, excised, pruned: Some(self.stats.clone()) }
    }
}

/// Ambient interval minus the specials and every node of depth `<= depth`.
///
/// The remnants are the node gaps of the nodes one level deeper, so their
/// lengths come from [`node_gap`] rather than from differences of endpoints.
/// Subtrees whose node gap is below [`gap_floor`] are left whole.
pub fn build_gaps<S: Scalar>(params: &FrickeParams<S>, depth: usize, prec: u32) -> Result<GapSet> {
    Ok(walk_for_gaps(params, depth, prec)?.gaps_at(depth, prec))
}

/// Gap sets at several depths from a single walk.
pub fn build_gap_series<S: Scalar>(params: &FrickeParams<S>, depths: &[usize], prec: u32) -> Result<Vec<GapSet>> {
    let Some(&deepest) = depths.iter().max() else {
        return Ok(Vec::new());
    };
    let walk = walk_for_gaps(params, deepest, prec)?;
    Ok(depths.iter().map(|&d| walk.gaps_at(d, prec)).collect())
}

fn ser_integer<Ser: Serializer>(v: &Integer, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
    s.collect_str(v)
}

/// One scale of a box count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxRow {
    pub scale: Real,
    #[serde(serialize_with = "ser_integer")]
    pub count: Integer,
    /// `ln N / ln(length/scale)`: the slope from the single box covering the ambient interval.
    pub estimate: Real,
    /// Slope between this scale and the previous one; `None` for the first.
    pub secant: Option<Real>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxDimension {
    pub rows: Vec<BoxRow>,
    /// Least-squares slope of `ln N` against `ln(1/scale)` over rows with `N > 0`.
    pub fit_slope: Real,
}

// Index of the grid cell containing v, with v within tol of an integer snapped onto it.
fn snapped(v: &Real, tol: &Real, upper: bool) -> Integer {
    let half = v.int(1) / &v.int(2);
    let nearest = (v.clone() + &half).floor_integer();
    let near = Real(Float::with_val(v.prec(), &nearest));
    if (v.clone() - &near).abs() <= *tol {
        if upper {
            nearest - 1u32
        } else {
            nearest
        }
    } else {
        v.floor_integer()
    }
}

/// Number of cells `[lo + k ε, lo + (k+1) ε)` meeting the gaps in positive length.
pub fn box_count(g: &GapSet, scale: &Real) -> Integer {
    let prec = scale.prec();
    let mut count = Integer::new();
    let mut last: Option<Integer> = None;
    for (l, len) in &g.gaps {
        let s = (l.clone() - &g.lo) / scale;
        let e = s.clone() + &(len.clone() / scale);
        let tol = Real::pow2(40 - prec as i32, prec) * &(e.abs() + &e.int(1));
        let mut k0 = snapped(&s, &tol, false);
        let k1 = snapped(&e, &tol, true);
        if let Some(prev) = &last {
            if k0 <= *prev {
                k0 = prev.clone() + 1u32;
            }
        }
        if k1 >= k0 {
            count += k1.clone() - &k0 + 1u32;
            last = Some(k1);
        }
    }
    count
}

fn ln_integer(n: &Integer, prec: u32) -> Real {
    Real(Float::with_val(prec, n)).ln()
}

/// Box counts at the given scales with the derived slope estimates.
pub fn box_dimension_estimate(g: &GapSet, scales: &[Real]) -> Result<BoxDimension> {
    if scales.len() < 2 || scales.iter().any(|s| s.sign() != Ordering::Greater) || scales.iter().all(|s| *s == scales[0]) {
        return Err(Error::DegenerateScales);
    }
    let prec = scales.iter().map(Real::prec).max().unwrap_or(crate::DEFAULT_PRECISION);
    let length = g.hi.clone() - &g.lo;
    let mut rows: Vec<BoxRow> = Vec::with_capacity(scales.len());
    let mut points = Vec::new();
    for scale in scales {
        let count = box_count(g, scale);
        let inv_log = (length.clone() / scale).ln();
        let positive = count > 0;
        let ln_n = if positive { ln_integer(&count, prec) } else { Real::from_int(0, prec) };
        let estimate = if positive && inv_log.sign() == Ordering::Greater {
            ln_n.clone() / &inv_log
        } else {
            Real::from_int(0, prec)
        };
        let x = -scale.ln();
        let secant = rows.last().map(|prev| {
            if positive && prev.count > 0 {
                let px = -prev.scale.ln();
                (ln_n.clone() - &ln_integer(&prev.count, prec)) / &(x.clone() - &px)
            } else {
                Real::from_int(0, prec)
            }
        });
        if positive {
            points.push((x, ln_n));
        }
        rows.push(BoxRow { scale: scale.clone(), count, estimate, secant });
    }
    Ok(BoxDimension { rows, fit_slope: least_squares_slope(&points, prec) })
}

fn least_squares_slope(points: &[(Real, Real)], prec: u32) -> Real {
    let zero = Real::from_int(0, prec);
    if points.len() < 2 {
        return zero;
    }
    let n = Real::from_int(points.len() as i64, prec);
    let mx = points.iter().fold(zero.clone(), |a, p| a + &p.0) / &n;
    let my = points.iter().fold(zero.clone(), |a, p| a + &p.1) / &n;
    let (mut sxy, mut sxx) = (zero.clone(), zero.clone());
    for (x, y) in points {
        let dx = x.clone() - &mx;
        sxy = sxy + &(dx.clone() * &(y.clone() - &my));
        sxx = sxx + &dx.square();
    }
    if sxx.is_zero() {
        zero
    } else {
        sxy / &sxx
    }
}

/// The level-`n` stage of removing a centred fraction `k` from `[0, 1]`:
/// `2^n` intervals of length `((1-k)/2)^n`, stored as a gap set.
pub fn centered_removal(level: u32, k: &Real) -> GapSet {
    let prec = k.prec();
    let one = Real::from_int(1, prec);
    let mut segs = vec![(Real::from_int(0, prec), one.clone())];
    let keep = (one.clone() - k) / &one.int(2);
    for _ in 0..level {
        segs = segs
            .into_iter()
            .flat_map(|(start, len)| {
                let part = len.clone() * &keep;
                let right = start.clone() + &len - &part;
                [(start, part.clone()), (right, part)]
            })
            .collect();
    }
    let lo = Real::from_int(0, prec);
    let excised = one.clone() - &segs.iter().fold(lo.clone(), |a, (_, len)| a + len);
    GapSet { depth: level as usize, lo, hi: one, gaps: segs, excised, pruned: None }
}

/// One depth of the dimension scan: the gap set measured at its own largest gap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthDimension {
    pub depth: usize,
    pub gap_count: usize,
    pub gap_total: Real,
    pub box_scale: Real,
    #[serde(serialize_with = "ser_integer")]
    pub box_count: Integer,
    /// `ln N / ln(a/ε)`.
    pub estimate: Real,
}

/// Box-counting estimates at each depth, at scale `ε_d` = the largest gap at depth `d`.
pub fn dimension_series<S: Scalar>(params: &FrickeParams<S>, depths: &[usize], prec: u32) -> Result<Vec<DepthDimension>> {
    let sets = build_gap_series(params, depths, prec)?;
    let length = params.a.to_real(prec);
    Ok(sets
        .into_iter()
        .map(|g| {
            let gap_total = g.total();
            let Some(eps) = g.largest() else {
                return DepthDimension {
                    depth: g.depth,
                    gap_count: 0,
                    gap_total,
                    box_scale: Real::from_int(0, prec),
                    box_count: Integer::new(),
                    estimate: Real::from_int(0, prec),
                };
            };
            let count = box_count(&g, &eps);
            let estimate = ln_integer(&count, prec) / &(length.clone() / &eps).ln();
            DepthDimension { depth: g.depth, gap_count: g.len(), gap_total, box_scale: eps, box_count: count, estimate }
        })
        .collect())
}

/// Excised-to-ambient ratio `(a - 2 r_a(z)) / D` of a node with node gap `D`.
///
/// Below the root `D = uv·K` (see [`node_gap`]) and the ratio is evaluated as
/// `(4/q²) / ((a + √(a² - 4/z²))·K)` with `q = z/(xy)`, which stays of order one
/// however large the entries are.
pub fn branch_ratio<S: Scalar>(t: &FrickeTriple<S>, params: &FrickeParams<S>, prec: u32) -> Result<Real> {
    let a = &params.a;
    let FrickeTriple { x, y, z } = t;
    let two = a.int(2);
    if (a.clone() * x).total_cmp(&two) != Ordering::Greater || (a.clone() * y).total_cmp(&two) != Ordering::Greater {
        return Err(Error::DomainError("x and y must exceed 2/a".into()));
    }
    let upper_root = (two * z).total_cmp(&(a.clone() * x * y)) == Ordering::Greater;
    if !upper_root {
        return Ok(width(z, a, prec)? / &node_gap(t, a, prec));
    }
    let ar = a.to_real(prec);
    let u = (a.int(1) / &x.square()).to_real(prec);
    let v = (a.int(1) / &y.square()).to_real(prec);
    let quarter = ar.square() / &ar.int(4);
    let half = ar.clone() / &ar.int(2);
    let rx = (quarter.clone() - &u).sqrt();
    let ry = (quarter.clone() - &v).sqrt();
    let s = (quarter - &u - &v).sqrt();
    let k = (ar.int(1) / &(rx.clone() + &s) + &(ar.int(1) / &(half.clone() + &ry))) / &((ry + &s) * &(rx + &half));
    let q = (z.clone() / &(x.clone() * y)).to_real(prec);
    let w_root = (ar.square() - &(a.int(4) / &z.square()).to_real(prec)).sqrt();
    let ratio = (ar.int(4) / &q.square()) / &((ar + &w_root) * &k);
    if !ratio.is_finite() || ratio.sign() != Ordering::Greater {
        return Err(Error::DomainError(format!("ratio {ratio} outside (0, 1]")));
    }
    Ok(ratio)
}

/// `2√(a² - 4/x²) / (a + √(a² - 4/x²))`, the limit along a branch that
/// eventually repeats one move with smaller entry `x`.
pub fn limit_ratio_constant_branch<S: Scalar>(x: &S, params: &FrickeParams<S>, prec: u32) -> Result<Real> {
    let a = &params.a;
    if (a.clone() * x).total_cmp(&a.int(2)) != Ordering::Greater {
        return Err(Error::DomainError(format!("need x > 2/a, got {x}")));
    }
    let root = (a.square() - &(a.int(4) / &x.square())).to_real(prec).sqrt();
    Ok(root.int(2) * &root / &(a.to_real(prec) + &root))
}

/// A branch: a starting node followed by a repeated block of moves.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchSpec {
    pub prefix: MovePath,
    pub block: Vec<Move>,
    pub iterations: usize,
}

impl BranchSpec {
    pub fn new(prefix: MovePath, block: Vec<Move>, iterations: usize) -> Result<Self> {
        if block.is_empty() || block.contains(&Move::Nu) {
            return Err(Error::Parse("block must be a nonempty word over L and R".into()));
        }
        if iterations == 0 {
            return Err(Error::DomainError("iterations must be at least 1".into()));
        }
        Ok(BranchSpec { prefix, block, iterations })
    }

    /// Parses a block such as `"LR"`.
    pub fn parse_block(s: &str) -> Result<Vec<Move>> {
        s.trim()
            .chars()
            .map(|ch| match ch {
                'L' => Ok(Move::Lambda),
                'R' => Ok(Move::Rho),
                _ => Err(Error::Parse(format!("bad block letter {ch:?}"))),
            })
            .collect()
    }

    pub fn moves(&self) -> impl Iterator<Item = Move> + '_ {
        self.block.iter().copied().cycle().take(self.block.len() * self.iterations)
    }

    /// The single repeated move, if the block uses only one.
    pub fn constant_move(&self) -> Option<Move> {
        let first = self.block[0];
        self.block.iter().all(|&m| m == first).then_some(first)
    }
}

/// Triple at a path.
pub fn triple_at<S: Scalar>(params: &FrickeParams<S>, path: &MovePath) -> FrickeTriple<S> {
    let mut t = minimal_triple(params);
    if path.root == RootTag::NuRoot {
        t = apply_move(&t, Move::Nu, params).expect("ν at the root");
    }
    for &m in path.steps() {
        t = apply_move(&t, m, params).expect("λ/ρ are total");
    }
    t
}

// Largest binary exponent of z for which 1/z² and a·x·z stay in range.
fn exponent_ceiling() -> i32 {
    rug::float::exp_max() / 2 - 64
}

/// One step of a branch scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanStep {
    pub step: usize,
    pub ratio: Real,
    /// `log2 z`.
    pub log2_z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub spec: BranchSpec,
    pub steps: Vec<ScanStep>,
    pub last: Real,
    pub predicted_limit: Real,
    pub distance: Real,
}

/// Follows a branch in `prec`-bit reals and records the branch ratio after
/// every move. The formulas are cancellation-free, so the limit on depth is the
/// exponent range; exceeding it gives `PrecisionExhausted`.
pub fn ratio_convergence_scan<S: Scalar>(spec: &BranchSpec, params: &FrickeParams<S>, prec: u32) -> Result<ScanReport> {
    let rp = params.to_real(prec);
    let mut t = triple_at(&rp, &spec.prefix);
    let mut steps = Vec::new();
    for (i, m) in spec.moves().enumerate() {
        t = apply_move(&t, m, &rp)?;
        let e = t.z.exponent().unwrap_or(i32::MAX);
        if !t.z.is_finite() || e > exponent_ceiling() {
            return Err(Error::PrecisionExhausted { steps: i });
        }
        let ratio = branch_ratio(&t, &rp, prec)?;
        steps.push(ScanStep { step: i + 1, ratio, log2_z: log2(&t.z) });
    }
    let predicted_limit = match spec.constant_move() {
        Some(Move::Lambda) => limit_ratio_constant_branch(&t.x, &rp, prec)?,
        Some(_) => limit_ratio_constant_branch(&t.y, &rp, prec)?,
        None => Real::from_int(1, prec),
    };
    let last = steps.last().expect("at least one move").ratio.clone();
    Ok(ScanReport { spec: spec.clone(), distance: (last.clone() - &predicted_limit).abs(), last, predicted_limit, steps })
}

fn log2(v: &Real) -> f64 {
    let (m, e) = v.0.to_f64_exp();
    m.log2() + f64::from(e)
}

/// Result of [`growth_bound_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub checked: usize,
    /// Smallest `log2((a l)^(N+2)) - log2 z` over checked nodes.
    pub min_margin_bits: f64,
    /// Nodes right after a move change that satisfy the sharper `z < a² l³`.
    pub sharp_checked: usize,
    pub sharp_violations: usize,
}

/// Checks `z < (a l)^(N+2)`, `l = min(x, y)`, at every node from the first
/// move change on, and the sharper `z < a² l³` right after each change.
///
/// Runs of equal moves must have length at most `n`.
pub fn growth_bound_check<S: Scalar>(
    params: &FrickeParams<S>,
    prefix: &MovePath,
    moves: &[Move],
    n: usize,
    prec: u32,
) -> Result<GrowthReport> {
    let rp = params.to_real(prec);
    let mut path = prefix.clone();
    let mut t = triple_at(&rp, prefix);
    let (mut run, mut prev) = (0usize, None::<Move>);
    let mut changed = false;
    let mut report = GrowthReport { checked: 0, min_margin_bits: f64::INFINITY, sharp_checked: 0, sharp_violations: 0 };
    let log_a = rp.a.ln();
    let ln2 = Real::from_int(2, prec).ln();
    for &m in moves {
        let change = prev.is_some_and(|p| p != m);
        run = if change || prev.is_none() { 1 } else { run + 1 };
        if run > n {
            return Err(Error::DomainError(format!("run of {run} equal moves exceeds N = {n}")));
        }
        prev = Some(m);
        t = apply_move(&t, m, &rp)?;
        path = path.child(m);
        changed |= change;
        if !changed {
            continue;
        }
        let log_l = t.min_xy().ln();
        let log_z = t.z.ln();
        let bound = (log_a.clone() + &log_l) * &Real::from_int(n as i64 + 2, prec);
        let margin = ((bound - &log_z) / &ln2).to_f64();
        report.checked += 1;
        report.min_margin_bits = report.min_margin_bits.min(margin);
        if margin <= 0.0 {
            return Err(Error::BoundViolated {
                path: path.to_string(),
                detail: format!("log2 z exceeds log2 (a l)^(N+2) by {:.3}", -margin),
            });
        }
        if change {
            report.sharp_checked += 1;
            let sharp = log_a.int(2) * &log_a + &(log_l.int(3) * &log_l);
            if log_z >= sharp {
                report.sharp_violations += 1;
            }
        }
    }
    Ok(report)
}

/// A random word of `len` moves whose runs of equal letters have length `<= n`.
pub fn random_bounded_branch(rng: &mut impl Rng, len: usize, n: usize) -> Vec<Move> {
    let mut out = Vec::with_capacity(len);
    let mut m = if rng.gen::<bool>() { Move::Lambda } else { Move::Rho };
    while out.len() < len {
        let run = rng.gen_range(1..=n);
        out.extend(std::iter::repeat_n(m, run.min(len - out.len())));
        m = if m == Move::Lambda { Move::Rho } else { Move::Lambda };
    }
    out
}
