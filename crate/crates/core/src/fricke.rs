//! Fricke parameters, adjusted-Fricke triples and the moves between them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Exact, Real, Scalar};

/// Relative tolerance, in bits above the precision, for equation checks on reals.
pub const EQUATION_SLACK_BITS: i32 = 8;

/// A validated `(a, b, c)` with `a² + b² + c² = abc` and `2 < a <= b <= c < ab/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrickeParams<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

impl FrickeParams<Exact> {
    /// `(3, 3, 3)`.
    pub fn modular() -> Self {
        let three = Exact::from_int(3);
        FrickeParams { a: three.clone(), b: three.clone(), c: three }
    }
}

impl<S: Scalar> FrickeParams<S> {
    /// Skips validation; for algebraic experiments outside the admissible range.
    pub fn unchecked(a: S, b: S, c: S) -> Self {
        FrickeParams { a, b, c }
    }

    pub fn is_exact(&self) -> bool {
        S::EXACT
    }

    /// `a² + b² + c² - abc`.
    pub fn residual(&self) -> S {
        self.a.square() + &self.b.square() + &self.c.square()
            - &(self.a.clone() * &self.b * &self.c)
    }

    pub fn to_real(&self, prec: u32) -> FrickeParams<Real> {
        FrickeParams {
            a: self.a.to_real(prec),
            b: self.b.to_real(prec),
            c: self.c.to_real(prec),
        }
    }

    pub fn half_a(&self) -> S {
        self.a.clone() / &self.a.int(2)
    }
}

/// Checks the Fricke equation and the ordering constraints.
pub fn validate_params<S: Scalar>(a: S, b: S, c: S) -> Result<FrickeParams<S>> {
    let p = FrickeParams { a, b, c };
    let res = p.residual();
    let abc = p.a.clone() * &p.b * &p.c;
    if !res.near(&res.int(0), &abc, EQUATION_SLACK_BITS) {
        return Err(Error::EquationViolated { residual: res.to_decimal() });
    }
    let two = p.a.int(2);
    let half_ab = p.a.clone() * &p.b / &two;
    let ordered = p.a > two && p.a <= p.b && p.b <= p.c && p.c < half_ab;
    if !ordered {
        return Err(Error::OrderingViolated(format!("(a, b, c) = ({}, {}, {})", p.a, p.b, p.c)));
    }
    Ok(p)
}

/// The root `c < ab/2` of `c² - abc + a² + b² = 0`.
///
/// Exact inputs need a perfect-square discriminant; otherwise the caller has to
/// switch to reals.
pub fn solve_c<S: Scalar>(a: &S, b: &S) -> Result<S> {
    let four = a.int(4);
    let disc = a.square() * &b.square() - &(four.clone() * &a.square()) - &(four * &b.square());
    if disc.sign() == Ordering::Less {
        return Err(Error::NoRealRoot);
    }
    let root = disc.sqrt_exact().ok_or_else(|| {
        Error::DomainError(format!("discriminant {} is not a rational square", disc.to_decimal()))
    })?;
    // product of the roots is a² + b²; avoids cancelling ab against the root
    let sum_sq = a.square() + &b.square();
    Ok(a.int(2) * &sum_sq / &(a.clone() * b + &root))
}

/// A positive solution of `x² + y² + z² = a·xyz`.
///
/// `(x, y, z)` are the inverse heights of the fixed points of `(G, F, E)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrickeTriple<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> FrickeTriple<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        FrickeTriple { x, y, z }
    }

    /// The smaller of the two entries other than `z`.
    pub fn min_xy(&self) -> &S {
        if self.x <= self.y {
            &self.x
        } else {
            &self.y
        }
    }

    pub fn near(&self, other: &Self) -> bool {
        let scale = self.z.abs().max_of(other.z.abs());
        self.x.near(&other.x, &scale, EQUATION_SLACK_BITS)
            && self.y.near(&other.y, &scale, EQUATION_SLACK_BITS)
            && self.z.near(&other.z, &scale, EQUATION_SLACK_BITS)
    }
}

/// `(1, b/a, c/a)`: the inverse fixed-point heights of `(T2, T1, T0)`.
pub fn minimal_triple<S: Scalar>(params: &FrickeParams<S>) -> FrickeTriple<S> {
    FrickeTriple {
        x: params.a.int(1),
        y: params.b.clone() / &params.a,
        z: params.c.clone() / &params.a,
    }
}

/// `x² + y² + z² - a·xyz`.
pub fn adjusted_residual<S: Scalar>(t: &FrickeTriple<S>, params: &FrickeParams<S>) -> S {
    t.x.square() + &t.y.square() + &t.z.square() - &(params.a.clone() * &t.x * &t.y * &t.z)
}

/// `|residual| <= 2^(16-p)·a·xyz` for reals, zero for exact values.
pub fn satisfies_adjusted<S: Scalar>(t: &FrickeTriple<S>, params: &FrickeParams<S>) -> bool {
    let res = adjusted_residual(t, params);
    let scale = params.a.clone() * &t.x * &t.y * &t.z;
    res.near(&res.int(0), &scale, 16)
}

/// The three moves of the tree. `Lambda < Rho` is the tie-break order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Move {
    Lambda,
    Rho,
    Nu,
}

impl Move {
    pub fn letter(self) -> char {
        match self {
            Move::Lambda => 'L',
            Move::Rho => 'R',
            Move::Nu => 'N',
        }
    }

    pub fn from_letter(ch: char) -> Option<Move> {
        match ch {
            'L' | 'l' => Some(Move::Lambda),
            'R' | 'r' => Some(Move::Rho),
            'N' | 'n' => Some(Move::Nu),
            _ => None,
        }
    }
}

/// Applies a move to a triple.
///
/// - λ: `(x, y, z) -> (x, z, axz - y)`
/// - ρ: `(x, y, z) -> (z, y, ayz - x)`
/// - ν: `(x, y, z) -> (y, x, axy - z)`, only at the minimal triple or its ν-image.
///
/// ν swaps `x` and `y` because it replaces `(E, F, G)` by `(FEF⁻¹, G, S^a F S^-a)`,
/// so the new `G` carries the old inverse height `y`.
pub fn apply_move<S: Scalar>(t: &FrickeTriple<S>, m: Move, params: &FrickeParams<S>) -> Result<FrickeTriple<S>> {
    let a = &params.a;
    Ok(match m {
        Move::Lambda => FrickeTriple {
            z: a.clone() * &t.x * &t.z - &t.y,
            x: t.x.clone(),
            y: t.z.clone(),
        },
        Move::Rho => FrickeTriple {
            z: a.clone() * &t.y * &t.z - &t.x,
            x: t.z.clone(),
            y: t.y.clone(),
        },
        Move::Nu => {
            let root = minimal_triple(params);
            let flipped = nu_flip(&root, a);
            if !(t.near(&root) || t.near(&flipped)) {
                return Err(Error::NuNotAtRoot);
            }
            nu_flip(t, a)
        }
    })
}

fn nu_flip<S: Scalar>(t: &FrickeTriple<S>, a: &S) -> FrickeTriple<S> {
    FrickeTriple {
        z: a.clone() * &t.x * &t.y - &t.z,
        x: t.y.clone(),
        y: t.x.clone(),
    }
}

/// Which root of the tree a path starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RootTag {
    /// The minimal triple, tag `m`.
    Minimal,
    /// Its ν-image, tag `n`.
    NuRoot,
}

/// A node address: root tag followed by λ/ρ labels.
///
/// The derived order is the enumeration tie-break: `m < n`, then labels
/// lexicographically with `L < R` and a prefix before its extensions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MovePath {
    pub root: RootTag,
    steps: Vec<Move>,
}

impl MovePath {
    pub fn root(tag: RootTag) -> Self {
        MovePath { root: tag, steps: Vec::new() }
    }

    /// Panics on ν; ν only joins the two roots.
    pub fn new(root: RootTag, steps: Vec<Move>) -> Self {
        assert!(!steps.contains(&Move::Nu), "ν is not a tree label");
        MovePath { root, steps }
    }

    pub fn steps(&self) -> &[Move] {
        &self.steps
    }

    pub fn child(&self, m: Move) -> MovePath {
        let mut p = self.clone();
        p.steps.push(m);
        MovePath::new(p.root, p.steps)
    }

    /// Graph distance from the minimal root.
    pub fn depth(&self) -> usize {
        self.steps.len() + usize::from(self.root == RootTag::NuRoot)
    }
}

impl fmt::Display for MovePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.root {
            RootTag::Minimal => "m",
            RootTag::NuRoot => "n",
        })?;
        for m in &self.steps {
            write!(f, "{}", m.letter())?;
        }
        Ok(())
    }
}

impl FromStr for MovePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        let root = match chars.next() {
            Some('m') => RootTag::Minimal,
            Some('n') => RootTag::NuRoot,
            _ => return Err(Error::Parse(format!("path {s:?} must start with root tag m or n"))),
        };
        let steps = chars
            .map(|ch| match ch {
                'L' => Ok(Move::Lambda),
                'R' => Ok(Move::Rho),
                _ => Err(Error::Parse(format!("bad label {ch:?} in path {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MovePath { root, steps })
    }
}

impl Serialize for MovePath {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Exact {
        Exact::from_int(n)
    }

    fn t(x: i64, y: i64, z: i64) -> FrickeTriple<Exact> {
        FrickeTriple::new(q(x), q(y), q(z))
    }

    #[test]
    fn validation() {
        assert!(validate_params(q(3), q(3), q(3)).is_ok());
        assert_eq!(
            validate_params(q(2), q(2), q(2)),
            Err(Error::EquationViolated { residual: "4".into() })
        );
        assert!(matches!(validate_params(q(3), q(3), q(6)), Err(Error::OrderingViolated(_))));
    }

    #[test]
    fn solving_for_c() {
        assert_eq!(solve_c(&q(3), &q(3)), Ok(q(3)));
        let c = solve_c(&q(3), &q(6)).unwrap();
        assert_eq!(c, q(3));
        assert!(matches!(validate_params(q(3), q(6), c), Err(Error::OrderingViolated(_))));
        let h = Exact::from_ratio(5, 2);
        assert_eq!(solve_c(&h, &h), Err(Error::NoRealRoot));
        assert!(matches!(solve_c(&q(3), &q(4)), Err(Error::DomainError(_))));
    }

    #[test]
    fn solving_for_c_with_reals() {
        let a = Real::parse("2.9", 256).unwrap();
        let b = Real::from_int(3, 256);
        let c = solve_c(&a, &b).unwrap();
        let p = validate_params(a, b, c.clone()).unwrap();
        assert!((c.to_f64() - 3.120_162_612).abs() < 1e-9);
        assert!(p.residual().abs().to_f64() < 1e-70);
    }

    #[test]
    fn minimal_triple_is_modular_unit() {
        let p = FrickeParams::modular();
        let m = minimal_triple(&p);
        assert_eq!(m, t(1, 1, 1));
        assert_eq!(adjusted_residual(&m, &p), q(0));
    }

    #[test]
    fn moves() {
        let p = FrickeParams::modular();
        assert_eq!(apply_move(&t(1, 1, 1), Move::Rho, &p), Ok(t(1, 1, 2)));
        assert_eq!(apply_move(&t(1, 2, 5), Move::Lambda, &p), Ok(t(1, 5, 13)));
        assert_eq!(apply_move(&t(1, 1, 1), Move::Nu, &p), Ok(t(1, 1, 2)));
        assert_eq!(apply_move(&t(1, 2, 5), Move::Nu, &p), Err(Error::NuNotAtRoot));
    }

    #[test]
    fn nu_is_an_involution_at_the_root() {
        let a = Real::parse("2.9", 256).unwrap();
        let b = Real::from_int(3, 256);
        let c = solve_c(&a, &b).unwrap();
        let p = validate_params(a, b, c).unwrap();
        let m = minimal_triple(&p);
        let n = apply_move(&m, Move::Nu, &p).unwrap();
        assert!(n.z > n.x && n.z > n.y);
        assert!(apply_move(&n, Move::Nu, &p).unwrap().near(&m));
    }

    #[test]
    fn residuals() {
        let p = FrickeParams::modular();
        assert_eq!(adjusted_residual(&t(1, 2, 5), &p), q(0));
        assert_eq!(adjusted_residual(&t(1, 1, 3), &p), q(2));
    }

    #[test]
    fn path_order_and_text() {
        let m = MovePath::root(RootTag::Minimal);
        let n = MovePath::root(RootTag::NuRoot);
        let ml = m.child(Move::Lambda);
        let mr = m.child(Move::Rho);
        let mll = ml.child(Move::Lambda);
        let mut v = vec![n.clone(), mr.clone(), mll.clone(), m.clone(), ml.clone()];
        v.sort();
        assert_eq!(v, vec![m.clone(), ml, mll, mr, n.clone()]);
        let p: MovePath = "nLRR".parse().unwrap();
        assert_eq!(p.to_string(), "nLRR");
        assert_eq!(p.depth(), 4);
        assert_eq!(m.depth(), 0);
        assert_eq!(n.depth(), 1);
        assert!("xL".parse::<MovePath>().is_err());
        assert!("mLN".parse::<MovePath>().is_err());
    }
}
