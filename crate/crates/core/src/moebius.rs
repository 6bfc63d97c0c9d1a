//! Determinant-one matrices acting on the upper half-plane, and the uplift
//! geometry of order-two elliptic elements.
//!
//! Heights and radii are stored squared. Fixed points, apexes and images of
//! h-lines then stay inside the field generated by the matrix entries, so every
//! predicate here (boundary membership, orthogonality, height comparison) is
//! decided exactly when the scalars are [`Exact`](crate::Exact).

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fricke::FrickeParams;
use crate::scalar::{Real, Scalar};

/// Tolerance, in bits above the working precision, for boundary decisions on reals.
pub const BOUNDARY_SLACK_BITS: i32 = 16;

/// `[[alpha, beta], [gamma, delta]]`, acting by `z -> (alpha z + beta)/(gamma z + delta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2<S> {
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
    pub delta: S,
}

impl<S: Scalar> Mat2<S> {
    pub fn new(alpha: S, beta: S, gamma: S, delta: S) -> Self {
        Mat2 { alpha, beta, gamma, delta }
    }

    pub fn identity(like: &S) -> Self {
        Mat2::new(like.int(1), like.int(0), like.int(0), like.int(1))
    }

    /// `z -> z + t`.
    pub fn translation(t: &S) -> Self {
        Mat2::new(t.int(1), t.clone(), t.int(0), t.int(1))
    }

    /// The order-two element with fixed point `center + i/|gamma|`:
    /// `[[center·gamma, -(1 + (center·gamma)^2)/gamma], [gamma, -center·gamma]]`.
    pub fn order_two(center: &S, gamma: &S) -> Self {
        let alpha = center.clone() * gamma;
        let beta = -(alpha.square() + &alpha.int(1)) / gamma;
        Mat2::new(alpha.clone(), beta, gamma.clone(), -alpha)
    }

    pub fn det(&self) -> S {
        self.alpha.clone() * &self.delta - &(self.beta.clone() * &self.gamma)
    }

    pub fn trace(&self) -> S {
        self.alpha.clone() + &self.delta
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> Self {
        Mat2::new(
            self.delta.clone(),
            -self.beta.clone(),
            -self.gamma.clone(),
            self.alpha.clone(),
        )
    }

    /// `self · m · self⁻¹`.
    pub fn conj(&self, m: &Mat2<S>) -> Self {
        &(self * m) * &self.inverse()
    }

    pub fn is_order_two(&self) -> bool {
        self.trace().is_zero() && self.det() == self.alpha.int(1)
    }

    /// True for `[[1, t], [0, 1]]`.
    pub fn is_translation(&self) -> bool {
        let one = self.alpha.int(1);
        self.gamma.is_zero() && self.alpha == one && self.delta == one
    }

    /// Tolerant version of [`Mat2::is_translation`] (exact for exact scalars).
    pub fn near_translation(&self, slack_bits: i32) -> bool {
        let one = self.alpha.int(1);
        let zero = self.alpha.int(0);
        let scale = self.beta.abs().max_of(one.clone());
        self.gamma.near(&zero, &scale, slack_bits)
            && self.alpha.near(&one, &scale, slack_bits)
            && self.delta.near(&one, &scale, slack_bits)
    }

    /// Entrywise tolerant equality (exact for exact scalars).
    pub fn near(&self, other: &Mat2<S>, slack_bits: i32) -> bool {
        let scale = [&self.alpha, &self.beta, &self.gamma, &self.delta]
            .into_iter()
            .fold(self.alpha.int(1), |m, v| m.max_of(v.abs()));
        self.alpha.near(&other.alpha, &scale, slack_bits)
            && self.beta.near(&other.beta, &scale, slack_bits)
            && self.gamma.near(&other.gamma, &scale, slack_bits)
            && self.delta.near(&other.delta, &scale, slack_bits)
    }

    /// Möbius action on a point of the upper half-plane.
    pub fn apply(&self, p: &Point<S>) -> Point<S> {
        let w_re = self.gamma.clone() * &p.x + &self.delta;
        let gy_sq = self.gamma.square() * &p.height_sq;
        let w_abs_sq = w_re.square() + &gy_sq;
        let num_re =
            (self.alpha.clone() * &p.x + &self.beta) * &w_re + &(self.alpha.clone() * &self.gamma * &p.height_sq);
        Point {
            x: num_re / &w_abs_sq,
            height_sq: p.height_sq.clone() / &w_abs_sq.square(),
        }
    }

    /// Image of a real-centred circle, in closed form.
    pub fn image_circle(&self, c: &HLine<S>) -> Result<HLine<S>> {
        if self.gamma.is_zero() {
            let scale = self.alpha.clone() / &self.delta;
            return Ok(HLine {
                center: (self.alpha.clone() * &c.center + &self.beta) / &self.delta,
                radius_sq: scale.square() * &c.radius_sq,
            });
        }
        // M(z) = alpha/gamma - 1/(gamma (gamma z + delta))
        let c1 = self.gamma.clone() * &c.center + &self.delta;
        let r1_sq = self.gamma.square() * &c.radius_sq;
        let den = c1.square() - &r1_sq;
        if den.is_zero() {
            return Err(Error::PoleOnCircle);
        }
        let c2 = -c1 / &den;
        let r2_sq = r1_sq / &den.square();
        Ok(HLine {
            center: (self.alpha.clone() + &c2) / &self.gamma,
            radius_sq: r2_sq / &self.gamma.square(),
        })
    }

    /// Fixed point `(alpha/gamma, 1/|gamma|)` of an order-two element.
    pub fn fixed_point(&self) -> Result<Point<S>> {
        if self.gamma.is_zero() {
            return Err(Error::GammaZero);
        }
        Ok(Point {
            x: self.alpha.clone() / &self.gamma,
            height_sq: self.gamma.int(1) / &self.gamma.square(),
        })
    }

    /// Real part of the fixed point, `alpha/gamma`.
    pub fn center(&self) -> Result<S> {
        if self.gamma.is_zero() {
            return Err(Error::GammaZero);
        }
        Ok(self.alpha.clone() / &self.gamma)
    }

    /// Circle of centre `-delta/gamma` and radius `1/|gamma|`.
    pub fn isometric_circle(&self) -> Result<HLine<S>> {
        if self.gamma.is_zero() {
            return Err(Error::GammaZero);
        }
        Ok(HLine {
            center: -self.delta.clone() / &self.gamma,
            radius_sq: self.gamma.int(1) / &self.gamma.square(),
        })
    }

    /// The h-line joining the two real fixed points of a hyperbolic element.
    pub fn axis(&self) -> Result<HLine<S>> {
        let t = self.trace();
        let disc = t.square() - &t.int(4);
        if disc.sign() != Ordering::Greater {
            return Err(Error::NotHyperbolic { trace: t.abs().to_decimal() });
        }
        if self.gamma.is_zero() {
            return Err(Error::VerticalAxis);
        }
        let two_gamma = self.gamma.int(2) * &self.gamma;
        Ok(HLine {
            center: (self.alpha.clone() - &self.delta) / &two_gamma,
            radius_sq: disc / &two_gamma.square(),
        })
    }

    pub fn uplift_region(&self) -> Result<UpliftRegion<S>> {
        UpliftRegion::new(self.clone())
    }

    pub fn to_real(&self, prec: u32) -> Mat2<Real> {
        Mat2::new(
            self.alpha.to_real(prec),
            self.beta.to_real(prec),
            self.gamma.to_real(prec),
            self.delta.to_real(prec),
        )
    }
}

impl<'a, S: Scalar> Mul<&'a Mat2<S>> for &'a Mat2<S> {
    type Output = Mat2<S>;

    fn mul(self, r: &'a Mat2<S>) -> Mat2<S> {
        Mat2::new(
            self.alpha.clone() * &r.alpha + &(self.beta.clone() * &r.gamma),
            self.alpha.clone() * &r.beta + &(self.beta.clone() * &r.delta),
            self.gamma.clone() * &r.alpha + &(self.delta.clone() * &r.gamma),
            self.gamma.clone() * &r.beta + &(self.delta.clone() * &r.delta),
        )
    }
}

impl<S: Scalar> fmt::Display for Mat2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.alpha, self.beta, self.gamma, self.delta)
    }
}

/// A point `X + iY` of the upper half-plane, stored as `(X, Y²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<S> {
    pub x: S,
    pub height_sq: S,
}

impl<S: Scalar> Point<S> {
    pub fn new(x: S, height: S) -> Self {
        Point { height_sq: height.square(), x }
    }

    pub fn from_height_sq(x: S, height_sq: S) -> Self {
        Point { x, height_sq }
    }

    pub fn height(&self, prec: u32) -> Real {
        self.height_sq.to_real(prec).sqrt()
    }

    pub fn near(&self, other: &Point<S>, slack_bits: i32) -> bool {
        let scale = self.x.abs().max_of(self.height_sq.abs()).max_of(self.x.int(1));
        self.x.near(&other.x, &scale, slack_bits)
            && self.height_sq.near(&other.height_sq, &scale, slack_bits)
    }
}

/// A circle with real centre. Its upper half is a (non-vertical) h-line with
/// apex `(center, radius)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HLine<S> {
    pub center: S,
    pub radius_sq: S,
}

pub type Circle<S> = HLine<S>;

impl<S: Scalar> HLine<S> {
    pub fn new(center: S, radius: S) -> Self {
        HLine { radius_sq: radius.square(), center }
    }

    pub fn from_center_sq(center: S, radius_sq: S) -> Self {
        HLine { center, radius_sq }
    }

    pub fn apex(&self) -> Point<S> {
        Point { x: self.center.clone(), height_sq: self.radius_sq.clone() }
    }

    pub fn radius(&self, prec: u32) -> Real {
        self.radius_sq.to_real(prec).sqrt()
    }

    /// Signed residual `|p - center|² - radius²` of a point.
    pub fn incidence_residual(&self, p: &Point<S>) -> S {
        (p.x.clone() - &self.center).square() + &p.height_sq - &self.radius_sq
    }

    pub fn passes_through(&self, p: &Point<S>, slack_bits: i32) -> bool {
        let lhs = (p.x.clone() - &self.center).square() + &p.height_sq;
        lhs.near(&self.radius_sq, &self.radius_sq, slack_bits)
    }
}

/// The h-line through two points, or an error if they coincide or are vertically aligned.
pub fn hline_through<S: Scalar>(p: &Point<S>, q: &Point<S>) -> Result<HLine<S>> {
    if p.x == q.x {
        return Err(if p.height_sq == q.height_sq { Error::SamePoint } else { Error::VerticalLine });
    }
    let num = q.x.square() + &q.height_sq - &p.x.square() - &p.height_sq;
    let center = num / &(p.x.int(2) * &(q.x.clone() - &p.x));
    let radius_sq = (p.x.clone() - &center).square() + &p.height_sq;
    Ok(HLine { center, radius_sq })
}

/// Apex of the h-line through the fixed points of two order-two elements.
pub fn apex_of_pair<S: Scalar>(a: &Mat2<S>, b: &Mat2<S>) -> Result<Point<S>> {
    Ok(hline_through(&a.fixed_point()?, &b.fixed_point()?)?.apex())
}

/// `(c1 - c2)² - (r1² + r2²)`; zero exactly when the circles meet at right angles.
pub fn orthogonality_residual<S: Scalar>(c1: &HLine<S>, c2: &HLine<S>) -> S {
    (c1.center.clone() - &c2.center).square() - &c1.radius_sq - &c2.radius_sq
}

pub fn orthogonal_circles<S: Scalar>(c1: &HLine<S>, c2: &HLine<S>) -> bool {
    let lhs = (c1.center.clone() - &c2.center).square();
    let rhs = c1.radius_sq.clone() + &c2.radius_sq;
    lhs.near(&rhs, &rhs, BOUNDARY_SLACK_BITS)
}

/// The generators `(T0, T1, T2)` of the group attached to `(a, b, c)`.
///
/// `T0 = [[0, -a/c], [c/a, 0]]`, `T1 = [[a/c, ·], [b/a, -a/c]]`,
/// `T2 = [[a - b/c, ·], [1, -(a - b/c)]]`, with the upper-right entries forced by
/// determinant one. Their product `T2 T1 T0` is the translation by `a`.
pub fn generator_matrices<S: Scalar>(params: &FrickeParams<S>) -> [Mat2<S>; 3] {
    let (a, b, c) = (&params.a, &params.b, &params.c);
    let t0 = Mat2::order_two(&a.int(0), &(c.clone() / a));
    let t1 = Mat2::order_two(&(a.square() / &(b.clone() * c)), &(b.clone() / a));
    let t2 = Mat2::order_two(&(a.clone() - &(b.clone() / c)), &a.int(1));
    [t0, t1, t2]
}

/// Where a point sits relative to an uplift region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpliftVerdict {
    InsideMinus,
    InsidePlus,
    UpperBoundary,
    LowerBoundary,
    Outside,
}

impl UpliftVerdict {
    pub fn is_inside(self) -> bool {
        matches!(self, UpliftVerdict::InsideMinus | UpliftVerdict::InsidePlus)
    }

    pub fn is_boundary(self) -> bool {
        matches!(self, UpliftVerdict::UpperBoundary | UpliftVerdict::LowerBoundary)
    }
}

/// `{ (X, Y) : |(X - alpha/gamma)² - Y²| < 1/gamma² }` for an order-two element.
///
/// The fixed point lies on the upper boundary `(X - c)² - Y² = -1/gamma²`, the
/// isometric circle is inscribed, and the element raises the height of exactly
/// the h-lines whose apex is inside.
#[derive(Clone, Debug, PartialEq)]
pub struct UpliftRegion<S> {
    pub owner: Mat2<S>,
    pub center: S,
    /// `1/gamma²`.
    pub scale: S,
}

impl<S: Scalar> UpliftRegion<S> {
    pub fn new(owner: Mat2<S>) -> Result<Self> {
        if !owner.trace().is_zero() {
            return Err(Error::NotOrderTwo);
        }
        if owner.gamma.is_zero() {
            return Err(Error::GammaZero);
        }
        let center = owner.alpha.clone() / &owner.gamma;
        let scale = owner.gamma.int(1) / &owner.gamma.square();
        Ok(UpliftRegion { owner, center, scale })
    }

    /// `(X - c)² - Y²`.
    pub fn quadratic(&self, p: &Point<S>) -> S {
        (p.x.clone() - &self.center).square() - &p.height_sq
    }

    pub fn classify(&self, p: &Point<S>) -> UpliftVerdict {
        let q = self.quadratic(p);
        let tol_scale = q.abs().max_of(self.scale.clone());
        if q.near(&-self.scale.clone(), &tol_scale, BOUNDARY_SLACK_BITS) {
            UpliftVerdict::UpperBoundary
        } else if q.near(&self.scale, &tol_scale, BOUNDARY_SLACK_BITS) {
            UpliftVerdict::LowerBoundary
        } else if q.abs() < self.scale {
            if p.x < self.center {
                UpliftVerdict::InsideMinus
            } else {
                UpliftVerdict::InsidePlus
            }
        } else {
            UpliftVerdict::Outside
        }
    }

    /// `Y²` on the upper boundary above `x`.
    pub fn upper_boundary_height_sq(&self, x: &S) -> S {
        (x.clone() - &self.center).square() + &self.scale
    }

    /// `Y²` on the lower boundary above `x` (negative where the boundary is absent).
    pub fn lower_boundary_height_sq(&self, x: &S) -> S {
        (x.clone() - &self.center).square() - &self.scale
    }
}

/// Effect of an element on the height of an h-line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeightChange {
    Raised,
    Lowered,
    Preserved,
}

/// Compares the radius of the image of `line` under `a` with its own radius.
pub fn raises_height<S: Scalar>(a: &Mat2<S>, line: &HLine<S>) -> Result<HeightChange> {
    if a.gamma.is_zero() {
        return Err(Error::GammaZero);
    }
    let image = a.image_circle(line)?;
    let scale = image.radius_sq.clone().max_of(line.radius_sq.clone());
    Ok(if image.radius_sq.near(&line.radius_sq, &scale, BOUNDARY_SLACK_BITS) {
        HeightChange::Preserved
    } else if image.radius_sq > line.radius_sq {
        HeightChange::Raised
    } else {
        HeightChange::Lowered
    })
}

/// The verdict [`raises_height`] must return for an h-line with this apex.
pub fn expected_height_change(v: UpliftVerdict) -> HeightChange {
    match v {
        UpliftVerdict::InsideMinus | UpliftVerdict::InsidePlus => HeightChange::Raised,
        UpliftVerdict::UpperBoundary | UpliftVerdict::LowerBoundary => HeightChange::Preserved,
        UpliftVerdict::Outside => HeightChange::Lowered,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fricke::FrickeParams;
    use crate::scalar::Exact;

    fn q(n: i64, d: i64) -> Exact {
        Exact::from_ratio(n, d)
    }

    fn m(a: i64, b: i64, c: i64, d: i64) -> Mat2<Exact> {
        Mat2::new(q(a, 1), q(b, 1), q(c, 1), q(d, 1))
    }

    fn modular() -> [Mat2<Exact>; 3] {
        generator_matrices(&FrickeParams::modular())
    }

    #[test]
    fn modular_generators() {
        let [t0, t1, t2] = modular();
        assert_eq!(t0, m(0, -1, 1, 0));
        assert_eq!(t1, m(1, -2, 1, -1));
        assert_eq!(t2, m(2, -5, 1, -2));
        assert_eq!(&(&t2 * &t1) * &t0, m(1, 3, 0, 1));
        for t in [&t0, &t1, &t2] {
            assert!(t.is_order_two());
        }
    }

    #[test]
    fn general_generators_close_up_to_the_translation() {
        // a = 3, b = 6 is not admissible, but the group relation holds for any
        // solution of the Fricke equation; (3, 6, 15) is one.
        let p = FrickeParams::unchecked(q(3, 1), q(6, 1), q(15, 1));
        let [t0, t1, t2] = generator_matrices(&p);
        assert_eq!(&(&t2 * &t1) * &t0, Mat2::translation(&q(3, 1)));
        assert_eq!(t1.beta, -(q(3, 1) * q(225 + 9, 1)) / q(6 * 225, 1));
    }

    #[test]
    fn translation_acts_on_points() {
        let s3 = Mat2::translation(&q(3, 1));
        let p = s3.apply(&Point::new(q(0, 1), q(1, 1)));
        assert_eq!(p, Point::new(q(3, 1), q(1, 1)));
        let [t0, ..] = modular();
        assert_eq!(t0.apply(&Point::new(q(0, 1), q(1, 1))), Point::new(q(0, 1), q(1, 1)));
        assert_eq!(t0.apply(&Point::new(q(1, 1), q(1, 1))), Point::new(q(-1, 2), q(1, 2)));
    }

    #[test]
    fn product_translation_moves_i() {
        let [t0, t1, t2] = modular();
        let s = &(&t2 * &t1) * &t0;
        assert_eq!(s.apply(&Point::new(q(0, 1), q(1, 1))), Point::new(q(3, 1), q(1, 1)));
    }

    #[test]
    fn inversion_of_circles() {
        let [t0, ..] = modular();
        let img = t0.image_circle(&HLine::new(q(2, 1), q(1, 1))).unwrap();
        assert_eq!(img, HLine::new(q(-2, 3), q(1, 3)));
        // The unit circle is preserved; a circle through the pole 0 is not a circle after.
        let unit = t0.image_circle(&HLine::new(q(0, 1), q(1, 1))).unwrap();
        assert_eq!(unit, HLine::new(q(0, 1), q(1, 1)));
        assert_eq!(t0.image_circle(&HLine::new(q(1, 1), q(1, 1))), Err(Error::PoleOnCircle));
        let raised = t0.image_circle(&HLine::new(q(1, 2), q(3, 5))).unwrap();
        // c² - r² = -0.11, image radius 0.6/0.11
        assert_eq!(raised.radius_sq, q(60, 11).square());
    }

    #[test]
    fn image_circle_agrees_with_pointwise_action() {
        let g = m(2, 1, 1, 1);
        let line = HLine::new(q(1, 3), q(5, 4));
        let img = g.image_circle(&line).unwrap();
        // apex and one more point on the circle map onto the image
        let pts = [line.apex(), Point::new(q(1, 3) + q(3, 4), q(1, 1))];
        for p in &pts {
            assert_eq!(line.incidence_residual(p), q(0, 1));
            assert_eq!(img.incidence_residual(&g.apply(p)), q(0, 1));
        }
    }

    #[test]
    fn fixed_points_and_isometric_circles() {
        let [t0, t1, t2] = modular();
        assert_eq!(t0.fixed_point().unwrap(), Point::new(q(0, 1), q(1, 1)));
        assert_eq!(t1.fixed_point().unwrap(), Point::new(q(1, 1), q(1, 1)));
        assert_eq!(t2.fixed_point().unwrap(), Point::new(q(2, 1), q(1, 1)));
        assert_eq!(t0.isometric_circle().unwrap(), HLine::new(q(0, 1), q(1, 1)));
        assert_eq!(t1.isometric_circle().unwrap(), HLine::new(q(1, 1), q(1, 1)));
        for t in [&t0, &t1, &t2] {
            assert_eq!(t.isometric_circle().unwrap().apex(), t.fixed_point().unwrap());
            assert_eq!(t.apply(&t.fixed_point().unwrap()), t.fixed_point().unwrap());
        }
        assert_eq!(Mat2::translation(&q(1, 1)).fixed_point(), Err(Error::GammaZero));
    }

    #[test]
    fn uplift_classification() {
        let [t0, ..] = modular();
        let u = t0.uplift_region().unwrap();
        assert_eq!(u.classify(&Point::new(q(1, 2), q(1, 1))), UpliftVerdict::InsidePlus);
        assert_eq!(u.classify(&Point::new(q(-1, 2), q(1, 1))), UpliftVerdict::InsideMinus);
        assert_eq!(u.classify(&Point::new(q(0, 1), q(1, 1))), UpliftVerdict::UpperBoundary);
        assert_eq!(
            u.classify(&Point::from_height_sq(q(1, 1), q(0, 1) + q(1, 1))),
            UpliftVerdict::InsidePlus
        );
        // (√2, 1) is on the lower boundary; store X² exactly via a point with X = 3/2, Y² = 5/4
        assert_eq!(u.classify(&Point::from_height_sq(q(3, 2), q(5, 4))), UpliftVerdict::LowerBoundary);
        assert_eq!(u.classify(&Point::new(q(10, 1), q(1, 1))), UpliftVerdict::Outside);
        assert_eq!(m(1, 1, 0, 1).uplift_region(), Err(Error::NotOrderTwo));
    }

    #[test]
    fn lower_boundary_at_sqrt_two_with_reals() {
        let [t0, ..] = modular();
        let u = t0.to_real(256).uplift_region().unwrap();
        let p = Point::new(Real::from_int(2, 256).sqrt(), Real::from_int(1, 256));
        assert_eq!(u.classify(&p), UpliftVerdict::LowerBoundary);
    }

    #[test]
    fn height_changes_follow_the_region() {
        let [t0, ..] = modular();
        assert_eq!(raises_height(&t0, &HLine::new(q(1, 2), q(3, 5))), Ok(HeightChange::Raised));
        let through_fixed = HLine::from_center_sq(q(1, 2), q(5, 4));
        assert_eq!(raises_height(&t0, &through_fixed), Ok(HeightChange::Preserved));
        assert_eq!(raises_height(&t0, &HLine::new(q(10, 1), q(1, 1))), Ok(HeightChange::Lowered));
    }

    #[test]
    fn axes_of_hyperbolic_elements() {
        let [_, t1, _] = modular();
        let h = &Mat2::translation(&q(3, 1)) * &t1;
        assert_eq!(h, m(4, -5, 1, -1));
        assert_eq!(h.axis().unwrap(), HLine::from_center_sq(q(5, 2), q(5, 4)));
        assert_eq!(m(2, 1, 1, 1).axis().unwrap(), HLine::from_center_sq(q(1, 2), q(5, 4)));
        assert_eq!(m(1, 1, 0, 1).axis(), Err(Error::NotHyperbolic { trace: "2".into() }));
    }

    #[test]
    fn axis_of_diagonal_is_vertical() {
        let d = Mat2::new(q(3, 1), q(0, 1), q(0, 1), q(1, 3));
        assert_eq!(d.axis(), Err(Error::VerticalAxis));
    }

    #[test]
    fn apex_of_adjacent_generators() {
        let [t0, t1, _] = modular();
        let ap = apex_of_pair(&t1, &t0).unwrap();
        assert_eq!(ap, Point::from_height_sq(q(1, 2), q(5, 4)));
        assert_eq!(apex_of_pair(&t0, &t1).unwrap(), ap);
        for t in [&t0, &t1] {
            assert_eq!(t.uplift_region().unwrap().classify(&ap), UpliftVerdict::UpperBoundary);
        }
        assert_eq!(apex_of_pair(&t0, &t0), Err(Error::SamePoint));
        let above = Mat2::order_two(&q(0, 1), &q(1, 2));
        assert_eq!(apex_of_pair(&t0, &above), Err(Error::VerticalLine));
    }

    #[test]
    fn orthogonality() {
        let r = |v: i64| Real::from_int(v, 256);
        assert!(orthogonal_circles(&HLine::new(r(0), r(1)), &HLine::new(r(2).sqrt(), r(1))));
        let unit = HLine::new(q(0, 1), q(1, 1));
        assert!(!orthogonal_circles(&unit, &HLine::new(q(3, 1), q(1, 1))));
        assert!(orthogonal_circles(&unit, &HLine::from_center_sq(q(2, 1), q(3, 1))));
    }
}
