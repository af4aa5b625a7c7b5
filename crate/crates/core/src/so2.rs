//! The p-adic circle groups: rotations of a definite binary form x^2 + alpha y^2,
//! parametrized by the projective line over Q_p.

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicNumber, SquareClass};
use crate::quad_form::binary_alpha;

/// A point of P^1(Q_p) written as sigma = s/t, with [1:0] as the point at
/// infinity. Parametrizes a rotation: 0 is the identity, infinity is -I.
#[derive(Debug, Clone)]
pub enum So2Point {
    Finite(PadicNumber),
    Infinity,
}

impl So2Point {
    pub fn is_infinity(&self) -> bool {
        matches!(self, So2Point::Infinity)
    }

    /// Homogeneous coordinates [s : t].
    fn coords(&self, ctx: &PadicContext) -> (PadicNumber, PadicNumber) {
        match self {
            So2Point::Finite(s) => (s.clone(), ctx.one()),
            So2Point::Infinity => (ctx.one(), ctx.zero()),
        }
    }
}

pub type Mat2 = [[PadicNumber; 2]; 2];

/// The rotation group of x^2 + alpha y^2, where alpha represents the
/// discriminant class kappa. Definite classes only: kappa away from -1.
#[derive(Debug, Clone)]
pub struct So2Group {
    ctx: PadicContext,
    kappa: SquareClass,
    alpha: PadicNumber,
}

impl So2Group {
    pub fn new(ctx: PadicContext, kappa: SquareClass) -> Result<Self> {
        let alpha = binary_alpha(&ctx, &kappa)?;
        Ok(So2Group { ctx, kappa, alpha })
    }

    /// A group for an explicit nonzero alpha with -alpha not a square.
    pub fn with_alpha(ctx: PadicContext, alpha: PadicNumber) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::ZeroVector);
        }
        if alpha.neg().is_square()? {
            return Err(Error::NotDefinite);
        }
        let kappa = crate::padic::square_class(&ctx, &alpha)?;
        Ok(So2Group { ctx, kappa, alpha })
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn kappa(&self) -> &SquareClass {
        &self.kappa
    }

    pub fn alpha(&self) -> &PadicNumber {
        &self.alpha
    }

    pub fn identity(&self) -> So2Point {
        So2Point::Finite(self.ctx.zero())
    }

    /// Group law in homogeneous coordinates:
    /// [s:t] * [u:v] = [s v + t u : t v - alpha s u].
    pub fn compose(&self, a: &So2Point, b: &So2Point) -> Result<So2Point> {
        let (s, t) = a.coords(&self.ctx);
        let (u, v) = b.coords(&self.ctx);
        let num = s.mul(&v).add_lossy(&t.mul(&u));
        let den = t.mul(&v).sub_lossy(&self.alpha.mul(&s).mul(&u));
        match (num.is_zero(), den.is_zero()) {
            (true, true) => Err(Error::PrecisionExhausted),
            (_, true) => Ok(So2Point::Infinity),
            (true, false) => Ok(So2Point::Finite(self.ctx.zero())),
            (false, false) => Ok(So2Point::Finite(num.div(&den)?)),
        }
    }

    /// [s:t]^-1 = [-s:t].
    pub fn inverse(&self, a: &So2Point) -> So2Point {
        match a {
            So2Point::Finite(s) => So2Point::Finite(s.neg()),
            So2Point::Infinity => So2Point::Infinity,
        }
    }

    /// The parameter of -R(sigma): 0 and infinity swap, otherwise
    /// sigma maps to -1 / (alpha sigma).
    pub fn switch_sign(&self, a: &So2Point) -> Result<So2Point> {
        match a {
            So2Point::Infinity => Ok(So2Point::Finite(self.ctx.zero())),
            So2Point::Finite(s) if s.is_zero() => Ok(So2Point::Infinity),
            So2Point::Finite(s) => Ok(So2Point::Finite(
                self.ctx.from_i64(-1).div(&self.alpha.mul(s))?,
            )),
        }
    }

    /// Equality of projective parameters at context tolerance.
    pub fn points_eq(&self, a: &So2Point, b: &So2Point) -> bool {
        match (a, b) {
            (So2Point::Infinity, So2Point::Infinity) => true,
            (So2Point::Finite(x), So2Point::Finite(y)) => self.ctx.eq(x, y),
            // a finite parameter of large valuation is near 0, never near infinity
            _ => false,
        }
    }

    /// Agreement on all shared digits (tolerant variant of `points_eq` for
    /// values that have been through several precision-consuming steps).
    pub fn points_agree(&self, a: &So2Point, b: &So2Point) -> bool {
        match (a, b) {
            (So2Point::Infinity, So2Point::Infinity) => true,
            (So2Point::Finite(x), So2Point::Finite(y)) => self.ctx.agrees(x, y),
            _ => false,
        }
    }

    /// The rotation matrix
    /// R(sigma) = [[1 - a s^2, -2 a s], [2 s, 1 - a s^2]] / (1 + a s^2),
    /// R(infinity) = -I.
    pub fn matrix(&self, a: &So2Point) -> Result<Mat2> {
        let one = self.ctx.one();
        match a {
            So2Point::Infinity => {
                let m = one.neg();
                Ok([[m.clone(), self.ctx.zero()], [self.ctx.zero(), m]])
            }
            So2Point::Finite(s) => {
                let asq = self.alpha.mul(&s.square());
                // definiteness keeps 1 + alpha s^2 away from exact zero
                let den = one.add(&asq)?;
                let diag = one.sub_lossy(&asq).div(&den)?;
                let two_s = self.ctx.from_i64(2).mul(s);
                let lower = two_s.div(&den)?;
                let upper = self.alpha.mul(&two_s).neg().div(&den)?;
                Ok([[diag.clone(), upper], [lower, diag]])
            }
        }
    }

    /// Whether M^T diag(1, alpha) M = diag(1, alpha) and det M = 1, at
    /// context tolerance.
    pub fn is_rotation_matrix(&self, m: &Mat2) -> bool {
        let [[a, b], [c, d]] = m;
        let al = &self.alpha;
        let det = a.mul(d).sub_lossy(&b.mul(c));
        let n1 = a.square().add_lossy(&al.mul(&c.square())); // first column norm
        let n2 = b.square().add_lossy(&al.mul(&d.square())); // alpha * second column norm
        let cross = a.mul(b).add_lossy(&al.mul(c).mul(d));
        self.ctx.eq(&det, &self.ctx.one())
            && self.ctx.eq(&n1, &self.ctx.one())
            && self.ctx.eq(&n2, al)
            && self.ctx.is_zero_at_tolerance(&cross)
    }

    /// Parameter of the rotation taking (x1, x2) to (y1, y2) in the plane
    /// carrying x^2 + alpha y^2; the two vectors must have equal nonzero norm.
    pub fn point_mapping(
        &self,
        x: (&PadicNumber, &PadicNumber),
        y: (&PadicNumber, &PadicNumber),
    ) -> Result<So2Point> {
        // R = [[a, -alpha c], [c, a]]; solving R x = y against the norm of x
        let det = x.0.square().add_lossy(&self.alpha.mul(&x.1.square()));
        if det.is_zero() {
            return Err(Error::ZeroVector);
        }
        let a = x.0.mul(y.0).add_lossy(&self.alpha.mul(x.1).mul(y.1)).div(&det)?;
        let c = x.0.mul(y.1).sub_lossy(&x.1.mul(y.0)).div(&det)?;
        let den = self.ctx.one().add_lossy(&a);
        if den.is_zero() || self.ctx.is_zero_at_tolerance(&den) {
            return Ok(So2Point::Infinity);
        }
        if c.is_zero() || self.ctx.is_zero_at_tolerance(&c) {
            return Ok(So2Point::Finite(self.ctx.zero()));
        }
        Ok(So2Point::Finite(c.div(&den)?))
    }

    /// Recover the parameter from a rotation matrix: sigma = c / (1 + a),
    /// with -I mapping to infinity.
    pub fn point_from_matrix(&self, m: &Mat2) -> Result<So2Point> {
        if !self.is_rotation_matrix(m) {
            return Err(Error::NotOrthogonal);
        }
        let a = &m[0][0];
        let c = &m[1][0];
        let den = self.ctx.one().add_lossy(a);
        if den.is_zero() || self.ctx.is_zero_at_tolerance(&den) {
            return Ok(So2Point::Infinity);
        }
        if c.is_zero() {
            return Ok(So2Point::Finite(self.ctx.zero()));
        }
        Ok(So2Point::Finite(c.div(&den)?))
    }
}
