//! The compact p-adic rotation group in three dimensions: matrices preserving
//! the definite ternary form, axes, rotations about an axis, and random
//! sampling.

use num_bigint::BigInt;
use rand::Rng;

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicNumber};
use crate::quad_form::{definite_ternary, orthogonal_complement_basis, DiagonalForm};
use crate::so2::{Mat2, So2Group, So2Point};

pub type Vec3 = [PadicNumber; 3];
pub type Mat3 = [[PadicNumber; 3]; 3];

pub fn vec_from_i64(ctx: &PadicContext, v: &[i64; 3]) -> Vec3 {
    [ctx.from_i64(v[0]), ctx.from_i64(v[1]), ctx.from_i64(v[2])]
}

pub fn mat_from_i64(ctx: &PadicContext, m: &[[i64; 3]; 3]) -> Mat3 {
    [
        vec_from_i64(ctx, &m[0]),
        vec_from_i64(ctx, &m[1]),
        vec_from_i64(ctx, &m[2]),
    ]
}

pub fn identity_mat(ctx: &PadicContext) -> Mat3 {
    let mut m = mat_from_i64(ctx, &[[0; 3]; 3]);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ctx.one();
    }
    m
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = a[i][0].mul(&b[0][j]);
            for k in 1..3 {
                acc = acc.add_lossy(&a[i][k].mul(&b[k][j]));
            }
            acc
        })
    })
}

pub fn mat_vec(a: &Mat3, x: &Vec3) -> Vec3 {
    std::array::from_fn(|i| {
        let mut acc = a[i][0].mul(&x[0]);
        for k in 1..3 {
            acc = acc.add_lossy(&a[i][k].mul(&x[k]));
        }
        acc
    })
}

pub fn mat_transpose(a: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn mat_det(a: &Mat3) -> PadicNumber {
    let mut det = a[0][0].mul(&a[1][1].mul(&a[2][2]).sub_lossy(&a[1][2].mul(&a[2][1])));
    det = det.sub_lossy(&a[0][1].mul(&a[1][0].mul(&a[2][2]).sub_lossy(&a[1][2].mul(&a[2][0]))));
    det.add_lossy(&a[0][2].mul(&a[1][0].mul(&a[2][1]).sub_lossy(&a[1][1].mul(&a[2][0]))))
}

pub fn mat_inv(a: &Mat3) -> Result<Mat3> {
    let det = mat_det(a);
    if det.is_zero() {
        return Err(Error::DivideByZero);
    }
    let cof = |i: usize, j: usize| -> PadicNumber {
        let r = [(i + 1) % 3, (i + 2) % 3];
        let c = [(j + 1) % 3, (j + 2) % 3];
        a[r[0]][c[0]]
            .mul(&a[r[1]][c[1]])
            .sub_lossy(&a[r[0]][c[1]].mul(&a[r[1]][c[0]]))
    };
    let mut out = [
        [det.clone(), det.clone(), det.clone()],
        [det.clone(), det.clone(), det.clone()],
        [det.clone(), det.clone(), det.clone()],
    ];
    for i in 0..3 {
        for j in 0..3 {
            // adjugate: transposed cofactors
            out[i][j] = cof(j, i).div(&det)?;
        }
    }
    Ok(out)
}

pub fn mats_eq(ctx: &PadicContext, a: &Mat3, b: &Mat3) -> bool {
    (0..3).all(|i| {
        (0..3).all(|j| {
            ctx.eq(&a[i][j], &b[i][j])
                || (ctx.is_zero_at_tolerance(&a[i][j]) && ctx.is_zero_at_tolerance(&b[i][j]))
        })
    })
}

/// Entrywise agreement on all shared digits; tolerant of the precision lost
/// by multi-stage computations such as decompose-then-recompose round trips.
pub fn mats_agree(ctx: &PadicContext, a: &Mat3, b: &Mat3) -> bool {
    (0..3).all(|i| {
        (0..3).all(|j| {
            ctx.agrees(&a[i][j], &b[i][j])
                || (ctx.is_zero_at_tolerance(&a[i][j]) && ctx.is_zero_at_tolerance(&b[i][j]))
        })
    })
}

pub fn vecs_parallel(ctx: &PadicContext, a: &Vec3, b: &Vec3) -> bool {
    // all 2x2 minors vanish at tolerance
    (0..3).all(|i| {
        let j = (i + 1) % 3;
        let m = a[i].mul(&b[j]).sub_lossy(&a[j].mul(&b[i]));
        ctx.is_zero_at_tolerance(&m)
    })
}

/// The three coordinate axes. Each names the fixed coordinate; the rotation
/// acts on the other two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn fixed_index(&self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// The two moving coordinates, in increasing order.
    pub fn plane(&self) -> (usize, usize) {
        match self {
            Axis::X => (1, 2),
            Axis::Y => (0, 2),
            Axis::Z => (0, 1),
        }
    }

    pub fn letter(&self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn from_letter(c: char) -> Result<Axis> {
        match c.to_ascii_lowercase() {
            'x' => Ok(Axis::X),
            'y' => Ok(Axis::Y),
            'z' => Ok(Axis::Z),
            _ => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown axis '{c}'"),
            }),
        }
    }
}

/// Rotation group of the definite ternary form.
#[derive(Debug, Clone)]
pub struct So3Group {
    ctx: PadicContext,
    form: DiagonalForm,
}

impl So3Group {
    pub fn new(ctx: PadicContext) -> Self {
        So3Group {
            ctx,
            form: definite_ternary(&ctx),
        }
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn form(&self) -> &DiagonalForm {
        &self.form
    }

    /// Membership test: M^T A M = A (A the diagonal of the form) and
    /// det M = 1, at context tolerance.
    pub fn is_member(&self, m: &Mat3) -> bool {
        let det = mat_det(m);
        if !self.ctx.eq(&det, &self.ctx.one()) {
            return false;
        }
        let mt = mat_transpose(m);
        // S = M^T A M
        let am: Mat3 = std::array::from_fn(|i| {
            std::array::from_fn(|j| self.form.coeff(i).mul(&m[i][j]))
        });
        let s = mat_mul(&mt, &am);
        (0..3).all(|i| {
            (0..3).all(|j| {
                if i == j {
                    self.ctx.eq(&s[i][j], self.form.coeff(i))
                } else {
                    self.ctx.is_zero_at_tolerance(&s[i][j])
                }
            })
        })
    }

    /// The circle subgroup fixing coordinate axis `axis`: a 2-dimensional
    /// rotation group with alpha determined by the restricted form.
    pub fn axis_circle(&self, axis: Axis) -> So2Group {
        let (i, j) = axis.plane();
        let alpha = self.form.coeff(j).div(self.form.coeff(i)).unwrap();
        So2Group::with_alpha(self.ctx, alpha).expect("restricted form is definite")
    }

    fn embed(&self, axis: Axis, r: &Mat2) -> Mat3 {
        let (i, j) = axis.plane();
        let mut m = identity_mat(&self.ctx);
        m[i][i] = r[0][0].clone();
        m[i][j] = r[0][1].clone();
        m[j][i] = r[1][0].clone();
        m[j][j] = r[1][1].clone();
        m
    }

    /// Rotation about a coordinate axis with the given circle parameter.
    pub fn reference_rotation(&self, axis: Axis, sigma: &So2Point) -> Result<Mat3> {
        let g = self.axis_circle(axis);
        Ok(self.embed(axis, &g.matrix(sigma)?))
    }

    /// The circle group of the plane orthogonal to n, together with the
    /// orthogonal basis (g, h) realizing it.
    pub fn plane_circle(&self, n: &Vec3) -> Result<(So2Group, Vec3, Vec3)> {
        let (g, h) = orthogonal_complement_basis(&self.form, n)?;
        let alpha = self.form.evaluate(&h)?.div(&self.form.evaluate(&g)?)?;
        let circle = So2Group::with_alpha(self.ctx, alpha)?;
        Ok((circle, g, h))
    }

    /// Rotation about the axis n by circle parameter sigma: conjugate the
    /// 2-dimensional rotation in the orthogonal plane back to standard
    /// coordinates through the basis (g, h, n).
    pub fn rotation_about(&self, n: &Vec3, sigma: &So2Point) -> Result<Mat3> {
        let (circle, g, h) = self.plane_circle(n)?;
        let r2 = circle.matrix(sigma)?;
        let basis: Mat3 = std::array::from_fn(|i| {
            [g[i].clone(), h[i].clone(), n[i].clone()]
        });
        let block = self.embed(Axis::Z, &r2);
        let inv = mat_inv(&basis)?;
        Ok(mat_mul(&mat_mul(&basis, &block), &inv))
    }

    /// A member taking a to b; requires Q(a) = Q(b), both nonzero. The axis
    /// is the form-orthogonal complement of the pair.
    pub fn rotation_mapping(&self, a: &Vec3, b: &Vec3) -> Result<Mat3> {
        let qa = self.form.evaluate(a)?;
        let qb = self.form.evaluate(b)?;
        if qa.is_zero() || qb.is_zero() {
            return Err(Error::ZeroVector);
        }
        if !self.ctx.agrees(&qa, &qb) {
            return Err(Error::NotInPlane);
        }
        // b(n, a) = b(n, b) = 0 solved by the coefficient-weighted cross product
        let cross = [
            a[1].mul(&b[2]).sub_lossy(&a[2].mul(&b[1])),
            a[2].mul(&b[0]).sub_lossy(&a[0].mul(&b[2])),
            a[0].mul(&b[1]).sub_lossy(&a[1].mul(&b[0])),
        ];
        let n: Vec3 = std::array::from_fn(|i| cross[i].div(self.form.coeff(i)).unwrap());
        if n.iter().all(|x| self.ctx.is_zero_at_tolerance(x)) {
            // parallel vectors of equal norm: b = a or b = -a
            let same = (0..3).all(|i| {
                self.ctx.agrees(&a[i], &b[i])
                    || (self.ctx.is_zero_at_tolerance(&a[i])
                        && self.ctx.is_zero_at_tolerance(&b[i]))
            });
            if same {
                return Ok(identity_mat(&self.ctx));
            }
            // the half-turn about any orthogonal axis negates the plane
            let (g, _) = orthogonal_complement_basis(&self.form, a)?;
            return self.rotation_about(&g, &So2Point::Infinity);
        }
        let (circle, g, h) = self.plane_circle(&n)?;
        let qg = self.form.evaluate(&g)?;
        let qh = self.form.evaluate(&h)?;
        let coord = |v: &Vec3| -> Result<(PadicNumber, PadicNumber)> {
            Ok((
                self.form.bilinear(v, &g)?.div(&qg)?,
                self.form.bilinear(v, &h)?.div(&qh)?,
            ))
        };
        let xa = coord(a)?;
        let xb = coord(b)?;
        let sigma = circle.point_mapping((&xa.0, &xa.1), (&xb.0, &xb.1))?;
        self.rotation_about(&n, &sigma)
    }

    /// The fixed axis of a non-identity rotation, scaled so its first
    /// minimal-valuation coordinate is 1. Every member fixes a line: 1 is
    /// always an eigenvalue.
    pub fn axis(&self, m: &Mat3) -> Result<Vec3> {
        let id = identity_mat(&self.ctx);
        let n: Mat3 = std::array::from_fn(|i| {
            std::array::from_fn(|j| m[i][j].sub_lossy(&id[i][j]))
        });
        // the kernel of M - I is orthogonal (dot product) to its rows; take
        // the largest cross product of a row pair
        let cross = |a: &Vec3, b: &Vec3| -> Vec3 {
            [
                a[1].mul(&b[2]).sub_lossy(&a[2].mul(&b[1])),
                a[2].mul(&b[0]).sub_lossy(&a[0].mul(&b[2])),
                a[0].mul(&b[1]).sub_lossy(&a[1].mul(&b[0])),
            ]
        };
        let mut best: Option<(i64, Vec3)> = None;
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let c = cross(&n[i], &n[j]);
            if let Some(v) = c.iter().filter_map(|x| x.valuation()).min() {
                if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                    best = Some((v, c));
                }
            }
        }
        let (vmin, axis) = best.ok_or(Error::IdentityHasNoAxis)?;
        // normalize: divide by the first coordinate of minimal valuation
        let pivot = axis
            .iter()
            .position(|x| x.valuation() == Some(vmin))
            .unwrap();
        let piv = axis[pivot].clone();
        let mut out = axis;
        for x in &mut out {
            *x = x.div(&piv)?;
        }
        Ok(out)
    }

    /// Axis and circle parameter of a non-identity member; the parameter is
    /// taken in the plane circle of the returned axis.
    pub fn axis_angle(&self, m: &Mat3) -> Result<(Vec3, So2Point)> {
        let n = self.axis(m)?;
        let (circle, g, h) = self.plane_circle(&n)?;
        let mg = mat_vec(m, &g);
        let a = self.form.bilinear(&mg, &g)?.div(&self.form.evaluate(&g)?)?;
        let c = self.form.bilinear(&mg, &h)?.div(&self.form.evaluate(&h)?)?;
        let den = self.ctx.one().add_lossy(&a);
        let sigma = if den.is_zero() || self.ctx.is_zero_at_tolerance(&den) {
            So2Point::Infinity
        } else if c.is_zero() || self.ctx.is_zero_at_tolerance(&c) {
            So2Point::Finite(self.ctx.zero())
        } else {
            So2Point::Finite(c.div(&den)?)
        };
        let _ = circle;
        Ok((n, sigma))
    }

    /// A uniform-ish random integer of Z_p at full working precision.
    pub fn random_padic_integer(&self, rng: &mut impl Rng) -> PadicNumber {
        let mut acc = BigInt::from(0);
        let mut scale = BigInt::from(1);
        for _ in 0..self.ctx.precision() {
            let d = rng.gen_range(0..self.ctx.p());
            acc += &scale * BigInt::from(d);
            scale *= BigInt::from(self.ctx.p());
        }
        self.ctx.from_bigint(&acc)
    }

    /// A random circle parameter covering all of P^1(Q_p): either sigma in
    /// Z_p or the sign-switched branch -R(tau), tau in Z_p.
    pub fn random_point(&self, circle: &So2Group, rng: &mut impl Rng) -> So2Point {
        let base = So2Point::Finite(self.random_padic_integer(rng));
        if rng.gen_bool(0.5) {
            circle.switch_sign(&base).expect("switch-sign is total")
        } else {
            base
        }
    }

    /// A random group element: the product of rotations about the three
    /// coordinate axes with independent random parameters.
    pub fn random_element(&self, rng: &mut impl Rng) -> Mat3 {
        let mut m = identity_mat(&self.ctx);
        for axis in [Axis::Z, Axis::Y, Axis::X] {
            let circle = self.axis_circle(axis);
            let sigma = self.random_point(&circle, rng);
            let r = self
                .reference_rotation(axis, &sigma)
                .expect("reference rotation of a random parameter");
            m = mat_mul(&m, &r);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn group(p: u64) -> So3Group {
        So3Group::new(PadicContext::with_default_precision(p).unwrap())
    }

    #[test]
    fn reference_rotations_are_members() {
        for p in [3u64, 5, 13, 2] {
            let g = group(p);
            let c = *g.ctx();
            for axis in [Axis::X, Axis::Y, Axis::Z] {
                for s in [0i64, 1, -1, 3, 7] {
                    let m = g
                        .reference_rotation(axis, &So2Point::Finite(c.from_i64(s)))
                        .unwrap();
                    assert!(g.is_member(&m), "p = {p}, axis {axis:?}, s = {s}");
                }
                let m = g.reference_rotation(axis, &So2Point::Infinity).unwrap();
                assert!(g.is_member(&m));
            }
        }
    }

    #[test]
    fn membership_rejects_non_rotations() {
        let g = group(3);
        let c = *g.ctx();
        let mut m = identity_mat(&c);
        m[0][0] = c.from_i64(2);
        assert!(!g.is_member(&m));
        // a reflection preserves the form but has determinant -1
        let mut refl = identity_mat(&c);
        refl[0][0] = c.from_i64(-1);
        assert!(!g.is_member(&refl));
    }

    #[test]
    fn products_and_inverses_stay_in_group() {
        for p in [3u64, 5, 2] {
            let g = group(p);
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let a = g.random_element(&mut rng);
            let b = g.random_element(&mut rng);
            assert!(g.is_member(&a));
            assert!(g.is_member(&b));
            assert!(g.is_member(&mat_mul(&a, &b)));
            assert!(g.is_member(&mat_inv(&a).unwrap()));
        }
    }

    #[test]
    fn every_member_fixes_a_line() {
        for p in [3u64, 5, 13, 2] {
            let g = group(p);
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            for _ in 0..5 {
                let m = g.random_element(&mut rng);
                let n = g.axis(&m).unwrap();
                let mn = mat_vec(&m, &n);
                let diff: Vec3 = std::array::from_fn(|i| mn[i].sub_lossy(&n[i]));
                for d in &diff {
                    assert!(g.ctx().is_zero_at_tolerance(d), "p = {p}");
                }
            }
        }
    }

    #[test]
    fn axis_of_reference_rotation_is_coordinate_axis() {
        for p in [3u64, 5, 2] {
            let g = group(p);
            let c = *g.ctx();
            for (axis, e) in [(Axis::X, [1i64, 0, 0]), (Axis::Y, [0, 1, 0]), (Axis::Z, [0, 0, 1])] {
                let m = g
                    .reference_rotation(axis, &So2Point::Finite(c.from_i64(2)))
                    .unwrap();
                let n = g.axis(&m).unwrap();
                assert!(vecs_parallel(&c, &n, &vec_from_i64(&c, &e)), "p = {p}");
            }
        }
    }

    #[test]
    fn rotation_about_coordinate_axis_matches_reference() {
        for p in [3u64, 5, 13, 2] {
            let g = group(p);
            let c = *g.ctx();
            let ez = vec_from_i64(&c, &[0, 0, 1]);
            for s in [0i64, 1, 5, -2] {
                let sigma = So2Point::Finite(c.from_i64(s));
                let a = g.rotation_about(&ez, &sigma).unwrap();
                let b = g.reference_rotation(Axis::Z, &sigma).unwrap();
                assert!(mats_eq(&c, &a, &b), "p = {p}, s = {s}");
            }
        }
    }

    #[test]
    fn rotation_about_general_axis_round_trips() {
        for p in [3u64, 5, 2] {
            let g = group(p);
            let c = *g.ctx();
            for n in [[1i64, 2, 3], [0, 1, 1], [5, 0, 2], [1, 1, 1]] {
                let nv = vec_from_i64(&c, &n);
                for s in [1i64, 4, -3] {
                    let sigma = So2Point::Finite(c.from_i64(s));
                    let m = g.rotation_about(&nv, &sigma).unwrap();
                    assert!(g.is_member(&m), "p = {p}, n = {n:?}");
                    let (axis, angle) = g.axis_angle(&m).unwrap();
                    assert!(vecs_parallel(&c, &axis, &nv), "p = {p}, n = {n:?}");
                    let m2 = g.rotation_about(&axis, &angle).unwrap();
                    assert!(mats_agree(&c, &m, &m2), "p = {p}, n = {n:?}, s = {s}");
                }
            }
        }
    }

    #[test]
    fn rotations_about_same_axis_commute() {
        let g = group(5);
        let c = *g.ctx();
        let n = vec_from_i64(&c, &[2, 1, 0]);
        let a = g
            .rotation_about(&n, &So2Point::Finite(c.from_i64(3)))
            .unwrap();
        let b = g
            .rotation_about(&n, &So2Point::Finite(c.from_i64(-7)))
            .unwrap();
        assert!(mats_eq(&c, &mat_mul(&a, &b), &mat_mul(&b, &a)));
    }

    #[test]
    fn random_elements_deterministic_by_seed() {
        let g = group(3);
        let mut r1 = ChaCha8Rng::seed_from_u64(99);
        let mut r2 = ChaCha8Rng::seed_from_u64(99);
        let a = g.random_element(&mut r1);
        let b = g.random_element(&mut r2);
        assert!(mats_eq(g.ctx(), &a, &b));
    }

    #[test]
    fn matrix_inverse_is_exact() {
        let g = group(7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = g.random_element(&mut rng);
        let inv = mat_inv(&m).unwrap();
        assert!(mats_eq(g.ctx(), &mat_mul(&m, &inv), &identity_mat(g.ctx())));
    }
}
