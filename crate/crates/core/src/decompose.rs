//! Factoring rotations into three rotations about coordinate axes, for all
//! twelve axis orders, with feasibility certificates when a factorization
//! does not exist.

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicNumber};
use crate::so2::So2Point;
use crate::so3::{mat_mul, mat_vec, mats_agree, Axis, Mat3, So3Group, Vec3};

/// An ordered triple of rotation axes with adjacent axes distinct: six
/// orders use all three axes, six repeat the outer axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AxisOrder(pub [Axis; 3]);

impl AxisOrder {
    pub fn new(axes: [Axis; 3]) -> Result<Self> {
        if axes[0] == axes[1] || axes[1] == axes[2] {
            return Err(Error::Parse {
                pos: 0,
                msg: "adjacent rotation axes must differ".into(),
            });
        }
        Ok(AxisOrder(axes))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != 3 {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("axis order must be three letters, got '{s}'"),
            });
        }
        Self::new([
            Axis::from_letter(chars[0])?,
            Axis::from_letter(chars[1])?,
            Axis::from_letter(chars[2])?,
        ])
    }

    pub fn label(&self) -> String {
        self.0.iter().map(|a| a.letter()).collect()
    }

    /// Outer axis repeated (classical Euler angles) as opposed to three
    /// distinct axes (Tait-Bryan / Cardano angles).
    pub fn repeats_outer_axis(&self) -> bool {
        self.0[0] == self.0[2]
    }

    /// All twelve valid orders.
    pub fn all() -> Vec<AxisOrder> {
        let axes = [Axis::X, Axis::Y, Axis::Z];
        let mut out = Vec::new();
        for a in axes {
            for b in axes {
                for c in axes {
                    if let Ok(o) = AxisOrder::new([a, b, c]) {
                        out.push(o);
                    }
                }
            }
        }
        out
    }
}

/// Whether a factorization in a given order exists for a given matrix; when
/// it does not, the witness is a value that would have to be a square in Q_p
/// but is not.
#[derive(Debug, Clone)]
pub enum Feasibility {
    Feasible,
    Infeasible { witness: PadicNumber },
}

#[derive(Debug, Clone)]
pub enum DecomposeOutcome {
    /// Parameter triples (one per factor, in order); generically two.
    Solutions(Vec<[So2Point; 3]>),
    Infeasible { witness: PadicNumber },
}

fn basis_vec(ctx: &PadicContext, i: usize) -> Vec3 {
    let mut e = [ctx.zero(), ctx.zero(), ctx.zero()];
    e[i] = ctx.one();
    e
}

/// The scalar controlling feasibility: with M = R_{a1} R_{a2} R_{a3}, the
/// image w = M e_{a3} pins the a1-component c = w[a1], and the middle factor
/// must produce a j-component t with q_j t^2 = q_{a3} - q_{a1} c^2 (j the
/// axis outside {a1, a2}). Returns (t^2, c, w).
fn middle_square(
    g: &So3Group,
    m: &Mat3,
    order: &AxisOrder,
) -> Result<(PadicNumber, PadicNumber, Vec3, usize)> {
    let ctx = g.ctx();
    let [a1, a2, a3] = order.0;
    let (n1, n2, n3) = (a1.fixed_index(), a2.fixed_index(), a3.fixed_index());
    let j = 3 - n1 - n2;
    let w = mat_vec(m, &basis_vec(ctx, n3));
    let c = w[n1].clone();
    let q = g.form();
    let s = q.coeff(n3).sub_lossy(&q.coeff(n1).mul(&c.square()));
    let rhs = s.div(q.coeff(j))?;
    Ok((rhs, c, w, j))
}

pub fn feasibility(g: &So3Group, m: &Mat3, order: &AxisOrder) -> Result<Feasibility> {
    let (rhs, _, _, _) = middle_square(g, m, order)?;
    if rhs.is_zero() {
        return Ok(Feasibility::Feasible);
    }
    if g.ctx().is_zero_at_tolerance(&rhs) {
        return Err(Error::PrecisionExhausted);
    }
    if rhs.is_square()? {
        Ok(Feasibility::Feasible)
    } else {
        Ok(Feasibility::Infeasible { witness: rhs })
    }
}

/// Factor m as R_{a1}(zeta) R_{a2}(eta) R_{a3}(xi). Generic matrices admit
/// exactly two factorizations (the two square roots of the middle square);
/// in the degenerate case t = 0 the outer parameters are only jointly
/// determined and two representatives with zeta in {0, infinity} are
/// returned.
pub fn decompose(g: &So3Group, m: &Mat3, order: &AxisOrder) -> Result<DecomposeOutcome> {
    let ctx = *g.ctx();
    let [a1, a2, a3] = order.0;
    let (n1, _n2, n3) = (a1.fixed_index(), a2.fixed_index(), a3.fixed_index());
    let (rhs, c, w, j) = middle_square(g, m, order)?;

    let ts: Vec<PadicNumber> = if rhs.is_zero() {
        vec![ctx.zero()]
    } else if ctx.is_zero_at_tolerance(&rhs) {
        return Err(Error::PrecisionExhausted);
    } else if rhs.is_square()? {
        let t = rhs.sqrt()?;
        vec![t.clone(), t.neg()]
    } else {
        return Ok(DecomposeOutcome::Infeasible { witness: rhs });
    };

    let e3 = basis_vec(&ctx, n3);
    let mut solutions = Vec::new();
    for t in ts {
        let mut v = [ctx.zero(), ctx.zero(), ctx.zero()];
        v[n1] = c.clone();
        v[j] = t.clone();

        let circle2 = g.axis_circle(a2);
        let (i1, i2) = a2.plane();
        let eta = circle2.point_mapping((&e3[i1], &e3[i2]), (&v[i1], &v[i2]))?;

        let zetas: Vec<So2Point> = if t.is_zero() {
            vec![So2Point::Finite(ctx.zero()), So2Point::Infinity]
        } else {
            let circle1 = g.axis_circle(a1);
            let (k1, k2) = a1.plane();
            vec![circle1.point_mapping((&v[k1], &v[k2]), (&w[k1], &w[k2]))?]
        };

        for zeta in zetas {
            // peel the outer two factors and read the third off the residual
            let r1 = g.reference_rotation(a1, &g.axis_circle(a1).inverse(&zeta))?;
            let r2 = g.reference_rotation(a2, &circle2.inverse(&eta))?;
            let resid = mat_mul(&r2, &mat_mul(&r1, m));
            let circle3 = g.axis_circle(a3);
            let (b1, b2) = a3.plane();
            let one = ctx.one();
            let xi = circle3.point_mapping(
                (&one, &ctx.zero()),
                (&resid[b1][b1], &resid[b2][b1]),
            )?;
            let candidate = [zeta.clone(), eta.clone(), xi];
            let rebuilt = compose(g, order, &candidate)?;
            if !mats_agree(&ctx, m, &rebuilt) {
                return Err(Error::Internal(
                    "residual after removing outer factors is not a rotation about the third axis",
                ));
            }
            solutions.push(candidate);
        }
    }
    Ok(DecomposeOutcome::Solutions(solutions))
}

/// The twin of a factorization: compose the outer parameters with the point
/// at infinity and invert the middle one against its plane constant,
/// (zeta, eta, xi) -> (inf * zeta, 1/(alpha eta), inf * xi). An involution
/// that leaves the recomposed matrix unchanged; the two solutions returned
/// by `decompose` are related by it.
pub fn second_solution(
    g: &So3Group,
    order: &AxisOrder,
    params: &[So2Point; 3],
) -> Result<[So2Point; 3]> {
    let ctx = g.ctx();
    let [a1, a2, a3] = order.0;
    let zeta = g.axis_circle(a1).switch_sign(&params[0])?;
    let alpha = g.axis_circle(a2).alpha().clone();
    // flipping the sign of the pinned square root negates the middle angle
    // when the outer axes coincide and inverts it against alpha otherwise
    let eta = if order.repeats_outer_axis() {
        match &params[1] {
            So2Point::Infinity => So2Point::Infinity,
            So2Point::Finite(s) => So2Point::Finite(s.neg()),
        }
    } else {
        match &params[1] {
            So2Point::Infinity => So2Point::Finite(ctx.zero()),
            So2Point::Finite(s) if s.is_zero() => So2Point::Infinity,
            So2Point::Finite(s) => So2Point::Finite(ctx.one().div(&alpha.mul(s))?),
        }
    };
    let xi = g.axis_circle(a3).switch_sign(&params[2])?;
    Ok([zeta, eta, xi])
}

/// Multiply out a parameter triple in the given order.
pub fn compose(g: &So3Group, order: &AxisOrder, params: &[So2Point; 3]) -> Result<Mat3> {
    let mut m = crate::so3::identity_mat(g.ctx());
    for (axis, sigma) in order.0.iter().zip(params) {
        m = mat_mul(&m, &g.reference_rotation(*axis, sigma)?);
    }
    Ok(m)
}

/// Search for a member of the group admitting no factorization in the given
/// order. Returns the matrix and the non-square witness. Fails with
/// `NoSuchForm` when the bounded search exhausts without finding one, which
/// for the always-feasible orders it must.
pub fn counterexample(g: &So3Group, order: &AxisOrder) -> Result<(Mat3, PadicNumber)> {
    let ctx = *g.ctx();
    let p = ctx.p() as i64;
    let [a1, a2, a3] = order.0;
    let (n1, n2, n3) = (a1.fixed_index(), a2.fixed_index(), a3.fixed_index());
    let j = 3 - n1 - n2;
    let q = g.form();
    let limit = if p == 2 { 24 } else { 3 * p };
    let build = |c: &PadicNumber, rhs: &PadicNumber| -> Result<Option<(Mat3, PadicNumber)>> {
        // w needs Q(w) = q_{n3}: represent the deficit s on the other two axes
        let s = q.coeff(n3).sub_lossy(&q.coeff(n1).mul(&c.square()));
        for y_int in 0..=limit {
            let y = ctx.from_i64(y_int);
            let rem = s.sub_lossy(&q.coeff(n2).mul(&y.square()));
            let t = if rem.is_zero() {
                ctx.zero()
            } else {
                let tt = rem.div(q.coeff(j))?;
                if !tt.is_square()? {
                    continue;
                }
                tt.sqrt()?
            };
            let mut w = [ctx.zero(), ctx.zero(), ctx.zero()];
            w[n1] = c.clone();
            w[n2] = y;
            w[j] = t;
            let m = g.rotation_mapping(&basis_vec(&ctx, n3), &w)?;
            return Ok(Some((m, rhs.clone())));
        }
        Ok(None)
    };
    // targeted pass: aim the witness straight at a chosen non-square class,
    // trying the class of p first so valuation carries the obstruction
    let u = if p == 2 { 0 } else { ctx.unit_nonsquare() as i64 };
    let targets: Vec<i64> = if p == 2 {
        vec![2, -2, -1, 5, -5, 10, -10]
    } else {
        vec![p, u * p, u]
    };
    for tau_int in targets {
        let tau = ctx.from_i64(tau_int);
        let c2 = q
            .coeff(n3)
            .sub_lossy(&q.coeff(j).mul(&tau))
            .div(q.coeff(n1))?;
        if c2.is_zero() || !c2.is_square()? {
            continue;
        }
        let c = c2.sqrt()?;
        if let Some(found) = build(&c, &tau)? {
            return Ok(found);
        }
    }
    // fallback: scan small integer pinned components
    for c_int in 0..=limit {
        let c = ctx.from_i64(c_int);
        let s = q.coeff(n3).sub_lossy(&q.coeff(n1).mul(&c.square()));
        if s.is_zero() {
            continue;
        }
        let rhs = s.div(q.coeff(j))?;
        if rhs.is_square()? {
            continue;
        }
        if let Some(found) = build(&c, &rhs)? {
            return Ok(found);
        }
    }
    Err(Error::NoSuchForm)
}

/// The classical 2-adic matrix showing that not every rotation factors in
/// the xyz order: built from a square root of -7.
pub fn two_adic_counterexample(ctx: &PadicContext) -> Result<Mat3> {
    if ctx.p() != 2 {
        return Err(Error::UnsupportedPrime("this construction lives over Q_2"));
    }
    let r = ctx.from_i64(-7).sqrt()?;
    let half = ctx.from_ratio(1, 2)?;
    let two = ctx.from_i64(2);
    let m2 = ctx.from_i64(-2);
    let rp1 = r.add(&ctx.one())?.mul(&half);
    let rm1 = r.sub(&ctx.one())?.mul(&half);
    let mut m: Mat3 = [
        [m2.clone(), m2, r],
        [rp1.clone(), rm1.clone(), two.clone()],
        [rm1, rp1, two],
    ];
    // the root branch determines the sign of the determinant; fix it to +1
    let det = crate::so3::mat_det(&m);
    if ctx.eq(&det, &ctx.from_i64(-1)) {
        for x in &mut m[0] {
            *x = x.neg();
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::square_class;
    use crate::so3::{mats_eq, So3Group};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn group(p: u64) -> So3Group {
        So3Group::new(PadicContext::with_default_precision(p).unwrap())
    }

    #[test]
    fn twelve_orders() {
        let all = AxisOrder::all();
        assert_eq!(all.len(), 12);
        assert_eq!(all.iter().filter(|o| o.repeats_outer_axis()).count(), 6);
        assert_eq!(AxisOrder::parse("zyx").unwrap().label(), "zyx");
        assert!(AxisOrder::parse("zzx").is_err());
        assert!(AxisOrder::parse("zy").is_err());
    }

    fn always_feasible_orders(p: u64) -> Vec<&'static str> {
        // the distinct-axis orders ending away from the odd coordinate are
        // always feasible; xzy and yzx additionally need p = 1 mod 4
        match p % 4 {
            1 => vec!["zyx", "zxy", "xyz", "yxz", "xzy", "yzx"],
            _ => vec!["zyx", "zxy", "xyz", "yxz"],
        }
    }

    #[test]
    fn random_members_decompose_in_feasible_orders() {
        for p in [3u64, 5, 13] {
            let g = group(p);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..3 {
                let m = g.random_element(&mut rng);
                for name in always_feasible_orders(p) {
                    let order = AxisOrder::parse(name).unwrap();
                    match decompose(&g, &m, &order).unwrap() {
                        DecomposeOutcome::Solutions(sols) => {
                            assert_eq!(sols.len(), 2, "p = {p}, order {name}");
                            for s in &sols {
                                let rebuilt = compose(&g, &order, s).unwrap();
                                assert!(mats_agree(g.ctx(), &m, &rebuilt));
                            }
                        }
                        DecomposeOutcome::Infeasible { witness } => {
                            panic!("p = {p}, order {name} claimed infeasible: {witness}")
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn parameter_round_trip_through_composition() {
        for p in [3u64, 5, 2] {
            let g = group(p);
            let c = *g.ctx();
            for name in ["zyx", "xyx", "zxz", "yzy"] {
                let order = AxisOrder::parse(name).unwrap();
                let params = [
                    So2Point::Finite(c.from_i64(2)),
                    So2Point::Finite(c.from_i64(5)),
                    So2Point::Finite(c.from_i64(-1)),
                ];
                let m = compose(&g, &order, &params).unwrap();
                assert!(g.is_member(&m));
                if let DecomposeOutcome::Solutions(sols) = decompose(&g, &m, &order).unwrap() {
                    assert!(
                        sols.iter().any(|s| {
                            s.iter()
                                .zip(&params)
                                .all(|(a, b)| g.axis_circle(order.0[0]).points_agree(a, b)
                                    || matches!((a, b), (So2Point::Finite(x), So2Point::Finite(y))
                                        if c.agrees(x, y)))
                        }),
                        "p = {p}, order {name}: original parameters not recovered"
                    );
                } else {
                    panic!("p = {p}, order {name} infeasible for composed matrix");
                }
            }
        }
    }

    #[test]
    fn generic_solutions_come_in_pairs_and_differ() {
        let g = group(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = g.random_element(&mut rng);
        let order = AxisOrder::parse("zyx").unwrap();
        if let DecomposeOutcome::Solutions(sols) = decompose(&g, &m, &order).unwrap() {
            assert_eq!(sols.len(), 2);
            let diff = sols[0]
                .iter()
                .zip(&sols[1])
                .any(|(a, b)| !g.axis_circle(Axis::Z).points_agree(a, b));
            assert!(diff, "the two factorizations should be distinct");
        } else {
            panic!("expected solutions");
        }
    }

    fn points_match(g: &So3Group, a: &[So2Point; 3], b: &[So2Point; 3]) -> bool {
        a.iter()
            .zip(b)
            .all(|(x, y)| g.axis_circle(Axis::Z).points_agree(x, y))
    }

    #[test]
    fn twin_map_swaps_the_two_solutions_and_is_an_involution() {
        for p in [3u64, 5, 13, 2] {
            let g = group(p);
            let c = *g.ctx();
            for name in ["zyx", "xyx", "zxz"] {
                let order = AxisOrder::parse(name).unwrap();
                let params = [
                    So2Point::Finite(c.from_i64(3)),
                    So2Point::Finite(c.from_i64(7)),
                    So2Point::Finite(c.from_i64(-2)),
                ];
                let m = compose(&g, &order, &params).unwrap();
                let sols = match decompose(&g, &m, &order).unwrap() {
                    DecomposeOutcome::Solutions(s) => s,
                    DecomposeOutcome::Infeasible { .. } => {
                        panic!("p = {p}, order {name}: composed matrix must decompose")
                    }
                };
                assert_eq!(sols.len(), 2);
                let twin = second_solution(&g, &order, &sols[0]).unwrap();
                assert!(
                    points_match(&g, &twin, &sols[1]),
                    "p = {p}, order {name}: twin of the first solution is not the second"
                );
                let back = second_solution(&g, &order, &twin).unwrap();
                assert!(points_match(&g, &back, &sols[0]), "twin map is not an involution");
                let rebuilt = compose(&g, &order, &twin).unwrap();
                assert!(mats_agree(g.ctx(), &m, &rebuilt), "twin must compose to the same matrix");
            }
        }
    }

    #[test]
    fn constructed_xzy_counterexamples_carry_a_prime_class_witness() {
        let order = AxisOrder::parse("xzy").unwrap();
        let zyx = AxisOrder::parse("zyx").unwrap();
        for p in [3u64, 7, 11] {
            let g = group(p);
            let ctx = *g.ctx();
            let (m, witness) = counterexample(&g, &order).unwrap();
            assert!(g.is_member(&m));
            assert_eq!(
                square_class(&ctx, &witness).unwrap(),
                square_class(&ctx, &ctx.from_i64(p as i64)).unwrap(),
                "p = {p}: witness should sit in the class of p"
            );
            match feasibility(&g, &m, &order).unwrap() {
                Feasibility::Infeasible { witness: w } => {
                    assert!(!w.is_square().unwrap());
                }
                Feasibility::Feasible => panic!("p = {p}: constructed matrix must fail xzy"),
            }
            match decompose(&g, &m, &zyx).unwrap() {
                DecomposeOutcome::Solutions(sols) => {
                    assert_eq!(sols.len(), 2);
                    let rebuilt = compose(&g, &zyx, &sols[0]).unwrap();
                    assert!(mats_agree(&ctx, &m, &rebuilt));
                }
                DecomposeOutcome::Infeasible { .. } => {
                    panic!("p = {p}: the same matrix must still split as zyx")
                }
            }
        }
    }

    #[test]
    fn two_adic_matrix_is_a_counterexample_for_xyz_and_yxz() {
        let ctx = PadicContext::with_default_precision(2).unwrap();
        let g = So3Group::new(ctx);
        let m = two_adic_counterexample(&ctx).unwrap();
        assert!(g.is_member(&m));
        // xyz: the pinned component is a root of -7, witness 1 - (-7) = 8
        let order = AxisOrder::parse("xyz").unwrap();
        match feasibility(&g, &m, &order).unwrap() {
            Feasibility::Infeasible { witness } => {
                assert!(ctx.eq(&witness, &ctx.from_i64(8)));
            }
            Feasibility::Feasible => panic!("xyz should be infeasible"),
        }
        match decompose(&g, &m, &order).unwrap() {
            DecomposeOutcome::Infeasible { witness } => {
                assert_eq!(
                    square_class(&ctx, &witness).unwrap(),
                    square_class(&ctx, &ctx.from_i64(2)).unwrap()
                );
            }
            _ => panic!("xyz should be infeasible"),
        }
        // yxz: the pinned component is 2, witness 1 - 4 = -3
        let order = AxisOrder::parse("yxz").unwrap();
        match feasibility(&g, &m, &order).unwrap() {
            Feasibility::Infeasible { witness } => {
                assert!(ctx.eq(&witness, &ctx.from_i64(-3)));
            }
            Feasibility::Feasible => panic!("yxz should be infeasible"),
        }
        // this element evades every one of the twelve orders
        for order in AxisOrder::all() {
            assert!(matches!(
                decompose(&g, &m, &order).unwrap(),
                DecomposeOutcome::Infeasible { .. }
            ));
        }
    }

    #[test]
    fn counterexamples_found_for_repeated_axis_orders() {
        for p in [3u64, 5] {
            let g = group(p);
            for order in AxisOrder::all() {
                if !order.repeats_outer_axis() {
                    continue;
                }
                let (m, witness) = counterexample(&g, &order).unwrap();
                assert!(g.is_member(&m), "p = {p}, order {}", order.label());
                assert!(!witness.is_square().unwrap());
                match decompose(&g, &m, &order).unwrap() {
                    DecomposeOutcome::Infeasible { witness: w2 } => {
                        assert_eq!(
                            square_class(g.ctx(), &witness).unwrap(),
                            square_class(g.ctx(), &w2).unwrap()
                        );
                    }
                    _ => panic!("constructed matrix should be infeasible"),
                }
            }
        }
    }

    #[test]
    fn counterexample_search_fails_for_always_feasible_orders() {
        for p in [3u64, 5, 13] {
            let g = group(p);
            for name in always_feasible_orders(p) {
                let order = AxisOrder::parse(name).unwrap();
                assert_eq!(
                    counterexample(&g, &order).err(),
                    Some(Error::NoSuchForm),
                    "p = {p}, order {name}"
                );
            }
        }
    }

    #[test]
    fn mixed_plane_orders_depend_on_prime_class() {
        // xzy is always feasible at p = 1 mod 4 but admits counterexamples
        // at p = 3 mod 4
        let order = AxisOrder::parse("xzy").unwrap();
        for p in [3u64, 7] {
            let g = group(p);
            let (m, _) = counterexample(&g, &order).unwrap();
            assert!(g.is_member(&m));
            assert!(matches!(
                decompose(&g, &m, &order).unwrap(),
                DecomposeOutcome::Infeasible { .. }
            ));
        }
        for p in [5u64, 13] {
            let g = group(p);
            assert_eq!(counterexample(&g, &order).err(), Some(Error::NoSuchForm));
        }
    }

    #[test]
    fn degenerate_image_yields_representative_solutions() {
        // a rotation about the z axis pins M e_z = e_z: for the zxz order the
        // middle square is zero and the outer parameters are only jointly
        // determined
        let g = group(3);
        let c = *g.ctx();
        let m = g
            .reference_rotation(Axis::Z, &So2Point::Finite(c.from_i64(4)))
            .unwrap();
        let order = AxisOrder::parse("zxz").unwrap();
        match decompose(&g, &m, &order).unwrap() {
            DecomposeOutcome::Solutions(sols) => {
                assert_eq!(sols.len(), 2);
                for s in &sols {
                    let rebuilt = compose(&g, &order, s).unwrap();
                    assert!(mats_eq(&c, &m, &rebuilt) || mats_agree(&c, &m, &rebuilt));
                }
            }
            _ => panic!("decomposing about the fixed axis must be feasible"),
        }
    }
}
