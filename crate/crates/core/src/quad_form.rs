//! Diagonal quadratic forms over Q_p: invariants (discriminant class, Hasse
//! symbol), equivalence, isotropy, and the canonical definite forms that
//! underlie the compact rotation groups.

use crate::error::{Error, Result};
use crate::padic::{hilbert_symbol, square_class, PadicContext, PadicNumber, SquareClass};

/// A nondegenerate diagonal form a_1 x_1^2 + ... + a_n x_n^2.
#[derive(Debug, Clone)]
pub struct DiagonalForm {
    ctx: PadicContext,
    coeffs: Vec<PadicNumber>,
}

impl DiagonalForm {
    pub fn new(ctx: PadicContext, coeffs: Vec<PadicNumber>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::DimensionMismatch);
        }
        if coeffs.iter().any(|c| c.is_zero()) {
            return Err(Error::UndefinedOnZero);
        }
        Ok(DiagonalForm { ctx, coeffs })
    }

    pub fn from_i64(ctx: PadicContext, coeffs: &[i64]) -> Result<Self> {
        Self::new(ctx, coeffs.iter().map(|&c| ctx.from_i64(c)).collect())
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> &PadicNumber {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    pub fn discriminant(&self) -> PadicNumber {
        let mut d = self.ctx.one();
        for c in &self.coeffs {
            d = d.mul(c);
        }
        d
    }

    pub fn discriminant_class(&self) -> Result<SquareClass> {
        square_class(&self.ctx, &self.discriminant())
    }

    /// Product of Hilbert symbols (a_j, a_k) over j < k.
    pub fn hasse_invariant(&self) -> Result<i8> {
        let mut eps = 1i8;
        for j in 0..self.coeffs.len() {
            for k in j + 1..self.coeffs.len() {
                eps *= hilbert_symbol(&self.ctx, &self.coeffs[j], &self.coeffs[k])?;
            }
        }
        Ok(eps)
    }

    /// Forms over Q_p are equivalent iff rank, discriminant class and Hasse
    /// invariant all agree.
    pub fn equivalent(&self, other: &DiagonalForm) -> Result<bool> {
        if self.ctx.p() != other.ctx.p() {
            return Err(Error::ContextMismatch);
        }
        Ok(self.rank() == other.rank()
            && self.discriminant_class()? == other.discriminant_class()?
            && self.hasse_invariant()? == other.hasse_invariant()?)
    }

    /// Isotropy (a nontrivial zero) from the rank-stratified criteria.
    pub fn represents_zero(&self) -> Result<bool> {
        let d = self.discriminant();
        match self.rank() {
            1 => Ok(false),
            2 => {
                // isotropic iff -d is a square
                d.neg().is_square()
            }
            3 => {
                let minus_one = self.ctx.from_i64(-1);
                let target = hilbert_symbol(&self.ctx, &minus_one, &d.neg())?;
                Ok(self.hasse_invariant()? == target)
            }
            4 => {
                let d_trivial = square_class(&self.ctx, &d)?.is_trivial();
                if !d_trivial {
                    Ok(true)
                } else {
                    let minus_one = self.ctx.from_i64(-1);
                    let target = hilbert_symbol(&self.ctx, &minus_one, &minus_one)?;
                    Ok(self.hasse_invariant()? == target)
                }
            }
            _ => Ok(true),
        }
    }

    /// Whether the form takes the nonzero value c. Equivalent to the rank
    /// n + 1 form Q - c x^2 being isotropic.
    pub fn represents(&self, c: &PadicNumber) -> Result<bool> {
        if c.is_zero() {
            return Err(Error::UndefinedOnZero);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.push(c.neg());
        DiagonalForm {
            ctx: self.ctx,
            coeffs,
        }
        .represents_zero()
    }

    /// Definite = anisotropic: only the zero vector maps to zero.
    pub fn is_definite(&self) -> Result<bool> {
        Ok(!self.represents_zero()?)
    }

    pub fn evaluate(&self, x: &[PadicNumber]) -> Result<PadicNumber> {
        if x.len() != self.rank() {
            return Err(Error::DimensionMismatch);
        }
        let mut acc = self.ctx.zero();
        for (a, xi) in self.coeffs.iter().zip(x) {
            acc = acc.add_lossy(&a.mul(&xi.square()));
        }
        Ok(acc)
    }

    /// Associated bilinear pairing sum a_i x_i y_i; b(x, x) = Q(x).
    pub fn bilinear(&self, x: &[PadicNumber], y: &[PadicNumber]) -> Result<PadicNumber> {
        if x.len() != self.rank() || y.len() != self.rank() {
            return Err(Error::DimensionMismatch);
        }
        let mut acc = self.ctx.zero();
        for i in 0..self.rank() {
            acc = acc.add_lossy(&self.coeffs[i].mul(&x[i]).mul(&y[i]));
        }
        Ok(acc)
    }
}

/// The canonical definite ternary form: x^2 - v y^2 + p z^2 for odd p
/// (v = -1 or -u according to p mod 4), x^2 + y^2 + z^2 for p = 2.
pub fn definite_ternary(ctx: &PadicContext) -> DiagonalForm {
    if ctx.p() == 2 {
        DiagonalForm::from_i64(*ctx, &[1, 1, 1]).unwrap()
    } else {
        DiagonalForm::from_i64(*ctx, &[1, -ctx.v(), ctx.p() as i64]).unwrap()
    }
}

/// Coefficient alpha of the definite binary form x^2 + alpha y^2 whose
/// discriminant lies in the class kappa. Fails when kappa is the class of
/// -1, where the form is isotropic.
pub fn binary_alpha(ctx: &PadicContext, kappa: &SquareClass) -> Result<PadicNumber> {
    let alpha = kappa.representative(ctx);
    if alpha.neg().is_square()? {
        return Err(Error::NotDefinite);
    }
    Ok(alpha)
}

/// Definite binary form of discriminant class kappa.
pub fn definite_binary(ctx: &PadicContext, kappa: &SquareClass) -> Result<DiagonalForm> {
    let alpha = binary_alpha(ctx, kappa)?;
    DiagonalForm::new(*ctx, vec![ctx.one(), alpha])
}

/// The discriminant classes indexing definite binary forms: every class
/// except that of -1. Three for odd p, seven for p = 2.
pub fn definite_binary_classes(ctx: &PadicContext) -> Vec<SquareClass> {
    SquareClass::all(ctx.p())
        .into_iter()
        .filter(|k| binary_alpha(ctx, k).is_ok())
        .collect()
}

/// Canonical representative of the equivalence class with the given rank,
/// discriminant class and Hasse invariant, as a diagonal form with
/// square-class-representative coefficients. Errors when no form carries
/// that invariant combination.
pub fn classify(
    ctx: &PadicContext,
    rank: usize,
    d: &SquareClass,
    eps: i8,
) -> Result<DiagonalForm> {
    if rank == 0 {
        return Err(Error::DimensionMismatch);
    }
    let classes = SquareClass::all(ctx.p());
    let m = classes.len();
    let free = rank - 1;
    // search coefficient classes lexicographically; the last coefficient is
    // forced by the discriminant (square classes are 2-torsion)
    for idx in 0..m.pow(free as u32) {
        let mut rem = idx;
        let mut acc = SquareClass::trivial_for(ctx.p());
        let mut coeffs: Vec<PadicNumber> = Vec::with_capacity(rank);
        for _ in 0..free {
            let c = classes[rem % m];
            rem /= m;
            acc = acc.mul(&c);
            coeffs.push(c.representative(ctx));
        }
        coeffs.push(d.mul(&acc).representative(ctx));
        let form = DiagonalForm::new(*ctx, coeffs)?;
        if form.hasse_invariant()? == eps {
            return Ok(form);
        }
    }
    Err(Error::NoSuchForm)
}

/// A basis (g, h) of the plane orthogonal to n under the bilinear pairing of
/// a definite ternary form, itself pairwise orthogonal.
pub fn orthogonal_complement_basis(
    form: &DiagonalForm,
    n: &[PadicNumber; 3],
) -> Result<([PadicNumber; 3], [PadicNumber; 3])> {
    let ctx = form.ctx();
    if n.iter().all(|c| ctx.is_zero_at_tolerance(c)) {
        return Err(Error::ZeroVector);
    }
    let qn = form.evaluate(n)?;
    if qn.is_zero() {
        return Err(Error::NotDefinite);
    }
    // project the standard basis vectors onto n^perp and keep the two whose
    // pairing with n is smallest (the most transverse pair)
    let mut pairings: Vec<(usize, Option<i64>)> = (0..3)
        .map(|i| (i, form.coeff(i).mul(&n[i]).valuation()))
        .collect();
    pairings.sort_by_key(|(_, v)| v.unwrap_or(i64::MAX));
    let drop = pairings[0].0; // largest contribution: this axis is closest to n
    let kept: Vec<usize> = (0..3).filter(|&i| i != drop).collect();
    let mut basis: Vec<[PadicNumber; 3]> = Vec::new();
    for &j in &kept {
        let mut e = [ctx.zero(), ctx.zero(), ctx.zero()];
        e[j] = ctx.one();
        let coef = form.bilinear(&e, n)?.div(&qn)?;
        let mut v = e;
        for i in 0..3 {
            v[i] = v[i].sub_lossy(&coef.mul(&n[i]));
        }
        basis.push(v);
    }
    let g = basis.remove(0);
    let mut h = basis.remove(0);
    let qg = form.evaluate(&g)?;
    if qg.is_zero() {
        return Err(Error::NotDefinite);
    }
    let coef = form.bilinear(&g, &h)?.div(&qg)?;
    for i in 0..3 {
        h[i] = h[i].sub_lossy(&coef.mul(&g[i]));
    }
    Ok((g, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PadicContext {
        PadicContext::with_default_precision(p).unwrap()
    }

    #[test]
    fn hyperbolic_plane_is_isotropic() {
        for p in [2u64, 3, 5, 13] {
            let c = ctx(p);
            let h = DiagonalForm::from_i64(c, &[1, -1]).unwrap();
            assert!(h.represents_zero().unwrap());
            assert!(!h.is_definite().unwrap());
        }
    }

    #[test]
    fn definite_ternary_is_anisotropic() {
        for p in [2u64, 3, 5, 7, 13] {
            let c = ctx(p);
            let q = definite_ternary(&c);
            assert!(q.is_definite().unwrap(), "p = {p}");
        }
    }

    #[test]
    fn ternary_with_fourth_variable_is_isotropic_for_rank_five() {
        let c = ctx(3);
        let q = DiagonalForm::from_i64(c, &[1, 1, 3, 3, 2]).unwrap();
        assert!(q.represents_zero().unwrap());
    }

    #[test]
    fn definite_binary_classes_count() {
        for p in [3u64, 5, 7, 13] {
            let c = ctx(p);
            assert_eq!(definite_binary_classes(&c).len(), 3, "p = {p}");
        }
        let c2 = ctx(2);
        assert_eq!(definite_binary_classes(&c2).len(), 7);
    }

    #[test]
    fn definite_binary_forms_are_definite_and_inequivalent() {
        for p in [2u64, 3, 5, 13] {
            let c = ctx(p);
            let classes = definite_binary_classes(&c);
            let forms: Vec<DiagonalForm> = classes
                .iter()
                .map(|k| definite_binary(&c, k).unwrap())
                .collect();
            for (i, f) in forms.iter().enumerate() {
                assert!(f.is_definite().unwrap());
                for g in &forms[..i] {
                    assert!(!f.equivalent(g).unwrap());
                }
            }
        }
    }

    #[test]
    fn equivalence_is_invariant_under_square_scaling() {
        let c = ctx(5);
        let f = DiagonalForm::from_i64(c, &[2, 5, 3]).unwrap();
        let g = DiagonalForm::from_i64(c, &[2 * 9, 5 * 4, 3 * 49]).unwrap();
        assert!(f.equivalent(&g).unwrap());
    }

    #[test]
    fn classify_recovers_invariants() {
        for p in [3u64, 5, 2] {
            let c = ctx(p);
            for rank in 1..=4usize {
                for d in SquareClass::all(p) {
                    for eps in [1i8, -1] {
                        if let Ok(f) = classify(&c, rank, &d, eps) {
                            assert_eq!(f.rank(), rank);
                            assert_eq!(f.discriminant_class().unwrap(), d);
                            assert_eq!(f.hasse_invariant().unwrap(), eps);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn binary_classification_table_size() {
        // binary forms: 7 classes over Q_p (p odd), 15 over Q_2
        for p in [3u64, 5, 13] {
            let c = ctx(p);
            let n = SquareClass::all(p)
                .iter()
                .flat_map(|d| [1i8, -1].map(|e| (d.clone(), e)))
                .filter(|(d, e)| classify(&c, 2, d, *e).is_ok())
                .count();
            assert_eq!(n, 7, "p = {p}");
        }
        let c2 = ctx(2);
        let n = SquareClass::all(2)
            .iter()
            .flat_map(|d| [1i8, -1].map(|e| (d.clone(), e)))
            .filter(|(d, e)| classify(&c2, 2, d, *e).is_ok())
            .count();
        assert_eq!(n, 15);
    }

    #[test]
    fn impossible_binary_combination_rejected() {
        // d in the class of -1 forces Hasse invariant +1 in rank 2
        let c = ctx(5);
        let minus_one = square_class(&c, &c.from_i64(-1)).unwrap();
        assert!(classify(&c, 2, &minus_one, -1).is_err());
        let c2 = ctx(2);
        let m1 = square_class(&c2, &c2.from_i64(-1)).unwrap();
        assert!(classify(&c2, 2, &m1, -1).is_err());
    }

    #[test]
    fn represents_detects_values() {
        let c = ctx(3);
        let q = definite_ternary(&c);
        // Q(1,0,0) = 1, Q(0,1,0) = 1 (v = -1 at p = 3), Q(0,0,1) = 3
        assert!(q.represents(&c.one()).unwrap());
        assert!(q.represents(&c.from_i64(3)).unwrap());
        // a definite ternary misses exactly one square class
        let missed: Vec<SquareClass> = SquareClass::all(3)
            .into_iter()
            .filter(|k| !q.represents(&k.representative(&c)).unwrap())
            .collect();
        assert_eq!(missed.len(), 1);
    }

    #[test]
    fn complement_basis_is_orthogonal() {
        for p in [3u64, 5, 13, 2] {
            let c = ctx(p);
            let q = definite_ternary(&c);
            for n in [[1i64, 0, 0], [0, 1, 0], [0, 0, 1], [1, 2, 3], [0, 1, 1], [4, 0, 9]] {
                let nv = [c.from_i64(n[0]), c.from_i64(n[1]), c.from_i64(n[2])];
                let (g, h) = orthogonal_complement_basis(&q, &nv).unwrap();
                for w in [&g, &h] {
                    let pair = q.bilinear(w, &nv).unwrap();
                    assert!(c.is_zero_at_tolerance(&pair), "p = {p}, n = {n:?}");
                }
                let gh = q.bilinear(&g, &h).unwrap();
                assert!(c.is_zero_at_tolerance(&gh), "p = {p}, n = {n:?}");
                assert!(!q.evaluate(&g).unwrap().is_zero());
                assert!(!q.evaluate(&h).unwrap().is_zero());
            }
        }
    }
}
