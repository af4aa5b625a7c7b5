//! Reduction of rotations modulo p^k and enumeration of the resulting finite
//! matrix groups.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::decompose::two_adic_counterexample;
use crate::error::{Error, Result};
use crate::padic::{PadicContext, SquareClass};
use crate::so2::{Mat2, So2Group, So2Point};
use crate::so3::{Axis, Mat3, So3Group};

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// A 3x3 matrix with entries in Z / p^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModularMatrix {
    pub p: u64,
    pub k: u32,
    pub entries: [[u64; 3]; 3],
}

impl ModularMatrix {
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn identity(p: u64, k: u32) -> ModularMatrix {
        let mut entries = [[0u64; 3]; 3];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = 1;
        }
        ModularMatrix { p, k, entries }
    }

    pub fn mul(&self, rhs: &ModularMatrix) -> ModularMatrix {
        debug_assert_eq!((self.p, self.k), (rhs.p, rhs.k));
        let m = self.modulus() as u128;
        let mut entries = [[0u64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0u128;
                for l in 0..3 {
                    acc = (acc + self.entries[i][l] as u128 * rhs.entries[l][j] as u128) % m;
                }
                entries[i][j] = acc as u64;
            }
        }
        ModularMatrix {
            p: self.p,
            k: self.k,
            entries,
        }
    }

    pub fn det(&self) -> u64 {
        let m = self.modulus() as i128;
        let e = |i: usize, j: usize| self.entries[i][j] as i128;
        let d = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
            - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
        d.rem_euclid(m) as u64
    }
}

/// A 2x2 matrix with entries in Z / p^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModularMatrix2 {
    pub p: u64,
    pub k: u32,
    pub entries: [[u64; 2]; 2],
}

impl ModularMatrix2 {
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn identity(p: u64, k: u32) -> ModularMatrix2 {
        let m = p.pow(k);
        let one = 1 % m;
        ModularMatrix2 {
            p,
            k,
            entries: [[one, 0], [0, one]],
        }
    }

    pub fn mul(&self, rhs: &ModularMatrix2) -> ModularMatrix2 {
        debug_assert_eq!((self.p, self.k), (rhs.p, rhs.k));
        let m = self.modulus() as u128;
        let mut entries = [[0u64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0u128;
                for l in 0..2 {
                    acc = (acc + self.entries[i][l] as u128 * rhs.entries[l][j] as u128) % m;
                }
                entries[i][j] = acc as u64;
            }
        }
        ModularMatrix2 {
            p: self.p,
            k: self.k,
            entries,
        }
    }

    pub fn det(&self) -> u64 {
        let m = self.modulus() as i128;
        let e = |i: usize, j: usize| self.entries[i][j] as i128;
        (e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0)).rem_euclid(m) as u64
    }
}

/// Summary of an enumerated finite quotient group.
#[derive(Debug, Clone, Serialize)]
pub struct FiniteGroupReport {
    pub order: usize,
    pub closed: bool,
    pub generators_used: String,
    /// Largest element order found; equal to the group order exactly when
    /// the quotient is cyclic. Reported for circle quotients only.
    pub max_element_order: Option<usize>,
}

/// Entrywise reduction mod p^k. A group homomorphism on members: their
/// entries are p-adic integers.
pub fn project(m: &Mat3, ctx: &PadicContext, k: u32) -> Result<ModularMatrix> {
    let mut entries = [[0u64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            entries[i][j] = m[i][j].integer_residue(k)?;
        }
    }
    Ok(ModularMatrix {
        p: ctx.p(),
        k,
        entries,
    })
}

/// Entrywise reduction of a circle rotation mod p^k.
pub fn project2(m: &Mat2, ctx: &PadicContext, k: u32) -> Result<ModularMatrix2> {
    let mut entries = [[0u64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            entries[i][j] = m[i][j].integer_residue(k)?;
        }
    }
    Ok(ModularMatrix2 {
        p: ctx.p(),
        k,
        entries,
    })
}

fn max_element_order(set: &BTreeSet<ModularMatrix2>) -> usize {
    let order = set.len();
    let mut best = 1;
    for m in set {
        let id = ModularMatrix2::identity(m.p, m.k);
        let mut acc = *m;
        let mut n = 1;
        while acc != id && n <= order {
            acc = acc.mul(m);
            n += 1;
        }
        best = best.max(n.min(order));
    }
    best
}

/// The image of the circle group of class `kappa` mod p^k: both parameter
/// branches are reduced and deduplicated, closure under the modular
/// product is verified, and the largest element order is recorded as
/// procyclicity evidence.
pub fn enumerate_so2_mod(
    ctx: &PadicContext,
    kappa: SquareClass,
    k: u32,
    mut budget: usize,
) -> Result<(FiniteGroupReport, BTreeSet<ModularMatrix2>)> {
    let p = ctx.p();
    if k == 0 {
        let mut set = BTreeSet::new();
        set.insert(ModularMatrix2::identity(p, 0));
        return Ok((
            FiniteGroupReport {
                order: 1,
                closed: true,
                generators_used: "trivial quotient".to_string(),
                max_element_order: Some(1),
            },
            set,
        ));
    }
    let circle = So2Group::new(*ctx, kappa)?;
    // lower digits of the parameter influence higher digits of the entries
    // over Q_2, where 1 + alpha sigma^2 can be even
    let margin = if p == 2 { k + 2 } else { k };
    let count = p
        .checked_pow(margin)
        .filter(|c| (*c as usize) <= budget)
        .ok_or(Error::BudgetExceeded)?;
    let mut set = BTreeSet::new();
    for r in 0..count {
        if budget < 2 {
            return Err(Error::BudgetExceeded);
        }
        budget -= 2;
        let sigma = So2Point::Finite(ctx.from_i64(r as i64));
        let flipped = circle.switch_sign(&sigma)?;
        for point in [sigma, flipped] {
            // rotations with non-integral entries have no reduction mod p^k;
            // the integral ones form a subgroup, whose image we take
            match project2(&circle.matrix(&point)?, ctx, k) {
                Ok(m) => {
                    set.insert(m);
                }
                Err(Error::NotIntegral) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    let mut closed = true;
    'outer: for a in &set {
        for b in &set {
            if budget == 0 {
                return Err(Error::BudgetExceeded);
            }
            budget -= 1;
            if !set.contains(&a.mul(b)) {
                closed = false;
                break 'outer;
            }
        }
    }
    let report = FiniteGroupReport {
        order: set.len(),
        closed,
        generators_used: format!("both rotation branches, parameters mod {p}^{margin}"),
        max_element_order: Some(max_element_order(&set)),
    };
    Ok((report, set))
}

/// Projections of every rotation about `axis`, both branches. Parameters are
/// enumerated modulo p^k (p^(k+2) for p = 2, where division by the even part
/// of 1 + sigma^2 lets lower digits of sigma reach higher digits of the
/// entries).
fn axis_projections(
    g: &So3Group,
    axis: Axis,
    k: u32,
    budget: &mut usize,
) -> Result<BTreeSet<ModularMatrix>> {
    let ctx = *g.ctx();
    let margin = if ctx.p() == 2 { k + 2 } else { k };
    let count = ctx.p().pow(margin);
    let circle = g.axis_circle(axis);
    let mut out = BTreeSet::new();
    for r in 0..count {
        if *budget < 2 {
            return Err(Error::BudgetExceeded);
        }
        *budget -= 2;
        let sigma = So2Point::Finite(ctx.from_i64(r as i64));
        let flipped = circle.switch_sign(&sigma)?;
        for point in [sigma, flipped] {
            let rot = g.reference_rotation(axis, &point)?;
            out.insert(project(&rot, &ctx, k)?);
        }
    }
    Ok(out)
}

/// The image of the group mod p^k as the set of products of three axis
/// rotation projections in the zyx order. Only valid where that order is
/// always feasible: odd p.
pub fn enumerate_products(g: &So3Group, k: u32, mut budget: usize) -> Result<BTreeSet<ModularMatrix>> {
    if g.ctx().p() == 2 {
        return Err(Error::UnsupportedPrime(
            "the three-factor product enumeration misses elements over Q_2; use the closure",
        ));
    }
    let z = axis_projections(g, Axis::Z, k, &mut budget)?;
    let y = axis_projections(g, Axis::Y, k, &mut budget)?;
    let x = axis_projections(g, Axis::X, k, &mut budget)?;
    let mut out = BTreeSet::new();
    for a in &z {
        for b in &y {
            let ab = a.mul(b);
            for c in &x {
                if budget == 0 {
                    return Err(Error::BudgetExceeded);
                }
                budget -= 1;
                out.insert(ab.mul(c));
            }
        }
    }
    Ok(out)
}

/// The subgroup of matrices mod p^k generated by the axis rotation
/// projections (closed under multiplication). Over Q_2 the fixed
/// counterexample element is seeded in as well, since not every member is a
/// bounded product of axis rotations there.
pub fn enumerate_closure(g: &So3Group, k: u32, mut budget: usize) -> Result<BTreeSet<ModularMatrix>> {
    let ctx = *g.ctx();
    let mut gens: Vec<ModularMatrix> = Vec::new();
    for axis in [Axis::Z, Axis::Y, Axis::X] {
        gens.extend(axis_projections(g, axis, k, &mut budget)?);
    }
    if ctx.p() == 2 {
        gens.push(project(&two_adic_counterexample(&ctx)?, &ctx, k)?);
    }
    let mut seen: BTreeSet<ModularMatrix> = gens.iter().copied().collect();
    seen.insert(ModularMatrix::identity(ctx.p(), k));
    let mut frontier: Vec<ModularMatrix> = seen.iter().copied().collect();
    while let Some(m) = frontier.pop() {
        for gen in &gens {
            if budget == 0 {
                return Err(Error::BudgetExceeded);
            }
            budget -= 1;
            let next = m.mul(gen);
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    Ok(seen)
}
