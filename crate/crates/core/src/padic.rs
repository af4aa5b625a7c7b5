//! Exact fixed-precision arithmetic in Q_p: valuations, Hensel square roots,
//! square classes and the Hilbert symbol.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero as NumZero};
use std::fmt;

use crate::error::{Error, Result};

/// Working parameters for computations in Q_p.
///
/// `precision` is the number of significant base-p digits carried by exact
/// inputs; `guard` is the comparison slack. Two values are considered equal
/// when they agree on all mutually known digits and share at least
/// `precision - guard` of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicContext {
    p: u64,
    precision: u32,
    guard: u32,
    /// Smallest positive quadratic non-residue mod p (odd p only; 0 for p=2).
    u: u64,
}

pub const DEFAULT_PRECISION: u32 = 48;
pub const DEFAULT_GUARD: u32 = 8;

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PadicContext {
    pub fn new(p: u64, precision: u32, guard: u32) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("{p} is not prime"),
            });
        }
        if guard < 1 || precision <= 2 * guard {
            return Err(Error::Parse {
                pos: 0,
                msg: "context requires precision > 2 * guard >= 2".into(),
            });
        }
        let u = if p == 2 {
            0
        } else {
            (2..p)
                .find(|&c| !legendre_is_square(c % p, p))
                .expect("every odd prime has a non-residue")
        };
        Ok(PadicContext {
            p,
            precision,
            guard,
            u,
        })
    }

    pub fn with_default_precision(p: u64) -> Result<Self> {
        Self::new(p, DEFAULT_PRECISION, DEFAULT_GUARD)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn precision(&self) -> u32 {
        self.precision
    }
    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// The canonical non-square unit u of Z_p (odd p).
    pub fn unit_nonsquare(&self) -> u64 {
        debug_assert!(self.p != 2);
        self.u
    }

    /// The sign constant v: -1 for p = 3 mod 4, -u for p = 1 mod 4.
    pub fn v(&self) -> i64 {
        debug_assert!(self.p != 2);
        if self.p % 4 == 3 {
            -1
        } else {
            -(self.u as i64)
        }
    }

    pub fn zero(&self) -> PadicNumber {
        PadicNumber {
            p: self.p,
            repr: Repr::Zero,
        }
    }

    pub fn one(&self) -> PadicNumber {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> PadicNumber {
        if n == 0 {
            return self.zero();
        }
        let neg = n < 0;
        let mag = BigUint::from(n.unsigned_abs());
        self.from_parts_raw(0, mag, neg, self.precision)
    }

    pub fn from_bigint(&self, n: &BigInt) -> PadicNumber {
        if n.is_zero() {
            return self.zero();
        }
        self.from_parts_raw(0, n.magnitude().clone(), n.is_negative(), self.precision)
    }

    /// Exact rational a/b, both nonzero-checked.
    pub fn from_ratio(&self, a: i64, b: i64) -> Result<PadicNumber> {
        let num = self.from_i64(a);
        let den = self.from_i64(b);
        num.div(&den)
    }

    /// Build p^val * unit with `prec` known digits; `mag` is reduced mod p^prec
    /// after stripping powers of p, `neg` negates modulo p^prec.
    fn from_parts_raw(&self, val: i64, mag: BigUint, neg: bool, prec: u32) -> PadicNumber {
        let p = BigUint::from(self.p);
        let mut mag = mag;
        let mut val = val;
        while (&mag % &p).is_zero() {
            mag /= &p;
            val += 1;
        }
        let modulus = p.pow(prec);
        let mut unit = mag % &modulus;
        if neg && !unit.is_zero() {
            unit = &modulus - unit;
        }
        PadicNumber {
            p: self.p,
            repr: Repr::Unit { val, unit, prec },
        }
    }

    /// Equality at context tolerance: all mutually known digits agree, with at
    /// least `precision - guard` of them shared.
    pub fn eq(&self, a: &PadicNumber, b: &PadicNumber) -> bool {
        matches!(a.compare(b, self.precision - self.guard), Comparison::Equal)
    }

    /// Weaker agreement: all mutually known digits match and at least `guard`
    /// of them are shared. Appropriate after chains of operations that each
    /// consume precision, where `eq`'s full threshold can no longer be met.
    pub fn agrees(&self, a: &PadicNumber, b: &PadicNumber) -> bool {
        matches!(a.compare(b, self.guard), Comparison::Equal)
    }

    /// Treats `x` as zero when it is exact zero or its valuation exceeds the
    /// comparison horizon (known absolute precision minus guard).
    pub fn is_zero_at_tolerance(&self, x: &PadicNumber) -> bool {
        match &x.repr {
            Repr::Zero => true,
            Repr::Unit { val, .. } => *val >= (self.precision - self.guard) as i64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Zero,
    Unit {
        /// p-adic valuation.
        val: i64,
        /// Unit part reduced mod p^prec; never divisible by p.
        unit: BigUint,
        /// Number of known significant digits (>= 1).
        prec: u32,
    },
}

/// An element of Q_p in scaled-unit form: p^val * unit, with a tracked number
/// of known significant digits. Exact zero is a distinct tagged value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicNumber {
    p: u64,
    repr: Repr,
}

/// Three-way outcome of a precision-aware comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    NotEqual,
    /// The values agree on all shared digits but too few are shared.
    Incomparable,
}

impl PadicNumber {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// Valuation; None encodes +infinity (exact zero).
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Unit { val, .. } => Some(*val),
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Unit { prec, .. } => Some(*prec),
        }
    }

    /// Known digits of the unit part, little-endian base p.
    pub fn unit_digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Zero => vec![],
            Repr::Unit { unit, prec, .. } => {
                let p = BigUint::from(self.p);
                let mut digits = Vec::with_capacity(*prec as usize);
                let mut rest = unit.clone();
                for _ in 0..*prec {
                    let (q, r) = rest.div_rem(&p);
                    digits.push(r.to_u64().unwrap());
                    rest = q;
                }
                digits
            }
        }
    }

    fn check_ctx(&self, rhs: &PadicNumber) -> Result<()> {
        if self.p != rhs.p {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    fn add_impl(&self, rhs: &PadicNumber, sub: bool, lossy: bool) -> Result<PadicNumber> {
        self.check_ctx(rhs)?;
        let p_big = BigUint::from(self.p);
        match (&self.repr, &rhs.repr) {
            (Repr::Zero, Repr::Zero) => Ok(self.clone()),
            (Repr::Zero, Repr::Unit { .. }) => Ok(if sub { rhs.neg() } else { rhs.clone() }),
            (Repr::Unit { .. }, Repr::Zero) => Ok(self.clone()),
            (
                Repr::Unit {
                    val: va,
                    unit: ua,
                    prec: ka,
                },
                Repr::Unit {
                    val: vb,
                    unit: ub,
                    prec: kb,
                },
            ) => {
                let base = (*va).min(*vb);
                let abs = (va + *ka as i64).min(vb + *kb as i64);
                let k = (abs - base) as u32; // >= 1 since abs > min(va, vb)
                let modulus = p_big.pow(k);
                let ta = (ua % &modulus) * p_big.pow((va - base) as u32) % &modulus;
                let tb = (ub % &modulus) * p_big.pow((vb - base) as u32) % &modulus;
                let m = if sub {
                    (&modulus + ta - tb) % &modulus
                } else {
                    (ta + tb) % &modulus
                };
                if m.is_zero() {
                    return if lossy {
                        Ok(PadicNumber {
                            p: self.p,
                            repr: Repr::Zero,
                        })
                    } else {
                        Err(Error::PrecisionExhausted)
                    };
                }
                // strip cancelled leading digits
                let mut t = 0u32;
                let mut unit = m;
                while (&unit % &p_big).is_zero() {
                    unit /= &p_big;
                    t += 1;
                }
                let prec = k - t;
                Ok(PadicNumber {
                    p: self.p,
                    repr: Repr::Unit {
                        val: base + t as i64,
                        unit,
                        prec,
                    },
                })
            }
        }
    }

    /// Sum; full cancellation of all known digits is a PrecisionExhausted error.
    pub fn add(&self, rhs: &PadicNumber) -> Result<PadicNumber> {
        self.add_impl(rhs, false, false)
    }

    pub fn sub(&self, rhs: &PadicNumber) -> Result<PadicNumber> {
        self.add_impl(rhs, true, false)
    }

    /// Sum that collapses full cancellation to exact zero. Used by linear
    /// algebra where entries legitimately vanish (e.g. off-diagonal terms of
    /// M^T A M); the comparison guard absorbs the unknown tail.
    pub fn add_lossy(&self, rhs: &PadicNumber) -> PadicNumber {
        self.add_impl(rhs, false, true).expect("lossy add cannot fail")
    }

    pub fn sub_lossy(&self, rhs: &PadicNumber) -> PadicNumber {
        self.add_impl(rhs, true, true).expect("lossy sub cannot fail")
    }

    pub fn neg(&self) -> PadicNumber {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Unit { val, unit, prec } => {
                let modulus = BigUint::from(self.p).pow(*prec);
                PadicNumber {
                    p: self.p,
                    repr: Repr::Unit {
                        val: *val,
                        unit: &modulus - unit,
                        prec: *prec,
                    },
                }
            }
        }
    }

    pub fn mul(&self, rhs: &PadicNumber) -> PadicNumber {
        assert_eq!(self.p, rhs.p, "context mismatch");
        match (&self.repr, &rhs.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => PadicNumber {
                p: self.p,
                repr: Repr::Zero,
            },
            (
                Repr::Unit {
                    val: va,
                    unit: ua,
                    prec: ka,
                },
                Repr::Unit {
                    val: vb,
                    unit: ub,
                    prec: kb,
                },
            ) => {
                let prec = (*ka).min(*kb);
                let modulus = BigUint::from(self.p).pow(prec);
                PadicNumber {
                    p: self.p,
                    repr: Repr::Unit {
                        val: va + vb,
                        unit: ua * ub % &modulus,
                        prec,
                    },
                }
            }
        }
    }

    pub fn div(&self, rhs: &PadicNumber) -> Result<PadicNumber> {
        self.check_ctx(rhs)?;
        match (&self.repr, &rhs.repr) {
            (_, Repr::Zero) => Err(Error::DivideByZero),
            (Repr::Zero, _) => Ok(self.clone()),
            (
                Repr::Unit {
                    val: va,
                    unit: ua,
                    prec: ka,
                },
                Repr::Unit {
                    val: vb,
                    unit: ub,
                    prec: kb,
                },
            ) => {
                let prec = (*ka).min(*kb);
                let modulus = BigUint::from(self.p).pow(prec);
                let inv = mod_inverse(ub, self.p, prec);
                Ok(PadicNumber {
                    p: self.p,
                    repr: Repr::Unit {
                        val: va - vb,
                        unit: ua * inv % &modulus,
                        prec,
                    },
                })
            }
        }
    }

    pub fn inv(&self) -> Result<PadicNumber> {
        match &self.repr {
            Repr::Zero => Err(Error::DivideByZero),
            Repr::Unit { val, unit, prec } => Ok(PadicNumber {
                p: self.p,
                repr: Repr::Unit {
                    val: -val,
                    unit: mod_inverse(unit, self.p, *prec),
                    prec: *prec,
                },
            }),
        }
    }

    pub fn square(&self) -> PadicNumber {
        self.mul(self)
    }

    /// Multiply by p^k (exact valuation shift).
    pub fn shift(&self, k: i64) -> PadicNumber {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Unit { val, unit, prec } => PadicNumber {
                p: self.p,
                repr: Repr::Unit {
                    val: val + k,
                    unit: unit.clone(),
                    prec: *prec,
                },
            },
        }
    }

    /// Digitwise comparison with a minimum shared-digit requirement.
    pub fn compare(&self, rhs: &PadicNumber, min_shared: u32) -> Comparison {
        if self.p != rhs.p {
            return Comparison::NotEqual;
        }
        match (&self.repr, &rhs.repr) {
            (Repr::Zero, Repr::Zero) => Comparison::Equal,
            // a known-nonzero leading digit distinguishes from exact zero
            (Repr::Zero, Repr::Unit { .. }) | (Repr::Unit { .. }, Repr::Zero) => {
                Comparison::NotEqual
            }
            (
                Repr::Unit {
                    val: va,
                    unit: ua,
                    prec: ka,
                },
                Repr::Unit {
                    val: vb,
                    unit: ub,
                    prec: kb,
                },
            ) => {
                if va != vb {
                    return Comparison::NotEqual;
                }
                let shared = (*ka).min(*kb);
                let modulus = BigUint::from(self.p).pow(shared);
                if ua % &modulus != ub % &modulus {
                    Comparison::NotEqual
                } else if shared >= min_shared {
                    Comparison::Equal
                } else {
                    Comparison::Incomparable
                }
            }
        }
    }

    /// True iff x is a nonzero square in Q_p*: even valuation and the unit is
    /// a quadratic residue mod p (odd p) resp. = 1 mod 8 (p = 2).
    pub fn is_square(&self) -> Result<bool> {
        match &self.repr {
            Repr::Zero => Err(Error::UndefinedOnZero),
            Repr::Unit { val, unit, prec } => {
                if val % 2 != 0 {
                    return Ok(false);
                }
                if self.p == 2 {
                    if *prec < 3 {
                        return Err(Error::PrecisionExhausted);
                    }
                    Ok((unit % 8u32).to_u64().unwrap() == 1)
                } else {
                    let r = (unit % self.p).to_u64().unwrap();
                    Ok(legendre_is_square(r, self.p))
                }
            }
        }
    }

    /// Canonical square root of a square. For odd p the root whose leading
    /// digit is the smaller residue root in [1, p-1]; for p = 2 the root
    /// congruent to 1 mod 4.
    pub fn sqrt(&self) -> Result<PadicNumber> {
        match &self.repr {
            Repr::Zero => Err(Error::UndefinedOnZero),
            Repr::Unit { val, unit, prec } => {
                if !self.is_square()? {
                    return Err(Error::NotASquare);
                }
                let (root, root_prec) = if self.p == 2 {
                    (sqrt_unit_2adic(unit, *prec), prec - 1)
                } else {
                    (sqrt_unit_odd(unit, self.p, *prec), *prec)
                };
                Ok(PadicNumber {
                    p: self.p,
                    repr: Repr::Unit {
                        val: val / 2,
                        unit: root,
                        prec: root_prec,
                    },
                })
            }
        }
    }

    /// Residue class of the unit part mod p^k (requires valuation in [0, ..)).
    pub fn integer_residue(&self, k: u32) -> Result<u64> {
        match &self.repr {
            Repr::Zero => Ok(0),
            Repr::Unit { val, unit, prec } => {
                if *val < 0 {
                    return Err(Error::NotIntegral);
                }
                if *val >= k as i64 {
                    return Ok(0);
                }
                if (*val + *prec as i64) < k as i64 {
                    return Err(Error::PrecisionExhausted);
                }
                let pk = BigUint::from(self.p).pow(k);
                let v = unit * BigUint::from(self.p).pow(*val as u32) % pk;
                Ok(v.to_u64().ok_or(Error::Internal("residue does not fit u64"))?)
            }
        }
    }
}

/// Modular inverse of a unit mod p^k via Newton lifting.
fn mod_inverse(u: &BigUint, p: u64, k: u32) -> BigUint {
    let p_big = BigUint::from(p);
    // inverse mod p
    let r0 = (u % &p_big).to_u64().unwrap();
    let mut inv = BigUint::from(mod_inv_prime(r0, p));
    let mut known = 1u32;
    let two = BigUint::from(2u32);
    while known < k {
        known = (known * 2).min(k);
        let modulus = p_big.pow(known);
        let ux = u % &modulus * &inv % &modulus;
        // inv <- inv * (2 - u*inv)
        let corr = (&modulus + &two - ux) % &modulus;
        inv = inv * corr % &modulus;
    }
    inv
}

fn mod_inv_prime(a: u64, p: u64) -> u64 {
    // Fermat
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut bb: u128 = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % m128;
        }
        bb = bb * bb % m128;
        e >>= 1;
    }
    acc as u64
}

/// True iff a is a nonzero quadratic residue mod odd prime p.
fn legendre_is_square(a: u64, p: u64) -> bool {
    debug_assert!(p % 2 == 1);
    let a = a % p;
    debug_assert!(a != 0);
    mod_pow(a, (p - 1) / 2, p) == 1
}

/// Tonelli-Shanks square root mod odd prime p.
fn tonelli_shanks(n: u64, p: u64) -> u64 {
    let n = n % p;
    if p % 4 == 3 {
        return mod_pow(n, (p + 1) / 4, p);
    }
    // write p - 1 = q * 2^s
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| !legendre_is_square(z, p)).unwrap();
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(n, q, p);
    let mut r = mod_pow(n, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = (tt as u128 * tt as u128 % p as u128) as u64;
            i += 1;
        }
        let b = mod_pow(c, 1 << (m - i - 1), p);
        m = i;
        c = (b as u128 * b as u128 % p as u128) as u64;
        t = (t as u128 * c as u128 % p as u128) as u64;
        r = (r as u128 * b as u128 % p as u128) as u64;
    }
    r
}

/// Square root of a residue unit mod p^k (odd p), canonical branch: the lift
/// of the smaller residue root in [1, p-1]. Newton iteration doubles digits.
fn sqrt_unit_odd(u: &BigUint, p: u64, k: u32) -> BigUint {
    let p_big = BigUint::from(p);
    let r0 = tonelli_shanks((u % &p_big).to_u64().unwrap(), p);
    let r0 = r0.min(p - r0);
    let mut r = BigUint::from(r0);
    let mut known = 1u32;
    while known < k {
        known = (known * 2).min(k);
        let modulus = p_big.pow(known);
        // r <- (r + u / r) / 2
        let inv_r = mod_inverse(&r, p, known);
        let inv_2 = mod_inverse(&BigUint::from(2u32), p, known);
        r = (&r + u % &modulus * inv_r) % &modulus * inv_2 % &modulus;
    }
    r
}

/// Square root of a unit = 1 mod 8 modulo 2^k, branch = 1 mod 4.
/// The root is only determined mod 2^(k-1) by u mod 2^k.
fn sqrt_unit_2adic(u: &BigUint, k: u32) -> BigUint {
    let mut r = BigUint::one();
    for bit in 3..k {
        // maintain r^2 = u mod 2^bit
        let modulus = BigUint::one() << (bit + 1) as usize;
        let diff = (&r * &r + &modulus - u % &modulus) % &modulus;
        if !diff.is_zero() {
            r += BigUint::one() << (bit - 1) as usize;
        }
    }
    r % (BigUint::one() << (k - 1) as usize)
}

/// Element of K = Q_p* / (Q_p*)^2: exponent vector over the generators
/// {u, p} for odd p and {-1, 2, 5} for p = 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SquareClass {
    Odd { u: bool, p: bool },
    Two { minus: bool, two: bool, five: bool },
}

impl SquareClass {
    pub fn trivial_for(p: u64) -> SquareClass {
        if p == 2 {
            SquareClass::Two {
                minus: false,
                two: false,
                five: false,
            }
        } else {
            SquareClass::Odd { u: false, p: false }
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            SquareClass::Odd { u, p } => !u && !p,
            SquareClass::Two { minus, two, five } => !minus && !two && !five,
        }
    }

    pub fn mul(&self, rhs: &SquareClass) -> SquareClass {
        match (self, rhs) {
            (SquareClass::Odd { u: u1, p: p1 }, SquareClass::Odd { u: u2, p: p2 }) => {
                SquareClass::Odd {
                    u: u1 ^ u2,
                    p: p1 ^ p2,
                }
            }
            (
                SquareClass::Two {
                    minus: m1,
                    two: t1,
                    five: f1,
                },
                SquareClass::Two {
                    minus: m2,
                    two: t2,
                    five: f2,
                },
            ) => SquareClass::Two {
                minus: m1 ^ m2,
                two: t1 ^ t2,
                five: f1 ^ f2,
            },
            _ => panic!("square classes of different primes"),
        }
    }

    /// All classes of the group for the given prime.
    pub fn all(p: u64) -> Vec<SquareClass> {
        if p == 2 {
            let mut v = Vec::new();
            for &minus in &[false, true] {
                for &two in &[false, true] {
                    for &five in &[false, true] {
                        v.push(SquareClass::Two { minus, two, five });
                    }
                }
            }
            v
        } else {
            vec![
                SquareClass::Odd { u: false, p: false },
                SquareClass::Odd { u: true, p: false },
                SquareClass::Odd { u: false, p: true },
                SquareClass::Odd { u: true, p: true },
            ]
        }
    }

    /// The canonical small representative: 1/u/p/up resp. +-1, +-2, +-5, +-10.
    pub fn representative(&self, ctx: &PadicContext) -> PadicNumber {
        match self {
            SquareClass::Odd { u, p } => {
                let mut n = 1i64;
                if *u {
                    n *= ctx.unit_nonsquare() as i64;
                }
                if *p {
                    n *= ctx.p() as i64;
                }
                ctx.from_i64(n)
            }
            SquareClass::Two { minus, two, five } => {
                let mut n = 1i64;
                if *minus {
                    n = -n;
                }
                if *two {
                    n *= 2;
                }
                if *five {
                    n *= 5;
                }
                ctx.from_i64(n)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            SquareClass::Odd { u, p } => match (u, p) {
                (false, false) => "1".into(),
                (true, false) => "u".into(),
                (false, true) => "p".into(),
                (true, true) => "up".into(),
            },
            SquareClass::Two { minus, two, five } => {
                let mut n = 1i64;
                if *minus {
                    n = -n;
                }
                if *two {
                    n *= 2;
                }
                if *five {
                    n *= 5;
                }
                format!("{n}")
            }
        }
    }
}

/// Square class of a nonzero x: square_class(x * s^2) = square_class(x).
pub fn square_class(ctx: &PadicContext, x: &PadicNumber) -> Result<SquareClass> {
    match &x.repr {
        Repr::Zero => Err(Error::UndefinedOnZero),
        Repr::Unit { val, unit, prec } => {
            let odd_val = val.rem_euclid(2) == 1;
            if ctx.p() == 2 {
                if *prec < 3 {
                    return Err(Error::PrecisionExhausted);
                }
                let r = (unit % 8u32).to_u64().unwrap();
                // unit classes mod 8: 1 -> 1, 3 -> -5, 5 -> 5, 7 -> -1
                let (minus, five) = match r {
                    1 => (false, false),
                    3 => (true, true),
                    5 => (false, true),
                    7 => (true, false),
                    _ => unreachable!("odd unit mod 8"),
                };
                Ok(SquareClass::Two {
                    minus,
                    two: odd_val,
                    five,
                })
            } else {
                let r = (unit % ctx.p()).to_u64().unwrap();
                Ok(SquareClass::Odd {
                    u: !legendre_is_square(r, ctx.p()),
                    p: odd_val,
                })
            }
        }
    }
}

/// Hilbert symbol (a, b)_p in {+1, -1}: +1 iff z^2 - a x^2 - b y^2 = 0 has a
/// nontrivial solution over Q_p. Computed from valuations and residue symbols
/// via the standard local formulas.
pub fn hilbert_symbol(ctx: &PadicContext, a: &PadicNumber, b: &PadicNumber) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::UndefinedOnZero);
    }
    let (va, ua) = match &a.repr {
        Repr::Unit { val, unit, .. } => (*val, unit),
        _ => unreachable!(),
    };
    let (vb, ub) = match &b.repr {
        Repr::Unit { val, unit, .. } => (*val, unit),
        _ => unreachable!(),
    };
    let alpha = va.rem_euclid(2) as u32;
    let beta = vb.rem_euclid(2) as u32;
    if ctx.p() == 2 {
        if a.precision().unwrap() < 3 || b.precision().unwrap() < 3 {
            return Err(Error::PrecisionExhausted);
        }
        let ra = (ua % 8u32).to_u64().unwrap();
        let rb = (ub % 8u32).to_u64().unwrap();
        let eps = |r: u64| ((r - 1) / 2) % 2; // (r-1)/2 mod 2
        let omega = |r: u64| ((r * r - 1) / 8) % 2; // (r^2-1)/8 mod 2
        let e = eps(ra) * eps(rb) + alpha as u64 * omega(rb) + beta as u64 * omega(ra);
        Ok(if e % 2 == 0 { 1 } else { -1 })
    } else {
        let p = ctx.p();
        let ra = (ua % p).to_u64().unwrap();
        let rb = (ub % p).to_u64().unwrap();
        let mut sign = 1i8;
        if alpha * beta == 1 && p % 4 == 3 {
            sign = -sign; // (-1)^(alpha beta (p-1)/2)
        }
        if beta == 1 && !legendre_is_square(ra, p) {
            sign = -sign;
        }
        if alpha == 1 && !legendre_is_square(rb, p) {
            sign = -sign;
        }
        Ok(sign)
    }
}

/// Both square roots (r, -r) of m^2 = c, lifted to full precision.
pub fn hensel_solve_square(c: &PadicNumber) -> Result<(PadicNumber, PadicNumber)> {
    let r = c.sqrt()?;
    let neg = r.neg();
    Ok((r, neg))
}

// ---------------------------------------------------------------------------
// Literal text format: p^<val> * <d0,d1,...,dk> (O(p^<val+k+1>)); zero is "0".
// ---------------------------------------------------------------------------

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Unit { val, prec, .. } => {
                let digits = self.unit_digits();
                let body = digits
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                write!(
                    f,
                    "{}^{} * {} (O({}^{}))",
                    self.p,
                    val,
                    body,
                    self.p,
                    val + *prec as i64
                )
            }
        }
    }
}

/// Parse the literal format emitted by Display; also accepts plain (signed)
/// integers and a/b fractions for convenience.
pub fn parse_literal(ctx: &PadicContext, s: &str) -> Result<PadicNumber> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty literal".into(),
        });
    }
    if s == "0" {
        return Ok(ctx.zero());
    }
    if let Some(caret) = s.find('^') {
        // full format
        let p_part: u64 = s[..caret].trim().parse().map_err(|_| Error::Parse {
            pos: 0,
            msg: "bad prime prefix".into(),
        })?;
        if p_part != ctx.p() {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("literal prime {} does not match context {}", p_part, ctx.p()),
            });
        }
        let rest = &s[caret + 1..];
        let star = rest.find('*').ok_or(Error::Parse {
            pos: caret,
            msg: "expected '*' after valuation".into(),
        })?;
        let val: i64 = rest[..star].trim().parse().map_err(|_| Error::Parse {
            pos: caret + 1,
            msg: "bad valuation".into(),
        })?;
        let rest = &rest[star + 1..];
        let digits_part = match rest.find('(') {
            Some(i) => &rest[..i],
            None => rest,
        };
        let mut digits = Vec::new();
        for (i, tok) in digits_part.trim().split(',').enumerate() {
            let d: u64 = tok.trim().parse().map_err(|_| Error::Parse {
                pos: i,
                msg: format!("bad digit '{tok}'"),
            })?;
            if d >= ctx.p() {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("digit {d} out of range for p = {}", ctx.p()),
                });
            }
            digits.push(d);
        }
        if digits.is_empty() || digits[0] == 0 {
            return Err(Error::Parse {
                pos: 0,
                msg: "unit digits must start with a nonzero digit".into(),
            });
        }
        let prec = digits.len() as u32;
        let mut unit = BigUint::zero();
        for &d in digits.iter().rev() {
            unit = unit * ctx.p() + d;
        }
        Ok(PadicNumber {
            p: ctx.p(),
            repr: Repr::Unit { val, unit, prec },
        })
    } else if let Some(slash) = s.find('/') {
        let a: i64 = s[..slash].trim().parse().map_err(|_| Error::Parse {
            pos: 0,
            msg: "bad numerator".into(),
        })?;
        let b: i64 = s[slash + 1..].trim().parse().map_err(|_| Error::Parse {
            pos: slash + 1,
            msg: "bad denominator".into(),
        })?;
        if b == 0 {
            return Err(Error::Parse {
                pos: slash + 1,
                msg: "zero denominator".into(),
            });
        }
        ctx.from_ratio(a, b)
    } else {
        let n: i64 = s.parse().map_err(|_| Error::Parse {
            pos: 0,
            msg: format!("cannot parse '{s}' as integer or p-adic literal"),
        })?;
        Ok(ctx.from_i64(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PadicContext {
        PadicContext::with_default_precision(p).unwrap()
    }

    #[test]
    fn addition_carries_across_base() {
        let c = ctx(3);
        let s = c.from_i64(1).add(&c.from_i64(2)).unwrap();
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.unit_digits()[0], 1);
    }

    #[test]
    fn zero_is_absorbing_in_multiplication() {
        let c = ctx(5);
        let x = c.from_i64(7);
        assert!(x.mul(&c.zero()).is_zero());
        assert_eq!(x.mul(&c.zero()).valuation(), None);
    }

    #[test]
    fn inverse_of_p() {
        let c = ctx(3);
        let third = c.from_ratio(1, 3).unwrap();
        let one = third.mul(&c.from_i64(3));
        assert!(c.eq(&one, &c.one()));
        assert_eq!(one.valuation(), Some(0));
    }

    #[test]
    fn valuation_law_and_ultrametric() {
        let c = ctx(7);
        let x = c.from_i64(7 * 7 * 3);
        let y = c.from_i64(7 * 5);
        assert_eq!(x.mul(&y).valuation(), Some(3));
        let s = x.add(&y).unwrap();
        assert_eq!(s.valuation(), Some(1));
    }

    #[test]
    fn full_cancellation_is_precision_exhausted() {
        let c = ctx(5);
        let x = c.from_i64(12);
        assert_eq!(x.sub(&x), Err(Error::PrecisionExhausted));
        assert!(x.sub_lossy(&x).is_zero());
    }

    #[test]
    fn square_detection() {
        let c3 = ctx(3);
        assert!(c3.from_i64(25).is_square().unwrap());
        let c5 = ctx(5);
        // squares mod 5 are {1, 4}
        assert!(!c5.from_i64(2).is_square().unwrap());
        let c2 = ctx(2);
        assert!(c2.from_i64(-7).is_square().unwrap());
        assert!(c5.zero().is_square().is_err());
    }

    #[test]
    fn sqrt_of_four_takes_smaller_residue_branch() {
        let c = ctx(3);
        let r = c.from_i64(4).sqrt().unwrap();
        // the root with leading digit 1 is -2 in Z_3
        assert_eq!(r.unit_digits()[0], 1);
        assert!(c.eq(&r.square(), &c.from_i64(4)));
        assert!(c.eq(&r, &c.from_i64(-2)));
    }

    #[test]
    fn sqrt_of_six_at_p5() {
        let c = ctx(5);
        let r = c.from_i64(6).sqrt().unwrap();
        assert!(c.eq(&r.square(), &c.from_i64(6)));
        assert_eq!(r.unit_digits()[0], 1);
    }

    #[test]
    fn sqrt_minus_seven_2adic_digits() {
        // printed expansion: 1 + 2^2 + 2^4 + 2^5 + 2^7 + ...
        let c = ctx(2);
        let r = c.from_i64(-7).sqrt().unwrap();
        assert_eq!(&r.unit_digits()[..8], &[1, 0, 1, 0, 1, 1, 0, 1]);
        assert!(c.eq(&r.square(), &c.from_i64(-7)));
    }

    #[test]
    fn square_classes_at_p3() {
        let c = ctx(3);
        assert!(square_class(&c, &c.one()).unwrap().is_trivial());
        // 18 = 2 * 3^2: even valuation, unit 2 is a non-residue mod 3
        assert_eq!(
            square_class(&c, &c.from_i64(18)).unwrap(),
            SquareClass::Odd { u: true, p: false }
        );
        // 12 = 4 * 3: odd valuation, unit 4 is a residue
        assert_eq!(
            square_class(&c, &c.from_i64(12)).unwrap(),
            SquareClass::Odd { u: false, p: true }
        );
    }

    #[test]
    fn square_class_invariant_under_square_scaling() {
        let c = ctx(13);
        for n in [2i64, 13, 26, -1, 7, 169 * 5] {
            let x = c.from_i64(n);
            let s = c.from_i64(9); // 3^2
            assert_eq!(
                square_class(&c, &x).unwrap(),
                square_class(&c, &x.mul(&s)).unwrap()
            );
        }
    }

    #[test]
    fn hilbert_symbol_examples() {
        let c7 = ctx(7);
        assert_eq!(c7.unit_nonsquare(), 3);
        // (u, up) = -1 (odd-p table row d = p, eps = -1)
        let u = c7.from_i64(3);
        let up = c7.from_i64(21);
        assert_eq!(hilbert_symbol(&c7, &u, &up).unwrap(), -1);
        // (1, b) = +1 always
        for b in [2i64, 3, 7, 21, -7] {
            assert_eq!(hilbert_symbol(&c7, &c7.one(), &c7.from_i64(b)).unwrap(), 1);
        }
        // (p, p) = -1 for p = 3 mod 4
        let c3 = ctx(3);
        let p = c3.from_i64(3);
        assert_eq!(hilbert_symbol(&c3, &p, &p).unwrap(), -1);
    }

    #[test]
    fn hensel_solve_square_roots() {
        let c = ctx(3);
        let (r1, r2) = hensel_solve_square(&c.one()).unwrap();
        assert!(c.eq(&r1, &c.one()));
        assert!(c.eq(&r2, &c.from_i64(-1)));
        // c = 1 - 3 m3^2 has roots = +-1 mod 3
        for m3 in [1i64, 2, 5] {
            let val = c.from_i64(1 - 3 * m3 * m3);
            let (a, b) = hensel_solve_square(&val).unwrap();
            assert!(a.unit_digits()[0] == 1 || a.unit_digits()[0] == 2);
            assert!(c.eq(&a.square(), &val));
            assert!(c.eq(&b.square(), &val));
        }
        let c5 = ctx(5);
        let m19 = c5.from_i64(-19);
        let (a, _) = hensel_solve_square(&m19).unwrap();
        assert!(c5.eq(&a.square(), &m19));
    }

    #[test]
    fn literal_round_trip() {
        let c = ctx(3);
        for n in [1i64, -5, 42, 81, -243] {
            let x = c.from_i64(n);
            let s = x.to_string();
            let y = parse_literal(&c, &s).unwrap();
            assert_eq!(x, y);
        }
        assert_eq!(parse_literal(&c, "0").unwrap(), c.zero());
        let x = parse_literal(&c, "3^0 * 1,2,0 (O(3^3))").unwrap();
        assert_eq!(x.valuation(), Some(0));
        assert_eq!(x.unit_digits(), vec![1, 2, 0]);
        assert_eq!(x.to_string(), "3^0 * 1,2,0 (O(3^3))");
        let frac = parse_literal(&c, "1/3").unwrap();
        assert_eq!(frac.valuation(), Some(-1));
    }

    #[test]
    fn equality_reports_incomparable_on_short_precision() {
        let c = ctx(3);
        let x = parse_literal(&c, "3^0 * 1,2 (O(3^2))").unwrap();
        let y = c.from_i64(7); // 1,2,0,0,... to 48 digits
        assert_eq!(x.compare(&y, c.precision() - c.guard()), Comparison::Incomparable);
        assert_eq!(x.compare(&y, 2), Comparison::Equal);
    }
}
