use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Element of Q_p at finite relative precision.
///
/// Three states: an exact zero, a value known only to be divisible by `p^a`,
/// and `p^val * mant` with `mant` a unit known modulo `p^prec`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicNumber {
    p: u64,
    repr: Repr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Zero,
    ZeroAt(i64),
    Unit { val: i64, mant: u64, prec: u32 },
}

/// Outcome of comparing two values at working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecCmp {
    /// The difference is an exact zero.
    Equal,
    /// The difference is zero modulo `p^floor` and nothing more is known.
    Indistinguishable { floor: i64 },
    /// The difference is provably nonzero with this valuation.
    Distinct { valuation: i64 },
}

/// Largest relative precision supported for `p` (mantissas stay below 2^62).
pub fn max_precision(p: u64) -> u32 {
    let mut k = 0;
    let mut m: u128 = 1;
    while m * p as u128 <= 1u128 << 62 {
        m *= p as u128;
        k += 1;
    }
    k
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_u64(p: u64, k: u32) -> u64 {
    p.pow(k)
}

/// Splits `x != 0` as `p^v * w` with `w` prime to `p`.
fn split(x: u64, p: u64) -> (u32, u64) {
    let mut v = 0;
    let mut w = x;
    while w.is_multiple_of(p) {
        w /= p;
        v += 1;
    }
    (v, w)
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "inv_mod of a non-unit");
    t0.rem_euclid(m as i128) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn i64_mod(n: i64, m: u64) -> u64 {
    (n as i128).rem_euclid(m as i128) as u64
}

impl PadicNumber {
    fn check_prec(p: u64, prec: u32) {
        assert!(prec >= 1 && prec <= max_precision(p), "relative precision {prec} unsupported for p={p}");
    }

    pub fn zero(p: u64) -> Self {
        PadicNumber { p, repr: Repr::Zero }
    }

    /// A value known only to be divisible by `p^abs`.
    pub fn zero_at(p: u64, abs: i64) -> Self {
        PadicNumber { p, repr: Repr::ZeroAt(abs) }
    }

    /// `p^val * mant` known modulo `p^(val+prec)`; `mant` need not be a unit.
    pub fn new(p: u64, val: i64, mant: u64, prec: u32) -> Self {
        Self::check_prec(p, prec);
        let m = pow_u64(p, prec);
        let mant = mant % m;
        if mant == 0 {
            return Self::zero_at(p, val + prec as i64);
        }
        let (w, unit) = split(mant, p);
        PadicNumber { p, repr: Repr::Unit { val: val + w as i64, mant: unit, prec: prec - w } }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::new(p, 0, 1, prec)
    }

    /// `p^e` with the given relative precision.
    pub fn p_power(p: u64, e: i64, prec: u32) -> Self {
        Self::new(p, e, 1, prec)
    }

    pub fn from_i64(p: u64, n: i64, prec: u32) -> Self {
        Self::check_prec(p, prec);
        if n == 0 {
            return Self::zero(p);
        }
        let mut v = 0i64;
        let mut w = n;
        while w % p as i64 == 0 {
            w /= p as i64;
            v += 1;
        }
        let m = pow_u64(p, prec);
        PadicNumber { p, repr: Repr::Unit { val: v, mant: i64_mod(w, m), prec } }
    }

    pub fn from_bigint(p: u64, n: &BigInt, prec: u32) -> Self {
        Self::check_prec(p, prec);
        if n.is_zero() {
            return Self::zero(p);
        }
        let pb = BigInt::from(p);
        let mut v = 0i64;
        let mut w = n.clone();
        loop {
            let (q, r) = w.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            w = q;
            v += 1;
        }
        let m = BigInt::from(pow_u64(p, prec));
        let mant = w.mod_floor(&m).to_u64().expect("residue fits");
        PadicNumber { p, repr: Repr::Unit { val: v, mant, prec } }
    }

    pub fn from_rational(p: u64, x: &BigRational, prec: u32) -> Self {
        let n = Self::from_bigint(p, x.numer(), prec);
        let d = Self::from_bigint(p, x.denom(), prec);
        n.checked_div(&d).expect("denominator of a rational is nonzero")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// True for exact zeros and for values known only modulo some `p^a`.
    pub fn is_zero_at_precision(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    /// Provable valuation; `None` for values indistinguishable from zero.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Unit { val, .. } => Some(val),
            _ => None,
        }
    }

    /// Lower bound for the valuation; `None` means +infinity (exact zero).
    pub fn val_floor(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::ZeroAt(a) => Some(a),
            Repr::Unit { val, .. } => Some(val),
        }
    }

    /// Absolute precision; `None` means exact.
    pub fn abs_precision(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::ZeroAt(a) => Some(a),
            Repr::Unit { val, prec, .. } => Some(val + prec as i64),
        }
    }

    pub fn rel_precision(&self) -> u32 {
        match self.repr {
            Repr::Unit { prec, .. } => prec,
            _ => 0,
        }
    }

    pub fn mantissa(&self) -> Option<u64> {
        match self.repr {
            Repr::Unit { mant, .. } => Some(mant),
            _ => None,
        }
    }

    /// True when the value is a unit of Z_p.
    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    fn check_p(&self, other: &Self) {
        assert_eq!(self.p, other.p, "p-adic numbers over different primes");
    }

    /// Forgets everything below `p^abs`.
    pub fn cap_abs(&self, abs: i64) -> Self {
        match self.repr {
            Repr::Zero => Self::zero_at(self.p, abs),
            Repr::ZeroAt(a) => Self::zero_at(self.p, a.min(abs)),
            Repr::Unit { val, mant, prec } => {
                if val >= abs {
                    Self::zero_at(self.p, abs)
                } else if val + prec as i64 <= abs {
                    *self
                } else {
                    let r = (abs - val) as u32;
                    PadicNumber { p: self.p, repr: Repr::Unit { val, mant: mant % pow_u64(self.p, r), prec: r } }
                }
            }
        }
    }

    /// Caps the relative precision at `r` digits.
    pub fn cap_rel(&self, r: u32) -> Self {
        match self.repr {
            Repr::Unit { val, prec, .. } if prec > r => self.cap_abs(val + r as i64),
            _ => *self,
        }
    }

    pub fn neg(&self) -> Self {
        match self.repr {
            Repr::Unit { val, mant, prec } => {
                let m = pow_u64(self.p, prec);
                PadicNumber { p: self.p, repr: Repr::Unit { val, mant: m - mant, prec } }
            }
            _ => *self,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_p(other);
        let p = self.p;
        match (self.repr, other.repr) {
            (Repr::Zero, _) => *other,
            (_, Repr::Zero) => *self,
            (Repr::ZeroAt(a), Repr::ZeroAt(b)) => Self::zero_at(p, a.min(b)),
            (Repr::ZeroAt(a), Repr::Unit { .. }) => other.cap_abs(a),
            (Repr::Unit { .. }, Repr::ZeroAt(b)) => self.cap_abs(b),
            (Repr::Unit { val: va, mant: ma, prec: ra }, Repr::Unit { val: vb, mant: mb, prec: rb }) => {
                let abs = (va + ra as i64).min(vb + rb as i64);
                let v = va.min(vb);
                let k = (abs - v) as u32;
                let m = pow_u64(p, k);
                let lift = |val: i64, mant: u64| -> u64 {
                    let s = (val - v) as u32;
                    if s >= k {
                        0
                    } else {
                        mul_mod(mant % m, pow_u64(p, s), m)
                    }
                };
                let s = ((lift(va, ma) as u128 + lift(vb, mb) as u128) % m as u128) as u64;
                if s == 0 {
                    return Self::zero_at(p, abs);
                }
                let (w, unit) = split(s, p);
                PadicNumber { p, repr: Repr::Unit { val: v + w as i64, mant: unit, prec: k - w } }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_p(other);
        let p = self.p;
        match (self.repr, other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Self::zero(p),
            (Repr::ZeroAt(a), Repr::ZeroAt(b)) => Self::zero_at(p, a + b),
            (Repr::ZeroAt(a), Repr::Unit { val, .. }) | (Repr::Unit { val, .. }, Repr::ZeroAt(a)) => {
                Self::zero_at(p, a + val)
            }
            (Repr::Unit { val: va, mant: ma, prec: ra }, Repr::Unit { val: vb, mant: mb, prec: rb }) => {
                let r = ra.min(rb);
                let m = pow_u64(p, r);
                PadicNumber { p, repr: Repr::Unit { val: va + vb, mant: mul_mod(ma % m, mb % m, m), prec: r } }
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self.repr {
            Repr::Unit { val, mant, prec } => {
                let m = pow_u64(self.p, prec);
                Ok(PadicNumber { p: self.p, repr: Repr::Unit { val: -val, mant: inv_mod(mant, m), prec } })
            }
            _ => Err(Error::DivisionByZero),
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero(self.p);
        }
        let (vk, uk) = split_i64(k, self.p);
        match self.repr {
            Repr::Zero => *self,
            Repr::ZeroAt(a) => Self::zero_at(self.p, a + vk),
            Repr::Unit { val, mant, prec } => {
                let m = pow_u64(self.p, prec);
                PadicNumber { p: self.p, repr: Repr::Unit { val: val + vk, mant: mul_mod(mant, i64_mod(uk, m), m), prec } }
            }
        }
    }

    /// Division by a nonzero exact integer.
    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by the integer 0");
        let (vk, uk) = split_i64(k, self.p);
        match self.repr {
            Repr::Zero => *self,
            Repr::ZeroAt(a) => Self::zero_at(self.p, a - vk),
            Repr::Unit { val, mant, prec } => {
                let m = pow_u64(self.p, prec);
                let inv = inv_mod(i64_mod(uk, m), m);
                PadicNumber { p: self.p, repr: Repr::Unit { val: val - vk, mant: mul_mod(mant, inv, m), prec } }
            }
        }
    }

    /// Multiplication by `p^e`, exact.
    pub fn shift_val(&self, e: i64) -> Self {
        match self.repr {
            Repr::Zero => *self,
            Repr::ZeroAt(a) => Self::zero_at(self.p, a + e),
            Repr::Unit { val, mant, prec } => PadicNumber { p: self.p, repr: Repr::Unit { val: val + e, mant, prec } },
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { *self };
        if e == 0 {
            return match self.repr {
                Repr::Unit { prec, .. } => Ok(Self::one(self.p, prec)),
                _ => Err(Error::InvalidInput("zero to the power 0 at finite precision".into())),
            };
        }
        let mut acc = base;
        for _ in 1..e.unsigned_abs() {
            acc = PadicNumber::mul(&acc, &base);
        }
        Ok(acc)
    }

    /// Compares `self` and `other` at the precision both carry.
    pub fn compare(&self, other: &Self) -> PrecCmp {
        let d = self.sub(other);
        match d.repr {
            Repr::Zero => PrecCmp::Equal,
            Repr::ZeroAt(a) => PrecCmp::Indistinguishable { floor: a },
            Repr::Unit { val, .. } => PrecCmp::Distinct { valuation: val },
        }
    }

    /// True unless the two values are provably different.
    pub fn agrees_with(&self, other: &Self) -> bool {
        !matches!(self.compare(other), PrecCmp::Distinct { .. })
    }

    /// Rational representative with mantissa in `[0, p^prec)`; zeros map to 0.
    pub fn to_rational(&self) -> BigRational {
        match self.repr {
            Repr::Unit { val, mant, .. } => {
                let pb = BigInt::from(self.p);
                let m = BigInt::from(mant);
                if val >= 0 {
                    BigRational::from_integer(m * num_traits::pow(pb, val as usize))
                } else {
                    BigRational::new(m, num_traits::pow(pb, (-val) as usize))
                }
            }
            _ => BigRational::zero(),
        }
    }

    /// Representative with the mantissa in the symmetric range, as an `i128`
    /// scaled by `p^val`; used for readable output of small values.
    pub fn signed_mantissa(&self) -> Option<i128> {
        match self.repr {
            Repr::Unit { mant, prec, .. } => {
                let m = pow_u64(self.p, prec) as i128;
                let x = mant as i128;
                Some(if x > m / 2 { x - m } else { x })
            }
            _ => None,
        }
    }

    /// Parses `"0"`, `"O(p^a)"`, `"p^v * m mod p^N"`, a decimal integer or a
    /// fraction `"a/b"`; the last two are read at `default_prec`.
    pub fn parse(s: &str, p: u64, default_prec: u32) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("malformed p-adic scalar {s:?}"));
        if t == "0" {
            return Ok(Self::zero(p));
        }
        if let Some(inner) = t.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
            let (base, e) = parse_power(inner).ok_or_else(bad)?;
            check_base(base, p)?;
            return Ok(Self::zero_at(p, e));
        }
        if let Some((lhs, modulus)) = t.split_once("mod") {
            let (base, n) = parse_power(modulus).ok_or_else(bad)?;
            check_base(base, p)?;
            if n < 1 || n > max_precision(p) as i64 {
                return Err(Error::Parse(format!("relative precision {n} out of range in {s:?}")));
            }
            let (v, m) = match lhs.split_once('*') {
                Some((pw, m)) => {
                    let (base, v) = parse_power(pw).ok_or_else(bad)?;
                    check_base(base, p)?;
                    (v, m)
                }
                None => (0, lhs),
            };
            let m: BigInt = m.parse().map_err(|_| bad())?;
            let modulus = BigInt::from(pow_u64(p, n as u32));
            let m = m.mod_floor(&modulus).to_u64().ok_or_else(bad)?;
            return Ok(Self::new(p, v, m, n as u32));
        }
        if let Some((a, b)) = t.split_once('/') {
            let a: BigInt = a.parse().map_err(|_| bad())?;
            let b: BigInt = b.parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Self::from_rational(p, &BigRational::new(a, b), default_prec));
        }
        let n: BigInt = t.parse().map_err(|_| bad())?;
        Ok(Self::from_bigint(p, &n, default_prec))
    }
}

fn split_i64(k: i64, p: u64) -> (i64, i64) {
    let mut v = 0;
    let mut w = k;
    while w % p as i64 == 0 {
        w /= p as i64;
        v += 1;
    }
    (v, w)
}

fn parse_power(s: &str) -> Option<(u64, i64)> {
    let (b, e) = s.split_once('^')?;
    Some((b.parse().ok()?, e.parse().ok()?))
}

fn check_base(base: u64, p: u64) -> Result<()> {
    if base != p {
        return Err(Error::Parse(format!("scalar written in base {base}, expected {p}")));
    }
    Ok(())
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::ZeroAt(a) => write!(f, "O({}^{})", self.p, a),
            Repr::Unit { val, mant, prec } => write!(f, "{}^{} * {} mod {}^{}", self.p, val, mant, self.p, prec),
        }
    }
}

impl Add for PadicNumber {
    type Output = PadicNumber;
    fn add(self, rhs: Self) -> Self {
        PadicNumber::add(&self, &rhs)
    }
}

impl Sub for PadicNumber {
    type Output = PadicNumber;
    fn sub(self, rhs: Self) -> Self {
        PadicNumber::sub(&self, &rhs)
    }
}

impl Mul for PadicNumber {
    type Output = PadicNumber;
    fn mul(self, rhs: Self) -> Self {
        PadicNumber::mul(&self, &rhs)
    }
}

impl Neg for PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> Self {
        PadicNumber::neg(&self)
    }
}

/// Valuation of a nonzero rational.
pub fn rational_valuation(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut v = 0i64;
        let mut w = n.abs();
        while (&w % &pb).is_zero() {
            w /= &pb;
            v += 1;
        }
        v
    };
    Some(count(x.numer()) - count(x.denom()))
}

/// True when `x` and the rational `r` agree at the precision of `x`.
pub fn agrees_with_rational(x: &PadicNumber, r: &BigRational) -> bool {
    let prec = max_precision(x.p());
    let rp = if r.is_zero() { PadicNumber::zero(x.p()) } else { PadicNumber::from_rational(x.p(), r, prec) };
    x.agrees_with(&rp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn one_plus_four_is_five() {
        let a = PadicNumber::from_i64(5, 1, 8);
        let b = PadicNumber::from_i64(5, 4, 8);
        let c = a + b;
        assert_eq!(c.valuation(), Some(1));
        assert_eq!(c.mantissa(), Some(1));
        assert_eq!(c.rel_precision(), 7);
    }

    #[test]
    fn division_of_valuations() {
        let a = PadicNumber::from_i64(5, 25 * 3, 10);
        let b = PadicNumber::from_i64(5, 3125 * 7, 10);
        let c = a.checked_div(&b).unwrap();
        assert_eq!(c.valuation(), Some(-3));
        assert!(agrees_with_rational(&c, &q(75, 3125 * 7)));
    }

    #[test]
    fn cancellation_gives_zero_at_precision() {
        let a = PadicNumber::from_i64(3, 7, 5);
        let d = a - a;
        assert!(d.is_zero_at_precision() && !d.is_exact_zero());
        assert_eq!(d.abs_precision(), Some(5));
        assert_eq!(a.compare(&a), PrecCmp::Indistinguishable { floor: 5 });
        assert_eq!(PadicNumber::zero(3).compare(&PadicNumber::zero(3)), PrecCmp::Equal);
    }

    #[test]
    fn divide_by_zero_at_precision_fails() {
        let z = PadicNumber::zero_at(5, 4);
        assert!(matches!(PadicNumber::one(5, 4).checked_div(&z), Err(Error::DivisionByZero)));
        assert!(matches!(PadicNumber::zero(5).inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["0", "O(5^7)", "5^-3 * 7 mod 5^12", "5^2 * 1 mod 5^1"] {
            let x = PadicNumber::parse(s, 5, 12).unwrap();
            assert_eq!(x.to_string(), s);
        }
        let h = PadicNumber::parse("1/2", 3, 10).unwrap();
        assert_eq!(h.mul_int(2), PadicNumber::one(3, 10));
        assert!(PadicNumber::parse("3^1 * 2 mod 3^2", 5, 4).is_err());
        assert!(PadicNumber::parse("x", 5, 4).is_err());
    }

    #[test]
    fn rational_roundtrip() {
        let x = PadicNumber::from_rational(7, &q(-22, 49), 9);
        assert_eq!(x.valuation(), Some(-2));
        assert!(agrees_with_rational(&x, &q(-22, 49)));
        assert!(!agrees_with_rational(&x, &q(-21, 49)));
    }

    #[test]
    fn max_precision_fits() {
        assert_eq!(max_precision(2), 62);
        assert!(max_precision(5) >= 26);
    }
}
