//! Rationals, real quadratic irrationals and the projective line over them.

use crate::error::{Error, Result};
use crate::modular_group::Mat2;
use crate::util::{gcd3, isqrt, is_square, sgn, squarefree_split};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Reduced fraction with positive denominator.
pub type Rational = BigRational;

/// The real number `(p + q*sqrt(d)) / r`.
///
/// Always canonical: `r > 0`, `gcd(p, q, r) = 1`, `q != 0` and `d > 1`
/// squarefree (square factors of the radicand are moved into `q`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadIrr {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    r: BigInt,
}

impl QuadIrr {
    pub fn new(p: BigInt, q: BigInt, d: BigInt, r: BigInt) -> Result<Self> {
        if !d.is_positive() || is_square(&d) {
            return Err(Error::InvalidQuadIrr(format!("radicand {d} must be a positive non-square")));
        }
        if q.is_zero() || r.is_zero() {
            return Err(Error::InvalidQuadIrr("q and r must be nonzero".into()));
        }
        let (f, d0) = squarefree_split(&d);
        Ok(Self::reduced(p, q * f, d0, r))
    }

    /// `(p + q*sqrt(d)) / r` where `d` is already squarefree.
    pub(crate) fn reduced(mut p: BigInt, mut q: BigInt, d: BigInt, mut r: BigInt) -> Self {
        debug_assert!(!q.is_zero() && !r.is_zero());
        let g = gcd3(&p, &q, &r);
        if !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        QuadIrr { p, q, d, r }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }
    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn to_f64(&self) -> f64 {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        let r = self.r.to_f64().unwrap_or(f64::NAN);
        let s = self.d.to_f64().unwrap_or(f64::NAN).sqrt();
        if sgn(&self.p) * sgn(&self.q) < 0 {
            // p and q*sqrt(d) nearly cancel; rationalize instead.
            let n = &self.p * &self.p - &self.q * &self.q * &self.d;
            n.to_f64().unwrap_or(f64::NAN) / (r * (p - q * s))
        } else {
            (p + q * s) / r
        }
    }

    /// `floor(q * sqrt(d))`.
    fn floor_surd(&self) -> BigInt {
        let t = isqrt(&(&self.q * &self.q * &self.d));
        if self.q.is_positive() {
            t
        } else {
            -t - 1
        }
    }

    pub fn floor(&self) -> BigInt {
        (&self.p + self.floor_surd()).div_floor(&self.r)
    }
}

impl fmt::Display for QuadIrr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.q.is_negative() { '-' } else { '+' };
        write!(f, "({}{}{}*sqrt({}))/{}", self.p, op, self.q.abs(), self.d, self.r)
    }
}

impl FromStr for QuadIrr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected (p+q*sqrt(d))/r, got {s:?}"));
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (num, den) = match s.rfind(")/") {
            Some(i) if s.starts_with('(') => (&s[1..i], &s[i + 2..]),
            _ if s.starts_with('(') && s.ends_with(')') && s.matches('(').count() == 2 => {
                (&s[1..s.len() - 1], "1")
            }
            _ => (s.as_str(), "1"),
        };
        let at = num.find("sqrt(").ok_or_else(bad)?;
        let rad = num[at + 5..].strip_suffix(')').ok_or_else(bad)?;
        let head = num[..at].trim_end_matches('*');
        let split = head
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .last();
        let (p, q) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None if head.starts_with('+') || head.starts_with('-') || head.is_empty() => ("0", head),
            None => return Err(bad()),
        };
        let int = |t: &str| t.parse::<BigInt>().map_err(|_| bad());
        let q = match q {
            "" | "+" => BigInt::one(),
            "-" => -BigInt::one(),
            t => int(t.trim_start_matches('+'))?,
        };
        QuadIrr::new(int(p)?, q, int(rad)?, int(den)?)
    }
}

impl Serialize for QuadIrr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Galois conjugate `(p - q*sqrt(d)) / r`.
pub fn qi_conjugate(x: &QuadIrr) -> QuadIrr {
    QuadIrr {
        p: x.p.clone(),
        q: -&x.q,
        d: x.d.clone(),
        r: x.r.clone(),
    }
}

/// An element of `Q` or of some real quadratic field.
#[derive(Clone, Debug)]
pub enum Real {
    Rat(Rational),
    Quad(QuadIrr),
}

impl Real {
    pub fn int(n: impl Into<BigInt>) -> Self {
        Real::Rat(Rational::from_integer(n.into()))
    }

    pub fn frac(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Real::Rat(Rational::new(n.into(), d.into()))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Real::Rat(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Real::Rat(x) => Some(x),
            Real::Quad(_) => None,
        }
    }

    pub fn as_quad(&self) -> Option<&QuadIrr> {
        match self {
            Real::Quad(x) => Some(x),
            Real::Rat(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Rat(x) => x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN),
            Real::Quad(x) => x.to_f64(),
        }
    }

    pub fn floor(&self) -> BigInt {
        match self {
            Real::Rat(x) => x.floor().to_integer(),
            Real::Quad(x) => x.floor(),
        }
    }

    pub fn conjugate(&self) -> Real {
        match self {
            Real::Rat(x) => Real::Rat(x.clone()),
            Real::Quad(x) => Real::Quad(qi_conjugate(x)),
        }
    }

    /// `self + k`.
    pub fn add_int(&self, k: &BigInt) -> Real {
        match self {
            Real::Rat(x) => Real::Rat(x + Rational::from_integer(k.clone())),
            Real::Quad(x) => Real::Quad(QuadIrr::reduced(
                &x.p + k * &x.r,
                x.q.clone(),
                x.d.clone(),
                x.r.clone(),
            )),
        }
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Rat(x) => Real::Rat(-x),
            Real::Quad(x) => Real::Quad(QuadIrr::reduced(-&x.p, -&x.q, x.d.clone(), x.r.clone())),
        }
    }

    /// `1 / self`; `None` for zero.
    pub fn recip(&self) -> Option<Real> {
        match self {
            Real::Rat(x) if x.is_zero() => None,
            Real::Rat(x) => Some(Real::Rat(x.recip())),
            Real::Quad(x) => {
                let n = &x.p * &x.p - &x.q * &x.q * &x.d;
                Some(Real::Quad(QuadIrr::reduced(
                    &x.r * &x.p,
                    -&x.r * &x.q,
                    x.d.clone(),
                    n,
                )))
            }
        }
    }

    /// Sign of `self`.
    pub fn signum(&self) -> i32 {
        qi_compare(self, &Real::int(0)) as i32
    }
}

impl From<Rational> for Real {
    fn from(x: Rational) -> Self {
        Real::Rat(x)
    }
}

impl From<QuadIrr> for Real {
    fn from(x: QuadIrr) -> Self {
        Real::Quad(x)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        qi_compare(self, other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        qi_compare(self, other)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rat(x) => write!(f, "{x}"),
            Real::Quad(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Real {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains("sqrt") {
            return s.parse::<QuadIrr>().map(Real::Quad);
        }
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("expected p/q, got {s:?}"));
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.parse::<BigInt>().map_err(|_| bad())?, d.parse::<BigInt>().map_err(|_| bad())?),
            None => (t.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
        };
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Real::Rat(Rational::new(n, d)))
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Sign of `a + b*sqrt(d)` for `d > 0`.
pub(crate) fn sign2(a: &BigInt, b: &BigInt, d: &BigInt) -> i32 {
    let (sa, sb) = (sgn(a), sgn(b));
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    // Opposite signs: the term with the larger square wins.
    sa * sgn(&(a * a - b * b * d))
}

/// Sign of `a + b*sqrt(d1) + c*sqrt(d2) + e*sqrt(d1*d2)` for `d1, d2 > 0`,
/// decided exactly with at most two squarings.
pub(crate) fn sign4(a: &BigInt, b: &BigInt, c: &BigInt, e: &BigInt, d1: &BigInt, d2: &BigInt) -> i32 {
    // Write the quantity as X + Y*sqrt(d2) with X, Y in Q(sqrt(d1)).
    let sx = sign2(a, b, d1);
    let sy = sign2(c, e, d1);
    if sy == 0 {
        return sx;
    }
    if sx == 0 || sx == sy {
        return sy;
    }
    // X^2 - d2*Y^2 = (a^2 + b^2 d1 - d2 (c^2 + e^2 d1)) + 2 (ab - d2 ce) sqrt(d1)
    let u = a * a + b * b * d1 - d2 * (c * c + e * e * d1);
    let v = (a * b - d2 * c * e) * 2;
    sx * sign2(&u, &v, d1)
}

fn parts(x: &Real) -> (BigInt, BigInt, BigInt, BigInt) {
    match x {
        Real::Rat(r) => (r.numer().clone(), BigInt::zero(), BigInt::one(), r.denom().clone()),
        Real::Quad(q) => (q.p.clone(), q.q.clone(), q.d.clone(), q.r.clone()),
    }
}

/// Exact total order on rationals and real quadratic irrationals, across
/// different radicands.
pub fn qi_compare(x: &Real, y: &Real) -> Ordering {
    if let (Real::Rat(a), Real::Rat(b)) = (x, y) {
        return a.cmp(b);
    }
    let (p1, q1, d1, r1) = parts(x);
    let (p2, q2, d2, r2) = parts(y);
    // r1, r2 > 0, so sign(x - y) = sign(r1 r2 (x - y)).
    let a = &p1 * &r2 - &p2 * &r1;
    let b = &q1 * &r2;
    let c = -(&q2 * &r1);
    let s = if d1 == d2 {
        sign2(&a, &(b + c), &d1)
    } else {
        sign4(&a, &b, &c, &BigInt::zero(), &d1, &d2)
    };
    s.cmp(&0)
}

/// A point of the projective line over the real quadratic numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Proj {
    Finite(Real),
    Infinity,
}

impl Proj {
    pub fn finite(&self) -> Option<&Real> {
        match self {
            Proj::Finite(x) => Some(x),
            Proj::Infinity => None,
        }
    }
}

impl fmt::Display for Proj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Proj::Finite(x) => write!(f, "{x}"),
            Proj::Infinity => write!(f, "oo"),
        }
    }
}

impl From<Real> for Proj {
    fn from(x: Real) -> Self {
        Proj::Finite(x)
    }
}

/// Image of `x` under `z -> (az + b) / (cz + d)`.
pub fn mobius_apply(g: &Mat2, x: &Proj) -> Proj {
    let (a, b, c, d) = (g.a(), g.b(), g.c(), g.d());
    match x {
        Proj::Infinity => {
            if c.is_zero() {
                Proj::Infinity
            } else {
                Proj::Finite(Real::Rat(Rational::new(a.clone(), c.clone())))
            }
        }
        Proj::Finite(Real::Rat(x)) => {
            let (n, m) = (x.numer(), x.denom());
            let num = a * n + b * m;
            let den = c * n + d * m;
            if den.is_zero() {
                Proj::Infinity
            } else {
                Proj::Finite(Real::Rat(Rational::new(num, den)))
            }
        }
        Proj::Finite(Real::Quad(x)) => {
            // (P1 + Q1 s) / (P2 + Q2 s), then rationalize the denominator.
            let p1 = a * &x.p + b * &x.r;
            let q1 = a * &x.q;
            let p2 = c * &x.p + d * &x.r;
            let q2 = c * &x.q;
            let num_p = &p1 * &p2 - &q1 * &q2 * &x.d;
            let num_q = &q1 * &p2 - &p1 * &q2;
            let den = &p2 * &p2 - &q2 * &q2 * &x.d;
            Proj::Finite(Real::Quad(QuadIrr::reduced(num_p, num_q, x.d.clone(), den)))
        }
    }
}
