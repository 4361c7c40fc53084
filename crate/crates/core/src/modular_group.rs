//! Elements of SL2(Z).

use crate::error::{Error, Result};
use crate::exact_arith::QuadIrr;
use crate::qforms::BQF;
use crate::util::{big, sgn};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// `(a b; c d)` with `ad - bc = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MatClass {
    Scalar,
    Parabolic,
    Elliptic,
    Hyperbolic,
}

/// Which of `m, -m, m^-1, -m^-1` a normalization picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormTag {
    Identity,
    Negated,
    Inverted,
    NegatedInverted,
}

impl Mat2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(Error::InvalidMatrix(det.to_string()));
        }
        Ok(Mat2 { a, b, c, d })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(big(a), big(b), big(c), big(d))
    }

    fn raw(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        debug_assert!((&a * &d - &b * &c).is_one());
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::raw(big(1), big(0), big(0), big(1))
    }
    pub fn t() -> Self {
        Self::raw(big(1), big(1), big(0), big(1))
    }
    pub fn s() -> Self {
        Self::raw(big(0), big(-1), big(1), big(0))
    }
    pub fn u() -> Self {
        Self::raw(big(1), big(-1), big(1), big(0))
    }
    /// `T^k`.
    pub fn t_pow(k: &BigInt) -> Self {
        Self::raw(big(1), k.clone(), big(0), big(1))
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inv(&self) -> Mat2 {
        Mat2 {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> Mat2 {
        let mut base = if n < 0 { self.inv() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Mat2::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `g^-1 self g`.
    pub fn conj_by(&self, g: &Mat2) -> Mat2 {
        g.inv().mul(self).mul(g)
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero()
    }

    pub fn is_normalized(&self) -> bool {
        self.c.is_positive() && self.trace() > big(2)
    }

    pub fn to_f64(&self) -> [f64; 4] {
        use num_traits::ToPrimitive;
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        [f(&self.a), f(&self.b), f(&self.c), f(&self.d)]
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for Mat2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = s.split([',', ';', ' ']).filter(|t| !t.is_empty()).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("expected a,b,c,d, got {s:?}")));
        }
        let mut v = Vec::with_capacity(4);
        for p in parts {
            v.push(p.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer {p:?}")))?);
        }
        let [a, b, c, d]: [BigInt; 4] = v.try_into().unwrap();
        Mat2::new(a, b, c, d)
    }
}

impl Serialize for Mat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(4))?;
        for x in [&self.a, &self.b, &self.c, &self.d] {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}

pub fn classify(m: &Mat2) -> MatClass {
    if m.is_scalar() {
        return MatClass::Scalar;
    }
    let t = m.trace().abs();
    match t.cmp(&big(2)) {
        std::cmp::Ordering::Less => MatClass::Elliptic,
        std::cmp::Ordering::Equal => MatClass::Parabolic,
        std::cmp::Ordering::Greater => MatClass::Hyperbolic,
    }
}

pub fn is_hyperbolic(m: &Mat2) -> bool {
    classify(m) == MatClass::Hyperbolic
}

/// `[c, d - a, -b]`.
pub fn assoc_form(m: &Mat2) -> Result<BQF> {
    if m.is_scalar() {
        return Err(Error::ScalarInput);
    }
    Ok(BQF::new_unchecked(m.c.clone(), &m.d - &m.a, -&m.b))
}

/// The two fixed points, larger first.
pub fn fixed_points(m: &Mat2) -> Result<(QuadIrr, QuadIrr)> {
    if !is_hyperbolic(m) {
        return Err(Error::NotHyperbolic);
    }
    Ok(assoc_form(m)?.roots_unchecked())
}

pub fn normalize_hyperbolic(m: &Mat2) -> Result<(Mat2, NormTag)> {
    if !is_hyperbolic(m) {
        return Err(Error::NotHyperbolic);
    }
    let cands = [
        (m.clone(), NormTag::Identity),
        (m.neg(), NormTag::Negated),
        (m.inv(), NormTag::Inverted),
        (m.inv().neg(), NormTag::NegatedInverted),
    ];
    Ok(cands.into_iter().find(|(n, _)| n.is_normalized()).expect("hyperbolic has c != 0"))
}

/// Limit of `m^n z` as `n` grows.
pub fn attracting_fixed_point(m: &Mat2) -> Result<QuadIrr> {
    let (w, wp) = fixed_points(m)?;
    Ok(if sgn(&m.c) * sgn(&m.trace()) > 0 { w } else { wp })
}

/// Whether `m` generates the stabilizer of its fixed points up to sign.
pub fn is_primitive(m: &Mat2) -> Result<bool> {
    if !is_hyperbolic(m) {
        return Err(Error::NotHyperbolic);
    }
    if !m.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let (_, _, e) = crate::contfrac::hyperbolic_to_word(m)?;
    Ok(e == 1)
}

/// Primitive normalized `g` with `m = g^e`, and `e`.
pub fn primitive_root(m: &Mat2) -> Result<(Mat2, u64)> {
    let (delta, word, e) = crate::contfrac::hyperbolic_to_word(m)?;
    let g = crate::contfrac::word_to_matrix(&word)?;
    Ok((g.conj_by(&delta.inv()), e))
}
