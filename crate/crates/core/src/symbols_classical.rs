//! Dedekind sums and the classical Dedekind and Rademacher symbols.

use crate::error::{Error, Result};
use crate::exact_arith::Rational;
use crate::modular_group::Mat2;
use crate::util::sgn;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClassicalMethod {
    DedekindFormula,
    CFWord,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalSymbolReport {
    pub phi: Option<String>,
    pub psi: String,
    pub method: ClassicalMethod,
}

/// Above this modulus the reciprocity recursion is used instead of the
/// defining sum.
const DIRECT_LIMIT: u64 = 4096;

/// `s(a, c) = sum_{k=1}^{c-1} ((k/c)) ((ka/c))`.
pub fn dedekind_sum(a: &BigInt, c: &BigInt) -> Result<Rational> {
    if !c.is_positive() {
        return Err(Error::ZeroArgument);
    }
    if !a.gcd(c).is_one() {
        return Err(Error::NotCoprime);
    }
    match c.to_u64() {
        Some(cc) if cc <= DIRECT_LIMIT => Ok(dedekind_sum_direct(a, c)),
        _ => Ok(dedekind_sum_reciprocity(a, c)),
    }
}

/// The defining sum, term by term.
pub fn dedekind_sum_direct(a: &BigInt, c: &BigInt) -> Rational {
    let cc = c.to_i64().expect("small modulus");
    let am = a.mod_floor(c).to_i64().unwrap();
    // ((k/c)) ((ka/c)) = (2k - c)(2r - c) / (4c^2) with r = ka mod c
    let mut acc: i128 = 0;
    for k in 1..cc {
        let r = (k as i128 * am as i128) % cc as i128;
        acc += (2 * k as i128 - cc as i128) * (2 * r - cc as i128);
    }
    Rational::new(BigInt::from(acc), BigInt::from(4) * c * c)
}

/// `s(a, c)` via `s(a, c) + s(c, a) = -1/4 + (a/c + c/a + 1/(ac)) / 12`.
pub fn dedekind_sum_reciprocity(a: &BigInt, c: &BigInt) -> Rational {
    let mut a = a.mod_floor(c);
    let mut c = c.clone();
    let mut acc = Rational::zero();
    let mut sign = Rational::one();
    // s(0, 1) = 0 ends the recursion
    while !a.is_zero() {
        let r = Rational::new(BigInt::from(-1), BigInt::from(4))
            + (Rational::new(a.clone(), c.clone())
                + Rational::new(c.clone(), a.clone())
                + Rational::new(BigInt::one(), &a * &c))
                / Rational::from_integer(12.into());
        acc += &sign * r;
        sign = -sign;
        let next = c.mod_floor(&a);
        c = a;
        a = next;
    }
    acc
}

/// Dedekind symbol `Phi(m)`.
pub fn phi_classical(m: &Mat2) -> Result<Rational> {
    if m.is_scalar() {
        return Err(Error::ScalarInput);
    }
    let (a, b, c, d) = (m.a(), m.b(), m.c(), m.d());
    if c.is_zero() {
        return Ok(Rational::new(b.clone(), d.clone()));
    }
    let s = dedekind_sum(a, &c.abs())?;
    let v = Rational::new(a + d, c.clone()) - s * Rational::from_integer(BigInt::from(12 * sgn(c)));
    debug_assert!(v.is_integer());
    Ok(v)
}

/// Rademacher symbol `Psi(m) = Phi(m) - 3 sgn(c(a+d))`.
pub fn psi_classical(m: &Mat2) -> Result<BigInt> {
    let phi = phi_classical(m)?;
    let s = sgn(m.c()) * sgn(&m.trace());
    let v = phi - Rational::from_integer(BigInt::from(3 * s));
    assert!(v.is_integer(), "Rademacher symbol must be integral");
    Ok(v.to_integer())
}

/// Alternating sum of the period word.
pub fn psi_cf(word: &[BigInt]) -> BigInt {
    word.iter()
        .enumerate()
        .map(|(j, a)| if j % 2 == 0 { a.clone() } else { -a })
        .sum()
}

pub fn classical_report(m: &Mat2, method: ClassicalMethod) -> Result<ClassicalSymbolReport> {
    match method {
        ClassicalMethod::DedekindFormula => Ok(ClassicalSymbolReport {
            phi: Some(phi_classical(m)?.to_string()),
            psi: psi_classical(m)?.to_string(),
            method,
        }),
        ClassicalMethod::CFWord => {
            let (n, _) = crate::modular_group::normalize_hyperbolic(m)?;
            let (_, word, e) = crate::contfrac::hyperbolic_to_word(&n)?;
            // psi(-m) = psi(m) and psi(m^-1) = -psi(m)
            let flip = if n == *m || n == m.neg() { 1 } else { -1 };
            let psi: BigInt = psi_cf(&word) * BigInt::from(e) * BigInt::from(flip);
            Ok(ClassicalSymbolReport { phi: None, psi: psi.to_string(), method })
        }
    }
}

/// `|log D(mz) - log D(z) - 12 sgn(c)^2 log((cz+d)/(i sgn c)) - 2 pi i Phi(m)|`
/// with `log D` from the truncated product expansion.
pub fn logdelta_gap_check(m: &Mat2, z: Complex64, terms: usize) -> Result<f64> {
    let phi = phi_classical(m)?;
    let phi = phi.numer().to_f64().unwrap() / phi.denom().to_f64().unwrap();
    let [a, b, c, d] = m.to_f64();
    let mz = (z * a + b) / (z * c + d);
    let lhs = crate::analytic::log_delta(mz, terms) - crate::analytic::log_delta(z, terms);
    let s = sgn(m.c()) as f64;
    let auto = if s == 0.0 {
        Complex64::zero()
    } else {
        ((z * c + d) / Complex64::new(0.0, s)).ln() * 12.0
    };
    Ok((lhs - auto - Complex64::new(0.0, 2.0 * PI * phi)).norm())
}
