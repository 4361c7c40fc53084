//! Simple continued fractions of rationals and real quadratic irrationals.

use crate::error::{Error, Result};
use crate::exact_arith::{qi_compare, QuadIrr, Rational, Real};
use crate::modular_group::{fixed_points, Mat2};
use crate::util::isqrt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// A period word `(a_0, ..., a_{2n-1})` of positive integers.
pub type CFWord = Vec<BigInt>;

pub fn word(v: &[i64]) -> CFWord {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `[k_0, ..., k_{r-1}, period-bar]`; the period is empty for rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CFExpansion {
    pub preperiod: Vec<BigInt>,
    pub period: Vec<BigInt>,
}

impl CFExpansion {
    pub fn is_periodic(&self) -> bool {
        !self.period.is_empty()
    }

    /// Exact value of the expansion.
    pub fn value(&self) -> Real {
        if self.period.is_empty() {
            return Real::Rat(eval_finite(&self.preperiod));
        }
        let mut x = Real::Quad(periodic_value(&self.period));
        for k in self.preperiod.iter().rev() {
            x = x.recip().expect("tail of a continued fraction is nonzero").add_int(k);
        }
        x
    }
}

impl fmt::Display for CFExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        if self.period.is_empty() {
            write!(f, "{}", j(&self.preperiod))
        } else {
            write!(f, "{};{}", j(&self.preperiod), j(&self.period))
        }
    }
}

impl FromStr for CFExpansion {
    type Err = Error;

    /// `"2,1;1,4,3,2"` (preperiod, then period after the semicolon).
    fn from_str(s: &str) -> Result<Self> {
        let list = |t: &str| -> Result<Vec<BigInt>> {
            t.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer {x:?}"))))
                .collect()
        };
        let (pre, per) = match s.split_once(';') {
            Some((a, b)) => (list(a)?, list(b)?),
            None => (list(s)?, Vec::new()),
        };
        if pre.iter().skip(1).chain(per.iter()).any(|x| !x.is_positive()) {
            return Err(Error::InvalidWord("entries after the first must be positive".into()));
        }
        if pre.is_empty() && per.is_empty() {
            return Err(Error::InvalidWord("empty expansion".into()));
        }
        Ok(canonicalize(pre, per))
    }
}

fn ser_ints(v: &[BigInt]) -> Vec<serde_big::Int<'_>> {
    v.iter().map(serde_big::Int).collect()
}

pub(crate) mod serde_big {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{Serialize, Serializer};

    /// Serializes as a JSON number when it fits in i64, else as a string.
    pub struct Int<'a>(pub &'a BigInt);

    impl Serialize for Int<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            match self.0.to_i64() {
                Some(v) => s.serialize_i64(v),
                None => s.serialize_str(&self.0.to_string()),
            }
        }
    }
}

impl Serialize for CFExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CFExpansion", 2)?;
        st.serialize_field("preperiod", &ser_ints(&self.preperiod))?;
        st.serialize_field("period", &ser_ints(&self.period))?;
        st.end()
    }
}

/// Value of a finite continued fraction.
pub fn eval_finite(w: &[BigInt]) -> Rational {
    let mut it = w.iter().rev();
    let mut x = Rational::from_integer(it.next().expect("nonempty word").clone());
    for k in it {
        x = x.recip() + Rational::from_integer(k.clone());
    }
    x
}

/// `[a_0, ..., a_{t-1}-bar]` for positive entries.
pub fn periodic_value(w: &[BigInt]) -> QuadIrr {
    let m = if w.len() % 2 == 1 {
        word_to_matrix(&[w, w].concat())
    } else {
        word_to_matrix(w)
    }
    .expect("even nonempty word");
    fixed_points(&m).expect("positive words give hyperbolic matrices").0
}

pub fn cf_of_rational(x: &Rational) -> CFExpansion {
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    let mut pre = Vec::new();
    loop {
        let (q, r) = n.div_mod_floor(&d);
        pre.push(q);
        if r.is_zero() {
            break;
        }
        n = d;
        d = r;
    }
    CFExpansion { preperiod: pre, period: Vec::new() }
}

/// Raw expansion with minimal preperiod and minimal (possibly odd) period.
fn cf_raw(x: &QuadIrr) -> (Vec<BigInt>, Vec<BigInt>) {
    // Write x = (P + sqrt(N)) / Q with Q | N - P^2.
    let n0 = x.q() * x.q() * x.d();
    let (mut p, mut q) = if x.q().is_positive() {
        (x.p().clone(), x.r().clone())
    } else {
        (-x.p(), -x.r())
    };
    let mut n = n0;
    if !(&n - &p * &p).is_multiple_of(&q) {
        let aq = q.abs();
        p *= &aq;
        n *= &aq * &aq;
        q *= &aq;
    }
    let s = isqrt(&n);
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut terms = Vec::new();
    loop {
        if let Some(&j) = seen.get(&(p.clone(), q.clone())) {
            let period = terms.split_off(j);
            return (terms, period);
        }
        seen.insert((p.clone(), q.clone()), terms.len());
        let a = if q.is_positive() {
            (&p + &s).div_floor(&q)
        } else {
            (-&p - &s - BigInt::one()).div_floor(&-&q)
        };
        let p1 = &a * &q - &p;
        let q1 = (&n - &p1 * &p1) / &q;
        terms.push(a);
        p = p1;
        q = q1;
    }
}

/// Smallest period of a cyclic word.
fn minimal_period(per: &[BigInt]) -> usize {
    let t = per.len();
    (1..=t)
        .find(|&p| t % p == 0 && (p..t).all(|i| per[i] == per[i - p]))
        .unwrap_or(t)
}

/// Minimal even preperiod and minimal even period for the same value.
pub fn canonicalize(mut pre: Vec<BigInt>, mut per: Vec<BigInt>) -> CFExpansion {
    if per.is_empty() {
        return CFExpansion { preperiod: pre, period: per };
    }
    let p = minimal_period(&per);
    per.truncate(p);
    while !pre.is_empty() && pre.last() == per.last() {
        pre.pop();
        per.rotate_right(1);
    }
    if per.len() % 2 == 1 {
        per = [per.as_slice(), per.as_slice()].concat();
    }
    if pre.len() % 2 == 1 {
        pre.push(per[0].clone());
        per.rotate_left(1);
    }
    CFExpansion { preperiod: pre, period: per }
}

pub fn cf_of_quadirr(x: &QuadIrr) -> CFExpansion {
    let (pre, per) = cf_raw(x);
    canonicalize(pre, per)
}

pub fn cf_of_real(x: &Real) -> CFExpansion {
    match x {
        Real::Rat(r) => cf_of_rational(r),
        Real::Quad(q) => cf_of_quadirr(q),
    }
}

/// `(a_0 1; 1 0) ... (a_{2n-1} 1; 1 0)`.
pub fn word_to_matrix(w: &[BigInt]) -> Result<Mat2> {
    if w.is_empty() {
        return Ok(Mat2::identity());
    }
    if w.len() % 2 == 1 {
        return Err(Error::InvalidWord(format!("odd length {}", w.len())));
    }
    // Pairs (a 1; 1 0)(b 1; 1 0) = (ab+1 a; b 1) have determinant 1.
    let mut m = Mat2::identity();
    for pair in w.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let step = Mat2::new(a * b + 1, a.clone(), b.clone(), BigInt::one()).expect("det 1");
        m = m.mul(&step);
    }
    Ok(m)
}

/// `(delta, word, e)` with `m = delta * word_to_matrix(word)^e * delta^-1`.
pub fn hyperbolic_to_word(m: &Mat2) -> Result<(Mat2, CFWord, u64)> {
    if !crate::modular_group::is_hyperbolic(m) {
        return Err(Error::NotHyperbolic);
    }
    if !m.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let (w, _) = fixed_points(m)?;
    let cf = cf_of_quadirr(&w);
    let delta = word_to_matrix(&cf.preperiod)?;
    let g = word_to_matrix(&cf.period)?;
    let target = m.conj_by(&delta);
    let tr = target.trace();
    let mut p = g.clone();
    let mut e = 1u64;
    while p.trace() < tr {
        p = p.mul(&g);
        e += 1;
    }
    assert_eq!(p, target, "stabilizer of a quadratic irrational is cyclic");
    Ok((delta, cf.period, e))
}

/// Removes inner zeros, `[.., a, 0, b, ..] = [.., a + b, ..]`.
fn absorb_zeros(mut pre: Vec<BigInt>, mut per: Vec<BigInt>) -> (Vec<BigInt>, Vec<BigInt>) {
    while let Some(i) = (1..pre.len()).find(|&i| pre[i].is_zero()) {
        if i + 1 < pre.len() {
            let b = pre.remove(i + 1);
            pre.remove(i);
            pre[i - 1] += b;
        } else {
            pre.pop();
            let a = pre.pop().unwrap();
            let b = per[0].clone();
            per.rotate_left(1);
            pre.push(a + b);
        }
    }
    (pre, per)
}

/// Expansion of the Galois conjugate.
pub fn conjugate_expansion(x: &CFExpansion) -> Result<CFExpansion> {
    if x.period.is_empty() {
        return Err(Error::PreconditionViolated);
    }
    // The formula needs k_{r-1} != a_{2n-1}; shortening the preperiod until
    // that holds keeps the value and the even period length.
    let mut k = x.preperiod.clone();
    let mut a = x.period.clone();
    while k.last().is_some() && k.last() == a.last() {
        k.pop();
        a.rotate_right(1);
    }
    let t = a.len();
    let one = BigInt::one();
    // a_{2n-2}, ..., a_0 followed by a_{2n-1}
    let rev1: Vec<BigInt> = a[..t - 1].iter().rev().chain([&a[t - 1]]).cloned().collect();
    // a_{2n-3}, ..., a_0 followed by a_{2n-1}, a_{2n-2}
    let rev2: Vec<BigInt> = a[..t - 2].iter().rev().chain([&a[t - 1], &a[t - 2]]).cloned().collect();
    let last = &a[t - 1];
    let (pre, per) = match k.len() {
        0 => (vec![-&one, one.clone(), last - 1], rev1),
        r => {
            let kl = &k[r - 1];
            if r == 1 || kl > last {
                let mut pre = k[..r - 1].to_vec();
                pre.extend([kl - last - 1, one.clone(), &a[t - 2] - 1]);
                (pre, rev2)
            } else {
                let mut pre = k[..r - 2].to_vec();
                pre.extend([&k[r - 2] - 1, one.clone(), last - kl - 1]);
                (pre, rev1)
            }
        }
    };
    let (pre, per) = absorb_zeros(pre, per);
    Ok(canonicalize(pre, per))
}

/// `(r, i)` with `w_target` in `A_{r,i}` for the orbit of `[word-bar]`.
pub fn orbit_shift_membership(w_target: &QuadIrr, word: &[BigInt]) -> Option<(usize, usize)> {
    let CFExpansion { preperiod: pre, period: tail } = cf_of_quadirr(w_target);
    let r = pre.len();
    let t = word.len();
    let len = num_integer::lcm(t, tail.len());
    (0..t).find(|&i| i % 2 == r % 2 && (0..len).all(|j| tail[j % tail.len()] == word[(i + j) % t])).map(|i| (r, i))
}

/// Order of `[wa-bar]` and `[wb-bar]`.
pub fn compare_periodic_values(wa: &[BigInt], wb: &[BigInt]) -> Ordering {
    qi_compare(&Real::Quad(periodic_value(wa)), &Real::Quad(periodic_value(wb)))
}

/// Whether `x` is reduced: `x > 1` and `-1 < x' < 0`.
pub fn is_reduced(x: &QuadIrr) -> bool {
    let v = Real::Quad(x.clone());
    let c = v.conjugate();
    v > Real::int(1) && c < Real::int(0) && c > Real::int(-1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadIrr {
        s.parse().unwrap()
    }

    fn cf(s: &str) -> CFExpansion {
        s.parse().unwrap()
    }

    #[test]
    fn rational_expansions() {
        let r = |n: i64, d: i64| cf_of_rational(&Rational::new(n.into(), d.into())).to_string();
        assert_eq!(r(7, 3), "2,3");
        assert_eq!(r(-1, 1), "-1");
        assert_eq!(r(0, 1), "0");
        assert_eq!(r(-7, 3), "-3,1,2");
    }

    #[test]
    fn quadratic_expansions() {
        assert_eq!(cf_of_quadirr(&q("(3+sqrt(5))/2")).to_string(), "2,1;1,1");
        assert_eq!(cf_of_quadirr(&q("(1+sqrt(5))/2")).to_string(), ";1,1");
        assert_eq!(cf_of_quadirr(&q("(36+2*sqrt(39))/19")).to_string(), "2,1;1,4,3,2");
        assert_eq!(cf_of_quadirr(&q("sqrt(2)")).to_string(), "1,2;2,2");
    }

    #[test]
    fn words_and_matrices() {
        assert_eq!(word_to_matrix(&word(&[1, 1])).unwrap(), Mat2::from_i64(2, 1, 1, 1).unwrap());
        assert_eq!(word_to_matrix(&word(&[2, 1])).unwrap(), Mat2::from_i64(3, 2, 1, 1).unwrap());
        assert_eq!(word_to_matrix(&word(&[1, 1, 1, 1])).unwrap(), Mat2::from_i64(5, 3, 3, 2).unwrap());
        assert!(word_to_matrix(&word(&[1, 2, 3])).is_err());
    }

    #[test]
    fn stabilizer_words() {
        let g = Mat2::from_i64(2, 1, 1, 1).unwrap();
        assert_eq!(hyperbolic_to_word(&g).unwrap(), (Mat2::identity(), word(&[1, 1]), 1));
        assert_eq!(hyperbolic_to_word(&g.pow(2)).unwrap(), (Mat2::identity(), word(&[1, 1]), 2));
        let h = Mat2::from_i64(3, 2, 1, 1).unwrap();
        assert_eq!(hyperbolic_to_word(&h).unwrap(), (Mat2::identity(), word(&[2, 1]), 1));
    }

    #[test]
    fn conjugate_examples() {
        let c = conjugate_expansion(&cf("2,1;1,4,3,2")).unwrap();
        assert_eq!(c.to_string(), "1,4;4,1,2,3");
        assert_eq!(c.value(), Real::Quad(q("(36-2*sqrt(39))/19")));
        let c = conjugate_expansion(&cf(";1,1")).unwrap();
        assert_eq!(c.value(), Real::Quad(q("(1-sqrt(5))/2")));
        assert!(conjugate_expansion(&cf("2,3")).is_err());
    }

    #[test]
    fn orbit_examples() {
        let w = word(&[1, 1]);
        assert_eq!(orbit_shift_membership(&q("(1+sqrt(5))/2"), &w), Some((0, 0)));
        assert_eq!(orbit_shift_membership(&q("(3+sqrt(5))/2"), &w), Some((2, 0)));
        assert_eq!(orbit_shift_membership(&q("sqrt(2)"), &w), None);
        // GL2 but not SL2 related
        assert_eq!(orbit_shift_membership(&q("1+sqrt(3)"), &word(&[1, 2])), None);
    }

    #[test]
    fn periodic_comparisons() {
        assert_eq!(compare_periodic_values(&word(&[1, 1]), &word(&[1, 2])), Ordering::Greater);
        assert_eq!(compare_periodic_values(&word(&[2, 1]), &word(&[1, 2])), Ordering::Greater);
        assert_eq!(compare_periodic_values(&word(&[1, 1]), &word(&[1])), Ordering::Equal);
    }
}
