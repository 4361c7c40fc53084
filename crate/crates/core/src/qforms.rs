//! Indefinite binary quadratic forms `[A, B, C] = AX^2 + BXY + CY^2`.

use crate::error::{Error, Result};
use crate::exact_arith::{sign2, QuadIrr, Rational, Real};
use crate::modular_group::Mat2;
use crate::util::{divisors_big, divisors_u64, gcd3, is_square, isqrt, sgn, squarefree_split};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BQF {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl BQF {
    /// Checks that the discriminant is positive and not a square.
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Result<Self> {
        let q = BQF { a, b, c };
        let d = q.disc();
        if !d.is_positive() || is_square(&d) {
            return Err(Error::InvalidForm(format!("{q} has discriminant {d}")));
        }
        Ok(q)
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into())
    }

    pub(crate) fn new_unchecked(a: BigInt, b: BigInt, c: BigInt) -> Self {
        BQF { a, b, c }
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

    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - 4 * &self.a * &self.c
    }

    pub fn content(&self) -> BigInt {
        gcd3(&self.a, &self.b, &self.c)
    }

    /// `sgn(A)`, or `sgn(C)` when `A = 0`.
    pub fn sign(&self) -> i32 {
        if self.a.is_zero() {
            sgn(&self.c)
        } else {
            sgn(&self.a)
        }
    }

    pub fn neg(&self) -> BQF {
        BQF {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
        }
    }

    /// `Q(x, y)`.
    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// Roots of `Q(z, 1)`, larger first. Needs `A != 0` and a non-square
    /// positive discriminant.
    pub(crate) fn roots_unchecked(&self) -> (QuadIrr, QuadIrr) {
        let d = self.disc();
        let (f, d0) = squarefree_split(&d);
        let two_a: BigInt = 2 * &self.a;
        let w1 = QuadIrr::reduced(-&self.b, f.clone(), d0.clone(), two_a.clone());
        let w2 = QuadIrr::reduced(-&self.b, -f, d0, two_a);
        if self.a.is_positive() {
            (w1, w2)
        } else {
            (w2, w1)
        }
    }

    /// `sgn(A) * Q(p, 1)`; negative exactly when `p` lies strictly between
    /// the roots.
    pub fn straddle_sign(&self, p: &Real) -> i32 {
        let s = sgn(&self.a);
        match p {
            Real::Rat(x) => s * sgn(&self.eval(x.numer(), x.denom())),
            Real::Quad(x) => {
                let (pp, q, d, r) = (x.p(), x.q(), x.d(), x.r());
                let u = &self.a * (pp * pp + q * q * d) + &self.b * r * pp + &self.c * r * r;
                let v = 2 * &self.a * pp * q + &self.b * r * q;
                s * sign2(&u, &v, d)
            }
        }
    }

    /// `w' < p < w`.
    pub fn straddles(&self, p: &Real) -> bool {
        self.straddle_sign(p) < 0
    }
}

impl fmt::Display for BQF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

impl FromStr for BQF {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let v: Vec<&str> = t.split(',').map(str::trim).collect();
        if v.len() != 3 {
            return Err(Error::Parse(format!("expected A,B,C, got {s:?}")));
        }
        let p = |x: &str| x.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer {x:?}")));
        BQF::new(p(v[0])?, p(v[1])?, p(v[2])?)
    }
}

impl Serialize for BQF {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `Q o g`, i.e. `Q(aX + bY, cX + dY)`.
pub fn form_action(q: &BQF, g: &Mat2) -> BQF {
    let (a, b, c, d) = (g.a(), g.b(), g.c(), g.d());
    BQF {
        a: &q.a * a * a + &q.b * a * c + &q.c * c * c,
        b: 2 * &q.a * a * b + &q.b * (a * d + b * c) + 2 * &q.c * c * d,
        c: &q.a * b * b + &q.b * b * d + &q.c * d * d,
    }
}

/// Roots `w > w'` of `Q(z, 1)`.
pub fn roots(q: &BQF) -> Result<(QuadIrr, QuadIrr)> {
    if q.a.is_zero() {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    Ok(q.roots_unchecked())
}

fn is_reduced(q: &BQF, s: &BigInt) -> bool {
    let two_a = 2 * q.a.abs();
    q.b.is_positive() && &q.b <= s && &two_a + &q.b > *s && &two_a - &q.b <= *s
}

/// One reduction step: `Q o S T^k`, returning the new form and `k`.
fn rho(q: &BQF, d: &BigInt, s: &BigInt) -> (BQF, BigInt) {
    let ac = q.c.abs();
    let m = 2 * &ac;
    let lo = if &ac <= s { s - &m } else { -ac };
    // the unique B' = -B mod 2|C| in (lo, lo + 2|C|]
    let b1: BigInt = &lo + 1 + (-&q.b - &lo - BigInt::from(1)).mod_floor(&m);
    let k = (&b1 + &q.b) / (2 * &q.c);
    let c1 = (&b1 * &b1 - d) / (4 * &q.c);
    (BQF { a: q.c.clone(), b: b1, c: c1 }, k)
}

/// A reduced form equivalent to `q` and `g` with `q o g` equal to it.
pub fn reduce_with_transform(q: &BQF) -> (BQF, Mat2) {
    let d = q.disc();
    let s = isqrt(&d);
    let mut cur = q.clone();
    let mut g = Mat2::identity();
    let step = |cur: &BQF, g: &Mat2| {
        let (n, k) = rho(cur, &d, &s);
        (n, g.mul(&Mat2::s()).mul(&Mat2::t_pow(&k)))
    };
    while !is_reduced(&cur, &s) {
        let (n, h) = step(&cur, &g);
        cur = n;
        g = h;
    }
    (cur, g)
}

/// The reduced cycle of `q`, each member paired with `g` such that `q o g`
/// equals it.
pub fn cycle_with_transforms(q: &BQF) -> Vec<(BQF, Mat2)> {
    let d = q.disc();
    let s = isqrt(&d);
    let (start, mut g) = reduce_with_transform(q);
    let mut out = vec![(start.clone(), g.clone())];
    let mut cur = start.clone();
    loop {
        let (n, k) = rho(&cur, &d, &s);
        if n == start {
            return out;
        }
        g = g.mul(&Mat2::s()).mul(&Mat2::t_pow(&k));
        out.push((n.clone(), g.clone()));
        cur = n;
    }
}

/// Proper equivalence class of a form, stored as its cycle of reduced forms.
#[derive(Clone, Debug)]
pub struct FormClass {
    representative: BQF,
    cycle: Vec<BQF>,
    members: HashSet<BQF>,
    disc: BigInt,
    content: BigInt,
}

impl FormClass {
    pub fn representative(&self) -> &BQF {
        &self.representative
    }
    /// Reduced forms of the class, rotated so the smallest comes first.
    pub fn cycle(&self) -> &[BQF] {
        &self.cycle
    }
    pub fn disc(&self) -> &BigInt {
        &self.disc
    }
    pub fn content(&self) -> &BigInt {
        &self.content
    }

    pub fn contains(&self, q: &BQF) -> bool {
        if q.disc() != self.disc || q.content() != self.content {
            return false;
        }
        self.members.contains(&reduce_with_transform(q).0)
    }
}

impl PartialEq for FormClass {
    fn eq(&self, o: &Self) -> bool {
        self.disc == o.disc && self.cycle == o.cycle
    }
}

pub fn reduce_cycle(q: &BQF) -> FormClass {
    let d = q.disc();
    let s = isqrt(&d);
    let (start, _) = reduce_with_transform(q);
    let mut cycle = vec![start.clone()];
    let mut cur = rho(&start, &d, &s).0;
    while cur != start {
        cycle.push(cur.clone());
        cur = rho(&cur, &d, &s).0;
    }
    let min = (0..cycle.len()).min_by(|&i, &j| cycle[i].cmp(&cycle[j])).unwrap();
    cycle.rotate_left(min);
    FormClass {
        representative: q.clone(),
        members: cycle.iter().cloned().collect(),
        cycle,
        content: q.content(),
        disc: d,
    }
}

pub fn gamma_equivalent(q1: &BQF, q2: &BQF) -> bool {
    q1.disc() == q2.disc() && q1.content() == q2.content() && reduce_cycle(q2).contains(q1)
}

/// All forms in `cls` whose roots straddle the rational `x`, sorted.
///
/// Small cases run the divisor search directly; when `c * sqrt(D)` is large
/// the set is built from the one at `0` by walking the continued fraction of
/// `x` (see [`enumerate_straddling_recursive`]). Both give the same list.
pub fn enumerate_straddling(cls: &FormClass, x: &Rational) -> Vec<BQF> {
    let c = x.denom();
    let cost = c * c * &cls.disc;
    if cost <= BigInt::from(DIRECT_COST) {
        enumerate_straddling_direct(cls, x)
    } else {
        enumerate_straddling_recursive(cls, x)
    }
}

/// Upper bound on `c^2 D` for the direct search.
const DIRECT_COST: i64 = 1 << 34;

/// Forms of `cls` straddling `x`, from the forms straddling `0`.
///
/// With `P(x)` the set of class forms straddling `x`:
/// `P(x) = P(x - k) o T^-k`, and for `x` not an integer
/// `P(x) o S = P(-1/x) xor P(0)`, because `S` moves `infinity` to `0`.
pub fn enumerate_straddling_recursive(cls: &FormClass, x: &Rational) -> Vec<BQF> {
    let p0: HashSet<BQF> = enumerate_straddling_direct(cls, &Rational::zero()).into_iter().collect();
    // Expand x = k_0 - 1/(k_1 - 1/(k_2 - ...)) with floors, then unwind.
    let mut ks = Vec::new();
    let mut y = x.clone();
    loop {
        let k = y.floor();
        ks.push(k.to_integer());
        let f = &y - &k;
        if f.is_zero() {
            break;
        }
        y = -f.recip();
    }
    let s_inv = Mat2::s().inv();
    let mut set = p0.clone();
    for (i, k) in ks.iter().enumerate().rev() {
        if i + 1 < ks.len() {
            set = set.symmetric_difference(&p0).map(|q| form_action(q, &s_inv)).collect();
        }
        let t = Mat2::t_pow(&-k);
        set = set.iter().map(|q| form_action(q, &t)).collect();
    }
    let mut out: Vec<BQF> = set.into_iter().collect();
    out.sort();
    out
}

/// The divisor search: for `x = -d/c`, loop over `n = cB - 2dA` with
/// `n^2 < c^2 D`, then over divisors `A` of `(c^2 D - n^2) / 4`.
pub fn enumerate_straddling_direct(cls: &FormClass, x: &Rational) -> Vec<BQF> {
    // x = -d/c with c > 0
    let c = x.denom().clone();
    let d = -x.numer();
    let dd = cls.disc.clone();
    let c2d = &c * &c * &dd;
    let mut out = match (c2d.to_i64(), c.to_i64(), d.to_i64(), dd.to_i64()) {
        (Some(n), Some(c), Some(d), Some(dd)) if n < (1 << 40) => straddle_small(n, c, d, dd),
        _ => straddle_big(&c2d, &c, &d, &dd),
    };
    out.retain(|q| cls.contains(q));
    out.sort();
    out.dedup();
    out
}

fn straddle_small(c2d: i64, c: i64, d: i64, disc: i64) -> Vec<BQF> {
    let nmax = (c2d as f64).sqrt() as i64 + 2;
    let start = {
        let mut s = -nmax;
        if (s - c2d).rem_euclid(2) != 0 {
            s += 1;
        }
        s
    };
    let ns: Vec<i64> = (start..=nmax)
        .step_by(2)
        .filter(|n| (n * n) < c2d)
        .collect();
    ns.par_iter()
        .flat_map_iter(|&n| {
            let big_n = ((c2d - n * n) / 4) as u64;
            let mut found = Vec::new();
            for a in divisors_u64(big_n) {
                let a = a as i128;
                let num = n as i128 + 2 * d as i128 * a;
                if num % c as i128 != 0 {
                    continue;
                }
                let b = num / c as i128;
                let cn = b * b - disc as i128;
                if cn % (4 * a) != 0 {
                    continue;
                }
                let cc = cn / (4 * a);
                let q = BQF::new_unchecked(a.into(), b.into(), cc.into());
                found.push(q.neg());
                found.push(q);
            }
            found
        })
        .collect()
}

fn straddle_big(c2d: &BigInt, c: &BigInt, d: &BigInt, disc: &BigInt) -> Vec<BQF> {
    let nmax = isqrt(c2d);
    let mut n = -&nmax;
    if !(&n - c2d).is_even() {
        n += 1;
    }
    let mut found = Vec::new();
    while &n * &n < *c2d {
        let big_n: BigInt = (c2d - &n * &n) / 4;
        for a in divisors_big(&big_n) {
            let num: BigInt = &n + 2 * d * &a;
            if !num.is_multiple_of(c) {
                continue;
            }
            let b = num / c;
            let cn = &b * &b - disc;
            if !cn.is_multiple_of(&(4 * &a)) {
                continue;
            }
            let cc = cn / (4 * &a);
            let q = BQF::new_unchecked(a, b, cc);
            found.push(q.neg());
            found.push(q);
        }
        n += 2;
    }
    found
}

/// Forms whose roots satisfy `w' < p < w` strictly.
///
/// Panics if `p` is a root of one of the forms.
pub fn filter_straddle_point(forms: &[BQF], p: &Real) -> Vec<BQF> {
    forms
        .iter()
        .filter(|q| {
            let s = q.straddle_sign(p);
            assert!(s != 0, "{p} is a root of {q}");
            s < 0
        })
        .cloned()
        .collect()
}

/// Convenience for `[A,B,C]` literals in tests and examples.
pub fn bqf(a: i64, b: i64, c: i64) -> BQF {
    BQF::new_unchecked(a.into(), b.into(), c.into())
}

impl FormClass {
    /// Class of `q`, or an error when `q` is not a valid indefinite form.
    pub fn of(q: &BQF) -> Result<Self> {
        BQF::new(q.a.clone(), q.b.clone(), q.c.clone())?;
        Ok(reduce_cycle(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[BQF]) -> Vec<String> {
        v.iter().map(|q| q.to_string()).collect()
    }

    #[test]
    fn action_examples() {
        let q = bqf(1, -1, -1);
        assert_eq!(form_action(&q, &Mat2::identity()), q);
        assert_eq!(form_action(&q, &Mat2::t()), bqf(1, 1, -1));
    }

    #[test]
    fn root_examples() {
        let (w, wp) = roots(&bqf(1, -1, -1)).unwrap();
        assert_eq!((w.to_string(), wp.to_string()), ("(1+1*sqrt(5))/2".into(), "(1-1*sqrt(5))/2".into()));
        let (w, wp) = roots(&bqf(1, 0, -3)).unwrap();
        assert_eq!((w.to_string(), wp.to_string()), ("(0+1*sqrt(3))/1".into(), "(0-1*sqrt(3))/1".into()));
        assert_eq!(roots(&bqf(-1, 0, 3)).unwrap(), roots(&bqf(1, 0, -3)).unwrap());
        assert_eq!(roots(&bqf(0, 1, 1)), Err(Error::DegenerateLeadingCoefficient));
    }

    #[test]
    fn cycles() {
        let c = reduce_cycle(&bqf(1, -1, -1));
        assert!(c.cycle().contains(&bqf(1, 1, -1)));
        assert!(c.cycle().len() % 2 == 0);
        assert!(reduce_cycle(&bqf(1, -2, -2)) != reduce_cycle(&bqf(2, -2, -1)));
        assert!(reduce_cycle(&bqf(1, -2, -2)) == reduce_cycle(&bqf(-2, -6, -3)));
    }

    #[test]
    fn equivalence() {
        assert!(gamma_equivalent(&bqf(1, -1, -1), &bqf(1, 3, 1)));
        assert!(!gamma_equivalent(&bqf(1, -2, -2), &bqf(2, -2, -1)));
        assert!(!gamma_equivalent(&bqf(2, 0, -4), &bqf(1, 0, -8)));
    }

    #[test]
    fn transform_is_tracked() {
        let q = bqf(7, 23, -11);
        let (r, g) = reduce_with_transform(&q);
        assert_eq!(form_action(&q, &g), r);
    }

    #[test]
    fn straddling_examples() {
        let x = Rational::from_integer((-1).into());
        let cls = reduce_cycle(&bqf(1, -1, -1));
        let l = enumerate_straddling(&cls, &x);
        assert_eq!(names(&l), ["[-1,-3,-1]", "[-1,-1,1]", "[1,1,-1]", "[1,3,1]"]);
        assert!(filter_straddle_point(&l, &"(1+sqrt(5))/2".parse().unwrap()).is_empty());

        let l1 = enumerate_straddling(&reduce_cycle(&bqf(1, -2, -2)), &x);
        assert_eq!(
            names(&l1),
            ["[-3,-6,-2]", "[-2,-6,-3]", "[-2,-2,1]", "[1,0,-3]", "[1,2,-2]", "[1,4,1]"]
        );
        let l2 = enumerate_straddling(&reduce_cycle(&bqf(2, -2, -1)), &x);
        let neg: Vec<BQF> = {
            let mut v: Vec<BQF> = l1.iter().map(BQF::neg).collect();
            v.sort();
            v
        };
        assert_eq!(l2, neg);
        let mut all = l1.clone();
        all.extend(l2);
        let f = filter_straddle_point(&all, &"(1+sqrt(5))/2".parse().unwrap());
        assert_eq!(names(&f), ["[1,0,-3]", "[-1,0,3]"]);
    }

    #[test]
    fn big_path_matches_small() {
        let c2d = 5 * 7 * 7;
        let a = {
            let mut v = straddle_small(c2d, 7, -3, 5);
            v.sort();
            v
        };
        let b = {
            let mut v = straddle_big(&c2d.into(), &7.into(), &(-3).into(), &5.into());
            v.sort();
            v
        };
        assert_eq!(a, b);
    }
}
