//! Hyperbolic Dedekind and Rademacher symbols.
//!
//! Three independent routes to `Psi_gamma(sigma)`: counting straddling forms,
//! the closed continued fraction formula, and a brute force count of
//! intersecting geodesics.

use crate::contfrac::{compare_periodic_values, eval_finite, hyperbolic_to_word, orbit_shift_membership};
use crate::error::{Error, Result};
use crate::exact_arith::{mobius_apply, Proj, Rational, Real};
use crate::modular_group::{assoc_form, attracting_fixed_point, fixed_points, is_hyperbolic, normalize_hyperbolic, Mat2};
use crate::qforms::{cycle_with_transforms, enumerate_straddling, filter_straddle_point, form_action, reduce_cycle, roots, FormClass, BQF};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::HashSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HypMethod {
    FormCount,
    CFFormula,
    IntersectionOracle,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypSymbolReport {
    pub method: HypMethod,
    pub phi: i64,
    pub psi: i64,
    /// The conjugate of the normalized sigma actually used.
    pub sigma_used: Mat2,
    /// Class forms straddling `sigma_used^-1 i infinity`.
    pub straddling: Vec<BQF>,
    /// Those that also straddle the attracting fixed point of `sigma_used`.
    pub straddling_both: Vec<BQF>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SecondFormula {
    pub psi: i64,
    /// The double sum of deltas.
    pub psi_correction: i64,
    pub min_sum: i64,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct OracleReport {
    pub count: usize,
    pub depth: usize,
    /// Count found at each depth `0..=depth`.
    pub counts: Vec<usize>,
    /// Same count at `depth - 1` and `depth`, and equal to `tile_count`.
    pub stable: bool,
    /// Crossings found by walking the tiles met by one period of the axis.
    pub tile_count: usize,
}

fn small(x: &BigInt) -> i64 {
    x.to_i64().expect("word entries fit in i64")
}

/// Validates `gamma` and returns the class of its form.
pub fn gamma_class(gamma: &Mat2) -> Result<FormClass> {
    if !is_hyperbolic(gamma) || !gamma.is_normalized() {
        return Err(Error::GammaNotNormalized);
    }
    let (_, _, e) = hyperbolic_to_word(gamma)?;
    if e != 1 {
        return Err(Error::GammaNotPrimitive);
    }
    Ok(reduce_cycle(&assoc_form(gamma)?))
}

/// `sigma^-1 i infinity = -d/c`, or `None` when `c = 0`.
fn sigma_cusp(sigma: &Mat2) -> Option<Rational> {
    if sigma.c().is_zero() {
        None
    } else {
        Some(Rational::new(-sigma.d(), sigma.c().clone()))
    }
}

/// `Phi_gamma(sigma)` and the forms it counts.
pub fn phi_hyp_forms(cls: &FormClass, sigma: &Mat2) -> (i64, Vec<BQF>) {
    match sigma_cusp(sigma) {
        None => (0, Vec::new()),
        Some(x) => {
            let l = enumerate_straddling(cls, &x);
            (-(l.len() as i64), l)
        }
    }
}

pub fn phi_hyp(gamma: &Mat2, sigma: &Mat2) -> Result<i64> {
    let cls = gamma_class(gamma)?;
    Ok(phi_hyp_forms(&cls, sigma).0)
}

/// Normalizes a hyperbolic `sigma`, then conjugates it to the member of its
/// class whose lower-left entry is smallest. `Psi_gamma` is unchanged by both
/// steps, and a small lower-left entry keeps the enumeration short.
pub fn sigma_representative(sigma: &Mat2) -> Result<Mat2> {
    if !is_hyperbolic(sigma) {
        return Err(Error::SigmaNotHyperbolic);
    }
    let (n, _) = normalize_hyperbolic(sigma)?;
    let best = cycle_with_transforms(&assoc_form(&n)?)
        .into_iter()
        .filter(|(q, _)| q.a().is_positive())
        .min_by(|x, y| x.0.a().cmp(y.0.a()));
    Ok(match best {
        Some((q, g)) if q.a() < n.c() => {
            let m = n.conj_by(&g);
            debug_assert!(m.is_normalized());
            m
        }
        _ => n,
    })
}

pub fn psi_hyp_first_with_class(cls: &FormClass, sigma: &Mat2) -> Result<HypSymbolReport> {
    let s = sigma_representative(sigma)?;
    let (phi, straddling) = phi_hyp_forms(cls, &s);
    let w = Real::Quad(attracting_fixed_point(&s)?);
    let both = filter_straddle_point(&straddling, &w);
    Ok(HypSymbolReport {
        method: HypMethod::FormCount,
        phi,
        psi: phi + 2 * both.len() as i64,
        sigma_used: s,
        straddling,
        straddling_both: both,
    })
}

pub fn psi_hyp_first(gamma: &Mat2, sigma: &Mat2) -> Result<HypSymbolReport> {
    let cls = gamma_class(gamma)?;
    psi_hyp_first_with_class(&cls, sigma)
}

/// `Phi_gamma(S) = -2 * sum(word)`.
pub fn phi_gamma_s(word: &[BigInt]) -> i64 {
    -2 * word.iter().map(small).sum::<i64>()
}

/// `Phi_gamma(S)` plus twice the number of class forms straddling both `0`
/// and `x`.
pub fn e_gamma_count(cls: &FormClass, word: &[BigInt], x: &Rational) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let at0 = enumerate_straddling(cls, &Rational::zero());
    let both = filter_straddle_point(&at0, &Real::Rat(x.clone()));
    Ok(phi_gamma_s(word) + 2 * both.len() as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// `x = -[tail]`, tail of odd length.
    Odd,
    /// `x = [tail]`, tail of even length.
    Even,
}

/// Cyclic index.
fn at(a: &[i64], i: i64) -> i64 {
    a[i.rem_euclid(a.len() as i64) as usize]
}

/// `[a_i, a_{i+step}, ...]` with `len` entries.
fn run(a: &[i64], i: i64, step: i64, len: usize) -> Vec<i64> {
    (0..len as i64).map(|j| at(a, i + j * step)).collect()
}

fn finite_cmp(x: &[i64], y: &[i64]) -> Ordering {
    let v = |w: &[i64]| eval_finite(&w.iter().map(|&t| BigInt::from(t)).collect::<Vec<_>>());
    v(x).cmp(&v(y))
}

fn delta(b: bool) -> i64 {
    b as i64
}

/// Closed form of `e_gamma` at `x = -[tail]` (odd) or `x = [tail]` (even).
pub fn e_gamma_closed(gamma_word: &[BigInt], tail: &[BigInt], parity: Parity) -> i64 {
    let a: Vec<i64> = gamma_word.iter().map(small).collect();
    let b: Vec<i64> = tail.iter().map(small).collect();
    let n = a.len() as i64 / 2;
    let piv = b[0];
    let rest = &b[1..];
    let l = rest.len();
    let min_sum: i64 = a.iter().map(|&x| x.min(piv)).sum();
    // empty comparisons count as true
    let ge = |w: Vec<i64>| l == 0 || finite_cmp(rest, &w) != Ordering::Less;
    let gt = |w: Vec<i64>| l > 0 && finite_cmp(rest, &w) == Ordering::Greater;
    let mut corr = 0;
    for k in 0..n {
        match parity {
            Parity::Odd => {
                corr += delta(at(&a, 2 * k) >= piv) * delta(ge(run(&a, 2 * k - 1, -1, l)));
                corr += delta(at(&a, 2 * k - 1) >= piv) * delta(ge(run(&a, 2 * k, 1, l)));
            }
            Parity::Even => {
                corr += delta(at(&a, 2 * k) >= piv) * delta(gt(run(&a, 2 * k + 1, 1, l)));
                corr += delta(at(&a, 2 * k - 1) >= piv) * delta(gt(run(&a, 2 * k - 2, -1, l)));
            }
        }
    }
    -2 * (min_sum - corr)
}

/// `Phi_gamma(sigma)` for word matrices, summing `e_gamma` over the tails of
/// the sigma word.
pub fn phi_hyp_division(gamma_word: &[BigInt], sigma_word: &[BigInt]) -> i64 {
    let mut acc = phi_gamma_s(gamma_word);
    for j in 1..sigma_word.len() {
        let parity = if j % 2 == 1 { Parity::Odd } else { Parity::Even };
        acc += e_gamma_closed(gamma_word, &sigma_word[j..], parity);
    }
    acc
}

/// The closed formula for `Psi_gamma(sigma)` on period words.
pub fn psi_hyp_second(gamma_word: &[BigInt], sigma_word: &[BigInt]) -> SecondFormula {
    let a: Vec<i64> = gamma_word.iter().map(small).collect();
    let b: Vec<i64> = sigma_word.iter().map(small).collect();
    let (n, m) = (a.len() as i64 / 2, b.len() as i64 / 2);
    let (la, lb) = (a.len(), b.len());
    let min_sum: i64 = a.iter().flat_map(|&x| b.iter().map(move |&y| x.min(y))).sum();
    let w = |v: Vec<i64>| v.into_iter().map(BigInt::from).collect::<Vec<_>>();
    let cmp = |x: Vec<i64>, y: Vec<i64>| compare_periodic_values(&w(x), &w(y));
    let mut psi = 0;
    for k in 0..n {
        for l in 0..m {
            let b_odd = at(&b, 2 * l - 1);
            let b_even = at(&b, 2 * l);
            let tail_e = run(&b, 2 * l, 1, lb);
            let tail_o = run(&b, 2 * l + 1, 1, lb);
            if at(&a, 2 * k) >= b_odd && cmp(tail_e.clone(), run(&a, 2 * k - 1, -1, la)) != Ordering::Less {
                psi += 1;
            }
            if at(&a, 2 * k - 1) >= b_odd && cmp(tail_e, run(&a, 2 * k, 1, la)) != Ordering::Less {
                psi += 1;
            }
            if at(&a, 2 * k) >= b_even && cmp(tail_o.clone(), run(&a, 2 * k + 1, 1, la)) == Ordering::Greater {
                psi += 1;
            }
            if at(&a, 2 * k - 1) >= b_even && cmp(tail_o, run(&a, 2 * k - 2, -1, la)) == Ordering::Greater {
                psi += 1;
            }
        }
    }
    assert!(0 <= psi && psi <= 2 * m * n, "correction term out of range");
    SecondFormula { psi: -2 * (min_sum - psi), psi_correction: psi, min_sum }
}

/// Whether some conjugate of `gamma` shares its axis with `sigma`.
pub fn geodesics_coincide(gamma: &Mat2, sigma: &Mat2) -> Result<bool> {
    let (_, gw, _) = hyperbolic_to_word(gamma)?;
    let (w, wp) = fixed_points(sigma)?;
    Ok(orbit_shift_membership(&w, &gw).is_some() || orbit_shift_membership(&wp, &gw).is_some())
}

/// Whether the geodesics of two forms cross.
pub fn forms_intersect(q1: &BQF, q2: &BQF) -> bool {
    let t = q1.b() * q2.b() - 2 * q1.a() * q2.c() - 2 * q2.a() * q1.c();
    &t * &t < q1.disc() * q2.disc()
}

/// Counts classes of `Q_gamma o g` crossing the axis of `sigma`, modulo
/// powers of `sigma`, for `g` ranging over words in `T, T^-1, S` of length
/// at most `depth`. `None` when the geodesics coincide.
pub fn intersection_count_oracle(gamma: &Mat2, sigma: &Mat2, depth: usize) -> Result<Option<OracleReport>> {
    let cls = gamma_class(gamma)?;
    if !is_hyperbolic(sigma) || !sigma.is_normalized() {
        return Err(Error::SigmaNotHyperbolic);
    }
    if geodesics_coincide(gamma, sigma)? {
        return Ok(None);
    }
    let qs = assoc_form(sigma)?;
    let (ws, wps) = fixed_points(sigma)?;
    let (ws, wps) = (Real::Quad(ws), Real::Quad(wps));
    // [x0, sigma x0) is a fundamental interval for sigma on (w', w)
    let x0 = Real::Rat(Rational::new(sigma.a() - sigma.d(), 2 * sigma.c()));
    let apply = |g: &Mat2, r: &Real| mobius_apply(g, &Proj::Finite(r.clone())).finite().expect("inside the axis").clone();
    let sinv = sigma.inv();
    let x1 = apply(sigma, &x0);
    // `up` moves points of (w', w) towards w
    let (up, down, lo, hi) = if x1 > x0 { (sigma.clone(), sinv, x0, x1) } else { (sinv, sigma.clone(), x1, x0) };
    let canonical = |q: &BQF| -> BQF {
        let (r1, r2) = roots(q).expect("class forms have A != 0");
        let (r1, r2) = (Real::Quad(r1), Real::Quad(r2));
        let mut r = if r1 > wps && r1 < ws { r1 } else { r2 };
        let mut q = q.clone();
        // the roots of Q o g are g^-1 applied to the roots of Q
        while r >= hi {
            r = apply(&down, &r);
            q = form_action(&q, &up);
        }
        while r < lo {
            r = apply(&up, &r);
            q = form_action(&q, &down);
        }
        q
    };
    let gens = [Mat2::t(), Mat2::t().inv(), Mat2::s()];
    // Start from every reduced form of the class carried to each tile that
    // the reduction of Q_sigma walks through; the axis of sigma passes
    // near all of them.
    let mut frontier: Vec<BQF> = Vec::new();
    let mut seen: HashSet<BQF> = HashSet::new();
    for (_, g) in cycle_with_transforms(&qs) {
        let gi = g.inv();
        for p in cls.cycle() {
            let q = form_action(p, &gi);
            if seen.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    let mut found: HashSet<BQF> = HashSet::new();
    let mut counts = Vec::with_capacity(depth + 1);
    for level in 0..=depth {
        for q in &frontier {
            if forms_intersect(q, &qs) {
                found.insert(canonical(q));
            }
        }
        counts.push(found.len());
        if level == depth {
            break;
        }
        let mut next = Vec::new();
        for q in &frontier {
            for g in &gens {
                let n = form_action(q, g);
                if seen.insert(n.clone()) {
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    let count = found.len();
    // The depth heuristic alone can plateau before the last crossing is
    // reached, so stability also asks for agreement with the tile count.
    let mut tiled: HashSet<BQF> = HashSet::new();
    let near_f = forms_meeting_fundamental_domain(&cls);
    for g in tiles_along_axis(sigma) {
        let gi = g.inv();
        for p in &near_f {
            let q = form_action(p, &gi);
            if forms_intersect(&q, &qs) {
                tiled.insert(canonical(&q));
            }
        }
    }
    let tile_count = tiled.len();
    let stable = depth > 0 && counts[depth - 1] == count && count == tile_count;
    Ok(Some(OracleReport { count, depth, counts, stable, tile_count }))
}

/// Class forms whose geodesic meets the closed standard fundamental domain,
/// with a small margin so that boundary cases are kept.
fn forms_meeting_fundamental_domain(cls: &FormClass) -> Vec<BQF> {
    let d = cls.disc().clone();
    let df = d.to_f64().expect("small discriminant");
    let sd = df.sqrt();
    // the geodesic must reach height sqrt(3)/2 and pass within 1/2 + r of 0
    let amax = (df / 3.0).sqrt().floor() as i64 + 1;
    let mut out = Vec::new();
    for a in (-amax..=amax).filter(|&a| a != 0) {
        let bmax = (a.abs() as f64 + sd).ceil() as i64 + 1;
        for b in -bmax..=bmax {
            let num = BigInt::from(b) * b - &d;
            let den = BigInt::from(4 * a);
            if !(&num % &den).is_zero() {
                continue;
            }
            let q = match BQF::new(BigInt::from(a), BigInt::from(b), num / den) {
                Ok(q) if cls.contains(&q) => q,
                _ => continue,
            };
            let (c0, r) = (-(b as f64) / (2.0 * a as f64), sd / (2.0 * a.abs() as f64));
            let (lo, hi) = ((-0.5f64).max(c0 - r), 0.5f64.min(c0 + r));
            // y^2 - (1 - x^2) is linear in x along the semicircle
            let f = |x: f64| r * r - c0 * c0 - 1.0 + 2.0 * x * c0;
            if lo <= hi + 1e-9 && f(lo).max(f(hi)) >= -1e-9 {
                out.push(q);
            }
        }
    }
    out
}

/// Matrices `g` such that the tiles `gF` cover one period of the axis of
/// `sigma`: the tiles of points sampled along it plus everything within
/// three generator steps, which catches tiles only grazed between samples.
fn tiles_along_axis(sigma: &Mat2) -> HashSet<Mat2> {
    let (w, wp) = fixed_points(sigma).expect("hyperbolic");
    let (w, wp) = (w.to_f64(), wp.to_f64());
    let tr = sigma.trace().to_f64().unwrap().abs();
    let len = 2.0 * ((tr + (tr * tr - 4.0).sqrt()) / 2.0).ln();
    let steps = (len / 0.05).ceil() as usize;
    let t = Mat2::t();
    let s = Mat2::s();
    let mut centers: HashSet<Mat2> = HashSet::new();
    for k in 0..=steps {
        let e = (len * k as f64 / steps as f64).exp();
        // M(i e) with M(inf) = w, M(0) = w'
        let (zr, zi) = {
            let (nr, ni) = (wp, w * e);
            let (dr, di) = (1.0, e);
            let n2 = dr * dr + di * di;
            ((nr * dr + ni * di) / n2, (ni * dr - nr * di) / n2)
        };
        let (mut x, mut y) = (zr, zi);
        let mut h = Mat2::identity();
        for _ in 0..100_000 {
            let n = x.round();
            x -= n;
            h = Mat2::t_pow(&BigInt::from(-(n as i64))).mul(&h);
            let r2 = x * x + y * y;
            if r2 < 1.0 {
                (x, y) = (-x / r2, y / r2);
                h = s.mul(&h);
            } else {
                break;
            }
        }
        centers.insert(h.inv());
    }
    let gens = [t.clone(), t.inv(), s];
    let mut out = centers.clone();
    let mut layer: Vec<Mat2> = centers.into_iter().collect();
    for _ in 0..3 {
        let mut next = Vec::new();
        for g in &layer {
            for h in &gens {
                let n = g.mul(h);
                if out.insert(n.clone()) {
                    next.push(n);
                }
            }
        }
        layer = next;
    }
    out
}

/// `Phi(s1 s2) - Phi(s1) - Phi(s2)` and, independently, twice the number of
/// class forms straddling both `s1^-1 i infinity` and `s2 i infinity`.
pub fn phi_cocycle_defect(gamma: &Mat2, s1: &Mat2, s2: &Mat2) -> Result<(i64, i64)> {
    let cls = gamma_class(gamma)?;
    let p = |s: &Mat2| phi_hyp_forms(&cls, s).0;
    let defect = p(&s1.mul(s2)) - p(s1) - p(s2);
    let count = match (sigma_cusp(s1), mobius_apply(s2, &Proj::Infinity)) {
        (Some(x), Proj::Finite(y)) => {
            let l = enumerate_straddling(&cls, &x);
            filter_straddle_point(&l, &y).len() as i64
        }
        _ => 0,
    };
    Ok((defect, 2 * count))
}
