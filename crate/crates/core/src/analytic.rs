//! Floating point modular functions, cycle integrals of `j_m` and the
//! generating function `F_gamma`.
//!
//! Everything here is double precision. The exact modules are the reference;
//! these routines only corroborate them numerically.

use crate::error::{Error, Result};
use crate::modular_group::{fixed_points, is_hyperbolic, normalize_hyperbolic, Mat2};
use crate::qforms::BQF;
use crate::symbols_hyperbolic::{gamma_class, phi_hyp_forms, psi_hyp_first_with_class};
use crate::util::divisors_u64;
use gauss_quad::GaussLegendre;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Terms used for q-series at points of the fundamental domain, where
/// `|q| < exp(-pi sqrt 3)`; the tail is far below double precision.
const REDUCED_TERMS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ModFn {
    E2,
    E2Star,
    Delta,
    LogDelta,
    Eta,
    J,
    JPrime,
    Jm(usize),
}

fn check_upper(z: Complex64) -> Result<()> {
    if z.im > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveImaginaryPart)
    }
}

fn qexp(z: Complex64) -> Complex64 {
    (2.0 * PI * I * z).exp()
}

fn sigma_k(n: u64, k: i32) -> f64 {
    divisors_u64(n).iter().map(|&d| (d as f64).powi(k)).sum()
}

/// `sum_{n <= terms} c(n) q^n` with `c(0) = c0`.
fn lambert(q: Complex64, terms: usize, c0: f64, scale: f64, k: i32) -> Complex64 {
    let mut acc = Complex64::new(c0, 0.0);
    let mut qn = Complex64::one();
    for n in 1..=terms {
        qn *= q;
        acc += qn * (scale * sigma_k(n as u64, k));
    }
    acc
}

pub fn e2(z: Complex64, terms: usize) -> Complex64 {
    lambert(qexp(z), terms, 1.0, -24.0, 1)
}

/// `E_2(z) - 3 / (pi y)`.
pub fn e2_star(z: Complex64, terms: usize) -> Complex64 {
    e2(z, terms) - 3.0 / (PI * z.im)
}

pub fn e4(z: Complex64, terms: usize) -> Complex64 {
    lambert(qexp(z), terms, 1.0, 240.0, 3)
}

/// `2 pi i z + 24 sum Log(1 - q^n)`, the branch fixed by the product.
pub fn log_delta(z: Complex64, terms: usize) -> Complex64 {
    let q = qexp(z);
    let mut acc = 2.0 * PI * I * z;
    let mut qn = Complex64::one();
    for _ in 1..=terms {
        qn *= q;
        acc += 24.0 * (Complex64::one() - qn).ln();
    }
    acc
}

pub fn delta(z: Complex64, terms: usize) -> Complex64 {
    log_delta(z, terms).exp()
}

pub fn eta(z: Complex64, terms: usize) -> Complex64 {
    (log_delta(z, terms) / 24.0).exp()
}

/// Moves `z` into the standard fundamental domain. Returns the image and
/// `(c, d)` of the matrix used, so that weight `k` forms pick up `(cz+d)^k`.
pub fn reduce_point(z: Complex64) -> (Complex64, f64, f64) {
    // rows (a, b; c, d) of the accumulated matrix
    let (mut a, mut b, mut c, mut d) = (1.0, 0.0, 0.0, 1.0);
    let mut w = z;
    for _ in 0..10_000 {
        let n = w.re.round();
        w.re -= n;
        a -= n * c;
        b -= n * d;
        if w.norm_sqr() < 1.0 - 1e-15 {
            w = -1.0 / w;
            (a, b, c, d) = (-c, -d, a, b);
        } else {
            break;
        }
    }
    (w, c, d)
}

/// `j = E_4^3 / Delta`, evaluated at the reduced point.
pub fn j(z: Complex64, terms: usize) -> Complex64 {
    let (w, _, _) = reduce_point(z);
    let t = terms.min(REDUCED_TERMS).max(1);
    e4(w, t).powi(3) / delta(w, t)
}

fn j_coefficients() -> &'static Vec<f64> {
    static C: OnceLock<Vec<f64>> = OnceLock::new();
    C.get_or_init(|| {
        j_expansion(REDUCED_TERMS + 2).iter().map(|c| c.to_f64().unwrap()).collect()
    })
}

/// `(2 pi i)^-1 dj/dz`, differentiating the q-expansion term by term at the
/// reduced point and carrying the weight 2 factor back.
pub fn j_prime(z: Complex64, terms: usize) -> Complex64 {
    let (w, c, d) = reduce_point(z);
    let q = qexp(w);
    let coef = j_coefficients();
    // coef[k] multiplies q^(k-1)
    let mut acc = -1.0 / q;
    let mut qn = Complex64::one();
    for n in 1..=terms.min(REDUCED_TERMS) {
        qn *= q;
        acc += qn * (n as f64 * coef[n + 1]);
    }
    let f = c * z + d;
    acc / (f * f)
}

/// `j_m` as the Hecke sum `sum_{ad=m, 0<=b<d} j_1((a z + b)/d)`; this avoids
/// the cancellation in the Faber polynomial coefficients.
pub fn j_m(m: usize, z: Complex64, terms: usize) -> Complex64 {
    j_m_with_mass(m, z, terms).0
}

/// `j_m(z)` and the sum of the magnitudes of its Hecke terms, a scale for
/// its rounding error.
fn j_m_with_mass(m: usize, z: Complex64, terms: usize) -> (Complex64, f64) {
    if m == 0 {
        return (Complex64::one(), 1.0);
    }
    let mut acc = Complex64::zero();
    let mut mass = 0.0;
    for a in divisors_u64(m as u64) {
        let d = m as u64 / a;
        for b in 0..d {
            let v = j(((a as f64) * z + b as f64) / d as f64, terms) - 744.0;
            acc += v;
            mass += v.norm();
        }
    }
    (acc, mass)
}

pub fn eval_modular(f: ModFn, z: Complex64, terms: usize) -> Result<Complex64> {
    check_upper(z)?;
    if terms == 0 {
        return Err(Error::TruncationTooSmall(0));
    }
    Ok(match f {
        ModFn::E2 => e2(z, terms),
        ModFn::E2Star => e2_star(z, terms),
        ModFn::Delta => delta(z, terms),
        ModFn::LogDelta => log_delta(z, terms),
        ModFn::Eta => eta(z, terms),
        ModFn::J => j(z, terms),
        ModFn::JPrime => j_prime(z, terms),
        ModFn::Jm(m) => j_m(m, z, terms),
    })
}

fn mul_trunc(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `q j(q)` up to `q^n` exclusive, i.e. `j` from `q^-1` to
/// `q^(n-2)`.
pub fn j_expansion(n: usize) -> Vec<BigInt> {
    let mut e4 = vec![BigInt::one(); 1];
    for k in 1..n {
        e4.push(BigInt::from(240) * BigInt::from(sigma_k(k as u64, 3) as u64));
    }
    let e4c = mul_trunc(&mul_trunc(&e4, &e4, n), &e4, n);
    // prod (1 - q^k)^24
    let mut p = vec![BigInt::zero(); n];
    p[0] = BigInt::one();
    for k in 1..n {
        for _ in 0..24 {
            for i in (k..n).rev() {
                let t = p[i - k].clone();
                p[i] -= t;
            }
        }
    }
    // inverse of a series with constant term 1
    let mut inv = vec![BigInt::zero(); n];
    inv[0] = BigInt::one();
    for i in 1..n {
        let mut s = BigInt::zero();
        for k in 1..=i {
            s += &p[k] * &inv[i - k];
        }
        inv[i] = -s;
    }
    mul_trunc(&e4c, &inv, n)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FaberPolynomial {
    pub m: usize,
    /// Coefficients of `1, j, ..., j^m`.
    pub coeffs: Vec<BigInt>,
    /// Expansion of `P_m(j)` from `q^-m` up to `q^(M-m)`.
    pub expansion: Vec<BigInt>,
}

impl FaberPolynomial {
    /// Coefficient of `q^k` in the expansion.
    pub fn coefficient(&self, k: i64) -> Option<&BigInt> {
        usize::try_from(k + self.m as i64).ok().and_then(|i| self.expansion.get(i))
    }
}

/// The polynomial `P_m` with `P_m(j) = q^-m + O(q)`, found by peeling powers
/// of `j` off the expansion of `j^m`.
pub fn faber_polynomial(m: usize, truncation: usize) -> Result<FaberPolynomial> {
    if truncation < m + 1 {
        return Err(Error::TruncationTooSmall(truncation));
    }
    let n = truncation + 1;
    let jq = j_expansion(n);
    // powers of q j
    let mut pows = vec![{
        let mut one = vec![BigInt::zero(); n];
        one[0] = BigInt::one();
        one
    }];
    for k in 1..=m {
        pows.push(mul_trunc(&pows[k - 1], &jq, n));
    }
    // q^m P_m(j) = sum c_k q^(m-k) (q j)^k
    let mut coeffs = vec![BigInt::zero(); m + 1];
    coeffs[m] = BigInt::one();
    let mut r = pows[m].clone();
    for i in 1..=m {
        let ri = r[i].clone();
        coeffs[m - i] = -&ri;
        for (t, c) in pows[m - i].iter().enumerate() {
            if i + t < n {
                r[i + t] -= &ri * c;
            }
        }
    }
    Ok(FaberPolynomial { m, coeffs, expansion: r })
}

/// Evaluates `P_m(j(z))` directly from the polynomial.
pub fn faber_eval(p: &FaberPolynomial, z: Complex64, terms: usize) -> Complex64 {
    let jz = j(z, terms);
    p.coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * jz + c.to_f64().unwrap())
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleIntegralTable {
    pub gamma: Mat2,
    pub nodes: usize,
    /// Real parts of the cycle integrals, `m = 0..=max_m`.
    pub values: Vec<f64>,
    /// Imaginary parts, which vanish in exact arithmetic.
    pub imag: Vec<f64>,
    /// Noise estimate: the larger of the imaginary part and a rounding
    /// bound from the magnitudes of the Hecke terms.
    pub error: Vec<f64>,
}

struct Geodesic {
    w: f64,
    wp: f64,
    length: f64,
}

fn geodesic(gamma: &Mat2) -> Result<Geodesic> {
    if !is_hyperbolic(gamma) {
        return Err(Error::NotHyperbolic);
    }
    let (w, wp) = fixed_points(gamma)?;
    let tr = gamma.trace().to_f64().unwrap().abs();
    let xi = (tr + (tr * tr - 4.0).sqrt()) / 2.0;
    Ok(Geodesic { w: w.to_f64(), wp: wp.to_f64(), length: 2.0 * xi.ln() })
}

/// Composite Gauss-Legendre on 16 point panels.
fn panel_rule(nodes: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(16).expect("degree 16 is valid");
    let panels = (nodes / 16).max(1);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * 16);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (x, wt) in rule.as_node_weight_pairs() {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * wt));
        }
    }
    out
}

fn cycle_integral_raw(g: &Geodesic, m: usize, rule: &[(f64, f64)]) -> (Complex64, f64) {
    let mut acc = Complex64::zero();
    let mut mass = 0.0;
    for &(t, wt) in rule {
        let s = I * t.exp();
        let tau = (g.w * s + g.wp) / (s + 1.0);
        let (v, mm) = j_m_with_mass(m, tau, REDUCED_TERMS);
        acc += v * wt;
        mass += mm * wt;
    }
    // the q-series and the exponentials lose a few more digits than one ulp
    (acc, mass * ROUNDING)
}

/// Integral of `j_m` over one period of the closed geodesic of `gamma`,
/// with respect to hyperbolic arc length.
pub fn cycle_integral(gamma: &Mat2, m: usize, nodes: usize) -> Result<f64> {
    let g = geodesic(gamma)?;
    let rule = panel_rule(nodes, 0.0, g.length);
    Ok(cycle_integral_raw(&g, m, &rule).0.re)
}

pub fn cycle_table(gamma: &Mat2, max_m: usize, nodes: usize) -> Result<CycleIntegralTable> {
    let g = geodesic(gamma)?;
    let rule = panel_rule(nodes, 0.0, g.length);
    let raw: Vec<(Complex64, f64)> = (0..=max_m).into_par_iter().map(|m| cycle_integral_raw(&g, m, &rule)).collect();
    Ok(CycleIntegralTable {
        gamma: gamma.clone(),
        nodes,
        values: raw.iter().map(|(v, _)| v.re).collect(),
        imag: raw.iter().map(|(v, _)| v.im).collect(),
        error: raw.iter().map(|(v, e)| e.max(v.im.abs())).collect(),
    })
}

/// Terms with `|q|^m` below this are dropped.
const TAIL: f64 = 1e-18;
const ROUNDING: f64 = 100.0 * f64::EPSILON;
pub const DEFAULT_NODES: usize = 256;

/// `F_gamma` and its primitive with a cycle integral table.
#[derive(Clone, Debug, Serialize)]
pub struct FGamma {
    pub table: CycleIntegralTable,
}

impl FGamma {
    /// Table large enough for points with imaginary part at least `min_im`.
    pub fn for_height(gamma: &Mat2, min_im: f64, truncation: usize, nodes: usize) -> Result<Self> {
        let need = (-TAIL.ln() / (2.0 * PI * min_im)).ceil() as usize;
        Ok(FGamma { table: cycle_table(gamma, need.min(truncation), nodes)? })
    }

    /// Number of terms used at `z`: stops where `|q|^m` is negligible or at
    /// the first coefficient that is mostly noise.
    pub fn terms_at(&self, z: Complex64) -> usize {
        let aq = (-2.0 * PI * z.im).exp();
        let t = &self.table;
        let mut m = 1;
        while m < t.values.len() {
            let p = aq.powi(m as i32);
            if p < TAIL || 2.0 * t.error[m] >= t.values[m].abs() {
                break;
            }
            m += 1;
        }
        m
    }

    pub fn f(&self, z: Complex64) -> Result<Complex64> {
        check_upper(z)?;
        let q = qexp(z);
        let n = self.terms_at(z);
        let mut acc = Complex64::new(self.table.values[0], 0.0);
        let mut qm = Complex64::one();
        for m in 1..n {
            qm *= q;
            acc += qm * self.table.values[m];
        }
        Ok(acc)
    }

    /// `val_0 z + (2 pi i)^-1 sum val_m q^m / m`.
    pub fn g(&self, z: Complex64) -> Result<Complex64> {
        check_upper(z)?;
        let q = qexp(z);
        let n = self.terms_at(z);
        let mut acc = Complex64::zero();
        let mut qm = Complex64::one();
        for m in 1..n {
            qm *= q;
            acc += qm * (self.table.values[m] / m as f64);
        }
        Ok(z * self.table.values[0] + acc / (2.0 * PI * I))
    }
}

pub fn f_gamma(gamma: &Mat2, z: Complex64, truncation: usize) -> Result<Complex64> {
    check_upper(z)?;
    FGamma::for_height(gamma, z.im, truncation, DEFAULT_NODES)?.f(z)
}

pub fn g_gamma(gamma: &Mat2, z: Complex64, truncation: usize) -> Result<Complex64> {
    check_upper(z)?;
    FGamma::for_height(gamma, z.im, truncation, DEFAULT_NODES)?.g(z)
}

fn mobius_f64(m: &Mat2, z: Complex64) -> Complex64 {
    let [a, b, c, d] = m.to_f64();
    (z * a + b) / (z * c + d)
}

fn form_at(q: &BQF, z: Complex64) -> Complex64 {
    let (a, b, c) = (q.a().to_f64().unwrap(), q.b().to_f64().unwrap(), q.c().to_f64().unwrap());
    z * z * a + z * b + c
}

/// Below this height the truncated `F_gamma` is not trusted.
pub const MIN_HEIGHT: f64 = 0.6;

#[derive(Clone, Debug, Serialize)]
pub struct CocycleCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub forms: Vec<BQF>,
}

/// Compares `(cz+d)^-2 F(sigma z) - F(z)` with the rational function built
/// from the class forms straddling `sigma^-1 i infinity`.
pub fn verify_cocycle(gamma: &Mat2, sigma: &Mat2, z: Complex64, truncation: usize) -> Result<CocycleCheck> {
    check_upper(z)?;
    let cls = gamma_class(gamma)?;
    let sz = mobius_f64(sigma, z);
    let low = z.im.min(sz.im);
    if low < MIN_HEIGHT {
        return Err(Error::DomainTooLow(low));
    }
    let fg = FGamma::for_height(gamma, low, truncation, DEFAULT_NODES)?;
    let [_, _, c, d] = sigma.to_f64();
    let j = z * c + d;
    let lhs = fg.f(sz)? / (j * j) - fg.f(z)?;
    let (_, forms) = phi_hyp_forms(&cls, sigma);
    let root_d = cls.disc().to_f64().unwrap().sqrt();
    let rhs: Complex64 = forms
        .iter()
        .map(|q| root_d * q.sign() as f64 / form_at(q, z))
        .sum();
    Ok(CocycleCheck { lhs, rhs, residual: (lhs - rhs).norm(), forms })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralDiagnostic {
    /// `(2/pi) Im R(sigma, sigma^n i)` for `n = 0..=n_max`.
    pub partials: Vec<f64>,
    pub exact_psi: i64,
    /// Point where `R(sigma, .)` is taken from the series.
    pub base_point: Complex64,
}

/// Partial values of the integral expression for `Psi_gamma(sigma)`.
///
/// `R(sigma, z) = G(sigma z) - G(z)` is taken from the series once, at a point
/// where both `z` and `sigma z` sit at height `1/c`; it is carried to
/// `sigma^n i` by integrating its derivative, a rational function with
/// logarithmic primitive. The series itself is useless at `sigma^n i`, which
/// tends to the real axis.
pub fn verify_integral_psi(gamma: &Mat2, sigma: &Mat2, n_max: usize, truncation: usize) -> Result<IntegralDiagnostic> {
    let cls = gamma_class(gamma)?;
    if !is_hyperbolic(sigma) {
        return Err(Error::SigmaNotHyperbolic);
    }
    let (s, _) = normalize_hyperbolic(sigma)?;
    if s != *sigma {
        return Err(Error::NotNormalized);
    }
    let exact_psi = psi_hyp_first_with_class(&cls, sigma)?.psi;
    let [_, _, c, d] = sigma.to_f64();
    let base = Complex64::new(-d / c, 1.0 / c);
    let fg = FGamma::for_height(gamma, 1.0 / c, truncation, DEFAULT_NODES)?;
    let r_base = fg.g(mobius_f64(sigma, base))? - fg.g(base)?;
    let (_, forms) = phi_hyp_forms(&cls, sigma);
    let roots: Vec<(f64, f64)> = forms
        .iter()
        .map(|q| {
            let (w, wp) = crate::qforms::roots(q).expect("indefinite");
            (w.to_f64(), wp.to_f64())
        })
        .collect();
    // primitive of sqrt(D) sgn(Q) / Q(u, 1), continuous on the upper half plane
    let prim = |u: Complex64| -> Complex64 { roots.iter().map(|&(w, wp)| ((u - w) / (u - wp)).ln()).sum() };
    let mut z = I;
    let mut partials = Vec::with_capacity(n_max + 1);
    for _ in 0..=n_max {
        let r = r_base + prim(z) - prim(base);
        partials.push(2.0 / PI * r.im);
        z = mobius_f64(sigma, z);
    }
    Ok(IntegralDiagnostic { partials, exact_psi, base_point: base })
}

/// `j'(z) / (j(tau) - j(z)) - E_2^*(z)`.
pub fn elliptic_limit_object(z: Complex64, tau: Complex64, terms: usize) -> Result<Complex64> {
    check_upper(z)?;
    check_upper(tau)?;
    let jz = j(z, terms);
    let gap = j(tau, terms) - jz;
    if gap.norm() < 1e-9 * (1.0 + jz.norm()) {
        return Err(Error::PoleProximity(gap.norm()));
    }
    Ok(j_prime(z, terms) / gap - e2_star(z, terms))
}

/// Coefficient of `q^m` of a 1-periodic `f`, by the trapezoid rule along
/// `Im z = y`.
pub fn fourier_coefficient(f: impl Fn(Complex64) -> Complex64, m: i64, y: f64, samples: usize) -> Complex64 {
    let mut acc = Complex64::zero();
    for k in 0..samples {
        let x = k as f64 / samples as f64;
        acc += f(Complex64::new(x, y)) * (-2.0 * PI * I * (m as f64) * x).exp();
    }
    acc / samples as f64 * (2.0 * PI * m as f64 * y).exp()
}
