//! Fixed regression cases shared by the CLI `selftest` and the test suite.

use crate::analytic::{cycle_integral, e2_star, faber_polynomial, verify_cocycle};
use crate::contfrac::{
    cf_of_quadirr, compare_periodic_values, conjugate_expansion, hyperbolic_to_word, orbit_shift_membership, word,
    word_to_matrix, CFExpansion,
};
use crate::exact_arith::{mobius_apply, qi_conjugate, Proj, QuadIrr, Rational, Real};
use crate::modular_group::{assoc_form, attracting_fixed_point, classify, fixed_points, is_primitive, Mat2, MatClass};
use crate::qforms::{bqf, enumerate_straddling, filter_straddle_point, gamma_equivalent, reduce_cycle, roots, BQF};
use crate::symbols_classical::phi_classical;
use crate::symbols_hyperbolic::{
    gamma_class, intersection_count_oracle, phi_cocycle_defect, phi_hyp, phi_hyp_division, phi_hyp_forms,
    psi_hyp_first, psi_hyp_second,
};
use std::cmp::Ordering;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.to_string(), pass, detail: detail.into() }
}

fn m(a: i64, b: i64, c: i64, d: i64) -> Mat2 {
    Mat2::from_i64(a, b, c, d).expect("fixed matrices have det 1")
}

fn names<T: ToString>(v: &[T]) -> Vec<String> {
    let mut out: Vec<String> = v.iter().map(|q| q.to_string()).collect();
    out.sort();
    out
}

fn sorted(v: &[&str]) -> Vec<String> {
    let mut out: Vec<String> = v.iter().map(|s| s.to_string()).collect();
    out.sort();
    out
}

/// Golden ratio example: gamma = sigma = (2 1; 1 1).
pub fn golden_example() -> Check {
    let g = m(2, 1, 1, 1);
    match psi_hyp_first(&g, &g) {
        Ok(r) => {
            let want = sorted(&["[1,1,-1]", "[1,3,1]", "[-1,-1,1]", "[-1,-3,-1]"]);
            let ok = r.phi == -4 && r.psi == -4 && names(&r.straddling) == want;
            check("golden", ok, format!("phi={} psi={} forms={:?}", r.phi, r.psi, names(&r.straddling)))
        }
        Err(e) => check("golden", false, e.to_string()),
    }
}

/// Discriminant 12 example with both classes.
pub fn disc12_example() -> Check {
    let s = m(2, 1, 1, 1);
    let cases = [
        (
            m(3, 2, 1, 1),
            sorted(&["[-3,-6,-2]", "[-2,-6,-3]", "[-2,-2,1]", "[1,0,-3]", "[1,2,-2]", "[1,4,1]"]),
            vec!["[1,0,-3]".to_string()],
        ),
        (
            m(3, 1, 2, 1),
            sorted(&["[3,6,2]", "[2,6,3]", "[2,2,-1]", "[-1,0,3]", "[-1,-2,2]", "[-1,-4,-1]"]),
            vec!["[-1,0,3]".to_string()],
        ),
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (g, forms, both) in cases {
        let r = gamma_class(&g).map(|cls| phi_hyp_forms(&cls, &s));
        let p = psi_hyp_first(&g, &s);
        match (r, p) {
            (Ok((phi, l)), Ok(p)) => {
                let good = phi == -6 && names(&l) == forms && p.psi == -4 && names(&p.straddling_both) == both;
                ok &= good;
                detail.push(format!("{g}: phi={phi} psi={} both={:?}", p.psi, names(&p.straddling_both)));
            }
            (Err(e), _) | (_, Err(e)) => {
                ok = false;
                detail.push(e.to_string());
            }
        }
    }
    check("disc12", ok, detail.join("; "))
}

/// Second formula on the words [2,1] and [1,1].
pub fn second_formula_example() -> Check {
    let r = psi_hyp_second(&word(&[2, 1]), &word(&[1, 1]));
    check(
        "second_formula",
        r.psi_correction == 2 && r.psi == -4,
        format!("correction={} psi={}", r.psi_correction, r.psi),
    )
}

/// Continued fraction of `(3+sqrt5)/2` and a conjugate expansion.
pub fn expansion_examples() -> Check {
    let x: QuadIrr = "(3+sqrt(5))/2".parse().expect("valid literal");
    let cf = cf_of_quadirr(&x);
    let a = cf.to_string();
    let src: CFExpansion = "2,1;1,4,3,2".parse().expect("valid literal");
    let b = conjugate_expansion(&src).map(|c| c.to_string()).unwrap_or_else(|e| e.to_string());
    check(
        "expansions",
        a == "2,1;1,1" && b == "1,4;4,1,2,3",
        format!("cf={a} conj={b}"),
    )
}

/// Geodesic lengths for ten matrices of small discriminant.
pub fn geodesic_lengths() -> Check {
    let mats = [
        m(2, 1, 1, 1),
        m(3, 2, 1, 1),
        m(3, 1, 2, 1),
        m(4, 3, 1, 1),
        m(5, 4, 1, 1),
        m(3, 4, 2, 3),
        m(6, 5, 1, 1),
        m(5, 2, 2, 1),
        m(7, 6, 1, 1),
        m(4, 1, 3, 1),
    ];
    let mut worst: f64 = 0.0;
    for g in &mats {
        let tr = g.trace().to_f64().unwrap();
        let exact = 2.0 * ((tr + (tr * tr - 4.0).sqrt()) / 2.0).ln();
        match cycle_integral(g, 0, 64) {
            Ok(v) => worst = worst.max((v - exact).abs() / exact),
            Err(_) => worst = f64::INFINITY,
        }
    }
    check("geodesic_length", worst < 1e-8, format!("max relative error {worst:.2e}"))
}

pub fn faber_coefficients() -> Check {
    let c = |m: usize| {
        faber_polynomial(m, m + 1)
            .ok()
            .and_then(|p| p.coefficient(1).cloned())
            .unwrap_or_default()
    };
    let (c1, c2) = (c(1), c(2));
    let rel = |x: &BigInt, t: f64| (x.to_f64().unwrap() - t).abs() / t;
    let ok = rel(&c1, 196884.0) < 1e-3 && rel(&c2, 42987520.0) < 1e-3;
    check("faber", ok, format!("q^1 coefficients {c1}, {c2}"))
}

/// The two gammas, three sigmas and two points used for the cocycle check.
pub fn cocycle_grid() -> Vec<(Mat2, Mat2, Complex64)> {
    let gammas = [m(2, 1, 1, 1), m(3, 2, 1, 1)];
    let sigmas = [Mat2::s(), m(1, 0, 1, 1), m(2, 1, 1, 1)];
    let zs = [Complex64::new(-0.5, 1.0), Complex64::new(-0.45, 0.95)];
    let mut out = Vec::new();
    for g in &gammas {
        for s in &sigmas {
            for z in &zs {
                out.push((g.clone(), s.clone(), *z));
            }
        }
    }
    out
}

pub fn cocycle_residuals() -> Check {
    let mut worst: f64 = 0.0;
    for (g, s, z) in cocycle_grid() {
        match verify_cocycle(&g, &s, z, 200) {
            Ok(r) => worst = worst.max(r.residual),
            Err(_) => worst = f64::INFINITY,
        }
    }
    check("cocycle", worst < 1e-4, format!("max residual {worst:.2e}"))
}

pub fn e2_star_at_i() -> Check {
    let v = e2_star(Complex64::new(0.0, 1.0), 100).norm();
    check("e2_star", v < 1e-10, format!("|E2*(i)| = {v:.2e}"))
}

/// Fixed small cases from every layer, each compared against a literal.
pub fn spot_checks() -> Check {
    let mut failed: Vec<String> = Vec::new();
    let mut expect = |name: &str, ok: bool| {
        if !ok {
            failed.push(name.to_string());
        }
    };
    let qi = |s: &str| s.parse::<QuadIrr>().expect("valid literal");
    let phi5 = qi("(1+sqrt(5))/2");
    let g = m(2, 1, 1, 1);
    let g1 = m(3, 2, 1, 1);
    let g2 = m(3, 1, 2, 1);

    expect("conjugate", qi_conjugate(&qi("(36+2*sqrt(39))/19")) == qi("(36-2*sqrt(39))/19"));
    expect(
        "mobius_fixed",
        mobius_apply(&g, &Proj::Finite(Real::Quad(phi5.clone()))) == Proj::Finite(Real::Quad(phi5.clone())),
    );
    expect("classify_t", classify(&Mat2::t()) == MatClass::Parabolic);
    expect("classify_s", classify(&Mat2::s()) == MatClass::Elliptic);
    expect("classify_g", classify(&g) == MatClass::Hyperbolic);
    let form = |x: &Mat2| assoc_form(x).map(|q| q.to_string()).unwrap_or_default();
    expect("assoc_form", form(&g) == "[1,-1,-1]" && form(&g1) == "[1,-2,-2]" && form(&g2) == "[2,-2,-1]");
    expect(
        "fixed_points",
        fixed_points(&g).ok() == Some((phi5.clone(), qi("(1-sqrt(5))/2")))
            && attracting_fixed_point(&g).ok() == Some(phi5.clone()),
    );
    expect("primitive", is_primitive(&g) == Ok(true) && is_primitive(&g.mul(&g)) == Ok(false));
    expect("word_matrix", word_to_matrix(&word(&[2, 1])).ok() == Some(g1.clone()) && is_primitive(&g1) == Ok(true));
    let cf = |x: &str| cf_of_quadirr(&qi(x)).to_string();
    expect("cf_golden", cf("(1+sqrt(5))/2") == ";1,1");
    expect("cf_sqrt39", cf("(36+2*sqrt(39))/19") == "2,1;1,4,3,2");
    expect(
        "to_word",
        hyperbolic_to_word(&g1).ok() == Some((Mat2::identity(), word(&[2, 1]), 1)),
    );
    expect(
        "orbit_shift",
        orbit_shift_membership(&qi("(3+sqrt(5))/2"), &word(&[1, 1])) == Some((2, 0)),
    );
    expect(
        "periodic_order",
        compare_periodic_values(&word(&[1, 1]), &word(&[1, 2])) == Ordering::Greater
            && compare_periodic_values(&word(&[2, 1]), &word(&[1, 2])) == Ordering::Greater,
    );
    expect(
        "roots",
        roots(&bqf(1, -1, -1)).ok() == Some((phi5.clone(), qi("(1-sqrt(5))/2")))
            && roots(&bqf(1, 0, -3)).ok() == Some((qi("sqrt(3)"), qi("-sqrt(3)"))),
    );
    expect(
        "equivalence",
        !gamma_equivalent(&bqf(1, -2, -2), &bqf(2, -2, -1))
            && gamma_equivalent(&bqf(1, -2, -2), &bqf(-2, -6, -3))
            && gamma_equivalent(&bqf(1, -1, -1), &bqf(1, 3, 1)),
    );
    let minus_one = Rational::from_integer(BigInt::from(-1));
    let second = enumerate_straddling(&reduce_cycle(&bqf(2, -2, -1)), &minus_one);
    expect(
        "straddle_second_class",
        names(&second) == sorted(&["[3,6,2]", "[2,6,3]", "[2,2,-1]", "[-1,0,3]", "[-1,-2,2]", "[-1,-4,-1]"]),
    );
    let first = enumerate_straddling(&reduce_cycle(&bqf(1, -2, -2)), &minus_one);
    let all: Vec<BQF> = first.iter().chain(&second).cloned().collect();
    let p = Real::Quad(phi5.clone());
    expect("filter_12", names(&filter_straddle_point(&all, &p)) == sorted(&["[1,0,-3]", "[-1,0,3]"]));
    let four = enumerate_straddling(&reduce_cycle(&bqf(1, -1, -1)), &minus_one);
    expect("filter_4", filter_straddle_point(&four, &p).is_empty());
    expect("phi_t", phi_classical(&Mat2::t()).ok() == Some(Rational::from_integer(BigInt::from(1))));
    expect("phi_hyp_t", phi_hyp(&g, &Mat2::t()) == Ok(0));
    expect("phi_hyp_46", phi_hyp(&g1, &g) == Ok(-6) && phi_hyp(&g2, &g) == Ok(-6));
    expect(
        "division",
        phi_hyp_division(&word(&[2, 1]), &word(&[1, 1])) == -6 && phi_hyp_division(&word(&[1, 1]), &word(&[1, 1])) == -4,
    );
    for gm in [&g1, &g2] {
        let ok = matches!(intersection_count_oracle(gm, &g, 8), Ok(Some(r)) if r.count == 4 && r.stable);
        expect("oracle", ok);
    }
    expect("oracle_coinciding", matches!(intersection_count_oracle(&g, &g, 8), Ok(None)));
    expect("defect_parabolic", phi_cocycle_defect(&g, &Mat2::t(), &g1).map(|r| r.0) == Ok(0));
    let j1 = faber_polynomial(1, 2).map(|p| p.coeffs);
    let j2 = faber_polynomial(2, 3).map(|p| p.coeffs);
    let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    expect(
        "faber_polys",
        faber_polynomial(0, 1).map(|p| p.coeffs) == Ok(big(&[1]))
            && j1 == Ok(big(&[-744, 1]))
            && j2 == Ok(big(&[159768, -1488, 1])),
    );
    let exact = 2.0 * ((3.0 + 5f64.sqrt()) / 2.0).ln();
    expect("val0", cycle_integral(&g, 0, 64).map(|v| (v - exact).abs() < 1e-8) == Ok(true));
    let detail = if failed.is_empty() { "all spot checks match".to_string() } else { format!("mismatch: {}", failed.join(", ")) };
    check("spot_checks", failed.is_empty(), detail)
}

pub fn run_all() -> Vec<Check> {
    vec![
        spot_checks(),
        golden_example(),
        disc12_example(),
        second_formula_example(),
        expansion_examples(),
        geodesic_lengths(),
        faber_coefficients(),
        cocycle_residuals(),
        e2_star_at_i(),
    ]
}
