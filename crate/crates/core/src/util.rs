use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

pub(crate) fn sgn(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Floor of the square root of a non-negative integer.
pub(crate) fn isqrt(x: &BigInt) -> BigInt {
    debug_assert!(!x.is_negative());
    x.sqrt()
}

pub(crate) fn is_square(x: &BigInt) -> bool {
    if x.is_negative() {
        return false;
    }
    let s = isqrt(x);
    &s * &s == *x
}

fn factor_biguint(n: &BigUint) -> BTreeMap<BigUint, usize> {
    if let Some(v) = n.to_u64() {
        return num_prime::nt_funcs::factorize64(v)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
    }
    if let Some(v) = n.to_u128() {
        return num_prime::nt_funcs::factorize128(v)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
    }
    let (mut found, rest) = num_prime::nt_funcs::factors(n.clone(), None);
    // Cofactors the factorizer gave up on are kept whole; a perfect square
    // among them is still recognized.
    for r in rest.unwrap_or_default() {
        let s = r.sqrt();
        if &s * &s == r {
            *found.entry(s).or_insert(0) += 2;
        } else {
            *found.entry(r).or_insert(0) += 1;
        }
    }
    found
}

fn squarefree_cache() -> &'static Mutex<HashMap<BigInt, (BigInt, BigInt)>> {
    static CACHE: OnceLock<Mutex<HashMap<BigInt, (BigInt, BigInt)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Writes a positive integer as `f^2 * s` with `s` squarefree; returns `(f, s)`.
pub(crate) fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive());
    if let Some(hit) = squarefree_cache().lock().unwrap().get(n) {
        return hit.clone();
    }
    let mut f = BigInt::one();
    let mut s = BigInt::one();
    for (p, e) in factor_biguint(n.magnitude()) {
        let p = BigInt::from(p);
        for _ in 0..e / 2 {
            f *= &p;
        }
        if e % 2 == 1 {
            s *= &p;
        }
    }
    let mut cache = squarefree_cache().lock().unwrap();
    if cache.len() > 4096 {
        cache.clear();
    }
    cache.insert(n.clone(), (f.clone(), s.clone()));
    (f, s)
}

/// All positive divisors of `n > 0`, unsorted.
pub(crate) fn divisors_u64(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in num_prime::nt_funcs::factorize64(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs
}

pub(crate) fn divisors_big(n: &BigInt) -> Vec<BigInt> {
    if let Some(v) = n.to_u64() {
        return divisors_u64(v).into_iter().map(BigInt::from).collect();
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factor_biguint(n.magnitude()) {
        let p = BigInt::from(p);
        let len = divs.len();
        let mut pk = BigInt::one();
        for _ in 0..e {
            pk *= &p;
            for i in 0..len {
                let d = &divs[i] * &pk;
                divs.push(d);
            }
        }
    }
    divs
}

pub(crate) fn gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    a.gcd(b).gcd(c)
}

pub(crate) fn big(x: i64) -> BigInt {
    BigInt::from(x)
}
