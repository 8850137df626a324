//! Integer foundations: factorization, multiplicative functions, Kronecker symbol,
//! modular square roots and the exact rational type.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Exact rational number, always stored reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Builds `num/den` as a reduced [`Rational`]. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Prime factorization of a nonzero integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factored {
    pub value: i64,
    pub factors: Vec<(u64, u32)>,
}

impl Factored {
    /// Number of distinct prime divisors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// Euler's totient of `|value|`.
    pub fn phi(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| (p - 1) * p.pow(e - 1)).product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// All positive divisors of `|value|`, sorted.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Product of the primes occurring with odd exponent.
    pub fn squarefree_part(&self) -> u64 {
        self.factors.iter().filter(|&&(_, e)| e % 2 == 1).map(|&(p, _)| p).product()
    }
}

const TABLE_LIMIT: u32 = 1 << 16;

/// Primes below 2^16.
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_below(TABLE_LIMIT as usize))
}

/// Sieve of Eratosthenes.
pub fn primes_below(n: usize) -> Vec<u32> {
    if n < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; n];
    let mut out = Vec::new();
    for i in 2..n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho; `n` must be composite and odd.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = 0u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_large(d, out);
    factor_large(n / d, out);
}

/// Factors `|n|` by trial division over the prime table, then Pollard rho.
pub fn factor(n: i64) -> Result<Factored> {
    if n == 0 {
        return domain("cannot factor zero");
    }
    let mut m = n.unsigned_abs();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for &p in small_primes() {
        let p = p as u64;
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if m > 1 {
        let bound = TABLE_LIMIT as u64;
        if m < bound * bound {
            factors.push((m, 1));
        } else {
            let mut rest = Vec::new();
            factor_large(m, &mut rest);
            rest.sort_unstable();
            for p in rest {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
        }
    }
    Ok(Factored { value: n, factors })
}

/// Number of distinct prime divisors of `n ≠ 0`.
pub fn omega(n: i64) -> Result<u32> {
    Ok(factor(n)?.omega())
}

/// Euler's totient.
pub fn phi(n: u64) -> Result<u64> {
    Ok(factor(n as i64)?.phi())
}

/// Kronecker symbol `(d/n)` with the full extension to `n ≤ 0` and even `n`.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n as i128;
    let mut a = d as i128;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let v = n.trailing_zeros();
    n >>= v;
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Jacobi symbol (a/n) with n odd positive.
    a = a.rem_euclid(n);
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 {
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// All `x` in `[0, p^e)` with `x² ≡ d (mod p^e)`.
fn sqrt_mod_prime_power(d: i64, p: u64, e: u32) -> Vec<u64> {
    let dm = d.rem_euclid(p as i64) as u64;
    let mut roots: Vec<u64> = if p == 2 {
        vec![dm]
    } else {
        match tonelli_shanks(dm, p) {
            None => return Vec::new(),
            Some(0) => vec![0],
            Some(r) => vec![r, p - r],
        }
    };
    let mut pk = p;
    for _ in 1..e {
        let next = pk * p;
        let target = d.rem_euclid(next as i64) as u64;
        let mut lifted = Vec::new();
        for &x in &roots {
            for t in 0..p {
                let y = x + t * pk;
                if mul_mod(y, y, next) == target {
                    lifted.push(y);
                }
            }
        }
        roots = lifted;
        pk = next;
        if roots.is_empty() {
            break;
        }
    }
    roots
}

/// All residues `x` in `[0, m)` with `x² ≡ d (mod m)`, sorted.
pub fn sqrt_mod(d: i64, m: u64) -> Vec<u64> {
    assert!(m >= 1);
    let f = factor(m as i64).expect("m ≥ 1");
    let mut acc: Vec<u64> = vec![0];
    let mut modulus = 1u64;
    for &(p, e) in &f.factors {
        let pe = p.pow(e);
        let local = sqrt_mod_prime_power(d, p, e);
        if local.is_empty() {
            return Vec::new();
        }
        let inv = mod_inverse(modulus % pe, pe).expect("coprime moduli");
        let mut next = Vec::with_capacity(acc.len() * local.len());
        for &x in &acc {
            for &y in &local {
                // z ≡ x mod modulus, z ≡ y mod pe
                let diff = (y + pe - x % pe) % pe;
                let t = mul_mod(diff, inv, pe);
                next.push(x + modulus * t);
            }
        }
        acc = next;
        modulus *= pe;
    }
    acc.sort_unstable();
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Greatest common divisor of three integers.
pub fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    a.gcd(&b).gcd(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_factor(n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut m = n;
        let mut p = 2;
        while p * p <= m {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if m > 1 {
            out.push((m, 1));
        }
        out
    }

    #[test]
    fn factor_examples() {
        assert!(factor(1).unwrap().factors.is_empty());
        assert!(factor(0).is_err());
        let f = factor(446185740).unwrap();
        assert_eq!(f.factors, vec![(2, 2), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1), (19, 1), (23, 1)]);
        assert_eq!(f.omega(), 9);
        let g = factor(-991027).unwrap();
        assert_eq!(g.factors, brute_factor(991027));
    }

    #[test]
    fn factor_large_semiprimes() {
        let p = 4294967291u64;
        let q = 2147483647u64;
        let f = factor((p * q) as i64).unwrap();
        assert_eq!(f.factors, vec![(q, 1), (p, 1)]);
        let f = factor(i64::MAX).unwrap();
        let prod: u128 = f.factors.iter().map(|&(p, e)| (p as u128).pow(e)).product();
        assert_eq!(prod, i64::MAX as u128);
        assert!(f.factors.iter().all(|&(p, _)| is_prime(p)));
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(5, 0), 0);
        assert_eq!(kronecker(-1, 0), 1);
    }

    #[test]
    fn kronecker_matches_solvability_mod_4p() {
        let primes = primes_below(98);
        for d in -500i64..=500 {
            if d.rem_euclid(4) > 1 {
                continue;
            }
            for &p in &primes {
                let p = p as i64;
                let m = 4 * p;
                let solvable_unit = (0..m).any(|x| (x * x - d).rem_euclid(m) == 0) && d % p != 0;
                assert_eq!(kronecker(d, p) == 1, solvable_unit, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn legendre_matches_euler_criterion() {
        for &p in primes_below(200).iter().skip(1) {
            let p = p as i64;
            for d in -300i64..300 {
                let r = d.rem_euclid(p) as u64;
                let expect = if r == 0 {
                    0
                } else if pow_mod(r, (p as u64 - 1) / 2, p as u64) == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(d, p), expect);
            }
        }
    }

    #[test]
    fn sqrt_mod_matches_brute_force() {
        for m in 1u64..300 {
            for d in -60i64..60 {
                let brute: Vec<u64> = (0..m).filter(|&x| ((x * x) as i64 - d).rem_euclid(m as i64) == 0).collect();
                assert_eq!(sqrt_mod(d, m), brute, "d={d} m={m}");
            }
        }
    }

    #[test]
    fn totient_and_divisors() {
        assert_eq!(phi(420).unwrap(), 96);
        assert_eq!(phi(1260).unwrap(), 288);
        assert_eq!(phi(1).unwrap(), 1);
        assert_eq!(factor(12).unwrap().divisors(), vec![1, 2, 3, 4, 6, 12]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn factor_roundtrip(n in -10_000_000i64..=10_000_000) {
            prop_assume!(n != 0);
            let f = factor(n).unwrap();
            let prod: u64 = f.factors.iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(prod, n.unsigned_abs());
            prop_assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(f.factors.iter().all(|&(p, e)| e >= 1 && is_prime(p)));
        }

        #[test]
        fn kronecker_multiplicative(d in -100_000i64..100_000, m in -5000i64..5000, n in -5000i64..5000) {
            prop_assume!(m != 0 && n != 0);
            prop_assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n));
        }
    }
}
