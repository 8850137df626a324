//! Isogenies between CM points: the ratio sets `Q(n)`, the upper-triangular
//! criterion and the constructive isogenies between forms.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, rat, Rational};
use crate::error::{domain, Result};
use crate::quadforms::{Discriminant, ReducedForm};

/// `Q(n) = {r/s : rs = n}` in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatioSet {
    pub n: u64,
    pub ratios: Vec<Rational>,
}

impl RatioSet {
    pub fn contains(&self, x: &Rational) -> bool {
        self.ratios.binary_search(x).is_ok()
    }
}

pub fn q_set(n: u64) -> Result<RatioSet> {
    if n == 0 {
        return domain("n must be positive");
    }
    let divisors = factor(n as i64)?.divisors();
    let mut ratios: Vec<Rational> =
        divisors.iter().map(|&r| Rational::new(BigInt::from(r), BigInt::from(n / r))).collect();
    ratios.sort();
    ratios.dedup();
    Ok(RatioSet { n, ratios })
}

/// The point `(b + √Δ)/(2a)` in the upper half plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadPoint {
    pub b: i64,
    pub a: i64,
    pub delta: i64,
}

impl QuadPoint {
    pub fn new(b: i64, a: i64, delta: i64) -> Result<Self> {
        if a <= 0 || delta >= 0 {
            return domain("need a > 0 and Δ < 0");
        }
        Ok(QuadPoint { b, a, delta })
    }

    pub fn of_form(f: &ReducedForm) -> Self {
        QuadPoint { b: f.b, a: f.a, delta: f.discriminant() }
    }

    /// `(Re τ, t/(2a), s)` with `√Δ = t·√−s`, `s` squarefree.
    fn coords(&self) -> Result<(Rational, Rational, u64)> {
        let fac = factor(self.delta)?;
        let core = fac.squarefree_part();
        let t = (self.delta.unsigned_abs() / core).sqrt();
        debug_assert_eq!(t * t * core, self.delta.unsigned_abs());
        Ok((rat(self.b, 2 * self.a), Rational::new(BigInt::from(t), BigInt::from(2 * self.a)), core))
    }

    /// Closed fundamental domain with the usual boundary convention.
    pub fn in_fundamental_domain(&self) -> bool {
        // −a < b ≤ a and |τ|² = c/a ≥ 1, with b ≥ 0 on the unit circle
        let num = self.b as i128 * self.b as i128 - self.delta as i128;
        let four_a = 4 * self.a as i128;
        if num % four_a != 0 {
            // not a form; compare |τ|² = (b² − Δ)/(4a²) ≥ 1 directly
            let norm2 = num;
            let bound = four_a * self.a as i128;
            return -self.a < self.b && self.b <= self.a && (norm2 > bound || (norm2 == bound && self.b >= 0));
        }
        let c = (num / four_a) as i64;
        -self.a < self.b && self.b <= self.a && (self.a < c || (self.a == c && self.b >= 0))
    }

    /// `Im τ ≥ n`, exactly: `|Δ| ≥ 4a²n²`.
    pub fn im_at_least(&self, n: u64) -> bool {
        let lhs = self.delta.unsigned_abs() as u128;
        let rhs = 4 * (self.a as u128).pow(2) * (n as u128).pow(2);
        lhs >= rhs
    }
}

/// Whether `w = (pz + q)/s` for integers with `p, s > 0`, `ps = n`,
/// `gcd(p, q, s) = 1`. Requires `w ∈ F` and `Im z ≥ n`, under which this is
/// equivalent to `⟨z,1⟩` and `⟨w,1⟩` being `n`-isogenous.
pub fn isogenous_upper_triangular(z: &QuadPoint, w: &QuadPoint, n: u64) -> Result<bool> {
    if n == 0 {
        return domain("n must be positive");
    }
    if !w.in_fundamental_domain() {
        return domain("w must lie in the fundamental domain");
    }
    if !z.im_at_least(n) {
        return domain(format!("criterion needs Im z ≥ {n}"));
    }
    Ok(upper_triangular_witness(z, w, n)?.is_some())
}

/// `(p, q, s)` realizing `w = (pz + q)/s`, if any.
pub fn upper_triangular_witness(z: &QuadPoint, w: &QuadPoint, n: u64) -> Result<Option<(u64, i64, u64)>> {
    let (zr, zi, zc) = z.coords()?;
    let (wr, wi, wc) = w.coords()?;
    if zc != wc {
        return Ok(None);
    }
    for p in factor(n as i64)?.divisors() {
        let s = n / p;
        let (pb, sb) = (Rational::from_integer(p.into()), Rational::from_integer(s.into()));
        if &pb * &zi != &sb * &wi {
            continue;
        }
        let q = &sb * &wr - &pb * &zr;
        if !q.is_integer() {
            continue;
        }
        let qi = q.to_integer();
        if BigInt::from(p).gcd(&qi).gcd(&BigInt::from(s)) == BigInt::from(1) {
            return Ok(Some((p, qi.to_i64().expect("small shift"), s)));
        }
    }
    Ok(None)
}

/// All `a_y ≥ 1` with `(a_y/target_f)/(a/f) ∈ Q(n)`. The flag asserts
/// `|Δ_x|^{1/2} ≥ 2n·a`, without which the transfer rule is not available.
pub fn admissible_denominators(n: u64, source: (u64, u64), target_f: u64, delta_bound_ok: bool) -> Result<Vec<u64>> {
    if !delta_bound_ok {
        return domain("the transfer rule needs |Δ_x|^(1/2) ≥ 2n·a_x");
    }
    let (a, f) = source;
    if a == 0 || f == 0 || target_f == 0 {
        return domain("a, f and target_f must be positive");
    }
    let base = Rational::new(BigInt::from(a * target_f), BigInt::from(f));
    let mut out: Vec<u64> = q_set(n)?
        .ratios
        .iter()
        .map(|r| r * &base)
        .filter(|x| x.is_integer() && x.is_positive())
        .filter_map(|x| x.to_integer().to_u64())
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// A CM point given by its reduced form.
pub type FormPoint = (ReducedForm, Discriminant);

/// Degree of the isogeny supplied by the constructive rules: coprime
/// denominators of one discriminant, two dominant points over a common order,
/// or two subdominant points of one discriminant.
pub fn construct_isogeny_degree(x: &FormPoint, y: &FormPoint) -> Option<u64> {
    let ((fx, dx), (fy, dy)) = (x, y);
    if dx.delta == dy.delta && fx.a.gcd(&fy.a) == 1 {
        return Some((fx.a * fy.a) as u64);
    }
    if fx.a == 1 && fy.a == 1 && dx.fundamental == dy.fundamental {
        let g = dx.conductor.gcd(&dy.conductor);
        return Some((dx.conductor / g) * (dy.conductor / g));
    }
    if fx.a == 2 && fy.a == 2 && dx.delta == dy.delta {
        return Some(if fx == fy { 1 } else { 4 });
    }
    None
}

/// `|Δ|^{1/2} ≥ 2na` exactly.
pub fn transfer_hypothesis(delta: &Discriminant, n: u64, a: u64) -> bool {
    delta.abs() as u128 >= 4 * (n as u128).pow(2) * (a as u128).pow(2)
}

/// Whether `(a_y/f_y)/(a_x/f_x) ∈ Q(n)`.
pub fn ratio_in_q(n: u64, x: (u64, u64), y: (u64, u64)) -> Result<bool> {
    if x.0 == 0 || x.1 == 0 || y.0 == 0 || y.1 == 0 {
        return domain("denominators and conductors must be positive");
    }
    let r = Rational::new(BigInt::from(y.0 * x.1), BigInt::from(y.1 * x.0));
    Ok(!r.is_zero() && q_set(n)?.contains(&r))
}
