//! Multiplicative relations among singular moduli: Masser-type norm bounds on
//! relation lattices, the linear relation and the inequalities extracted from
//! a relation, and exact verification and discovery of small relations.

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::ball::{decide_lt, Ball, ComplexBall};
use crate::error::{domain, Error, Result};
use crate::quadforms::{Discriminant, ReducedForm};

/// One factor `x^m` of a relation, `x` given by its reduced form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTerm {
    pub delta: Discriminant,
    pub form: ReducedForm,
    pub exponent: i64,
}

/// `x₁^{m₁} ⋯ x_k^{m_k}` with `X = max|Δᵢ|`, `Y = min|Δᵢ|` and `‖m‖`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationInstance {
    pub terms: Vec<RelationTerm>,
    pub x: u64,
    pub y: u64,
    pub norm_m: u64,
}

impl RelationInstance {
    pub fn new(terms: Vec<RelationTerm>) -> Result<Self> {
        if terms.is_empty() {
            return domain("a relation needs at least one term");
        }
        for t in &terms {
            if t.exponent == 0 {
                return domain("exponents must be nonzero");
            }
            if t.form.discriminant() != t.delta.delta {
                return domain(format!("{} does not have discriminant {}", t.form, t.delta.delta));
            }
        }
        let x = terms.iter().map(|t| t.delta.abs()).max().unwrap_or(0);
        let y = terms.iter().map(|t| t.delta.abs()).min().unwrap_or(0);
        let norm_m = terms.iter().map(|t| t.exponent.unsigned_abs()).max().unwrap_or(0);
        Ok(RelationInstance { terms, x, y, norm_m })
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }

    /// The shared fundamental discriminant.
    pub fn fundamental(&self) -> Result<i64> {
        let d = self.terms[0].delta.fundamental;
        if self.terms.iter().any(|t| t.delta.fundamental != d) {
            return domain("terms have different fundamental discriminants");
        }
        Ok(d)
    }

    /// `f = gcd` of the conductors.
    pub fn base_conductor(&self) -> u64 {
        self.terms.iter().fold(0, |g, t| g.gcd(&t.delta.conductor))
    }

    /// `|Δ| = |D|·f²`.
    pub fn base_abs_delta(&self) -> Result<u64> {
        let f = self.base_conductor();
        Ok(self.fundamental()?.unsigned_abs() * f * f)
    }

    /// `(a(xᵢ), e(xᵢ), mᵢ)` with `e = f(xᵢ)/f`.
    pub fn term_data(&self) -> Vec<TermData> {
        let f = self.base_conductor();
        self.terms.iter().map(|t| TermData { a: t.form.a as u64, e: t.delta.conductor / f, m: t.exponent }).collect()
    }

    pub fn max_denominator(&self) -> u64 {
        self.terms.iter().map(|t| t.form.a as u64).max().unwrap_or(0)
    }
}

/// Denominator, relative conductor and exponent of one term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermData {
    pub a: u64,
    pub e: u64,
    pub m: i64,
}

impl TermData {
    /// `m' = e·m`.
    pub fn m_prime(&self) -> i64 {
        self.e as i64 * self.m
    }
}

/// `Σ f(xᵢ)/a(xᵢ)·mᵢ` term by term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearRelation {
    pub coefficients: Vec<Rational>,
    pub sum: Rational,
}

/// Report shape shared by hypothesis and bound checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub hypothesis: bool,
    pub lhs: String,
    pub rhs: String,
    pub verdict: String,
}

fn pow_big(base: &BigInt, e: u64) -> BigInt {
    num_traits::pow(base.clone(), e as usize)
}

/// `c(ℓ) = 3^{4^ℓ + 2^{ℓ+1} + 8}`.
pub fn masser_constant(ell: u32) -> BigInt {
    let e = 4u64.pow(ell) + 2u64.pow(ell + 1) + 8;
    pow_big(&BigInt::from(3), e)
}

/// `⌈24·(c(ℓ)·k·X^{1/2})^{k−1}⌉`.
pub fn masser_basis_bound(k: u64, x: u64, ell: u32) -> Result<BigInt> {
    if k == 0 || ell == 0 || ell > 6 {
        return domain("need k ≥ 1 and 1 ≤ ℓ ≤ 6");
    }
    let ck = masser_constant(ell) * BigInt::from(k);
    let base = BigInt::from(24) * pow_big(&ck, k - 1);
    let xb = BigInt::from(x);
    if (k - 1) % 2 == 0 {
        return Ok(base * pow_big(&xb, (k - 1) / 2));
    }
    // 24(ck)^{k−1} X^{(k−2)/2} · √X, rounded up
    let m = base * pow_big(&xb, (k - 2) / 2);
    let sq = (&m * &m * &xb).to_biguint().expect("nonnegative");
    let r = sq.sqrt();
    let r = if &r * &r == sq { r } else { r + BigUint::one() };
    Ok(BigInt::from(r))
}

/// `⌈ω(kh/η)^{k−1}⌉` for `h ≥ η > 0`.
pub fn masser_generic_bound(k: u64, h: &Rational, eta: &Rational, omega: u64) -> Result<BigInt> {
    if !eta.is_positive() {
        return domain("η must be positive");
    }
    if h < eta {
        return domain("the height bound h must be at least η");
    }
    if k == 0 || omega == 0 {
        return domain("k and ω must be positive");
    }
    let ratio = Rational::from_integer(k.into()) * h / eta;
    let v = Rational::from_integer(omega.into()) * num_traits::pow(ratio, (k - 1) as usize);
    Ok(v.ceil().to_integer())
}

/// Height floor `3^{−(d² + 2d + 6)}` for abelian extensions of a degree-`d` field.
pub fn abelian_height_floor(d: u64) -> Rational {
    Rational::new(BigInt::one(), pow_big(&BigInt::from(3), d * d + 2 * d + 6))
}

/// Whether the generic bound with `h = 4X^{1/2}` (or `8X^{1/2}` for ratios
/// `x/x'`), `η` the floor at `d = 2^ℓ` and `ω = 24` stays within
/// [`masser_basis_bound`]. `X` must be a perfect square.
pub fn masser_specialization_holds(k: u64, x: u64, ell: u32, ratios: bool) -> Result<bool> {
    let r = x.sqrt();
    if r * r != x {
        return domain("X must be a perfect square for an exact height bound");
    }
    let h = Rational::from_integer(BigInt::from(if ratios { 8 } else { 4 } * r));
    let eta = abelian_height_floor(2u64.pow(ell));
    Ok(masser_generic_bound(k, &h, &eta, 24)? <= masser_basis_bound(k, x, ell)?)
}

fn ln_ball(n: u64, p: u32) -> Ball {
    Ball::from_int(n).ln(p).expect("positive")
}

/// `(√Y, (1/3)·A·k·(ln X + ln A + ln k + 20))` at precision `p`.
fn linear_sides(k: u64, x: u64, y: u64, a: u64, p: u32) -> Result<(Ball, Ball)> {
    let lhs = Ball::from_int(y).sqrt(p)?;
    let logs = ln_ball(x, p).add(&ln_ball(a, p), p).add(&ln_ball(k, p), p).add(&Ball::from_int(20), p);
    let rhs = logs.mul_int((a * k) as i64, p).div_int(3, p);
    Ok((lhs, rhs))
}

/// `Y^{1/2} > (1/3)·A·k·(log X + log A + log k + 20)`, decided with certified logs.
pub fn linear_relation_hypothesis(k: u64, x: u64, y: u64, a: u64) -> Result<bool> {
    if k == 0 || x == 0 || y == 0 || a == 0 || y > x {
        return domain("need positive k, A and 0 < Y ≤ X");
    }
    decide_lt("linear-relation hypothesis", 64, |p| {
        let (l, r) = linear_sides(k, x, y, a, p)?;
        Ok((r, l))
    })
}

pub fn linear_hypothesis_report(k: u64, x: u64, y: u64, a: u64) -> Result<HypothesisReport> {
    let ok = linear_relation_hypothesis(k, x, y, a)?;
    let (l, r) = linear_sides(k, x, y, a, 96)?;
    Ok(HypothesisReport {
        hypothesis: ok,
        lhs: l.to_sci(15),
        rhs: r.to_sci(15),
        verdict: if ok { "holds" } else { "fails" }.into(),
    })
}

/// The linear-relation hypothesis for an instance whose denominators are all at most `A`.
pub fn check_linear_relation_hypothesis(inst: &RelationInstance, a: u64) -> Result<bool> {
    inst.fundamental()?;
    if inst.max_denominator() > a {
        return domain(format!("a denominator exceeds A = {a}"));
    }
    linear_relation_hypothesis(inst.k() as u64, inst.x, inst.y, a)
}

/// `Σ f(xᵢ)/a(xᵢ)·mᵢ`; zero whenever the relation holds and the hypothesis does.
pub fn derive_linear_relation(inst: &RelationInstance, a: u64) -> Result<LinearRelation> {
    if !check_linear_relation_hypothesis(inst, a)? {
        return domain("linear-relation hypothesis fails");
    }
    let coefficients: Vec<Rational> = inst
        .terms
        .iter()
        .map(|t| Rational::new(BigInt::from(t.delta.conductor) * t.exponent, BigInt::from(t.form.a)))
        .collect();
    let sum = coefficients.iter().fold(Rational::zero(), |s, c| s + c);
    Ok(LinearRelation { coefficients, sum })
}

/// `(|Δ|^{1/2}, max{k ε^{−1} log X, (1/3)A(log(k ε^{−1}) + 4)})`.
fn assump_sides(abs_delta: u64, k: u64, x: u64, a: u64, eps: &Rational, p: u32) -> Result<(Ball, Ball)> {
    let lhs = Ball::from_int(abs_delta).sqrt(p)?;
    let k_over_eps = Ball::from_rational(&(Rational::from_integer(k.into()) / eps), p);
    let first = k_over_eps.mul(&ln_ball(x, p), p);
    let second = k_over_eps.ln(p)?.add(&Ball::from_int(4), p).mul_int(a as i64, p).div_int(3, p);
    let rhs = match first.lt(&second) {
        Some(true) => second,
        Some(false) => first,
        None => {
            // both candidates enclose the max; keep the wider hull
            let up = if first.upper() > second.upper() { first.upper() } else { second.upper() };
            let lo = if first.lower() > second.lower() { first.lower() } else { second.lower() };
            let mid = up.add(&lo).mul_2exp(-1);
            let rad = up.sub(&lo).mul_2exp(-1);
            Ball::with_rad(mid, rad)
        }
    };
    Ok((lhs, rhs))
}

/// `|Δ|^{1/2} ≥ max{k ε^{−1} log X, (1/3)A(log(k ε^{−1}) + 4)}`, decided with certified logs.
pub fn inequality_hypothesis(abs_delta: u64, k: u64, x: u64, a: u64, eps: &Rational) -> Result<bool> {
    if k == 0 || x == 0 || a == 0 || abs_delta == 0 {
        return domain("need positive |Δ|, k, X and A");
    }
    if !eps.is_positive() || eps > &Rational::new(1.into(), 2.into()) {
        return domain("ε must lie in (0, 1/2]");
    }
    // lhs ≥ rhs  ⟺  not (lhs < rhs)
    decide_lt("inequality hypothesis", 64, |p| assump_sides(abs_delta, k, x, a, eps, p)).map(|lt| !lt)
}

pub fn inequality_hypothesis_report(
    abs_delta: u64,
    k: u64,
    x: u64,
    a: u64,
    eps: &Rational,
) -> Result<HypothesisReport> {
    let ok = inequality_hypothesis(abs_delta, k, x, a, eps)?;
    let (l, r) = assump_sides(abs_delta, k, x, a, eps, 96)?;
    Ok(HypothesisReport {
        hypothesis: ok,
        lhs: l.to_sci(15),
        rhs: r.to_sci(15),
        verdict: if ok { "holds" } else { "fails" }.into(),
    })
}

/// The two inequalities, each as exact `lhs ≤ rhs` data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalitySides {
    pub pos_lhs: Rational,
    pub pos_rhs: Rational,
    pub neg_lhs: Rational,
    pub neg_rhs: Rational,
}

impl InequalitySides {
    pub fn both_hold(&self) -> bool {
        self.pos_lhs <= self.pos_rhs && self.neg_lhs <= self.neg_rhs
    }
}

/// The sides of both inequalities from term data alone.
pub fn inequality_sides(terms: &[TermData], a_cap: u64, eps: &Rational) -> InequalitySides {
    let norm = terms.iter().map(|t| t.m_prime().unsigned_abs()).max().unwrap_or(0);
    let slack = eps * Rational::from_integer(norm.into());
    let r = |num: i64, den: u64| Rational::new(BigInt::from(num), BigInt::from(den));
    let mut s = InequalitySides {
        pos_lhs: Rational::zero(),
        pos_rhs: slack.clone(),
        neg_lhs: Rational::zero(),
        neg_rhs: slack,
    };
    for t in terms {
        let mp = t.m_prime();
        let capped = t.a.min(a_cap);
        if t.m > 0 {
            if t.a < a_cap {
                s.pos_lhs += r(mp, t.a);
            }
            s.neg_rhs += r(mp, capped);
        } else {
            if t.a < a_cap {
                s.neg_lhs += r(-mp, t.a);
            }
            s.pos_rhs += r(-mp, capped);
        }
    }
    s
}

/// Checks the hypothesis at `|Δ| = |D|f²`, then returns both inequalities' sides.
pub fn inequality_bounds(inst: &RelationInstance, a: u64, eps: &Rational) -> Result<InequalitySides> {
    let abs_delta = inst.base_abs_delta()?;
    if !inequality_hypothesis(abs_delta, inst.k() as u64, inst.x, a, eps)? {
        return domain("inequality hypothesis fails");
    }
    Ok(inequality_sides(&inst.term_data(), a, eps))
}

/// Parameter-family check: every `k ≤ k_max`, `A ≤ a_max`, `X ≥ x_min` and
/// `Y ≥ X/y_ratio` satisfies the linear-relation hypothesis. The corner
/// `(k_max, a_max, x_min, x_min/y_ratio)` is decisive once `√X_min >
/// 2·A·k·√y_ratio/3`, which makes `√(X/y_ratio) − RHS` increasing in `X`.
pub fn linear_hypothesis_family(k_max: u64, x_min: u64, y_ratio: u64, a_max: u64) -> Result<bool> {
    let mono = 2 * a_max * k_max * y_ratio.sqrt().max(1);
    let needs = if y_ratio.sqrt().pow(2) == y_ratio { (mono as u128).pow(2) < 9 * x_min as u128 } else { false };
    if !needs {
        return domain("monotonicity in X is not established for this family");
    }
    linear_relation_hypothesis(k_max, x_min, x_min / y_ratio, a_max)
}

/// Parameter-family check for the inequality hypothesis with `|Δ| ≥ X/y_ratio`.
/// The corner is decisive once `√X_min > 2k√y_ratio/ε`.
pub fn inequality_hypothesis_family(k_max: u64, x_min: u64, y_ratio: u64, a_max: u64, eps: &Rational) -> Result<bool> {
    let r = y_ratio.sqrt();
    if r * r != y_ratio {
        return domain("y_ratio must be a perfect square");
    }
    let bound = Rational::from_integer(BigInt::from(2 * k_max * r)) / eps;
    let bound_sq = &bound * &bound;
    if bound_sq >= Rational::from_integer(x_min.into()) {
        return domain("monotonicity in X is not established for this family");
    }
    inequality_hypothesis(x_min / y_ratio, k_max, x_min, a_max, eps)
}

/// Exact check of `∏ vᵢ^{mᵢ} = 1` for nonzero integers.
pub fn verify_relation_integers(values: &[BigInt], exponents: &[i64]) -> Result<bool> {
    if values.len() != exponents.len() {
        return domain("values and exponents differ in length");
    }
    if values.iter().any(|v| v.is_zero()) {
        return domain("values must be nonzero");
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (v, &m) in values.iter().zip(exponents) {
        if m > 0 {
            num *= pow_big(v, m as u64);
        } else if m < 0 {
            den *= pow_big(v, m.unsigned_abs());
        }
    }
    Ok(num == den)
}

/// Exact relation check on certified values; every value must round to a
/// certified integer.
pub fn verify_relation_exact(values: &[ComplexBall], exponents: &[i64]) -> Result<bool> {
    if exponents.contains(&0) {
        return domain("exponents must be nonzero");
    }
    let ints = values
        .iter()
        .map(|v| v.certified_integer().ok_or_else(|| Error::Domain(format!("{v} is not a certified integer"))))
        .collect::<Result<Vec<_>>>()?;
    verify_relation_integers(&ints, exponents)
}

/// Largest enumeration box for the brute force.
pub const BRUTEFORCE_BUDGET: u64 = 200_000_000;

/// Basis of the lattice spanned by all relations `m` with `‖m‖ ≤ norm_cap`.
pub fn relation_lattice_bruteforce(values: &[BigInt], norm_cap: u64) -> Result<Vec<Vec<i64>>> {
    let k = values.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    if values.iter().any(|v| v.is_zero()) {
        return domain("values must be nonzero");
    }
    let side = 2 * norm_cap + 1;
    let total = (side as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if total > BRUTEFORCE_BUDGET as u128 {
        return Err(Error::Resource(format!("{total} exponent vectors exceed the budget")));
    }
    let logs: Vec<f64> = values.iter().map(log_abs_big).collect();
    let negative: Vec<bool> = values.iter().map(|v| v.is_negative()).collect();
    let cap = norm_cap as i64;
    let mut found: Vec<Vec<i64>> = Vec::new();
    let mut m = vec![-cap; k];
    loop {
        if m.iter().any(|&x| x != 0) {
            let s: f64 = m.iter().zip(&logs).map(|(&e, l)| e as f64 * l).sum();
            let scale: f64 = m.iter().zip(&logs).map(|(&e, l)| (e as f64 * l).abs()).sum::<f64>() + 1.0;
            let odd_negatives = m.iter().zip(&negative).filter(|(&e, &n)| n && e % 2 != 0).count();
            if s.abs() <= 1e-9 * scale && odd_negatives % 2 == 0 && verify_relation_integers(values, &m)? {
                found.push(m.clone());
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                return Ok(hermite_basis(&found));
            }
            if m[i] < cap {
                m[i] += 1;
                break;
            }
            m[i] = -cap;
            i += 1;
        }
    }
}

fn log_abs_big(v: &BigInt) -> f64 {
    let bits = v.bits();
    let shift = bits.saturating_sub(60);
    let top = (v.abs() >> shift as usize).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Row-style Hermite normal form of the lattice spanned by `rows`: nonzero rows
/// with positive pivots, entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_basis(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let Some(n) = rows.first().map(|r| r.len()) else { return Vec::new() };
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut out: Vec<Vec<i128>> = Vec::new();
    for col in 0..n {
        // gcd-combine all remaining rows on this column
        loop {
            let mut nz: Vec<usize> = (0..m.len()).filter(|&i| m[i][col] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&i) = nz.first() {
                    let mut row = m.swap_remove(i);
                    if row[col] < 0 {
                        row.iter_mut().for_each(|x| *x = -*x);
                    }
                    out.push(row);
                }
                break;
            }
            nz.sort_by_key(|&i| m[i][col].abs());
            let p = nz[0];
            let pivot = m[p].clone();
            for &i in &nz[1..] {
                let q = m[i][col].div_euclid(pivot[col]);
                for j in 0..n {
                    m[i][j] -= q * pivot[j];
                }
            }
        }
        m.retain(|r| r.iter().any(|&x| x != 0));
    }
    // reduce above pivots
    for i in 0..out.len() {
        let col = out[i].iter().position(|&x| x != 0).expect("nonzero row");
        for r in 0..i {
            let q = out[r][col].div_euclid(out[i][col]);
            if q != 0 {
                let piv = out[i].clone();
                for j in 0..n {
                    out[r][j] -= q * piv[j];
                }
            }
        }
    }
    out.into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect()
}

/// Whether `v` lies in the lattice with Hermite basis `basis`.
pub fn in_lattice(basis: &[Vec<i64>], v: &[i64]) -> bool {
    let mut r: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    for row in basis {
        let col = row.iter().position(|&x| x != 0).expect("nonzero row");
        let p = row[col] as i128;
        if r[col] % p != 0 {
            return false;
        }
        let q = r[col] / p;
        for j in 0..r.len() {
            r[j] -= q * row[j] as i128;
        }
    }
    r.iter().all(|&x| x == 0)
}

/// Rounds a rational to `digits` decimal places for display.
pub fn rational_to_decimal(x: &Rational, digits: u32) -> String {
    let scale = pow_big(&BigInt::from(10), digits as u64);
    let v = (x * Rational::from_integer(scale.clone())).round().to_integer();
    let (q, r) = v.abs().div_rem(&scale);
    let sign = if v.is_negative() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{q}")
    } else {
        format!("{sign}{q}.{:0width$}", r, width = digits as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factor, rat};
    use crate::jfun::singular_modulus;
    use crate::quadforms::forms_with_denominator;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn masser_examples() {
        assert_eq!(masser_basis_bound(1, 12345, 1).unwrap(), BigInt::from(24));
        let expect = BigInt::from(24) * BigInt::from(43046721) * BigInt::from(20_000);
        assert_eq!(masser_basis_bound(2, 100_000_000, 1).unwrap(), expect);
        assert_eq!(masser_constant(1), BigInt::from(43046721));
        // k = 4, X = 10^10: 24·(4·3^16)^3·10^15
        let b = masser_basis_bound(4, 10_000_000_000, 1).unwrap();
        let e = BigInt::from(24) * pow_big(&(BigInt::from(4) * masser_constant(1)), 3) * pow_big(&BigInt::from(10), 15);
        assert_eq!(b, e);
        // non-square X: ⌈24·3^16·2·√2⌉
        let b = masser_basis_bound(2, 2, 1).unwrap();
        let approx = 24.0 * 43046721.0 * 2.0 * 2f64.sqrt();
        assert!((b.to_f64().unwrap() - approx).abs() <= 1.0);
    }

    #[test]
    fn masser_generic_examples() {
        let one = Rational::one();
        assert_eq!(masser_generic_bound(1, &rat(5, 1), &one, 24).unwrap(), BigInt::from(24));
        assert_eq!(masser_generic_bound(3, &one, &one, 24).unwrap(), BigInt::from(216));
        assert!(masser_generic_bound(2, &one, &Rational::zero(), 24).is_err());
        // h = X^{1/2}, η = 3^{−16} reproduces the basis bound exactly
        let h = Rational::from_integer(10_000.into());
        let eta = Rational::new(1.into(), masser_constant(1));
        assert_eq!(masser_generic_bound(2, &h, &eta, 24).unwrap(), masser_basis_bound(2, 100_000_000, 1).unwrap());
        // h = 4X^{1/2} with the floor at d = 2 stays below it
        assert_eq!(abelian_height_floor(2), Rational::new(1.into(), pow_big(&BigInt::from(3), 14)));
        for k in 1..=6 {
            assert!(masser_specialization_holds(k, 100_000_000, 1, false).unwrap());
            assert!(masser_specialization_holds(k, 100_000_000, 1, true).unwrap());
            assert!(masser_specialization_holds(k, 10_000_000_000, 2, true).unwrap());
        }
    }

    proptest! {
        #[test]
        fn masser_monotone(k in 1u64..6, x in 1u64..1_000_000, ell in 1u32..3) {
            let b = masser_basis_bound(k, x, ell).unwrap();
            prop_assert!(masser_basis_bound(k + 1, x, ell).unwrap() >= b);
            prop_assert!(masser_basis_bound(k, x + 1, ell).unwrap() >= b);
            prop_assert!(masser_basis_bound(k, x, ell + 1).unwrap() >= b);
        }

        #[test]
        fn inequality_hypothesis_monotone(
            d in 1_000u64..10_000_000, k in 1u64..7, a in 1u64..40, e in 1i64..50, da in 0u64..5, de in 0i64..10,
        ) {
            let x = 4 * d;
            let eps = rat(e, 100);
            if inequality_hypothesis(d, k, x, a, &eps).unwrap() {
                let a2 = a.saturating_sub(da).max(1);
                let eps2 = rat((e + de).min(50), 100);
                prop_assert!(inequality_hypothesis(d, k, x, a2, &eps2).unwrap());
            }
        }
    }

    #[test]
    fn linear_hypothesis_examples() {
        assert!(linear_relation_hypothesis(6, 10_000_000_000, 10_000_000_000 / 36, 162).unwrap());
        assert!(linear_relation_hypothesis(2, 1_000_000, 250_000, 9).unwrap());
        assert!(!linear_relation_hypothesis(2, 10_000, 10_000, 1_000_000).unwrap());
        let r = linear_hypothesis_report(2, 1_000_000, 250_000, 9).unwrap();
        assert!(r.hypothesis);
        assert_eq!(r.verdict, "holds");
        let json = serde_json::to_value(&r).unwrap();
        for key in ["hypothesis", "lhs", "rhs", "verdict"] {
            assert!(json.get(key).is_some());
        }
    }

    #[test]
    fn parameter_families() {
        // k ≤ 4, X ≥ 10^6 resp. 10^8, Y ≥ X/4, A ≤ 9, ε = 0.16 resp. 0.016
        assert!(linear_hypothesis_family(4, 1_000_000, 4, 9).unwrap());
        assert!(inequality_hypothesis_family(4, 1_000_000, 4, 9, &rat(16, 100)).unwrap());
        assert!(linear_hypothesis_family(4, 100_000_000, 4, 9).unwrap());
        assert!(inequality_hypothesis_family(4, 100_000_000, 4, 9, &rat(16, 1000)).unwrap());
        // k = 6, X ≥ 10^10, Y ≥ X/36, A ≤ 162 (linear) and A ≤ 30, ε = 0.01
        assert!(linear_hypothesis_family(6, 10_000_000_000, 36, 162).unwrap());
        assert!(inequality_hypothesis_family(6, 10_000_000_000, 36, 30, &rat(1, 100)).unwrap());
    }

    fn term(delta: i64, a: i64, m: i64) -> RelationTerm {
        let d = Discriminant::new(delta).unwrap();
        let form = if a == 1 { ReducedForm::principal(delta) } else { forms_with_denominator(delta, a)[0] };
        RelationTerm { delta: d, form, exponent: m }
    }

    #[test]
    fn linear_relation_sums() {
        let delta = -1_000_007;
        let inst = RelationInstance::new(vec![term(delta, 1, 3), term(delta, 1, -3)]).unwrap();
        let lin = derive_linear_relation(&inst, 9).unwrap();
        assert!(lin.sum.is_zero());
        // dominant, subdominant and their weights 1, 1/2
        let inst = RelationInstance::new(vec![term(delta, 1, 2), term(delta, 2, -4)]).unwrap();
        assert!(derive_linear_relation(&inst, 9).unwrap().sum.is_zero());
        let inst = RelationInstance::new(vec![term(delta, 1, 2), term(delta, 2, 3)]).unwrap();
        assert_eq!(derive_linear_relation(&inst, 9).unwrap().sum, rat(7, 2));
        // small discriminants fail the hypothesis
        let inst = RelationInstance::new(vec![term(-4, 1, 10), term(-11, 1, 6)]).unwrap();
        assert!(derive_linear_relation(&inst, 1).is_err());
        // mixed fundamental discriminants
        assert!(check_linear_relation_hypothesis(&inst, 1).is_err());
    }

    #[test]
    fn inequality_special_case() {
        // terms (m, 1), (−m, 2), (−m, 3), (m, a ≥ A) with A = 3, ε = 0.16
        let eps = rat(16, 100);
        let m = 7;
        let terms = [
            TermData { a: 1, e: 1, m },
            TermData { a: 2, e: 1, m: -m },
            TermData { a: 3, e: 1, m: -m },
            TermData { a: 4, e: 1, m },
        ];
        let s = inequality_sides(&terms, 3, &eps);
        assert_eq!(s.pos_lhs, rat(m, 1));
        let expect = Rational::from_integer(m.into()) * (rat(1, 2) + rat(1, 3) + eps.clone());
        assert_eq!(s.pos_rhs, expect);
        assert!(!s.both_hold());

        // all exponents positive: the negative side is 0 ≤ ε‖m'‖
        let terms = [TermData { a: 1, e: 1, m: 3 }, TermData { a: 2, e: 2, m: 5 }];
        let s = inequality_sides(&terms, 5, &eps);
        assert!(s.neg_lhs.is_zero());
        assert_eq!(s.pos_rhs, eps * Rational::from_integer(10.into()));
    }

    #[test]
    fn inequality_bounds_check_hypothesis() {
        let delta = -1_000_007;
        let eps = rat(16, 100);
        let inst =
            RelationInstance::new(vec![term(delta, 1, 5), term(delta, 2, -5), term(delta, 1, -5), term(delta, 2, 5)])
                .unwrap();
        let s = inequality_bounds(&inst, 3, &eps).unwrap();
        assert!(s.both_hold());
        let small = RelationInstance::new(vec![term(-1015, 1, 5), term(-1015, 2, -5)]).unwrap();
        assert!(inequality_bounds(&small, 3, &eps).is_err());
    }

    #[test]
    fn exact_relations() {
        let v = big(&[1728, -32768, -884736]);
        assert!(verify_relation_integers(&v, &[10, 6, -10]).unwrap());
        assert!(verify_relation_integers(&v, &[5, 3, -5]).unwrap());
        assert!(!verify_relation_integers(&big(&[1728]), &[1]).unwrap());
        assert!(verify_relation_integers(&big(&[0]), &[1]).is_err());
    }

    #[test]
    fn certified_relation() {
        let vals: Vec<ComplexBall> = [-4i64, -11, -19]
            .iter()
            .map(|&d| {
                let disc = Discriminant::new(d).unwrap();
                singular_modulus(&ReducedForm::principal(d), &disc, 80).unwrap()
            })
            .collect();
        assert!(verify_relation_exact(&vals, &[10, 6, -10]).unwrap());
        let d = Discriminant::new(-23).unwrap();
        let x = singular_modulus(&ReducedForm::principal(-23), &d, 80).unwrap();
        assert!(verify_relation_exact(&[x], &[1]).is_err());
    }

    /// Integer kernel of the exponent map `m ↦ (Σ mᵢ·v_p(vᵢ))_p` together with
    /// the sign parity, via Hermite reduction of `[image | identity]`.
    fn lattice_by_factorization(values: &[i64]) -> Vec<Vec<i64>> {
        let facs: Vec<_> = values.iter().map(|&v| factor(v).unwrap()).collect();
        let mut primes: Vec<u64> = facs.iter().flat_map(|f| f.factors.iter().map(|&(p, _)| p)).collect();
        primes.sort_unstable();
        primes.dedup();
        let k = values.len();
        let width = primes.len() + 1;
        // generators: unit vectors plus an auxiliary 2 on the sign column
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for (i, f) in facs.iter().enumerate() {
            let mut r = vec![0i64; width + k + 1];
            for (j, p) in primes.iter().enumerate() {
                r[j] = f.factors.iter().find(|&&(q, _)| q == *p).map_or(0, |&(_, e)| e as i64);
            }
            r[primes.len()] = (values[i] < 0) as i64;
            r[width + i] = 1;
            rows.push(r);
        }
        let mut aux = vec![0i64; width + k + 1];
        aux[primes.len()] = 2;
        aux[width + k] = 1;
        rows.push(aux);
        let h = hermite_basis(&rows);
        let kernel: Vec<Vec<i64>> = h
            .into_iter()
            .filter(|r| r[..width].iter().all(|&x| x == 0))
            .map(|r| r[width..width + k].to_vec())
            .collect();
        hermite_basis(&kernel)
    }

    #[test]
    fn bruteforce_examples() {
        let v = big(&[1728, -32768, -884736]);
        let basis = relation_lattice_bruteforce(&v, 12).unwrap();
        assert_eq!(basis, vec![vec![5, 3, -5]]);
        assert_eq!(lattice_by_factorization(&[1728, -32768, -884736]), basis);
        assert!(relation_lattice_bruteforce(&big(&[2, 3]), 10).unwrap().is_empty());
        assert_eq!(relation_lattice_bruteforce(&big(&[4, 8]), 5).unwrap(), vec![vec![3, -2]]);
        assert!(relation_lattice_bruteforce(&big(&[2, 3, 5, 7, 11]), 100).is_err());
    }

    #[test]
    fn bruteforce_complete_within_box() {
        let cases: [&[i64]; 4] = [&[4, 8, 2], &[-1, 2, -8], &[12, 18, -6], &[1728, -32768, -884736]];
        for vals in cases {
            let v = big(vals);
            let cap = 6;
            let basis = relation_lattice_bruteforce(&v, cap).unwrap();
            for b in &basis {
                assert!(verify_relation_integers(&v, b).unwrap());
            }
            let c = cap as i64;
            for a in -c..=c {
                for b in -c..=c {
                    for d in -c..=c {
                        let m = [a, b, d];
                        if verify_relation_integers(&v, &m).unwrap() {
                            assert!(in_lattice(&basis, &m), "{vals:?} {m:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hermite_small() {
        let h = hermite_basis(&[vec![4, 6], vec![6, 9], vec![2, 4]]);
        assert_eq!(h, vec![vec![2, 0], vec![0, 1]]);
        assert!(in_lattice(&h, &[4, 7]));
        assert!(!in_lattice(&h, &[3, 0]));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_to_decimal(&rat(-1, 3), 4), "-0.3333");
        assert_eq!(rational_to_decimal(&rat(79, 2), 0), "40");
    }
}
