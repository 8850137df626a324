//! Midpoint-radius ball arithmetic over exact dyadic numbers.
//!
//! Every operation returns a ball containing the exact result of the same
//! operation applied to any points of the input balls. Midpoints carry `prec`
//! bits; radii are kept to [`RAD_BITS`] bits and always rounded upward.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Rational;
use crate::error::{domain, Error, Result};

/// Mantissa bits retained in radii.
pub const RAD_BITS: u64 = 32;

/// Hard cap for automatic precision escalation.
pub const MAX_PREC: u32 = 16384;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

/// Exact dyadic number `man · 2^exp`, normalized so that `man` is odd (or zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Float {
    man: BigInt,
    exp: i64,
}

impl Float {
    pub fn zero() -> Self {
        Float { man: BigInt::zero(), exp: 0 }
    }

    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Self::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        Float { man: man >> tz, exp: exp + tz as i64 }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n.into(), 0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Float { man: BigInt::one(), exp: k }
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, ex) = if e == 0 { (frac, -1074) } else { (frac | (1u64 << 52), e - 1075) };
        Self::new(BigInt::from(sign) * BigInt::from(m), ex)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// For nonzero `x`, `2^(mag-1) ≤ |x| < 2^mag`.
    pub fn mag(&self) -> i64 {
        self.bits() as i64 + self.exp
    }

    pub fn neg(&self) -> Self {
        Float { man: -&self.man, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Float { man: self.man.abs(), exp: self.exp }
    }

    pub fn mul_2exp(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Float { man: self.man.clone(), exp: self.exp + k }
    }

    pub fn add(&self, o: &Float) -> Float {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &o.man << (o.exp - e) as usize;
        Float::new(a + b, e)
    }

    pub fn sub(&self, o: &Float) -> Float {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Float) -> Float {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Float::new(&self.man * &o.man, self.exp + o.exp)
    }

    /// Rounds to at most `prec` mantissa bits in the given direction.
    pub fn round(&self, prec: u64, mode: Round) -> Float {
        let bits = self.bits();
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        let neg = self.is_negative();
        let mag = self.man.magnitude();
        let q = mag >> shift;
        let low = mag - (&q << shift);
        let away = if low.is_zero() {
            false
        } else {
            match mode {
                Round::Up => !neg,
                Round::Down => neg,
                Round::Nearest => low.bits() == shift,
            }
        };
        let q = if away { q + 1u32 } else { q };
        let man = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, q);
        Float::new(man, self.exp + shift as i64)
    }

    /// Truncated quotient with about `prec` bits and a bound on the truncation error.
    pub fn div_trunc(&self, o: &Float, prec: u64) -> (Float, Float) {
        assert!(!o.is_zero(), "division by zero");
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let s = (prec as i64 + 2 + o.bits() as i64 - self.bits() as i64).max(0);
        let n = &self.man << s as usize;
        let (q, r) = n.div_rem(&o.man);
        let e = self.exp - s - o.exp;
        let err = if r.is_zero() { Self::zero() } else { Float::pow2(e) };
        (Float::new(q, e), err)
    }

    /// Quotient rounded in the given direction.
    pub fn div_dir(&self, o: &Float, prec: u64, mode: Round) -> Float {
        let (q, err) = self.div_trunc(o, prec);
        if err.is_zero() {
            return q;
        }
        // div_trunc rounds toward zero.
        let positive = self.signum() * o.signum() > 0;
        match (mode, positive) {
            (Round::Up, true) => q.add(&err),
            (Round::Down, false) => q.sub(&err),
            _ => q,
        }
    }

    /// Square root of a nonnegative number: `(floor, ceil)` at `prec` bits.
    pub fn sqrt_bounds(&self, prec: u64) -> (Float, Float) {
        assert!(!self.is_negative(), "sqrt of negative");
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let mut s = (2 * prec as i64 + 2 - self.bits() as i64).max(0);
        if (self.exp - s).rem_euclid(2) == 1 {
            s += 1;
        }
        let n: BigUint = self.man.magnitude() << s as usize;
        let r = n.sqrt();
        let e = (self.exp - s) / 2;
        let exact = &r * &r == n;
        let lo = Float::new(BigInt::from(r.clone()), e);
        let hi = if exact { lo.clone() } else { Float::new(BigInt::from(r + 1u32), e) };
        (lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let shift = bits.saturating_sub(64);
        let m = (&self.man >> shift as usize).to_f64().unwrap_or(0.0);
        let e = self.exp + shift as i64;
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        m * 2f64.powi(e as i32)
    }

    /// `log₂|x|` in double precision without overflow; `−∞` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.bits();
        let shift = bits.saturating_sub(64);
        let m = (&self.man >> shift as usize).to_f64().unwrap_or(1.0).abs();
        m.log2() + (self.exp + shift as i64) as f64
    }

    /// Exact conversion to a rational.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.man << self.exp as usize)
        } else {
            Rational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Decimal rendering with `digits` significant digits (rounded to nearest).
    pub fn to_sci(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let mut k = ((self.mag() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let ten = BigInt::from(10);
        for _ in 0..4 {
            let p = digits as i64 - 1 - k;
            let mut num = self.man.abs();
            let mut den = BigInt::one();
            if self.exp >= 0 {
                num <<= self.exp as usize;
            } else {
                den <<= (-self.exp) as usize;
            }
            if p >= 0 {
                num *= num_traits::pow(ten.clone(), p as usize);
            } else {
                den *= num_traits::pow(ten.clone(), (-p) as usize);
            }
            let q: BigInt = (num * 2 + &den) / (den * 2);
            let s = q.to_string();
            if s.len() > digits {
                k += 1;
                continue;
            }
            if s.len() < digits {
                k -= 1;
                continue;
            }
            let sign = if self.is_negative() { "-" } else { "" };
            let body = if digits == 1 { s.clone() } else { format!("{}.{}", &s[..1], &s[1..]) };
            return if (-4..=15).contains(&k) && digits as i64 > k {
                let plain = plain_decimal(&s, k);
                format!("{sign}{plain}")
            } else {
                format!("{sign}{body}e{k}")
            };
        }
        format!("{}", self.to_f64())
    }
}

fn plain_decimal(digits: &str, k: i64) -> String {
    if k >= 0 {
        let int_len = (k + 1) as usize;
        let (i, f) = digits.split_at(int_len.min(digits.len()));
        if f.is_empty() {
            i.to_string()
        } else {
            format!("{i}.{f}")
        }
    } else {
        format!("0.{}{}", "0".repeat((-k - 1) as usize), digits)
    }
}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Float {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.sub(other);
        d.signum().cmp(&0)
    }
}

fn rad_up(x: Float) -> Float {
    x.round(RAD_BITS, Round::Up)
}

fn rad_sum(parts: &[&Float]) -> Float {
    let mut acc = Float::zero();
    for p in parts {
        acc = rad_up(acc.add(p));
    }
    acc
}

/// Rounds `x` to `prec` bits, returning the result and an upper bound on the error.
fn round_err(x: &Float, prec: u64) -> (Float, Float) {
    let r = x.round(prec, Round::Nearest);
    let err = rad_up(x.sub(&r).abs());
    (r, err)
}

/// Sum rounded to `prec` bits with an error bound, skipping the exact
/// alignment when one summand is far below the other's last bit.
fn add_round(a: &Float, b: &Float, prec: u64) -> (Float, Float) {
    if !a.is_zero() && !b.is_zero() {
        if b.mag() < a.mag() - prec as i64 - 4 {
            let (r, e) = round_err(a, prec);
            return (r, rad_up(e.add(&b.abs())));
        }
        if a.mag() < b.mag() - prec as i64 - 4 {
            let (r, e) = round_err(b, prec);
            return (r, rad_up(e.add(&a.abs())));
        }
    }
    round_err(&a.add(b), prec)
}

/// Real ball `[mid − rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub mid: Float,
    pub rad: Float,
}

impl Ball {
    pub fn exact(mid: Float) -> Self {
        Ball { mid, rad: Float::zero() }
    }

    pub fn zero() -> Self {
        Self::exact(Float::zero())
    }

    pub fn one() -> Self {
        Self::exact(Float::one())
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::exact(Float::from_int(n))
    }

    pub fn from_f64(x: f64) -> Self {
        Self::exact(Float::from_f64(x))
    }

    pub fn with_rad(mid: Float, rad: Float) -> Self {
        assert!(!rad.is_negative());
        Ball { mid, rad: rad_up(rad) }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let n = Ball::from_int(q.numer().clone());
        let d = Ball::from_int(q.denom().clone());
        n.div(&d, prec).expect("nonzero denominator")
    }

    pub fn lower(&self) -> Float {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Float {
        self.mid.add(&self.rad)
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(&self) -> Float {
        rad_up(self.mid.abs().add(&self.rad))
    }

    /// Lower bound on `|x|` over the ball (zero if the ball contains zero).
    pub fn abs_lower(&self) -> Float {
        let l = self.mid.abs().sub(&self.rad);
        if l.is_negative() {
            Float::zero()
        } else {
            l.round(RAD_BITS, Round::Down)
        }
    }

    pub fn contains(&self, x: &Float) -> bool {
        self.mid.sub(x).abs() <= self.rad
    }

    pub fn overlaps(&self, o: &Ball) -> bool {
        self.mid.sub(&o.mid).abs() <= self.rad.add(&o.rad)
    }

    pub fn is_positive(&self) -> bool {
        self.lower().signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.upper().signum() < 0
    }

    /// Certified `self < o`: `Some(true)`, `Some(false)` when `self ≥ o`, `None` when undecided.
    pub fn lt(&self, o: &Ball) -> Option<bool> {
        if self.upper() < o.lower() {
            Some(true)
        } else if self.lower() >= o.upper() {
            Some(false)
        } else {
            None
        }
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: self.mid.neg(), rad: self.rad.clone() }
    }

    pub fn abs(&self) -> Ball {
        Ball { mid: self.mid.abs(), rad: self.rad.clone() }
    }

    pub fn mul_2exp(&self, k: i64) -> Ball {
        Ball { mid: self.mid.mul_2exp(k), rad: self.rad.mul_2exp(k) }
    }

    pub fn add_error(&self, e: &Float) -> Ball {
        Ball { mid: self.mid.clone(), rad: rad_up(self.rad.add(&e.abs())) }
    }

    pub fn round(&self, prec: u32) -> Ball {
        let (m, e) = round_err(&self.mid, prec as u64);
        Ball { mid: m, rad: rad_sum(&[&self.rad, &e]) }
    }

    pub fn add(&self, o: &Ball, prec: u32) -> Ball {
        let (m, e) = add_round(&self.mid, &o.mid, prec as u64);
        Ball { mid: m, rad: rad_sum(&[&self.rad, &o.rad, &e]) }
    }

    pub fn sub(&self, o: &Ball, prec: u32) -> Ball {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Ball, prec: u32) -> Ball {
        let (m, e) = round_err(&self.mid.mul(&o.mid), prec as u64);
        let t1 = self.mid.abs().mul(&o.rad);
        let t2 = o.mid.abs().mul(&self.rad);
        let t3 = self.rad.mul(&o.rad);
        Ball { mid: m, rad: rad_sum(&[&t1, &t2, &t3, &e]) }
    }

    pub fn sqr(&self, prec: u32) -> Ball {
        self.mul(self, prec)
    }

    pub fn mul_int(&self, n: i64, prec: u32) -> Ball {
        self.mul(&Ball::from_int(n), prec)
    }

    pub fn div(&self, o: &Ball, prec: u32) -> Result<Ball> {
        let den_low = o.abs_lower();
        if den_low.is_zero() {
            return domain("division by a ball containing zero");
        }
        let (q, err) = self.mid.div_trunc(&o.mid, prec as u64);
        let q_abs = rad_up(q.abs().add(&err));
        // |x/y − mx/my| ≤ (rx + |mx/my|·ry) / (|my| − ry)
        let num = rad_up(self.rad.add(&q_abs.mul(&o.rad)));
        let prop = if num.is_zero() { Float::zero() } else { num.div_dir(&den_low, RAD_BITS, Round::Up) };
        Ok(Ball { mid: q, rad: rad_sum(&[&prop, &err]) })
    }

    pub fn div_int(&self, n: i64, prec: u32) -> Ball {
        self.div(&Ball::from_int(n), prec).expect("nonzero integer")
    }

    pub fn inv(&self, prec: u32) -> Result<Ball> {
        Ball::one().div(self, prec)
    }

    pub fn pow(&self, n: u32, prec: u32) -> Ball {
        let mut result = Ball::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, prec);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr(prec);
            }
        }
        result
    }

    pub fn sqrt(&self, prec: u32) -> Result<Ball> {
        let lo = self.lower();
        if lo.is_negative() {
            return domain("sqrt of a ball reaching negative values");
        }
        let (s_lo, s_hi) = self.mid.sqrt_bounds(prec as u64);
        let err = rad_up(s_hi.sub(&s_lo));
        if self.rad.is_zero() {
            return Ok(Ball { mid: s_lo, rad: err });
        }
        if lo.is_zero() {
            // Ball is [0, upper]: enclose by [0, sqrt(upper)].
            let (_, up) = self.upper().sqrt_bounds(RAD_BITS);
            let half = up.mul_2exp(-1);
            return Ok(Ball { mid: half.clone(), rad: rad_up(half) });
        }
        let (root_lo, _) = lo.round(RAD_BITS + 8, Round::Down).sqrt_bounds(RAD_BITS);
        let prop = self.rad.div_dir(&root_lo.mul_2exp(1), RAD_BITS, Round::Up);
        Ok(Ball { mid: s_lo, rad: rad_sum(&[&prop, &err]) })
    }

    /// `e^x`.
    pub fn exp(&self, prec: u32) -> Ball {
        let core = exp_exact(&self.mid, prec);
        if self.rad.is_zero() {
            return core;
        }
        let grow = expm1_upper(&self.rad);
        let extra = core.abs_upper().mul(&grow);
        core.add_error(&extra)
    }

    /// Natural logarithm of a positive ball.
    pub fn ln(&self, prec: u32) -> Result<Ball> {
        let lo = self.lower();
        if lo.signum() <= 0 {
            return domain("logarithm of a ball reaching nonpositive values");
        }
        let core = ln_exact(&self.mid, prec);
        if self.rad.is_zero() {
            return Ok(core);
        }
        let extra = self.rad.div_dir(&lo.round(RAD_BITS, Round::Down), RAD_BITS, Round::Up);
        Ok(core.add_error(&extra))
    }

    /// `π` to `prec` bits.
    pub fn pi(prec: u32) -> Ball {
        static CACHE: OnceLock<Mutex<Option<(u32, Ball)>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(None));
        let mut guard = cache.lock().expect("pi cache");
        if let Some((p, b)) = guard.as_ref() {
            if *p >= prec {
                return b.round(prec);
            }
        }
        let w = prec + 16;
        let b = atan_inv(5, w).mul_int(16, w).sub(&atan_inv(239, w).mul_int(4, w), w);
        *guard = Some((prec, b.round(prec)));
        b.round(prec)
    }

    /// `ln 2` to `prec` bits.
    pub fn ln2(prec: u32) -> Ball {
        let w = prec + 16;
        let third = Ball::one().div_int(3, w);
        atanh_series(&third, w).mul_2exp(1).round(prec)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Midpoint-radius decimal rendering.
    pub fn to_sci(&self, digits: usize) -> String {
        format!("{} ± {}", self.mid.to_sci(digits), self.rad.to_sci(3))
    }

    /// The unique integer in the ball, if the radius is below 1/2 and one exists.
    pub fn certified_integer(&self) -> Option<BigInt> {
        if self.rad >= Float::pow2(-1) {
            return None;
        }
        let k = nearest_integer(&self.mid);
        if self.contains(&Float::from_int(k.clone())) {
            Some(k)
        } else {
            None
        }
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(20))
    }
}

fn nearest_integer(x: &Float) -> BigInt {
    if x.exp >= 0 {
        return &x.man << x.exp as usize;
    }
    let den = BigInt::one() << (-x.exp) as usize;
    let two = BigInt::from(2);
    (&x.man * &two + &den).div_floor(&(den * two))
}

/// Upper bound for `e^r − 1` with `r ≥ 0`.
fn expm1_upper(r: &Float) -> Float {
    if r <= &Float::pow2(-1) {
        // e^r − 1 ≤ r·e^r ≤ 2r for r ≤ 1/2
        return rad_up(r.mul_2exp(1));
    }
    let e = exp_exact(&r.round(RAD_BITS, Round::Up), RAD_BITS as u32 + 8);
    rad_up(e.upper().sub(&Float::one()))
}

fn exp_exact(x: &Float, prec: u32) -> Ball {
    if x.is_zero() {
        return Ball::one();
    }
    let s = (x.mag() + 10).max(0);
    let wp = prec + 20 + s as u32;
    let t = Ball::exact(x.mul_2exp(-s).round(wp as u64 + 8, Round::Nearest));
    let t_err = x.mul_2exp(-s).sub(&t.mid).abs();
    let t = t.add_error(&t_err);
    let mut sum = Ball::one();
    let mut term = Ball::one();
    let eps = Float::pow2(-(wp as i64) - 4);
    let mut k = 1i64;
    loop {
        term = term.mul(&t, wp).div_int(k, wp);
        sum = sum.add(&term, wp);
        if term.abs_upper() < eps {
            break;
        }
        k += 1;
    }
    // |t| < 2^-10, so the omitted tail is below the last term.
    sum = sum.add_error(&term.abs_upper());
    for _ in 0..s {
        sum = sum.sqr(wp);
    }
    sum.round(prec)
}

/// `Σ z^(2i+1)/(2i+1)` for `|z| ≤ 1/3`.
fn atanh_series(z: &Ball, wp: u32) -> Ball {
    let z2 = z.sqr(wp);
    let mut pw = z.clone();
    let mut sum = z.clone();
    let eps = Float::pow2(-(wp as i64) - 4);
    let mut i = 1i64;
    loop {
        pw = pw.mul(&z2, wp);
        let term = pw.div_int(2 * i + 1, wp);
        sum = sum.add(&term, wp);
        if term.abs_upper() < eps {
            // remaining tail ≤ term · z²/(1 − z²) ≤ term
            sum = sum.add_error(&term.abs_upper());
            break;
        }
        i += 1;
    }
    sum
}

/// `arctan(1/n)` by its alternating series.
fn atan_inv(n: i64, wp: u32) -> Ball {
    let x = Ball::one().div_int(n, wp);
    let x2 = x.sqr(wp);
    let mut pw = x.clone();
    let mut sum = x.clone();
    let eps = Float::pow2(-(wp as i64) - 4);
    let mut i = 1i64;
    loop {
        pw = pw.mul(&x2, wp);
        let term = pw.div_int(2 * i + 1, wp);
        sum = if i % 2 == 1 { sum.sub(&term, wp) } else { sum.add(&term, wp) };
        if term.abs_upper() < eps {
            sum = sum.add_error(&term.abs_upper());
            break;
        }
        i += 1;
    }
    sum
}

fn ln_exact(x: &Float, prec: u32) -> Ball {
    debug_assert!(x.signum() > 0);
    let k = x.mag() - 1;
    let y = Ball::exact(x.mul_2exp(-k));
    let wp = prec + 20 + (64 - (k.unsigned_abs().max(1)).leading_zeros());
    let num = y.sub(&Ball::one(), wp);
    let den = y.add(&Ball::one(), wp);
    let z = num.div(&den, wp).expect("y + 1 > 0");
    let ln_y = atanh_series(&z, wp).mul_2exp(1);
    let total = ln_y.add(&Ball::ln2(wp).mul_int(k, wp), wp);
    total.round(prec)
}

/// Complex disk: center `re + i·im`, radius `rad`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBall {
    pub re: Float,
    pub im: Float,
    pub rad: Float,
}

impl ComplexBall {
    pub fn zero() -> Self {
        ComplexBall { re: Float::zero(), im: Float::zero(), rad: Float::zero() }
    }

    pub fn one() -> Self {
        Self::from_real(&Ball::one())
    }

    pub fn from_real(x: &Ball) -> Self {
        ComplexBall { re: x.mid.clone(), im: Float::zero(), rad: x.rad.clone() }
    }

    /// Disk enclosing the rectangle `x + i·y`.
    pub fn from_parts(x: &Ball, y: &Ball) -> Self {
        ComplexBall { re: x.mid.clone(), im: y.mid.clone(), rad: rad_sum(&[&x.rad, &y.rad]) }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_real(&Ball::from_int(n))
    }

    pub fn real_part(&self) -> Ball {
        Ball { mid: self.re.clone(), rad: self.rad.clone() }
    }

    pub fn imag_part(&self) -> Ball {
        Ball { mid: self.im.clone(), rad: self.rad.clone() }
    }

    pub fn add_error(&self, e: &Float) -> ComplexBall {
        ComplexBall { re: self.re.clone(), im: self.im.clone(), rad: rad_up(self.rad.add(&e.abs())) }
    }

    pub fn neg(&self) -> ComplexBall {
        ComplexBall { re: self.re.neg(), im: self.im.neg(), rad: self.rad.clone() }
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall { re: self.re.clone(), im: self.im.neg(), rad: self.rad.clone() }
    }

    pub fn mul_2exp(&self, k: i64) -> ComplexBall {
        ComplexBall { re: self.re.mul_2exp(k), im: self.im.mul_2exp(k), rad: self.rad.mul_2exp(k) }
    }

    /// Upper bound on `|mid|`.
    fn mid_abs_upper(&self) -> Float {
        let n2 = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        n2.round(RAD_BITS + 8, Round::Up).sqrt_bounds(RAD_BITS).1
    }

    /// Lower bound on `|mid|`.
    fn mid_abs_lower(&self) -> Float {
        let n2 = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        n2.round(RAD_BITS + 8, Round::Down).sqrt_bounds(RAD_BITS).0
    }

    /// Upper bound on `|z|` over the disk.
    pub fn abs_upper(&self) -> Float {
        rad_up(self.mid_abs_upper().add(&self.rad))
    }

    /// Lower bound on `|z|` over the disk (zero if it contains the origin).
    pub fn abs_lower(&self) -> Float {
        let l = self.mid_abs_lower().sub(&self.rad);
        if l.is_negative() {
            Float::zero()
        } else {
            l
        }
    }

    pub fn add(&self, o: &ComplexBall, prec: u32) -> ComplexBall {
        let (re, e1) = add_round(&self.re, &o.re, prec as u64);
        let (im, e2) = add_round(&self.im, &o.im, prec as u64);
        ComplexBall { re, im, rad: rad_sum(&[&self.rad, &o.rad, &e1, &e2]) }
    }

    pub fn sub(&self, o: &ComplexBall, prec: u32) -> ComplexBall {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &ComplexBall, prec: u32) -> ComplexBall {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        let (re, e1) = round_err(&re, prec as u64);
        let (im, e2) = round_err(&im, prec as u64);
        let rad = if self.rad.is_zero() && o.rad.is_zero() {
            rad_sum(&[&e1, &e2])
        } else {
            let t1 = self.mid_abs_upper().mul(&o.rad);
            let t2 = o.mid_abs_upper().mul(&self.rad);
            let t3 = self.rad.mul(&o.rad);
            rad_sum(&[&t1, &t2, &t3, &e1, &e2])
        };
        ComplexBall { re, im, rad }
    }

    pub fn mul_real(&self, x: &Ball, prec: u32) -> ComplexBall {
        self.mul(&ComplexBall::from_real(x), prec)
    }

    pub fn sqr(&self, prec: u32) -> ComplexBall {
        self.mul(self, prec)
    }

    pub fn pow(&self, n: u32, prec: u32) -> ComplexBall {
        let mut result = ComplexBall::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, prec);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr(prec);
            }
        }
        result
    }

    pub fn inv(&self, prec: u32) -> Result<ComplexBall> {
        let low = self.mid_abs_lower();
        if low <= self.rad {
            return domain("inverse of a disk containing zero");
        }
        let n2 = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let (re, e1) = self.re.div_trunc(&n2, prec as u64);
        let (im, e2) = self.im.neg().div_trunc(&n2, prec as u64);
        let mut rad = rad_sum(&[&e1, &e2]);
        if !self.rad.is_zero() {
            // |1/z − 1/m| ≤ r / (|m|(|m| − r))
            let den = low.mul(&low.sub(&self.rad)).round(RAD_BITS, Round::Down);
            let prop = self.rad.div_dir(&den, RAD_BITS, Round::Up);
            rad = rad_sum(&[&rad, &prop]);
        }
        Ok(ComplexBall { re, im, rad })
    }

    pub fn div(&self, o: &ComplexBall, prec: u32) -> Result<ComplexBall> {
        Ok(self.mul(&o.inv(prec + 8)?, prec))
    }

    /// `|z|` as a real ball.
    pub fn abs(&self, prec: u32) -> Ball {
        let n2 = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let m = Ball::exact(n2).sqrt(prec).expect("nonnegative");
        m.add_error(&self.rad)
    }

    /// `ln |z|`.
    pub fn ln_abs(&self, prec: u32) -> Result<Ball> {
        self.abs(prec + 8).ln(prec)
    }

    /// `e^z`.
    pub fn exp(&self, prec: u32) -> ComplexBall {
        let modulus = Ball::exact(self.re.clone()).exp(prec + 8);
        let (c, s) = cos_sin_exact(&self.im, prec + 8);
        let cis = ComplexBall::from_parts(&c, &s);
        let mut out = cis.mul_real(&modulus, prec);
        if !self.rad.is_zero() {
            let grow = expm1_upper(&self.rad);
            out = out.add_error(&modulus.abs_upper().mul(&grow));
        }
        out
    }

    pub fn contains(&self, re: &Float, im: &Float) -> bool {
        let dr = self.re.sub(re);
        let di = self.im.sub(im);
        let d2 = dr.mul(&dr).add(&di.mul(&di));
        d2 <= self.rad.mul(&self.rad)
    }

    pub fn overlaps(&self, o: &ComplexBall) -> bool {
        let dr = self.re.sub(&o.re);
        let di = self.im.sub(&o.im);
        let d2 = dr.mul(&dr).add(&di.mul(&di));
        let r = self.rad.add(&o.rad);
        d2 <= r.mul(&r)
    }

    /// The integer inside the disk, when the radius is below 1/2 and one exists.
    pub fn certified_integer(&self) -> Option<BigInt> {
        if self.rad >= Float::pow2(-1) {
            return None;
        }
        let k = nearest_integer(&self.re);
        if self.contains(&Float::from_int(k.clone()), &Float::zero()) {
            Some(k)
        } else {
            None
        }
    }

    pub fn to_sci(&self, digits: usize) -> String {
        let sign = if self.im.is_negative() { "-" } else { "+" };
        format!("({} {} {}i) ± {}", self.re.to_sci(digits), sign, self.im.abs().to_sci(digits), self.rad.to_sci(3))
    }
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(20))
    }
}

/// `(cos y, sin y)` for an exact real `y`, by Taylor series after halving and
/// recombination through repeated squaring of `e^{iy}`.
fn cos_sin_exact(y: &Float, prec: u32) -> (Ball, Ball) {
    if y.is_zero() {
        return (Ball::one(), Ball::zero());
    }
    let s = (y.mag() + 10).max(0);
    let wp = prec + 20 + s as u32;
    let t = Ball::exact(y.mul_2exp(-s));
    let t2 = t.sqr(wp);
    let eps = Float::pow2(-(wp as i64) - 4);
    let mut cos = Ball::one();
    let mut sin = t.clone();
    let mut ct = Ball::one();
    let mut st = t.clone();
    let mut k = 1i64;
    loop {
        ct = ct.mul(&t2, wp).div_int((2 * k - 1) * (2 * k), wp).neg();
        st = st.mul(&t2, wp).div_int((2 * k) * (2 * k + 1), wp).neg();
        cos = cos.add(&ct, wp);
        sin = sin.add(&st, wp);
        if ct.abs_upper() < eps && st.abs_upper() < eps {
            cos = cos.add_error(&ct.abs_upper());
            sin = sin.add_error(&st.abs_upper());
            break;
        }
        k += 1;
    }
    let mut z = ComplexBall::from_parts(&cos, &sin);
    for _ in 0..s {
        z = z.sqr(wp);
    }
    (z.real_part().round(prec), z.imag_part().round(prec))
}

/// Retries `f` at doubling precision from `start` up to [`MAX_PREC`].
pub fn escalate<T>(start: u32, mut f: impl FnMut(u32) -> Result<Option<T>>) -> Result<T> {
    let mut prec = start.max(32);
    loop {
        if let Some(v) = f(prec)? {
            return Ok(v);
        }
        if prec >= MAX_PREC {
            return Err(Error::PrecisionUnreachable(prec));
        }
        prec = (prec * 2).min(MAX_PREC);
    }
}

/// Certified decision of `a(prec) < b(prec)` with precision escalation.
pub fn decide_lt(label: &str, start: u32, mut eval: impl FnMut(u32) -> Result<(Ball, Ball)>) -> Result<bool> {
    escalate(start, |p| {
        let (a, b) = eval(p)?;
        Ok(a.lt(&b))
    })
    .map_err(|e| match e {
        Error::PrecisionUnreachable(_) => Error::Undecided(label.to_string()),
        other => other,
    })
}
