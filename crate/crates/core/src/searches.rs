//! Exhaustive discriminant searches: a class-number sieve over reduced
//! triples, the two-stage bound for class numbers up to 100, and the
//! enumeration of (almost) 2-elementary discriminants with its high-`ω` bands.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{kronecker, phi, primes_below, rat, small_primes, Rational};
use crate::ball::{decide_lt, Ball};
use crate::error::{Error, Result};
use crate::quadforms::{class_group_summary, class_number_from, is_fundamental, psi, Discriminant};

/// Largest sieve bound: one 32-bit counter per discriminant.
pub const SIEVE_LIMIT: u64 = 30_000_000;

/// Tuning for [`sieve_class_numbers_with`].
#[derive(Clone, Debug)]
pub struct SieveOptions {
    pub threads: usize,
    /// Number of `a`-ranges handed to the workers.
    pub chunks: usize,
    /// Also count ambiguous forms.
    pub ambiguous: bool,
    /// Appends `a_start a_end done` per finished chunk.
    pub checkpoint: Option<PathBuf>,
    /// Reports finished chunks on standard error.
    pub progress: bool,
}

impl Default for SieveOptions {
    fn default() -> Self {
        let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
        SieveOptions { threads, chunks: 4 * threads, ambiguous: false, checkpoint: None, progress: false }
    }
}

/// Class numbers (and optionally ambiguous-class counts) for `|Δ| ≤ bound`.
/// Slot `|Δ|/2` holds the count for `|Δ|`; only `|Δ| ≡ 0, 3 mod 4` are valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassNumberTable {
    pub bound: u64,
    counts: Vec<u32>,
    ambiguous: Option<Vec<u32>>,
}

fn valid_abs(n: u64) -> bool {
    n > 0 && matches!(n % 4, 0 | 3)
}

impl ClassNumberTable {
    /// `h(−n)`, or `None` outside the table or for non-discriminants.
    pub fn h(&self, n: u64) -> Option<u32> {
        (valid_abs(n) && n <= self.bound).then(|| self.counts[(n / 2) as usize])
    }

    /// Number of ambiguous classes of `−n`, when the table was built with them.
    pub fn ambiguous(&self, n: u64) -> Option<u32> {
        let amb = self.ambiguous.as_ref()?;
        (valid_abs(n) && n <= self.bound).then(|| amb[(n / 2) as usize])
    }

    /// `(|Δ|, h)` in increasing order of `|Δ|`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        (3..=self.bound).filter(|&n| valid_abs(n)).map(move |n| (n, self.counts[(n / 2) as usize]))
    }
}

fn sieve_range(bound: u64, a_lo: u64, a_hi: u64, h: &mut [u32], amb: Option<&mut [u32]>) {
    let mut amb = amb;
    for a in a_lo..a_hi {
        for b in 0..=a {
            let g = a.gcd(&b);
            let bb = b * b;
            // c ≥ a, with c = a only for b ≥ 0, which always holds here
            let mut c = a;
            loop {
                let n = 4 * a * c - bb;
                if n > bound {
                    break;
                }
                if g == 1 || c.gcd(&g) == 1 {
                    // (a, −b, c) is reduced and distinct unless b ∈ {0, a} or c = a
                    let twin = b != 0 && b != a && c != a;
                    let slot = (n / 2) as usize;
                    h[slot] += 1 + twin as u32;
                    if let Some(amb) = amb.as_deref_mut() {
                        if b == 0 || b == a || c == a {
                            amb[slot] += 1;
                        }
                    }
                }
                c += 1;
            }
        }
    }
}

/// Class numbers of all discriminants with `|Δ| ≤ bound`, by one pass over
/// the reduced triples `(a, b, c)` with `b² − 4ac ≥ −bound`.
pub fn sieve_class_numbers_with(bound: u64, opts: &SieveOptions) -> Result<ClassNumberTable> {
    if bound > SIEVE_LIMIT {
        return Err(Error::Resource(format!("sieve bound {bound} exceeds {SIEVE_LIMIT}")));
    }
    let len = (bound / 2 + 1) as usize;
    let a_max = (bound / 3).sqrt_floor() + 1;
    let chunks = opts.chunks.max(1).min(a_max as usize);
    // every a costs about bound/2 triples, so equal-width ranges balance
    let edges: Vec<u64> = (0..=chunks).map(|i| 1 + (a_max * i as u64) / chunks as u64).collect();
    let next = AtomicUsize::new(0);
    let done = AtomicUsize::new(0);
    let log = Mutex::new(match &opts.checkpoint {
        Some(p) => {
            Some(OpenOptions::new().create(true).append(true).open(p).map_err(|e| Error::Resource(e.to_string()))?)
        }
        None => None,
    });
    let threads = opts.threads.max(1).min(chunks);
    let partials: Vec<(Vec<u32>, Option<Vec<u32>>)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                s.spawn(|| {
                    let mut h = vec![0u32; len];
                    let mut amb = opts.ambiguous.then(|| vec![0u32; len]);
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= chunks {
                            break;
                        }
                        let (lo, hi) = (edges[i], edges[i + 1]);
                        sieve_range(bound, lo, hi, &mut h, amb.as_deref_mut());
                        let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                        if let Some(f) = log.lock().expect("checkpoint lock").as_mut() {
                            let _ = writeln!(f, "{lo} {hi} done");
                        }
                        if opts.progress {
                            eprintln!("sieve: a in [{lo}, {hi}) done ({finished}/{chunks})");
                        }
                    }
                    (h, amb)
                })
            })
            .collect();
        handles.into_iter().map(|t| t.join().expect("sieve worker panicked")).collect()
    });
    let mut iter = partials.into_iter();
    let (mut counts, mut ambiguous) = iter.next().unwrap_or((vec![0; len], opts.ambiguous.then(|| vec![0; len])));
    for (h, amb) in iter {
        counts.iter_mut().zip(&h).for_each(|(x, y)| *x += y);
        if let (Some(a), Some(b)) = (ambiguous.as_mut(), amb) {
            a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
        }
    }
    Ok(ClassNumberTable { bound, counts, ambiguous })
}

trait SqrtFloor {
    fn sqrt_floor(self) -> u64;
}

impl SqrtFloor for u64 {
    fn sqrt_floor(self) -> u64 {
        num_integer::Roots::sqrt(&self)
    }
}

pub fn sieve_class_numbers(bound: u64) -> Result<ClassNumberTable> {
    sieve_class_numbers_with(bound, &SieveOptions::default())
}

/// Largest `|Δ|` up to the bound whose class number is at most a threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SieveReport {
    pub bound: u64,
    pub h_threshold: u64,
    pub max_abs_delta_found: u64,
    pub count_qualifying: u64,
    pub elapsed_seconds: f64,
}

/// Summarizes a table for one threshold.
pub fn sieve_report(table: &ClassNumberTable, h_threshold: u64, elapsed_seconds: f64) -> SieveReport {
    let mut max = 0;
    let mut count = 0;
    for (n, h) in table.iter() {
        if (h as u64) <= h_threshold {
            max = n;
            count += 1;
        }
    }
    SieveReport { bound: table.bound, h_threshold, max_abs_delta_found: max, count_qualifying: count, elapsed_seconds }
}

pub fn watkins_search(bound: u64, h_threshold: u64, opts: &SieveOptions) -> Result<SieveReport> {
    let start = Instant::now();
    let table = sieve_class_numbers_with(bound, opts)?;
    Ok(sieve_report(&table, h_threshold, start.elapsed().as_secs_f64()))
}

/// `D_max(n)`: largest fundamental `|D|` with `h(D) ≤ n`, for the `n` of the
/// form `⌊100/φ(f)⌋`, from Watkins' table.
pub const WATKINS_DMAX: [(u64, u64); 14] = [
    (1, 163),
    (2, 427),
    (3, 907),
    (4, 1555),
    (5, 2683),
    (6, 3763),
    (7, 5923),
    (8, 6307),
    (10, 13843),
    (12, 17803),
    (16, 34483),
    (25, 111763),
    (50, 462883),
    (100, 2383747),
];

pub fn watkins_dmax(n: u64) -> Option<u64> {
    WATKINS_DMAX.iter().find(|&&(m, _)| m == n).map(|&(_, d)| d)
}

/// Beyond this, `φ(f) ≥ √(f/2) > 300`.
const CONDUCTOR_SCAN: u64 = 2 * 300 * 300;

/// Maximizing conductor and the bound `f²·D_max(⌊100/φ(f)⌋)`, together with
/// the branch `D ∈ {−3, −4}` where `φ(f) ≤ 300` and `|Δ| ≤ 4f²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionBound {
    pub bound: u64,
    pub conductor: u64,
    pub small_d_bound: u64,
    pub small_d_conductor: u64,
}

pub fn watkins_extension(h_max: u64) -> Result<ExtensionBound> {
    let mut best = (0, 0);
    let mut small = (0, 0);
    for f in 1..=CONDUCTOR_SCAN * (h_max / 100).max(1) {
        let p = phi(f)?;
        if p <= 3 * h_max && 4 * f * f > small.0 {
            small = (4 * f * f, f);
        }
        if p > h_max {
            continue;
        }
        let n = h_max / p;
        let d = if h_max == 100 {
            watkins_dmax(n).ok_or_else(|| Error::Domain(format!("no D_max entry for {n}")))?
        } else {
            return Err(Error::Domain("tabulated values cover h ≤ 100 only".into()));
        };
        let v = f * f * d;
        if v > best.0 {
            best = (v, f);
        }
    }
    Ok(ExtensionBound {
        bound: best.0.max(small.0),
        conductor: best.1,
        small_d_bound: small.0,
        small_d_conductor: small.1,
    })
}

/// Upper bound on `|Δ|` for every `Δ` with `h(Δ) ≤ 100`.
pub fn watkins_extension_bound() -> u64 {
    watkins_extension(100).expect("table covers every ⌊100/φ(f)⌋").bound
}

/// Tatuzawa-type parameters of the 2-rank argument.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TatuzawaParams {
    pub epsilon: Rational,
    pub floor_abs: u64,
    pub coef: u64,
    pub base: Rational,
    pub omega_cap: u32,
}

impl Default for TatuzawaParams {
    fn default() -> Self {
        TatuzawaParams {
            epsilon: rat(48, 1000),
            floor_abs: 1_116_353_418,
            coef: 26549,
            base: rat(4635, 1000),
            omega_cap: 11,
        }
    }
}

/// One certified claim about the parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParamCheck {
    pub label: String,
    pub pass: bool,
}

impl TatuzawaParams {
    /// `⌊coef·base^n⌋`.
    pub fn band_bound(&self, n: u32) -> u64 {
        let v = Rational::from_integer(self.coef.into()) * num_traits::pow(self.base.clone(), n as usize);
        v.floor().to_integer().to_u64().expect("band bound fits in u64")
    }

    /// Certifies every numerical claim the parameters rest on.
    pub fn verify(&self) -> Result<Vec<ParamCheck>> {
        let eps = self.epsilon.clone();
        let expo = Rational::from_integer(1.into()) / (rat(1, 2) - eps.clone());
        let mut out = Vec::new();
        // (π/(0.655ε))^{1/(1/2−ε)} < coef
        let c = decide_lt("tatuzawa coefficient", 64, |p| {
            let inner = Ball::pi(p).div(&Ball::from_rational(&(rat(655, 1000) * eps.clone()), p), p)?;
            let v = inner.ln(p)?.mul(&Ball::from_rational(&expo, p), p).exp(p);
            Ok((v, Ball::from_int(self.coef)))
        })?;
        out.push(ParamCheck { label: format!("(pi/(0.655 eps))^(1/(1/2-eps)) < {}", self.coef), pass: c });
        // 2^{1/(1/2−ε)} < base
        let b = decide_lt("tatuzawa base", 64, |p| {
            let v = Ball::ln2(p).mul(&Ball::from_rational(&expo, p), p).exp(p);
            Ok((v, Ball::from_rational(&self.base, p)))
        })?;
        out.push(ParamCheck { label: "2^(1/(1/2-eps)) < base".into(), pass: b });
        // e^{1/ε} < floor_abs, and the floor is the smallest such integer
        let inv = Rational::from_integer(1.into()) / eps.clone();
        let f_hi = decide_lt("tatuzawa floor", 64, |p| {
            Ok((Ball::from_rational(&inv, p).exp(p), Ball::from_int(self.floor_abs)))
        })?;
        let f_lo = decide_lt("tatuzawa floor", 64, |p| {
            Ok((Ball::from_int(self.floor_abs - 1), Ball::from_rational(&inv, p).exp(p)))
        })?;
        out.push(ParamCheck { label: "floor_abs - 1 < e^(1/eps) < floor_abs".into(), pass: f_hi && f_lo });
        out.push(ParamCheck { label: "floor_abs exceeds 73130".into(), pass: self.floor_abs > 73130 });
        // 4 times the first omega_cap odd primes exceeds the floor
        let prod = 4 * odd_prime_product(self.omega_cap as usize);
        out.push(ParamCheck {
            label: "4 * (product of the first omega_cap odd primes) > floor_abs".into(),
            pass: prod > BigInt::from(self.floor_abs),
        });
        // bands n ≥ 7 lie above the floor
        out.push(ParamCheck {
            label: "coef * base^7 > floor_abs".into(),
            pass: self.band_bound(7) > self.floor_abs && self.band_bound(6) < self.floor_abs,
        });
        // ω ≥ 12 is impossible: 4·(3⋯37)·41^{n−12} > coef·base^n, and 41 > base
        let lhs = Rational::from_integer(BigInt::from(4) * odd_prime_product(11));
        let rhs = Rational::from_integer(self.coef.into()) * num_traits::pow(self.base.clone(), 12);
        out.push(ParamCheck {
            label: "omega >= 12 contradicts the band bound".into(),
            pass: lhs > rhs && self.base < Rational::from_integer(41.into()),
        });
        Ok(out)
    }
}

fn odd_prime_product(n: usize) -> BigInt {
    small_primes().iter().skip(1).take(n).fold(BigInt::from(1), |acc, &p| acc * p)
}

/// Shape of a negative fundamental discriminant: `−m`, `−4m` or `−8k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FundamentalShape {
    /// `D = −m`, `m ≡ 3 mod 4`.
    Odd,
    /// `D = −4m`, `m ≡ 1 mod 4`.
    Four,
    /// `D = −8k`, `k` odd.
    Eight,
}

/// Calls `visit` with every squarefree product of exactly `r` odd primes up to `limit`.
fn odd_squarefree_with(r: usize, limit: u64, primes: &[u64], visit: &mut dyn FnMut(u64)) {
    fn go(r: usize, limit: u64, primes: &[u64], start: usize, acc: u64, visit: &mut dyn FnMut(u64)) {
        if r == 0 {
            visit(acc);
            return;
        }
        for i in start..primes.len() {
            // the remaining r primes are at least primes[i], primes[i+1], …
            let mut least = acc as u128;
            for j in 0..r {
                match primes.get(i + j) {
                    Some(&p) => least *= p as u128,
                    None => return,
                }
            }
            if least > limit as u128 {
                return;
            }
            go(r - 1, limit, primes, i + 1, acc * primes[i], visit);
        }
    }
    go(r, limit, primes, 0, 1, visit);
}

fn odd_primes_for(r: usize, limit: u64) -> Vec<u64> {
    // the largest prime in a product of r odd primes is at most limit/(3·5⋯)
    let smallest = odd_prime_product(r.saturating_sub(1)).to_u64().unwrap_or(u64::MAX);
    let top = (limit / smallest.max(1)).max(3) as usize + 1;
    primes_below(top).into_iter().skip(1).map(u64::from).collect()
}

/// All fundamental `D` with `ω(D) = n` and `|D| ≤ limit`, by shape.
pub fn fundamentals_with_omega(n: u32, limit: u64, visit: &mut dyn FnMut(i64, FundamentalShape)) {
    let n = n as usize;
    if n == 0 {
        return;
    }
    let primes = odd_primes_for(n, limit);
    odd_squarefree_with(n, limit, &primes, &mut |m| {
        if m % 4 == 3 {
            visit(-(m as i64), FundamentalShape::Odd);
        }
    });
    let primes = odd_primes_for(n - 1, limit / 4);
    odd_squarefree_with(n - 1, limit / 4, &primes, &mut |m| {
        if m % 4 == 1 && m > 1 {
            visit(-4 * m as i64, FundamentalShape::Four);
        }
        // −4 itself has ω = 1
        if m == 1 {
            visit(-4, FundamentalShape::Four);
        }
    });
    odd_squarefree_with(n - 1, limit / 8, &primes, &mut |k| visit(-8 * k as i64, FundamentalShape::Eight));
}

/// `1 + 2·#{split p : p² < |D|/4}`, a lower bound for `h(D)`, stopping once it exceeds `cap`.
pub fn split_prime_lower_bound(d: i64, cap: u64) -> u64 {
    let n = d.unsigned_abs();
    let mut lb = 1;
    for &p in small_primes() {
        let p = p as u64;
        if 4 * p * p >= n {
            return lb;
        }
        if kronecker(d, p as i64) == 1 {
            lb += 2;
            if lb > cap {
                return lb;
            }
        }
    }
    // beyond the prime table, fall back on the full summary
    lb
}

/// One `ω` band: candidates per shape and the almost-2-elementary survivors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BandReport {
    pub omega: u32,
    pub bound: u64,
    /// Candidate counts for the shapes `−m`, `−4m`, `−8k`.
    pub candidates: [u64; 3],
    pub passed_prefilter: u64,
    pub almost_two_elementary: Vec<i64>,
}

pub fn band_report(params: &TatuzawaParams, n: u32) -> Result<BandReport> {
    let bound = params.band_bound(n);
    let cap = 1u64 << n;
    let mut candidates = [0u64; 3];
    let mut survivors = Vec::new();
    fundamentals_with_omega(n, bound, &mut |d, shape| {
        candidates[shape as usize] += 1;
        // almost 2-elementary forces h(D) ≤ 2·2^{ω−1}
        if split_prime_lower_bound(d, cap) <= cap {
            survivors.push(d);
        }
    });
    let passed_prefilter = survivors.len() as u64;
    let mut hits = Vec::new();
    for d in survivors {
        let s = class_group_summary(&Discriminant::new(d)?)?;
        if s.is_almost_two_elementary {
            hits.push(d);
        }
    }
    Ok(BandReport { omega: n, bound, candidates, passed_prefilter, almost_two_elementary: hits })
}

/// Band reports for `ω = 7, …, omega_cap`.
pub fn high_omega_bands(params: &TatuzawaParams) -> Result<Vec<BandReport>> {
    (7..=params.omega_cap).map(|n| band_report(params, n)).collect()
}

/// True iff no almost 2-elementary fundamental `D` lies in the bands `ω = 7..=11`.
pub fn high_omega_band_check() -> Result<bool> {
    Ok(high_omega_bands(&TatuzawaParams::default())?.iter().all(|b| b.almost_two_elementary.is_empty()))
}

/// Largest fundamental `|D|` with `h(D) | 64`, outside the table range.
pub const ALMOST_FUNDAMENTAL_LIMIT: u64 = 693_067;

/// Conductors allowed for `D ≠ −3, −4`.
pub fn conductor_candidates(almost: bool) -> Vec<u64> {
    let m = if almost { 240u64 } else { 24 };
    (1..=m).filter(|f| m % f == 0).collect()
}

/// For `D ∈ {−3, −4}`: every `f` built from the prime powers a local
/// argument leaves open, a superset of the proven range.
pub fn small_d_conductor_candidates() -> Vec<u64> {
    let m = 16u64 * 3 * 5 * 7 * 11 * 13;
    (1..=m).filter(|f| m % f == 0).collect()
}

/// Result of the 2-elementary enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoElementaryReport {
    pub almost: bool,
    /// `(Δ, h(Δ))`, sorted by `|Δ|`.
    pub discriminants: Vec<(i64, u64)>,
    pub count: u64,
    pub max_abs: u64,
    pub max_h: u64,
    pub high_omega_bands_empty: bool,
    pub caveat: String,
}

fn candidate_passes(h: u64, delta: i64, almost: bool) -> Result<bool> {
    if !h.is_power_of_two() {
        return Ok(false);
    }
    // the ambiguous classes number at most 2^{ω(Δ)}
    let w = crate::arith::omega(delta)?;
    if h > 1u64 << (w + almost as u32) {
        return Ok(false);
    }
    Ok(true)
}

/// Every (almost) 2-elementary `Δ` whose fundamental part satisfies `|D| ≤ 693067`,
/// from a sieve over the fundamental discriminants, conductor extension and a
/// final [`class_group_summary`].
pub fn enumerate_two_elementary_with(almost: bool, opts: &SieveOptions, bands: bool) -> Result<TwoElementaryReport> {
    let mut o = opts.clone();
    o.ambiguous = true;
    let table = sieve_class_numbers_with(ALMOST_FUNDAMENTAL_LIMIT, &o)?;
    let mut found = Vec::new();
    for n in 3..=ALMOST_FUNDAMENTAL_LIMIT {
        let d = -(n as i64);
        if !valid_abs(n) || !is_fundamental(d) {
            continue;
        }
        let (h, amb) = (table.h(n).unwrap_or(0) as u64, table.ambiguous(n).unwrap_or(0) as u64);
        // Δ (almost) 2-elementary forces D almost 2-elementary
        if (2 * amb) % h != 0 {
            continue;
        }
        let fs = if d == -3 || d == -4 { small_d_conductor_candidates() } else { conductor_candidates(almost) };
        for f in fs {
            let delta = d.checked_mul((f * f) as i64).ok_or_else(|| Error::Resource("Δ overflow".into()))?;
            let hd = class_number_from(h, d, f);
            if !candidate_passes(hd, delta, almost)? {
                continue;
            }
            let s = class_group_summary(&Discriminant::new(delta)?)?;
            debug_assert_eq!(s.h, hd);
            let ok = if almost { s.is_almost_two_elementary } else { s.is_two_elementary };
            if ok {
                found.push((delta, s.h));
            }
        }
    }
    found.sort_by_key(|&(d, _)| d.unsigned_abs());
    let count = found.len() as u64;
    let max_abs = found.last().map_or(0, |&(d, _)| d.unsigned_abs());
    let max_h = found.iter().map(|&(_, h)| h).max().unwrap_or(0);
    let high_omega_bands_empty = if bands { high_omega_band_check()? } else { false };
    Ok(TwoElementaryReport {
        almost,
        discriminants: found,
        count,
        max_abs,
        max_h,
        high_omega_bands_empty,
        caveat: "complete modulo one exceptional fundamental discriminant of class number at least 128".into(),
    })
}

pub fn enumerate_two_elementary(almost: bool) -> Result<TwoElementaryReport> {
    enumerate_two_elementary_with(almost, &SieveOptions::default(), true)
}

/// `Ψ(f, D)` exposed for reports.
pub fn conductor_factor(f: u64, d: i64) -> u64 {
    psi(f, d)
}

/// Sum of `h(Δ)` over the table, a cheap fingerprint for determinism checks.
pub fn table_fingerprint(t: &ClassNumberTable) -> BigInt {
    t.iter().fold(BigInt::zero(), |acc, (n, h)| acc + BigInt::from(n) * h)
}
