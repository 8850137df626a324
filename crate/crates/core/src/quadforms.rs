//! Discriminants, Gauss-reduced binary quadratic forms, class numbers,
//! 2-torsion of class groups and denominator statistics.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{factor, kronecker, sqrt_mod};
use crate::error::{domain, Error, Result};

/// Largest `|Δ|` accepted by point queries.
pub const POINT_QUERY_LIMIT: u64 = 1 << 40;

/// A negative discriminant `Δ = D·f²` with `D` fundamental.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "DiscriminantRepr")]
pub struct Discriminant {
    pub delta: i64,
    #[serde(rename = "d")]
    pub fundamental: i64,
    #[serde(rename = "f")]
    pub conductor: u64,
}

#[derive(Deserialize)]
struct DiscriminantRepr {
    delta: i64,
    d: i64,
    f: u64,
}

impl TryFrom<DiscriminantRepr> for Discriminant {
    type Error = Error;
    fn try_from(r: DiscriminantRepr) -> Result<Self> {
        let disc = split_discriminant(r.delta)?;
        if disc.fundamental != r.d || disc.conductor != r.f {
            return domain(format!("inconsistent split for {}", r.delta));
        }
        Ok(disc)
    }
}

impl Discriminant {
    pub fn new(delta: i64) -> Result<Self> {
        split_discriminant(delta)
    }

    pub fn abs(&self) -> u64 {
        self.delta.unsigned_abs()
    }

    pub fn is_fundamental(&self) -> bool {
        self.conductor == 1
    }

    /// Number of distinct primes dividing `Δ`.
    pub fn omega(&self) -> u32 {
        factor(self.delta).expect("nonzero").omega()
    }

    /// The discriminant `Δ·ℓ²`.
    pub fn scaled(&self, ell: u64) -> Result<Discriminant> {
        let l = ell as i64;
        let d = self
            .delta
            .checked_mul(l)
            .and_then(|x| x.checked_mul(l))
            .ok_or_else(|| Error::Domain("discriminant overflow".into()))?;
        split_discriminant(d)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.delta)
    }
}

pub fn is_discriminant(delta: i64) -> bool {
    delta < 0 && matches!(delta.rem_euclid(4), 0 | 1)
}

/// Whether `d` is a negative fundamental discriminant.
pub fn is_fundamental(d: i64) -> bool {
    if !is_discriminant(d) {
        return false;
    }
    match d.rem_euclid(4) {
        1 => factor(d).map(|f| f.is_squarefree()).unwrap_or(false),
        _ => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && factor(m).map(|f| f.is_squarefree()).unwrap_or(false)
        }
    }
}

/// Splits `Δ` as `D·f²` with `D` fundamental.
pub fn split_discriminant(delta: i64) -> Result<Discriminant> {
    if !is_discriminant(delta) {
        return domain(format!("{delta} is not a negative discriminant"));
    }
    let fac = factor(delta)?;
    let core = fac.squarefree_part() as i64;
    let d = if (-core).rem_euclid(4) == 1 { -core } else { -4 * core };
    let ratio = delta / d;
    let f = (ratio as f64).sqrt().round() as i64;
    let f = (f - 2..=f + 2)
        .find(|&g| g > 0 && g * g == ratio)
        .ok_or_else(|| Error::Domain(format!("{delta} has no conductor decomposition")))?;
    Ok(Discriminant { delta, fundamental: d, conductor: f as u64 })
}

/// `Ψ(ℓ, Δ) = ℓ ∏_{p | ℓ} (1 − (Δ/p)/p)`.
pub fn psi(ell: u64, delta: i64) -> u64 {
    assert!(ell >= 1);
    let f = factor(ell as i64).expect("ell ≥ 1");
    f.factors
        .iter()
        .map(|&(p, e)| {
            let k = kronecker(delta, p as i64) as i64;
            p.pow(e - 1) * (p as i64 - k) as u64
        })
        .product()
}

/// Index `[O_Δ^× : O_{Δℓ²}^×]`.
pub fn unit_index(delta: i64, ell: u64) -> u64 {
    match (delta, ell > 1) {
        (-3, true) => 3,
        (-4, true) => 2,
        _ => 1,
    }
}

/// `h(Δℓ²)` from a known `h(Δ)`.
pub fn class_number_from(h_delta: u64, delta: i64, ell: u64) -> u64 {
    h_delta * psi(ell, delta) / unit_index(delta, ell)
}

/// `h(Δℓ²)` via the class number formula, with `h(Δ)` by point query.
pub fn class_number_formula(delta: &Discriminant, ell: u64) -> Result<u64> {
    Ok(class_number_from(class_number(delta)?, delta.delta, ell))
}

/// A reduced positive definite primitive form `(a, b, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[i64; 3]", try_from = "[i64; 3]")]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl From<ReducedForm> for [i64; 3] {
    fn from(f: ReducedForm) -> Self {
        [f.a, f.b, f.c]
    }
}

impl TryFrom<[i64; 3]> for ReducedForm {
    type Error = Error;
    fn try_from(v: [i64; 3]) -> Result<Self> {
        let f = reduce_form(v[0], v[1], v[2])?;
        if (f.a, f.b, f.c) != (v[0], v[1], v[2]) {
            return domain(format!("({}, {}, {}) is not reduced", v[0], v[1], v[2]));
        }
        Ok(f)
    }
}

impl fmt::Display for ReducedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl ReducedForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Order-at-most-2 shapes: `b = 0`, `b = a` or `a = c`.
    pub fn is_ambiguous(&self) -> bool {
        self.b == 0 || self.b == self.a || self.a == self.c
    }

    pub fn is_principal(&self) -> bool {
        self.a == 1
    }

    /// Reduced representative of the inverse class.
    pub fn inverse(&self) -> ReducedForm {
        if self.is_ambiguous() {
            *self
        } else {
            ReducedForm { a: self.a, b: -self.b, c: self.c }
        }
    }

    /// The principal form of discriminant `delta`.
    pub fn principal(delta: i64) -> ReducedForm {
        let b = delta.rem_euclid(2);
        ReducedForm { a: 1, b, c: (b * b - delta) / 4 }
    }
}

/// Reduces a primitive positive definite form.
pub fn reduce_form(a: i64, b: i64, c: i64) -> Result<ReducedForm> {
    if a <= 0 {
        return domain("leading coefficient must be positive");
    }
    let (a, b, c) = (a as i128, b as i128, c as i128);
    if b * b - 4 * a * c >= 0 {
        return domain("form is not positive definite");
    }
    if a.gcd(&b).gcd(&c) != 1 {
        return domain("form is not primitive");
    }
    Ok(reduce_wide(a, b, c))
}

fn reduce_wide(mut a: i128, mut b: i128, mut c: i128) -> ReducedForm {
    let delta = b * b - 4 * a * c;
    loop {
        if b <= -a || b > a {
            // translate b into (−a, a]
            let two_a = 2 * a;
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            b = r;
            c = (b * b - delta) / (4 * a);
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        break;
    }
    ReducedForm { a: a as i64, b: b as i64, c: c as i64 }
}

fn check_point_query(delta: &Discriminant) -> Result<()> {
    if delta.abs() > POINT_QUERY_LIMIT {
        return Err(Error::Resource(format!("|Δ| = {} exceeds the point-query limit", delta.abs())));
    }
    Ok(())
}

/// Reduced forms of discriminant `delta` with leading coefficient `a`, sorted by `b`.
pub fn forms_with_denominator(delta: i64, a: i64) -> Vec<ReducedForm> {
    assert!(a >= 1);
    let four_a = 4 * a as u64;
    let two_a = 2 * a;
    let mut bs: Vec<i64> = sqrt_mod(delta, four_a)
        .into_iter()
        .map(|r| {
            let r = (r as i64).rem_euclid(two_a);
            if r > a {
                r - two_a
            } else {
                r
            }
        })
        .collect();
    bs.sort_unstable();
    bs.dedup();
    bs.into_iter()
        .filter_map(|b| {
            let c = ((b as i128 * b as i128 - delta as i128) / (4 * a as i128)) as i64;
            let reduced = a < c || (a == c && b >= 0);
            (reduced && a.gcd(&b).gcd(&c) == 1).then_some(ReducedForm { a, b, c })
        })
        .collect()
}

/// All reduced forms of `Δ`, sorted by `(a, b)`; the principal form comes first.
pub fn reduced_forms(delta: &Discriminant) -> Result<Vec<ReducedForm>> {
    check_point_query(delta)?;
    let n = delta.abs() as i64;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= n {
        out.extend(forms_with_denominator(delta.delta, a));
        a += 1;
    }
    Ok(out)
}

/// Class number `h(Δ)` as the number of reduced forms.
pub fn class_number(delta: &Discriminant) -> Result<u64> {
    check_point_query(delta)?;
    let n = delta.abs() as i64;
    let mut h = 0u64;
    let mut a = 1i64;
    while 3 * a * a <= n {
        h += forms_with_denominator(delta.delta, a).len() as u64;
        a += 1;
    }
    Ok(h)
}

/// Gauss composition of two forms of the same discriminant.
pub fn compose(f: &ReducedForm, g: &ReducedForm) -> Result<ReducedForm> {
    let delta = f.discriminant();
    if g.discriminant() != delta {
        return domain("composition of forms with different discriminants");
    }
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2) = (g.a as i128, g.b as i128);
    let d = delta as i128;
    let beta = (b1 + b2) / 2;
    let g1 = a1.extended_gcd(&a2);
    let g2 = g1.gcd.extended_gcd(&beta);
    let e = g2.gcd;
    let (p, q, r) = (g2.x * g1.x, g2.x * g1.y, g2.y);
    let a3 = a1 * a2 / (e * e);
    let num = p * a1 * b2 + q * a2 * b1 + r * (b1 * b2 + d) / 2;
    let b3 = (num / e).rem_euclid(2 * a3);
    let c_num = b3 * b3 - d;
    if c_num % (4 * a3) != 0 {
        return Err(Error::Domain("composition failed to produce an integral form".into()));
    }
    Ok(reduce_wide(a3, b3, c_num / (4 * a3)))
}

/// Class number and 2-torsion data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupSummary {
    pub h: u64,
    pub two_torsion: u64,
    pub is_two_elementary: bool,
    pub is_almost_two_elementary: bool,
}

impl ClassGroupSummary {
    pub fn from_counts(h: u64, two_torsion: u64) -> Self {
        ClassGroupSummary {
            h,
            two_torsion,
            is_two_elementary: h == two_torsion,
            is_almost_two_elementary: (2 * two_torsion) % h == 0,
        }
    }

    /// `ρ₂ = log₂(two_torsion)`.
    pub fn two_rank(&self) -> u32 {
        self.two_torsion.trailing_zeros()
    }
}

/// Class number and number of ambiguous classes of `Δ`.
pub fn class_group_summary(delta: &Discriminant) -> Result<ClassGroupSummary> {
    if delta.abs() > 1 << 32 {
        return Err(Error::Resource("class group summary limited to |Δ| ≤ 2^32".into()));
    }
    let forms = reduced_forms(delta)?;
    let amb = forms.iter().filter(|f| f.is_ambiguous()).count() as u64;
    Ok(ClassGroupSummary::from_counts(forms.len() as u64, amb))
}

/// Whether `a` is the leading coefficient of some reduced form of `Δ`.
pub fn admits_denominator(delta: &Discriminant, a: i64) -> Result<bool> {
    if a < 1 {
        return domain("denominators are positive");
    }
    Ok(!forms_with_denominator(delta.delta, a).is_empty())
}

/// `s(a)`: the maximum over residues `r mod 4a` of `#{b ∈ (−a, a] : b² ≡ r}`.
pub fn max_residue_multiplicity(a: u64) -> u64 {
    let m = 4 * a as i64;
    let mut counts = vec![0u64; m as usize];
    for b in (1 - a as i64)..=(a as i64) {
        counts[(b * b).rem_euclid(m) as usize] += 1;
    }
    counts.into_iter().max().unwrap_or(0)
}

/// `S(A) = Σ_{a<A} s(a)`, the bound on the number of forms with `a < A`.
pub fn denominator_count_bound(big_a: u64) -> u64 {
    (1..big_a).map(max_residue_multiplicity).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        split_discriminant(d).unwrap()
    }

    fn forms(d: i64) -> Vec<(i64, i64, i64)> {
        reduced_forms(&disc(d)).unwrap().into_iter().map(|f| (f.a, f.b, f.c)).collect()
    }

    /// Independent enumeration straight from the reduction inequalities.
    fn brute_forms(d: i64) -> Vec<(i64, i64, i64)> {
        let n = -d;
        let mut out = Vec::new();
        for a in 1..=n {
            if 3 * a * a > n {
                break;
            }
            for b in (-a + 1)..=a {
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if (a < c || (a == c && b >= 0)) && a.gcd(&b).gcd(&c) == 1 {
                    out.push((a, b, c));
                }
            }
        }
        out
    }

    #[test]
    fn split_examples() {
        assert_eq!(disc(-12), Discriminant { delta: -12, fundamental: -3, conductor: 2 });
        assert_eq!(disc(-7), Discriminant { delta: -7, fundamental: -7, conductor: 1 });
        assert_eq!(disc(-2383747).conductor, 1);
        assert_eq!((disc(-7392).fundamental, disc(-7392).conductor), (-1848, 2));
        assert_eq!((disc(-87360).fundamental, disc(-87360).conductor), (-5460, 4));
        assert!(split_discriminant(-5).is_err());
        assert!(split_discriminant(0).is_err());
        assert!(split_discriminant(8).is_err());
        for d in 3..20_000i64 {
            let delta = -d;
            if !is_discriminant(delta) {
                continue;
            }
            let s = disc(delta);
            assert!(is_fundamental(s.fundamental));
            assert_eq!(s.fundamental * (s.conductor * s.conductor) as i64, delta);
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(1, -23), 1);
        assert_eq!(psi(2, -7), 1);
        assert_eq!(psi(2, -3), 3);
    }

    #[test]
    fn class_number_examples() {
        assert_eq!(class_number(&disc(-3)).unwrap(), 1);
        assert_eq!(class_number(&disc(-23)).unwrap(), 3);
        assert_eq!(forms(-4), vec![(1, 0, 1)]);
        assert_eq!(forms(-15), vec![(1, 1, 4), (2, 1, 2)]);
        assert_eq!(forms(-23), vec![(1, 1, 6), (2, -1, 3), (2, 1, 3)]);
        assert_eq!(class_number_formula(&disc(-3), 2).unwrap(), 1);
        assert_eq!(class_number_formula(&disc(-4), 1).unwrap(), 1);
        let h112 = class_number(&disc(-112)).unwrap();
        assert_eq!(class_number_formula(&disc(-7), 4).unwrap(), h112);
        assert_eq!(psi(4, -7), psi(2, -28) * psi(2, -7));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 3..3000i64 {
            let d = -n;
            if is_discriminant(d) {
                assert_eq!(forms(d), brute_forms(d), "Δ = {d}");
            }
        }
    }

    #[test]
    fn exactly_one_dominant_form() {
        for n in 3..5000i64 {
            let d = -n;
            if is_discriminant(d) {
                let fs = reduced_forms(&disc(d)).unwrap();
                assert_eq!(fs.iter().filter(|f| f.a == 1).count(), 1);
                assert_eq!(fs[0], ReducedForm::principal(d));
            }
        }
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_form(1, 0, 1).unwrap(), ReducedForm { a: 1, b: 0, c: 1 });
        assert_eq!(reduce_form(2, 3, 4).unwrap(), ReducedForm { a: 2, b: -1, c: 3 });
        assert_eq!(reduce_form(6, 1, 1).unwrap(), ReducedForm { a: 1, b: 1, c: 6 });
        assert!(reduce_form(2, 2, 2).is_err());
        assert!(reduce_form(1, 3, 1).is_err());
        assert!(reduce_form(-1, 0, -1).is_err());
    }

    #[test]
    fn reduce_is_sl2_invariant() {
        // Apply random unimodular substitutions to reduced forms and reduce back.
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as i64
        };
        for n in [23i64, 47, 71, 104, 260, 1019, 4004] {
            for f in reduced_forms(&disc(-n)).unwrap() {
                let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
                for _ in 0..6 {
                    let t = (next() % 7 - 3) as i128;
                    // x → x + t y
                    let nb = b + 2 * a * t;
                    let nc = a * t * t + b * t + c;
                    b = nb;
                    c = nc;
                    // (a, b, c) → (c, −b, a)
                    if next() % 2 == 0 {
                        std::mem::swap(&mut a, &mut c);
                        b = -b;
                    }
                }
                let back = reduce_form(a as i64, b as i64, c as i64).unwrap();
                assert_eq!(back, f);
            }
        }
    }

    #[test]
    fn composition_examples() {
        let d = -23;
        let p = ReducedForm::principal(d);
        let g = ReducedForm { a: 2, b: 1, c: 3 };
        assert_eq!(compose(&p, &g).unwrap(), g);
        assert_eq!(compose(&g, &g).unwrap(), ReducedForm { a: 2, b: -1, c: 3 });
        assert_eq!(compose(&g, &g.inverse()).unwrap(), p);
        assert!(compose(&g, &ReducedForm::principal(-4)).is_err());
    }

    #[test]
    fn composition_group_laws() {
        for n in [56i64, 84, 231, 420, 1155, 3315, 5460, 9999, 10007, 21311] {
            let d = -n;
            if !is_discriminant(d) {
                continue;
            }
            let fs = reduced_forms(&disc(d)).unwrap();
            let p = ReducedForm::principal(d);
            for x in fs.iter().take(12) {
                assert_eq!(compose(x, &p).unwrap(), *x);
                assert_eq!(compose(x, &x.inverse()).unwrap(), p);
                for y in fs.iter().take(12) {
                    let xy = compose(x, y).unwrap();
                    assert_eq!(xy, compose(y, x).unwrap());
                    for z in fs.iter().take(5) {
                        assert_eq!(compose(&xy, z).unwrap(), compose(x, &compose(y, z).unwrap()).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn summary_examples() {
        let s = class_group_summary(&disc(-23)).unwrap();
        assert_eq!(
            s,
            ClassGroupSummary { h: 3, two_torsion: 1, is_two_elementary: false, is_almost_two_elementary: false }
        );
        assert!(class_group_summary(&disc(-7392)).unwrap().is_two_elementary);
        assert!(class_group_summary(&disc(-87360)).unwrap().is_almost_two_elementary);
    }

    #[test]
    fn denominator_statistics() {
        for a in 2..=5 {
            assert_eq!(max_residue_multiplicity(a), 2);
        }
        assert_eq!(denominator_count_bound(13), 32);
        assert_eq!(denominator_count_bound(18), 48);
        assert_eq!(denominator_count_bound(30), 99);
    }

    #[test]
    fn admits_denominator_examples() {
        assert!(admits_denominator(&disc(-1019), 1).unwrap());
        // Δ ≡ 4 mod 32
        assert!(!admits_denominator(&disc(-28), 2).unwrap());
        assert!(!admits_denominator(&disc(-1020), 2).unwrap());
        // Δ ≡ 1 mod 8 with |Δ| > 15
        assert_eq!(forms_with_denominator(-23, 2).len(), 2);
        assert_eq!(forms_with_denominator(-1015, 2).len(), 2);
        assert!(admits_denominator(&disc(-7), 0).is_err());
    }

    #[test]
    fn serde_shapes() {
        let f = ReducedForm { a: 2, b: -1, c: 3 };
        assert_eq!(serde_json::to_string(&f).unwrap(), "[2,-1,3]");
        let back: ReducedForm = serde_json::from_str("[2,-1,3]").unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<ReducedForm>("[3,-1,2]").is_err());
        let d = disc(-12);
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"delta":-12,"d":-3,"f":2}"#);
        let back: Discriminant = serde_json::from_str(r#"{"delta":-12,"d":-3,"f":2}"#).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Discriminant>(r#"{"delta":-12,"d":-12,"f":1}"#).is_err());
    }
}
