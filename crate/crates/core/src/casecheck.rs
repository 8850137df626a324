//! Exact verification of the denominator case analysis: every linear system
//! produced by the case tables has only the trivial solution, the
//! degree configurations are exhaustive, and the q-expansion remainders are
//! small enough for the final contradictions.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::ball::{decide_lt, Ball};
use crate::error::{domain, Result};
use crate::isogeny::admissible_denominators;
use crate::quadforms::{forms_with_denominator, psi};

// ---------------------------------------------------------------------------
// exact kernels

/// Kernel of a homogeneous rational system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Kernel {
    pub dimension: usize,
    pub basis: Vec<Vec<Rational>>,
}

impl Kernel {
    pub fn is_trivial(&self) -> bool {
        self.dimension == 0
    }
}

fn integer_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
            r.iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect()
}

/// Kernel of `rows · v = 0` in `n` unknowns by fraction-free (Bareiss)
/// elimination; the basis vectors are normalized to a leading 1 on their free variable.
pub fn solve_homogeneous(rows: &[Vec<Rational>], n: usize) -> Kernel {
    let mut m = integer_rows(rows);
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            for j in c + 1..n {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Rational::zero(); n];
        v[f] = Rational::one();
        // back substitution on the echelon rows
        for (row, &pc) in pivots.iter().enumerate().rev() {
            let s = (pc + 1..n).fold(Rational::zero(), |s, j| s + Rational::from_integer(m[row][j].clone()) * &v[j]);
            v[pc] = -s / Rational::from_integer(m[row][pc].clone());
        }
        basis.push(v);
    }
    Kernel { dimension: free.len(), basis }
}

fn det(m: &[Vec<Rational>]) -> Rational {
    match m.len() {
        0 => Rational::one(),
        1 => m[0][0].clone(),
        k => (0..k).fold(Rational::zero(), |acc, j| {
            if m[0][j].is_zero() {
                return acc;
            }
            let minor: Vec<Vec<Rational>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let t = &m[0][j] * det(&minor);
            if j % 2 == 0 {
                acc + t
            } else {
                acc - t
            }
        }),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Rank as the size of the largest nonvanishing minor.
pub fn rank_by_minors(rows: &[Vec<Rational>], n: usize) -> usize {
    for k in (1..=rows.len().min(n)).rev() {
        for rs in subsets(rows.len(), k) {
            for cs in subsets(n, k) {
                let sub: Vec<Vec<Rational>> =
                    rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j].clone()).collect()).collect();
                if !det(&sub).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

// ---------------------------------------------------------------------------
// case tables

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TableId {
    /// Dominant option, cases with `K(z) = L` and one equation per automorphism.
    T3,
    /// Dominant option, `{e_x, e_y} = {1, 2}` and `Δ ≡ 1 mod 8`, three equations.
    T4,
    /// Subdominant option, `e_y = e_z = 1`.
    T5,
    /// Subdominant option, `e_y = e_z = 3`.
    Lambda,
}

impl TableId {
    pub fn label(self) -> &'static str {
        match self {
            TableId::T3 => "t3",
            TableId::T4 => "t4",
            TableId::T5 => "t5",
            TableId::Lambda => "lambda",
        }
    }
}

/// Denominator options for `x^σ, y^σ, z^σ` under one automorphism `σ`.
/// With `yz_unordered` the pair `(a(y^σ), a(z^σ))` runs over multisets
/// drawn from `y`; otherwise `y` and `z` are independent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaOptions {
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    pub z: Vec<u64>,
    pub yz_unordered: bool,
}

impl SigmaOptions {
    fn independent(x: &[u64], y: &[u64], z: &[u64]) -> Self {
        SigmaOptions { x: x.to_vec(), y: y.to_vec(), z: z.to_vec(), yz_unordered: false }
    }

    fn paired(x: u64, yz: &[u64]) -> Self {
        SigmaOptions { x: vec![x], y: yz.to_vec(), z: yz.to_vec(), yz_unordered: true }
    }

    /// Every admissible `(a(x^σ), a(y^σ), a(z^σ))`.
    pub fn choices(&self) -> Vec<[u64; 3]> {
        let mut out = Vec::new();
        for &x in &self.x {
            for (i, &y) in self.y.iter().enumerate() {
                let zs: &[u64] = if self.yz_unordered { &self.z[i..] } else { &self.z };
                for &z in zs {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }
}

/// One row of a case table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRow {
    pub case_id: String,
    pub table: TableId,
    pub e: [u64; 3],
    pub ell: u64,
    pub congruence: String,
    /// `(a_x, a_y)` on the left-hand side.
    pub left_xy: [u64; 2],
    pub az_options: Vec<u64>,
    /// `n' = r'`: the `y` and `z` unknowns merge.
    pub tie_nr: bool,
    pub sigmas: Vec<SigmaOptions>,
    pub expected_total: usize,
}

/// The builtin rows.
#[rustfmt::skip]
pub fn builtin_case_tables() -> Vec<CaseRow> {
    let row = |id: &str, table, e, ell, cong: &str, left_xy, az: &[u64], tie, sigmas, total| CaseRow {
        case_id: id.into(),
        table,
        e,
        ell,
        congruence: cong.into(),
        left_xy,
        az_options: az.to_vec(),
        tie_nr: tie,
        sigmas,
        expected_total: total,
    };
    use SigmaOptions as S;
    vec![
        // dominant option, e_x < e_y = e_z
        row("dom-1-3-3", TableId::T3, [1, 3, 3], 3, "1 mod 3", [1, 1], &[9], true,
            vec![S::paired(3, &[3, 27]), S::paired(9, &[9, 81])], 9),
        row("dom-2-3-3", TableId::T3, [2, 3, 3], 6, "1 mod 24", [1, 1], &[9], true,
            vec![S::paired(3, &[3, 27]), S::paired(9, &[9, 81])], 9),
        row("dom-1-4-4", TableId::T3, [1, 4, 4], 4, "1 mod 8", [1, 1], &[4, 16], true,
            vec![S::paired(2, &[2, 8, 32]), S::paired(4, &[4, 16, 64])], 72),
        row("dom-1-6-6", TableId::T3, [1, 6, 6], 6, "1 mod 24", [1, 1], &[4, 9, 36], true,
            vec![S::paired(2, &[2, 8, 18, 72]), S::paired(3, &[3, 12, 27, 108])], 300),
        row("dom-1-2-2-mod32", TableId::T3, [1, 2, 2], 2, "4 mod 32", [1, 1], &[4], true,
            vec![S::paired(8, &[8, 32]), S::paired(16, &[16, 64])], 9),
        // dominant option, {e_x, e_y} = {1, 2}, three automorphisms
        row("dom-1-2-1", TableId::T4, [1, 2, 1], 2, "1 mod 8", [1, 1], &[4], false,
            vec![S::independent(&[2], &[8], &[2, 8]), S::independent(&[4], &[16], &[1]), S::independent(&[2, 8], &[8, 32], &[2])], 8),
        row("dom-1-2-2", TableId::T4, [1, 2, 2], 2, "1 mod 8", [1, 1], &[3], false,
            vec![S::independent(&[2], &[8], &[24]), S::independent(&[3], &[3], &[1]), S::independent(&[6, 24], &[24], &[8])], 2),
        // subdominant option, e_y = e_z = 1
        row("sub-1-1-1", TableId::T5, [1, 1, 1], 1, "1 mod 8", [1, 2], &[2], false,
            vec![S::independent(&[2], &[1], &[4]), S::independent(&[2], &[4], &[1]), S::independent(&[4, 16], &[8], &[2, 8, 32])], 6),
        row("sub-2-1-1", TableId::T5, [2, 1, 1], 2, "1 mod 8", [1, 2], &[2], false,
            vec![S::independent(&[8], &[1], &[4]), S::independent(&[8], &[4], &[1]), S::independent(&[16, 64], &[8], &[2, 8, 32])], 6),
        // subdominant option, e_y = e_z = 3, both e_x ∈ {1, 2} give the same data
        row("sub-x-3-3", TableId::Lambda, [1, 3, 3], 6, "1 mod 24", [1, 2], &[2], true,
            vec![S::paired(3, &[54]), S::paired(9, &[18, 162])], 3),
    ]
}

/// `Σ u_j/L_j = Σ u_j/R_j` over `(m', n', r')`, with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equation {
    pub left: [u64; 3],
    pub right: [u64; 3],
    pub coefficients: Vec<Rational>,
    pub rhs: Rational,
}

/// One homogeneous system with its provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseSystem {
    pub case_id: String,
    pub table: TableId,
    pub unknowns: Vec<String>,
    pub equations: Vec<Equation>,
    pub a_z: u64,
    /// Option index per automorphism.
    pub choice: Vec<usize>,
}

impl CaseSystem {
    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        self.equations.iter().map(|e| e.coefficients.clone()).collect()
    }
}

fn inv(a: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(a))
}

fn equation(left: [u64; 3], right: [u64; 3], tie: bool) -> Equation {
    let c: Vec<Rational> = (0..3).map(|j| inv(left[j]) - inv(right[j])).collect();
    let coefficients = if tie { vec![c[0].clone(), &c[1] + &c[2]] } else { c };
    Equation { left, right, coefficients, rhs: Rational::zero() }
}

/// Cartesian product over `a_z` and every automorphism's options.
pub fn generate_systems(row: &CaseRow) -> Vec<CaseSystem> {
    let per_sigma: Vec<Vec<[u64; 3]>> = row.sigmas.iter().map(SigmaOptions::choices).collect();
    let unknowns: Vec<String> =
        if row.tie_nr { vec!["m'".into(), "n'".into()] } else { vec!["m'".into(), "n'".into(), "r'".into()] };
    let mut out = Vec::new();
    for &az in &row.az_options {
        let left = [row.left_xy[0], row.left_xy[1], az];
        let mut idx = vec![0usize; per_sigma.len()];
        loop {
            let equations = idx.iter().zip(&per_sigma).map(|(&i, opts)| equation(left, opts[i], row.tie_nr)).collect();
            out.push(CaseSystem {
                case_id: row.case_id.clone(),
                table: row.table,
                unknowns: unknowns.clone(),
                equations,
                a_z: az,
                choice: idx.clone(),
            });
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < per_sigma[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    out
}

/// Whether every denominator in a system is `1`, a left-hand denominator or
/// drawn from the row's option sets.
pub fn structural_audit(row: &CaseRow, sys: &CaseSystem) -> bool {
    let mut allowed: BTreeSet<u64> = row.az_options.iter().copied().collect();
    allowed.extend(row.left_xy);
    allowed.insert(1);
    for s in &row.sigmas {
        allowed.extend(s.x.iter().chain(&s.y).chain(&s.z));
    }
    sys.equations.iter().all(|e| {
        e.left.iter().chain(&e.right).all(|a| allowed.contains(a))
            && e.coefficients.iter().all(|c| c.numer().abs() <= BigInt::from(2) * c.denom())
    })
}

/// For rows with `e_x < e_y = e_z`: `a_z` and the `(y^σ, z^σ)` options equal
/// the isogeny-admissible denominators of ratio `e_z/e_x` and degree `ℓ`.
pub fn isogeny_audit(row: &CaseRow) -> Result<bool> {
    if row.table != TableId::T3 {
        return domain("only the e_x < e_y = e_z rows carry isogeny-derived options");
    }
    let [ex, _, ez] = row.e;
    let az: Vec<u64> = admissible_denominators(row.ell, (1, ex), ez, true)?.into_iter().filter(|&a| a >= 2).collect();
    if az != row.az_options {
        return Ok(false);
    }
    for s in &row.sigmas {
        for &ax in &s.x {
            if admissible_denominators(row.ell, (ax, ex), ez, true)? != s.y {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome for one system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemVerdict {
    pub case_id: String,
    pub table: TableId,
    pub a_z: u64,
    pub choice: Vec<usize>,
    pub kernel_dimension: usize,
}

/// Counts for one table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableSummary {
    pub table: TableId,
    pub case_id: String,
    pub expected: usize,
    pub generated: usize,
    pub trivial: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub rows: Vec<TableSummary>,
    pub systems: Vec<SystemVerdict>,
    pub totals_match: bool,
    pub all_trivial: bool,
}

impl CaseReport {
    pub fn pass(&self) -> bool {
        self.totals_match && self.all_trivial
    }

    /// Systems per table.
    pub fn totals(&self) -> BTreeMap<TableId, usize> {
        let mut m = BTreeMap::new();
        for r in &self.rows {
            *m.entry(r.table).or_insert(0) += r.generated;
        }
        m
    }
}

/// Solves every system of the selected rows across `threads` workers.
pub fn check_cases(rows: &[CaseRow], threads: usize) -> CaseReport {
    let systems: Vec<CaseSystem> = rows.iter().flat_map(generate_systems).collect();
    let threads = threads.max(1);
    let per = systems.len().div_ceil(threads).max(1);
    let verdicts: Vec<SystemVerdict> = std::thread::scope(|s| {
        let hs: Vec<_> = systems
            .chunks(per)
            .map(|chunk| {
                s.spawn(move || {
                    chunk
                        .iter()
                        .map(|sys| SystemVerdict {
                            case_id: sys.case_id.clone(),
                            table: sys.table,
                            a_z: sys.a_z,
                            choice: sys.choice.clone(),
                            kernel_dimension: solve_homogeneous(&sys.matrix(), sys.unknowns.len()).dimension,
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        hs.into_iter().flat_map(|h| h.join().expect("case worker panicked")).collect()
    });
    let summaries: Vec<TableSummary> = rows
        .iter()
        .map(|r| {
            let mine: Vec<&SystemVerdict> = verdicts.iter().filter(|v| v.case_id == r.case_id).collect();
            TableSummary {
                table: r.table,
                case_id: r.case_id.clone(),
                expected: r.expected_total,
                generated: mine.len(),
                trivial: mine.iter().filter(|v| v.kernel_dimension == 0).count(),
            }
        })
        .collect();
    let totals_match = summaries.iter().all(|s| s.expected == s.generated);
    let all_trivial = verdicts.iter().all(|v| v.kernel_dimension == 0);
    CaseReport { rows: summaries, systems: verdicts, totals_match, all_trivial }
}

pub fn check_all_cases() -> CaseReport {
    check_cases(&builtin_case_tables(), 1)
}

/// Rows of one table, by selector `t3`, `t4`, `t5`, `lambda` or `all`.
pub fn rows_for(selector: &str) -> Result<Vec<CaseRow>> {
    let all = builtin_case_tables();
    match selector {
        "all" => Ok(all),
        s => {
            let rows: Vec<CaseRow> = all.into_iter().filter(|r| r.table.label() == s).collect();
            if rows.is_empty() {
                return domain(format!("unknown table selector {s}"));
            }
            Ok(rows)
        }
    }
}

// ---------------------------------------------------------------------------
// degenerate systems

/// Parses a congruence label such as `1 mod 24`.
pub fn parse_congruence(label: &str) -> Result<(u64, u64)> {
    let parts: Vec<&str> = label.split_whitespace().collect();
    match parts.as_slice() {
        [r, "mod", m] => match (r.parse(), m.parse()) {
            (Ok(r), Ok(m)) => Ok((m, r)),
            _ => domain(format!("bad congruence {label}")),
        },
        _ => domain(format!("bad congruence {label}")),
    }
}

/// Discriminants `Δ` of the row's class with `lo ≤ |Δ| ≤ hi`.
fn class_sample(row: &CaseRow, lo: u64, hi: u64) -> Result<Vec<i64>> {
    let (m, r) = parse_congruence(&row.congruence)?;
    Ok((lo..=hi)
        .map(|n| -(n as i64))
        .filter(|&d| matches!(d.rem_euclid(4), 0 | 1) && d.rem_euclid(m as i64) == r as i64)
        .collect())
}

/// A system with a nontrivial kernel and, when found, one denominator in it
/// that no discriminant of the sampled class admits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegenerateSystem {
    pub case_id: String,
    pub a_z: u64,
    pub right: Vec<[u64; 3]>,
    pub kernel: Vec<Vec<Rational>>,
    /// `(point, denominator, e)`: `a(point^σ) = denominator` never occurs for `e²Δ`.
    pub excluded_by: Option<(char, u64, u64)>,
}

/// Every builtin system with a nontrivial kernel, each tested against the
/// denominators actually admitted by `e²Δ` over the sampled class
/// `lo ≤ |Δ| ≤ hi`.
pub fn degenerate_systems(lo: u64, hi: u64) -> Result<Vec<DegenerateSystem>> {
    let mut out = Vec::new();
    for row in builtin_case_tables() {
        let sample = class_sample(&row, lo, hi)?;
        for sys in generate_systems(&row) {
            let k = solve_homogeneous(&sys.matrix(), sys.unknowns.len());
            if k.is_trivial() {
                continue;
            }
            let mut excluded_by = None;
            'search: for eq in &sys.equations {
                for (idx, label) in ['x', 'y', 'z'].into_iter().enumerate() {
                    let (a, e) = (eq.right[idx], row.e[idx]);
                    let never = sample.iter().all(|&d| forms_with_denominator(d * (e * e) as i64, a as i64).is_empty());
                    if never && !sample.is_empty() {
                        excluded_by = Some((label, a, e));
                        break 'search;
                    }
                }
            }
            out.push(DegenerateSystem {
                case_id: sys.case_id.clone(),
                a_z: sys.a_z,
                right: sys.equations.iter().map(|e| e.right).collect(),
                kernel: k.basis,
                excluded_by,
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// degree configurations

/// `(e, [L:K(·)])` for the three points, with the congruence on `Δ` under
/// which the configuration occurs and whether it forces `n = r`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ConfigRow {
    pub e: [u64; 3],
    pub degree: [u64; 3],
    /// `(modulus, residue)`, or `None` when every `Δ` qualifies.
    pub congruence: Option<(u64, u64)>,
    pub n_equals_r: bool,
}

/// The printed configuration table.
pub fn builtin_configurations() -> Vec<ConfigRow> {
    let r = |e, degree, congruence, n_equals_r| ConfigRow { e, degree, congruence, n_equals_r };
    vec![
        r([1, 1, 1], [1, 1, 1], None, false),
        r([1, 1, 2], [1, 1, 1], Some((8, 1)), false),
        r([1, 2, 2], [1, 1, 1], Some((8, 1)), false),
        r([1, 2, 2], [2, 1, 1], Some((4, 0)), true),
        r([1, 3, 3], [2, 1, 1], Some((3, 1)), true),
        r([2, 3, 3], [2, 1, 1], Some((24, 1)), true),
        r([1, 4, 4], [2, 1, 1], Some((8, 1)), true),
        r([1, 6, 6], [2, 1, 1], Some((24, 1)), true),
    ]
}

/// Residues of discriminants modulo 24.
fn discriminant_residues() -> Vec<u64> {
    (0..24).filter(|r| r % 4 == 0 || r % 4 == 1).collect()
}

/// Every coprime `(e_x, e_y, e_z)` with `[L:K(·)] = Ψ(ℓ/e, e²Δ) ≤ 2`, at most
/// one degree 2 and then the other two `e` equal, keyed by canonical form
/// (degree-2 point first, the rest sorted) and mapped to the residues of `Δ`
/// mod 24 where it occurs.
pub fn derive_configurations() -> BTreeMap<([u64; 3], [u64; 3]), BTreeSet<u64>> {
    let mut out: BTreeMap<([u64; 3], [u64; 3]), BTreeSet<u64>> = BTreeMap::new();
    for res in discriminant_residues() {
        // a negative representative; only the classes mod 8 and mod 3 matter
        let delta = res as i64 - 240;
        for ex in 1..=36u64 {
            for ey in 1..=36u64 {
                for ez in 1..=36u64 {
                    let e = [ex, ey, ez];
                    if ex.gcd(&ey).gcd(&ez) != 1 {
                        continue;
                    }
                    let ell = ex.lcm(&ey).lcm(&ez);
                    let deg: Vec<u64> = e.iter().map(|&ei| psi(ell / ei, delta * (ei * ei) as i64)).collect();
                    if deg.iter().any(|&d| d > 2) {
                        continue;
                    }
                    let twos: Vec<usize> = (0..3).filter(|&i| deg[i] == 2).collect();
                    let ok = match twos.as_slice() {
                        [] => true,
                        [i] => {
                            let others: Vec<u64> = (0..3).filter(|j| j != i).map(|j| e[j]).collect();
                            others[0] == others[1]
                        }
                        _ => false,
                    };
                    if !ok {
                        continue;
                    }
                    let mut pts: Vec<(u64, u64)> = (0..3).map(|i| (deg[i], e[i])).collect();
                    // degree-2 point first, then ascending e
                    pts.sort_by_key(|&(d, ei)| (std::cmp::Reverse(d), ei));
                    let key = ([pts[0].1, pts[1].1, pts[2].1], [pts[0].0, pts[1].0, pts[2].0]);
                    out.entry(key).or_default().insert(res);
                }
            }
        }
    }
    out
}

/// Whether the derived configurations and their residue classes match the printed rows.
pub fn configuration_check() -> bool {
    let derived = derive_configurations();
    let table = builtin_configurations();
    if derived.len() != table.len() {
        return false;
    }
    table.iter().all(|row| {
        let Some(res) = derived.get(&(row.e, row.degree)) else { return false };
        let want: BTreeSet<u64> =
            discriminant_residues().into_iter().filter(|r| row.congruence.is_none_or(|(m, a)| r % m == a)).collect();
        *res == want && row.n_equals_r == row.degree.contains(&2)
    })
}

// ---------------------------------------------------------------------------
// q-expansion remainders

/// Standing lower bound on `|Δ|` for the remainder estimates.
pub const MARGIN_FLOOR: u64 = 10_000_000;

/// Certified enclosure of `10^c·|Δ|^{1/2}·e^{−π|Δ|^{1/2}/4}`.
pub fn qexpansion_contradiction_margin(abs_delta: u64, const_exponent: u32, prec: u32) -> Result<Ball> {
    if abs_delta < MARGIN_FLOOR {
        return domain(format!("|Δ| must be at least {MARGIN_FLOOR}"));
    }
    let s = Ball::from_int(abs_delta).sqrt(prec)?;
    let e = s.mul(&Ball::pi(prec), prec).div_int(4, prec).neg().exp(prec);
    let c = Ball::from_int(BigInt::from(10).pow(const_exponent));
    Ok(c.mul(&s, prec).mul(&e, prec))
}

/// Whether the margin is certified below `10^{−target}`.
pub fn margin_below(abs_delta: u64, const_exponent: u32, target: u32) -> Result<bool> {
    let bound = Rational::new(BigInt::one(), BigInt::from(10).pow(target));
    decide_lt("q-expansion margin", 64, |p| {
        Ok((qexpansion_contradiction_margin(abs_delta, const_exponent, p)?, Ball::from_rational(&bound, p)))
    })
}

/// The eighth-root remainder: with `t = e^{−π|Δ|^{1/2}/8}` both
/// `162000t² + 10^{10}t³ < π/12` (nonzero multiple) and `10^{10}t³ < 162000t²`
/// (zero multiple) must hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EighthRootReport {
    pub abs_delta: u64,
    pub t: String,
    pub nonzero_multiple_excluded: bool,
    pub zero_multiple_excluded: bool,
}

pub fn eighth_root_contradiction(abs_delta: u64) -> Result<EighthRootReport> {
    if abs_delta < MARGIN_FLOOR {
        return domain(format!("|Δ| must be at least {MARGIN_FLOOR}"));
    }
    let t_of = |p: u32| -> Result<Ball> {
        let s = Ball::from_int(abs_delta).sqrt(p)?;
        Ok(s.mul(&Ball::pi(p), p).div_int(8, p).neg().exp(p))
    };
    let nonzero = decide_lt("eighth-root remainder", 64, |p| {
        let t = t_of(p)?;
        let lhs = t.sqr(p).mul_int(162_000, p).add(&t.pow(3, p).mul_int(10_000_000_000, p), p);
        Ok((lhs, Ball::pi(p).div_int(12, p)))
    })?;
    let zero = decide_lt("eighth-root remainder", 64, |p| {
        let t = t_of(p)?;
        Ok((t.pow(3, p).mul_int(10_000_000_000, p), t.sqr(p).mul_int(162_000, p)))
    })?;
    Ok(EighthRootReport {
        abs_delta,
        t: t_of(128)?.to_sci(10),
        nonzero_multiple_excluded: nonzero,
        zero_multiple_excluded: zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn row(id: &str) -> CaseRow {
        builtin_case_tables().into_iter().find(|r| r.case_id == id).unwrap()
    }

    #[test]
    fn kernel_examples() {
        // m' + n'/4 − m'/2 − n'/2 = 0
        let k = solve_homogeneous(&[vec![rat(1, 2), rat(-1, 4)]], 2);
        assert_eq!(k.dimension, 1);
        assert_eq!(k.basis[0][1].clone() / &k.basis[0][0], rat(2, 1));
        assert_eq!(solve_homogeneous(&[], 2).dimension, 2);
        let k = solve_homogeneous(&[vec![rat(1, 1), rat(2, 1), rat(3, 1)], vec![rat(2, 1), rat(4, 1), rat(6, 1)]], 3);
        assert_eq!(k.dimension, 2);
        for v in &k.basis {
            assert!((&v[0] + rat(2, 1) * &v[1] + rat(3, 1) * &v[2]).is_zero());
        }
    }

    #[test]
    fn worked_example_systems() {
        let r = row("dom-2-3-3");
        let systems = generate_systems(&r);
        assert_eq!(systems.len(), 9);
        // λ ∈ {2/3, 1/3 + 1/27, 2/27}
        let lambdas: BTreeSet<Rational> =
            systems.iter().map(|s| inv(s.equations[0].right[1]) + inv(s.equations[0].right[2])).collect();
        let want: BTreeSet<Rational> = [rat(2, 3), rat(1, 3) + rat(1, 27), rat(2, 27)].into_iter().collect();
        assert_eq!(lambdas, want);
        let e = &systems[0].equations[0];
        assert_eq!(e.coefficients[0], rat(2, 3));
        // all but λ = 1/3 + 1/27, μ = 1/9 + 1/81 are trivial; that one has m' = −(10/9)n'
        let singular: Vec<&CaseSystem> =
            systems.iter().filter(|s| !solve_homogeneous(&s.matrix(), 2).is_trivial()).collect();
        assert_eq!(singular.len(), 1);
        assert_eq!(singular[0].equations[0].right, [3, 3, 27]);
        assert_eq!(singular[0].equations[1].right, [9, 9, 81]);
        let k = solve_homogeneous(&singular[0].matrix(), 2);
        assert_eq!(k.basis, vec![vec![rat(-10, 9), rat(1, 1)]]);
    }

    #[test]
    fn counts_match_printed_totals() {
        let report = check_all_cases();
        assert!(report.totals_match);
        assert!(!report.all_trivial);
        assert_eq!(report.systems.iter().filter(|v| v.kernel_dimension > 0).count(), 9);
        assert!(report.systems.iter().all(|v| v.kernel_dimension <= 1));
        let t = report.totals();
        assert_eq!(t[&TableId::T3], 399);
        assert_eq!(t[&TableId::T4], 10);
        assert_eq!(t[&TableId::T5], 12);
        assert_eq!(t[&TableId::Lambda], 3);
        let main: usize = report
            .rows
            .iter()
            .filter(|r| r.table == TableId::T3 && r.case_id != "dom-1-2-2-mod32")
            .map(|r| r.generated)
            .sum();
        assert_eq!(main, 390);
    }

    #[test]
    fn solver_agrees_with_minors() {
        for r in builtin_case_tables() {
            for s in generate_systems(&r) {
                let m = s.matrix();
                let n = s.unknowns.len();
                assert_eq!(solve_homogeneous(&m, n).dimension, n - rank_by_minors(&m, n));
                assert!(structural_audit(&r, &s));
            }
        }
    }

    #[test]
    fn options_follow_from_isogenies() {
        for r in builtin_case_tables().into_iter().filter(|r| r.table == TableId::T3) {
            assert!(isogeny_audit(&r).unwrap(), "{}", r.case_id);
        }
        let mut bad = row("dom-1-6-6");
        bad.az_options = vec![4, 9];
        assert!(!isogeny_audit(&bad).unwrap());
    }

    #[test]
    fn dropped_equation_leaves_kernel() {
        // a single equation in two unknowns always has a nontrivial kernel
        let r = row("dom-1-3-3");
        let s = &generate_systems(&r)[0];
        assert_eq!(solve_homogeneous(&s.matrix()[..1], 2).dimension, 1);
    }

    #[test]
    fn degenerate_systems_diagnosed() {
        let d = degenerate_systems(20_000, 40_000).unwrap();
        assert_eq!(d.len(), 9);
        for s in &d {
            // the kernel is spanned by m' = −(1 + 1/a_z)n' whenever a(y^σ) = a(x^σ)
            if s.case_id != "dom-1-2-1" {
                let az = Rational::from_integer(s.a_z.into());
                assert_eq!(s.kernel, vec![vec![-(Rational::one() + Rational::one() / az), Rational::one()]]);
                assert!(s.excluded_by.is_some_and(|(p, _, _)| p == 'y'), "{s:?}");
            } else {
                assert_eq!(s.right[0], s.right[2]);
                assert_eq!(s.excluded_by, None);
            }
        }
    }

    #[test]
    fn configurations_match_table() {
        assert!(configuration_check());
        let d = derive_configurations();
        assert_eq!(d.len(), 8);
        assert_eq!(d[&([1, 1, 1], [1, 1, 1])].len(), 12);
    }

    #[test]
    fn selectors() {
        assert_eq!(rows_for("t4").unwrap().len(), 2);
        assert_eq!(rows_for("all").unwrap().len(), 10);
        assert!(rows_for("t9").is_err());
    }

    #[test]
    fn margins() {
        assert!(margin_below(10_000_000, 17, 900).unwrap());
        assert!(qexpansion_contradiction_margin(9_999_999, 17, 64).is_err());
        let mut prev: Option<Ball> = None;
        for n in [10_000_000u64, 20_000_000, 50_000_000, 100_000_000, 1_000_000_000] {
            let m = qexpansion_contradiction_margin(n, 17, 128).unwrap();
            if let Some(p) = prev {
                assert_eq!(m.lt(&p), Some(true));
            }
            prev = Some(m);
        }
        let r = eighth_root_contradiction(40_000_000).unwrap();
        assert!(r.nonzero_multiple_excluded && r.zero_multiple_excluded);
    }

    /// Leading q-terms of the two root-of-unity relations multiply to a
    /// 24th root of unity for every admissible `ξ`.
    #[test]
    fn branch_bookkeeping() {
        type C = (f64, f64);
        let mul = |a: C, b: C| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
        let pw = |a: C, k: i32| {
            let (r, th) = ((a.0 * a.0 + a.1 * a.1).sqrt(), a.1.atan2(a.0));
            (r.powi(k) * (th * k as f64).cos(), r.powi(k) * (th * k as f64).sin())
        };
        let cis = |x: f64| (x.cos(), x.sin());
        let pi = std::f64::consts::PI;
        let t = 0.3;
        let tt = (t, 0.0);
        let close = |a: C, b: C| (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9;
        // t = e^{−π|Δ|^{1/2}/4}, ξ = e^{πi b₂/4}, b₂ ∈ {0, 2}
        for b2 in [0.0, 2.0] {
            let xi = cis(pi * b2 / 4.0);
            let bp = 2.0 - b2;
            assert!(close(cis(pi * bp / 2.0), mul((-1.0, 0.0), pw(xi, 2))));
            assert!(close(cis(pi * (b2 + 4.0) / 4.0), mul((-1.0, 0.0), xi)));
            let q = [
                pw(tt, 4),
                mul(pw(xi, 2), pw(tt, 2)),
                pw(tt, 8),
                mul((-1.0, 0.0), mul(pw(xi, 2), pw(tt, 2))),
                mul(mul((-1.0, 0.0), xi), tt),
                mul(xi, tt),
            ];
            let prod =
                [pw(q[0], 4), pw(q[1], -4), pw(q[2], -1), pw(q[3], -1), q[4], q[5]].into_iter().fold((1.0, 0.0), mul);
            assert!(close(pw(prod, 24), (1.0, 0.0)));
        }
        // t = e^{−π|Δ|^{1/2}/8}, ξ = e^{πi b₄/8}, b₄ ∈ {0, 4, ±2}, ε = ±1
        for b4 in [0.0, 4.0, 2.0, -2.0] {
            let xi = cis(pi * b4 / 8.0);
            for eps in [1.0, -1.0] {
                let qz = mul((0.0, eps), mul(pw(xi, 2), pw(tt, 4)));
                let q =
                    [pw(tt, 8), mul(pw(xi, 2), pw(tt, 2)), pw(tt, 16), qz, mul(mul((-1.0, 0.0), xi), tt), mul(xi, tt)];
                let prod = [pw(q[0], 3), pw(q[1], -3), pw(q[2], -1), pw(q[3], -1), q[4], q[5]]
                    .into_iter()
                    .fold((1.0, 0.0), mul);
                assert!(close(pw(prod, 24), (1.0, 0.0)), "b4 = {b4}");
            }
        }
    }
}
