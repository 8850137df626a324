use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use serde_json::{json, Value};

use singmod::ball::{Ball, ComplexBall};
use singmod::casecheck::{
    check_cases, configuration_check, degenerate_systems, derive_configurations, generate_systems, margin_below,
    rows_for, solve_homogeneous, TableId,
};
use singmod::isogeny::{admissible_denominators, q_set, transfer_hypothesis};
use singmod::jfun::{eval_j, singular_modulus, verify_expansion_constants};
use singmod::quadforms::{
    class_group_summary, class_number, class_number_from, forms_with_denominator, is_fundamental,
    max_residue_multiplicity, psi, reduced_forms, unit_index, Discriminant, ReducedForm,
};
use singmod::relations::{
    inequality_hypothesis_family, inequality_hypothesis_report, linear_hypothesis_family, linear_hypothesis_report,
    masser_basis_bound, masser_constant, masser_specialization_holds, relation_lattice_bruteforce,
    verify_relation_integers,
};
use singmod::searches::{
    enumerate_two_elementary_with, sieve_class_numbers_with, sieve_report, SieveOptions, SIEVE_LIMIT,
};
use singmod::Rational;

use super::{Command, Global};
use crate::output::Report;

type Res<T> = std::result::Result<T, String>;

const DESK_BOUND: u64 = 2_500_000;
const FULL_BOUND: u64 = 28_753_200;

fn core<T>(r: singmod::Result<T>) -> Res<T> {
    r.map_err(|e| e.to_string())
}

/// Decimal (`0.016`), fraction (`1/100`) or integer.
fn parse_rational(s: &str) -> Res<Rational> {
    let s = s.trim();
    let bad = || format!("not a number: {s}");
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let q = Rational::new(digits, num_traits::pow(BigInt::from(10), frac.len()));
    Ok(if neg { -q } else { q })
}

fn parse_integers(v: &[String]) -> Res<Vec<BigInt>> {
    v.iter().map(|s| s.trim().parse::<BigInt>().map_err(|_| format!("not an integer: {s}"))).collect()
}

fn sieve_opts(g: &Global) -> SieveOptions {
    let mut o = SieveOptions::default();
    if let Some(t) = g.threads {
        o.threads = t.max(1);
        o.chunks = 4 * o.threads;
    }
    o
}

fn disc(delta: i64) -> Res<Discriminant> {
    core(Discriminant::new(delta))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

pub fn run(cmd: Command, g: &Global) -> Res<Report> {
    match cmd {
        Command::Classnum { delta } => classnum(delta),
        Command::Forms { delta, a } => forms(delta, a),
        Command::Psi { ell, delta } => psi_cmd(ell, delta),
        Command::Denominators { max_a, delta } => denominators(max_a, delta),
        Command::Isogeny { n, delta, a, target_f } => isogeny(n, delta, a, target_f),
        Command::Jeval { form, tau } => jeval(form, tau, g.prec_bits),
        Command::VerifyConstants => verify_constants(g.prec_bits),
        Command::MasserBound { k, x, ell, ratios } => masser(k, x, ell, ratios),
        Command::CheckHypothesis { families: true, .. } => hypothesis_families(),
        Command::CheckHypothesis { k, x, y, a, eps, abs_delta, .. } => {
            let need = |v: Option<u64>, name: &str| v.ok_or_else(|| format!("--{name} is required"));
            hypothesis(need(k, "k")?, need(x, "x")?, need(y, "y")?, need(a, "a")?, eps, abs_delta)
        }
        Command::SolveCases { table } => solve_cases(&table, g),
        Command::SearchWatkins { bound, max_h, full, checkpoint } => search_watkins(bound, max_h, full, checkpoint, g),
        Command::Search2elem { almost, no_bands } => search_2elem(almost, !no_bands, g),
        Command::VerifyRelation { values, exps } => verify_relation(&values, &exps),
        Command::LatticeBruteforce { values, cap } => lattice(&values, cap),
    }
}

fn classnum(delta: i64) -> Res<Report> {
    let d = disc(delta)?;
    let s = core(class_group_summary(&d))?;
    let result = json!({
        "delta": delta.to_string(),
        "fundamental": d.fundamental.to_string(),
        "conductor": d.conductor.to_string(),
        "omega": d.omega(),
        "h": s.h.to_string(),
        "two_torsion": s.two_torsion.to_string(),
        "two_elementary": s.is_two_elementary,
        "almost_two_elementary": s.is_almost_two_elementary,
    });
    Ok(Report::new("classnum", result)
        .table(
            vec!["delta", "h", "two_torsion", "two_elementary", "almost_two_elementary"],
            vec![vec![
                delta.to_string(),
                s.h.to_string(),
                s.two_torsion.to_string(),
                s.is_two_elementary.to_string(),
                s.is_almost_two_elementary.to_string(),
            ]],
        )
        .line(format!("Δ = {delta} = {}·{}²", d.fundamental, d.conductor))
        .line(format!("h = {}, 2-torsion = {}", s.h, s.two_torsion))
        .line(format!("2-elementary: {}, almost 2-elementary: {}", s.is_two_elementary, s.is_almost_two_elementary)))
}

fn forms(delta: i64, a: Option<i64>) -> Res<Report> {
    let d = disc(delta)?;
    let fs: Vec<ReducedForm> = match a {
        Some(a) => forms_with_denominator(delta, a),
        None => core(reduced_forms(&d))?,
    };
    let list: Vec<Value> = fs.iter().map(|f| json!([f.a.to_string(), f.b.to_string(), f.c.to_string()])).collect();
    let mut r = Report::new("forms", json!({ "delta": delta.to_string(), "count": fs.len(), "forms": list }))
        .table(
            vec!["a", "b", "c"],
            fs.iter().map(|f| vec![f.a.to_string(), f.b.to_string(), f.c.to_string()]).collect(),
        )
        .line(format!("{} reduced forms of discriminant {delta}", fs.len()));
    for f in &fs {
        r = r.line(f.to_string());
    }
    Ok(r)
}

fn psi_cmd(ell: u64, delta: i64) -> Res<Report> {
    if ell == 0 {
        return Err("ell must be positive".into());
    }
    let d = disc(delta)?;
    let p = psi(ell, delta);
    let u = unit_index(delta, ell);
    let h = core(class_number(&d))?;
    let hs = class_number_from(h, delta, ell);
    let row = vec![ell.to_string(), delta.to_string(), p.to_string(), u.to_string(), hs.to_string()];
    Ok(Report::new(
        "psi",
        json!({ "ell": ell.to_string(), "delta": delta.to_string(), "psi": p.to_string(), "unit_index": u.to_string(),
                "h_delta": h.to_string(), "h_scaled": hs.to_string() }),
    )
    .table(vec!["ell", "delta", "psi", "unit_index", "h_scaled"], vec![row])
    .line(format!("Ψ({ell}, {delta}) = {p}, unit index {u}"))
    .line(format!("h({delta}) = {h}, h(ℓ²Δ) = {hs}")))
}

fn denominators(max_a: u64, delta: Option<i64>) -> Res<Report> {
    if max_a == 0 {
        return Err("max-a must be positive".into());
    }
    if let Some(d) = delta {
        disc(d)?;
    }
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut cum = 0u64;
    let mut r = Report::new("denominators", Value::Null);
    for a in 1..=max_a {
        let s = max_residue_multiplicity(a);
        let count = delta.map(|d| forms_with_denominator(d, a as i64).len());
        rows.push(vec![a.to_string(), s.to_string(), cum.to_string(), count.map_or(String::new(), |c| c.to_string())]);
        entries.push(json!({ "a": a, "s": s.to_string(), "S_below": cum.to_string(), "forms": count }));
        r = r.line(match count {
            Some(c) => format!("a = {a}: s = {s}, S(a) = {cum}, forms = {c}"),
            None => format!("a = {a}: s = {s}, S(a) = {cum}"),
        });
        cum += s;
    }
    r.result = json!({ "max_a": max_a, "delta": delta.map(|d| d.to_string()), "S_through_max": cum.to_string(), "rows": entries });
    Ok(r.table(vec!["a", "s_a", "S_below_a", "forms"], rows))
}

fn isogeny(n: u64, delta: i64, a: u64, target_f: Option<u64>) -> Res<Report> {
    let d = disc(delta)?;
    let tf = target_f.unwrap_or(d.conductor);
    let ok = transfer_hypothesis(&d, n, a);
    let q = core(q_set(n))?;
    let out = core(admissible_denominators(n, (a, d.conductor), tf, ok))?;
    let ratios: Vec<String> = q.ratios.iter().map(|r| r.to_string()).collect();
    Ok(Report::new(
        "isogeny",
        json!({ "n": n.to_string(), "delta": delta.to_string(), "a": a.to_string(), "source_conductor": d.conductor.to_string(),
                "target_conductor": tf.to_string(), "q_set": ratios, "denominators": out.iter().map(u64::to_string).collect::<Vec<_>>() }),
    )
    .table(vec!["a_target"], out.iter().map(|a| vec![a.to_string()]).collect())
    .line(format!("Q({n}) = {{{}}}", ratios.join(", ")))
    .line(format!("target denominators: {}", join(&out))))
}

fn jeval(form: Option<Vec<i64>>, tau: Option<Vec<String>>, prec: u32) -> Res<Report> {
    let (label, v) = match (form, tau) {
        (Some(f), None) => {
            let [a, b, c] = f[..] else { return Err("--form needs three integers a,b,c".into()) };
            let rf = ReducedForm::try_from([a, b, c]).map_err(|e| e.to_string())?;
            let d = disc(rf.discriminant())?;
            (format!("form {rf}"), core(singular_modulus(&rf, &d, prec))?)
        }
        (None, Some(t)) => {
            let [x, y] = &t[..] else { return Err("--tau needs x,y".into()) };
            let (x, y) = (parse_rational(x)?, parse_rational(y)?);
            let w = prec + 32;
            let tau = ComplexBall::from_parts(&Ball::from_rational(&x, w), &Ball::from_rational(&y, w));
            (format!("tau {x} + {y}i"), core(eval_j(&tau, prec))?)
        }
        _ => return Err("give exactly one of --form or --tau".into()),
    };
    let digits = (prec as f64 * std::f64::consts::LOG10_2) as usize;
    let (re, im) = (v.real_part().to_sci(digits), v.imag_part().to_sci(digits));
    let int = v.certified_integer().map(|k| k.to_string());
    let mut r =
        Report::new("jeval", json!({ "input": label, "precision_bits": prec, "re": re, "im": im, "integer": int }))
            .table(vec!["re", "im", "integer"], vec![vec![re.clone(), im.clone(), int.clone().unwrap_or_default()]])
            .line(format!("j({label})"))
            .line(format!("re = {re}"))
            .line(format!("im = {im}"));
    if let Some(k) = int {
        r = r.line(format!("certified integer {k}"));
    }
    Ok(r)
}

fn verify_constants(prec: u32) -> Res<Report> {
    let rep = core(verify_expansion_constants(prec))?;
    let mut r = Report::new("verify-constants", Value::Null);
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for c in &rep.checks {
        let constant = format!("{}", c.constant as i64);
        let margin = format!("{:.6e}", c.margin);
        checks.push(json!({ "label": c.label, "constant": constant, "majorant": c.majorant, "margin_lower": margin, "pass": c.pass }));
        rows.push(vec![c.label.clone(), constant.clone(), c.majorant.clone(), margin.clone(), c.pass.to_string()]);
        r = r.line(format!(
            "{} {}: {} < {constant} (margin {margin})",
            if c.pass { "ok  " } else { "FAIL" },
            c.label,
            c.majorant
        ));
    }
    r.result = json!({ "precision_bits": rep.precision_bits, "checks": checks });
    Ok(r.table(vec!["label", "constant", "majorant", "margin", "pass"], rows).verified(rep.all_pass))
}

fn masser(k: u64, x: u64, ell: u32, ratios: bool) -> Res<Report> {
    let c = masser_constant(ell);
    let b = core(masser_basis_bound(k, x, ell))?;
    let holds = core(masser_specialization_holds(k, x, ell, ratios))?;
    let row = vec![k.to_string(), x.to_string(), ell.to_string(), c.to_string(), b.to_string(), holds.to_string()];
    Ok(Report::new(
        "masser-bound",
        json!({ "k": k.to_string(), "x": x.to_string(), "ell": ell, "ratios": ratios, "constant": c.to_string(),
                "basis_bound": b.to_string(), "specialization_holds": holds }),
    )
    .table(vec!["k", "x", "ell", "constant", "basis_bound", "specialization_holds"], vec![row])
    .line(format!("c({ell}) = {c}"))
    .line(format!("basis bound for k = {k}, X = {x}: {b}"))
    .line(format!("specialization holds: {holds}")))
}

fn hypothesis(k: u64, x: u64, y: u64, a: u64, eps: Option<String>, abs_delta: Option<u64>) -> Res<Report> {
    let lin = core(linear_hypothesis_report(k, x, y, a))?;
    let mut checks = vec![("linear", lin)];
    if let Some(e) = eps {
        let e = parse_rational(&e)?;
        checks.push(("inequality", core(inequality_hypothesis_report(abs_delta.unwrap_or(x), k, x, a, &e))?));
    }
    let ok = checks.iter().all(|(_, h)| h.hypothesis);
    let mut r = Report::new(
        "check-hypothesis",
        json!({ "k": k.to_string(), "x": x.to_string(), "y": y.to_string(), "a": a.to_string(),
                "checks": checks.iter().map(|(n, h)| json!({ "check": n, "holds": h.hypothesis, "lhs": h.lhs, "rhs": h.rhs, "verdict": h.verdict })).collect::<Vec<_>>() }),
    )
    .table(
        vec!["check", "holds", "lhs", "rhs"],
        checks.iter().map(|(n, h)| vec![n.to_string(), h.hypothesis.to_string(), h.lhs.clone(), h.rhs.clone()]).collect(),
    );
    for (n, h) in &checks {
        r = r.line(format!("{n}: {} ({} vs {})", h.verdict, h.lhs, h.rhs));
    }
    Ok(r.verified(ok))
}

fn hypothesis_families() -> Res<Report> {
    let e = |s: &str| parse_rational(s);
    let checks: Vec<(String, bool)> = vec![
        ("linear k≤4 X≥10^6 A≤9".into(), core(linear_hypothesis_family(4, 1_000_000, 4, 9))?),
        (
            "inequality k≤4 X≥10^6 A≤9 ε=0.16".into(),
            core(inequality_hypothesis_family(4, 1_000_000, 4, 9, &e("0.16")?))?,
        ),
        ("linear k≤4 X≥10^8 A≤9".into(), core(linear_hypothesis_family(4, 100_000_000, 4, 9))?),
        (
            "inequality k≤4 X≥10^8 A≤9 ε=0.016".into(),
            core(inequality_hypothesis_family(4, 100_000_000, 4, 9, &e("0.016")?))?,
        ),
        ("linear k=6 X≥10^10 A≤162".into(), core(linear_hypothesis_family(6, 10_000_000_000, 36, 162))?),
        (
            "inequality k=6 X≥10^10 A≤30 ε=0.01".into(),
            core(inequality_hypothesis_family(6, 10_000_000_000, 36, 30, &e("0.01")?))?,
        ),
        ("margin at |Δ|=10^7 below 10^-900".into(), core(margin_below(10_000_000, 17, 900))?),
    ];
    let ok = checks.iter().all(|c| c.1);
    let mut r = Report::new(
        "check-hypothesis",
        json!({ "families": checks.iter().map(|(l, p)| json!({ "check": l, "holds": p })).collect::<Vec<_>>() }),
    )
    .table(
        vec!["check", "holds", "lhs", "rhs"],
        checks.iter().map(|(l, p)| vec![l.clone(), p.to_string(), String::new(), String::new()]).collect(),
    );
    for (l, p) in &checks {
        r = r.line(format!("{} {l}", if *p { "ok  " } else { "FAIL" }));
    }
    Ok(r.verified(ok))
}

fn solve_cases(selector: &str, g: &Global) -> Res<Report> {
    let threads = g.threads.unwrap_or(1).max(1);
    let want_configs = matches!(selector, "t2" | "all");
    let rows = if selector == "t2" { Vec::new() } else { core(rows_for(selector))? };
    let configs_ok = want_configs.then(configuration_check);
    let rep = check_cases(&rows, threads);

    let mut provenance = BTreeMap::new();
    for row in &rows {
        for s in generate_systems(row) {
            let k = solve_homogeneous(&s.matrix(), s.unknowns.len());
            let right: Vec<[u64; 3]> = s.equations.iter().map(|e| e.right).collect();
            provenance.insert((s.case_id.clone(), s.a_z, s.choice.clone()), (right, k.basis));
        }
    }
    let fmt_right =
        |r: &[[u64; 3]]| r.iter().map(|t| format!("{}/{}/{}", t[0], t[1], t[2])).collect::<Vec<_>>().join(" ");
    let fmt_kernel = |b: &[Vec<Rational>]| {
        b.iter()
            .map(|v| format!("({})", v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ")))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut systems = Vec::new();
    let mut csv_rows = Vec::new();
    for v in &rep.systems {
        let (right, basis) = &provenance[&(v.case_id.clone(), v.a_z, v.choice.clone())];
        systems.push(json!({
            "case_id": v.case_id, "table": v.table.label(), "a_z": v.a_z.to_string(), "choice": v.choice,
            "right": right, "kernel_dimension": v.kernel_dimension,
            "kernel": basis.iter().map(|b| b.iter().map(|q| q.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }));
        csv_rows.push(vec![
            v.case_id.clone(),
            v.table.label().to_string(),
            v.a_z.to_string(),
            join(&v.choice),
            fmt_right(right),
            v.kernel_dimension.to_string(),
            fmt_kernel(basis),
        ]);
    }

    // the four main T3 rows are printed as one subtotal; the mod-32 row follows the other tables
    let main_t3 = |r: &singmod::casecheck::TableSummary| r.table == TableId::T3 && !r.case_id.ends_with("mod32");
    let mut parts = Vec::new();
    if rep.rows.iter().any(main_t3) {
        parts.push(rep.rows.iter().filter(|r| main_t3(r)).map(|r| r.generated).sum::<usize>().to_string());
    }
    for t in [TableId::T4, TableId::T5, TableId::T3, TableId::Lambda] {
        for r in rep.rows.iter().filter(|r| r.table == t && !main_t3(r)) {
            parts.push(r.generated.to_string());
        }
    }
    let total: usize = rep.rows.iter().map(|r| r.generated).sum();
    let totals_line = if parts.is_empty() { String::new() } else { format!("{} = {total}", parts.join("+")) };

    let degenerate = if rep.all_trivial || rows.is_empty() {
        Vec::new()
    } else {
        core(degenerate_systems(20_000, 40_000))?
            .into_iter()
            .filter(|d| rows.iter().any(|r| r.case_id == d.case_id))
            .collect()
    };
    let nontrivial = rep.systems.iter().filter(|v| v.kernel_dimension > 0).count();
    let ok = rep.pass() && configs_ok.unwrap_or(true);

    let mut r = Report::new(
        "solve-cases",
        json!({
            "table": selector,
            "configurations_ok": configs_ok,
            "configurations": if want_configs { derive_configurations().len() } else { 0 },
            "totals": totals_line,
            "rows": rep.rows.iter().map(|s| json!({ "case_id": s.case_id, "table": s.table.label(), "expected": s.expected, "generated": s.generated, "trivial": s.trivial })).collect::<Vec<_>>(),
            "totals_match": rep.totals_match,
            "nontrivial_kernels": nontrivial,
            "degenerate": degenerate.iter().map(|d| json!({
                "case_id": d.case_id, "a_z": d.a_z.to_string(), "right": d.right,
                "kernel": d.kernel.iter().map(|b| b.iter().map(|q| q.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "excluded_by": d.excluded_by.map(|(p, a, e)| json!({ "point": p.to_string(), "denominator": a, "e": e })),
            })).collect::<Vec<_>>(),
            "systems": systems,
        }),
    )
    .table(vec!["case_id", "table", "a_z", "choice", "right", "kernel_dimension", "kernel"], csv_rows);
    if let Some(c) = configs_ok {
        r = r.line(format!("degree configurations: {}", if c { "match" } else { "MISMATCH" }));
    }
    for s in &rep.rows {
        r = r.line(format!(
            "{:<18} {:<6} {:>4} systems (expected {:>4}), {:>4} trivial",
            s.case_id,
            s.table.label(),
            s.generated,
            s.expected,
            s.trivial
        ));
    }
    if !totals_line.is_empty() {
        r = r.line(format!("totals {totals_line}"));
    }
    r = r.line(format!("nontrivial kernels: {nontrivial}"));
    for d in &degenerate {
        let why = match d.excluded_by {
            Some((p, a, e)) => format!("a({p}^σ) = {a} never occurs for discriminant {}²Δ in the sampled class", e),
            None => "no denominator exclusion found".into(),
        };
        r = r.line(format!(
            "  {} a_z={} {} kernel {}: {why}",
            d.case_id,
            d.a_z,
            fmt_right(&d.right),
            fmt_kernel(&d.kernel)
        ));
    }
    Ok(r.verified(ok))
}

fn search_watkins(
    bound: u64,
    max_h: u64,
    full: bool,
    checkpoint: Option<std::path::PathBuf>,
    g: &Global,
) -> Res<Report> {
    let (bound, max_h) = if full { (FULL_BOUND, 100) } else { (bound, max_h) };
    if bound > DESK_BOUND && !full {
        return Err(format!("bounds above {DESK_BOUND} need --full"));
    }
    if bound > SIEVE_LIMIT {
        return Err(format!("bound exceeds the sieve limit {SIEVE_LIMIT}"));
    }
    let mut o = sieve_opts(g);
    o.checkpoint = checkpoint;
    o.progress = full;
    let start = Instant::now();
    let table = core(sieve_class_numbers_with(bound, &o))?;
    let rep = sieve_report(&table, max_h, start.elapsed().as_secs_f64());
    let rows: Vec<Vec<String>> = table
        .iter()
        .filter(|&(_, h)| h as u64 <= max_h)
        .map(|(n, h)| {
            let d = -(n as i64);
            vec![d.to_string(), h.to_string(), is_fundamental(d).to_string()]
        })
        .collect();
    Ok(Report::new(
        "search-watkins",
        json!({ "bound": rep.bound.to_string(), "h_threshold": rep.h_threshold.to_string(),
                "max_abs_delta_found": rep.max_abs_delta_found.to_string(), "count_qualifying": rep.count_qualifying.to_string() }),
    )
    .table(vec!["delta", "h", "fundamental"], rows)
    .line(format!("bound {}, h ≤ {}", rep.bound, rep.h_threshold))
    .line(format!("largest |Δ| found: {}", rep.max_abs_delta_found))
    .line(format!("qualifying discriminants: {}", rep.count_qualifying))
    .elapsed(rep.elapsed_seconds))
}

fn search_2elem(almost: bool, bands: bool, g: &Global) -> Res<Report> {
    let start = Instant::now();
    let rep = core(enumerate_two_elementary_with(almost, &sieve_opts(g), bands))?;
    let what = if almost { "almost 2-elementary" } else { "2-elementary" };
    Ok(Report::new(
        "search-2elem",
        json!({ "almost": almost, "count": rep.count.to_string(), "max_abs": rep.max_abs.to_string(), "max_h": rep.max_h.to_string(),
                "bands_checked": bands, "high_omega_bands_empty": rep.high_omega_bands_empty, "caveat": rep.caveat,
                "discriminants": rep.discriminants.iter().map(|(d, h)| json!([d.to_string(), h.to_string()])).collect::<Vec<_>>() }),
    )
    .table(vec!["delta", "h"], rep.discriminants.iter().map(|(d, h)| vec![d.to_string(), h.to_string()]).collect())
    .line(format!("{} {what} discriminants, max |Δ| = {}, max h = {}", rep.count, rep.max_abs, rep.max_h))
    .line(if bands { format!("ω ∈ [7, 11] bands empty: {}", rep.high_omega_bands_empty) } else { "ω bands not checked".into() })
    .line(format!("caveat: {}", rep.caveat))
    .elapsed(start.elapsed().as_secs_f64()))
}

fn verify_relation(values: &[String], exps: &[i64]) -> Res<Report> {
    let v = parse_integers(values)?;
    let ok = core(verify_relation_integers(&v, exps))?;
    let vs = join(&v);
    let es = join(exps);
    Ok(Report::new(
        "verify-relation",
        json!({ "values": v.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "exponents": exps.iter().map(|e| e.to_string()).collect::<Vec<_>>() }),
    )
    .table(vec!["values", "exponents", "verified"], vec![vec![vs.clone(), es.clone(), ok.to_string()]])
    .line(format!("values {vs}, exponents {es}"))
    .verified(ok))
}

fn lattice(values: &[String], cap: u64) -> Res<Report> {
    let v = parse_integers(values)?;
    let basis = core(relation_lattice_bruteforce(&v, cap))?;
    let header: Vec<String> = (1..=v.len()).map(|i| format!("e{i}")).collect();
    let mut r = Report::new(
        "lattice-bruteforce",
        json!({ "values": v.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "cap": cap.to_string(),
                "rank": basis.len(), "basis": basis.iter().map(|b| b.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>() }),
    )
    .table(header, basis.iter().map(|b| b.iter().map(i64::to_string).collect()).collect())
    .line(format!("relation lattice within Σe² ≤ {cap}: rank {}", basis.len()));
    for b in &basis {
        r = r.line(format!("({})", b.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")));
    }
    Ok(r)
}
