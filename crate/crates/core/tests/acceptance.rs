//! Acceptance criteria. Each prints one PASS/FAIL line; the process exits
//! nonzero when any criterion fails.
//!
//! Witnesses are re-checked by `oracle_failures`, which rebuilds every
//! condition of the tight system from bitmasks without touching the
//! library's system builder. Network identities are recomputed here from
//! the network description alone.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reflecto::classes::{
    has_tight_band_pattern, is_completely_s, is_m_matrix, two_by_two_case, ClassOptions,
    TwoByTwoCase,
};
use reflecto::exec::Execution;
use reflecto::network::{derive, reentrant_spec, Derivation, Discipline, NetworkSpec};
use reflecto::numerics::{RatMatrix, Rational};
use reflecto::tightness::{
    check_tight_system, decide_tight_matrix, two_by_two_witness, Assignment, DecideOptions,
};

const EXEC: Execution = Execution::Parallel;

struct Outcome {
    passed: bool,
    detail: String,
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn ri(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn ones(d: usize) -> Vec<Rational> {
    vec![Rational::one(); d]
}

fn matrix(rows: &[&[i64]]) -> RatMatrix {
    RatMatrix::from_rows(
        rows.iter()
            .map(|row| row.iter().map(|&v| ri(v)).collect())
            .collect(),
    )
    .unwrap()
}

fn r_fbfs() -> RatMatrix {
    matrix(&[&[1, 0, 0], &[-3, 1, 0], &[3, -2, 1]])
}

fn fbfs_line(discipline: Discipline) -> NetworkSpec {
    let means: Vec<Rational> = [2, 1, 2, 1, 1, 1, 1].iter().map(|&m| ri(m)).collect();
    reentrant_spec(&[1, 1, 2, 3, 2, 3, 3], &means, &r(1, 3), discipline).unwrap()
}

fn positive_b(rng: &mut ChaCha8Rng, d: usize) -> Vec<Rational> {
    (0..d)
        .map(|_| r(rng.gen_range(1..=9), rng.gen_range(1..=9)))
        .collect()
}

fn fmt_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn fmt_matrix(m: &RatMatrix) -> String {
    let rows: Vec<String> = (0..m.rows()).map(|i| fmt_vec(m.row(i))).collect();
    format!("[{}]", rows.join(","))
}

// ---------------------------------------------------------------------------
// Independent witness oracle

type Values = BTreeMap<String, Rational>;

fn key(set: u32, face: Option<usize>) -> String {
    let members: Vec<String> = (0..32)
        .filter(|i| set >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect();
    match face {
        None => format!("x{{{}}}", members.join(",")),
        Some(j) => format!("x{{{}}}^({})", members.join(","), j + 1),
    }
}

fn values_of(a: &Assignment) -> Values {
    a.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn parse_values(pairs: &[(&str, &str)]) -> Values {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.parse::<Rational>().unwrap()))
        .collect()
}

/// Conditions of the tight system for `(r, b)` violated by `values`.
///
/// Boundary values `x{D}^(j)` with `j` in `D` are read as `x{D \ {j}}^(j)`;
/// when such a key is supplied it must agree with that value.
fn oracle_failures(
    r: &RatMatrix,
    b: &[Rational],
    values: &Values,
    aux_bounded: bool,
) -> Vec<String> {
    let d = r.rows();
    let full = 1u32 << d;
    let mut known = Vec::new();
    let mut fails = Vec::new();
    for set in 0..full {
        known.push(key(set, None));
        for j in 0..d {
            known.push(key(set, Some(j)));
        }
    }
    for k in values.keys() {
        if !known.contains(k) {
            fails.push(format!("unknown {k}"));
        }
    }
    for set in 0..full {
        let canonical = std::iter::once(key(set, None)).chain(
            (0..d)
                .filter(|j| set >> j & 1 == 0)
                .map(|j| key(set, Some(j))),
        );
        for k in canonical {
            if !values.contains_key(&k) {
                fails.push(format!("missing {k}"));
            }
        }
    }
    if !fails.is_empty() {
        return fails;
    }
    let val = |set: u32, face: Option<usize>| -> &Rational {
        match face {
            Some(j) => &values[&key(set & !(1 << j), Some(j))],
            None => &values[&key(set, None)],
        }
    };
    for set in 0..full {
        for j in (0..d).filter(|j| set >> j & 1 == 1) {
            if let Some(v) = values.get(&key(set, Some(j))) {
                if v != val(set, Some(j)) {
                    fails.push(format!(
                        "{} != {}",
                        key(set, Some(j)),
                        key(set & !(1 << j), Some(j))
                    ));
                }
            }
        }
    }
    if !val(0, None).is_one() || (0..d).any(|j| !val(0, Some(j)).is_one()) {
        fails.push("empty-set values not 1".into());
    }
    for set in 0..full {
        let x = val(set, None);
        if x.is_negative() || *x > Rational::one() {
            fails.push(format!("range {}", key(set, None)));
        }
        for j in (0..d).filter(|j| set >> j & 1 == 0) {
            let y = val(set, Some(j));
            if *y > Rational::one() || (aux_bounded && y.is_negative()) {
                fails.push(format!("range {}", key(set, Some(j))));
            }
        }
        for i in (0..d).filter(|i| set >> i & 1 == 1) {
            let total: Rational = (0..d)
                .map(|j| &r[(i, j)] * &b[j] * (val(set, Some(j)) - x))
                .sum();
            if !total.is_zero() {
                fails.push(format!("balance {} row {}", key(set, None), i + 1));
            }
        }
        for m in (0..d).filter(|m| set >> m & 1 == 0) {
            let bigger = set | 1 << m;
            if val(set, None) < val(bigger, None) {
                fails.push(format!(
                    "monotone {} < {}",
                    key(set, None),
                    key(bigger, None)
                ));
            }
            for j in (0..d).filter(|&j| j != m && set >> j & 1 == 0) {
                if val(set, Some(j)) < val(bigger, Some(j)) {
                    fails.push(format!(
                        "monotone {} < {}",
                        key(set, Some(j)),
                        key(bigger, Some(j))
                    ));
                }
            }
        }
    }
    fails
}

fn is_nontrivial(values: &Values) -> bool {
    values.values().any(|v| !v.is_one())
}

/// A not-tight verdict's witness is accepted by the oracle and is not all ones.
fn witness_confirms(
    r: &RatMatrix,
    b: &[Rational],
    witness: Option<&Assignment>,
    aux_bounded: bool,
) -> bool {
    witness.is_some_and(|w| {
        let values = values_of(w);
        oracle_failures(r, b, &values, aux_bounded).is_empty() && is_nontrivial(&values)
    })
}

fn tight_flag(r: &RatMatrix, b: &[Rational], aux_bounded: bool) -> Result<bool, String> {
    let v = check_tight_system(r, b, aux_bounded).map_err(|e| e.to_string())?;
    if !v.tight && !witness_confirms(r, b, v.witness.as_ref(), aux_bounded) {
        return Err(format!("witness for b={} rejected by oracle", fmt_vec(b)));
    }
    Ok(v.tight)
}

// ---------------------------------------------------------------------------
// Independent network construction

struct Built {
    w: RatMatrix,
    b: RatMatrix,
    f: RatMatrix,
    a: RatMatrix,
    a_inverse: RatMatrix,
    q: RatMatrix,
    low: Vec<usize>,
}

fn build_independently(spec: &NetworkSpec) -> Built {
    let k = spec.classes;
    let p = RatMatrix::from_rows(spec.routing.clone()).unwrap();
    let i_minus_pt = RatMatrix::identity(k).checked_sub(&p.transpose()).unwrap();
    let w = i_minus_pt.inverse().unwrap();
    let m = RatMatrix::diagonal(&spec.service_means);
    let m_inv = RatMatrix::diagonal(
        &spec
            .service_means
            .iter()
            .map(|v| v.recip())
            .collect::<Vec<_>>(),
    );
    let st = |c: usize| spec.station_of_class[c] - 1;
    let mut b = RatMatrix::zeros(k, k);
    let mut f = RatMatrix::zeros(k, k);
    for c in 0..k {
        let same: Vec<usize> = (0..k).filter(|&o| st(o) == st(c)).collect();
        for &o in &same {
            if spec.priority[o] <= spec.priority[c] {
                f[(c, o)] = Rational::one();
            }
        }
        if let Some(&next) = same
            .iter()
            .filter(|&&o| spec.priority[o] < spec.priority[c])
            .max_by_key(|&&o| spec.priority[o])
        {
            b[(c, next)] = Rational::one();
        }
    }
    let a = i_minus_pt
        .matmul(&m_inv)
        .unwrap()
        .matmul(&RatMatrix::identity(k).checked_sub(&b).unwrap())
        .unwrap();
    let a_inverse = f.matmul(&m).unwrap().matmul(&w).unwrap();
    let low: Vec<usize> = (0..spec.stations)
        .map(|i| {
            (0..k)
                .filter(|&c| st(c) == i)
                .max_by_key(|&c| spec.priority[c])
                .unwrap()
        })
        .collect();
    let n = spec.stations;
    let mut q = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            q[(i, j)] = (0..k)
                .filter(|&c| st(c) == i)
                .map(|c| &spec.service_means[c] * &w[(c, low[j])])
                .sum();
        }
    }
    Built {
        w,
        b,
        f,
        a,
        a_inverse,
        q,
        low,
    }
}

fn schur_of(a: &RatMatrix, low: &[usize]) -> Option<RatMatrix> {
    let high: Vec<usize> = (0..a.rows()).filter(|c| !low.contains(c)).collect();
    let a_ll = a.select(low, low);
    if high.is_empty() {
        return Some(a_ll);
    }
    let a_hh_inv = a.select(&high, &high).inverse().ok()?;
    let correction = a
        .select(low, &high)
        .matmul(&a_hh_inv)
        .unwrap()
        .matmul(&a.select(&high, low))
        .unwrap();
    Some(a_ll.checked_sub(&correction).unwrap())
}

/// Identity failures for one network, computed after relabeling.
fn identity_failures(derivation: &Derivation) -> Vec<&'static str> {
    let spec = &derivation.spec;
    let built = build_independently(spec);
    let k = spec.classes;
    let mut fails = Vec::new();
    let f_ib = built
        .f
        .matmul(&RatMatrix::identity(k).checked_sub(&built.b).unwrap())
        .unwrap();
    if !f_ib.is_identity() {
        fails.push("F(I-B) != I");
    }
    if !built.a.matmul(&built.a_inverse).unwrap().is_identity() {
        fails.push("A * closed inverse != I");
    }
    let n = spec.stations;
    if (0..n)
        .any(|i| (0..n).any(|j| built.a_inverse[(built.low[i], built.low[j])] != built.q[(i, j)]))
    {
        fails.push("closed inverse on lowest classes != Q");
    }
    let det_q = built.q.det().unwrap();
    if !det_q.is_zero() {
        match schur_of(&built.a, &built.low) {
            Some(s) if s == built.q.inverse().unwrap() => {}
            _ => fails.push("Schur complement != inverse of Q"),
        }
    }
    if (0..n).any(|i| i > 0 && built.low[i] < built.low[i - 1]) {
        fails.push("lowest classes not increasing after relabeling");
    }
    let lib_agrees = derivation.w == built.w
        && derivation.b == built.b
        && derivation.f == built.f
        && derivation.a == built.a
        && derivation.a_inverse == built.a_inverse
        && derivation.q == built.q
        && derivation.r == (!det_q.is_zero()).then(|| built.q.inverse().unwrap());
    if !lib_agrees {
        fails.push("library matrices differ from independent construction");
    }
    fails
}

// ---------------------------------------------------------------------------
// Random instances

fn random_reentrant_lbfs(rng: &mut ChaCha8Rng) -> NetworkSpec {
    let d = rng.gen_range(1..=4);
    let k = rng.gen_range(d..=8);
    let mut route: Vec<usize> = (1..=d).collect();
    route.extend((d..k).map(|_| rng.gen_range(1..=d)));
    route.shuffle(rng);
    let means: Vec<Rational> = (0..k)
        .map(|_| r(rng.gen_range(1..=4), rng.gen_range(1..=4)))
        .collect();
    reentrant_spec(&route, &means, &Rational::one(), Discipline::Lbfs).unwrap()
}

fn random_spec(rng: &mut ChaCha8Rng, stations: usize, max_classes: usize) -> NetworkSpec {
    let k = rng.gen_range(stations..=max_classes);
    let mut station_of_class: Vec<usize> = (1..=stations).collect();
    station_of_class.extend((stations..k).map(|_| rng.gen_range(1..=stations)));
    station_of_class.shuffle(rng);
    let mut priority: Vec<usize> = (1..=k).collect();
    priority.shuffle(rng);
    let service_means = (0..k)
        .map(|_| r(rng.gen_range(1..=4), rng.gen_range(1..=4)))
        .collect();
    let arrival_rates = (0..k)
        .map(|_| {
            if rng.gen_bool(0.5) {
                r(rng.gen_range(1..=4), 4)
            } else {
                Rational::zero()
            }
        })
        .collect();
    let routing = (0..k)
        .map(|_| {
            let mut row = vec![Rational::zero(); k];
            for _ in 0..rng.gen_range(0..=2) {
                let to = rng.gen_range(0..k);
                row[to] += r(rng.gen_range(1..=3), 8);
            }
            row
        })
        .collect();
    NetworkSpec {
        classes: k,
        stations,
        station_of_class,
        priority,
        service_means,
        arrival_rates,
        routing,
    }
}

/// Strictly diagonally dominant with nonpositive off-diagonal entries, zero
/// entries included.
fn random_m_matrix(rng: &mut ChaCha8Rng) -> RatMatrix {
    let d = rng.gen_range(1..=4);
    let mut m = RatMatrix::zeros(d, d);
    for i in 0..d {
        let mut off = Rational::zero();
        for j in (0..d).filter(|&j| j != i) {
            let v = r(rng.gen_range(0..=4), rng.gen_range(1..=4));
            off += &v;
            m[(i, j)] = -v;
        }
        m[(i, i)] = off + r(rng.gen_range(1..=4), rng.gen_range(1..=4));
    }
    m
}

fn scaled_columns(m: &RatMatrix, b: &[Rational]) -> RatMatrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(i, j)] = &m[(i, j)] * &b[j];
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Criteria

fn fbfs_line_reproduction() -> Outcome {
    let d = derive(&fbfs_line(Discipline::Fbfs)).unwrap();
    let q_ok = d.q == matrix(&[&[1, 0, 0], &[3, 1, 0], &[3, 2, 1]]);
    let r_ok = d.r.as_ref() == Some(&r_fbfs());
    let alpha_ok = d.traffic.alpha.iter().all(|a| *a == r(1, 3));
    let rho_ok = d.traffic.rho.iter().all(One::is_one);
    let passed = q_ok && r_ok && alpha_ok && rho_ok && d.traffic.heavy_traffic;
    Outcome {
        passed,
        detail: format!(
            "Q={} R={} alpha={} rho={} heavy={}",
            fmt_matrix(&d.q),
            d.r.as_ref().map_or("undefined".into(), fmt_matrix),
            fmt_vec(&d.traffic.alpha),
            fmt_vec(&d.traffic.rho),
            d.traffic.heavy_traffic
        ),
    }
}

const FBFS_WITNESS_LITERAL: &[(&str, &str)] = &[
    ("x{1,2,3}", "1/2"),
    ("x{1,2,3}^(1)", "1/2"),
    ("x{1,2,3}^(2)", "1/2"),
    ("x{1,2,3}^(3)", "1/2"),
    ("x{1,2}", "1/2"),
    ("x{1,2}^(1)", "1/2"),
    ("x{1,2}^(2)", "1/2"),
    ("x{1,2}^(3)", "1/2"),
    ("x{1,3}", "1/2"),
    ("x{1,3}^(1)", "1/2"),
    ("x{1,3}^(2)", "1/2"),
    ("x{1,3}^(3)", "1/2"),
    ("x{2,3}", "1/2"),
    ("x{2,3}^(1)", "1/2"),
    ("x{2,3}^(2)", "1/2"),
    ("x{2,3}^(3)", "1/2"),
    ("x{1}", "1"),
    ("x{1}^(1)", "1"),
    ("x{1}^(2)", "1"),
    ("x{1}^(3)", "1/2"),
    ("x{2}", "1"),
    ("x{2}^(1)", "1"),
    ("x{2}^(2)", "1"),
    ("x{2}^(3)", "1/2"),
    ("x{3}", "3/4"),
    ("x{3}^(1)", "1/2"),
    ("x{3}^(2)", "1/2"),
    ("x{3}^(3)", "1"),
    ("x{}", "1"),
    ("x{}^(1)", "1"),
    ("x{}^(2)", "1"),
    ("x{}^(3)", "1"),
];

fn published_witness_regression() -> Outcome {
    let rm = r_fbfs();
    let literal = parse_values(FBFS_WITNESS_LITERAL);
    let mut corrected = literal.clone();
    for k in ["x{1,2}", "x{1,2}^(1)", "x{1,2}^(2)"] {
        corrected.insert(k.into(), Rational::one());
    }
    let mut notes = Vec::new();
    let mut literal_ok = true;
    let mut corrected_ok = true;
    for aux in [true, false] {
        let lf = oracle_failures(&rm, &ones(3), &literal, aux);
        if !lf.is_empty() {
            literal_ok = false;
            notes.push(format!(
                "literal values (aux_bounded={aux}) violate: {}",
                lf.join("; ")
            ));
        }
        let lib = reflecto::tightness::verify_assignment(
            &reflecto::tightness::build_system(&rm, &ones(3), aux).unwrap(),
            &serde_assignment(&literal),
        )
        .unwrap();
        if lib.all_passed() != lf.is_empty() {
            notes.push(format!(
                "library and oracle disagree on literal values (aux_bounded={aux})"
            ));
            literal_ok = false;
        }
        let cf = oracle_failures(&rm, &ones(3), &corrected, aux);
        corrected_ok &= cf.is_empty() && is_nontrivial(&corrected);
    }
    notes.push(format!(
        "values with x{{1,2}}, x{{1,2}}^(1), x{{1,2}}^(2) set to 1 verify in both modes: {corrected_ok}"
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bs = vec![ones(3)];
    bs.extend((0..20).map(|_| positive_b(&mut rng, 3)));
    let lp: Vec<Result<bool, String>> = EXEC.map(&bs, |b| {
        Ok(!tight_flag(&rm, b, true)? && !tight_flag(&rm, b, false)?)
    });
    let refuted = lp.iter().filter(|v| matches!(v, Ok(true))).count();
    let lp_ok = refuted == bs.len();
    notes.push(format!(
        "LP refutes tightness with oracle-checked witness for {refuted}/{} b in both modes",
        bs.len()
    ));
    let unrefuted: Vec<String> = bs
        .iter()
        .zip(&lp)
        .filter(|(_, v)| !matches!(v, Ok(true)))
        .map(|(b, v)| match v {
            Err(e) => format!("{} ({e})", fmt_vec(b)),
            _ => fmt_vec(b),
        })
        .collect();
    if !unrefuted.is_empty() {
        notes.push(format!("tight for b in {}", unrefuted.join(" ")));
    }
    Outcome {
        passed: literal_ok && lp_ok,
        detail: notes.join(" | "),
    }
}

fn serde_assignment(values: &Values) -> Assignment {
    values
        .iter()
        .map(|(k, v)| (k.parse().unwrap(), v.clone()))
        .collect()
}

fn two_by_two_grid() -> Outcome {
    let mut instances = Vec::new();
    for r11 in 1..=2 {
        for r22 in 1..=2 {
            for r12 in -2..=2 {
                for r21 in -2..=2 {
                    for b in [[1, 1], [1, 2], [3, 1]] {
                        instances.push((matrix(&[&[r11, r12], &[r21, r22]]), [ri(b[0]), ri(b[1])]));
                    }
                }
            }
        }
    }
    let opts = ClassOptions::default();
    let failures: Vec<Option<String>> = EXEC.map(&instances, |(m, b)| {
        let case = two_by_two_case(m).unwrap();
        let lp = match tight_flag(m, b, true) {
            Ok(t) => t,
            Err(e) => return Some(format!("{} b={}: {e}", fmt_matrix(m), fmt_vec(b))),
        };
        if lp != case.is_tight() {
            return Some(format!(
                "{} b={}: LP tight={lp}, case {case:?}",
                fmt_matrix(m),
                fmt_vec(b)
            ));
        }
        if case == TwoByTwoCase::NotCompletelyS && is_completely_s(m, &opts).unwrap().holds {
            return Some(format!(
                "{}: not-completely-S case but completely-S",
                fmt_matrix(m)
            ));
        }
        if case == TwoByTwoCase::CompletelySNotTight {
            let w = two_by_two_witness(m, b, &r(1, 2)).unwrap();
            let values = values_of(&w);
            if !oracle_failures(m, b, &values, true).is_empty() || !is_nontrivial(&values) {
                return Some(format!(
                    "{} b={}: closed-form witness rejected",
                    fmt_matrix(m),
                    fmt_vec(b)
                ));
            }
        }
        None
    });
    let diagonal = instances
        .iter()
        .zip(&failures)
        .filter(|((m, _), f)| f.is_some() && is_diagonal(m))
        .count();
    let not_s = instances
        .iter()
        .zip(&failures)
        .filter(|((m, _), f)| {
            f.is_some() && two_by_two_case(m).unwrap() == TwoByTwoCase::NotCompletelyS
        })
        .count();
    let bad: Vec<String> = failures.into_iter().flatten().collect();
    let mut detail = summarize(instances.len(), &bad);
    if !bad.is_empty() {
        detail.push_str(&format!(
            " ({diagonal} with diagonal R, {not_s} outside completely-S)"
        ));
    }
    Outcome {
        passed: bad.is_empty(),
        detail,
    }
}

fn is_diagonal(m: &RatMatrix) -> bool {
    (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)].is_zero()))
}

fn summarize(total: usize, bad: &[String]) -> String {
    let mut s = format!("{}/{total} agree", total - bad.len());
    if !bad.is_empty() {
        let shown: Vec<&str> = bad.iter().take(4).map(String::as_str).collect();
        s.push_str(&format!("; disagreements include {}", shown.join("; ")));
    }
    s
}

fn lbfs_sweep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cases: Vec<(NetworkSpec, Vec<Vec<Rational>>)> = (0..100)
        .map(|_| {
            let spec = random_reentrant_lbfs(&mut rng);
            let d = spec.stations;
            let mut bs = vec![ones(d)];
            bs.extend((0..3).map(|_| positive_b(&mut rng, d)));
            (spec, bs)
        })
        .collect();
    let opts = ClassOptions::default();
    let failures: Vec<Option<String>> = EXEC.map(&cases, |(spec, bs)| {
        let route: Vec<usize> = spec.station_of_class.clone();
        let d = match derive(spec) {
            Ok(d) => d,
            Err(e) => return Some(format!("route {route:?}: {e}")),
        };
        let Some(rm) = d.r.as_ref() else {
            return Some(format!("route {route:?}: Q singular"));
        };
        if !has_tight_band_pattern(rm, &opts).unwrap() {
            return Some(format!(
                "route {route:?}: band pattern fails for R={}",
                fmt_matrix(rm)
            ));
        }
        for b in bs {
            match tight_flag(rm, b, true) {
                Ok(true) => {}
                Ok(false) => {
                    return Some(format!("route {route:?}: not tight for b={}", fmt_vec(b)))
                }
                Err(e) => return Some(format!("route {route:?}: {e}")),
            }
        }
        None
    });
    let bad: Vec<String> = failures.into_iter().flatten().collect();
    Outcome {
        passed: bad.is_empty(),
        detail: summarize(cases.len(), &bad),
    }
}

fn m_matrix_cases(n: usize) -> Vec<(RatMatrix, Vec<Vec<Rational>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..n)
        .map(|_| {
            let m = random_m_matrix(&mut rng);
            let bs = (0..3).map(|_| positive_b(&mut rng, m.rows())).collect();
            (m, bs)
        })
        .collect()
}

fn m_matrix_tightness() -> Outcome {
    let cases = m_matrix_cases(50);
    let opts = ClassOptions::default();
    let failures: Vec<Option<String>> = EXEC.map(&cases, |(m, bs)| {
        if !is_m_matrix(m, &opts).unwrap() {
            return Some(format!(
                "{}: generator produced a non-M-matrix",
                fmt_matrix(m)
            ));
        }
        for b in bs {
            match tight_flag(m, b, true) {
                Ok(true) => {}
                Ok(false) => {
                    return Some(format!("{} not tight for b={}", fmt_matrix(m), fmt_vec(b)))
                }
                Err(e) => return Some(format!("{}: {e}", fmt_matrix(m))),
            }
        }
        None
    });
    let bad: Vec<String> = failures.into_iter().flatten().collect();
    Outcome {
        passed: bad.is_empty(),
        detail: summarize(cases.len(), &bad),
    }
}

fn algebraic_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let specs: Vec<NetworkSpec> = (0..100)
        .map(|_| {
            let stations = rng.gen_range(1..=4);
            random_spec(&mut rng, stations, 10)
        })
        .collect();
    let failures: Vec<Option<String>> = EXEC.map(&specs, |spec| match derive(spec) {
        Ok(d) => {
            let f = identity_failures(&d);
            (!f.is_empty()).then(|| format!("{} classes: {}", spec.classes, f.join(", ")))
        }
        Err(e) => Some(format!("derivation failed: {e}")),
    });
    let bad: Vec<String> = failures.into_iter().flatten().collect();
    Outcome {
        passed: bad.is_empty(),
        detail: summarize(specs.len(), &bad),
    }
}

fn two_station_m_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut derivations = Vec::new();
    let mut draws = 0;
    while derivations.len() < 50 && draws < 10_000 {
        draws += 1;
        let d = derive(&random_spec(&mut rng, 2, 6)).unwrap();
        if d.q.det().unwrap().is_positive() {
            derivations.push(d);
        }
    }
    let class = ClassOptions::default();
    let opts = DecideOptions::default();
    let failures: Vec<Option<String>> = EXEC.map(&derivations, |d| {
        let rm = d.r.as_ref().unwrap();
        if !is_m_matrix(rm, &class).unwrap() {
            return Some(format!("R={} is not an M-matrix", fmt_matrix(rm)));
        }
        match decide_tight_matrix(rm, &opts) {
            Ok(dec) if dec.is_proven_tight() => None,
            Ok(_) => Some(format!("R={} not proven tight", fmt_matrix(rm))),
            Err(e) => Some(format!("R={}: {e}", fmt_matrix(rm))),
        }
    });
    let diagonal = derivations
        .iter()
        .zip(&failures)
        .filter(|(d, f)| f.is_some() && is_diagonal(d.r.as_ref().unwrap()))
        .count();
    let bad: Vec<String> = failures.into_iter().flatten().collect();
    Outcome {
        passed: bad.is_empty() && derivations.len() == 50,
        detail: format!(
            "{} ({draws} draws for 50 with det Q > 0; {diagonal} failures have diagonal R)",
            summarize(derivations.len(), &bad)
        ),
    }
}

fn b_absorption() -> Outcome {
    let mut fixtures: Vec<(RatMatrix, Vec<Rational>)> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let lbfs = derive(&fbfs_line(Discipline::Lbfs)).unwrap().r.unwrap();
    for m in [r_fbfs(), lbfs] {
        fixtures.push((m.clone(), ones(3)));
        fixtures.extend((0..5).map(|_| (m.clone(), positive_b(&mut rng, 3))));
    }
    for r11 in 1..=2 {
        for r22 in 1..=2 {
            for r12 in -2..=2 {
                for r21 in -2..=2 {
                    for b in [[1, 1], [1, 2], [3, 1]] {
                        fixtures.push((
                            matrix(&[&[r11, r12], &[r21, r22]]),
                            vec![ri(b[0]), ri(b[1])],
                        ));
                    }
                }
            }
        }
    }
    for (m, bs) in m_matrix_cases(50) {
        fixtures.extend(bs.into_iter().map(|b| (m.clone(), b)));
    }
    let mut line_rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let spec = random_reentrant_lbfs(&mut line_rng);
        let rm = derive(&spec).unwrap().r.unwrap();
        let b = positive_b(&mut rng, rm.rows());
        fixtures.push((rm, b));
    }
    let failures: Vec<Option<String>> = EXEC.map(&fixtures, |(m, b)| {
        let scaled = scaled_columns(m, b);
        for aux in [true, false] {
            match (
                tight_flag(m, b, aux),
                tight_flag(&scaled, &ones(b.len()), aux),
            ) {
                (Ok(x), Ok(y)) if x == y => {}
                (x, y) => {
                    return Some(format!(
                        "{} b={} aux={aux}: {x:?} vs {y:?}",
                        fmt_matrix(m),
                        fmt_vec(b)
                    ));
                }
            }
        }
        None
    });
    let bad: Vec<String> = failures.into_iter().flatten().collect();
    Outcome {
        passed: bad.is_empty(),
        detail: summarize(fixtures.len(), &bad),
    }
}

type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "fbfs line reflection matrix and traffic",
            Some(Duration::from_secs(1)),
            fbfs_line_reproduction,
        ),
        (
            "fbfs line witness and LP refutation",
            Some(Duration::from_secs(5)),
            published_witness_regression,
        ),
        (
            "2x2 sign cases vs LP oracle",
            Some(Duration::from_secs(30)),
            two_by_two_grid,
        ),
        (
            "lbfs reentrant lines are tight",
            Some(Duration::from_secs(120)),
            lbfs_sweep,
        ),
        ("M-matrices are tight", None, m_matrix_tightness),
        ("network algebraic identities", None, algebraic_identities),
        (
            "two-station R is M and proven tight",
            None,
            two_station_m_property,
        ),
        ("b absorbed into columns of R", None, b_absorption),
    ];
    let mut all = true;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let passed = outcome.passed && in_time;
        all &= passed;
        let budget = limit.map_or(String::new(), |l| format!(" of {} s", l.as_secs()));
        println!(
            "{} {}. {name} ({:.2} s{budget}): {}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            outcome.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
