//! Acceptance run: one line per criterion, exit status 1 if any fails.
//!
//! Runs without the libtest harness so the lines are printed even when the
//! run passes.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use wittgr::adlv::{self, BSpec, RESIDUAL_THRESHOLD};
use wittgr::lattice::Window;
use wittgr::counts::CountQuery;
use wittgr::gl2;
use wittgr::satake::{self, commutativity_sign, mv_leading_check};
use wittgr::weyl::{affine::verify_minus_q, CoxeterGroup};
use wittgr::witt::{verify_famous_identity, WittVector};
use wittgr::{Coweight, GaloisRing, Laurent, RingKind};

/// Wall-clock budgets, in seconds.
const BUDGET_WITT: u64 = 1;
const BUDGET_SCHUBERT: u64 = 60;
const BUDGET_MV: u64 = 300;
const BUDGET_SEMISMALL: u64 = 300;
const BUDGET_MINUS_Q: u64 = 600;
const BUDGET_RAPOPORT: u64 = 1800;
/// Criteria without a stated budget still get a generous cap.
const BUDGET_DEFAULT: u64 = 600;

const B3_TRIALS: u64 = 1000;
const IDENTITY_SAMPLES: u64 = 10_000;
const SEED: u64 = 0x5eed_2024;
const FIBER_CROSS_CHECK_Q: [u64; 3] = [2, 3, 4];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn cw(v: &[i64]) -> Coweight {
    Coweight::new(v.to_vec())
}

/// Dominant coweights of rank `n` with entries in `lo..=hi`.
fn dominant_box(n: usize, lo: i64, hi: i64) -> Vec<Coweight> {
    fn rec(n: usize, lo: i64, hi: i64, cur: &mut Vec<i64>, out: &mut Vec<Coweight>) {
        if cur.len() == n {
            out.push(Coweight::new(cur.clone()));
            return;
        }
        let top = cur.last().copied().unwrap_or(hi);
        for v in (lo..=top).rev() {
            cur.push(v);
            rec(n, lo, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, lo, hi, &mut Vec::new(), &mut out);
    out
}

/// Witt coordinates of `n` in `W_h(F_p)` from the ghost congruences
/// `sum_{i<=k} p^i x_i^{p^{k-i}} = n mod p^{k+1}`.
fn ghost_coords(p: u64, h: u32, n: u64) -> Vec<u32> {
    let modpow = |b: u64, e: u64, m: u64| -> u64 {
        let (mut r, mut b, mut e) = (1u128, b as u128 % m as u128, e);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % m as u128;
            }
            b = b * b % m as u128;
            e >>= 1;
        }
        r as u64
    };
    let mut x: Vec<u64> = Vec::new();
    for k in 0..h {
        let m = p.pow(k + 1);
        let mut partial = 0u64;
        for (i, &xi) in x.iter().enumerate() {
            partial = (partial + p.pow(i as u32) * modpow(xi, p.pow(k - i as u32), m)) % m;
        }
        let rest = (n % m + m - partial) % m;
        assert_eq!(rest % p.pow(k), 0, "ghost congruence broken");
        x.push(rest / p.pow(k) % p);
    }
    x.into_iter().map(|v| v as u32).collect()
}

fn criterion_1() -> Outcome {
    let mut bad = 0;
    for (p, h) in [(2u32, 3u32), (3, 3), (3, 5)] {
        let ring = GaloisRing::new(p, 1, h).unwrap();
        let order = u64::from(p).pow(h);
        let coords: Vec<Vec<u32>> = (0..order).map(|n| ghost_coords(p.into(), h, n)).collect();
        let elems: Vec<WittVector> = coords.iter().map(|c| WittVector::from_coords(&ring, c).unwrap()).collect();
        for n in 0..order as usize {
            if WittVector::from_int(&ring, n as i64).coords() != coords[n] {
                bad += 1;
            }
            for m in 0..order as usize {
                let s = elems[n].add(&elems[m]).unwrap();
                let t = elems[n].mul(&elems[m]).unwrap();
                bad += usize::from(s.coords() != coords[(n + m) % order as usize]);
                bad += usize::from(t.coords() != coords[(n * m) % order as usize]);
            }
        }
    }
    let identity: Vec<bool> = [(2, 4), (3, 3), (5, 5)].iter().map(|&(p, h)| verify_famous_identity(p, h).unwrap()).collect();
    let pass = bad == 0 && identity.iter().all(|&x| x);
    outcome(pass, format!("Z/8, Z/27, Z/243 vs ghost oracle: {bad} mismatches; famous identity {identity:?}"))
}

fn criterion_2() -> Outcome {
    let mut cells = 0;
    let mut failures = Vec::new();
    for n in [2, 3] {
        for mu in dominant_box(n, 0, 3) {
            let query = CountQuery::Cell { mu: mu.clone() };
            let poly = query.polynomial(RingKind::Mixed).unwrap();
            let degree = mu.pairing_2rho();
            let mut ok = poly.degree() == Some(degree as i32) && poly.leading_coeff() == 1;
            for q in [2u64, 3, 5, 7] {
                ok &= poly.eval(q as i128) == query.count(RingKind::Mixed, q).unwrap() as i128;
            }
            cells += 1;
            if !ok {
                failures.push(format!("{mu}: {poly}"));
            }
        }
    }
    outcome(failures.is_empty(), format!("{cells} cells monic of degree (2rho,mu); failures {failures:?}"))
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in 1..=3usize {
        for len in 1..=3usize {
            let steps = vec![Coweight::fundamental(n, 1); len];
            for q in [2u64, 3, 4, 5] {
                let got = CountQuery::Chain { steps: steps.clone() }.count(RingKind::Mixed, q).unwrap();
                let want = (0..n as u32).map(|i| q.pow(i)).sum::<u64>().pow(len as u32);
                checked += 1;
                if got != want {
                    failures.push(format!("n={n} N={len} q={q}: {got} != {want}"));
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{checked} chain counts equal (1+...+q^(n-1))^N; failures {failures:?}"))
}

fn criterion_4() -> Outcome {
    let mut pairs = 0;
    let mut failures = Vec::new();
    for top in [cw(&[4, 0]), cw(&[2, 1, 0])] {
        for mu in top.dominant_below() {
            for lambda in mu.weights_below() {
                let r = mv_leading_check(&lambda, &mu, RingKind::Mixed).unwrap();
                pairs += 1;
                if !r.pass {
                    failures.push(format!("({lambda},{mu})"));
                }
            }
        }
    }
    // zero weight of the quasi-minuscule coweight
    let mut zero_weight = Vec::new();
    for n in [2, 3] {
        let r = mv_leading_check(&Coweight::zero(n), &Coweight::quasi_minuscule(n), RingKind::Mixed).unwrap();
        zero_weight.push(r.leading);
        if !r.pass || r.leading != n as i64 - 1 {
            failures.push(format!("theta zero weight n={n}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!("{pairs} pairs; theta zero-weight leading coefficients {zero_weight:?}; failures {failures:?}"),
    )
}

fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for top in [cw(&[4, 0]), cw(&[2, 1, 0])] {
        let r = satake::lk_charge_check(&top, RingKind::Mixed).unwrap();
        pass &= r.pass;
        parts.push(format!(
            "{top}: {} coweights, triangularity failures {}, P K != 1 in {} entries",
            r.index.len(),
            r.triangularity_failures,
            r.inverse_failures
        ));
    }
    let seed = satake::lusztig_kato_expand(&cw(&[2, 0]), RingKind::Mixed).unwrap()[&cw(&[1, 1])].clone();
    pass &= seed == Laurent::monomial(-1, 1);
    parts.push(format!("P_(2,0),(1,1) = {seed}"));
    outcome(pass, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let factors = [cw(&[1, 0]), cw(&[0, -1]), cw(&[1, -1])];
    let mut seqs: Vec<Vec<Coweight>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..3 {
        seqs = seqs
            .iter()
            .flat_map(|s| factors.iter().map(move |f| [s.clone(), vec![f.clone()]].concat()))
            .collect();
        all.extend(seqs.clone());
    }
    let mut fibers = 0;
    let mut equal_fallback = 0;
    let mut failures = Vec::new();
    for steps in &all {
        // W_h(F_q) outgrows the Galois ring model on the larger grid points;
        // those sequences are fitted over F_q[[t]] and cross-checked in
        // mixed characteristic where it fits
        let reports = match satake::semismall_report(steps, RingKind::Mixed) {
            Ok(r) => r,
            Err(_) => {
                equal_fallback += 1;
                let r = satake::semismall_report(steps, RingKind::Equal).unwrap();
                for f in &r {
                    let query = CountQuery::Fiber { steps: steps.clone(), lambda: f.lambda.clone() };
                    for q in FIBER_CROSS_CHECK_Q {
                        let mixed = query.count(RingKind::Mixed, q).unwrap();
                        if Laurent::from_coeffs(f.polynomial.clone()).eval(q as i128) != mixed as i128 {
                            failures.push(format!("{steps:?} over {} at q={q}: mixed {mixed}", f.lambda));
                        }
                    }
                }
                r
            }
        };
        for r in reports {
            fibers += 1;
            if !r.pass {
                failures.push(format!("{steps:?} over {}", r.lambda));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} sequences, {fibers} fibers ({equal_fallback} sequences fitted over F_q[[t]], cross-checked at q={FIBER_CROSS_CHECK_Q:?}); failures {failures:?}",
            all.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (n, cap) in [(2, 12), (3, 10)] {
        let r = verify_minus_q(&CoxeterGroup::affine_gl(n), cap).unwrap();
        pass &= r.failures == 0 && r.congruence_failures == 0 && r.pairs > 0;
        parts.push(format!("{} cap {cap}: {} pairs, {} failures", r.type_name, r.pairs, r.failures));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let r_grid: Vec<u32> = (1..=5).collect();
    let mut triples = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for p in [2u32, 3] {
        for mu in dominant_box(2, -3, 3) {
            let specs = match mu.size() {
                0 => vec![BSpec::Identity],
                1 => vec![BSpec::Diagonal(vec![1, 0]), BSpec::Superbasic(None)],
                s if s % 2 != 0 => vec![BSpec::Superbasic(None)],
                _ => vec![],
            };
            for spec in specs {
                let b = spec.resolve(p, 2, &mu).unwrap();
                let nu = b.newton_point(p).unwrap();
                if !adlv::mazur_admissible(&mu, &nu) {
                    continue;
                }
                let rep = adlv::dimension_report(p, &b, &mu, &r_grid, None).unwrap();
                triples += 1;
                worst = worst.max(rep.fit.residual);
                if !rep.pass || rep.fit.residual > RESIDUAL_THRESHOLD {
                    failures.push(format!("p={p} b={spec} mu={mu}: fit {} formula {:?}", rep.fitted_dim, rep.formula_dim));
                }
            }
        }
    }
    outcome(
        failures.is_empty() && triples > 0,
        format!("{triples} admissible triples, max residual {worst:.3} (threshold {RESIDUAL_THRESHOLD}); failures {failures:?}"),
    )
}

fn criterion_9() -> Outcome {
    let mut cases = 0;
    let mut failures = Vec::new();
    let gl1 = Window { n: 1, depth: 0, det: 0 };
    let b1 = [adlv::SigmaClass::diagonal(2, &[1]).unwrap(), adlv::SigmaClass::diagonal(2, &[0]).unwrap()];
    let mut run = |p, r, b: &[adlv::SigmaClass], mu: &[Coweight], w: &Window| {
        let rep = adlv::norm_reduce(p, r, b, mu, w).unwrap();
        cases += 1;
        if !rep.pass {
            failures.push(format!("p={p} r={r} mu={mu:?}: {} vs {}", rep.left, rep.right));
        }
    };
    for mu in [[cw(&[1]), cw(&[0])], [cw(&[0]), cw(&[0])], [cw(&[0]), cw(&[1])]] {
        for r in [1, 2] {
            run(2, r, &b1, &mu, &gl1);
        }
    }
    let id = adlv::SigmaClass::identity(2);
    let sb = adlv::SigmaClass::superbasic(2, 2, 1).unwrap();
    let w = Window { n: 2, depth: 1, det: 1 };
    for (b, mu) in [
        ([id.clone(), id.clone()], [cw(&[1, -1]), cw(&[0, 0])]),
        ([sb.clone(), id.clone()], [cw(&[1, 0]), cw(&[1, -1])]),
        ([id, sb], [cw(&[1, -1]), cw(&[1, 0])]),
    ] {
        for r in [1, 2] {
            run(2, r, &b, &mu, &w);
        }
    }
    outcome(failures.is_empty(), format!("{cases} cases with d=2 for GL_1 and GL_2; failures {failures:?}"))
}

fn criterion_10() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for q in [3u64, 5] {
        let r = gl2::Chart::new(q).unwrap().suite(B3_TRIALS, SEED).unwrap();
        pass &= r.pass;
        parts.push(format!(
            "q={q} suite {} trials: failures {}/{}/{}/{}/{}",
            r.trials,
            r.membership_failures,
            r.uniqueness_failures,
            r.equation_failures,
            r.factor_failures,
            r.false_members
        ));
    }
    for q in [2u64, 3, 5, 7, 9] {
        let f = gl2::identity_check(q, IDENTITY_SAMPLES, SEED).unwrap();
        pass &= f == 0;
    }
    for q in [2u64, 3, 5] {
        let r = gl2::quotient_count_check(q).unwrap();
        pass &= r.pass;
        parts.push(format!("q={q} |J| = {} = {} * {} (|V| = {})", r.torsor, r.grassmannian, r.group, r.v23));
        let e = gl2::equal_char_compare(q).unwrap();
        pass &= e.pass;
        parts.push(format!("mixed {} = equal {}", e.mixed_total, e.equal_total));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_11() -> Outcome {
    let mut got = Vec::new();
    let mut pass = true;
    for n in 2..=6usize {
        let mu = Coweight::fundamental(n, 1);
        let nu = Coweight::fundamental_dual(n);
        let c0 = commutativity_sign(&mu, &nu, &Coweight::zero(n)).unwrap();
        let top = commutativity_sign(&mu, &nu, &mu.add(&nu)).unwrap();
        pass &= c0 == 1 && top == if n % 2 == 1 { 1 } else { -1 };
        got.push((c0, top));
    }
    outcome(pass, format!("(c^0, c^(mu+nu)) for n=2..6: {got:?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 11] = [
        ("witt soundness", criterion_1, BUDGET_WITT),
        ("schubert dimension", criterion_2, BUDGET_SCHUBERT),
        ("demazure counts", criterion_3, BUDGET_DEFAULT),
        ("mv leading terms", criterion_4, BUDGET_MV),
        ("satake and lusztig-kato", criterion_5, BUDGET_DEFAULT),
        ("semismall fibers", criterion_6, BUDGET_SEMISMALL),
        ("minus q", criterion_7, BUDGET_MINUS_Q),
        ("rapoport dimension", criterion_8, BUDGET_RAPOPORT),
        ("norm reduction", criterion_9, BUDGET_DEFAULT),
        ("gl2 chart and quotient", criterion_10, BUDGET_DEFAULT),
        ("commutativity sign", criterion_11, BUDGET_DEFAULT),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let pass = out.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {} {name}: {} [{:.2}s, budget {budget}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
