//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use tau_interlace::interlace::{hb_check, hb_compose, interlace_check};
use tau_interlace::jacobi::{phi, verify_identity, Identity};
use tau_interlace::poly::{int, rat};
use tau_interlace::scanner::{
    evaluate, find_threshold_thm4, fg_split_identity, reverify, scan, summarize, vieta_asymptotics, Check,
    GridPoint, GridSpec, RationalRange, ScanReport, ScanVerdict,
};
use tau_interlace::stability::{
    necessary_ratio, phi_ratio_closed_form, ratio_limit, routh_hurwitz, Intermediary,
};
use tau_interlace::{to_f64, Error, JacobiParams, RatPoly, Rational};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn range(s: &str) -> RationalRange {
    s.parse().expect("valid range")
}

/// Random `p/q` strictly inside `(lo, hi)` with `2 <= q <= 16`.
fn rand_rational(rng: &mut StdRng, lo: i64, hi: i64) -> Rational {
    let q = rng.gen_range(2..=16i64);
    let p = rng.gen_range(lo * q + 1..hi * q);
    rat(p, q)
}

fn first_point(reports: &[&ScanReport]) -> String {
    reports
        .first()
        .map(|r| format!(" first at n={} alpha={} beta={} {:?}", r.point.n, r.point.alpha, r.point.beta, r.point.extra))
        .unwrap_or_default()
}

fn c1_identities() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut draws = 0;
    let mut failures = Vec::new();
    while draws < 500 {
        let n = rng.gen_range(3..=12usize);
        let params = JacobiParams::new(n, rand_rational(&mut rng, -3, 3), rand_rational(&mut rng, -3, 3));
        let a = rand_rational(&mut rng, -5, 5);
        let results: Vec<_> = Identity::ALL
            .iter()
            .map(|&id| (id, verify_identity(id, &params, Some(&a))))
            .collect();
        if results.iter().any(|(_, r)| matches!(r, Err(Error::IdentityUndefined { .. }))) {
            continue;
        }
        draws += 1;
        for (id, r) in results {
            if r != Ok(true) {
                failures.push(format!("{} at {:?}: {:?}", id.name(), params, r));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{draws} draws x {} identities, {} failures {:?}", Identity::ALL.len(), failures.len(), failures.first()),
    )
}

fn c2_ccw() -> Outcome {
    let grid = GridSpec::new(range("-7/8:7/8:1/8"), range("-7/8:4:1/8"), 2, 25);
    let reports = scan(Check::Ccw, &grid);
    let bad: Vec<&ScanReport> = reports.iter().filter(|r| r.verdict != ScanVerdict::Holds).collect();
    outcome(
        bad.is_empty(),
        format!("{} points, {} not negative_simple{}", reports.len(), bad.len(), first_point(&bad)),
    )
}

fn conj_a_grids() -> Vec<GridSpec> {
    vec![
        GridSpec::new(range("-7/8:-1/8:1/8"), range("-7/8:8:1/8"), 4, 20),
        GridSpec::new(range("0:7/8:1/8"), range("1/8:8:1/8"), 4, 20),
        GridSpec::new(range("1:15/8:1/8"), range("9/8:8:1/8"), 4, 20),
    ]
}

fn c3_conj_a() -> Outcome {
    let reports: Vec<ScanReport> = conj_a_grids().iter().flat_map(|g| scan(Check::ConjA, g)).collect();
    let outside = reports.iter().filter(|r| r.region != "cw_star").count();
    let bad: Vec<&ScanReport> = reports.iter().filter(|r| r.verdict != ScanVerdict::Holds).collect();
    outcome(
        bad.is_empty() && outside == 0,
        format!(
            "{} points in the proven region, {} not strict{}",
            reports.len(),
            bad.len(),
            first_point(&bad)
        ),
    )
}

fn c4_conj_b() -> Outcome {
    let neg = GridSpec::new(range("-7/8:-1/8:1/8"), range("1/8:8:1/8"), 5, 20);
    let pos = GridSpec::new(range("1/8:7/8:1/8"), range("9/8:8:1/8"), 5, 20);
    let mut detail = Vec::new();
    let mut pass = true;
    for (name, grid) in [("-1<a<0<b", &neg), ("0<a<1<b", &pos)] {
        let reports = scan(Check::ConjB, grid);
        for pair in ["main", "shifted"] {
            let of_pair: Vec<&ScanReport> =
                reports.iter().filter(|r| r.point.extra.get("pair").map(String::as_str) == Some(pair)).collect();
            let bad: Vec<&ScanReport> =
                of_pair.iter().copied().filter(|r| r.verdict != ScanVerdict::Holds).collect();
            pass &= bad.is_empty();
            detail.push(format!("{name} {pair}: {}/{} fail{}", bad.len(), of_pair.len(), first_point(&bad)));
        }
    }
    let chains = scan(Check::Chains, &neg);
    let bad: Vec<&ScanReport> = chains.iter().filter(|r| r.verdict != ScanVerdict::Holds).collect();
    pass &= bad.is_empty();
    detail.push(format!("chains: {}/{} fail{}", bad.len(), chains.len(), first_point(&bad)));
    outcome(pass, detail.join("; "))
}

fn c5_pocket() -> Outcome {
    let grid = GridSpec::new(range("29/32:31/32:1/32"), range("-31/32:-1/32:1/32"), 5, 20);
    let reports = scan(Check::ConjB, &grid);
    let fails: Vec<&ScanReport> = reports
        .iter()
        .filter(|r| r.verdict == ScanVerdict::Fails && r.point.extra["pair"] == "main")
        .collect();
    let Some(first) = fails.first() else {
        return outcome(false, format!("no counterexample among {} points", reports.len()));
    };
    let text = serde_json::to_string(first).expect("serializable");
    let reloaded: ScanReport = serde_json::from_str(&text).expect("round trip");
    let reverified = reverify(&reloaded).unwrap_or(false);
    outcome(
        reverified,
        format!(
            "{} failing main-pair points; witness n={} alpha={} beta={} re-verified={reverified}",
            fails.len(),
            first.point.n,
            first.point.alpha,
            first.point.beta
        ),
    )
}

fn c6_thresholds() -> Outcome {
    let tol = rat(1, 100_000);
    let mut pass = true;
    let mut detail = Vec::new();
    for (beta, expected) in [(rat(-4, 5), 0.97842), (rat(-9, 10), 0.97140)] {
        let start = Instant::now();
        match find_threshold_thm4(12, &beta, (rat(9, 10), int(1)), &tol) {
            Ok(a) => {
                let got = to_f64(&a);
                let ok = (got - expected).abs() <= 5e-4 && start.elapsed().as_secs() < 120;
                pass &= ok;
                detail.push(format!("beta={beta}: alpha*={got:.6} ({:.1}s)", start.elapsed().as_secs_f64()));
            }
            Err(e) => {
                pass = false;
                detail.push(format!("beta={beta}: {e}"));
            }
        }
    }
    outcome(pass, detail.join("; "))
}

fn c7_ratio() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut checked = 0;
    let mut mismatches = 0;
    while checked < 100 {
        let params = JacobiParams::new(
            rng.gen_range(4..=30),
            rand_rational(&mut rng, -1, 4),
            rand_rational(&mut rng, -1, 6),
        );
        let (Ok(closed), Ok(direct)) = (phi_ratio_closed_form(&params), necessary_ratio(&phi(&params))) else {
            continue;
        };
        checked += 1;
        mismatches += usize::from(closed != direct);
    }
    let at100 = necessary_ratio(&phi(&JacobiParams::new(100, int(0), int(0)))).expect("defined");
    let limit = ratio_limit(&int(0)).expect("defined");
    let rel = (to_f64(&at100) - to_f64(&limit)).abs() / to_f64(&limit);
    outcome(
        mismatches == 0 && rel < 0.01,
        format!(
            "{checked} points, {mismatches} mismatches; n=100 ratio {:.4} vs limit {} (rel {:.4})",
            to_f64(&at100),
            limit,
            rel
        ),
    )
}

fn c8_vieta() -> Outcome {
    let rows = vieta_asymptotics(101, &int(0), &int(0)).expect("defined");
    let get = |n: usize| to_f64(&rows.iter().find(|(m, _)| *m == n).expect("row").1);
    let (even, odd) = (get(100), get(101));
    let (de, dodd) = ((even + 0.5).abs(), (odd + 1.0 / 6.0).abs());
    // observed distance at n = 100, 101 is about 2.5e-3
    outcome(
        de < 0.005 && dodd < 0.005,
        format!("n=100 sum {even:.6} (|+1/2| = {de:.2e}); n=101 sum {odd:.6} (|+1/6| = {dodd:.2e})"),
    )
}

/// `prod (x + r)` scaled by `lead`.
fn from_negative_roots(roots: &[Rational], lead: &Rational) -> RatPoly {
    let neg: Vec<Rational> = roots.iter().map(|r| -r).collect();
    RatPoly::from_roots(&neg).scale(lead)
}

fn random_hb_pair(rng: &mut StdRng) -> (RatPoly, RatPoly) {
    let dp = rng.gen_range(1..=5usize);
    let dq = if rng.gen_bool(0.5) { dp } else { dp - 1 };
    let mut pool: Vec<Rational> = Vec::new();
    while pool.len() < dp + dq {
        let r = rand_rational(rng, 0, 10);
        if !pool.contains(&r) {
            pool.push(r);
        }
    }
    let (mut pr, mut qr) = (Vec::new(), Vec::new());
    if rng.gen_bool(0.5) {
        // alternate from the origin outward so that p and x q interlace
        pool.sort();
        let mut iter = pool.into_iter();
        loop {
            let mut took = false;
            if pr.len() < dp {
                pr.push(iter.next().unwrap());
                took = true;
            }
            if qr.len() < dq {
                qr.push(iter.next().unwrap());
                took = true;
            }
            if !took {
                break;
            }
        }
    } else {
        pr = pool[..dp].to_vec();
        qr = pool[dp..].to_vec();
    }
    let lead_p = rand_rational(rng, 0, 5);
    let lead_q = rand_rational(rng, 0, 5);
    (from_negative_roots(&pr, &lead_p), from_negative_roots(&qr, &lead_q))
}

fn c9_hb() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let pairs: Vec<_> = (0..200).map(|_| random_hb_pair(&mut rng)).collect();
    let results: Vec<(bool, bool, bool)> = pairs
        .par_iter()
        .map(|(p, q)| {
            let il = interlace_check(p, &q.shift_mul_x(1)).is_strict();
            let hb = hb_check(p, q);
            let rh = routh_hurwitz(&hb_compose(p, q)).expect("nonzero").stable;
            (il, hb, rh)
        })
        .collect();
    let disagree = results.iter().filter(|(a, b, c)| !(a == b && b == c)).count();
    let stable = results.iter().filter(|r| r.0).count();
    outcome(disagree == 0, format!("200 pairs ({stable} interlacing), {disagree} disagreements"))
}

fn random_points(seed: u64, count: usize, check: Check, keep: impl Fn(&ScanReport) -> bool + Sync) -> Vec<ScanReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut kept = Vec::new();
    let mut attempts = 0;
    while kept.len() < count && attempts < 50 {
        attempts += 1;
        let batch: Vec<GridPoint> = (0..count)
            .map(|_| {
                let n = rng.gen_range(4..=16usize);
                let a = rat(rng.gen_range(-7..=15), 8);
                let b = rat(rng.gen_range(-15..=32), 8);
                GridPoint::new(n, a, b)
            })
            .collect();
        let units: Vec<GridPoint> = batch
            .into_iter()
            .flat_map(|p| match check {
                Check::Sec5 => vec![p.clone().with("lemma", "instr1"), p.with("lemma", "final")],
                _ => vec![p],
            })
            .collect();
        let evaluated: Vec<ScanReport> = units.into_par_iter().map(|p| evaluate(check, p)).collect();
        kept.extend(evaluated.into_iter().filter(|r| keep(r)));
    }
    kept
}

fn c10_lemma_main() -> Outcome {
    let reports = random_points(10, 300, Check::LemmaMain, |r| r.verdict != ScanVerdict::Undefined);
    let reports = &reports[..reports.len().min(300)];
    let bad: Vec<&ScanReport> = reports.iter().filter(|r| r.verdict != ScanVerdict::Holds).collect();
    let simple = reports.iter().filter(|r| r.info["shifted_simple_real"] == "true").count();
    outcome(
        reports.len() == 300 && bad.is_empty(),
        format!(
            "{} points ({simple} with simple real shifted polynomial), {} violations{}",
            reports.len(),
            bad.len(),
            first_point(&bad)
        ),
    )
}

fn c11_section5() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for lemma in ["instr1", "final"] {
        let reports = random_points(11, 200, Check::Sec5, |r| {
            r.verdict != ScanVerdict::Undefined && r.point.extra["lemma"] == lemma
        });
        let reports = &reports[..reports.len().min(200)];
        let bad: Vec<&ScanReport> = reports.iter().filter(|r| r.verdict != ScanVerdict::Holds).collect();
        pass &= reports.len() == 200 && bad.is_empty();
        detail.push(format!("{lemma}: {} hypothesis-true points, {} violations", reports.len(), bad.len()));
    }
    outcome(pass, detail.join("; "))
}

fn c12_fg() -> Outcome {
    let mut rng = StdRng::seed_from_u64(12);
    let mut units = Vec::new();
    for which in ["f", "g"] {
        for _ in 0..200 {
            let n = rng.gen_range(4..=16usize);
            let a = if which == "f" { rand_rational(&mut rng, -1, 1) } else { rand_rational(&mut rng, -1, 0) };
            let b = rand_rational(&mut rng, 0, 8);
            let big_a = rand_rational(&mut rng, 0, 10);
            units.push(GridPoint::new(n, a, b).with("which", which).with("A", big_a));
        }
    }
    let reports: Vec<ScanReport> = units.into_par_iter().map(|p| evaluate(Check::FgStability, p)).collect();
    let s = summarize(&reports);
    let bad = reports.iter().filter(|r| r.verdict != ScanVerdict::Holds || !r.claimed).count();

    let mut split_fail = 0;
    for _ in 0..100 {
        let params = JacobiParams::new(
            rng.gen_range(2..=14),
            rand_rational(&mut rng, -3, 3),
            rand_rational(&mut rng, -3, 3),
        );
        let big_a = rand_rational(&mut rng, -5, 5);
        for which in [Intermediary::F, Intermediary::G] {
            if fg_split_identity(which, &params, &big_a) != Ok(true) {
                split_fail += 1;
            }
        }
    }
    outcome(
        bad == 0 && split_fail == 0,
        format!(
            "{} stability points, {bad} not stable; 100 split-identity points, {split_fail} mismatches",
            s.total
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("identity suite", c1_identities),
        ("CCW grid", c2_ccw),
        ("Conjecture A region", c3_conj_a),
        ("Conjecture B regions and chains", c4_conj_b),
        ("Conjecture B failure pocket", c5_pocket),
        ("Phi_n stability thresholds", c6_thresholds),
        ("necessary-condition ratio", c7_ratio),
        ("Vieta root sums", c8_vieta),
        ("Hermite-Biehler three-way agreement", c9_hb),
        ("real-rootedness / interlacing equivalence", c10_lemma_main),
        ("interlacing implications", c11_section5),
        ("f/g stability and even/odd splits", c12_fg),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let k = i + 1;
        if !filter.is_empty() && !filter.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {k:>2} {status} {name} [{:.1}s]: {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
