//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any
//! failure. Runs with `cargo test --test acceptance`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use g2rc::crystal::{e_op, edges, f_op, weight, Letter, Weight};
use g2rc::harness::{
    check_fixture, load_fixtures, sweep, Fixture, Invariant, VerificationReport, VerifyOptions, DEFAULT_MAX_L,
    DEFAULT_ROUND_TRIP_L,
};
use g2rc::paths::{local_energy, Path};

struct Outcome {
    ok: bool,
    summary: String,
    details: Vec<String>,
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// What each locked fixture must assert, independent of the fixture file.
struct Expect {
    name: &'static str,
    path: Option<&'static [u8]>,
    charge: Option<i64>,
    config_charge: Option<i64>,
    counter: Option<i64>,
    first_letter: Option<u8>,
    inadmissible: bool,
}

const fn expect(name: &'static str) -> Expect {
    Expect {
        name,
        path: None,
        charge: None,
        config_charge: None,
        counter: None,
        first_letter: None,
        inadmissible: false,
    }
}

const EXPECTED: &[Expect] = &[
    Expect { path: Some(&[7, 12, 2, 1]), charge: Some(-8), ..expect("walkthrough") },
    Expect { charge: Some(-19), counter: Some(-20), ..expect("bm2a") },
    Expect { inadmissible: true, ..expect("bm2b") },
    Expect { charge: Some(-14), counter: Some(-15), ..expect("bm3") },
    Expect { path: Some(&[9, 2, 1]), charge: Some(-4), config_charge: Some(-5), ..expect("bm4a-rigging-1") },
    Expect { path: Some(&[4, 5, 1]), charge: Some(-5), config_charge: Some(-5), ..expect("bm4a-rigging-0") },
    Expect { charge: Some(-7), ..expect("bm4b") },
    Expect { charge: Some(-22), counter: Some(-23), ..expect("bm4c") },
    Expect { charge: Some(-24), counter: Some(-25), ..expect("bm4d") },
    Expect { charge: Some(-8), counter: Some(-6), ..expect("bm5") },
    Expect { charge: Some(-13), ..expect("bm8a") },
    Expect { charge: Some(-12), ..expect("bm8b") },
    Expect { charge: Some(-11), ..expect("bm8c") },
    Expect { first_letter: Some(13), ..expect("boomerang") },
];

fn pins(e: &Expect, f: &Fixture) -> Vec<String> {
    let mut bad = Vec::new();
    if let Some(p) = e.path {
        if f.path.as_ref() != Some(&Path::from_numbers(p)) {
            bad.push(format!("path {:?}", f.path));
        }
    }
    if let Some(c) = e.charge {
        if f.charge != Some(c) || f.energy != Some(c) {
            bad.push(format!("charge {:?} energy {:?}, expected {c}", f.charge, f.energy));
        }
    }
    if e.config_charge.is_some() && f.config_charge != e.config_charge {
        bad.push(format!("configuration charge {:?}", f.config_charge));
    }
    if let Some(c) = e.counter {
        if !f.counter_paths.iter().any(|cp| cp.energy == c) {
            bad.push(format!("no counter path with energy {c}"));
        }
    }
    if let Some(n) = e.first_letter {
        if f.first_letter != Letter::boxed(n) {
            bad.push(format!("first letter {:?}", f.first_letter));
        }
    }
    if e.inadmissible && f.inadmissible.is_none() {
        bad.push("no inadmissible configuration".into());
    }
    bad
}

fn criterion_fixtures() -> Outcome {
    let fixtures = match load_fixtures(&fixtures_dir()) {
        Ok(f) => f,
        Err(e) => return Outcome { ok: false, summary: e.to_string(), details: Vec::new() },
    };
    let mut details = Vec::new();
    for e in EXPECTED {
        let Some(f) = fixtures.iter().find(|f| f.name == e.name) else {
            details.push(format!("{}: missing", e.name));
            continue;
        };
        details.extend(pins(e, f).into_iter().map(|m| format!("{}: {m}", e.name)));
        let r = check_fixture(f);
        details.extend(r.mismatches.into_iter().map(|m| format!("{}: {m}", e.name)));
    }
    let l = |n| Letter::boxed(n).unwrap();
    for (b1, b2, h) in [(l(1), l(1), 0), (l(2), l(1), -1), (Letter::EMPTY, l(5), -1), (l(5), Letter::EMPTY, -1)] {
        if local_energy(b1, b2) != h {
            details.push(format!("H({b1} ⊗ {b2}) = {}, expected {h}", local_energy(b1, b2)));
        }
    }
    Outcome {
        ok: details.is_empty(),
        summary: format!("{} fixtures, {} mismatches", fixtures.len(), details.len()),
        details,
    }
}

fn total(reports: &[VerificationReport], inv: Invariant) -> (u64, u64) {
    reports.iter().fold((0, 0), |(c, f), r| (c + r.checked(inv), f + r.failed(inv)))
}

fn failures_of(reports: &[VerificationReport], invs: &[Invariant]) -> Vec<String> {
    reports
        .iter()
        .flat_map(|r| {
            r.failures
                .iter()
                .filter(|f| invs.contains(&f.invariant))
                .map(move |f| format!("λ={} L={}: {:?} on {}: {}", r.lam, r.big_l, f.invariant, f.subject, f.detail))
        })
        .take(10)
        .collect()
}

fn counted(reports: &[VerificationReport], invs: &[Invariant], extra: String) -> Outcome {
    let parts: Vec<String> = invs
        .iter()
        .map(|&i| {
            let (c, f) = total(reports, i);
            format!("{i:?} {}/{c}", c - f)
        })
        .collect();
    let ok = invs.iter().all(|&i| total(reports, i).1 == 0);
    Outcome { ok, summary: format!("{}{extra}", parts.join(", ")), details: failures_of(reports, invs) }
}

fn criterion_bijection(reports: &[VerificationReport]) -> Outcome {
    let mut o = counted(reports, &[Invariant::Forward, Invariant::Bijection, Invariant::Statistic], String::new());
    let unequal = reports.iter().filter(|r| !r.bijective || !r.statistic_ok || r.rc_count != r.path_count).count();
    let rcs: usize = reports.iter().map(|r| r.rc_count).sum();
    o.ok &= unequal == 0;
    o.summary = format!("{} cells, {rcs} configurations; {}", reports.len(), o.summary);
    o
}

fn criterion_round_trip(reports: &[VerificationReport]) -> Outcome {
    let small: Vec<VerificationReport> = reports.iter().filter(|r| r.big_l <= DEFAULT_ROUND_TRIP_L).cloned().collect();
    let gaps: u64 = small.iter().map(|r| r.inverse_gaps).sum();
    let searched: u64 = small.iter().map(|r| r.search_steps).sum();
    let mut o = counted(
        &small,
        &[Invariant::StepRoundTrip, Invariant::PathRoundTrip],
        format!("; clause gaps {gaps}, search fallbacks {searched}"),
    );
    o.ok &= gaps == 0 && searched == 0;
    o
}

fn criterion_crystal() -> Outcome {
    let mut details = Vec::new();
    let all: Vec<Letter> = Letter::all().collect();
    if all.len() != 15 {
        details.push(format!("{} elements", all.len()));
    }
    for i in 0..3 {
        for &b in &all {
            for &c in &all {
                if (f_op(i, b) == Some(c)) != (e_op(i, c) == Some(b)) {
                    details.push(format!("f_{i}({b}) and e_{i}({c}) disagree"));
                }
            }
        }
    }
    let table: [(Letter, Weight); 15] = [
        (Letter::boxed(1).unwrap(), Weight::new(0, 1)),
        (Letter::boxed(2).unwrap(), Weight::new(3, -1)),
        (Letter::boxed(3).unwrap(), Weight::new(1, 0)),
        (Letter::boxed(4).unwrap(), Weight::new(-1, 1)),
        (Letter::boxed(5).unwrap(), Weight::new(2, -1)),
        (Letter::boxed(6).unwrap(), Weight::new(-3, 2)),
        (Letter::boxed(7).unwrap(), Weight::new(0, 0)),
        (Letter::boxed(8).unwrap(), Weight::new(0, 0)),
        (Letter::boxed(9).unwrap(), Weight::new(-2, 1)),
        (Letter::boxed(10).unwrap(), Weight::new(3, -2)),
        (Letter::boxed(11).unwrap(), Weight::new(1, -1)),
        (Letter::boxed(12).unwrap(), Weight::new(-1, 0)),
        (Letter::boxed(13).unwrap(), Weight::new(-3, 1)),
        (Letter::boxed(14).unwrap(), Weight::new(0, -1)),
        (Letter::EMPTY, Weight::new(0, 0)),
    ];
    for (b, w) in table {
        if weight(b) != w {
            details.push(format!("wt({b}) = {}, expected {w}", weight(b)));
        }
    }
    let alpha = [Weight::new(2, -1), Weight::new(-3, 2)];
    let mut classical = 0;
    for i in 1..=2 {
        for (b, c) in edges(i) {
            classical += 1;
            if weight(c) != weight(b) - alpha[i - 1] {
                details.push(format!("edge {b} -{i}-> {c} breaks the weight step"));
            }
        }
    }
    Outcome {
        ok: details.is_empty(),
        summary: format!("{} elements, {classical} classical edges, {} mismatches", all.len(), details.len()),
        details,
    }
}

fn main() -> ExitCode {
    println!(
        "acceptance: exhaustive checks cover L <= {DEFAULT_MAX_L} (round trips L <= {DEFAULT_ROUND_TRIP_L}); larger L is not verified here"
    );
    let mut results: Vec<(u32, &str, Outcome, u128)> = Vec::new();

    let t = Instant::now();
    let fx = criterion_fixtures();
    results.push((1, "worked-example fixtures", fx, t.elapsed().as_millis()));

    let t = Instant::now();
    let reports = sweep(DEFAULT_MAX_L, VerifyOptions::for_length).expect("bounds are within the enumeration limit");
    let sweep_ms = t.elapsed().as_millis();
    results.push((2, "bijection and charge = energy", criterion_bijection(&reports), sweep_ms));
    results.push((
        3,
        "per-step charge, local energy and string loss",
        counted(&reports, &[Invariant::ChargeStep, Invariant::LocalEnergy, Invariant::StringLoss], String::new()),
        sweep_ms,
    ));
    results.push((4, "vacancy-change table", counted(&reports, &[Invariant::VacancyChange], String::new()), sweep_ms));
    results.push((
        5,
        "second differences and stabilization",
        counted(&reports, &[Invariant::SecondDifference, Invariant::Stabilization], String::new()),
        sweep_ms,
    ));
    results.push((6, "round trips", criterion_round_trip(&reports), sweep_ms));

    let t = Instant::now();
    results.push((7, "crystal", criterion_crystal(), t.elapsed().as_millis()));

    let mut all_ok = true;
    for (n, name, o, ms) in &results {
        all_ok &= o.ok;
        println!("criterion {n} {}: {name}: {} ({ms} ms)", if o.ok { "PASS" } else { "FAIL" }, o.summary);
        for d in &o.details {
            println!("    {d}");
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
