//! Verification reports, sweeps over `(λ, L)` cells and fixture replay.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bijection::{phi, phi_trace, vacancy_changes, DeltaOutcome};
use crate::crystal::{Letter, Weight};
use crate::error::{BoundError, InverseError};
use crate::inverse::{delta_theta_inv, phi_inv_with_fallback, StepSource};
use crate::paths::{energy, energy_tables, enumerate_paths_bounded, Path};
use crate::rigged_config::{
    box_totals, enumerate_configurations, enumerate_rc_bounded, Configuration, RiggedConfiguration,
};

/// Default largest `L` for the forward suites.
pub const DEFAULT_MAX_L: usize = 5;
/// Default largest `L` for the round-trip suites.
pub const DEFAULT_ROUND_TRIP_L: usize = 4;

/// One checked property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    /// `δ` ran on every step without an uncovered state.
    Forward,
    /// `Φ` is injective with image exactly the highest-weight paths.
    Bijection,
    /// `charge(rc) = energy(Φ(rc))`.
    Statistic,
    /// Charge drop of one step: `−α1(2) + χ(b1 = ∅)`.
    ChargeStep,
    /// `H(b1 ⊗ b2) = α̃1(2) − α1(2) + χ(b1 = ∅) − χ(b2 = ∅)`.
    LocalEnergy,
    /// `α1(2) − α̃1(2)` agrees with the `S0/S1/S2` class of `(b1, b2)`.
    StringLoss,
    /// Recomputed vacancy changes agree with [`vacancy_changes`].
    VacancyChange,
    /// Second differences of the vacancy numbers.
    SecondDifference,
    /// `p_i^(a) = λ_a` for large `i`.
    Stabilization,
    /// `δ̃(δ(rc)) = rc`.
    StepRoundTrip,
    /// `Φ(Φ⁻¹(p)) = p`.
    PathRoundTrip,
}

impl Invariant {
    pub const ALL: [Invariant; 11] = [
        Invariant::Forward,
        Invariant::Bijection,
        Invariant::Statistic,
        Invariant::ChargeStep,
        Invariant::LocalEnergy,
        Invariant::StringLoss,
        Invariant::VacancyChange,
        Invariant::SecondDifference,
        Invariant::Stabilization,
        Invariant::StepRoundTrip,
        Invariant::PathRoundTrip,
    ];
}

/// Checks run and failures seen for one invariant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counter {
    pub checked: u64,
    pub failed: u64,
}

/// A single failed check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// The configuration or path the check ran on.
    pub subject: String,
    pub invariant: Invariant,
    pub detail: String,
}

/// Which suites [`verify`] runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub vacancy_changes: bool,
    pub structure: bool,
    pub round_trip: bool,
    /// Failures kept in the report; the counters are always complete.
    pub max_failures: usize,
}

impl Default for VerifyOptions {
    fn default() -> VerifyOptions {
        VerifyOptions { vacancy_changes: true, structure: true, round_trip: true, max_failures: 20 }
    }
}

impl VerifyOptions {
    /// The suites required at length `big_l` under the default bounds.
    pub fn for_length(big_l: usize) -> VerifyOptions {
        VerifyOptions { round_trip: big_l <= DEFAULT_ROUND_TRIP_L, ..VerifyOptions::default() }
    }
}

/// Outcome of every suite on one `(λ, L)` cell.
///
/// Serializes deterministically; the wall time is kept out of the JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lam: Weight,
    #[serde(rename = "L")]
    pub big_l: usize,
    pub rc_count: usize,
    pub path_count: usize,
    pub bijective: bool,
    pub statistic_ok: bool,
    pub counters: BTreeMap<Invariant, Counter>,
    /// Forward steps whose output the box-adding clauses could not invert.
    /// Reported apart from failures.
    pub inverse_gaps: u64,
    /// Steps of `Φ⁻¹` on paths that fell back to the exhaustive preimage
    /// search.
    pub search_steps: u64,
    pub failures: Vec<Failure>,
    #[serde(skip)]
    pub wall_time_ms: u128,
}

impl VerificationReport {
    fn new(lam: Weight, big_l: usize) -> VerificationReport {
        VerificationReport {
            lam,
            big_l,
            rc_count: 0,
            path_count: 0,
            bijective: false,
            statistic_ok: false,
            counters: BTreeMap::new(),
            inverse_gaps: 0,
            search_steps: 0,
            failures: Vec::new(),
            wall_time_ms: 0,
        }
    }

    /// Whether every counter is free of failures.
    pub fn passed(&self) -> bool {
        self.counters.values().all(|c| c.failed == 0)
    }

    pub fn failed(&self, inv: Invariant) -> u64 {
        self.counters.get(&inv).map_or(0, |c| c.failed)
    }

    pub fn checked(&self, inv: Invariant) -> u64 {
        self.counters.get(&inv).map_or(0, |c| c.checked)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

struct Recorder<'a> {
    report: &'a mut VerificationReport,
    max_failures: usize,
}

impl Recorder<'_> {
    fn check(&mut self, inv: Invariant, ok: bool, subject: impl FnOnce() -> String, detail: impl FnOnce() -> String) {
        let c = self.report.counters.entry(inv).or_default();
        c.checked += 1;
        if !ok {
            c.failed += 1;
            if self.report.failures.len() < self.max_failures {
                self.report.failures.push(Failure { subject: subject(), invariant: inv, detail: detail() });
            }
        }
    }
}

/// Runs every selected suite on `RC(lam, big_l)` and `P(lam, big_l)`.
pub fn verify(lam: Weight, big_l: usize, opts: &VerifyOptions) -> Result<VerificationReport, BoundError> {
    let start = Instant::now();
    let mut report = VerificationReport::new(lam, big_l);
    let rcs = enumerate_rc_bounded(lam, big_l, usize::MAX)?;
    let paths = enumerate_paths_bounded(lam, big_l, usize::MAX)?;
    report.rc_count = rcs.len();
    report.path_count = paths.len();
    let mut rec = Recorder { report: &mut report, max_failures: opts.max_failures };

    let path_set: HashSet<&Path> = paths.iter().collect();
    let mut image: HashSet<Path> = HashSet::with_capacity(rcs.len());
    let mut bijective = true;
    let mut statistic_ok = true;
    for rc in &rcs {
        let steps = match phi_trace(rc) {
            Ok(s) => s,
            Err(e) => {
                rec.check(Invariant::Forward, false, || rc.to_string(), || e.to_string());
                bijective = false;
                statistic_ok = false;
                continue;
            }
        };
        rec.check(Invariant::Forward, true, String::new, String::new);
        let p = Path(steps.iter().map(|o| o.letter).collect());
        let fresh = image.insert(p.clone());
        let hit = path_set.contains(&p);
        bijective &= fresh && hit;
        rec.check(
            Invariant::Bijection,
            fresh && hit,
            || rc.to_string(),
            || {
                if hit {
                    format!("Φ = {p} repeats")
                } else {
                    format!("Φ = {p} is not highest weight")
                }
            },
        );
        let (c, d) = (rc.charge(), energy(&p));
        statistic_ok &= c == d;
        rec.check(Invariant::Statistic, c == d, || rc.to_string(), || format!("charge {c} but energy {d} for {p}"));
        check_steps(&mut rec, rc, &steps, opts);
        if opts.round_trip {
            check_step_round_trips(&mut rec, rc, &steps);
        }
    }
    let covered = image.len() == paths.len();
    rec.check(
        Invariant::Bijection,
        covered,
        || format!("RC({lam}, {big_l})"),
        || format!("image has {} paths of {}", image.len(), paths.len()),
    );
    bijective &= covered;

    if opts.structure {
        for c in enumerate_configurations(lam, big_l) {
            check_structure(&mut rec, &c);
        }
    }
    if opts.round_trip {
        for p in &paths {
            check_path_round_trip(&mut rec, p);
        }
    }
    report.bijective = bijective;
    report.statistic_ok = statistic_ok;
    for inv in Invariant::ALL {
        report.counters.entry(inv).or_default();
    }
    report.wall_time_ms = start.elapsed().as_millis();
    Ok(report)
}

fn check_steps(rec: &mut Recorder, rc: &RiggedConfiguration, steps: &[DeltaOutcome], opts: &VerifyOptions) {
    let tables = energy_tables();
    let mut cur = rc;
    for (k, o) in steps.iter().enumerate() {
        let alpha = cur.nu2.len() as i64;
        let alpha_new = o.new_rc.nu2.len() as i64;
        let empty = |b: Letter| b.is_empty() as i64;
        let dc = cur.charge() - o.new_rc.charge();
        let want = -alpha + empty(o.letter);
        rec.check(
            Invariant::ChargeStep,
            dc == want,
            || cur.to_string(),
            || format!("letter {}: charge drops by {dc}, expected {want}", o.letter),
        );
        if let Some(next) = steps.get(k + 1) {
            let (b1, b2) = (o.letter, next.letter);
            let h = tables.local_energy(b1, b2);
            let want = alpha_new - alpha + empty(b1) - empty(b2);
            rec.check(
                Invariant::LocalEnergy,
                h == want,
                || cur.to_string(),
                || format!("H({b1} ⊗ {b2}) = {h}, expected {want}"),
            );
            let class = if b1.is_empty() {
                2
            } else if b2.is_empty() || tables.in_s0(b1, b2) {
                0
            } else if tables.in_s1(b1, b2) {
                1
            } else {
                2
            };
            rec.check(
                Invariant::StringLoss,
                o.delta_alpha == class,
                || cur.to_string(),
                || format!("({b1}, {b2}) lost {} strings of nu(2), expected {class}", o.delta_alpha),
            );
        }
        if opts.vacancy_changes {
            let window = cur.config().vacancy_window() + 3;
            let table = vacancy_changes(o.letter, &o.marking, window);
            let old = cur.config();
            let new = o.new_rc.config();
            let bad = (1..=2)
                .flat_map(|a| (1..=window).map(move |i| (a, i)))
                .find(|&(a, i)| new.vacancy(a, i) - old.vacancy(a, i) != table[a - 1][i - 1]);
            rec.check(
                Invariant::VacancyChange,
                bad.is_none(),
                || cur.to_string(),
                || {
                    let (a, i) = bad.expect("mismatch");
                    format!(
                        "letter {}: Δp_{i}^({a}) = {}, table gives {}",
                        o.letter,
                        new.vacancy(a, i) - old.vacancy(a, i),
                        table[a - 1][i - 1]
                    )
                },
            );
        }
        cur = &o.new_rc;
    }
}

fn check_step_round_trips(rec: &mut Recorder, rc: &RiggedConfiguration, steps: &[DeltaOutcome]) {
    let mut cur = rc;
    for o in steps {
        match delta_theta_inv(&o.new_rc, o.letter) {
            Ok(back) => {
                rec.check(
                    Invariant::StepRoundTrip,
                    back.rc == *cur,
                    || cur.to_string(),
                    || format!("letter {} inverts to {}", o.letter, back.rc),
                );
            }
            Err(InverseError::NoRule { .. } | InverseError::Mismatch { .. }) => {
                rec.report.inverse_gaps += 1;
                rec.check(Invariant::StepRoundTrip, true, String::new, String::new);
            }
            Err(e) => rec.check(Invariant::StepRoundTrip, false, || cur.to_string(), || e.to_string()),
        }
        cur = &o.new_rc;
    }
}

fn check_path_round_trip(rec: &mut Recorder, p: &Path) {
    match phi_inv_with_fallback(p) {
        Ok((rc, sources)) => {
            rec.report.search_steps += sources.iter().filter(|s| matches!(s, StepSource::Search(_))).count() as u64;
            let back = phi(&rc);
            let ok = back.as_ref().is_ok_and(|q| q == p);
            rec.check(
                Invariant::PathRoundTrip,
                ok,
                || p.to_string(),
                || match back {
                    Ok(q) => format!("Φ(Φ⁻¹(p)) = {q}"),
                    Err(e) => e.to_string(),
                },
            );
        }
        Err(e) => rec.check(Invariant::PathRoundTrip, false, || p.to_string(), || e.to_string()),
    }
}

fn check_structure(rec: &mut Recorder, c: &Configuration) {
    let p = |a: usize, i: usize| c.vacancy(a, i);
    let m = |a: usize, i: usize| if i == 0 { 0 } else { c.multiplicity(a, i) as i64 };
    let top = c.vacancy_window() + 3;
    let mut bad: Option<String> = None;
    for i in 1..=top {
        let lhs = [
            -p(1, 3 * i - 2) + 2 * p(1, 3 * i - 1) - p(1, 3 * i),
            -p(1, 3 * i - 1) + 2 * p(1, 3 * i) - p(1, 3 * i + 1),
            -p(1, 3 * i) + 2 * p(1, 3 * i + 1) - p(1, 3 * i + 2),
            -p(2, i - 1) + 2 * p(2, i) - p(2, i + 1),
        ];
        let rhs = [
            -2 * m(1, 3 * i - 1),
            -2 * m(1, 3 * i) + m(2, i),
            -2 * m(1, 3 * i + 1),
            3 * m(1, 3 * i) + 2 * (m(1, 3 * i - 1) + m(1, 3 * i + 1)) + m(1, 3 * i - 2) + m(1, 3 * i + 2) - 2 * m(2, i),
        ];
        if let Some(k) = (0..4).find(|&k| lhs[k] != rhs[k]) {
            bad = Some(format!("identity {} at i = {i}: {} ≠ {}", k + 1, lhs[k], rhs[k]));
            break;
        }
    }
    rec.check(Invariant::SecondDifference, bad.is_none(), || format!("{c:?}"), || bad.clone().unwrap_or_default());

    let lam = c.lambda();
    let from1 = c.max_part(1).max(3 * c.max_part(2));
    let from2 = c.max_part(2).max(c.max_part(1).div_ceil(3));
    let off = (from1..from1 + 4)
        .map(|i| (1, i, lam.l1))
        .chain((from2..from2 + 4).map(|i| (2, i, lam.l2)))
        .find(|&(a, i, want)| p(a, i) != want);
    rec.check(
        Invariant::Stabilization,
        off.is_none(),
        || format!("{c:?}"),
        || {
            let (a, i, want) = off.expect("mismatch");
            format!("p_{i}^({a}) = {}, expected {want}", p(a, i))
        },
    );
}

/// Every dominant `λ` with nonnegative box totals at length `big_l`.
pub fn cells(big_l: usize) -> Vec<Weight> {
    let mut out = Vec::new();
    for l1 in 0..=(2 * big_l as i64) {
        for l2 in 0..=(big_l as i64) {
            let lam = Weight::new(l1, l2);
            if box_totals(lam, big_l).is_some() {
                out.push(lam);
            }
        }
    }
    out
}

/// Reports for every cell with `L ≤ max_l`, in `(L, λ)` order.
///
/// Cells run in parallel on the current rayon pool; `opts` maps each length
/// to the suites run there.
pub fn sweep(
    max_l: usize,
    opts: impl Fn(usize) -> VerifyOptions + Sync,
) -> Result<Vec<VerificationReport>, BoundError> {
    let work: Vec<(usize, Weight)> = (0..=max_l).flat_map(|l| cells(l).into_iter().map(move |lam| (l, lam))).collect();
    work.into_par_iter().map(|(l, lam)| verify(lam, l, &opts(l))).collect()
}

/// A worked example with its expected statistics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub rc: RiggedConfiguration,
    /// Expected `Φ(rc)`.
    #[serde(default)]
    pub path: Option<Path>,
    #[serde(default)]
    pub charge: Option<i64>,
    #[serde(default)]
    pub energy: Option<i64>,
    /// Charge of the configuration alone, without riggings.
    #[serde(default)]
    pub config_charge: Option<i64>,
    /// Expected letter of the first step.
    #[serde(default)]
    pub first_letter: Option<Letter>,
    /// A configuration that a wrong marking of `rc` would produce and that
    /// must fail admissibility.
    #[serde(default)]
    pub inadmissible: Option<BareConfiguration>,
    /// Paths from wrong markings, with their energies.
    #[serde(default)]
    pub counter_paths: Vec<CounterPath>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BareConfiguration {
    #[serde(rename = "L")]
    pub big_l: usize,
    pub nu1: Vec<usize>,
    pub nu2: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterPath {
    pub path: Path,
    pub energy: i64,
}

/// Failure to load a fixture file.
#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed fixture {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

/// Result of replaying one fixture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureResult {
    pub name: String,
    /// One line per mismatch; empty when the fixture passed.
    pub mismatches: Vec<String>,
}

impl FixtureResult {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Reads every `*.json` fixture in `dir`, sorted by file name.
pub fn load_fixtures(dir: &FsPath) -> Result<Vec<Fixture>, FixtureError> {
    let io = |source| FixtureError::Io { path: dir.to_path_buf(), source };
    let mut files: Vec<PathBuf> =
        fs::read_dir(dir).map_err(io)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>().map_err(io)?;
    files.retain(|p| p.extension().is_some_and(|x| x == "json"));
    files.sort();
    files
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).map_err(|source| FixtureError::Io { path: path.clone(), source })?;
            serde_json::from_str(&text).map_err(|source| FixtureError::Json { path, source })
        })
        .collect()
}

/// Replays one fixture end to end.
pub fn check_fixture(f: &Fixture) -> FixtureResult {
    let mut bad = Vec::new();
    let rc = RiggedConfiguration::new(f.rc.big_l, f.rc.nu1.clone(), f.rc.nu2.clone());
    if let Err(e) = rc.validate() {
        bad.push(format!("configuration is invalid: {e}"));
        return FixtureResult { name: f.name.clone(), mismatches: bad };
    }
    let charge = rc.charge();
    if let Some(want) = f.charge.filter(|&w| w != charge) {
        bad.push(format!("charge {charge}, expected {want}"));
    }
    if let Some(want) = f.config_charge {
        let got = rc.config().charge();
        if got != want {
            bad.push(format!("configuration charge {got}, expected {want}"));
        }
    }
    match phi_trace(&rc) {
        Err(e) => bad.push(format!("Φ failed: {e}")),
        Ok(steps) => {
            let p = Path(steps.iter().map(|o| o.letter).collect());
            if let Some(want) = f.path.as_ref().filter(|&w| *w != p) {
                bad.push(format!("Φ = {p}, expected {want}"));
            }
            if let Some(want) = f.energy.filter(|&w| w != energy(&p)) {
                bad.push(format!("energy {}, expected {want}", energy(&p)));
            }
            if let Some(want) = f.first_letter.filter(|&w| Some(w) != p.letters().first().copied()) {
                bad.push(format!("first letter {:?}, expected {want}", p.letters().first()));
            }
            if let Some(bare) = &f.inadmissible {
                let wrong = Configuration::new(bare.big_l, bare.nu1.clone(), bare.nu2.clone());
                if wrong.is_admissible(wrong.lambda()) {
                    bad.push(format!("{wrong:?} should not be admissible"));
                }
                let right = steps[0].new_rc.config();
                if right == wrong || !right.is_admissible(right.lambda()) {
                    bad.push(format!("first step gives {right:?}"));
                }
            }
            for cp in &f.counter_paths {
                let e = energy(&cp.path);
                if e != cp.energy {
                    bad.push(format!("counter path {} has energy {e}, expected {}", cp.path, cp.energy));
                }
                if cp.path == p || e == charge {
                    bad.push(format!("counter path {} is not distinguished from Φ", cp.path));
                }
            }
        }
    }
    FixtureResult { name: f.name.clone(), mismatches: bad }
}

/// Loads and replays every fixture in `dir`.
pub fn fixtures_check(dir: &FsPath) -> Result<Vec<FixtureResult>, FixtureError> {
    Ok(load_fixtures(dir)?.iter().map(check_fixture).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cell() {
        let r = verify(Weight::new(0, 0), 0, &VerifyOptions::default()).unwrap();
        assert_eq!((r.rc_count, r.path_count), (1, 1));
        assert!(r.bijective && r.statistic_ok && r.passed());
    }

    #[test]
    fn two_paths_at_weight_one_one() {
        let r = verify(Weight::new(1, 1), 3, &VerifyOptions::default()).unwrap();
        assert_eq!((r.rc_count, r.path_count), (2, 2));
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn weight_two_zero_length_four() {
        let r = verify(Weight::new(2, 0), 4, &VerifyOptions::default()).unwrap();
        assert!(r.bijective && r.statistic_ok && r.passed(), "{:?}", r.failures);
        assert_eq!(r.rc_count, r.path_count);
    }

    #[test]
    fn report_json_is_stable() {
        let a = verify(Weight::new(0, 1), 3, &VerifyOptions::default()).unwrap();
        let b = verify(Weight::new(0, 1), 3, &VerifyOptions::default()).unwrap();
        assert_eq!(a.to_json_line(), b.to_json_line());
        assert!(!a.to_json_line().contains("wall"));
    }

    #[test]
    fn cells_at_zero() {
        assert_eq!(cells(0), vec![Weight::new(0, 0)]);
    }
}
