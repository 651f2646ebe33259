//! The box-adding step `δ̃` and the inverse map `Φ⁻¹`.
//!
//! Given `(ν̃, J̃)` at length `L − 1` and a letter `b`, the box-adding cases
//! decide which strings grow and by how many boxes. The riggings of the grown
//! strings are then recovered by running the forward step on each candidate
//! and keeping the one that returns `b` and `(ν̃, J̃)`; every other string keeps
//! its rigging.
//!
//! Zero-length strings are singular with vacancy zero. They are not stored in
//! a configuration; a plan that grows one creates a new string.
//!
//! When no clause produces a verified preimage the step reports a gap.
//! [`preimage_search`] is an exhaustive alternative that scans `RC(λ, L)` and
//! is used by [`phi_inv_with_fallback`] to finish a path across such gaps.

use std::fmt;

use serde::Serialize;

use crate::bijection::delta_theta;
use crate::crystal::{self, Letter};
use crate::error::InverseError;
use crate::paths::Path;
use crate::rigged_config::{eff, enumerate_rc_bounded, RcString, RiggedConfiguration, Singularity, StringType};

use Singularity::{Singular, Q, QQ};
use StringType::{Type0, TypeI, TypeII};

/// Boxes added to one string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Addition {
    /// Partition index `1` or `2`.
    pub a: usize,
    /// Length before adding; `0` for a newly created string.
    pub from_len: usize,
    pub boxes: usize,
}

/// The box additions chosen for one letter and the clauses that chose them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BoxAddPlan {
    pub additions: Vec<Addition>,
    pub clauses: Vec<String>,
}

impl fmt::Display for BoxAddPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let adds: Vec<String> =
            self.additions.iter().map(|d| format!("nu{}:{}+{}", d.a, d.from_len, d.boxes)).collect();
        if adds.is_empty() {
            return f.write_str("no boxes added");
        }
        write!(f, "{} | {}", adds.join(" "), self.clauses.join(", "))
    }
}

/// A verified preimage together with the plan that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseOutcome {
    pub rc: RiggedConfiguration,
    pub plan: BoxAddPlan,
}

/// How [`phi_inv_with_fallback`] obtained each step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepSource {
    Clause(BoxAddPlan),
    /// No clause applied; the exhaustive search found the preimage.
    Search(InverseError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Old(usize),
    New(usize),
}

/// A string offered to a search, with its status in `ν̃`.
#[derive(Clone, Copy, Debug)]
struct Cand {
    a: usize,
    slot: Slot,
    len: usize,
    sing: Singularity,
}

impl Cand {
    fn ty(&self) -> StringType {
        StringType::of(self.len)
    }

    fn eff(&self) -> usize {
        eff(self.len)
    }
}

/// A constraint on the final length of the first string a case grows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
enum Lim {
    #[default]
    Free,
    Is(Slot),
    LenEq(usize),
    LenLt(usize),
    LenLe(usize),
    EffLt(usize),
    EffLe(usize),
}

impl Lim {
    fn admits(self, c: &Cand, boxes: usize) -> bool {
        let fin = c.len + boxes;
        match self {
            Lim::Free => true,
            Lim::Is(s) => c.slot == s,
            Lim::LenEq(n) => fin == n,
            Lim::LenLt(n) => fin < n,
            Lim::LenLe(n) => fin <= n,
            Lim::EffLt(n) => eff(fin) < n,
            Lim::EffLe(n) => eff(fin) <= n,
        }
    }
}

type Found = Result<RiggedConfiguration, String>;

/// A clause closure built at run time from the chosen string.
type BoxedClause<'a> = Box<dyn Fn(&mut Plan<'a>) -> Found>;

/// How candidate strings are classified during one box-adding pass.
///
/// A string of `ν̃(a)` is classified against the vacancy numbers of the
/// configuration whose partition `b` includes the boxes added so far exactly
/// when `grown[a - 1][b - 1]` holds. When `touched` is set, strings that
/// already received boxes stay selectable at their new length with that
/// status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Frame {
    grown: [[bool; 2]; 2],
    touched: Option<Singularity>,
}

const CROSS: [[bool; 2]; 2] = [[false, true], [true, false]];

/// Frames tried in order; the first one whose plan verifies wins.
const FRAMES: [Frame; 4] = [
    Frame { grown: CROSS, touched: None },
    Frame { grown: [[false; 2]; 2], touched: None },
    Frame { grown: CROSS, touched: Some(Singular) },
    Frame { grown: CROSS, touched: Some(Q) },
];

#[derive(Clone)]
struct Plan<'a> {
    base: &'a RiggedConfiguration,
    b: Letter,
    frame: Frame,
    added: [Vec<usize>; 2],
    fresh: [Vec<usize>; 2],
    /// Length of a q-singular `ν̃(1)` string the next search skips.
    ignore_q: Option<usize>,
    clauses: Vec<String>,
}

fn rank3(s: Singularity) -> Option<u8> {
    match s {
        Singular => Some(0),
        Q => Some(1),
        QQ => Some(2),
        _ => None,
    }
}

fn rank_sq(s: Singularity) -> Option<u8> {
    match s {
        Singular => Some(0),
        Q => Some(1),
        _ => None,
    }
}

fn only(want: Singularity) -> impl Fn(Singularity) -> Option<u8> {
    move |s| (s == want).then_some(0)
}

impl<'a> Plan<'a> {
    fn new(base: &'a RiggedConfiguration, b: Letter, frame: Frame) -> Plan<'a> {
        Plan {
            base,
            b,
            frame,
            added: [vec![0; base.nu1.len()], vec![0; base.nu2.len()]],
            fresh: [Vec::new(), Vec::new()],
            ignore_q: None,
            clauses: Vec::new(),
        }
    }

    fn current_lengths(&self, a: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.base.strings(a).iter().zip(&self.added[a - 1]).map(|(s, n)| s.len + n).collect();
        v.extend(self.fresh[a - 1].iter().copied());
        v
    }

    fn frame_vac(&self, a: usize, k: usize) -> i64 {
        let lens = |b: usize| -> Vec<usize> {
            if self.frame.grown[a - 1][b - 1] {
                self.current_lengths(b)
            } else {
                self.base.strings(b).iter().map(|s| s.len).collect()
            }
        };
        let len = self.base.strings(a)[k].len;
        crate::rigged_config::vacancy_of(self.base.big_l, &lens(1), &lens(2), a, len)
    }

    fn note(&mut self, s: impl Into<String>) {
        self.clauses.push(s.into());
    }

    /// Untouched strings of `ν̃(a)`, grown strings when the frame allows it,
    /// and one zero-length string.
    fn cands(&self, a: usize) -> Vec<Cand> {
        let mut out: Vec<Cand> = self
            .base
            .strings(a)
            .iter()
            .enumerate()
            .filter(|&(k, _)| self.added[a - 1][k] == 0)
            .map(|(k, s)| Cand {
                a,
                slot: Slot::Old(k),
                len: s.len,
                sing: Singularity::of(self.frame_vac(a, k), s.rig),
            })
            .filter(|c| !(a == 1 && c.sing == Q && Some(c.len) == self.ignore_q))
            .collect();
        if let Some(touched) = self.frame.touched {
            for (k, s) in self.base.strings(a).iter().enumerate() {
                let n = self.added[a - 1][k];
                if n > 0 {
                    out.push(Cand { a, slot: Slot::Old(k), len: s.len + n, sing: touched });
                }
            }
            for (j, &n) in self.fresh[a - 1].iter().enumerate() {
                out.push(Cand { a, slot: Slot::New(j), len: n, sing: touched });
            }
        }
        out.push(Cand { a, slot: Slot::New(self.fresh[a - 1].len()), len: 0, sing: Singular });
        out
    }

    /// The longest admissible string, ties broken by `rank`.
    fn longest(
        &self,
        a: usize,
        rank: impl Fn(Singularity) -> Option<u8>,
        keep: impl Fn(&Cand) -> bool,
    ) -> Option<Cand> {
        self.cands(a)
            .into_iter()
            .filter(|c| rank(c.sing).is_some() && keep(c))
            .min_by_key(|c| (std::cmp::Reverse(c.len), rank(c.sing)))
    }

    /// Whether some string of `ν̃(a)` satisfies `keep`.
    fn exists(&self, a: usize, want: Singularity, keep: impl Fn(&Cand) -> bool) -> Option<Cand> {
        self.cands(a).into_iter().filter(|c| c.sing == want && keep(c)).max_by_key(|c| c.len)
    }

    fn add(&mut self, c: &Cand, n: usize) {
        match c.slot {
            Slot::Old(k) => self.added[c.a - 1][k] += n,
            Slot::New(j) => {
                let f = &mut self.fresh[c.a - 1];
                if j < f.len() {
                    f[j] += n;
                } else {
                    f.push(n);
                }
            }
        }
        self.note(format!("nu{}:{}+{}", c.a, c.len, n));
    }

    fn additions(&self) -> Vec<Addition> {
        let mut out = Vec::new();
        for a in 1..=2 {
            for (k, &n) in self.added[a - 1].iter().enumerate() {
                if n > 0 {
                    out.push(Addition { a, from_len: self.base.strings(a)[k].len, boxes: n });
                }
            }
            for &n in &self.fresh[a - 1] {
                out.push(Addition { a, from_len: 0, boxes: n });
            }
        }
        out
    }

    /// Completes the riggings of the grown strings and checks the result
    /// against the forward step.
    fn finish(&self) -> Found {
        let big_l = self.base.big_l + 1;
        let mut fixed: [Vec<RcString>; 2] = [Vec::new(), Vec::new()];
        let mut grown: Vec<(usize, usize)> = Vec::new();
        for a in 1..=2 {
            for (k, s) in self.base.strings(a).iter().enumerate() {
                match self.added[a - 1][k] {
                    0 => fixed[a - 1].push(*s),
                    n => grown.push((a, s.len + n)),
                }
            }
            grown.extend(self.fresh[a - 1].iter().map(|&n| (a, n)));
        }
        let lens = |a: usize| -> Vec<usize> {
            fixed[a - 1].iter().map(|s| s.len).chain(grown.iter().filter(|g| g.0 == a).map(|g| g.1)).collect()
        };
        let (l1, l2) = (lens(1), lens(2));
        let vac = |a: usize, i: usize| crate::rigged_config::vacancy_of(big_l, &l1, &l2, a, i);
        let tops: Vec<i64> = grown.iter().map(|&(a, len)| vac(a, len)).collect();
        if tops.iter().any(|&p| p < 0) {
            return Err("a grown string has negative vacancy".into());
        }
        let mut rigs = vec![0i64; grown.len()];
        loop {
            let mut nu = fixed.clone();
            for (g, &r) in grown.iter().zip(&rigs) {
                nu[g.0 - 1].push(RcString::new(g.1, r));
            }
            let [nu1, nu2] = nu;
            let cand = RiggedConfiguration::new(big_l, nu1, nu2);
            if cand.validate().is_ok() {
                if let Ok(o) = delta_theta(&cand) {
                    if o.letter == self.b && o.new_rc == *self.base {
                        return Ok(cand);
                    }
                }
            }
            let mut i = 0;
            loop {
                if i == rigs.len() {
                    return Err("no rigging of the grown strings inverts the step".into());
                }
                if rigs[i] < tops[i] {
                    rigs[i] += 1;
                    break;
                }
                rigs[i] = 0;
                i += 1;
            }
        }
    }

    /// Runs `f` on a copy of the plan; on failure the plan is left untouched.
    fn attempt(&mut self, f: impl FnOnce(&mut Plan<'a>) -> Found) -> Found {
        let mut trial = self.clone();
        let r = f(&mut trial);
        if r.is_ok() {
            *self = trial;
        }
        r
    }

    fn gap(&self, what: &str) -> Found {
        Err(format!("letter {}: {what}", self.b))
    }

    // ------------------------------------------------------------------ cases

    fn run(&mut self) -> Found {
        match self.b.number() {
            None => self.case_empty(),
            Some(1) => self.finish(),
            Some(2) => self.case2(Lim::Free),
            Some(3) => self.case3(),
            Some(4) => self.case4(Lim::Free),
            Some(5) => self.case5(Lim::Free),
            Some(6) => self.case6(Lim::Free),
            Some(7) => self.case7(),
            Some(8) => self.case8(),
            Some(9) => self.case9(),
            Some(10) => self.case10(Lim::Free),
            Some(11) => self.case11(Lim::Free),
            Some(12) => self.case12(),
            Some(13) => self.case13(),
            Some(14) => self.case14(),
            Some(n) => unreachable!("no box {n}"),
        }
    }

    fn case_empty(&mut self) -> Found {
        self.note("Case ∅");
        let z1 = Cand { a: 1, slot: Slot::New(0), len: 0, sing: Singular };
        self.add(&z1, 3);
        for j in 0..2 {
            let z2 = Cand { a: 2, slot: Slot::New(j), len: 0, sing: Singular };
            self.add(&z2, 1);
        }
        self.finish()
    }

    /// `lim` bounds the final length of the grown `ν(2)` string.
    fn case2(&mut self, lim: Lim) -> Found {
        self.note("Case 2");
        let Some(c) = self.longest(2, only(Singular), |c| lim.admits(c, 1)) else {
            return self.gap("Case 2 finds no singular string");
        };
        self.add(&c, 1);
        self.finish()
    }

    fn case3(&mut self) -> Found {
        self.note("Case 3");
        let Some(c) = self.longest(1, only(Singular), |_| true) else {
            return self.gap("Case 3 finds no singular string");
        };
        self.add(&c, 1);
        self.case2(Lim::LenLe(eff(c.len + 1)))
    }

    /// `lim` bounds the final length of the grown `ν(1)` string.
    fn case4(&mut self, lim: Lim) -> Found {
        self.note("Case 4");
        let boxes = |c: &Cand| if c.sing == Singular { 2 } else { 1 };
        let Some(c) = self.longest(1, rank_sq, |c| lim.admits(c, boxes(c))) else {
            return self.gap("Case 4 finds no singular/q-singular string");
        };
        self.ignore_q = None;
        self.add(&c, boxes(&c));
        if c.sing == Singular {
            self.case2(Lim::LenLe(eff(c.len + 2)))
        } else {
            self.case3()
        }
    }

    fn case4_ignoring(&mut self, len: usize) -> Found {
        self.ignore_q = len.checked_sub(1);
        self.case4(Lim::Free)
    }

    /// `lim` constrains the grown `ν(2)` string (the `i4`-string).
    fn case5(&mut self, lim: Lim) -> Found {
        self.note("Case 5");
        let Some(s2) = self.longest(2, only(Singular), |c| lim.admits(c, 1)) else {
            return self.gap("Case 5 finds no singular string in nu(2)");
        };
        let l2 = s2.len;
        self.add(&s2, 1);
        let pick = self.longest(1, rank_sq, |_| true);
        let main = self.attempt(|p| {
            let Some(c) = pick else { return p.gap("Case 5 finds no string in nu(1)") };
            match (c.sing, c.len) {
                (Singular, n) if n == 3 * l2 + 1 => {
                    p.note("Case 5(1)");
                    p.add(&c, 1);
                    p.case3()
                }
                (Singular, n) if n == 3 * l2 || n + 1 == 3 * l2 => {
                    p.note("Case 5(2)");
                    p.add(&c, 2);
                    p.case2(Lim::LenLe(eff(n + 2)))
                }
                (Q, n) if n == 3 * l2 => {
                    p.note("Case 5(3)");
                    p.add(&c, 1);
                    p.case3()
                }
                _ => p.gap("Case 5 clauses (1)-(3) do not apply"),
            }
        });
        if main.is_ok() {
            return main;
        }
        self.note("Case 5 fallback");
        self.case4(Lim::EffLt(l2 + 1))
    }

    /// `lim` constrains the grown `ν(1)` string (the `i4`-string).
    fn case6(&mut self, lim: Lim) -> Found {
        self.note("Case 6");
        let boxes = |c: &Cand| match c.sing {
            Singular => 3,
            Q => 2,
            _ => 1,
        };
        let Some(mut c) = self.longest(1, rank3, |c| lim.admits(c, boxes(c))) else {
            return self.gap("Case 6 finds no string");
        };
        if c.sing == QQ {
            if let Some(s) = self.exists(1, Singular, |s| s.len + 1 == c.len && lim.admits(s, 3)) {
                self.note("Case 6 reset");
                c = s;
            }
        }
        self.add(&c, boxes(&c));
        match c.sing {
            Singular => self.case2(Lim::LenLe(eff(c.len + 3))),
            Q => self.case3(),
            _ => self.case4(Lim::Free),
        }
    }

    fn case7(&mut self) -> Found {
        self.note("Case 7");
        let Some(c) = self.longest(1, only(Singular), |_| true) else {
            return self.gap("Case 7 finds no singular string");
        };
        let e = c.eff();
        let main = self.attempt(|p| match c.ty() {
            Type0 => {
                let Some(s) = p.exists(2, Singular, |s| s.len == e) else {
                    return p.gap("Case 7(1) finds no partner");
                };
                p.note("Case 7(1)");
                p.add(&c, 3);
                p.add(&s, 1);
                p.case2(Lim::LenLe(eff(c.len + 3)))
            }
            TypeI => {
                let Some(s) = p.exists(2, Singular, |s| s.len + 1 == e) else {
                    return p.gap("Case 7(2) finds no partner");
                };
                p.note("Case 7(2)");
                p.add(&c, 1);
                p.case5(Lim::Is(s.slot))
            }
            TypeII => {
                let Some(s) = p.exists(2, Singular, |s| s.len + 1 == e) else {
                    return p.gap("Case 7(3) finds no partner");
                };
                p.note("Case 7(3)");
                p.add(&c, 2);
                p.add(&s, 1);
                p.case3()
            }
        });
        if main.is_ok() {
            return main;
        }
        self.note("Case 7 fallback");
        self.add(&c, 1);
        self.case5(Lim::Free)
    }

    fn case8(&mut self) -> Found {
        self.note("Case 8");
        let Some(s2) = self.longest(2, only(Singular), |_| true) else {
            return self.gap("Case 8 finds no singular string in nu(2)");
        };
        let l2 = s2.len;
        self.add(&s2, 1);
        let eligible = |c: &Cand| {
            let e = c.eff();
            match (c.sing, c.ty()) {
                (Singular, Type0) => e == l2,
                (Singular, _) => e == l2 + 1 || e == l2,
                (Q, TypeII) => e == l2 + 1,
                (Q, Type0) => e == l2,
                (Q, TypeI) => e == l2,
                (QQ, Type0) => e == l2,
                _ => false,
            }
        };
        let pick = self.longest(1, rank3, eligible);
        let main = self.attempt(|p| {
            let Some(c) = pick else { return p.gap("Case 8 finds no string in nu(1)") };
            let e = c.eff();
            match (c.ty(), c.sing) {
                (Type0, Singular) => {
                    p.add(&c, 3);
                    p.case2(Lim::LenLe(eff(c.len + 3)))
                }
                (Type0, Q) => {
                    p.add(&c, 2);
                    p.case3()
                }
                (Type0, _) => {
                    p.add(&c, 1);
                    p.case4(Lim::Free)
                }
                (TypeI, Singular) if e == l2 + 1 => {
                    p.add(&c, 1);
                    p.case4_ignoring(c.len)
                }
                (TypeI, Singular) => {
                    p.add(&c, 3);
                    p.case2(Lim::LenLe(eff(c.len + 3)))
                }
                (TypeI, _) => {
                    p.add(&c, 2);
                    p.case3()
                }
                (TypeII, Singular) if e == l2 + 1 => {
                    p.add(&c, 2);
                    p.case3()
                }
                (TypeII, Singular) => {
                    p.add(&c, 3);
                    p.case2(Lim::LenLe(eff(c.len + 3)))
                }
                (TypeII, _) => {
                    p.add(&c, 1);
                    p.case4(Lim::Free)
                }
            }
        });
        if main.is_ok() {
            return main;
        }
        self.note("Case 8 fallback");
        self.case6(Lim::EffLt(l2 + 1))
    }

    fn case9(&mut self) -> Found {
        self.note("Case 9");
        let Some(s2) = self.longest(2, only(Singular), |_| true) else {
            return self.gap("Case 9 finds no singular string in nu(2)");
        };
        let l2 = s2.len;
        let Some(mut c) = self.longest(1, rank_sq, |_| true) else {
            return self.gap("Case 9 finds no string in nu(1)");
        };
        if c.sing == Q && c.eff() == l2 + 1 {
            let e = c.eff();
            if c.ty() == TypeI {
                if let Some(s) = self.exists(1, Singular, |s| s.ty() == TypeII && s.eff() == e) {
                    self.note("Case 9 reset to type-II");
                    c = s;
                }
            }
            if c.sing == Q && c.ty() != Type0 {
                if let Some(s) = self.exists(1, Singular, |s| s.ty() == Type0 && s.eff() == l2) {
                    self.note("Case 9 reset to type-0");
                    c = s;
                }
            }
        }
        let e = c.eff();
        let main = self.attempt(|p| match (c.sing, c.ty()) {
            (Q, _) => {
                p.add(&c, 1);
                p.case7()
            }
            (_, Type0) if e == l2 => {
                p.add(&c, 4);
                p.add(&s2, 1);
                p.case2(Lim::LenLe(eff(c.len + 4)))
            }
            (_, TypeII) if e == l2 + 1 => {
                p.add(&c, 3);
                p.add(&s2, 1);
                p.case3()
            }
            (_, TypeI) if e == l2 => {
                p.add(&c, 2);
                p.add(&s2, 1);
                p.case4_ignoring(c.len)
            }
            _ => p.gap("Case 9 clauses do not apply"),
        });
        if main.is_ok() {
            return main;
        }
        // The length condition may hold for a shorter singular string of nu(2).
        let partner = match (c.sing, c.ty()) {
            (Singular, Type0 | TypeI) => Some(e),
            (Singular, TypeII) => e.checked_sub(1),
            _ => None,
        };
        if let Some(s) = partner.and_then(|n| self.exists(2, Singular, |s| s.len == n && n < l2)) {
            let r = self.attempt(|p| {
                p.note("Case 9 shorter nu(2) string");
                p.add(&s, 1);
                match c.ty() {
                    Type0 => {
                        p.add(&c, 4);
                        p.case2(Lim::LenLe(eff(c.len + 4)))
                    }
                    TypeII => {
                        p.add(&c, 3);
                        p.case3()
                    }
                    TypeI => {
                        p.add(&c, 2);
                        p.case4_ignoring(c.len)
                    }
                }
            });
            if r.is_ok() {
                return r;
            }
        }
        self.note("Case 9 fallback");
        self.add(&c, 2);
        self.case5(Lim::Free)
    }

    /// `lim` constrains the `ν(2)` string picked first.
    fn case10(&mut self, lim: Lim) -> Found {
        self.note("Case 10");
        let boxes = |c: &Cand| if c.sing == Singular { 2 } else { 1 };
        let Some(s2) = self.longest(2, rank_sq, |c| lim.admits(c, boxes(c))) else {
            return self.gap("Case 10 finds no string in nu(2)");
        };
        if s2.sing == Q {
            self.add(&s2, 1);
            return self.case8();
        }
        let l2 = s2.len;
        self.add(&s2, 2);
        let eligible = |c: &Cand| {
            let e = c.eff();
            match (c.sing, c.ty()) {
                (Singular, Type0) => e == l2,
                (Singular, _) => e == l2 + 1 || e == l2,
                (Q, TypeII) => e == l2 + 1,
                (Q, _) => e == l2,
                (QQ, Type0) => e == l2,
                _ => false,
            }
        };
        let mut pick = self.longest(1, rank3, eligible);
        if let Some(c) = pick {
            let e = c.eff();
            if c.sing == Q && c.ty() == TypeII && e > 0 {
                if let Some(s) = self.exists(1, Singular, |s| s.ty() == Type0 && s.eff() + 1 == e) {
                    self.note("Case 10 reset to type-0");
                    pick = Some(s);
                }
            } else if c.sing == QQ {
                if let Some(s) = self.exists(1, Singular, |s| s.ty() == TypeI && s.eff() == e) {
                    self.note("Case 10 reset to type-I");
                    pick = Some(s);
                }
            }
        }
        let main = self.attempt(|p| {
            let Some(c) = pick else { return p.gap("Case 10 finds no string in nu(1)") };
            let e = c.eff();
            match (c.sing, c.ty()) {
                (Singular, Type0) => {
                    p.add(&c, 3);
                    p.case2(Lim::LenLe(eff(c.len + 3)))
                }
                (Singular, TypeI) if e == l2 + 1 => {
                    p.add(&c, 1);
                    p.case4(Lim::Free)
                }
                (Singular, TypeII) if e == l2 + 1 => {
                    p.add(&c, 2);
                    p.case3()
                }
                (Singular, _) => {
                    p.add(&c, 3);
                    p.case2(Lim::LenLe(eff(c.len + 3)))
                }
                (Q, TypeII) => {
                    p.add(&c, 1);
                    p.case4(Lim::Free)
                }
                (Q, _) => {
                    p.add(&c, 2);
                    p.case3()
                }
                _ => {
                    p.add(&c, 1);
                    p.case4(Lim::Free)
                }
            }
        });
        if main.is_ok() {
            return main;
        }
        self.note("Case 10 fallback");
        self.case6(Lim::EffLe(l2))
    }

    /// `lim` constrains the first grown `ν(2)` string.
    fn case11(&mut self, lim: Lim) -> Found {
        self.note("Case 11");
        let r = self.attempt(|p| p.case11_first(lim));
        if r.is_ok() {
            return r;
        }
        type Clause<'b> = fn(&mut Plan<'b>, Lim) -> Found;
        let rest: [Clause<'a>; 7] = [
            Plan::case11_b,
            Plan::case11_c,
            Plan::case11_d,
            Plan::case11_e,
            Plan::case11_f,
            Plan::case11_g,
            Plan::case11_h,
        ];
        for clause in rest {
            let r = self.attempt(|p| clause(p, lim));
            if r.is_ok() {
                return r;
            }
        }
        self.gap("no Case 11 clause applies")
    }

    fn case11_first(&mut self, lim: Lim) -> Found {
        let Some(c) = self.longest(1, only(Singular), |_| true) else {
            return self.gap("Case 11 finds no singular string");
        };
        let reach = eff(c.len + 1);
        let ls = self.longest(2, only(Singular), |s| lim.admits(s, 2));
        let lq = self.longest(2, only(Q), |s| s.len <= reach && lim.admits(s, 1));
        let (lq_len, ls_len) = (lq.map_or(0, |s| s.len), ls.map_or(0, |s| s.len));
        if let Some(q) = lq.filter(|_| lq_len > ls_len) {
            self.note("Case 11 q-singular");
            self.add(&c, 1);
            self.add(&q, 1);
            return self.case8();
        }
        if let Some(s) = ls.filter(|_| ls_len > lq_len && reach >= ls_len) {
            self.note("Case 11 singular");
            self.add(&c, 1);
            self.add(&s, 2);
            return self.case6(Lim::Free);
        }
        self.gap("Case 11 first clause does not apply")
    }

    fn no_q_between(&self, lo: usize, hi: usize) -> bool {
        !self.cands(1).iter().any(|c| c.sing == Q && c.len >= lo && c.len <= hi)
    }

    fn case11_b(&mut self, lim: Lim) -> Found {
        let s2 = self.longest(2, only(Singular), |s| lim.admits(s, 2));
        let c = self.longest(1, only(Singular), |_| true);
        let (Some(s2), Some(c)) = (s2, c) else { return self.gap("Case 11(b)") };
        if c.ty() == Type0 && eff(c.len + 4) == s2.len + 2 && self.no_q_between(c.len + 1, c.len + 3) {
            self.note("Case 11(b)");
            self.add(&c, 4);
            self.add(&s2, 2);
            return self.case2(Lim::LenLe(eff(c.len + 4)));
        }
        self.gap("Case 11(b)")
    }

    fn case11_cd(&mut self, lim: Lim, ty: StringType, boxes: usize) -> Found {
        let s1 = self.longest(2, only(Singular), |s| lim.admits(s, 1));
        let c = self.longest(1, only(Singular), |_| true);
        let (Some(s1), Some(c)) = (s1, c) else { return self.gap("Case 11(c/d)") };
        let top = eff(c.len + boxes);
        if c.ty() != ty || top > s1.len + 1 || !self.no_q_between(c.len + 1, 3 * s1.len) || top < 2 {
            return self.gap("Case 11(c/d)");
        }
        let Some(s2) = self.exists(2, Singular, |s| s.slot != s1.slot && s.len + 2 == top) else {
            return self.gap("Case 11(c/d) finds no second string");
        };
        self.note(if boxes == 4 { "Case 11(c)" } else { "Case 11(d)" });
        self.add(&c, boxes);
        self.add(&s1, 1);
        self.add(&s2, 1);
        if boxes == 4 {
            self.case2(Lim::LenLe(top))
        } else {
            self.case3()
        }
    }

    fn case11_c(&mut self, lim: Lim) -> Found {
        self.case11_cd(lim, Type0, 4)
    }

    fn case11_d(&mut self, lim: Lim) -> Found {
        self.case11_cd(lim, TypeII, 3)
    }

    fn case11_e(&mut self, lim: Lim) -> Found {
        let s2 = self.longest(2, only(Singular), |s| lim.admits(s, 2));
        let c = self.longest(1, only(Singular), |_| true);
        let (Some(s2), Some(c)) = (s2, c) else { return self.gap("Case 11(e)") };
        if c.ty() == TypeI && eff(c.len + 2) == s2.len + 2 {
            self.note("Case 11(e)");
            self.add(&c, 2);
            self.add(&s2, 2);
            return self.case4_ignoring(c.len);
        }
        self.gap("Case 11(e)")
    }

    fn case11_f(&mut self, lim: Lim) -> Found {
        let s2 = self.longest(2, only(Singular), |s| lim.admits(s, 1));
        let c = self.longest(1, only(Singular), |_| true);
        let (Some(s2), Some(c)) = (s2, c) else { return self.gap("Case 11(f)") };
        if c.ty() != Type0 && eff(c.len + 2) == s2.len + 1 {
            self.note("Case 11(f)");
            self.add(&c, 2);
            self.add(&s2, 1);
            return self.case5(Lim::Free);
        }
        self.gap("Case 11(f)")
    }

    fn case11_g(&mut self, lim: Lim) -> Found {
        let s2 = self.longest(2, only(Singular), |s| lim.admits(s, 1));
        let c = self.longest(1, only(Q), |_| true);
        let (Some(s2), Some(c)) = (s2, c) else { return self.gap("Case 11(g)") };
        if c.ty() == Type0 && eff(c.len + 1) == s2.len + 1 {
            self.note("Case 11(g)");
            self.add(&c, 1);
            self.add(&s2, 1);
            return self.case7();
        }
        self.gap("Case 11(g)")
    }

    fn case11_h(&mut self, lim: Lim) -> Found {
        let Some(s2) = self.longest(2, only(Singular), |s| lim.admits(s, 1)) else {
            return self.gap("Case 11(h)");
        };
        let l2 = s2.len;
        let keep = |c: &Cand| match c.sing {
            Singular => eff(c.len + 2) < l2 + 1,
            Q => eff(c.len + 1) < l2 + 1,
            _ => false,
        };
        let Some(c) = self.longest(1, rank_sq, keep) else { return self.gap("Case 11(h)") };
        self.note("Case 11(h)");
        if c.sing == Singular {
            self.add(&c, 2);
            self.add(&s2, 1);
            self.case5(Lim::Free)
        } else {
            self.add(&c, 1);
            self.add(&s2, 1);
            self.case7()
        }
    }

    fn case12(&mut self) -> Found {
        self.note("Case 12");
        let Some(mut c) = self.longest(1, rank_sq, |_| true) else {
            return self.gap("Case 12 finds no string");
        };
        let has_s2 = |p: &Plan, want: usize| p.exists(2, Singular, |s| s.len == want).is_some();
        if c.sing == Q {
            let e = c.eff();
            let reset = self.cands(1).into_iter().find(|s| {
                s.sing == Singular
                    && s.ty() == Type0
                    && s.eff() + 1 == e
                    && eff(s.len + 5) >= 2
                    && has_s2(self, eff(s.len + 5) - 2)
            });
            if let Some(s) = reset {
                self.note("Case 12 reset to type-0");
                c = s;
            } else if c.ty() == TypeI {
                let reset = self.cands(1).into_iter().find(|s| {
                    s.sing == Singular
                        && s.ty() == TypeII
                        && s.len + 1 == c.len
                        && eff(s.len + 4) >= 2
                        && has_s2(self, eff(s.len + 4) - 2)
                });
                if let Some(s) = reset {
                    self.note("Case 12 reset to type-II");
                    c = s;
                }
            }
        }
        let s2_with =
            |p: &Plan, top: usize, off: usize| top.checked_sub(off).and_then(|n| p.exists(2, Singular, |s| s.len == n));
        let clauses: Vec<BoxedClause<'a>> = vec![
            Box::new(move |p| match s2_with(p, eff(c.len + 5), 2) {
                Some(s) if c.sing == Singular && c.ty() == Type0 => {
                    p.add(&c, 5);
                    p.add(&s, 2);
                    p.case2(Lim::LenLe(eff(c.len + 5)))
                }
                _ => p.gap("Case 12 type-0"),
            }),
            Box::new(move |p| match s2_with(p, eff(c.len + 4), 2) {
                Some(s) if c.sing == Singular && c.ty() == TypeII => {
                    p.add(&c, 4);
                    p.add(&s, 2);
                    p.case3()
                }
                _ => p.gap("Case 12 type-II"),
            }),
            Box::new(move |p| match s2_with(p, eff(c.len + 3), 1) {
                Some(s) if c.sing == Singular && c.ty() == TypeI => {
                    p.add(&c, 3);
                    p.add(&s, 1);
                    p.case5(Lim::Free)
                }
                _ => p.gap("Case 12 type-I (Case 5)"),
            }),
            Box::new(move |p| match s2_with(p, eff(c.len + 3), 2) {
                Some(s) if c.sing == Singular && c.ty() == TypeI => {
                    p.add(&c, 3);
                    p.add(&s, 2);
                    p.case4_ignoring(c.len)
                }
                _ => p.gap("Case 12 type-I (Case 4)"),
            }),
            Box::new(move |p| {
                if c.sing != Singular || c.ty() == TypeI {
                    return p.gap("Case 12 type-0/II (Case 10)");
                }
                let top = eff(c.len + 2);
                let s = s2_with(p, top, 2).or_else(|| top.checked_sub(1).and_then(|n| p.exists(2, Q, |s| s.len == n)));
                match s {
                    Some(s) => {
                        p.add(&c, 2);
                        p.case10(Lim::Is(s.slot))
                    }
                    None => p.gap("Case 12 type-0/II (Case 10)"),
                }
            }),
            Box::new(move |p| match s2_with(p, eff(c.len + 2), 1) {
                Some(s) if c.sing == Q && c.ty() == Type0 => {
                    p.add(&c, 2);
                    p.add(&s, 1);
                    p.case7()
                }
                _ => p.gap("Case 12 q-singular type-0"),
            }),
            Box::new(move |p| {
                let top = eff(c.len + 2);
                let ok = s2_with(p, top, 2).is_some() || s2_with(p, top, 1).is_some();
                if c.sing == Q && c.ty() != Type0 && ok {
                    p.add(&c, 2);
                    p.case11(Lim::Free)
                } else {
                    p.gap("Case 12 q-singular type-I/II")
                }
            }),
            Box::new(move |p| {
                if c.sing == Singular {
                    p.note("Case 12 fallback");
                    p.add(&c, 2);
                    p.case10(Lim::LenLt(eff(c.len + 2)))
                } else {
                    p.note("Case 12 fallback");
                    p.add(&c, 1);
                    p.case11(Lim::Free)
                }
            }),
        ];
        for clause in &clauses {
            let r = self.attempt(clause);
            if r.is_ok() {
                return r;
            }
        }
        self.gap("no Case 12 clause applies")
    }

    fn case13(&mut self) -> Found {
        self.note("Case 13");
        let Some(mut c) = self.longest(1, rank3, |_| true) else {
            return self.gap("Case 13 finds no string");
        };
        let has_s2 = |p: &Plan, top: usize| top >= 2 && p.exists(2, Singular, |s| s.len + 2 == top).is_some();
        if c.sing != Singular {
            let e = c.eff();
            let r1 = self
                .cands(1)
                .into_iter()
                .find(|s| s.sing == Singular && s.ty() == Type0 && s.eff() + 1 == e && has_s2(self, eff(s.len + 6)));
            let r2 = (c.sing == QQ && c.ty() == TypeII)
                .then(|| {
                    self.cands(1)
                        .into_iter()
                        .find(|s| s.sing == Singular && s.len + 4 == c.len && has_s2(self, eff(s.len + 6)))
                })
                .flatten();
            let r3 = (c.sing == Q && c.ty() == TypeI)
                .then(|| {
                    self.cands(1)
                        .into_iter()
                        .find(|s| s.sing == Singular && s.len + 1 == c.len && has_s2(self, eff(s.len + 5)))
                })
                .flatten();
            if let Some(s) = r1.or(r2).or(r3) {
                self.note("Case 13 reset");
                c = s;
            }
        }
        if c.sing == QQ {
            self.add(&c, 1);
            return self.case12();
        }
        let s2_with =
            |p: &Plan, top: usize, off: usize| top.checked_sub(off).and_then(|n| p.exists(2, Singular, |s| s.len == n));
        let q2_with =
            |p: &Plan, top: usize, off: usize| top.checked_sub(off).and_then(|n| p.exists(2, Q, |s| s.len == n));
        let sing = c.sing == Singular;
        let clauses: Vec<BoxedClause<'a>> = vec![
            Box::new(move |p| match s2_with(p, eff(c.len + 6), 2) {
                Some(s) if sing && c.ty() == Type0 => {
                    p.add(&c, 6);
                    p.add(&s, 2);
                    p.case2(Lim::LenLe(eff(c.len + 6)))
                }
                _ => p.gap("Case 13 type-0"),
            }),
            Box::new(move |p| match s2_with(p, eff(c.len + 5), 2) {
                Some(s) if sing && c.ty() == TypeII => {
                    p.add(&c, 5);
                    p.add(&s, 2);
                    p.case3()
                }
                _ => p.gap("Case 13 type-II"),
            }),
            Box::new(move |p| match s2_with(p, eff(c.len + 4), 1) {
                Some(s) if sing && c.ty() == TypeI => {
                    p.add(&c, 4);
                    p.add(&s, 1);
                    p.case5(Lim::Free)
                }
                _ => p.gap("Case 13 type-I (Case 5)"),
            }),
            Box::new(move |p| match s2_with(p, eff(c.len + 4), 2) {
                Some(s) if sing && c.ty() == TypeI => {
                    p.add(&c, 4);
                    p.add(&s, 2);
                    p.case4_ignoring(c.len)
                }
                _ => p.gap("Case 13 type-I (Case 4)"),
            }),
            Box::new(move |p| {
                let top = eff(c.len + 3);
                let s = s2_with(p, top, 2).or_else(|| q2_with(p, top, 1));
                match s {
                    Some(s) if sing && c.ty() == Type0 => {
                        p.add(&c, 3);
                        p.case10(Lim::Is(s.slot))
                    }
                    _ => p.gap("Case 13 type-0 (Case 10)"),
                }
            }),
            Box::new(move |p| {
                if !sing {
                    return p.gap("Case 13 singular (Case 10)");
                }
                let top = eff(c.len + 3);
                let fits = |s: &Cand| match s.sing {
                    Singular => top >= s.len + 3,
                    Q => top >= s.len + 2,
                    _ => false,
                };
                if p.cands(2).iter().any(fits) {
                    p.add(&c, 3);
                    p.case10(Lim::LenLt(top))
                } else {
                    p.gap("Case 13 singular (Case 10)")
                }
            }),
            Box::new(move |p| match s2_with(p, eff(c.len + 3), 1) {
                Some(s) if c.sing == Q && c.ty() == Type0 => {
                    p.add(&c, 3);
                    p.add(&s, 1);
                    p.case7()
                }
                _ => p.gap("Case 13 q-singular type-0"),
            }),
            Box::new(move |p| {
                let top = eff(c.len + 2);
                let ok = s2_with(p, top, 1).is_some() || s2_with(p, top, 2).is_some();
                if c.sing == Q && c.ty() == TypeII && ok {
                    p.add(&c, 2);
                    p.case11(Lim::LenEq(top))
                } else {
                    p.gap("Case 13 q-singular type-II")
                }
            }),
            Box::new(move |p| {
                let top = eff(c.len + 2);
                let ok = p.cands(2).iter().any(|s| s.sing == Singular && top >= s.len + 2);
                if c.sing == Q && ok {
                    p.note("Case 13 fallback");
                    p.add(&c, 2);
                    p.case11(Lim::LenLt(top))
                } else {
                    p.gap("Case 13 q-singular")
                }
            }),
        ];
        for clause in &clauses {
            let r = self.attempt(clause);
            if r.is_ok() {
                return r;
            }
        }
        self.gap("no Case 13 clause applies")
    }

    fn two_longest_singular(&self) -> (Option<Cand>, Option<Cand>) {
        let mut v: Vec<Cand> = self.cands(2).into_iter().filter(|c| c.sing == Singular).collect();
        v.sort_by_key(|c| std::cmp::Reverse(c.len));
        let first = v.first().copied();
        // The second zero-length string is a distinct new string.
        let second = match v.get(1).copied() {
            Some(c) if c.slot != first.map_or(c.slot, |f| f.slot) => Some(c),
            _ => first.filter(|f| f.len == 0).map(|f| match f.slot {
                Slot::New(j) => Cand { slot: Slot::New(j + 1), ..f },
                Slot::Old(_) => f,
            }),
        };
        (first, second)
    }

    fn case14(&mut self) -> Found {
        self.note("Case 14");
        let clauses: [fn(&mut Plan<'a>) -> Found; 8] = [
            Plan::case14_a,
            Plan::case14_b,
            Plan::case14_c,
            Plan::case14_d,
            Plan::case14_e,
            Plan::case14_f,
            Plan::case14_g,
            Plan::case14_h,
        ];
        for clause in clauses {
            let r = self.attempt(clause);
            if r.is_ok() {
                return r;
            }
        }
        self.gap("no Case 14 clause applies")
    }

    fn case14_a(&mut self) -> Found {
        let (Some(s1), Some(s2)) = self.two_longest_singular() else { return self.gap("Case 14(a)") };
        if s1.len != s2.len {
            return self.gap("Case 14(a)");
        }
        let Some(c) = self.exists(1, Singular, |c| eff(c.len + 6) == s1.len + 2) else {
            return self.gap("Case 14(a)");
        };
        self.note("Case 14(a)");
        self.add(&c, 6);
        self.add(&s1, 2);
        self.add(&s2, 2);
        self.finish()
    }

    /// A singular `ν̃(2)` string of length `l1 − 1` distinct from the longest.
    fn shorter_partner(&self, s1: &Cand) -> Option<Cand> {
        if s1.len == 0 {
            return None;
        }
        self.exists(2, Singular, |s| s.slot != s1.slot && s.len + 1 == s1.len)
    }

    fn case14_bcd(&mut self, ty: StringType, boxes: usize) -> Found {
        let Some(s1) = self.longest(2, only(Singular), |_| true) else { return self.gap("Case 14") };
        let Some(s2) = self.shorter_partner(&s1) else { return self.gap("Case 14") };
        let Some(mut c) = self.exists(1, Singular, |c| c.ty() == ty && eff(c.len + boxes) == s1.len + 1) else {
            return self.gap("Case 14");
        };
        let mut boxes = boxes;
        if ty == TypeI {
            if let Some(r) = self.exists(1, Singular, |r| r.ty() == TypeII && r.len + 1 == c.len) {
                self.note("Case 14 reset to type-II");
                c = r;
                boxes = 5;
            }
        }
        self.note(format!("Case 14 (+{boxes})"));
        self.add(&c, boxes);
        self.add(&s1, 1);
        self.add(&s2, 2);
        match boxes {
            6 => self.case2(Lim::LenLe(eff(c.len + 6))),
            5 => self.case3(),
            _ => self.case4_ignoring(c.len),
        }
    }

    fn case14_b(&mut self) -> Found {
        self.case14_bcd(Type0, 6)
    }

    fn case14_c(&mut self) -> Found {
        self.case14_bcd(TypeII, 5)
    }

    fn case14_d(&mut self) -> Found {
        self.case14_bcd(TypeI, 4)
    }

    fn case14_e(&mut self) -> Found {
        let (Some(s1), Some(s2)) = self.two_longest_singular() else { return self.gap("Case 14(e)") };
        if s1.len != s2.len {
            return self.gap("Case 14(e)");
        }
        let Some(c) = self.exists(1, Singular, |c| c.ty() == TypeI && eff(c.len + 4) == s1.len + 1) else {
            return self.gap("Case 14(e)");
        };
        self.note("Case 14(e)");
        self.add(&c, 4);
        self.add(&s1, 1);
        self.add(&s2, 1);
        self.case5(Lim::Free)
    }

    fn case14_f(&mut self) -> Found {
        let Some(s1) = self.longest(2, only(Singular), |_| true) else { return self.gap("Case 14(f)") };
        let Some(c) = self.exists(1, Singular, |c| eff(c.len + 3) == s1.len + 1) else {
            return self.gap("Case 14(f)");
        };
        self.note("Case 14(f)");
        self.add(&c, 3);
        self.add(&s1, 1);
        let top = eff(c.len + 3);
        let lim = if c.ty() == Type0 { Lim::LenLe(top) } else { Lim::LenLt(top) };
        self.case10(lim)
    }

    fn case14_g(&mut self) -> Found {
        let Some(s1) = self.longest(2, only(Singular), |_| true) else { return self.gap("Case 14(g)") };
        let Some(c) = self.exists(1, Singular, |c| c.ty() == TypeII && eff(c.len + 2) == s1.len + 1) else {
            return self.gap("Case 14(g)");
        };
        self.note("Case 14(g)");
        self.add(&c, 2);
        self.add(&s1, 1);
        self.case11(Lim::Free)
    }

    fn case14_h(&mut self) -> Found {
        let r = self.attempt(|p| p.case14_h_singular());
        if r.is_ok() {
            return r;
        }
        let r = self.attempt(|p| p.case14_q());
        if r.is_ok() {
            return r;
        }
        self.note("Case 14 fallback");
        let Some(s1) = self.longest(2, only(Singular), |_| true) else { return self.gap("Case 14 fallback") };
        self.add(&s1, 1);
        self.case13()
    }

    fn case14_h_singular(&mut self) -> Found {
        let Some(s1) = self.longest(2, only(Singular), |_| true) else { return self.gap("Case 14(h)") };
        let Some(mut c) = self.exists(1, Singular, |c| c.ty() == TypeI && eff(c.len + 1) == s1.len + 1) else {
            return self.gap("Case 14(h)");
        };
        let mut boxes = 1;
        if let Some(r) = self.exists(1, Singular, |r| r.ty() == TypeII && r.len + 1 == c.len) {
            self.note("Case 14(h) reset to type-II");
            c = r;
            boxes = 2;
        }
        self.note("Case 14(h)");
        self.add(&c, boxes);
        self.add(&s1, 1);
        if boxes == 1 {
            self.case12()
        } else {
            self.case11(Lim::Free)
        }
    }

    /// The q-singular and qq-singular clauses of Case 14.
    fn case14_q(&mut self) -> Found {
        let (Some(s1), s2) = self.two_longest_singular() else { return self.gap("Case 14 q") };
        let l1 = s1.len;
        let same = s2.is_some_and(|s| s.len == l1);
        let eligible = |c: &Cand| match (c.sing, c.ty()) {
            (Q, Type0) => (same && eff(c.len + 3) == l1 + 1) || eff(c.len + 2) == l1 + 1,
            (Q, TypeI) => eff(c.len + 2) == l1 + 1,
            (Q, TypeII) => eff(c.len + 1) == l1 + 1,
            (QQ, Type0) => eff(c.len + 1) == l1 + 1,
            _ => false,
        };
        let Some(c) = self.longest(
            1,
            |s| match s {
                Q => Some(0),
                QQ => Some(1),
                _ => None,
            },
            eligible,
        ) else {
            return self.gap("Case 14 finds no q-singular string");
        };
        let reset_ok = |p: &Plan, r: &Cand, boxes: usize| {
            let top = eff(r.len + boxes);
            top >= 2 && top == l1 + 1 && p.shorter_partner(&s1).is_some_and(|s| s.len + 2 == top)
        };
        let reset = if matches!((c.sing, c.ty()), (Q | QQ, Type0) | (Q, TypeI)) {
            self.cands(1)
                .into_iter()
                .find(|r| r.sing == Singular && r.ty() == Type0 && r.eff() + 1 == c.eff() && reset_ok(self, r, 6))
        } else if c.sing == Q && c.ty() == TypeII {
            self.cands(1).into_iter().find(|r| r.len + 4 == c.len && reset_ok(self, r, 6))
        } else {
            None
        };
        let reset = reset.or_else(|| {
            (c.sing == Q && c.ty() == Type0)
                .then(|| self.cands(1).into_iter().find(|r| r.len + 2 == c.len && reset_ok(self, r, 5)))
                .flatten()
        });
        if reset.is_some() {
            self.note("Case 14 q reset");
            return self.case14_bcd(Type0, 6).or_else(|_| self.case14_bcd(TypeII, 5));
        }
        if c.sing == Q && c.ty() == Type0 && same && c.len >= 3 && eff(c.len + 3) == l1 + 1 {
            let s2 = s2.expect("two strings");
            let r = self.attempt(|p| {
                p.note("Case 14 q type-0");
                p.add(&c, 3);
                p.add(&s1, 1);
                p.add(&s2, 1);
                p.case7()
            });
            if r.is_ok() {
                return r;
            }
        }
        match (c.sing, c.ty()) {
            (Q, Type0 | TypeI) if eff(c.len + 2) == l1 + 1 => {
                self.note("Case 14 q type-0/I");
                self.add(&c, 2);
                self.add(&s1, 1);
                self.case11(Lim::Free)
            }
            (Q, TypeII) => {
                self.note("Case 14 q type-II");
                self.add(&c, 1);
                self.add(&s1, 1);
                self.case12()
            }
            (QQ, Type0) if c.len >= 4 => {
                self.note("Case 14 qq type-0");
                self.add(&c, 1);
                self.add(&s1, 1);
                self.case12()
            }
            _ => self.gap("Case 14 q clauses do not apply"),
        }
    }
}

fn check_weight(rc: &RiggedConfiguration, b: Letter) -> Result<(), InverseError> {
    rc.validate()?;
    if !(rc.lambda() + crystal::weight(b)).is_dominant() {
        return Err(InverseError::NotDominant { letter: b });
    }
    Ok(())
}

/// One box-adding step: the configuration at length `L` whose `δ` returns
/// `b` and `rc`.
pub fn delta_theta_inv(rc: &RiggedConfiguration, b: Letter) -> Result<InverseOutcome, InverseError> {
    check_weight(rc, b)?;
    let mut last = None;
    for frame in FRAMES {
        let mut plan = Plan::new(rc, b, frame);
        let r = plan.run();
        if r.is_ok() {
            last = Some((plan, r));
            break;
        }
        if last.is_none() {
            last = Some((plan, r));
        }
    }
    let (plan, r) = last.expect("at least one frame");
    match r {
        Ok(found) => {
            Ok(InverseOutcome { rc: found, plan: BoxAddPlan { additions: plan.additions(), clauses: plan.clauses } })
        }
        Err(reason) => {
            let trace = format!("{reason}; clauses: {}", plan.clauses.join(", "));
            if reason.contains("rigging") || reason.contains("vacancy") {
                Err(InverseError::Mismatch { letter: b, trace })
            } else {
                Err(InverseError::NoRule { letter: b, trace })
            }
        }
    }
}

/// The preimage of `(b, rc)` found by scanning every configuration of the
/// right weight at length `L`.
pub fn preimage_search(rc: &RiggedConfiguration, b: Letter) -> Result<RiggedConfiguration, InverseError> {
    check_weight(rc, b)?;
    let lam = rc.lambda() + crystal::weight(b);
    let big_l = rc.big_l + 1;
    let all = enumerate_rc_bounded(lam, big_l, usize::MAX).expect("unbounded enumeration");
    all.into_iter()
        .find(|cand| delta_theta(cand).is_ok_and(|o| o.letter == b && o.new_rc == *rc))
        .ok_or_else(|| InverseError::NoRule { letter: b, trace: format!("no preimage of {rc} in RC({lam}, {big_l})") })
}

/// `Φ⁻¹`: box adding over the letters of `p` from right to left.
pub fn phi_inv(p: &Path) -> Result<RiggedConfiguration, InverseError> {
    let mut rc = RiggedConfiguration::empty(0);
    for &b in p.letters().iter().rev() {
        rc = delta_theta_inv(&rc, b)?.rc;
    }
    Ok(rc)
}

/// `Φ⁻¹` that crosses clause gaps with [`preimage_search`], recording how
/// each letter (right to left) was inverted.
pub fn phi_inv_with_fallback(p: &Path) -> Result<(RiggedConfiguration, Vec<StepSource>), InverseError> {
    let mut rc = RiggedConfiguration::empty(0);
    let mut sources = Vec::with_capacity(p.len());
    for &b in p.letters().iter().rev() {
        match delta_theta_inv(&rc, b) {
            Ok(o) => {
                rc = o.rc;
                sources.push(StepSource::Clause(o.plan));
            }
            Err(e @ InverseError::NotDominant { .. }) | Err(e @ InverseError::Invalid(_)) => return Err(e),
            Err(gap) => {
                rc = preimage_search(&rc, b)?;
                sources.push(StepSource::Search(gap));
            }
        }
    }
    Ok((rc, sources))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bijection::phi;

    fn rc(big_l: usize, nu1: &[(usize, i64)], nu2: &[(usize, i64)]) -> RiggedConfiguration {
        let s = |v: &[(usize, i64)]| v.iter().map(|&(l, r)| RcString::new(l, r)).collect();
        RiggedConfiguration::new(big_l, s(nu1), s(nu2))
    }

    #[test]
    fn letter_one_only_lengthens() {
        let out = delta_theta_inv(&RiggedConfiguration::empty(0), Letter::ONE).unwrap();
        assert_eq!(out.rc, RiggedConfiguration::empty(1));
        assert!(out.plan.additions.is_empty());
    }

    #[test]
    fn empty_path_gives_empty_configuration() {
        assert_eq!(phi_inv(&Path::new(vec![])).unwrap(), RiggedConfiguration::empty(0));
    }

    #[test]
    fn search_and_clauses_invert_the_walkthrough_step() {
        let first = rc(4, &[(6, 1), (2, 0)], &[(2, 0), (2, 0), (1, 0), (1, 1)]);
        let o = delta_theta(&first).unwrap();
        assert_eq!(o.letter, Letter::boxed(7).unwrap());
        assert_eq!(preimage_search(&o.new_rc, o.letter).unwrap(), first);
        assert_eq!(delta_theta_inv(&o.new_rc, o.letter).unwrap().rc, first);
    }

    #[test]
    fn non_dominant_letter_is_rejected() {
        let e = delta_theta_inv(&RiggedConfiguration::empty(0), Letter::boxed(2).unwrap()).unwrap_err();
        assert!(matches!(e, InverseError::NotDominant { .. }));
    }

    #[test]
    fn fallback_round_trips_a_path() {
        let p = Path::from_numbers(&[7, 12, 2, 1]);
        let (back, _) = phi_inv_with_fallback(&p).unwrap();
        assert_eq!(phi(&back).unwrap(), p);
    }
}
