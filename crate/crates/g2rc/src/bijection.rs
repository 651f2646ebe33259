//! The forward step `δ` and the map `Φ` from rigged configurations to paths.
//!
//! One application of `δ` marks boxes `[1]`, `[2]`, ... in the two partitions
//! following the crystal arrows out of the letter `1`, stops when a mark cannot
//! be placed, returns the letter reached, deletes the marked boxes and resets
//! the riggings of the shortened strings.
//!
//! Marks land on the rightmost unmarked box of a string, so the marked boxes
//! of a string always form a suffix. Strings are addressed by their index in
//! the canonical order of the input configuration; "length" of a selected
//! string always means its length before deletion.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::crystal::{self, Letter};
use crate::error::StepError;
use crate::paths::Path;
use crate::rigged_config::{canonical_order, eff, RcString, RiggedConfiguration, Singularity, StringType};

use Singularity::{Deeper, Singular, Q, QQ};
use StringType::{Type0, TypeI, TypeII};

/// A single marked box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Mark {
    /// Mark number `1..=10`.
    pub label: u8,
    /// Partition index `1` or `2`.
    pub a: usize,
    /// Index of the string in the canonical order of `ν(a)`.
    pub string: usize,
    /// One-based column of the box.
    pub col: usize,
}

/// The working state of one run of the box marking.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MarkingState {
    pub marks: Vec<Mark>,
    /// `(partition, string index)` selected by each mark label.
    pub selected: BTreeMap<u8, (usize, usize)>,
    /// `ν(1)` strings closed to further marking.
    pub inactivated: Vec<usize>,
    /// Rule clauses in the order they fired.
    pub events: Vec<String>,
}

impl MarkingState {
    pub fn mark(&self, label: u8) -> Option<&Mark> {
        self.marks.iter().find(|m| m.label == label)
    }

    /// Partition holding mark `label`.
    pub fn part_of(&self, label: u8) -> Option<usize> {
        self.mark(label).map(|m| m.a)
    }

    pub fn sel(&self, label: u8) -> Option<(usize, usize)> {
        self.selected.get(&label).copied()
    }

    /// Labels marked in string `k` of `ν(a)`, rightmost first.
    pub fn labels_in(&self, a: usize, k: usize) -> Vec<u8> {
        let mut v: Vec<&Mark> = self.marks.iter().filter(|m| m.a == a && m.string == k).collect();
        v.sort_by_key(|m| std::cmp::Reverse(m.col));
        v.into_iter().map(|m| m.label).collect()
    }

    /// One line per mark in the form `[n] nu(a) len:rig col c`.
    pub fn describe(&self, rc: &RiggedConfiguration) -> String {
        let mut out = String::new();
        for m in &self.marks {
            let s = rc.strings(m.a)[m.string];
            let _ = write!(out, "[{}]nu{}:{}:{}@{} ", m.label, m.a, s.len, s.rig, m.col);
        }
        if !self.events.is_empty() {
            let _ = write!(out, "| {}", self.events.join(", "));
        }
        out.trim_end().to_string()
    }
}

/// Result of one application of `δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaOutcome {
    pub letter: Letter,
    pub new_rc: RiggedConfiguration,
    pub marking: MarkingState,
    /// `α1(2) − α̃1(2)`: strings of `ν(2)` lost in the step.
    pub delta_alpha: i64,
}

/// Where the marking stopped: either a letter or a request to continue.
type Stage = Result<(), Letter>;

struct Engine<'a> {
    rc: &'a RiggedConfiguration,
    /// Vacancy numbers of every string, indexed like `rc.strings(a)`.
    vac: [Vec<i64>; 2],
    consumed: [Vec<usize>; 2],
    /// Columns `≤ floor` of `ν(1)` cannot be marked.
    floor: usize,
    st: MarkingState,
}

impl<'a> Engine<'a> {
    fn new(rc: &'a RiggedConfiguration) -> Engine<'a> {
        let vac = [1, 2].map(|a| rc.strings(a).iter().map(|s| rc.vacancy(a, s.len)).collect::<Vec<_>>());
        let consumed = [vec![0; rc.nu1.len()], vec![0; rc.nu2.len()]];
        Engine { rc, vac, consumed, floor: 0, st: MarkingState::default() }
    }

    fn s(&self, a: usize, k: usize) -> RcString {
        self.rc.strings(a)[k]
    }

    fn len(&self, a: usize, k: usize) -> usize {
        self.s(a, k).len
    }

    fn sing(&self, a: usize, k: usize) -> Singularity {
        Singularity::of(self.vac[a - 1][k], self.s(a, k).rig)
    }

    fn ty(&self, k: usize) -> StringType {
        StringType::of(self.len(1, k))
    }

    fn eff(&self, k: usize) -> usize {
        eff(self.len(1, k))
    }

    fn count(&self, a: usize) -> usize {
        self.rc.strings(a).len()
    }

    fn next_col(&self, a: usize, k: usize) -> usize {
        self.len(a, k) - self.consumed[a - 1][k]
    }

    fn unmarked(&self, a: usize, k: usize) -> bool {
        self.consumed[a - 1][k] == 0
    }

    fn inactive(&self, k: usize) -> bool {
        self.st.inactivated.contains(&k)
    }

    /// Whether the next box of string `k` of `ν(a)` may receive a mark.
    fn can_mark(&self, a: usize, k: usize) -> bool {
        let col = self.next_col(a, k);
        if col == 0 {
            return false;
        }
        if a == 2 {
            return true;
        }
        if col <= self.floor || self.inactive(k) {
            return false;
        }
        // No mark may sit north or northwest of an earlier mark in ν(1).
        !self.st.marks.iter().any(|m| m.a == 1 && m.string > k && col <= m.col)
    }

    fn mark(&mut self, label: u8, a: usize, k: usize) -> Result<(), StepError> {
        if !self.can_mark(a, k) {
            return Err(self.uncovered(format!("[{label}] cannot be placed in string {k} of nu({a})")));
        }
        let col = self.next_col(a, k);
        self.st.marks.push(Mark { label, a, string: k, col });
        self.consumed[a - 1][k] += 1;
        self.st.selected.insert(label, (a, k));
        Ok(())
    }

    /// Marks the box immediately left of mark `of`.
    fn mark_left_of(&mut self, label: u8, of: u8) -> Result<(), StepError> {
        let m = *self.st.mark(of).expect("mark to the right exists");
        if self.next_col(m.a, m.string) + 1 != m.col {
            return Err(self.uncovered(format!("box left of [{of}] is not free for [{label}]")));
        }
        self.mark(label, m.a, m.string)
    }

    fn unmark(&mut self, label: u8) {
        if let Some(pos) = self.st.marks.iter().position(|m| m.label == label) {
            let m = self.st.marks.remove(pos);
            self.consumed[m.a - 1][m.string] -= 1;
            self.st.selected.remove(&label);
        }
    }

    fn note(&mut self, e: impl Into<String>) {
        self.st.events.push(e.into());
    }

    fn uncovered(&self, detail: String) -> StepError {
        StepError::Uncovered { detail, trace: self.st.describe(self.rc) }
    }

    /// The string among `cands` with the smallest `key`; among ties an
    /// unmarked string, and then the lowest drawn one, is preferred.
    fn pick<K: Ord>(&self, a: usize, cands: impl Iterator<Item = usize>, key: impl Fn(usize) -> K) -> Option<usize> {
        cands.min_by(|&x, &y| {
            key(x).cmp(&key(y)).then((!self.unmarked(a, x)).cmp(&!self.unmarked(a, y))).then(y.cmp(&x))
        })
    }

    /// The shortest string among `cands`, singular before q-singular before
    /// qq-singular at equal length.
    fn shortest(&self, a: usize, cands: Vec<usize>) -> Option<usize> {
        self.pick(a, cands.into_iter(), |k| (self.len(a, k), Self::sing_rank(self.sing(a, k))))
    }

    /// Like [`Self::shortest`], but among equally short strings the one
    /// holding mark `partner` is taken first.
    fn shortest_near(&self, a: usize, cands: Vec<usize>, partner: u8) -> Option<usize> {
        let home = self.st.sel(partner).filter(|&(pa, _)| pa == a).map(|(_, k)| k);
        self.pick(a, cands.into_iter(), |k| (self.len(a, k), Self::sing_rank(self.sing(a, k)), Some(k) != home))
    }

    /// Fresh strings of `ν(a)` (no box marked yet) accepted by `pred`.
    fn fresh(&self, a: usize, pred: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.count(a)).filter(|&k| self.unmarked(a, k) && self.can_mark(a, k) && pred(k)).collect()
    }

    /// Strings of `ν(a)` with a free box, marked or not, accepted by `pred`.
    fn open(&self, a: usize, pred: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.count(a)).filter(|&k| self.can_mark(a, k) && pred(k)).collect()
    }

    /// Whether `ν(2)` has a singular string of length `len`.
    fn nu2_has_singular(&self, len: usize) -> bool {
        (0..self.count(2)).any(|k| self.len(2, k) == len && self.sing(2, k) == Singular)
    }

    fn sing_rank(s: Singularity) -> u8 {
        match s {
            Singular => 0,
            Q => 1,
            QQ => 2,
            Deeper => 3,
        }
    }

    fn lbl(a: usize, k: usize, e: &Engine) -> String {
        let s = e.s(a, k);
        format!("nu{a}:{}:{}", s.len, s.rig)
    }

    // ---------------------------------------------------------------- marks

    fn run(&mut self) -> Result<Letter, StepError> {
        match self.marks_from_one()? {
            Ok(()) => Err(self.uncovered("marking ended without a letter".into())),
            Err(b) => Ok(b),
        }
    }

    fn marks_from_one(&mut self) -> Result<Stage, StepError> {
        // [1]
        let Some(k1) = self.shortest(2, self.fresh(2, |k| self.sing(2, k) == Singular)) else {
            return Ok(Err(Letter::ONE));
        };
        self.mark(1, 2, k1)?;
        let i1 = self.len(2, k1);
        self.floor = 3 * (i1 - 1);

        // [2]
        let Some(k2) = self.select_by_preference(i1, &[]) else {
            return Ok(Err(letter(2)));
        };
        self.mark(2, 1, k2)?;
        self.boomerang_at_two(k2)?;

        // [3]
        if let Err(b) = self.mark_three_like(3, 2, i1, letter(3))? {
            return Ok(Err(b));
        }
        self.boomerang_at_three()?;

        // [4]
        if let Err(b) = self.mark_four(i1)? {
            return Ok(Err(b));
        }

        // [5], [6]
        if let Err(b) = self.mark_five()? {
            return Ok(Err(b));
        }
        if let Err(b) = self.mark_six()? {
            return Ok(Err(b));
        }

        // [7] .. [10]
        if let Err(b) = self.mark_seven()? {
            return Ok(Err(b));
        }
        if let Err(b) = self.mark_eight()? {
            return Ok(Err(b));
        }
        if let Err(b) = self.mark_nine()? {
            return Ok(Err(b));
        }
        Ok(Err(self.mark_ten()?))
    }

    /// The preferential search for a `ν(1)` string of effective length `base`,
    /// falling back to the shortest eligible string of length `≥ 3·base + 1`.
    fn select_by_preference(&mut self, base: usize, exclude: &[usize]) -> Option<usize> {
        const TABLE: [(Singularity, StringType); 6] =
            [(Singular, Type0), (Singular, TypeI), (Singular, TypeII), (Q, Type0), (Q, TypeI), (QQ, Type0)];
        for (rank, &(sg, ty)) in TABLE.iter().enumerate() {
            let c = self.fresh(1, |k| {
                !exclude.contains(&k) && self.eff(k) == base && self.sing(1, k) == sg && self.ty(k) == ty
            });
            if let Some(k) = self.shortest(1, c) {
                self.note(format!("pref{}:{}", rank + 1, Self::lbl(1, k, self)));
                return Some(k);
            }
        }
        // Strings of the same effective length that shadow weaker ones.
        let has = |e: &Engine, eff_len: usize, sg: Singularity, ty: StringType| {
            (0..e.count(1)).any(|j| e.eff(j) == eff_len && e.sing(1, j) == sg && e.ty(j) == ty)
        };
        let c = self.fresh(1, |k| {
            if exclude.contains(&k) || self.len(1, k) < 3 * base + 1 {
                return false;
            }
            let (sg, ty, e) = (self.sing(1, k), self.ty(k), self.eff(k));
            match (sg, ty) {
                (Singular, _) => true,
                (Q, TypeI) => !has(self, e, Singular, Type0),
                (Q, _) => true,
                (QQ, TypeII) => !has(self, e, Singular, TypeI) && !has(self, e, Singular, Type0),
                (QQ, TypeI) => !has(self, e, Singular, Type0) && !has(self, e, Q, Type0),
                (QQ, Type0) => true,
                (Deeper, _) => false,
            }
        });
        let k = self.shortest(1, c)?;
        self.note(format!("long:{}", Self::lbl(1, k, self)));
        Some(k)
    }

    /// Restarts the `[2]` marking in a boomerang string, if one exists.
    fn boomerang_at_two(&mut self, k2: usize) -> Result<(), StepError> {
        let (sg, ty, e) = (self.sing(1, k2), self.ty(k2), self.eff(k2));
        let singular_with = |eng: &Engine, eff_len: usize, types: &[StringType]| {
            eng.fresh(1, |k| eng.eff(k) == eff_len && eng.sing(1, k) == Singular && types.contains(&eng.ty(k)))
        };
        let mut cands: Vec<usize> = Vec::new();
        let rule;
        match (sg, ty) {
            (Q, TypeII) => {
                rule = "BS-1";
                if self.nu2_has_singular(e) {
                    cands = singular_with(self, e, &[Type0, TypeI]);
                }
            }
            (Q, Type0) | (Q, TypeI) | (QQ, TypeI) => {
                rule = "BS-2";
                if self.nu2_has_singular(e) || self.nu2_has_singular(e + 1) {
                    cands.extend(singular_with(self, e + 1, &[TypeII]));
                }
                if self.nu2_has_singular(e + 1) {
                    cands.extend(singular_with(self, e + 1, &[Type0, TypeI]));
                }
            }
            (QQ, Type0) => {
                rule = "BS-3";
                if self.nu2_has_singular(e + 1) {
                    cands = singular_with(self, e + 1, &[Type0, TypeI]);
                }
            }
            _ => return Ok(()),
        }
        let Some(b) = self.shortest(1, cands) else {
            return Ok(());
        };
        self.note(format!("{rule}:{}", Self::lbl(1, b, self)));
        self.unmark(2);
        self.mark(2, 1, b)
    }

    /// The `[3]` rules, also used for `[8]` with `(i1, i2)` replaced by `(i6, i7)`.
    ///
    /// `label` is the mark to place and `prev` the mark whose string plays
    /// the role of the `i2`-string; `base` plays the role of `i1`.
    fn mark_three_like(&mut self, label: u8, prev: u8, base: usize, fail: Letter) -> Result<Stage, StepError> {
        let (_, k2) = self.st.sel(prev).expect("previous mark selected");
        let (i2, sg2, ty2) = (self.len(1, k2), self.sing(1, k2), self.ty(k2));

        // Tail relocation for a type-0 qq-singular string with a singular neighbour one box longer.
        if i2 >= 3 * base && sg2 == QQ && ty2 == Type0 {
            let c = self.fresh(1, |k| self.len(1, k) == i2 + 1 && self.sing(1, k) == Singular);
            if let Some(t) = self.shortest(1, c) {
                self.note(format!("tail[{prev}][{label}]:{}", Self::lbl(1, t, self)));
                self.unmark(prev);
                self.mark(prev, 1, t)?;
                self.mark_left_of(label, prev)?;
                return Ok(Ok(()));
            }
        }

        let sq = |eng: &Engine, k: usize| matches!(eng.sing(1, k), Singular | Q);
        let search_from = |eng: &mut Engine, min_len: usize| -> Option<usize> {
            let c = eng.fresh(1, |k| eng.len(1, k) >= min_len && sq(eng, k));
            eng.shortest(1, c)
        };

        let target = if i2 + 2 == 3 * base {
            let c = self.fresh(1, |k| self.len(1, k) == 3 * base && self.sing(1, k) == Q);
            match self.shortest(1, c) {
                Some(k) => Some(k),
                None => search_from(self, 3 * base + 1),
            }
        } else if i2 + 1 == 3 * base {
            match sg2 {
                Singular => return self.mark_left_of(label, prev).map(Ok),
                _ => search_from(self, 3 * base + 1),
            }
        } else if i2 == 3 * base {
            match sg2 {
                Singular | Q => return self.mark_left_of(label, prev).map(Ok),
                _ => search_from(self, i2 + 1),
            }
        } else {
            match sg2 {
                Singular | Q => return self.mark_left_of(label, prev).map(Ok),
                _ => search_from(self, i2 + 1),
            }
        };
        match target {
            Some(k) => {
                self.note(format!("[{label}]:{}", Self::lbl(1, k, self)));
                self.mark(label, 1, k)?;
                Ok(Ok(()))
            }
            None => Ok(Err(fail)),
        }
    }

    /// Restarts the `[3]` marking in a boomerang string, if one exists.
    fn boomerang_at_three(&mut self) -> Result<(), StepError> {
        let (_, k2) = self.st.sel(2).expect("[2] selected");
        let (_, k3) = self.st.sel(3).expect("[3] selected");
        if k2 == k3 {
            return Ok(());
        }
        let (sg, ty, e) = (self.sing(1, k3), self.ty(k3), self.eff(k3));
        let cands = match (sg, ty) {
            (Q, TypeII) if self.nu2_has_singular(e) => {
                self.fresh(1, |k| self.eff(k) == e && self.sing(1, k) == Singular && self.ty(k) != TypeII)
            }
            (Q, Type0) | (Q, TypeI) if self.nu2_has_singular(e + 1) => {
                self.fresh(1, |k| self.eff(k) == e + 1 && self.sing(1, k) == Singular)
            }
            _ => return Ok(()),
        };
        let Some(b) = self.shortest(1, cands) else {
            return Ok(());
        };
        self.note(format!("BS-{}:{}", if ty == TypeII { 4 } else { 5 }, Self::lbl(1, b, self)));
        self.unmark(3);
        self.mark(3, 1, b)
    }

    /// Compares the shortest singular `ν(2)` string of length `≥ min2` with
    /// the shortest singular `ν(1)` string of length `≥ min1`.
    fn mark_four_by_comparison(&mut self, min2: usize, min1: usize) -> Result<Stage, StepError> {
        let c2 = self.fresh(2, |k| self.len(2, k) >= min2 && self.sing(2, k) == Singular);
        let k2 = self.shortest(2, c2);
        let c1 = self.fresh(1, |k| self.len(1, k) >= min1 && self.sing(1, k) == Singular);
        let k1 = self.shortest(1, c1);
        let l2 = k2.map(|k| self.len(2, k));
        let l1 = k1.map(|k| self.eff(k));
        match (l1, l2) {
            (None, None) => Ok(Err(letter(4))),
            (Some(x), Some(y)) if x < y => {
                self.note("l4:nu1");
                self.mark(4, 1, k1.unwrap()).map(Ok)
            }
            (Some(_), None) => {
                self.note("l4:nu1");
                self.mark(4, 1, k1.unwrap()).map(Ok)
            }
            _ => {
                self.note("l4:nu2");
                self.mark(4, 2, k2.unwrap()).map(Ok)
            }
        }
    }

    fn mark_four(&mut self, i1: usize) -> Result<Stage, StepError> {
        let (_, k3) = self.st.sel(3).expect("[3] selected");
        let (i3, sg3, ty3, e3) = (self.len(1, k3), self.sing(1, k3), self.ty(k3), self.eff(k3));
        match sg3 {
            Singular => match ty3 {
                Type0 => self.mark_left_of(4, 3).map(Ok),
                TypeI if e3 > i1 => self.mark_left_of(4, 3).map(Ok),
                TypeI => self.mark_four_by_comparison(e3, i3 + 1),
                TypeII => {
                    for want in [e3 - 1, e3] {
                        if want == 0 {
                            continue;
                        }
                        let c = self.fresh(2, |k| self.len(2, k) == want && self.sing(2, k) == Singular);
                        if let Some(k) = self.shortest(2, c) {
                            self.note(format!("[4]reduce:{want}"));
                            return self.mark(4, 2, k).map(Ok);
                        }
                    }
                    self.mark_left_of(4, 3).map(Ok)
                }
            },
            Q => {
                let r = self.mark_four_by_comparison(e3, i3 + 1)?;
                if r.is_ok() {
                    let (a4, k4) = self.st.sel(4).expect("[4] selected");
                    if a4 == 1 && self.ty(k4) == Type0 && ty3 == TypeI && self.eff(k4) == e3 {
                        self.note(format!("shift[4][3]:{}", Self::lbl(1, k4, self)));
                        self.unmark(4);
                        self.unmark(3);
                        self.mark(3, 1, k4)?;
                        self.mark_left_of(4, 3)?;
                    }
                }
                Ok(r)
            }
            _ => Err(self.uncovered(format!("[3] sits in a {sg3:?} string"))),
        }
    }

    fn mark_five(&mut self) -> Result<Stage, StepError> {
        let (a4, k4) = self.st.sel(4).expect("[4] selected");
        if a4 == 1 {
            let e4 = self.eff(k4);
            let c = self.fresh(2, |k| self.len(2, k) >= e4 && matches!(self.sing(2, k), Singular | Q));
            let Some(k) = self.shortest(2, c) else {
                return Ok(Err(letter(6)));
            };
            if self.sing(2, k) == Singular && self.len(2, k) == 1 {
                self.note("[5]empty");
                self.mark(5, 2, k)?;
                return Ok(Err(Letter::EMPTY));
            }
            self.mark(5, 2, k).map(Ok)
        } else {
            let i4 = self.len(2, k4);
            let c3 = self.st.marks.iter().find(|m| m.label == 3 && m.a == 1).map(|m| (m.string, m.col));
            let c = self.open(1, |k| {
                let (sg, ty, e) = (self.sing(1, k), self.ty(k), self.eff(k));
                let free = self.next_col(1, k);
                // [5] never sits in another string at or left of the column of
                // [3], and a singular string needs room for [6] on its left.
                let under_three = matches!(c3, Some((k3, col3)) if k3 != k && free <= col3);
                !under_three
                    && e >= i4
                    && matches!(sg, Singular | Q)
                    && !(sg == Q && ty != Type0 && e == i4)
                    && !(sg == Singular && free < 2)
            });
            let Some(k) = self
                .pick(1, c.into_iter(), |k| (self.unmarked(1, k), self.len(1, k), Self::sing_rank(self.sing(1, k))))
            else {
                return Ok(Err(letter(5)));
            };
            self.mark(5, 1, k)?;
            self.boomerang_at_five()?;
            Ok(Ok(()))
        }
    }

    fn boomerang_at_five(&mut self) -> Result<(), StepError> {
        let (_, k3) = self.st.sel(3).expect("[3] selected");
        let (_, k5) = self.st.sel(5).expect("[5] selected");
        let (i5, e5) = (self.len(1, k5), self.eff(k5));
        if self.len(1, k3) >= i5 || self.sing(1, k5) != Q || self.ty(k5) == Type0 {
            return Ok(());
        }
        if !self.nu2_has_singular(e5) {
            return Ok(());
        }
        let c = self.fresh(1, |k| self.len(1, k) > i5 && self.eff(k) == e5 && self.sing(1, k) == Singular);
        let Some(b) = self.shortest(1, c) else {
            return Ok(());
        };
        self.note(format!("BS-6:{}", Self::lbl(1, b, self)));
        self.unmark(5);
        self.mark(5, 1, b)
    }

    fn mark_six(&mut self) -> Result<Stage, StepError> {
        self.floor = 0;
        let (a5, k5) = self.st.sel(5).expect("[5] selected");
        if self.sing(a5, k5) == Singular {
            return self.mark_left_of(6, 5).map(Ok);
        }
        let i5 = self.len(a5, k5);
        let c = self.open(a5, |k| self.len(a5, k) > i5 && self.sing(a5, k) == Singular);
        match self.shortest(a5, c) {
            Some(k) => self.mark(6, a5, k).map(Ok),
            None => Ok(Err(letter(if a5 == 1 { 7 } else { 8 }))),
        }
    }

    fn mark_seven(&mut self) -> Result<Stage, StepError> {
        let (a6, k6) = self.st.sel(6).expect("[6] selected");
        if a6 == 1 {
            let e6 = self.eff(k6);
            let c = self.open(2, |k| self.len(2, k) >= e6 && self.sing(2, k) == Singular);
            return match self.shortest_near(2, c, 4) {
                Some(k) => self.mark(7, 2, k).map(Ok),
                None => Ok(Err(letter(9))),
            };
        }
        let i6 = self.len(2, k6);
        if let Some((1, k4)) = self.st.sel(4) {
            if self.eff(k4) == i6 && self.ty(k4) != TypeII {
                self.note("[7]left-of-[4]");
                return self.mark_left_of(7, 4).map(Ok);
            }
        }
        // [6] in nu(2) plays the role of [1] for the second half.
        self.floor = 3 * (i6 - 1);
        match self.select_by_preference(i6, &[]) {
            Some(k) => self.mark(7, 1, k).map(Ok),
            None => Ok(Err(letter(10))),
        }
    }

    fn mark_eight(&mut self) -> Result<Stage, StepError> {
        let (a7, k7) = self.st.sel(7).expect("[7] selected");
        if a7 == 1 {
            if self.st.sel(4) == Some((1, k7)) {
                self.mark_left_of(8, 7)?;
                if self.ty(k7) == TypeI && self.st.labels_in(1, k7).first() == Some(&3) {
                    self.note("inactivate:[3]");
                    self.st.inactivated.push(k7);
                }
                return Ok(Ok(()));
            }
            let (_, k6) = self.st.sel(6).expect("[6] selected");
            let i6 = self.len(2, k6);
            return self.mark_three_like(8, 7, i6, letter(11));
        }
        let i7 = self.len(2, k7);
        let sq = |eng: &Engine, k: usize| matches!(eng.sing(1, k), Singular | Q);
        let rank = |eng: &Engine, k: usize| match (eng.sing(1, k), eng.ty(k)) {
            (Singular, Type0) => Some(1),
            (Singular, TypeI) => Some(2),
            (Q, Type0) => Some(3),
            _ => None,
        };
        let c = self.open(1, |k| self.eff(k) == i7 && rank(self, k).is_some());
        // A string already holding [6] is taken before the table order.
        let k8 =
            self.pick(1, c.into_iter(), |k| (!self.st.labels_in(1, k).contains(&6), rank(self, k), self.len(1, k)));
        let k8 = match k8 {
            Some(k) => Some(k),
            None => {
                let c = self.open(1, |k| self.eff(k) > i7 && sq(self, k));
                self.shortest(1, c)
            }
        };
        let Some(k8) = k8 else {
            return Ok(Err(letter(11)));
        };
        self.mark(8, 1, k8)?;
        if self.ty(k8) == TypeI && matches!(self.st.labels_in(1, k8).first(), Some(5) | Some(6)) {
            self.note("inactivate:[5|6]");
            self.st.inactivated.push(k8);
        }
        Ok(Ok(()))
    }

    fn mark_nine(&mut self) -> Result<Stage, StepError> {
        let (_, k8) = self.st.sel(8).expect("[8] selected");
        let i8 = self.len(1, k8);
        let mut min_len = i8;
        let k9 = loop {
            let c = self.open(1, |k| self.len(1, k) >= min_len && self.sing(1, k) == Singular);
            let Some(k) = self.shortest(1, c) else {
                return Ok(Err(letter(12)));
            };
            let right = self.st.labels_in(1, k).first().copied();
            let crosses = (self.ty(k) == TypeI && right == Some(2)) || (self.ty(k) == TypeII && right == Some(3));
            if crosses {
                self.note(format!("[9]discard:{}", Self::lbl(1, k, self)));
                min_len = self.len(1, k) + 1;
                continue;
            }
            break k;
        };
        // Only a fresh [8] selection is moved; [8] placed left of [7] stays.
        if self.ty(k9) == Type0
            && k9 != k8
            && self.ty(k8) == TypeI
            && self.eff(k9) == self.eff(k8)
            && self.st.labels_in(1, k8).first() == Some(&8)
        {
            self.note(format!("shift[9][8]:{}", Self::lbl(1, k9, self)));
            self.unmark(8);
            self.mark(8, 1, k9)?;
            self.mark_left_of(9, 8)?;
            return Ok(Ok(()));
        }
        self.mark(9, 1, k9).map(Ok)
    }

    fn mark_ten(&mut self) -> Result<Letter, StepError> {
        let (_, k9) = self.st.sel(9).expect("[9] selected");
        let e9 = self.eff(k9);
        // Strings holding [5], [6] or [7] cannot take [10].
        let c = self.open(2, |k| {
            let held = self.st.labels_in(2, k);
            self.len(2, k) >= e9 && self.sing(2, k) == Singular && !held.iter().any(|n| (5..=7).contains(n))
        });
        match self.shortest_near(2, c, 1) {
            Some(k) => {
                self.mark(10, 2, k)?;
                Ok(letter(14))
            }
            None => Ok(letter(13)),
        }
    }

    // ------------------------------------------------------ rigging rules

    /// Target distance below the new vacancy number for each shortened string.
    fn rigging_targets(&mut self) -> Result<BTreeMap<(usize, usize), i64>, StepError> {
        let mut t: BTreeMap<(usize, usize), (i64, &'static str)> = BTreeMap::new();
        for m in &self.st.marks {
            t.insert((m.a, m.string), (0, "base"));
        }
        let st = self.st.clone();
        let sel = |n: u8| st.sel(n);
        let len_of = |n: u8| sel(n).map(|(a, k)| self.len(a, k));
        let only = |a: usize, k: usize, n: u8| st.labels_in(a, k) == vec![n];
        let mut set = |key: (usize, usize), d: i64, rule: &'static str| -> Result<(), String> {
            match t.get(&key) {
                Some(&(old, prev)) if prev != "base" && old != d => {
                    Err(format!("{rule} sets distance {d} but {prev} set {old}"))
                }
                _ => {
                    t.insert(key, (d, rule));
                    Ok(())
                }
            }
        };
        let mut conflicts = Vec::new();
        let mut apply = |key, d, rule| {
            if let Err(e) = set(key, d, rule) {
                conflicts.push(e);
            }
        };

        // [5] in a q-singular ν(2) string with i4^eff = i5, or [5][6] in one
        // singular ν(2) string with i4^eff = i6 − 1.
        let five_six_condition = |i4eff: usize| -> bool {
            match (sel(5), sel(6)) {
                (Some((2, k5)), _) if self.sing(2, k5) == Q && i4eff == self.len(2, k5) => true,
                (Some((2, k5)), Some((2, k6)))
                    if k5 == k6 && self.sing(2, k5) == Singular && i4eff + 1 == self.len(2, k6) =>
                {
                    true
                }
                _ => false,
            }
        };
        let ten_condition = |i9eff: usize| matches!(sel(10), Some((2, k)) if self.len(2, k) == i9eff);

        // RA-1
        if let (Some(i5), Some(i6), Some(k6)) = (len_of(5), len_of(6), sel(6)) {
            if i5 < i6 {
                apply(k6, 1, "RA-1");
            }
        }
        // RA-2
        if let (Some((1, k2)), Some((1, k3))) = (sel(2), sel(3)) {
            let four_in_1 = matches!(sel(4), Some((1, _)));
            let five_on_3 = matches!(sel(5), Some((1, k)) if k == k3);
            if self.len(1, k2) < self.len(1, k3) && !four_in_1 && !five_on_3 {
                let d = match self.ty(k3) {
                    TypeII => 1,
                    _ => match sel(4) {
                        Some((2, k4)) if self.eff(k3) == self.len(2, k4) => 0,
                        _ => 1,
                    },
                };
                apply((1, k3), d, "RA-2");
            }
        }
        // RA-3
        if let (Some((1, k3)), Some((1, k4))) = (sel(3), sel(4)) {
            if self.len(1, k3) < self.len(1, k4) && only(1, k4, 4) {
                let cond = five_six_condition(self.eff(k4));
                let d = match self.ty(k4) {
                    Type0 => {
                        if cond {
                            0
                        } else {
                            2
                        }
                    }
                    TypeI => {
                        if !matches!(sel(5), Some((2, _))) {
                            2
                        } else if cond {
                            1
                        } else {
                            2
                        }
                    }
                    TypeII => 2,
                };
                apply((1, k4), d, "RA-3");
                if only(1, k3, 3) {
                    apply((1, k3), 1, "RA-3/i3");
                }
            }
        }
        // RA-4
        if let (Some((1, k2)), Some((1, k3)), Some((1, k4))) = (sel(2), sel(3), sel(4)) {
            let seven_on_4 = matches!(sel(7), Some((1, k)) if k == k4);
            if self.len(1, k2) < self.len(1, k3) && k3 == k4 && !seven_on_4 {
                let d = match self.ty(k4) {
                    Type0 if five_six_condition(self.eff(k4)) => 0,
                    _ => 1,
                };
                apply((1, k4), d, "RA-4");
            }
        }
        // RA-5
        if let (Some((1, k8)), None) = (sel(8), sel(9)) {
            if only(1, k8, 8) {
                apply((1, k8), 1, "RA-5");
            }
        }
        // RA-6 and RA-7
        if let (Some((1, k8)), Some((1, k9))) = (sel(8), sel(9)) {
            let e9 = self.eff(k9);
            if st.labels_in(1, k9).first() == Some(&8) {
                let d = match self.ty(k9) {
                    Type0 if ten_condition(e9) => 0,
                    _ => 1,
                };
                apply((1, k9), d, "RA-6");
            } else if self.len(1, k8) < self.len(1, k9) {
                let d = match self.ty(k9) {
                    Type0 if ten_condition(e9) => 0,
                    TypeI if ten_condition(e9) => 1,
                    _ => 2,
                };
                apply((1, k9), d, "RA-7");
                if only(1, k8, 8) {
                    apply((1, k8), 1, "RA-7/i8");
                }
            }
        }
        if !conflicts.is_empty() {
            return Err(self.uncovered(conflicts.join("; ")));
        }
        let fired: Vec<String> = t
            .iter()
            .filter(|(_, v)| v.1 != "base")
            .map(|(k, v)| format!("{}@nu{}#{}={}", v.1, k.0, k.1, v.0))
            .collect();
        self.st.events.extend(fired);
        Ok(t.into_iter().map(|(k, v)| (k, v.0)).collect())
    }

    fn finish(mut self, b: Letter) -> Result<DeltaOutcome, StepError> {
        let targets = self.rigging_targets()?;
        let big_l = self.rc.big_l - 1;
        let mut nu: [Vec<(RcString, Option<i64>)>; 2] = [Vec::new(), Vec::new()];
        for a in 1..=2 {
            for (k, s) in self.rc.strings(a).iter().enumerate() {
                let left = s.len - self.consumed[a - 1][k];
                if left == 0 {
                    continue;
                }
                let d = targets.get(&(a, k)).copied();
                nu[a - 1].push((RcString::new(left, s.rig), d));
            }
        }
        let lens = |v: &Vec<(RcString, Option<i64>)>| v.iter().map(|(s, _)| s.len).collect::<Vec<_>>();
        let (l1, l2) = (lens(&nu[0]), lens(&nu[1]));
        let mut out = [Vec::new(), Vec::new()];
        for a in 1..=2 {
            for &(s, d) in &nu[a - 1] {
                let p = crate::rigged_config::vacancy_of(big_l, &l1, &l2, a, s.len);
                let rig = match d {
                    Some(d) => p - d,
                    None => s.rig,
                };
                if rig < 0 || rig > p {
                    return Err(StepError::Rigging {
                        a,
                        len: s.len,
                        rig,
                        vacancy: p,
                        trace: self.st.describe(self.rc),
                    });
                }
                out[a - 1].push(RcString::new(s.len, rig));
            }
        }
        let [mut nu1, mut nu2] = out;
        nu1.sort_by(canonical_order);
        nu2.sort_by(canonical_order);
        let new_rc = RiggedConfiguration { big_l, nu1, nu2 };
        let delta_alpha = self.rc.nu2.len() as i64 - new_rc.nu2.len() as i64;
        Ok(DeltaOutcome { letter: b, new_rc, marking: self.st, delta_alpha })
    }
}

fn letter(n: u8) -> Letter {
    Letter::boxed(n).expect("box number")
}

/// Runs the box marking on `rc` and reports the letter reached.
pub fn run_box_marking(rc: &RiggedConfiguration) -> Result<(Letter, MarkingState), StepError> {
    rc.validate()?;
    if rc.big_l == 0 {
        return Err(StepError::EmptyLength);
    }
    let mut eng = Engine::new(rc);
    let b = eng.run()?;
    Ok((b, eng.st))
}

/// One application of `δ`: the letter, the smaller configuration and the marks.
pub fn delta_theta(rc: &RiggedConfiguration) -> Result<DeltaOutcome, StepError> {
    rc.validate()?;
    if rc.big_l == 0 {
        return Err(StepError::EmptyLength);
    }
    let mut eng = Engine::new(rc);
    let b = eng.run()?;
    let (n1, n2) = crystal::box_counts(b);
    let marked = |a: usize| eng.st.marks.iter().filter(|m| m.a == a).count() as i64;
    if (marked(1), marked(2)) != (n1, n2) {
        let detail = format!("letter {b} needs ({n1},{n2}) boxes but ({},{}) were marked", marked(1), marked(2));
        return Err(eng.uncovered(detail));
    }
    eng.finish(b)
}

/// Deletes the marked boxes and resets riggings, given a completed marking.
pub fn adjust_riggings(
    marking: &MarkingState,
    b: Letter,
    rc: &RiggedConfiguration,
) -> Result<RiggedConfiguration, StepError> {
    let mut eng = Engine::new(rc);
    for m in &marking.marks {
        eng.consumed[m.a - 1][m.string] += 1;
    }
    eng.st = marking.clone();
    eng.finish(b).map(|o| o.new_rc)
}

/// The full bijection `Φ`: repeatedly applies `δ` and collects the letters.
pub fn phi(rc: &RiggedConfiguration) -> Result<Path, StepError> {
    Ok(Path(phi_trace(rc)?.into_iter().map(|o| o.letter).collect()))
}

/// Every step of `Φ(rc)`.
pub fn phi_trace(rc: &RiggedConfiguration) -> Result<Vec<DeltaOutcome>, StepError> {
    let mut cur = rc.clone();
    let mut out = Vec::with_capacity(rc.big_l);
    while cur.big_l > 0 {
        let o = delta_theta(&cur)?;
        cur = o.new_rc.clone();
        out.push(o);
    }
    Ok(out)
}

/// `Δp_i^(a)` for `1 ≤ i ≤ window`, accumulated mark by mark.
///
/// Removing the box in column `c` of a `ν(1)` string adds `2·χ(i ≥ c)` to
/// `p_i^(1)` and `−χ(3i ≥ c)` to `p_i^(2)`; removing it from a `ν(2)` string
/// adds `−(3χ(i ≥ 3c) + 2χ(i = 3c−1) + χ(i = 3c−2))` to `p_i^(1)` and
/// `2·χ(i ≥ c)` to `p_i^(2)`. Dropping one tensor factor adds `−1` to every
/// `p_i^(2)`. Returns `[Δp(1), Δp(2)]` indexed by `i − 1`.
pub fn vacancy_changes(_b: Letter, marking: &MarkingState, window: usize) -> [Vec<i64>; 2] {
    let mut d1 = vec![0i64; window];
    let mut d2 = vec![-1i64; window];
    let chi = |x: bool| x as i64;
    for m in &marking.marks {
        let c = m.col;
        for i in 1..=window {
            if m.a == 1 {
                d1[i - 1] += 2 * chi(i >= c);
                d2[i - 1] -= chi(3 * i >= c);
            } else {
                d1[i - 1] -= 3 * chi(i >= 3 * c) + 2 * chi(i + 1 == 3 * c) + chi(i + 2 == 3 * c);
                d2[i - 1] += 2 * chi(i >= c);
            }
        }
    }
    [d1, d2]
}
