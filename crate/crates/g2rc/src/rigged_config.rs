//! Configurations, vacancy numbers, riggings and charge.
//!
//! A configuration is a pair of partitions `ν(1)`, `ν(2)`; each part is a
//! *string*. A rigged configuration attaches to every string an integer
//! rigging between `0` and the vacancy number of its length.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::crystal::Weight;
use crate::error::{BoundError, ParseError, ValidationError};

/// Default largest `L` accepted by [`enumerate_rc`].
pub const DEFAULT_RC_BOUND: usize = 7;

/// A configuration `ν = (ν(1), ν(2))` together with the tensor length `L`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub big_l: usize,
    /// Parts of `ν(1)` and `ν(2)`, each weakly decreasing.
    pub parts: [Vec<usize>; 2],
}

impl Configuration {
    pub fn new(big_l: usize, mut nu1: Vec<usize>, mut nu2: Vec<usize>) -> Configuration {
        nu1.sort_unstable_by(|a, b| b.cmp(a));
        nu2.sort_unstable_by(|a, b| b.cmp(a));
        Configuration { big_l, parts: [nu1, nu2] }
    }

    /// Multiplicity `m_i^(a)`.
    pub fn multiplicity(&self, a: usize, i: usize) -> usize {
        self.parts[a - 1].iter().filter(|&&j| j == i).count()
    }

    /// Number of boxes `n_a = Σ_j j·m_j^(a)`.
    pub fn size(&self, a: usize) -> usize {
        self.parts[a - 1].iter().sum()
    }

    pub fn max_part(&self, a: usize) -> usize {
        self.parts[a - 1].first().copied().unwrap_or(0)
    }

    /// The vacancy number `p_i^(a)`; also defined for `i = 0`.
    pub fn vacancy(&self, a: usize, i: usize) -> i64 {
        vacancy_of(self.big_l, &self.parts[0], &self.parts[1], a, i)
    }

    /// `λ = (−2n1 + 3n2, L + n1 − 2n2)`.
    pub fn lambda(&self) -> Weight {
        let n1 = self.size(1) as i64;
        let n2 = self.size(2) as i64;
        Weight::new(-2 * n1 + 3 * n2, self.big_l as i64 + n1 - 2 * n2)
    }

    /// Indices `1..=w` beyond which every vacancy number is constant.
    pub fn vacancy_window(&self) -> usize {
        self.max_part(1).max(3 * self.max_part(2)) + 1
    }

    /// Whether the configuration has weight `lam` and no negative vacancy number.
    pub fn is_admissible(&self, lam: Weight) -> bool {
        self.lambda() == lam && self.first_negative_vacancy().is_none()
    }

    fn first_negative_vacancy(&self) -> Option<(usize, usize, i64)> {
        (1..=2)
            .flat_map(|a| (1..=self.vacancy_window()).map(move |i| (a, i)))
            .map(|(a, i)| (a, i, self.vacancy(a, i)))
            .find(|&(_, _, p)| p < 0)
    }

    /// The configuration part of the charge.
    pub fn charge(&self) -> i64 {
        let m = |x: usize, y: usize| x.min(y) as i64;
        let (nu1, nu2) = (&self.parts[0], &self.parts[1]);
        let mut c = 0;
        for &i in nu1 {
            for &j in nu1 {
                c += m(i, j);
            }
            for &j in nu2 {
                c -= m(i, 3 * j);
            }
        }
        for &i in nu2 {
            for &j in nu2 {
                c += m(i, j);
            }
        }
        c - self.big_l as i64 * nu2.len() as i64
    }
}

/// Vacancy numbers straight from the partitions, for any `i ≥ 0`.
pub(crate) fn vacancy_of(big_l: usize, nu1: &[usize], nu2: &[usize], a: usize, i: usize) -> i64 {
    let min = |x: usize, y: usize| x.min(y) as i64;
    match a {
        1 => -2 * nu1.iter().map(|&j| min(i, j)).sum::<i64>() + nu2.iter().map(|&j| min(i, 3 * j)).sum::<i64>(),
        2 => {
            big_l as i64 + nu1.iter().map(|&j| min(3 * i, j)).sum::<i64>()
                - 2 * nu2.iter().map(|&j| min(i, j)).sum::<i64>()
        }
        _ => panic!("tableau index must be 1 or 2, got {a}"),
    }
}

/// One string of a rigged configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RcString {
    pub len: usize,
    pub rig: i64,
}

impl RcString {
    pub const fn new(len: usize, rig: i64) -> RcString {
        RcString { len, rig }
    }
}

/// A rigged configuration `(ν, J)` at tensor length `L`.
///
/// Strings are kept in canonical order: longer strings first, and riggings
/// increasing among strings of equal length.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RiggedConfiguration {
    #[serde(rename = "L")]
    pub big_l: usize,
    pub nu1: Vec<RcString>,
    pub nu2: Vec<RcString>,
}

/// Canonical ordering of strings within one partition.
pub fn canonical_order(a: &RcString, b: &RcString) -> std::cmp::Ordering {
    b.len.cmp(&a.len).then(a.rig.cmp(&b.rig))
}

impl RiggedConfiguration {
    pub fn new(big_l: usize, mut nu1: Vec<RcString>, mut nu2: Vec<RcString>) -> RiggedConfiguration {
        nu1.sort_by(canonical_order);
        nu2.sort_by(canonical_order);
        RiggedConfiguration { big_l, nu1, nu2 }
    }

    /// The empty rigged configuration at length `big_l`.
    pub fn empty(big_l: usize) -> RiggedConfiguration {
        RiggedConfiguration { big_l, nu1: Vec::new(), nu2: Vec::new() }
    }

    pub fn from_json(s: &str) -> Result<RiggedConfiguration, ParseError> {
        let rc: RiggedConfiguration = serde_json::from_str(s)?;
        Ok(RiggedConfiguration::new(rc.big_l, rc.nu1, rc.nu2))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("rigged configurations always serialize")
    }

    pub fn strings(&self, a: usize) -> &[RcString] {
        match a {
            1 => &self.nu1,
            2 => &self.nu2,
            _ => panic!("tableau index must be 1 or 2, got {a}"),
        }
    }

    pub fn config(&self) -> Configuration {
        Configuration::new(
            self.big_l,
            self.nu1.iter().map(|s| s.len).collect(),
            self.nu2.iter().map(|s| s.len).collect(),
        )
    }

    pub fn vacancy(&self, a: usize, i: usize) -> i64 {
        let l1: Vec<usize> = self.nu1.iter().map(|s| s.len).collect();
        let l2: Vec<usize> = self.nu2.iter().map(|s| s.len).collect();
        vacancy_of(self.big_l, &l1, &l2, a, i)
    }

    pub fn lambda(&self) -> Weight {
        self.config().lambda()
    }

    /// Checks positivity of lengths, rigging bounds and vacancy numbers.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let config = self.config();
        for a in 1..=2 {
            for s in self.strings(a) {
                if s.len == 0 {
                    return Err(ValidationError::ZeroLength { a });
                }
                let p = config.vacancy(a, s.len);
                if s.rig < 0 || s.rig > p {
                    return Err(ValidationError::RiggingOutOfRange { a, len: s.len, rig: s.rig, vacancy: p });
                }
            }
        }
        if let Some((a, i, vacancy)) = config.first_negative_vacancy() {
            return Err(ValidationError::NegativeVacancy { a, i, vacancy });
        }
        let lam = config.lambda();
        if !lam.is_dominant() {
            return Err(ValidationError::NotDominant { found: lam });
        }
        Ok(())
    }

    /// Whether the underlying configuration has weight `lam` and every
    /// rigging lies within its vacancy number.
    pub fn is_admissible(&self, lam: Weight) -> bool {
        self.lambda() == lam && self.validate().is_ok()
    }

    /// `c(ν, J) = c(ν) + Σ riggings`.
    pub fn charge(&self) -> i64 {
        self.config().charge() + self.nu1.iter().chain(&self.nu2).map(|s| s.rig).sum::<i64>()
    }

    /// Number of strings of `ν(2)`.
    pub fn alpha2(&self) -> usize {
        self.nu2.len()
    }

    /// Derived classification of the `k`-th string of `ν(a)`.
    pub fn view(&self, a: usize, k: usize) -> StringView {
        let s = self.strings(a)[k];
        StringView::new(a, s, self.vacancy(a, s.len))
    }
}

impl fmt::Display for RiggedConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[RcString]| v.iter().map(|s| format!("{}:{}", s.len, s.rig)).collect::<Vec<_>>().join(" ");
        write!(f, "L={} nu1=[{}] nu2=[{}]", self.big_l, show(&self.nu1), show(&self.nu2))
    }
}

/// Residue class of a `ν(1)` string length modulo 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StringType {
    /// length `≡ 0 (mod 3)`
    Type0,
    /// length `≡ 2 (mod 3)`
    TypeI,
    /// length `≡ 1 (mod 3)`
    TypeII,
}

impl StringType {
    pub fn of(len: usize) -> StringType {
        match len % 3 {
            0 => StringType::Type0,
            2 => StringType::TypeI,
            _ => StringType::TypeII,
        }
    }

    /// Recovers the length from the effective length.
    pub fn length(self, eff: usize) -> usize {
        match self {
            StringType::Type0 => 3 * eff,
            StringType::TypeI => 3 * eff - 1,
            StringType::TypeII => 3 * eff - 2,
        }
    }
}

/// Distance of a rigging below its vacancy number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Singularity {
    Singular,
    Q,
    QQ,
    Deeper,
}

impl Singularity {
    pub fn of(vacancy: i64, rig: i64) -> Singularity {
        match vacancy - rig {
            0 => Singularity::Singular,
            1 => Singularity::Q,
            2 => Singularity::QQ,
            _ => Singularity::Deeper,
        }
    }
}

/// Effective length `⌈i/3⌉` of a `ν(1)` string.
pub const fn eff(len: usize) -> usize {
    len.div_ceil(3)
}

/// A string together with its derived classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StringView {
    pub a: usize,
    pub len: usize,
    pub rig: i64,
    pub vacancy: i64,
}

impl StringView {
    pub fn new(a: usize, s: RcString, vacancy: i64) -> StringView {
        StringView { a, len: s.len, rig: s.rig, vacancy }
    }

    pub fn effective_length(&self) -> usize {
        if self.a == 1 {
            eff(self.len)
        } else {
            self.len
        }
    }

    pub fn string_type(&self) -> StringType {
        StringType::of(self.len)
    }

    pub fn singularity(&self) -> Singularity {
        Singularity::of(self.vacancy, self.rig)
    }
}

/// All partitions of `n` in reverse lexicographic order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            go(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `(n1, n2)` for weight `lam` at length `big_l`, if both are nonnegative.
pub fn box_totals(lam: Weight, big_l: usize) -> Option<(usize, usize)> {
    let l = big_l as i64;
    let n1 = 3 * l - 2 * lam.l1 - 3 * lam.l2;
    let n2 = 2 * l - lam.l1 - 2 * lam.l2;
    (n1 >= 0 && n2 >= 0).then_some((n1 as usize, n2 as usize))
}

/// All admissible configurations of weight `lam` at length `big_l`.
pub fn enumerate_configurations(lam: Weight, big_l: usize) -> Vec<Configuration> {
    let Some((n1, n2)) = box_totals(lam, big_l) else {
        return Vec::new();
    };
    if !lam.is_dominant() {
        return Vec::new();
    }
    let p2 = partitions(n2);
    partitions(n1)
        .into_iter()
        .flat_map(|nu1| p2.iter().map(move |nu2| Configuration::new(big_l, nu1.clone(), nu2.clone())))
        .filter(|c| c.is_admissible(lam))
        .collect()
}

/// Every rigging of `config`, riggings within a block listed weakly
/// decreasing and blocks varied in canonical order.
pub fn riggings_of(config: &Configuration) -> Vec<RiggedConfiguration> {
    // Blocks of equal-length strings, each with its multiplicity and vacancy.
    let mut blocks: Vec<(usize, usize, usize, i64)> = Vec::new();
    for a in 1..=2 {
        let parts = &config.parts[a - 1];
        let mut k = 0;
        while k < parts.len() {
            let len = parts[k];
            let m = parts[k..].iter().take_while(|&&j| j == len).count();
            blocks.push((a, len, m, config.vacancy(a, len)));
            k += m;
        }
    }
    let mut out = Vec::new();
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    fn multisets(m: usize, max: i64) -> Vec<Vec<i64>> {
        fn go(m: usize, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if cur.len() == m {
                out.push(cur.clone());
                return;
            }
            let top = cur.last().copied().unwrap_or(max);
            for r in (0..=top).rev() {
                cur.push(r);
                go(m, max, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(m, max, &mut Vec::new(), &mut out);
        out
    }
    fn rec(
        blocks: &[(usize, usize, usize, i64)],
        k: usize,
        chosen: &mut Vec<Vec<i64>>,
        big_l: usize,
        out: &mut Vec<RiggedConfiguration>,
    ) {
        if k == blocks.len() {
            let mut nu = [Vec::new(), Vec::new()];
            for (b, rigs) in blocks.iter().zip(chosen.iter()) {
                for &r in rigs {
                    nu[b.0 - 1].push(RcString::new(b.1, r));
                }
            }
            let [nu1, nu2] = nu;
            out.push(RiggedConfiguration::new(big_l, nu1, nu2));
            return;
        }
        let (_, _, m, p) = blocks[k];
        for ms in multisets(m, p) {
            chosen.push(ms);
            rec(blocks, k + 1, chosen, big_l, out);
            chosen.pop();
        }
    }
    rec(&blocks, 0, &mut chosen, config.big_l, &mut out);
    out
}

/// All rigged configurations `RC(lam, big_l)`.
pub fn enumerate_rc(lam: Weight, big_l: usize) -> Result<Vec<RiggedConfiguration>, BoundError> {
    enumerate_rc_bounded(lam, big_l, DEFAULT_RC_BOUND)
}

/// [`enumerate_rc`] with an explicit bound on `big_l`.
pub fn enumerate_rc_bounded(lam: Weight, big_l: usize, bound: usize) -> Result<Vec<RiggedConfiguration>, BoundError> {
    if big_l > bound {
        return Err(BoundError { requested: big_l, bound });
    }
    Ok(enumerate_configurations(lam, big_l).iter().flat_map(riggings_of).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex41() -> Configuration {
        Configuration::new(4, vec![6, 2], vec![2, 2, 1, 1])
    }

    #[test]
    fn vacancy_examples() {
        assert_eq!(ex41().vacancy(1, 6), 2);
        assert_eq!(ex41().vacancy(2, 1), 1);
        let e = Configuration::new(5, vec![], vec![]);
        assert_eq!(e.vacancy(2, 3), 5);
    }

    #[test]
    fn lambda_and_charge_examples() {
        assert_eq!(ex41().lambda(), Weight::new(2, 0));
        assert_eq!(ex41().charge(), -10);
        let ex44 = Configuration::new(3, vec![4], vec![1, 1, 1]);
        assert_eq!(ex44.lambda(), Weight::new(1, 1));
        assert_eq!(ex44.charge(), -5);
        assert_eq!(Configuration::new(3, vec![], vec![]).lambda(), Weight::new(0, 3));
    }

    #[test]
    fn enumeration_examples() {
        let rcs = enumerate_rc(Weight::new(1, 1), 3).unwrap();
        assert_eq!(rcs.len(), 2);
        assert!(rcs.iter().all(|rc| rc.nu1 == vec![RcString::new(4, rc.nu1[0].rig)]));
        assert_eq!(enumerate_rc(Weight::ZERO, 0).unwrap(), vec![RiggedConfiguration::empty(0)]);
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..8).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }

    #[test]
    fn classification() {
        assert_eq!(StringType::of(6), StringType::Type0);
        assert_eq!(StringType::of(5), StringType::TypeI);
        assert_eq!(StringType::of(4), StringType::TypeII);
        assert_eq!(eff(4), 2);
        assert_eq!(StringType::TypeI.length(2), 5);
        assert_eq!(Singularity::of(3, 1), Singularity::QQ);
    }
}
