//! Paths in tensor powers of B(2,1), highest-weight paths, and energy.
//!
//! Tensor products use the anti-Kashiwara convention: on `b1 ⊗ b2` the
//! operator `e_i` acts on `b1` when `φ_i(b2) < ε_i(b1)` and on `b2` otherwise.
//! Longer products associate from the left.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::crystal::{self, Letter, Weight};
use crate::error::{BoundError, EmptyPathError};

/// Default largest `L` accepted by [`enumerate_paths`].
pub const DEFAULT_PATH_BOUND: usize = 7;

/// An element `b1 ⊗ ... ⊗ bL` of the `L`-fold tensor power.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(pub Vec<Letter>);

impl Path {
    pub fn new(letters: Vec<Letter>) -> Path {
        Path(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Builds a path from box numbers, with `0` standing for `∅`.
    pub fn from_numbers(ns: &[u8]) -> Path {
        Path(
            ns.iter()
                .map(|&n| if n == 0 { Letter::EMPTY } else { Letter::boxed(n).expect("box number 1..14") })
                .collect(),
        )
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("(empty path)");
        }
        for (k, b) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ⊗ ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// `(ε_i, φ_i)` of the tensor product of all letters, associated from the left.
fn string_data(i: usize, letters: &[Letter]) -> (i64, i64) {
    let mut acc = (0, 0);
    for (k, &b) in letters.iter().enumerate() {
        let (eb, pb) = (crystal::epsilon(i, b), crystal::phi(i, b));
        if k == 0 {
            acc = (eb, pb);
        } else {
            let (ex, px) = acc;
            acc = ((eb).max(ex + eb - pb), px.max(px + pb - ex));
        }
    }
    acc
}

/// Which factor the operator acts on, or `None` when it kills the path.
fn acting_factor(i: usize, letters: &[Letter], raising: bool) -> Option<usize> {
    let mut end = letters.len();
    while end > 1 {
        let right = letters[end - 1];
        let (ex, _) = string_data(i, &letters[..end - 1]);
        let go_left = if raising { crystal::phi(i, right) < ex } else { crystal::phi(i, right) <= ex };
        if !go_left {
            return Some(end - 1);
        }
        end -= 1;
    }
    if end == 1 {
        Some(0)
    } else {
        None
    }
}

fn apply(i: usize, p: &Path, raising: bool) -> Result<Option<Path>, EmptyPathError> {
    if p.is_empty() {
        return Err(EmptyPathError);
    }
    let Some(k) = acting_factor(i, &p.0, raising) else {
        return Ok(None);
    };
    let op = if raising { crystal::e_op } else { crystal::f_op };
    Ok(op(i, p.0[k]).map(|b| {
        let mut out = p.0.clone();
        out[k] = b;
        Path(out)
    }))
}

/// `e_i` on the tensor product; `Ok(None)` when the result leaves the crystal.
pub fn tensor_e(i: usize, p: &Path) -> Result<Option<Path>, EmptyPathError> {
    apply(i, p, true)
}

/// `f_i` on the tensor product; `Ok(None)` when the result leaves the crystal.
pub fn tensor_f(i: usize, p: &Path) -> Result<Option<Path>, EmptyPathError> {
    apply(i, p, false)
}

/// Sum of the letter weights.
pub fn path_weight(p: &Path) -> Weight {
    p.0.iter().fold(Weight::ZERO, |acc, &b| acc + crystal::weight(b))
}

/// Whether `p` has weight `lam` and is killed by `e_1` and `e_2`.
///
/// # Panics
/// If `lam` is not dominant.
pub fn is_classically_restricted(p: &Path, lam: Weight) -> bool {
    assert!(lam.is_dominant(), "weight {lam} is not dominant");
    if path_weight(p) != lam {
        return false;
    }
    if p.is_empty() {
        return true;
    }
    (1..=2).all(|i| matches!(tensor_e(i, p), Ok(None)))
}

/// The peel-off-the-first-letter form of the highest-weight test.
///
/// `b1 ⊗ rest` is highest weight of weight `lam` iff `rest` is highest weight
/// of weight `lam − wt(b1)` and `ε_i(b1) ≤ ⟨α_i^∨, lam − wt(b1)⟩` for `i = 1, 2`.
/// The bound uses `ε_i` of the first letter.
pub fn is_classically_restricted_recursive(p: &Path, lam: Weight) -> bool {
    let mut mu = lam;
    for &b in p.letters() {
        mu = mu - crystal::weight(b);
        if !mu.is_dominant() {
            return false;
        }
        if (1..=2).any(|i| crystal::epsilon(i, b) > mu.coroot(i)) {
            return false;
        }
    }
    mu == Weight::ZERO
}

/// All highest-weight paths of weight `lam` and length `big_l`, in
/// lexicographic order of letters (`∅` last).
pub fn enumerate_paths(lam: Weight, big_l: usize) -> Result<Vec<Path>, BoundError> {
    enumerate_paths_bounded(lam, big_l, DEFAULT_PATH_BOUND)
}

/// [`enumerate_paths`] with an explicit bound on `big_l`.
pub fn enumerate_paths_bounded(lam: Weight, big_l: usize, bound: usize) -> Result<Vec<Path>, BoundError> {
    if big_l > bound {
        return Err(BoundError { requested: big_l, bound });
    }
    if !lam.is_dominant() {
        return Ok(Vec::new());
    }
    let mut memo = HashMap::new();
    Ok(suffixes(lam, big_l, &mut memo).into_iter().map(Path).collect())
}

fn suffixes(lam: Weight, len: usize, memo: &mut HashMap<(Weight, usize), Vec<Vec<Letter>>>) -> Vec<Vec<Letter>> {
    if len == 0 {
        return if lam == Weight::ZERO { vec![Vec::new()] } else { Vec::new() };
    }
    if let Some(v) = memo.get(&(lam, len)) {
        return v.clone();
    }
    let mut out = Vec::new();
    for b in Letter::all() {
        let mu = lam - crystal::weight(b);
        if !mu.is_dominant() || (1..=2).any(|i| crystal::epsilon(i, b) > mu.coroot(i)) {
            continue;
        }
        for rest in suffixes(mu, len - 1, memo) {
            let mut v = Vec::with_capacity(len);
            v.push(b);
            v.extend(rest);
            out.push(v);
        }
    }
    memo.insert((lam, len), out.clone());
    out
}

/// Explicit pair tables for the local energy on non-empty boxes.
#[derive(Clone, Debug)]
pub struct EnergyTables {
    /// `s0[b1][b2]` for boxes indexed `0..14`.
    s0: [[bool; 14]; 14],
    s1: [[bool; 14]; 14],
}

impl EnergyTables {
    pub fn new() -> EnergyTables {
        let mut s0 = [[false; 14]; 14];
        let mut s1 = [[false; 14]; 14];
        let put = |t: &mut [[bool; 14]; 14], i: u8, j: u8| t[i as usize - 1][j as usize - 1] = true;

        put(&mut s0, 1, 1);
        put(&mut s0, 14, 14);
        for i in [1, 2] {
            for j in 2..=14 {
                put(&mut s0, i, j);
            }
        }
        for i in [3, 4, 6] {
            for j in (6..=14).filter(|&j| j != 7) {
                put(&mut s0, i, j);
            }
        }
        for i in [5, 8, 10] {
            for j in 10..=14 {
                put(&mut s0, i, j);
            }
        }
        for i in [7, 9, 11, 12, 13] {
            for j in [13, 14] {
                put(&mut s0, i, j);
            }
        }

        put(&mut s1, 2, 1);
        for i in [3, 4, 6] {
            for j in (1..=7).filter(|&j| j != 6) {
                put(&mut s1, i, j);
            }
        }
        for i in [5, 8, 10] {
            for j in 2..=9 {
                put(&mut s1, i, j);
            }
        }
        for i in [7, 9, 11, 12, 13] {
            for j in (6..=12).filter(|&j| j != 7) {
                put(&mut s1, i, j);
            }
        }
        for j in 10..=13 {
            put(&mut s1, 14, j);
        }
        EnergyTables { s0, s1 }
    }

    fn idx(b: Letter) -> Option<usize> {
        b.number().map(|n| n as usize - 1)
    }

    pub fn in_s0(&self, b1: Letter, b2: Letter) -> bool {
        matches!((Self::idx(b1), Self::idx(b2)), (Some(i), Some(j)) if self.s0[i][j])
    }

    pub fn in_s1(&self, b1: Letter, b2: Letter) -> bool {
        matches!((Self::idx(b1), Self::idx(b2)), (Some(i), Some(j)) if self.s1[i][j])
    }

    /// Pairs of boxes in neither `S0` nor `S1`.
    pub fn in_s2(&self, b1: Letter, b2: Letter) -> bool {
        !b1.is_empty() && !b2.is_empty() && !self.in_s0(b1, b2) && !self.in_s1(b1, b2)
    }

    pub fn local_energy(&self, b1: Letter, b2: Letter) -> i64 {
        match (b1.is_empty(), b2.is_empty()) {
            (true, true) => -2,
            (true, false) | (false, true) => -1,
            (false, false) if self.in_s0(b1, b2) => 0,
            (false, false) if self.in_s1(b1, b2) => -1,
            (false, false) => -2,
        }
    }
}

impl Default for EnergyTables {
    fn default() -> Self {
        Self::new()
    }
}

fn tables() -> &'static EnergyTables {
    static T: std::sync::OnceLock<EnergyTables> = std::sync::OnceLock::new();
    T.get_or_init(EnergyTables::new)
}

/// The pair tables used by [`local_energy`].
pub fn energy_tables() -> &'static EnergyTables {
    tables()
}

/// The local energy `H(b1 ⊗ b2)`, normalised by `H(1 ⊗ 1) = 0`.
pub fn local_energy(b1: Letter, b2: Letter) -> i64 {
    tables().local_energy(b1, b2)
}

/// `D(p) = Σ_{j=1}^{L} j·H(b_j ⊗ b_{j+1})` with the extra letter `b_{L+1} = 1`.
pub fn energy(p: &Path) -> i64 {
    let ls = p.letters();
    (0..ls.len())
        .map(|k| {
            let next = ls.get(k + 1).copied().unwrap_or(Letter::ONE);
            (k as i64 + 1) * local_energy(ls[k], next)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_energies() {
        assert_eq!(energy(&Path::from_numbers(&[7, 12, 2, 1])), -8);
        assert_eq!(energy(&Path::from_numbers(&[5, 9, 2, 1])), -8);
        assert_eq!(energy(&Path::from_numbers(&[1, 1, 1, 1])), 0);
        assert_eq!(energy(&Path::default()), 0);
    }

    #[test]
    fn local_energy_examples() {
        let b = |n| Letter::boxed(n).unwrap();
        assert_eq!(local_energy(b(1), b(1)), 0);
        assert_eq!(local_energy(b(2), b(1)), -1);
        assert_eq!(local_energy(Letter::EMPTY, b(5)), -1);
        assert_eq!(local_energy(Letter::EMPTY, Letter::EMPTY), -2);
    }

    #[test]
    fn tensor_operator_examples() {
        let p = Path::from_numbers(&[1, 1]);
        assert_eq!(tensor_f(2, &p).unwrap(), Some(Path::from_numbers(&[1, 2])));
        assert_eq!(tensor_e(2, &p).unwrap(), None);
        assert_eq!(tensor_e(1, &Path::from_numbers(&[7, 12, 2, 1])).unwrap(), None);
        assert_eq!(tensor_e(1, &Path::from_numbers(&[2, 1])).unwrap(), None);
        assert_eq!(tensor_e(1, &Path::default()), Err(EmptyPathError));
    }

    #[test]
    fn small_enumerations() {
        let p = enumerate_paths(Weight::new(1, 1), 3).unwrap();
        assert_eq!(p, vec![Path::from_numbers(&[4, 5, 1]), Path::from_numbers(&[9, 2, 1])]);
        assert_eq!(enumerate_paths(Weight::ZERO, 0).unwrap(), vec![Path::default()]);
        assert!(enumerate_paths(Weight::new(2, 0), 4).unwrap().contains(&Path::from_numbers(&[7, 12, 2, 1])));
        assert!(enumerate_paths(Weight::ZERO, 8).is_err());
    }
}
