//! The fifteen-element crystal B(2,1) of type G2(1).
//!
//! Elements are the boxes `1..=14` together with the empty box `∅`. The
//! classical part (arrows 1 and 2) forms the adjoint representation of G2 on
//! the fourteen boxes; the 0-arrows connect it to `∅`. Edge data is stored as
//! constant tables and every string statistic is derived by walking them.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// One element of B(2,1): a box `1..=14` or the empty box.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    /// Number of elements of the crystal.
    pub const COUNT: usize = 15;
    /// The classical highest-weight element.
    pub const ONE: Letter = Letter(1);
    /// The empty box `∅`.
    pub const EMPTY: Letter = Letter(15);

    /// The box with the given number, for `1 <= n <= 14`.
    pub const fn boxed(n: u8) -> Option<Letter> {
        if n >= 1 && n <= 14 {
            Some(Letter(n))
        } else {
            None
        }
    }

    /// Box number `1..=14`, or `None` for `∅`.
    pub const fn number(self) -> Option<u8> {
        if self.0 == 15 {
            None
        } else {
            Some(self.0)
        }
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 15
    }

    /// Dense index in `0..15`; boxes first in numeric order, `∅` last.
    pub const fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    pub const fn from_index(i: usize) -> Letter {
        assert!(i < 15);
        Letter(i as u8 + 1)
    }

    /// All fifteen elements in canonical order (`1`, ..., `14`, `∅`).
    pub fn all() -> impl Iterator<Item = Letter> + Clone {
        (0..Self::COUNT).map(Letter::from_index)
    }

    /// The fourteen non-empty boxes.
    pub fn boxes() -> impl Iterator<Item = Letter> + Clone {
        (1..=14).map(Letter)
    }

    /// The string label used in JSON and DOT output.
    pub fn label(self) -> String {
        match self.number() {
            Some(n) => n.to_string(),
            None => "empty".to_string(),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.number() {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("∅"),
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Letter {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "empty" | "∅" | "e" => Ok(Letter::EMPTY),
            _ => t.parse::<u8>().ok().and_then(Letter::boxed).ok_or_else(|| ParseError::Letter(t.to_string())),
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A classical weight `l1·Λ̄1 + l2·Λ̄2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    pub l1: i64,
    pub l2: i64,
}

impl Weight {
    pub const ZERO: Weight = Weight { l1: 0, l2: 0 };

    pub const fn new(l1: i64, l2: i64) -> Weight {
        Weight { l1, l2 }
    }

    pub const fn is_dominant(self) -> bool {
        self.l1 >= 0 && self.l2 >= 0
    }

    /// The pairing with the simple coroot of classical index `i`.
    pub fn coroot(self, i: usize) -> i64 {
        match i {
            1 => self.l1,
            2 => self.l2,
            _ => panic!("classical index must be 1 or 2, got {i}"),
        }
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, o: Weight) -> Weight {
        Weight::new(self.l1 + o.l1, self.l2 + o.l2)
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, o: Weight) -> Weight {
        Weight::new(self.l1 - o.l1, self.l2 - o.l2)
    }
}

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight::new(-self.l1, -self.l2)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.l1, self.l2)
    }
}

impl FromStr for Weight {
    type Err = ParseError;

    /// Parses `"a,b"` as `a·Λ̄1 + b·Λ̄2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::Weight(s.to_string());
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let l1 = a.trim().parse().map_err(|_| bad())?;
        let l2 = b.trim().parse().map_err(|_| bad())?;
        Ok(Weight::new(l1, l2))
    }
}

/// Cartan data of the classical G2 subalgebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CartanData {
    /// `cartan[a][b]` with rows and columns indexed by `1, 2`.
    pub cartan: [[i64; 2]; 2],
    /// Scaling factors `γ1 = 1`, `γ2 = 3`.
    pub gamma: [i64; 2],
}

/// The G2 Cartan data. Column `b` of `cartan` is `α_b` in the `Λ̄` basis.
pub const G2: CartanData = CartanData { cartan: [[2, -3], [-1, 2]], gamma: [1, 3] };

impl CartanData {
    /// The simple root `α_i` (`i ∈ {1, 2}`) in `Λ̄` coordinates.
    pub fn simple_root(&self, i: usize) -> Weight {
        assert!(i == 1 || i == 2, "classical index must be 1 or 2");
        Weight::new(self.cartan[0][i - 1], self.cartan[1][i - 1])
    }

    pub fn gamma(&self, a: usize) -> i64 {
        self.gamma[a - 1]
    }
}

const E: u8 = 15;

/// `(source, target)` pairs of the f-arrows for each index `0, 1, 2`.
const F_EDGES: [&[(u8, u8)]; 3] = [
    &[(10, 2), (11, 3), (12, 4), (13, 6), (14, E), (E, 1)],
    &[(2, 3), (3, 4), (4, 6), (5, 7), (7, 9), (10, 11), (11, 12), (12, 13)],
    &[(1, 2), (4, 5), (6, 8), (8, 10), (9, 11), (13, 14)],
];

/// The f-arrow tables for indices `0, 1, 2`, as `(source, target)` pairs.
pub fn edges(i: usize) -> impl Iterator<Item = (Letter, Letter)> {
    F_EDGES[i].iter().map(|&(s, t)| (Letter(s), Letter(t)))
}

/// The Kashiwara operator `f_i`; `None` when `b` has no outgoing `i`-arrow.
pub fn f_op(i: usize, b: Letter) -> Option<Letter> {
    F_EDGES[i].iter().find(|&&(s, _)| s == b.0).map(|&(_, t)| Letter(t))
}

/// The Kashiwara operator `e_i`, the reverse of `f_i`.
pub fn e_op(i: usize, b: Letter) -> Option<Letter> {
    F_EDGES[i].iter().find(|&&(_, t)| t == b.0).map(|&(s, _)| Letter(s))
}

/// `ε_i(b)`: how many times `e_i` applies before leaving the crystal.
pub fn epsilon(i: usize, b: Letter) -> i64 {
    let mut n = 0;
    let mut cur = b;
    while let Some(up) = e_op(i, cur) {
        n += 1;
        cur = up;
    }
    n
}

/// `φ_i(b)`: how many times `f_i` applies before leaving the crystal.
pub fn phi(i: usize, b: Letter) -> i64 {
    let mut n = 0;
    let mut cur = b;
    while let Some(down) = f_op(i, cur) {
        n += 1;
        cur = down;
    }
    n
}

/// Classical weight `Σ_{i=1,2} (φ_i(b) − ε_i(b)) Λ̄_i`.
pub fn weight(b: Letter) -> Weight {
    Weight::new(phi(1, b) - epsilon(1, b), phi(2, b) - epsilon(2, b))
}

/// Boxes removed from `(ν(1), ν(2))` when `δ` returns `b`.
///
/// Follows from `n1 = 3L − 2λ1 − 3λ2`, `n2 = 2L − λ1 − 2λ2` with `L` dropping by
/// one and `λ` by `wt(b)`.
pub fn box_counts(b: Letter) -> (i64, i64) {
    let w = weight(b);
    (3 - 2 * w.l1 - 3 * w.l2, 2 - w.l1 - 2 * w.l2)
}

/// The full crystal graph, including 0-arrows, in Graphviz DOT format.
pub fn to_dot() -> String {
    let mut out = String::from("digraph B21 {\n");
    for b in Letter::all() {
        out.push_str(&format!("  \"{}\";\n", b.label()));
    }
    for i in 0..3 {
        for (s, t) in edges(i) {
            out.push_str(&format!("  \"{}\" -> \"{}\" [label=\"{i}\"];\n", s.label(), t.label()));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(n: u8) -> Letter {
        Letter::boxed(n).unwrap()
    }

    #[test]
    fn operator_examples() {
        assert_eq!(f_op(2, l(1)), Some(l(2)));
        assert_eq!(f_op(0, l(14)), Some(Letter::EMPTY));
        assert_eq!(f_op(1, l(14)), None);
        assert_eq!(e_op(0, l(1)), Some(Letter::EMPTY));
        assert_eq!(e_op(1, l(3)), Some(l(2)));
        assert_eq!(e_op(2, l(1)), None);
    }

    #[test]
    fn string_lengths() {
        assert_eq!(epsilon(2, l(2)), 1);
        assert_eq!(phi(1, l(2)), 3);
        assert_eq!(epsilon(1, l(1)), 0);
        assert_eq!(epsilon(2, l(1)), 0);
    }

    #[test]
    fn letter_parsing_round_trips() {
        for b in Letter::all() {
            assert_eq!(b.label().parse::<Letter>().unwrap(), b);
        }
        assert!("0".parse::<Letter>().is_err());
        assert!("15".parse::<Letter>().is_err());
    }

    #[test]
    fn weight_parsing() {
        assert_eq!("2,-1".parse::<Weight>().unwrap(), Weight::new(2, -1));
        assert!("2".parse::<Weight>().is_err());
    }

    #[test]
    fn box_counts_of_extremes() {
        assert_eq!(box_counts(Letter::ONE), (0, 0));
        assert_eq!(box_counts(l(14)), (6, 4));
        assert_eq!(box_counts(Letter::EMPTY), (3, 2));
    }
}
