//! Structure of the fifteen-element crystal and its tensor powers.

use g2rc::crystal::{e_op, edges, epsilon, f_op, phi, to_dot, weight, Letter, Weight};
use g2rc::paths::{
    enumerate_paths, is_classically_restricted, is_classically_restricted_recursive, path_weight, tensor_e, Path,
};

const ALPHA: [Weight; 2] = [Weight::new(2, -1), Weight::new(-3, 2)];

#[test]
fn fifteen_distinct_elements() {
    let all: Vec<Letter> = Letter::all().collect();
    assert_eq!(all.len(), 15);
    let mut labels: Vec<String> = all.iter().map(|b| b.label()).collect();
    labels.sort();
    labels.dedup();
    assert_eq!(labels.len(), 15);
}

#[test]
fn e_and_f_are_partial_inverses() {
    for i in 0..3 {
        for b in Letter::all() {
            if let Some(c) = f_op(i, b) {
                assert_eq!(e_op(i, c), Some(b), "e_{i} f_{i} {b}");
            }
            if let Some(c) = e_op(i, b) {
                assert_eq!(f_op(i, c), Some(b), "f_{i} e_{i} {b}");
            }
        }
    }
}

#[test]
fn string_lengths_match_repeated_operators() {
    for i in 0..3 {
        for b in Letter::all() {
            let steps = |op: fn(usize, Letter) -> Option<Letter>| {
                std::iter::successors(Some(b), |&c| op(i, c)).count() as i64 - 1
            };
            assert_eq!(epsilon(i, b), steps(e_op), "ε_{i}({b})");
            assert_eq!(phi(i, b), steps(f_op), "φ_{i}({b})");
        }
    }
}

#[test]
fn classical_string_lengths_pair_with_weight() {
    for i in 1..=2 {
        for b in Letter::all() {
            assert_eq!(phi(i, b) - epsilon(i, b), weight(b).coroot(i), "⟨α_{i}^∨, wt({b})⟩");
        }
    }
}

#[test]
fn classical_edges_lower_weight_by_a_simple_root() {
    for i in 1..=2 {
        for (b, c) in edges(i) {
            assert_eq!(weight(c), weight(b) - ALPHA[i - 1], "{b} -{i}-> {c}");
        }
    }
}

#[test]
fn zero_arrows_close_the_affine_loop() {
    let one = Letter::boxed(1).unwrap();
    assert_eq!(f_op(0, Letter::EMPTY), Some(one));
    assert_eq!(e_op(0, one), Some(Letter::EMPTY));
    assert_eq!(edges(0).count(), 6);
}

#[test]
fn classical_weights_sum_to_zero() {
    let total = Letter::all().map(weight).fold(Weight::ZERO, |a, b| a + b);
    assert_eq!(total, Weight::ZERO);
}

#[test]
fn highest_weight_criteria_agree_on_all_short_paths() {
    for len in 0..=3 {
        let mut paths = vec![Vec::new()];
        for _ in 0..len {
            paths = paths
                .into_iter()
                .flat_map(|p: Vec<Letter>| Letter::all().map(move |b| [p.clone(), vec![b]].concat()))
                .collect();
        }
        for letters in paths {
            let p = Path(letters);
            let lam = path_weight(&p);
            if !lam.is_dominant() {
                continue;
            }
            assert_eq!(is_classically_restricted(&p, lam), is_classically_restricted_recursive(&p, lam), "{p}");
        }
    }
}

#[test]
fn enumerated_paths_are_killed_by_raising_operators() {
    for lam in [Weight::new(0, 1), Weight::new(2, 0), Weight::new(1, 1)] {
        for p in enumerate_paths(lam, 4).unwrap() {
            assert_eq!(path_weight(&p), lam);
            for i in 1..=2 {
                assert_eq!(tensor_e(i, &p).unwrap(), None, "e_{i} on {p}");
            }
        }
    }
}

#[test]
fn dot_lists_every_node_and_arrow() {
    let dot = to_dot();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), (0..3).map(|i| edges(i).count()).sum::<usize>());
    assert!(dot.contains("\"empty\" -> \"1\" [label=\"0\"]"));
}
