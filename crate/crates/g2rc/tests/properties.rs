//! Randomized invariants over the enumerated sets and the file formats.

use std::sync::OnceLock;

use proptest::prelude::*;

use g2rc::bijection::{delta_theta, phi, phi_trace};
use g2rc::crystal::{Letter, Weight};
use g2rc::harness::cells;
use g2rc::inverse::{delta_theta_inv, phi_inv_with_fallback, preimage_search};
use g2rc::paths::{energy, enumerate_paths, path_weight, Path};
use g2rc::rigged_config::{enumerate_rc, RiggedConfiguration};

const MAX_L: usize = 5;

fn all_rcs() -> &'static [RiggedConfiguration] {
    static RCS: OnceLock<Vec<RiggedConfiguration>> = OnceLock::new();
    RCS.get_or_init(|| {
        (1..=MAX_L).flat_map(|l| cells(l).into_iter().flat_map(move |lam| enumerate_rc(lam, l).unwrap())).collect()
    })
}

fn all_paths() -> &'static [Path] {
    static PATHS: OnceLock<Vec<Path>> = OnceLock::new();
    PATHS.get_or_init(|| {
        (1..=MAX_L).flat_map(|l| cells(l).into_iter().flat_map(move |lam| enumerate_paths(lam, l).unwrap())).collect()
    })
}

fn any_rc() -> impl Strategy<Value = RiggedConfiguration> {
    (0..all_rcs().len()).prop_map(|k| all_rcs()[k].clone())
}

fn any_path() -> impl Strategy<Value = Path> {
    (0..all_paths().len()).prop_map(|k| all_paths()[k].clone())
}

fn any_letter() -> impl Strategy<Value = Letter> {
    (0..15usize).prop_map(Letter::from_index)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn phi_preserves_weight_and_statistic(rc in any_rc()) {
        let p = phi(&rc).unwrap();
        prop_assert_eq!(p.len(), rc.big_l);
        prop_assert_eq!(path_weight(&p), rc.lambda());
        prop_assert_eq!(energy(&p), rc.charge());
    }

    #[test]
    fn every_step_stays_valid(rc in any_rc()) {
        for o in phi_trace(&rc).unwrap() {
            prop_assert!(o.new_rc.validate().is_ok(), "{}", o.new_rc);
        }
    }

    #[test]
    fn search_recovers_the_step_input(rc in any_rc()) {
        let o = delta_theta(&rc).unwrap();
        prop_assert_eq!(preimage_search(&o.new_rc, o.letter).unwrap(), rc);
    }

    #[test]
    fn clauses_invert_the_step_when_they_apply(rc in any_rc()) {
        let o = delta_theta(&rc).unwrap();
        if let Ok(back) = delta_theta_inv(&o.new_rc, o.letter) {
            prop_assert_eq!(back.rc, rc);
        }
    }

    #[test]
    fn inverse_then_forward_is_identity(p in any_path()) {
        let (rc, sources) = phi_inv_with_fallback(&p).unwrap();
        prop_assert_eq!(sources.len(), p.len());
        prop_assert_eq!(phi(&rc).unwrap(), p);
    }

    #[test]
    fn rc_json_round_trips(rc in any_rc()) {
        let text = rc.to_json();
        prop_assert_eq!(RiggedConfiguration::from_json(&text).unwrap(), rc);
    }

    #[test]
    fn path_json_round_trips(letters in prop::collection::vec(any_letter(), 0..8)) {
        let p = Path(letters);
        let text = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<Path>(&text).unwrap(), p);
    }

    #[test]
    fn weight_text_round_trips(l1 in -50i64..50, l2 in -50i64..50) {
        let w = Weight::new(l1, l2);
        prop_assert_eq!(w.to_string().parse::<Weight>().unwrap(), w);
    }

    #[test]
    fn energy_ignores_trailing_highest_letters(p in any_path(), extra in 0usize..3) {
        let mut longer = p.0.clone();
        longer.extend(std::iter::repeat_n(Letter::ONE, extra));
        prop_assert_eq!(energy(&Path(longer)), energy(&p));
    }
}
