use std::collections::BTreeMap;

use proptest::prelude::*;
use rvz_core::{
    cheb_n, game_value, potential, rendezvous_interval, EnumOptions, FiniteKernelSpace, GameOptions, NormSpec,
};

fn kernel_space(k: usize, entries: &[f64]) -> FiniteKernelSpace {
    let mut m = vec![vec![0.0; k]; k];
    let mut it = entries.iter();
    for i in 0..k {
        for j in i + 1..k {
            let v = *it.next().unwrap();
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    FiniteKernelSpace::from_kernel(m, BTreeMap::new()).unwrap()
}

fn arb_space() -> impl Strategy<Value = FiniteKernelSpace> {
    (2usize..7).prop_flat_map(|k| {
        prop::collection::vec(0.05f64..3.0, k * (k - 1) / 2).prop_map(move |e| kernel_space(k, &e))
    })
}

fn arb_split(k: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    let nonempty = move |mask: u32| (0..k).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>();
    (1u32..(1 << k), 1u32..(1 << k)).prop_map(move |(a, b)| (nonempty(a), nonempty(b)))
}

fn all(space: &FiniteKernelSpace) -> Vec<usize> {
    space.all_indices()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn witness_potentials_certify_the_bracket(space in arb_space()) {
        let idx = all(&space);
        let sol = game_value(&space, &idx, &idx, &GameOptions::default()).unwrap();
        prop_assert!(sol.value_hi - sol.value_lo <= 1e-8);
        let lower = potential(&space, &sol.mu_star, &idx).unwrap();
        let upper = potential(&space, &sol.nu_star, &idx).unwrap();
        prop_assert!(lower.min() >= sol.value_lo - 1e-9);
        prop_assert!(upper.max() <= sol.value_hi + 1e-9);
    }

    #[test]
    fn value_ignores_labels_and_scales_linearly(space in arb_space(), lambda in 0.1f64..10.0, seed in any::<u64>()) {
        let idx = all(&space);
        let base = game_value(&space, &idx, &idx, &GameOptions::default()).unwrap();

        let n = space.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let moved = space.relabeled(&perm).unwrap();
        let relabeled = game_value(&moved, &idx, &idx, &GameOptions::default()).unwrap();
        prop_assert!((relabeled.value_lo - base.value_lo).abs() <= 1e-8);

        let scaled = game_value(&space.scaled(lambda).unwrap(), &idx, &idx, &GameOptions::default()).unwrap();
        prop_assert!((scaled.value_lo - lambda * base.value_lo).abs() <= 1e-8 * lambda.max(1.0));
    }

    #[test]
    fn chebyshev_levels_bracket_the_game(space in arb_space(), n in 1usize..4) {
        let idx = all(&space);
        let sol = game_value(&space, &idx, &idx, &GameOptions::default()).unwrap();
        let level = cheb_n(&space, &idx, &idx, n, &EnumOptions::default()).unwrap();
        prop_assert!(level.m_n <= sol.value_hi + 1e-9);
        prop_assert!(level.m_bar_n >= sol.value_lo - 1e-9);
    }

    #[test]
    fn off_diagonal_games_stay_inside_enumeration(
        (space, (h, l)) in arb_space().prop_flat_map(|s| { let k = s.len(); (Just(s), arb_split(k)) })
    ) {
        let r = rendezvous_interval(&space, &h, &l, 3, 1e-9, &EnumOptions::default()).unwrap();
        prop_assert!(r.bracket.lower <= r.game.value_lo + 1e-9);
        prop_assert!(r.bracket.upper >= r.game.value_hi - 1e-9);
        if h == l {
            prop_assert!(r.game.diagonal);
        }
    }

    #[test]
    fn space_files_round_trip(space in arb_space()) {
        let text = serde_json::to_string(&space.to_space_file()).unwrap();
        let back = FiniteKernelSpace::from_json_str(&text).unwrap();
        prop_assert_eq!(back.kernel_matrix(), space.kernel_matrix());
    }
}

#[test]
fn point_space_json_round_trip_keeps_norm_and_subsets() {
    let text = r#"{"points": [[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]],
                   "norm": {"type": "lp", "p": 2.0},
                   "subsets": {"H": [0, 1], "L": [1, 2]}}"#;
    let space = FiniteKernelSpace::from_json_str(text).unwrap();
    assert_eq!(space.k(0, 1), 5.0);
    let again = FiniteKernelSpace::from_json_str(&serde_json::to_string(&space.to_space_file()).unwrap()).unwrap();
    assert_eq!(again, space);
    assert_eq!(again.subset("L").unwrap(), &[1, 2]);
}

#[test]
fn norm_names_parse_to_the_matching_kernel() {
    let x = [0.0, 0.0];
    let y = [1.0, 1.0];
    let cases = [("l2", 2f64.sqrt()), ("l1", 2.0), ("sup", 1.0), ("lp_metric(0.5)", 2.0), ("lp_quasi(0.5)", 4.0)];
    for (name, want) in cases {
        let spec: NormSpec = name.parse().unwrap();
        assert!((spec.eval(&x, &y).unwrap() - want).abs() < 1e-12, "{name}");
    }
    assert!("l0".parse::<NormSpec>().is_err());
    assert!("banana".parse::<NormSpec>().is_err());
}
