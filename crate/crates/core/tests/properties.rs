mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{q, random_game, random_strategy};
use robusteq::game::composition_rank;
use robusteq::{
    br_dynamics, composition_count, enumerate_compositions, expected_utility_mixed, freq_distribution, is_alpha_robust,
    make_matching_game, make_table_game, oracle_freq_dist, CrowdSpec, Defectors, DynamicsConfig, ExactGame,
    FrequencyVector, GameDocument, Limits, MixedStrategy, Profile, Rational, TieRule,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_crowd(rng: &mut ChaCha8Rng, size: usize, m: usize) -> CrowdSpec<Rational> {
    let alpha = rng.random_range(0..=size);
    let normals = (0..size - alpha).map(|_| random_strategy(rng, m, 12)).collect();
    let defectors = (0..alpha).map(|_| random_strategy(rng, m, 12)).collect();
    CrowdSpec::new(normals, Defectors::Mixed(defectors))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compositions_are_counted_ranked_and_ordered(total in 0usize..8, parts in 1usize..5) {
        let all = enumerate_compositions(total, parts).unwrap();
        prop_assert_eq!(all.len() as u128, composition_count(total, parts));
        for (i, c) in all.iter().enumerate() {
            prop_assert_eq!(c.counts().iter().sum::<usize>(), total);
            prop_assert_eq!(composition_rank(c.counts()), i);
        }
        prop_assert!(all.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn distribution_matches_enumeration(seed: u64, size in 0usize..6, m in 1usize..4) {
        let crowd = random_crowd(&mut rng(seed), size, m);
        let dp = freq_distribution(&crowd, m).unwrap();
        prop_assert_eq!(dp.total_mass(), q(1, 1));
        prop_assert_eq!(dp, oracle_freq_dist(&crowd, m, &Limits::default()).unwrap());
    }

    #[test]
    fn distribution_ignores_crowd_order(seed: u64, size in 1usize..6, m in 1usize..4) {
        let mut r = rng(seed);
        let crowd: Vec<_> = (0..size).map(|_| random_strategy(&mut r, m, 12)).collect();
        let mut shuffled = crowd.clone();
        shuffled.rotate_left(r.random_range(0..size));
        shuffled.reverse();
        prop_assert_eq!(
            freq_distribution(&CrowdSpec::normals_only(crowd, m), m).unwrap(),
            freq_distribution(&CrowdSpec::normals_only(shuffled, m), m).unwrap()
        );
    }

    #[test]
    fn expected_utility_is_linear_in_own_strategy(seed: u64, n in 2usize..5, m in 2usize..4, w in 0i64..=6) {
        let mut r = rng(seed);
        let game = random_game(&mut r, n, m);
        let crowd = random_crowd(&mut r, n - 1, m);
        let (s, t) = (random_strategy(&mut r, m, 12), random_strategy(&mut r, m, 12));
        let weight = q(w, 6);
        let mixed = s.mix(&t, &weight);
        let lhs = expected_utility_mixed(&game, &mixed, &crowd).unwrap();
        let rhs = weight.clone() * expected_utility_mixed(&game, &s, &crowd).unwrap()
            + (q(1, 1) - weight) * expected_utility_mixed(&game, &t, &crowd).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn matching_game_is_label_symmetric(n in 2usize..7, m in 2usize..5, shift in 1usize..4, strict: bool) {
        let tie = if strict { TieRule::Strict } else { TieRule::Inclusive };
        let game: ExactGame = make_matching_game(n, m, tie).unwrap();
        let rotate = |a: usize| (a + shift) % m;
        for (a, f, value) in game.entries() {
            let mut moved = vec![0; m];
            for (i, &c) in f.counts().iter().enumerate() {
                moved[rotate(i)] = c;
            }
            prop_assert_eq!(game.utility(rotate(a), &FrequencyVector::new(moved)), &value);
        }
    }

    #[test]
    fn table_documents_round_trip(seed: u64, n in 2usize..5, m in 1usize..4) {
        let game = random_game(&mut rng(seed), n, m);
        let text = GameDocument::from_game(&game, true).to_json_pretty();
        let back: ExactGame = make_table_game(&GameDocument::from_json(&text).unwrap()).unwrap();
        prop_assert_eq!(back.entries(), game.entries());
    }

    #[test]
    fn robustness_is_monotone_in_alpha(seed: u64, n in 2usize..6, m in 2usize..4, pure: bool) {
        let mut r = rng(seed);
        let game = random_game(&mut r, n, m);
        let strategy = if pure { MixedStrategy::pure(m, r.random_range(0..m)) } else { random_strategy(&mut r, m, 6) };
        let profile = Profile::symmetric(strategy);
        let robust: Vec<bool> = (0..n).map(|a| is_alpha_robust(&game, &profile, a).unwrap().is_robust()).collect();
        for a in 1..n {
            prop_assert!(!robust[a] || robust[a - 1], "robust at {} but not at {}", a, a - 1);
        }
    }

    #[test]
    fn dynamics_stay_on_the_simplex(seed: u64, n in 2usize..5, m in 2usize..4, alpha in 0usize..2, steps in 1usize..8) {
        let mut r = rng(seed);
        let game = random_game(&mut r, n, m);
        let init = random_strategy(&mut r, m, 12);
        let config = DynamicsConfig { max_iters: steps, damping: q(1, 2), ..DynamicsConfig::default() };
        let report = br_dynamics(&game, alpha.min(n - 1), &init, &config).unwrap();
        let last = report.dynamics.unwrap().last;
        prop_assert!(last.probs().iter().all(|p| *p >= q(0, 1)));
        prop_assert_eq!(last.probs().iter().cloned().sum::<Rational>(), q(1, 1));
    }
}
