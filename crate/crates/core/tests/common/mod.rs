#![allow(dead_code)]

use num_traits::FromPrimitive;
use rand::Rng;
use robusteq::{ActionSet, ExactGame, ExactStrategy, FrequencyVector, Game, MixedStrategy, Rational};

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

pub fn fv(c: &[usize]) -> FrequencyVector {
    FrequencyVector::new(c.to_vec())
}

/// Point on the simplex with denominator `den`: spacings of sorted cuts.
pub fn random_strategy<R: Rng>(rng: &mut R, actions: usize, max_den: i64) -> ExactStrategy {
    let den = rng.random_range(1..=max_den);
    let mut cuts: Vec<i64> = (0..actions - 1).map(|_| rng.random_range(0..=den)).collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(den);
    MixedStrategy::new(cuts.windows(2).map(|w| q(w[1] - w[0], den)).collect()).unwrap()
}

/// Table game with utilities `p/d`, `0 <= p <= 12`, `1 <= d <= 4`.
pub fn random_game<R: Rng>(rng: &mut R, players: usize, actions: usize) -> ExactGame {
    Game::from_fn(players, ActionSet::numbered(actions).unwrap(), |_, _| {
        q(rng.random_range(0..=12), rng.random_range(1..=4))
    })
    .unwrap()
}

pub fn to_numeric(game: &ExactGame) -> Game<f64> {
    Game::from_fn(game.n_players(), game.actions().clone(), |a, f| {
        num_traits::ToPrimitive::to_f64(game.utility(a, f)).unwrap()
    })
    .unwrap()
}

pub fn strategy_to_f64(s: &ExactStrategy) -> MixedStrategy<f64> {
    MixedStrategy::new(
        s.probs()
            .iter()
            .map(|p| num_traits::ToPrimitive::to_f64(p).unwrap())
            .collect(),
    )
    .unwrap()
}

pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_f64(x).unwrap()
}
