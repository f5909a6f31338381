//! Brute-force reference implementations.
//!
//! Nothing here shares code with the dynamic-programming or robust-set paths:
//! distributions come from enumerating every labeled action tuple, and
//! robustness is checked per player and per configuration directly. Caps are
//! hard errors so an oracle never silently weakens.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expectation::{CrowdSpec, Defectors, FrequencyDistribution};
use crate::game::{
    check_cap, composition_count, enumerate_compositions, FrequencyVector, Game, Limits, MixedStrategy, Profile,
};
use crate::scalar::{approx_ge, Scalar};

/// Lattice denominator for sampled defector strategies.
const SAMPLE_DENOMINATOR: i64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    ExhaustivePure,
    SampledMixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub robust: bool,
    /// The check that settled the verdict.
    pub method: OracleMethod,
    /// Mixed defector profiles actually drawn.
    pub samples: usize,
    pub seed: u64,
    pub pure_configs_checked: usize,
}

/// Law of the crowd's counts by enumerating all `m^k` labeled action tuples.
pub fn oracle_freq_dist<S: Scalar>(
    crowd: &CrowdSpec<S>,
    actions: usize,
    limits: &Limits,
) -> Result<FrequencyDistribution<S>> {
    let (fixed, mixed_defectors) = match crowd.defectors() {
        Defectors::Pure(g) => (g.clone(), &[][..]),
        Defectors::Mixed(v) => (FrequencyVector::zero(actions), v.as_slice()),
    };
    if fixed.parts() != actions {
        return Err(Error::SizeMismatch(
            "defector configuration does not match the action set".into(),
        ));
    }
    let players: Vec<&MixedStrategy<S>> = crowd.normals().iter().chain(mixed_defectors).collect();
    if players.iter().any(|s| s.len() != actions) {
        return Err(Error::SizeMismatch(
            "a crowd strategy does not match the action set".into(),
        ));
    }
    let tuples = (actions as u128).checked_pow(players.len() as u32).unwrap_or(u128::MAX);
    check_cap("oracle_max_tuples", tuples, limits.oracle_max_tuples)?;

    let mut masses = Vec::new();
    let mut tuple = vec![0usize; players.len()];
    loop {
        let mut p = S::one();
        for (s, &a) in players.iter().zip(&tuple) {
            p = p * s.prob(a).clone();
        }
        if !p.is_zero() {
            let mut counts = fixed.counts().to_vec();
            for &a in &tuple {
                counts[a] += 1;
            }
            masses.push((FrequencyVector::new(counts), p));
        }
        // Odometer increment; the empty tuple is visited exactly once.
        let mut pos = 0;
        loop {
            if pos == tuple.len() {
                let dist = FrequencyDistribution::from_masses(masses);
                return Ok(if dist.support().is_empty() {
                    FrequencyDistribution::point_mass(fixed)
                } else {
                    dist
                });
            }
            tuple[pos] += 1;
            if tuple[pos] < actions {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
    }
}

fn values_by_enumeration<S: Scalar>(game: &Game<S>, crowd: &CrowdSpec<S>) -> Result<Vec<S>> {
    let dist = oracle_freq_dist(crowd, game.action_count(), game.limits())?;
    Ok((0..game.action_count())
        .map(|a| {
            dist.support()
                .iter()
                .fold(S::zero(), |acc, (f, p)| acc + p.clone() * game.utility(a, f).clone())
        })
        .collect())
}

fn support_is_optimal<S: Scalar>(own: &MixedStrategy<S>, values: &[S]) -> bool {
    let best = S::max_of(values).expect("at least one action");
    own.support().iter().all(|&a| approx_ge(&values[a], &best))
}

/// A mixed strategy drawn uniformly from the simplex lattice with
/// denominator `SAMPLE_DENOMINATOR` (spacings of sorted uniform cut points).
pub fn sample_simplex<S: Scalar, R: Rng>(rng: &mut R, actions: usize) -> MixedStrategy<S> {
    let mut cuts: Vec<i64> = (0..actions - 1)
        .map(|_| rng.random_range(0..=SAMPLE_DENOMINATOR))
        .collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(SAMPLE_DENOMINATOR);
    let probs = cuts
        .windows(2)
        .map(|w| S::from_ratio(w[1] - w[0], SAMPLE_DENOMINATOR))
        .collect();
    MixedStrategy::new(probs).expect("lattice spacings sum to one")
}

/// Generator for sample `index` under `seed`: one ChaCha stream per sample,
/// so draws do not depend on evaluation order.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Direct check of the robustness condition for a profile of the `N - alpha`
/// normal players: every pure defector configuration, then (if those all
/// pass) `mixed_samples` independent mixed defector profiles.
pub fn oracle_is_robust<S: Scalar>(
    game: &Game<S>,
    profile: &Profile<S>,
    alpha: usize,
    mixed_samples: usize,
    seed: u64,
) -> Result<OracleVerdict> {
    let n = game.n_players();
    if alpha >= n {
        return Err(Error::AlphaOutOfRange { alpha, max: n - 1 });
    }
    let m = game.action_count();
    check_cap(
        "oracle_max_profiles",
        composition_count(alpha, m),
        game.limits().oracle_max_profiles,
    )?;
    let normals = profile.expand(n - alpha)?;
    let configs = enumerate_compositions(alpha, m)?;
    let others_of = |i: usize| -> Vec<MixedStrategy<S>> {
        normals
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, s)| s.clone())
            .collect()
    };

    let mut pure_configs_checked = 0;
    for (i, own) in normals.iter().enumerate() {
        for g in &configs {
            pure_configs_checked += 1;
            let values = values_by_enumeration(game, &CrowdSpec::pure_defectors(others_of(i), g.clone()))?;
            if !support_is_optimal(own, &values) {
                return Ok(OracleVerdict {
                    robust: false,
                    method: OracleMethod::ExhaustivePure,
                    samples: 0,
                    seed,
                    pure_configs_checked,
                });
            }
        }
    }

    // Identical normal players face identical crowds.
    let distinct: Vec<usize> = (0..normals.len())
        .filter(|&i| !normals[..i].contains(&normals[i]))
        .collect();
    if alpha > 0 {
        for sample in 0..mixed_samples {
            let mut rng = sample_rng(seed, sample as u64);
            let defectors: Vec<MixedStrategy<S>> = (0..alpha).map(|_| sample_simplex(&mut rng, m)).collect();
            for &i in &distinct {
                let crowd = CrowdSpec::new(others_of(i), Defectors::Mixed(defectors.clone()));
                if !support_is_optimal(&normals[i], &values_by_enumeration(game, &crowd)?) {
                    return Ok(OracleVerdict {
                        robust: false,
                        method: OracleMethod::SampledMixed,
                        samples: sample + 1,
                        seed,
                        pure_configs_checked,
                    });
                }
            }
        }
    }
    Ok(OracleVerdict {
        robust: true,
        method: OracleMethod::ExhaustivePure,
        samples: if alpha > 0 { mixed_samples } else { 0 },
        seed,
        pure_configs_checked,
    })
}

/// Pure Nash equilibria as action-count assignments, by checking every
/// unilateral pure deviation against the utility table.
pub fn oracle_pure_nash<S: Scalar>(game: &Game<S>) -> Result<Vec<FrequencyVector>> {
    let n = game.n_players();
    let m = game.action_count();
    check_cap(
        "oracle_max_profiles",
        composition_count(n, m),
        game.limits().oracle_max_profiles,
    )?;
    Ok(enumerate_compositions(n, m)?
        .into_iter()
        .filter(|assignment| {
            assignment.occupied().all(|a| {
                let others = assignment.minus_one(a).expect("occupied action");
                let own = game.utility(a, &others);
                (0..m).all(|b| approx_ge(own, game.utility(b, &others)))
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expectation::freq_distribution;
    use crate::game::{make_matching_game, ActionSet, TieRule};
    use num_rational::BigRational;

    type Q = BigRational;

    fn fv(c: &[usize]) -> FrequencyVector {
        FrequencyVector::new(c.to_vec())
    }

    #[test]
    fn empty_crowd_is_point_mass_at_zero() {
        let crowd = CrowdSpec::<Q>::normals_only(vec![], 3);
        let d = oracle_freq_dist(&crowd, 3, &Limits::default()).unwrap();
        assert_eq!(d.support(), &[(fv(&[0, 0, 0]), Q::from_count(1))]);
    }

    #[test]
    fn pure_crowd_is_point_mass() {
        let crowd = CrowdSpec::pure_defectors(vec![MixedStrategy::<Q>::pure(2, 1); 2], fv(&[1, 0]));
        let d = oracle_freq_dist(&crowd, 2, &Limits::default()).unwrap();
        assert_eq!(d.support(), &[(fv(&[1, 2]), Q::from_count(1))]);
    }

    #[test]
    fn agrees_with_dp_on_a_mixed_crowd() {
        let s = MixedStrategy::new(vec![Q::from_ratio(1, 2), Q::from_ratio(1, 3), Q::from_ratio(1, 6)]).unwrap();
        let crowd = CrowdSpec::new(
            vec![s.clone(), MixedStrategy::uniform(3)],
            Defectors::Mixed(vec![s, MixedStrategy::pure(3, 2)]),
        );
        assert_eq!(
            oracle_freq_dist(&crowd, 3, &Limits::default()).unwrap(),
            freq_distribution(&crowd, 3).unwrap()
        );
    }

    #[test]
    fn tuple_cap_is_enforced() {
        let crowd = CrowdSpec::<Q>::normals_only(vec![MixedStrategy::uniform(3); 5], 3);
        let limits = Limits {
            oracle_max_tuples: 100,
            ..Limits::default()
        };
        assert!(matches!(
            oracle_freq_dist(&crowd, 3, &limits),
            Err(Error::CapExceeded {
                cap: "oracle_max_tuples",
                ..
            })
        ));
    }

    #[test]
    fn oracle_robustness_examples() {
        let game = make_matching_game::<Q>(5, 3, TieRule::Inclusive).unwrap();
        let pure1 = Profile::symmetric(MixedStrategy::pure(3, 0));
        let v = oracle_is_robust(&game, &pure1, 2, 100, 7).unwrap();
        assert!(v.robust);
        assert_eq!(v.samples, 100);
        let v = oracle_is_robust(&game, &pure1, 3, 100, 7).unwrap();
        assert!(!v.robust);
        assert_eq!(v.method, OracleMethod::ExhaustivePure);
    }

    #[test]
    fn sampling_is_reproducible() {
        let a: MixedStrategy<Q> = sample_simplex(&mut sample_rng(11, 3), 3);
        let b: MixedStrategy<Q> = sample_simplex(&mut sample_rng(11, 3), 3);
        let c: MixedStrategy<Q> = sample_simplex(&mut sample_rng(11, 4), 3);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn pure_nash_examples() {
        let game = make_matching_game::<Q>(3, 3, TieRule::Inclusive).unwrap();
        // In (2,1,0) the lone player gains by joining the pair; in (1,1,1)
        // every player sees zero on its own action.
        assert_eq!(
            oracle_pure_nash(&game).unwrap(),
            vec![fv(&[3, 0, 0]), fv(&[0, 3, 0]), fv(&[0, 0, 3])]
        );

        let two = make_matching_game::<Q>(2, 2, TieRule::Inclusive).unwrap();
        assert_eq!(oracle_pure_nash(&two).unwrap(), vec![fv(&[2, 0]), fv(&[0, 2])]);

        let constant = Game::<Q>::from_fn(3, ActionSet::numbered(2).unwrap(), |_, _| Q::from_count(1)).unwrap();
        assert_eq!(oracle_pure_nash(&constant).unwrap().len(), 4);
    }
}
