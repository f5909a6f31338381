//! Law of the others' frequency vector under a product of mixed strategies,
//! and the expected utilities built on it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::game::{FrequencyVector, Game, MixedStrategy};
use crate::scalar::Scalar;

/// How the defectors in a crowd behave.
#[derive(Debug, Clone, PartialEq)]
pub enum Defectors<S> {
    /// Counts per action of pure-playing defectors.
    Pure(FrequencyVector),
    /// One independent mixed strategy per defector.
    Mixed(Vec<MixedStrategy<S>>),
}

/// Everyone other than the evaluated player: normal players plus defectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CrowdSpec<S> {
    normals: Vec<MixedStrategy<S>>,
    defectors: Defectors<S>,
}

impl<S: Scalar> CrowdSpec<S> {
    pub fn new(normals: Vec<MixedStrategy<S>>, defectors: Defectors<S>) -> Self {
        Self { normals, defectors }
    }

    pub fn pure_defectors(normals: Vec<MixedStrategy<S>>, config: FrequencyVector) -> Self {
        Self::new(normals, Defectors::Pure(config))
    }

    /// Only normal players, no defectors.
    pub fn normals_only(normals: Vec<MixedStrategy<S>>, actions: usize) -> Self {
        Self::pure_defectors(normals, FrequencyVector::zero(actions))
    }

    pub fn normals(&self) -> &[MixedStrategy<S>] {
        &self.normals
    }

    pub fn defectors(&self) -> &Defectors<S> {
        &self.defectors
    }

    pub fn alpha(&self) -> usize {
        match &self.defectors {
            Defectors::Pure(g) => g.total(),
            Defectors::Mixed(v) => v.len(),
        }
    }

    /// Number of players in the crowd.
    pub fn size(&self) -> usize {
        self.normals.len() + self.alpha()
    }

    pub(crate) fn check(&self, actions: usize) -> Result<()> {
        let bad_len = |s: &MixedStrategy<S>| s.len() != actions;
        let mixed = match &self.defectors {
            Defectors::Pure(g) if g.parts() != actions => {
                return Err(Error::SizeMismatch(format!(
                    "defector configuration {g} has {} parts but there are {actions} actions",
                    g.parts()
                )))
            }
            Defectors::Pure(_) => &[][..],
            Defectors::Mixed(v) => v.as_slice(),
        };
        if self.normals.iter().chain(mixed).any(bad_len) {
            return Err(Error::SizeMismatch(format!(
                "a crowd strategy does not have {actions} entries"
            )));
        }
        Ok(())
    }
}

/// Probability mass function over frequency vectors sharing one total.
///
/// The support is sorted in composition order (first coordinate descending).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyDistribution<S> {
    support: Vec<(FrequencyVector, S)>,
}

impl<S: Scalar> FrequencyDistribution<S> {
    pub fn point_mass(v: FrequencyVector) -> Self {
        Self {
            support: vec![(v, S::one())],
        }
    }

    /// Collects masses, merging duplicates and dropping zeros.
    pub fn from_masses(masses: impl IntoIterator<Item = (FrequencyVector, S)>) -> Self {
        let mut merged: BTreeMap<FrequencyVector, S> = BTreeMap::new();
        for (v, p) in masses {
            let slot = merged.entry(v).or_insert_with(S::zero);
            *slot = slot.clone() + p;
        }
        // BTreeMap iterates ascending; composition order is the reverse.
        let support = merged.into_iter().rev().filter(|(_, p)| !p.is_zero()).collect();
        Self { support }
    }

    pub fn support(&self) -> &[(FrequencyVector, S)] {
        &self.support
    }

    pub fn total_mass(&self) -> S {
        self.support.iter().fold(S::zero(), |acc, (_, p)| acc + p.clone())
    }

    pub fn probability(&self, v: &FrequencyVector) -> S {
        self.support
            .iter()
            .find(|(w, _)| w == v)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(S::zero)
    }

    /// Shifts every vector by `offset` (adding pure players).
    pub fn shifted(&self, offset: &FrequencyVector) -> Self {
        Self {
            support: self.support.iter().map(|(v, p)| (v.plus(offset), p.clone())).collect(),
        }
    }

    /// Adds one independent player with strategy `s`.
    pub fn fold_player(&self, s: &MixedStrategy<S>) -> Self {
        let mut next: BTreeMap<FrequencyVector, S> = BTreeMap::new();
        for (v, p) in &self.support {
            for (a, q) in s.probs().iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                let mut w = v.clone();
                w.add_one(a);
                let slot = next.entry(w).or_insert_with(S::zero);
                *slot = slot.clone() + p.clone() * q.clone();
            }
        }
        Self {
            support: next.into_iter().rev().collect(),
        }
    }

    /// Expected utility of `action` when the others' counts follow this law.
    pub fn expected_utility(&self, game: &Game<S>, action: usize) -> S {
        self.support.iter().fold(S::zero(), |acc, (f, p)| {
            acc + p.clone() * game.utility(action, f).clone()
        })
    }

    /// Expected utility of every action.
    pub fn action_values(&self, game: &Game<S>) -> Vec<S> {
        (0..game.action_count())
            .map(|a| self.expected_utility(game, a))
            .collect()
    }
}

/// Distribution of independent players' counts, folded in order from the zero vector.
pub fn fold_strategies<S: Scalar>(strategies: &[MixedStrategy<S>], actions: usize) -> FrequencyDistribution<S> {
    strategies.iter().fold(
        FrequencyDistribution::point_mass(FrequencyVector::zero(actions)),
        |d, s| d.fold_player(s),
    )
}

/// Exact law of the crowd's frequency vector, by dynamic programming over players.
pub fn freq_distribution<S: Scalar>(crowd: &CrowdSpec<S>, actions: usize) -> Result<FrequencyDistribution<S>> {
    crowd.check(actions)?;
    let normals = fold_strategies(&crowd.normals, actions);
    Ok(match &crowd.defectors {
        Defectors::Pure(g) => normals.shifted(g),
        Defectors::Mixed(v) => v.iter().fold(normals, |d, s| d.fold_player(s)),
    })
}

fn check_crowd_size<S: Scalar>(game: &Game<S>, crowd: &CrowdSpec<S>) -> Result<()> {
    if crowd.size() != game.n_players() - 1 {
        return Err(Error::SizeMismatch(format!(
            "crowd has {} players but a {}-player game needs {}",
            crowd.size(),
            game.n_players(),
            game.n_players() - 1
        )));
    }
    Ok(())
}

/// Expected utility of a pure own action against the crowd.
pub fn expected_utility<S: Scalar>(game: &Game<S>, own_action: usize, crowd: &CrowdSpec<S>) -> Result<S> {
    check_crowd_size(game, crowd)?;
    if own_action >= game.action_count() {
        return Err(Error::SizeMismatch(format!("action index {own_action} out of range")));
    }
    Ok(freq_distribution(crowd, game.action_count())?.expected_utility(game, own_action))
}

/// Expected utility of a mixed own strategy against the crowd.
pub fn expected_utility_mixed<S: Scalar>(game: &Game<S>, own: &MixedStrategy<S>, crowd: &CrowdSpec<S>) -> Result<S> {
    check_crowd_size(game, crowd)?;
    if own.len() != game.action_count() {
        return Err(Error::SizeMismatch("own strategy does not match the action set".into()));
    }
    let values = freq_distribution(crowd, game.action_count())?.action_values(game);
    Ok(mix_values(own, &values))
}

/// `sum_a own(a) * values[a]`.
pub fn mix_values<S: Scalar>(own: &MixedStrategy<S>, values: &[S]) -> S {
    own.probs()
        .iter()
        .zip(values)
        .fold(S::zero(), |acc, (p, v)| acc + p.clone() * v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{make_matching_game, TieRule};
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(p: i64, d: i64) -> Q {
        Q::from_ratio(p, d)
    }

    fn fv(c: &[usize]) -> FrequencyVector {
        FrequencyVector::new(c.to_vec())
    }

    #[test]
    fn pure_crowd_is_point_mass() {
        let crowd = CrowdSpec::normals_only(vec![MixedStrategy::<Q>::pure(2, 0); 3], 2);
        let d = freq_distribution(&crowd, 2).unwrap();
        assert_eq!(d.support(), &[(fv(&[3, 0]), q(1, 1))]);
    }

    #[test]
    fn binomial_crowd() {
        let crowd = CrowdSpec::normals_only(vec![MixedStrategy::<Q>::uniform(2); 2], 2);
        let d = freq_distribution(&crowd, 2).unwrap();
        assert_eq!(
            d.support(),
            &[(fv(&[2, 0]), q(1, 4)), (fv(&[1, 1]), q(1, 2)), (fv(&[0, 2]), q(1, 4))]
        );
    }

    #[test]
    fn product_crowd() {
        let crowd = CrowdSpec::normals_only(vec![MixedStrategy::<Q>::pure(2, 0), MixedStrategy::uniform(2)], 2);
        let d = freq_distribution(&crowd, 2).unwrap();
        assert_eq!(d.support(), &[(fv(&[2, 0]), q(1, 2)), (fv(&[1, 1]), q(1, 2))]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let crowd = CrowdSpec::normals_only(vec![MixedStrategy::<Q>::uniform(3)], 2);
        assert!(matches!(freq_distribution(&crowd, 2), Err(Error::SizeMismatch(_))));
    }

    #[test]
    fn matching_expected_utilities() {
        let game = make_matching_game::<Q>(3, 3, TieRule::Inclusive).unwrap();
        let pure1 = MixedStrategy::<Q>::pure(3, 0);
        let crowd = CrowdSpec::normals_only(vec![pure1.clone(); 2], 3);
        assert_eq!(expected_utility(&game, 0, &crowd).unwrap(), q(1, 1));

        let crowd = CrowdSpec::pure_defectors(vec![pure1], fv(&[0, 1, 0]));
        assert_eq!(expected_utility(&game, 0, &crowd).unwrap(), q(1, 1));

        // Brute force over the 9 equally likely action pairs of the two others:
        // own action 1 wins on (1,1), (1,2), (2,1), (1,3), (3,1).
        let uniform = CrowdSpec::normals_only(vec![MixedStrategy::<Q>::uniform(3); 2], 3);
        assert_eq!(expected_utility(&game, 0, &uniform).unwrap(), q(5, 9));
        assert_eq!(
            expected_utility_mixed(&game, &MixedStrategy::uniform(3), &uniform).unwrap(),
            q(5, 9)
        );
    }

    #[test]
    fn mixed_own_strategy_is_linear() {
        let game = make_matching_game::<Q>(4, 3, TieRule::Strict).unwrap();
        let crowd = CrowdSpec::new(
            vec![MixedStrategy::new(vec![q(1, 2), q(1, 3), q(1, 6)]).unwrap()],
            Defectors::Mixed(vec![MixedStrategy::uniform(3), MixedStrategy::pure(3, 2)]),
        );
        let s1 = MixedStrategy::new(vec![q(1, 4), q(3, 4), q(0, 1)]).unwrap();
        let s2 = MixedStrategy::pure(3, 2);
        let lambda = q(1, 3);
        let mixed = s1.mix(&s2, &lambda);
        let lhs = expected_utility_mixed(&game, &mixed, &crowd).unwrap();
        let rhs = lambda.clone() * expected_utility_mixed(&game, &s1, &crowd).unwrap()
            + (q(1, 1) - lambda) * expected_utility_mixed(&game, &s2, &crowd).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(
            expected_utility_mixed(&game, &s2, &crowd).unwrap(),
            expected_utility(&game, 2, &crowd).unwrap()
        );
    }

    #[test]
    fn crowd_size_must_match_game() {
        let game = make_matching_game::<Q>(3, 2, TieRule::Inclusive).unwrap();
        let crowd = CrowdSpec::normals_only(vec![MixedStrategy::<Q>::uniform(2)], 2);
        assert!(expected_utility(&game, 0, &crowd).is_err());
    }
}
