//! Best responses against defector configurations, the robust-action set
//! (actions optimal against every configuration), robustness certificates and
//! the defection index.
//!
//! Defectors are enumerated as pure configurations, i.e. compositions of
//! `alpha` over the actions. This loses nothing: the objective under mixed
//! defectors is a convex combination of the pure-configuration objectives, so
//! an action maximizing all of them maximizes every mixture, and pure
//! configurations are themselves admissible defector behavior. The same
//! argument covers correlated defectors.

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expectation::{fold_strategies, mix_values, CrowdSpec, FrequencyDistribution};
use crate::game::{enumerate_compositions, FrequencyVector, Game, MixedStrategy, Profile};
use crate::scalar::{approx_ge, strictly_greater, Scalar};

// Below this many configurations the rayon fan-out costs more than it saves.
const PARALLEL_CONFIGS: usize = 256;

/// Pure actions attaining the maximal expected utility. Mixtures over exactly
/// these actions are the full set of mixed best responses.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseSet<S> {
    pub actions: Vec<usize>,
    pub value: S,
    /// Expected utility of every pure action.
    pub values: Vec<S>,
}

impl<S: Scalar> BestResponseSet<S> {
    pub fn from_values(values: Vec<S>) -> Self {
        let value = S::max_of(&values).expect("at least one action");
        let actions = values
            .iter()
            .enumerate()
            .filter(|(_, v)| approx_ge(*v, &value))
            .map(|(a, _)| a)
            .collect();
        Self { actions, value, values }
    }

    pub fn contains(&self, action: usize) -> bool {
        self.actions.contains(&action)
    }

    pub fn contains_all(&self, support: &[usize]) -> bool {
        support.iter().all(|a| self.contains(*a))
    }
}

/// Actions that are best responses against every defector configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustActionSet<S> {
    pub actions: Vec<usize>,
    pub per_config: Vec<(FrequencyVector, BestResponseSet<S>)>,
}

impl<S: Scalar> RobustActionSet<S> {
    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn contains_all(&self, support: &[usize]) -> bool {
        support.iter().all(|a| self.actions.contains(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Robust,
    NotRobust,
}

/// A defector configuration under which a normal player strictly gains by deviating.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<S> {
    /// Index of the deviating player among the normal players.
    pub player: usize,
    pub config: FrequencyVector,
    pub deviation: usize,
    pub deviation_value: S,
    /// Expected utility of the player's own strategy under `config`.
    pub strategy_value: S,
    pub gain: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayerEvidence<S> {
    pub player: usize,
    pub robust_set: RobustActionSet<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessCertificate<S> {
    pub verdict: Verdict,
    pub alpha: usize,
    pub witness: Option<Witness<S>>,
    /// Robust sets of the checked normal players (players with identical
    /// strategies face identical crowds and are checked once).
    pub evidence: Vec<PlayerEvidence<S>>,
    /// Set when argmax membership was decided with a tolerance.
    pub tolerance_qualified: bool,
    /// Players of the full profile treated as defectors, when known.
    pub defectors: Vec<usize>,
}

impl<S: Scalar> RobustnessCertificate<S> {
    pub fn is_robust(&self) -> bool {
        self.verdict == Verdict::Robust
    }
}

fn crowd_base<S: Scalar>(game: &Game<S>, normals: &[MixedStrategy<S>]) -> Result<FrequencyDistribution<S>> {
    let m = game.action_count();
    if let Some(s) = normals.iter().find(|s| s.len() != m) {
        return Err(Error::SizeMismatch(format!(
            "strategy has {} entries but the game has {m} actions",
            s.len()
        )));
    }
    Ok(fold_strategies(normals, m))
}

fn response_against<S: Scalar>(
    game: &Game<S>,
    base: &FrequencyDistribution<S>,
    config: &FrequencyVector,
) -> BestResponseSet<S> {
    BestResponseSet::from_values(base.shifted(config).action_values(game))
}

/// Best responses when the other normal players follow `normal_profile` and
/// `config` counts the defectors' pure actions.
pub fn best_response_set<S: Scalar>(
    game: &Game<S>,
    normal_profile: &Profile<S>,
    config: &FrequencyVector,
) -> Result<BestResponseSet<S>> {
    let alpha = config.total();
    game.check_alpha(alpha)?;
    if config.parts() != game.action_count() {
        return Err(Error::SizeMismatch(format!(
            "configuration {config} does not match the action set"
        )));
    }
    let normals = normal_profile.expand(game.n_players() - alpha - 1)?;
    let base = crowd_base(game, &normals)?;
    Ok(response_against(game, &base, config))
}

pub(crate) fn robust_set_for<S: Scalar>(
    game: &Game<S>,
    normals: &[MixedStrategy<S>],
    alpha: usize,
) -> Result<RobustActionSet<S>> {
    let m = game.action_count();
    game.limits().check_compositions(alpha, m)?;
    let base = crowd_base(game, normals)?;
    let configs = enumerate_compositions(alpha, m)?;
    let per_config: Vec<_> = if configs.len() >= PARALLEL_CONFIGS {
        configs
            .into_par_iter()
            .map(|g| {
                let br = response_against(game, &base, &g);
                (g, br)
            })
            .collect()
    } else {
        configs
            .into_iter()
            .map(|g| {
                let br = response_against(game, &base, &g);
                (g, br)
            })
            .collect()
    };
    let actions = (0..m)
        .filter(|a| per_config.iter().all(|(_, br)| br.contains(*a)))
        .collect();
    Ok(RobustActionSet { actions, per_config })
}

/// Intersection of the best-response sets over every pure defector configuration.
/// `normal_profile` covers the `N - alpha - 1` other normal players.
pub fn robust_action_set<S: Scalar>(
    game: &Game<S>,
    normal_profile: &Profile<S>,
    alpha: usize,
) -> Result<RobustActionSet<S>> {
    game.check_alpha(alpha)?;
    let normals = normal_profile.expand(game.n_players() - alpha - 1)?;
    robust_set_for(game, &normals, alpha)
}

fn check_normals<S: Scalar>(
    game: &Game<S>,
    normals: &[MixedStrategy<S>],
    alpha: usize,
    symmetric: bool,
) -> Result<RobustnessCertificate<S>> {
    let mut evidence = Vec::new();
    let players: Vec<usize> = if symmetric {
        vec![0]
    } else {
        // Identical strategies face the same crowd.
        (0..normals.len())
            .filter(|&i| !normals[..i].contains(&normals[i]))
            .collect()
    };
    for i in players {
        let others: Vec<MixedStrategy<S>> = normals
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, s)| s.clone())
            .collect();
        let own = &normals[i];
        let support = own.support();
        let robust_set = robust_set_for(game, &others, alpha)?;
        if !robust_set.contains_all(&support) {
            let (config, br) = robust_set
                .per_config
                .iter()
                .find(|(_, br)| !br.contains_all(&support))
                .expect("a support action is missing from some configuration's best responses");
            let strategy_value = mix_values(own, &br.values);
            let witness = Witness {
                player: i,
                config: config.clone(),
                deviation: br.actions[0],
                deviation_value: br.value.clone(),
                gain: br.value.clone() - strategy_value.clone(),
                strategy_value,
            };
            return Ok(RobustnessCertificate {
                verdict: Verdict::NotRobust,
                alpha,
                witness: Some(witness),
                evidence: Vec::new(),
                tolerance_qualified: !S::EXACT,
                defectors: Vec::new(),
            });
        }
        evidence.push(PlayerEvidence { player: i, robust_set });
    }
    Ok(RobustnessCertificate {
        verdict: Verdict::Robust,
        alpha,
        witness: None,
        evidence,
        tolerance_qualified: !S::EXACT,
        defectors: Vec::new(),
    })
}

/// Checks that every normal player's strategy is supported on its robust
/// action set. `profile` covers the `N - alpha` normal players.
pub fn is_alpha_robust<S: Scalar>(
    game: &Game<S>,
    profile: &Profile<S>,
    alpha: usize,
) -> Result<RobustnessCertificate<S>> {
    game.check_alpha(alpha)?;
    profile.check_actions(game.action_count())?;
    let normals = profile.expand(game.n_players() - alpha)?;
    check_normals(game, &normals, alpha, profile.is_symmetric())
}

/// Re-evaluates a not-robust witness from scratch and confirms the strict gain.
pub fn witness_holds<S: Scalar>(game: &Game<S>, normals: &[MixedStrategy<S>], witness: &Witness<S>) -> Result<bool> {
    let own = normals
        .get(witness.player)
        .ok_or_else(|| Error::SizeMismatch("witness player is not a normal player".into()))?;
    let others: Vec<_> = normals
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != witness.player)
        .map(|(_, s)| s.clone())
        .collect();
    let crowd = CrowdSpec::pure_defectors(others, witness.config.clone());
    let deviation = crate::expectation::expected_utility(game, witness.deviation, &crowd)?;
    let current = crate::expectation::expected_utility_mixed(game, own, &crowd)?;
    Ok(strictly_greater(&deviation, &current))
}

/// Robustness of a full `N`-player profile at level `alpha`: whichever
/// `alpha` players defect, the remaining ones must not want to deviate.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectionCheck<S> {
    pub alpha: usize,
    pub robust: bool,
    /// One certificate per distinct choice of defectors when robust; the
    /// failing one alone otherwise.
    pub cases: Vec<RobustnessCertificate<S>>,
}

impl<S: Scalar> DefectionCheck<S> {
    pub fn first_witness(&self) -> Option<&Witness<S>> {
        self.cases.iter().find_map(|c| c.witness.as_ref())
    }
}

/// Strategies of the players left after removing `defectors` from `full`.
pub fn remaining_players<S: Scalar>(full: &[MixedStrategy<S>], defectors: &[usize]) -> Vec<MixedStrategy<S>> {
    full.iter()
        .enumerate()
        .filter(|(i, _)| !defectors.contains(i))
        .map(|(_, s)| s.clone())
        .collect()
}

/// Checks `profile` (covering all `N` players) against every choice of `alpha` defectors.
///
/// Players with identical strategies are interchangeable, so choices are
/// enumerated as counts removed from each group of identical players.
pub fn check_profile<S: Scalar>(game: &Game<S>, profile: &Profile<S>, alpha: usize) -> Result<DefectionCheck<S>> {
    game.check_alpha(alpha)?;
    profile.check_actions(game.action_count())?;
    let n = game.n_players();
    if profile.is_symmetric() {
        let normal = Profile::symmetric(profile.strategies()[0].clone());
        let mut cert = is_alpha_robust(game, &normal, alpha)?;
        cert.defectors = (n - alpha..n).collect();
        return Ok(DefectionCheck {
            alpha,
            robust: cert.is_robust(),
            cases: vec![cert],
        });
    }
    let full = profile.expand(n)?;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, s) in full.iter().enumerate() {
        match groups.iter_mut().find(|g| full[g[0]] == *s) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    game.limits().check_compositions(alpha, groups.len())?;
    let mut cases = Vec::new();
    for removal in enumerate_compositions(alpha, groups.len())? {
        if removal.counts().iter().zip(&groups).any(|(&r, g)| r > g.len()) {
            continue;
        }
        let defectors: Vec<usize> = removal
            .counts()
            .iter()
            .zip(&groups)
            .flat_map(|(&r, g)| g[g.len() - r..].iter().copied())
            .sorted()
            .collect();
        let normals = remaining_players(&full, &defectors);
        let mut cert = check_normals(game, &normals, alpha, false)?;
        cert.defectors = defectors;
        if !cert.is_robust() {
            return Ok(DefectionCheck {
                alpha,
                robust: false,
                cases: vec![cert],
            });
        }
        cases.push(cert);
    }
    Ok(DefectionCheck {
        alpha,
        robust: true,
        cases,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectionReport<S> {
    /// Largest robust `alpha`, or -1 when the profile is not a Nash equilibrium.
    pub index: i64,
    /// Checks for `alpha = 0, 1, ...` up to and including the first failure.
    pub chain: Vec<DefectionCheck<S>>,
}

/// Scans `alpha` upward until the profile stops being robust. Stopping at the
/// first failure is valid because robustness is monotone: an extra defector
/// can mimic the strategy of the player it replaces.
pub fn defection_report<S: Scalar>(game: &Game<S>, profile: &Profile<S>) -> Result<DefectionReport<S>> {
    if !profile.covers(game.n_players()) {
        return Err(Error::SizeMismatch(format!(
            "profile lists {} strategies for a {}-player game",
            profile.strategies().len(),
            game.n_players()
        )));
    }
    let mut chain = Vec::new();
    let mut index = -1;
    for alpha in 0..game.n_players() {
        let check = check_profile(game, profile, alpha)?;
        let robust = check.robust;
        chain.push(check);
        if !robust {
            break;
        }
        index = alpha as i64;
    }
    Ok(DefectionReport { index, chain })
}

pub fn defection_index<S: Scalar>(game: &Game<S>, profile: &Profile<S>) -> Result<i64> {
    Ok(defection_report(game, profile)?.index)
}
