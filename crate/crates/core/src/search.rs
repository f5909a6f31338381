//! Searching for robust equilibria: exhaustive over pure profiles, heuristic
//! best-response dynamics over symmetric mixed profiles, and a grid scan of
//! where the robust-action set is non-empty.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{enumerate_compositions, FrequencyVector, Game, MixedStrategy, Profile};
use crate::robustness::{check_profile, robust_action_set, DefectionCheck};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Candidate<S> {
    /// Pure profile up to relabeling of players: how many play each action.
    Pure(FrequencyVector),
    /// Everyone plays the same mixed strategy.
    Symmetric(MixedStrategy<S>),
}

impl<S: Scalar> Candidate<S> {
    pub fn profile(&self) -> Profile<S> {
        match self {
            Candidate::Pure(assignment) => Profile::from_assignment(assignment),
            Candidate::Symmetric(s) => Profile::symmetric(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustProfile<S> {
    pub candidate: Candidate<S>,
    pub check: DefectionCheck<S>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    /// Every candidate was examined; an empty result proves absence among pure profiles.
    Exhaustive,
    /// Nothing is implied by an empty result.
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicsOutcome {
    Converged,
    EmptyRobustSet,
    MaxIterations,
    VerificationRejected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport<S> {
    pub alpha: usize,
    pub candidates_examined: usize,
    pub robust_profiles: Vec<RobustProfile<S>>,
    pub status: SearchStatus,
    /// Only for best-response dynamics.
    pub dynamics: Option<DynamicsTrace<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsTrace<S> {
    pub outcome: DynamicsOutcome,
    pub iterations: usize,
    pub last: MixedStrategy<S>,
}

/// Every pure profile (as an action-count assignment of all `N` players)
/// that stays robust whichever `alpha` players defect.
pub fn find_pure_robust<S: Scalar>(game: &Game<S>, alpha: usize) -> Result<SearchReport<S>> {
    game.check_alpha(alpha)?;
    let m = game.action_count();
    game.limits().check_compositions(game.n_players(), m)?;
    let candidates = enumerate_compositions(game.n_players(), m)?;
    let checks = candidates
        .par_iter()
        .map(|assignment| check_profile(game, &Profile::from_assignment(assignment), alpha))
        .collect::<Result<Vec<_>>>()?;
    let robust_profiles = candidates
        .iter()
        .zip(checks)
        .filter(|(_, check)| check.robust)
        .map(|(assignment, check)| RobustProfile {
            candidate: Candidate::Pure(assignment.clone()),
            check,
        })
        .collect();
    Ok(SearchReport {
        alpha,
        candidates_examined: candidates.len(),
        robust_profiles,
        status: SearchStatus::Exhaustive,
        dynamics: None,
    })
}

/// How the dynamics pick a point from the (set-valued) robust response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseRule {
    /// Uniform mixture over the robust actions.
    #[default]
    Uniform,
    /// Pure on the lowest-indexed robust action.
    Lowest,
}

fn robust_response<S: Scalar>(
    game: &Game<S>,
    alpha: usize,
    sigma: &MixedStrategy<S>,
    rule: ResponseRule,
) -> Result<Option<MixedStrategy<S>>> {
    let t = robust_action_set(game, &Profile::symmetric(sigma.clone()), alpha)?;
    let m = game.action_count();
    Ok(match (t.actions.first(), rule) {
        (None, _) => None,
        (Some(_), ResponseRule::Uniform) => Some(MixedStrategy::uniform_over(m, &t.actions)),
        (Some(&a), ResponseRule::Lowest) => Some(MixedStrategy::pure(m, a)),
    })
}

#[derive(Debug, Clone)]
pub struct DynamicsConfig<S> {
    pub max_iters: usize,
    /// Step weight in (0, 1].
    pub damping: S,
    pub rule: ResponseRule,
}

impl<S: Scalar> Default for DynamicsConfig<S> {
    fn default() -> Self {
        Self {
            max_iters: 200,
            damping: S::one(),
            rule: ResponseRule::Uniform,
        }
    }
}

/// Damped best-response dynamics over symmetric strategies:
/// `sigma <- (1 - damping) sigma + damping * response(sigma)`.
///
/// A converged candidate is re-verified with [`check_profile`] before it is
/// reported. An empty result says nothing about existence.
pub fn br_dynamics<S: Scalar>(
    game: &Game<S>,
    alpha: usize,
    init: &MixedStrategy<S>,
    config: &DynamicsConfig<S>,
) -> Result<SearchReport<S>> {
    game.check_alpha(alpha)?;
    if !(config.damping > S::zero() && config.damping <= S::one()) {
        return Err(Error::InvalidParameter(format!(
            "damping {} is not in (0, 1]",
            config.damping
        )));
    }
    if config.max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
    }
    if init.len() != game.action_count() {
        return Err(Error::SizeMismatch(
            "initial strategy does not match the action set".into(),
        ));
    }
    // Re-validate: the caller may have built it off the simplex via `mix`.
    let mut sigma = MixedStrategy::new(init.probs().to_vec())?;

    let finish = |outcome, iterations, last: MixedStrategy<S>, robust_profiles| SearchReport {
        alpha,
        candidates_examined: iterations,
        robust_profiles,
        status: SearchStatus::Heuristic,
        dynamics: Some(DynamicsTrace {
            outcome,
            iterations,
            last,
        }),
    };

    for iteration in 1..=config.max_iters {
        let Some(target) = robust_response(game, alpha, &sigma, config.rule)? else {
            return Ok(finish(DynamicsOutcome::EmptyRobustSet, iteration, sigma, Vec::new()));
        };
        let next = target.mix(&sigma, &config.damping);
        let candidate = if next.distance(&sigma) <= S::convergence_tolerance() {
            Some(target)
        } else if robust_response(game, alpha, &target, config.rule)?.as_ref() == Some(&target) {
            // The response is itself a fixed point; damping would only approach it.
            Some(target)
        } else {
            None
        };
        if let Some(candidate) = candidate {
            let check = check_profile(game, &Profile::symmetric(candidate.clone()), alpha)?;
            return Ok(if check.robust {
                let found = RobustProfile {
                    candidate: Candidate::Symmetric(candidate.clone()),
                    check,
                };
                finish(DynamicsOutcome::Converged, iteration, candidate, vec![found])
            } else {
                finish(DynamicsOutcome::VerificationRejected, iteration, candidate, Vec::new())
            });
        }
        sigma = next;
    }
    Ok(finish(
        DynamicsOutcome::MaxIterations,
        config.max_iters,
        sigma,
        Vec::new(),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint<S> {
    pub strategy: MixedStrategy<S>,
    pub robust_actions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport<S> {
    pub alpha: usize,
    pub resolution: usize,
    pub points: Vec<ScanPoint<S>>,
}

impl<S: Scalar> ScanReport<S> {
    pub fn nonempty_count(&self) -> usize {
        self.points.iter().filter(|p| !p.robust_actions.is_empty()).count()
    }

    pub fn empty_points(&self) -> Vec<&ScanPoint<S>> {
        self.points.iter().filter(|p| p.robust_actions.is_empty()).collect()
    }

    pub fn all_nonempty(&self) -> bool {
        self.nonempty_count() == self.points.len()
    }

    /// Fraction of grid points with a non-empty robust-action set.
    pub fn nonempty_fraction(&self) -> S {
        S::from_count(self.nonempty_count()) / S::from_count(self.points.len())
    }

    /// CSV with one row per grid point: coordinates, |T| and the members of T.
    pub fn to_csv(&self, labels: &[String]) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = labels.iter().map(|l| format!("p_{l}")).collect();
        header.push("t_size".into());
        header.push("t_actions".into());
        writer.write_record(&header).expect("in-memory write");
        for point in &self.points {
            let mut row = point.strategy.render();
            row.push(point.robust_actions.len().to_string());
            row.push(
                point
                    .robust_actions
                    .iter()
                    .map(|&a| labels[a].as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            writer.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
    }
}

/// Evaluates the robust-action set at every symmetric strategy on the
/// simplex lattice with denominator `resolution`. All-non-empty on the grid
/// is evidence for the existence hypothesis, not a proof.
pub fn robust_set_scan<S: Scalar>(game: &Game<S>, alpha: usize, resolution: usize) -> Result<ScanReport<S>> {
    game.check_alpha(alpha)?;
    if resolution == 0 {
        return Err(Error::InvalidParameter("grid resolution must be at least 1".into()));
    }
    let m = game.action_count();
    game.limits().check_compositions(resolution, m)?;
    let grid = enumerate_compositions(resolution, m)?;
    let denom = resolution as i64;
    let points = grid
        .par_iter()
        .map(|k| {
            let probs = k.counts().iter().map(|&c| S::from_ratio(c as i64, denom)).collect();
            let strategy = MixedStrategy::new(probs)?;
            let t = robust_action_set(game, &Profile::symmetric(strategy.clone()), alpha)?;
            Ok(ScanPoint {
                strategy,
                robust_actions: t.actions,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanReport {
        alpha,
        resolution,
        points,
    })
}
