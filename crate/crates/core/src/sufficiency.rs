//! Checkable sufficient conditions for a non-empty robust-action set.
//!
//! Both conditions look at the best-response problem as a linear program over
//! the simplex whose objective is the vector of action values; each defector
//! configuration perturbs that objective.
//!
//! * The sensitivity check fixes a base configuration, takes the optimal
//!   vertex of its objective and bounds how far every other configuration
//!   moves the reduced costs (`c_k - c_basis`). When no reduced cost can turn
//!   positive, the base optimum is optimal for all configurations.
//! * The direction check asks whether all objectives point the same way
//!   (equal after normalizing by the Euclidean norm), in which case all
//!   configurations share one argmax face.
//!
//! Both are sufficient only. Inequalities are componentwise over actions.

use crate::error::{Error, Result};
use crate::expectation::{fold_strategies, FrequencyDistribution};
use crate::game::{enumerate_compositions, FrequencyVector, Game, Profile};
use crate::scalar::{approx_ge, Scalar};

/// Componentwise comparison convention written into every report.
pub const CONVENTION: &str = "componentwise over actions; delta_c is the largest increase of the reduced costs c_k - c_basis over all defector configurations";

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport<S> {
    pub base_config: FrequencyVector,
    /// Optimal action of the base objective whose optimality is tested.
    pub basis_action: usize,
    /// Action values against the base configuration.
    pub c: Vec<S>,
    /// Largest increase of each reduced cost over all configurations.
    pub delta_c: Vec<S>,
    /// Componentwise max over configurations of `c - c_g` (no reduced-cost shift).
    pub delta_c_raw: Vec<S>,
    pub y: S,
    /// `-(c - 1 y)`.
    pub bound: Vec<S>,
    /// `delta_c <= bound`; when true, `basis_action` is robust.
    pub holds: bool,
    /// `delta_c_raw <= bound`. Not a certificate: it ignores how the basis
    /// action's own value moves, and is reported for comparison only.
    pub holds_raw: bool,
}

struct ConfigValues<S> {
    configs: Vec<(FrequencyVector, Vec<S>)>,
}

fn config_values<S: Scalar>(game: &Game<S>, normal_profile: &Profile<S>, alpha: usize) -> Result<ConfigValues<S>> {
    game.check_alpha(alpha)?;
    normal_profile.check_actions(game.action_count())?;
    let m = game.action_count();
    game.limits().check_compositions(alpha, m)?;
    let normals = normal_profile.expand(game.n_players() - alpha - 1)?;
    let base: FrequencyDistribution<S> = fold_strategies(&normals, m);
    let configs = enumerate_compositions(alpha, m)?
        .into_iter()
        .map(|g| {
            let values = base.shifted(&g).action_values(game);
            (g, values)
        })
        .collect();
    Ok(ConfigValues { configs })
}

fn max_componentwise<S: Scalar>(rows: impl Iterator<Item = Vec<S>>, m: usize) -> Vec<S> {
    let mut out: Option<Vec<S>> = None;
    for row in rows {
        out = Some(match out {
            None => row,
            Some(acc) => acc
                .into_iter()
                .zip(row)
                .map(|(a, b)| if b > a { b } else { a })
                .collect(),
        });
    }
    out.unwrap_or_else(|| vec![S::zero(); m])
}

fn all_le<S: Scalar>(lhs: &[S], rhs: &[S]) -> bool {
    lhs.iter().zip(rhs).all(|(l, r)| approx_ge(r, l))
}

/// Sensitivity bound around the optimum for `base_config`.
///
/// Every maximizer of the base objective is tried as the basis; the report
/// for the first one that passes is returned, or for the first maximizer when
/// none does.
pub fn sensitivity_check<S: Scalar>(
    game: &Game<S>,
    normal_profile: &Profile<S>,
    alpha: usize,
    base_config: &FrequencyVector,
) -> Result<SensitivityReport<S>> {
    if base_config.total() != alpha || base_config.parts() != game.action_count() {
        return Err(Error::SizeMismatch(format!(
            "base configuration {base_config} is not a composition of {alpha} over {} actions",
            game.action_count()
        )));
    }
    let table = config_values(game, normal_profile, alpha)?;
    let m = game.action_count();
    let c = table
        .configs
        .iter()
        .find(|(g, _)| g == base_config)
        .map(|(_, v)| v.clone())
        .expect("base configuration is one of the enumerated compositions");
    let y = S::max_of(&c).expect("at least one action");
    let bound: Vec<S> = c.iter().map(|ck| y.clone() - ck.clone()).collect();
    let delta_c_raw = max_componentwise(
        table
            .configs
            .iter()
            .map(|(_, cg)| c.iter().zip(cg).map(|(a, b)| a.clone() - b.clone()).collect()),
        m,
    );
    let holds_raw = all_le(&delta_c_raw, &bound);

    let maximizers: Vec<usize> = (0..m).filter(|&k| approx_ge(&c[k], &y)).collect();
    let mut first = None;
    for &basis in &maximizers {
        let delta_c = max_componentwise(
            table.configs.iter().map(|(_, cg)| {
                (0..m)
                    .map(|k| (cg[k].clone() - cg[basis].clone()) - (c[k].clone() - c[basis].clone()))
                    .collect()
            }),
            m,
        );
        let holds = all_le(&delta_c, &bound);
        let report = SensitivityReport {
            base_config: base_config.clone(),
            basis_action: basis,
            c: c.clone(),
            delta_c,
            delta_c_raw: delta_c_raw.clone(),
            y: y.clone(),
            bound: bound.clone(),
            holds,
            holds_raw,
        };
        if holds {
            return Ok(report);
        }
        first.get_or_insert(report);
    }
    Ok(first.expect("the base objective has a maximizer"))
}

/// Runs [`sensitivity_check`] from every base configuration.
pub fn sensitivity_scan<S: Scalar>(
    game: &Game<S>,
    normal_profile: &Profile<S>,
    alpha: usize,
) -> Result<Vec<SensitivityReport<S>>> {
    game.check_alpha(alpha)?;
    enumerate_compositions(alpha, game.action_count())?
        .iter()
        .map(|g| sensitivity_check(game, normal_profile, alpha, g))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport<S> {
    pub invariant: bool,
    /// Action-value vector per defector configuration, in composition order.
    pub vectors: Vec<(FrequencyVector, Vec<S>)>,
    /// Argmax of the first configuration's vector; equals the robust-action
    /// set whenever `invariant` holds.
    pub reference_actions: Vec<usize>,
}

fn is_zero_vector<S: Scalar>(v: &[S]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Same direction without taking square roots: `u = lambda v` for some
/// `lambda > 0` iff all 2x2 minors vanish and `u . v > 0`.
fn same_direction_exact<S: Scalar>(u: &[S], v: &[S]) -> bool {
    match (is_zero_vector(u), is_zero_vector(v)) {
        (true, true) => return true,
        (true, false) | (false, true) => return false,
        _ => {}
    }
    let dot = u
        .iter()
        .zip(v)
        .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
    if dot <= S::zero() {
        return false;
    }
    (0..u.len()).all(|i| (i + 1..u.len()).all(|j| u[i].clone() * v[j].clone() == u[j].clone() * v[i].clone()))
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / norm).collect()
    }
}

fn same_direction_within<S: Scalar>(u: &[S], v: &[S], tolerance: f64) -> bool {
    let uf: Vec<f64> = u.iter().map(Scalar::to_f64).collect();
    let vf: Vec<f64> = v.iter().map(Scalar::to_f64).collect();
    let (uz, vz) = (uf.iter().all(|x| *x == 0.0), vf.iter().all(|x| *x == 0.0));
    if uz || vz {
        return uz && vz;
    }
    normalized(&uf)
        .iter()
        .zip(normalized(&vf))
        .all(|(a, b)| (a - b).abs() <= tolerance)
}

/// Whether the Euclidean-normalized action-value vector is the same for every
/// defector configuration. A zero tolerance compares directions exactly.
pub fn direction_invariance_check<S: Scalar>(
    game: &Game<S>,
    normal_profile: &Profile<S>,
    alpha: usize,
    tolerance: &S,
) -> Result<InvarianceReport<S>> {
    if *tolerance < S::zero() {
        return Err(Error::InvalidParameter(format!("tolerance {tolerance} is negative")));
    }
    let table = config_values(game, normal_profile, alpha)?;
    let reference = &table.configs[0].1;
    let invariant = table.configs.iter().skip(1).all(|(_, v)| {
        if tolerance.is_zero() {
            same_direction_exact(reference, v)
        } else {
            same_direction_within(reference, v, tolerance.to_f64())
        }
    });
    let y = S::max_of(reference).expect("at least one action");
    let reference_actions = (0..reference.len()).filter(|&k| approx_ge(&reference[k], &y)).collect();
    Ok(InvarianceReport {
        invariant,
        vectors: table.configs,
        reference_actions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{make_matching_game, ActionSet, MixedStrategy, TieRule};
    use crate::robustness::robust_action_set;
    use num_rational::BigRational;
    use num_traits::{Signed, Zero};

    type Q = BigRational;

    fn fv(c: &[usize]) -> FrequencyVector {
        FrequencyVector::new(c.to_vec())
    }

    fn crowd_free() -> Game<Q> {
        let actions = ActionSet::numbered(3).unwrap();
        Game::from_fn(4, actions, |a, _| Q::from_count(a * 2 % 3)).unwrap()
    }

    #[test]
    fn crowd_independent_utility_passes_both() {
        let game = crowd_free();
        let normals = Profile::symmetric(MixedStrategy::uniform(3));
        let report = sensitivity_check(&game, &normals, 2, &fv(&[1, 1, 0])).unwrap();
        assert!(report.holds);
        assert!(report.delta_c.iter().all(|d| d.is_zero()));
        assert!(report.bound.iter().all(|b| !b.is_negative()));
        assert_eq!(report.basis_action, 1);
        assert!(
            direction_invariance_check(&game, &normals, 2, &Q::from_count(0))
                .unwrap()
                .invariant
        );
    }

    #[test]
    fn alpha_zero_always_passes() {
        let game = make_matching_game::<Q>(4, 3, TieRule::Inclusive).unwrap();
        let normals = Profile::symmetric(
            MixedStrategy::new(vec![Q::from_ratio(1, 2), Q::from_ratio(1, 3), Q::from_ratio(1, 6)]).unwrap(),
        );
        let report = sensitivity_check(&game, &normals, 0, &fv(&[0, 0, 0])).unwrap();
        assert!(report.holds);
        assert!(report.delta_c.iter().all(|d| d.is_zero()));
        assert!(
            direction_invariance_check(&game, &normals, 0, &Q::from_count(0))
                .unwrap()
                .invariant
        );
    }

    #[test]
    fn empty_robust_set_is_never_certified() {
        let game = make_matching_game::<Q>(5, 3, TieRule::Inclusive).unwrap();
        let normals = Profile::symmetric(MixedStrategy::pure(3, 0));
        assert!(robust_action_set(&game, &normals, 3).unwrap().is_empty());
        let report = sensitivity_check(&game, &normals, 3, &fv(&[3, 0, 0])).unwrap();
        assert!(!report.holds);
        // c = (1, 0, 0); against (0,3,0) the values are (0, 1, 0).
        assert_eq!(report.c, vec![Q::from_count(1), Q::from_count(0), Q::from_count(0)]);
        assert_eq!(report.y, Q::from_count(1));
        assert_eq!(report.delta_c[1], Q::from_count(2));
        assert_eq!(report.bound[1], Q::from_count(1));
    }

    #[test]
    fn matching_directions_differ() {
        let game = make_matching_game::<Q>(5, 3, TieRule::Inclusive).unwrap();
        let normals = Profile::symmetric(MixedStrategy::pure(3, 0));
        let report = direction_invariance_check(&game, &normals, 2, &Q::from_count(0)).unwrap();
        assert!(!report.invariant);
        let at = |g: &[usize]| report.vectors.iter().find(|(c, _)| c.counts() == g).unwrap().1.clone();
        assert_eq!(
            at(&[2, 0, 0]),
            vec![Q::from_count(1), Q::from_count(0), Q::from_count(0)]
        );
        assert_eq!(
            at(&[0, 2, 0]),
            vec![Q::from_count(1), Q::from_count(1), Q::from_count(0)]
        );
    }

    #[test]
    fn raw_reading_can_certify_an_empty_set() {
        // Two players, two actions: against the other on "a" the values are
        // (1, 0); against "b" they are (1, 5). No action is optimal for both,
        // yet c - c_g never exceeds the slack y - c.
        let actions = ActionSet::new(["a", "b"]).unwrap();
        let game = Game::<Q>::from_fn(2, actions, |a, f| match (a, f.count(0)) {
            (0, _) => Q::from_count(1),
            (1, 1) => Q::from_count(0),
            _ => Q::from_count(5),
        })
        .unwrap();
        let normals = Profile::asymmetric(vec![]);
        assert!(robust_action_set(&game, &normals, 1).unwrap().is_empty());
        let report = sensitivity_check(&game, &normals, 1, &fv(&[1, 0])).unwrap();
        assert!(report.holds_raw);
        assert!(!report.holds);
    }

    #[test]
    fn scaled_vectors_share_a_direction() {
        let q = |n: i64| Q::from_count(n as usize);
        assert!(same_direction_exact(&[q(1), q(2)], &[q(3), q(6)]));
        assert!(!same_direction_exact(&[q(1), q(2)], &[-q(1), -q(2)]));
        assert!(!same_direction_exact(&[q(0), q(0)], &[q(1), q(0)]));
        assert!(same_direction_within(&[1.0f64, 2.0], &[3.0, 6.0 + 1e-12], 1e-9));
        assert!(!same_direction_within(&[1.0f64, 2.0], &[2.0, 1.0], 1e-9));
    }

    #[test]
    fn tolerance_must_be_non_negative() {
        let game = crowd_free();
        let normals = Profile::symmetric(MixedStrategy::uniform(3));
        assert!(direction_invariance_check(&game, &normals, 1, &Q::from_ratio(-1, 2)).is_err());
    }
}
