//! Anonymous games: actions, frequency vectors, strategies and utility tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Environment variable overriding every enumeration cap.
pub const MAX_COMPOSITIONS_ENV: &str = "ROBUSTEQ_MAX_COMPOSITIONS";

/// Ordered, distinct, non-empty action labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSet {
    labels: Vec<String>,
}

impl ActionSet {
    pub fn new<I, L>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidActionSet("no actions".into()));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::InvalidActionSet(format!("action {i} has an empty label")));
            }
            if labels[..i].contains(label) {
                return Err(Error::InvalidActionSet(format!("duplicate label {label:?}")));
            }
        }
        Ok(Self { labels })
    }

    /// Labels `"1"..="m"`.
    pub fn numbered(m: usize) -> Result<Self> {
        Self::new((1..=m).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownAction(label.to_string()))
    }

    pub fn render_indices(&self, indices: &[usize]) -> Vec<String> {
        indices.iter().map(|&i| self.labels[i].clone()).collect()
    }
}

/// Non-negative action counts summing to `total`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct FrequencyVector {
    counts: Vec<usize>,
    total: usize,
}

impl FrequencyVector {
    pub fn new(counts: Vec<usize>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    /// Builds a vector and checks it against a declared total.
    pub fn with_total(counts: Vec<usize>, total: usize) -> Result<Self> {
        let v = Self::new(counts);
        if v.total != total {
            return Err(Error::InvalidFrequency {
                reason: format!("sums to {} instead of {total}", v.total),
                counts: v.counts,
            });
        }
        Ok(v)
    }

    pub fn zero(parts: usize) -> Self {
        Self::new(vec![0; parts])
    }

    pub fn unit(parts: usize, action: usize) -> Self {
        let mut counts = vec![0; parts];
        counts[action] = 1;
        Self { counts, total: 1 }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn parts(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, action: usize) -> usize {
        self.counts[action]
    }

    pub fn plus(&self, other: &FrequencyVector) -> FrequencyVector {
        debug_assert_eq!(self.parts(), other.parts());
        let counts = self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect();
        Self {
            counts,
            total: self.total + other.total,
        }
    }

    pub fn add_one(&mut self, action: usize) {
        self.counts[action] += 1;
        self.total += 1;
    }

    /// Removes one unit at `action`; `None` when that count is already zero.
    pub fn minus_one(&self, action: usize) -> Option<FrequencyVector> {
        if self.counts[action] == 0 {
            return None;
        }
        let mut out = self.clone();
        out.counts[action] -= 1;
        out.total -= 1;
        Some(out)
    }

    /// Componentwise difference; `None` unless `other <= self` everywhere.
    pub fn checked_sub(&self, other: &FrequencyVector) -> Option<FrequencyVector> {
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()?;
        Some(Self::new(counts))
    }

    pub fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, _)| i)
    }
}

impl From<Vec<usize>> for FrequencyVector {
    fn from(counts: Vec<usize>) -> Self {
        Self::new(counts)
    }
}

impl From<FrequencyVector> for Vec<usize> {
    fn from(v: FrequencyVector) -> Self {
        v.counts
    }
}

impl fmt::Display for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Number of compositions of `total` into `parts` non-negative parts, C(total+parts-1, parts-1).
pub fn composition_count(total: usize, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    let k = (parts - 1) as u128;
    let n = (total + parts - 1) as u128;
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All compositions of `total` into `parts` parts, first coordinate descending
/// (reverse lexicographic order).
pub fn enumerate_compositions(total: usize, parts: usize) -> Result<Vec<FrequencyVector>> {
    if parts == 0 {
        return Err(Error::InvalidDimension("a composition needs at least one part".into()));
    }
    let mut out = Vec::with_capacity(composition_count(total, parts).min(1 << 20) as usize);
    let mut prefix = Vec::with_capacity(parts);
    fill_compositions(total, parts, &mut prefix, &mut out);
    Ok(out)
}

fn fill_compositions(remaining: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<FrequencyVector>) {
    if parts == 1 {
        prefix.push(remaining);
        out.push(FrequencyVector::new(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in (0..=remaining).rev() {
        prefix.push(first);
        fill_compositions(remaining - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Position of `counts` in [`enumerate_compositions`] order.
pub fn composition_rank(counts: &[usize]) -> usize {
    let mut remaining: usize = counts.iter().sum();
    let parts = counts.len();
    let mut rank = 0u128;
    for (i, &c) in counts.iter().enumerate().take(parts.saturating_sub(1)) {
        if c < remaining {
            rank += composition_count(remaining - c - 1, parts - i);
        }
        remaining -= c;
    }
    rank as usize
}

/// Caps that turn runaway enumerations into errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_compositions: u128,
    pub oracle_max_tuples: u128,
    pub oracle_max_profiles: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_compositions: 1_000_000,
            oracle_max_tuples: 1_000_000,
            oracle_max_profiles: 100_000,
        }
    }
}

impl Limits {
    /// Defaults, with every cap replaced by `ROBUSTEQ_MAX_COMPOSITIONS` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_COMPOSITIONS_ENV) {
            Ok(text) => {
                let cap: u128 = text.trim().parse().map_err(|_| {
                    Error::InvalidParameter(format!("{MAX_COMPOSITIONS_ENV}={text:?} is not an integer"))
                })?;
                Ok(Self {
                    max_compositions: cap,
                    oracle_max_tuples: cap,
                    oracle_max_profiles: cap,
                })
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn check_compositions(&self, total: usize, parts: usize) -> Result<()> {
        check_cap(
            "max_compositions",
            composition_count(total, parts),
            self.max_compositions,
        )
    }
}

pub(crate) fn check_cap(cap: &'static str, requested: u128, limit: u128) -> Result<()> {
    if requested > limit {
        Err(Error::CapExceeded { cap, requested, limit })
    } else {
        Ok(())
    }
}

/// A probability vector over the action set.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy<S> {
    probs: Vec<S>,
}

impl<S: Scalar> MixedStrategy<S> {
    pub fn new(probs: Vec<S>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidStrategy("empty probability vector".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < S::zero()) {
            return Err(Error::InvalidStrategy(format!("entry {bad} is not a probability")));
        }
        let sum = probs.iter().fold(S::zero(), |acc, p| acc + p.clone());
        if (sum.clone() - S::one()).abs() > S::simplex_tolerance() {
            return Err(Error::InvalidStrategy(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn pure(actions: usize, action: usize) -> Self {
        let probs = (0..actions)
            .map(|i| if i == action { S::one() } else { S::zero() })
            .collect();
        Self { probs }
    }

    pub fn uniform(actions: usize) -> Self {
        Self::uniform_over(actions, &(0..actions).collect::<Vec<_>>())
    }

    /// Uniform mixture over `support`; `support` must be non-empty.
    pub fn uniform_over(actions: usize, support: &[usize]) -> Self {
        let weight = S::one() / S::from_count(support.len());
        let mut probs = vec![S::zero(); actions];
        for &a in support {
            probs[a] = weight.clone();
        }
        Self { probs }
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn prob(&self, action: usize) -> &S {
        &self.probs[action]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Actions played with positive probability.
    pub fn support(&self) -> Vec<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| *p > &S::zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn pure_action(&self) -> Option<usize> {
        match self.support().as_slice() {
            [a] if self.probs[*a] == S::one() => Some(*a),
            _ => None,
        }
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &Self, weight: &S) -> Self {
        let rest = S::one() - weight.clone();
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| weight.clone() * a.clone() + rest.clone() * b.clone())
            .collect();
        Self { probs }
    }

    /// L-infinity distance.
    pub fn distance(&self, other: &Self) -> S {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a.clone() - b.clone()).abs())
            .fold(S::zero(), |acc, d| if d > acc { d } else { acc })
    }

    pub fn render(&self) -> Vec<String> {
        self.probs.iter().map(Scalar::render).collect()
    }
}

/// Strategies of a group of players; `symmetric` profiles hold one shared strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<S> {
    strategies: Vec<MixedStrategy<S>>,
    symmetric: bool,
}

impl<S: Scalar> Profile<S> {
    pub fn symmetric(strategy: MixedStrategy<S>) -> Self {
        Self {
            strategies: vec![strategy],
            symmetric: true,
        }
    }

    pub fn asymmetric(strategies: Vec<MixedStrategy<S>>) -> Self {
        Self {
            strategies,
            symmetric: false,
        }
    }

    /// One pure strategy per player, grouped by action in `assignment` order.
    pub fn from_assignment(assignment: &FrequencyVector) -> Self {
        let m = assignment.parts();
        let strategies = assignment
            .counts()
            .iter()
            .enumerate()
            .flat_map(|(a, &c)| std::iter::repeat_n(a, c))
            .map(|a| MixedStrategy::pure(m, a))
            .collect();
        Self::asymmetric(strategies)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn strategies(&self) -> &[MixedStrategy<S>] {
        &self.strategies
    }

    /// Whether this profile can describe exactly `players` players.
    pub fn covers(&self, players: usize) -> bool {
        if self.symmetric {
            self.strategies.len() == 1
        } else {
            self.strategies.len() == players
        }
    }

    /// Explicit per-player strategies for `players` players.
    pub fn expand(&self, players: usize) -> Result<Vec<MixedStrategy<S>>> {
        if !self.covers(players) {
            return Err(Error::SizeMismatch(format!(
                "profile lists {} strategies but {players} players are required",
                self.strategies.len()
            )));
        }
        if self.symmetric {
            Ok(vec![self.strategies[0].clone(); players])
        } else {
            Ok(self.strategies.clone())
        }
    }

    pub(crate) fn check_actions(&self, actions: usize) -> Result<()> {
        match self.strategies.iter().find(|s| s.len() != actions) {
            Some(s) => Err(Error::SizeMismatch(format!(
                "strategy has {} entries but the game has {actions} actions",
                s.len()
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieRule {
    /// Utility 1 when the own action is among the most frequent.
    Inclusive,
    /// Utility 1 only when the own action is the unique most frequent.
    Strict,
}

impl std::str::FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inclusive" => Ok(Self::Inclusive),
            "strict" => Ok(Self::Strict),
            other => Err(Error::InvalidParameter(format!("unknown tie rule {other:?}"))),
        }
    }
}

/// Where a game's utilities came from; builtin games serialize back to their generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtilitySource {
    Table,
    Matching(TieRule),
}

/// A finite anonymous game: `n_players` players sharing one action set and
/// one utility `u(own action, counts of the other n_players - 1 players)`.
#[derive(Debug, Clone)]
pub struct Game<S> {
    n_players: usize,
    actions: ActionSet,
    // utility[action * table_width + composition_rank(f)]
    utility: Vec<S>,
    table_width: usize,
    source: UtilitySource,
    limits: Limits,
}

impl<S: Scalar> Game<S> {
    /// Tabulates `utility(action, f)` over every action and every composition of `n_players - 1`.
    pub fn from_fn<F>(n_players: usize, actions: ActionSet, utility: F) -> Result<Self>
    where
        F: FnMut(usize, &FrequencyVector) -> S,
    {
        Self::from_fn_with_limits(n_players, actions, Limits::default(), utility)
    }

    pub fn from_fn_with_limits<F>(n_players: usize, actions: ActionSet, limits: Limits, mut utility: F) -> Result<Self>
    where
        F: FnMut(usize, &FrequencyVector) -> S,
    {
        if n_players < 2 {
            return Err(Error::InvalidParameter(format!(
                "a game needs at least 2 players, got {n_players}"
            )));
        }
        let m = actions.len();
        limits.check_compositions(n_players - 1, m)?;
        let keys = enumerate_compositions(n_players - 1, m)?;
        let mut table = Vec::with_capacity(m * keys.len());
        for a in 0..m {
            for f in &keys {
                let value = utility(a, f);
                if !value.is_finite() {
                    return Err(Error::InvalidDocument(format!(
                        "utility of action {} at {f} is not finite",
                        actions.label(a)
                    )));
                }
                table.push(value);
            }
        }
        Ok(Self {
            n_players,
            table_width: keys.len(),
            actions,
            utility: table,
            source: UtilitySource::Table,
            limits,
        })
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub(crate) fn with_source(mut self, source: UtilitySource) -> Self {
        self.source = source;
        self
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn actions(&self) -> &ActionSet {
        &self.actions
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn source(&self) -> UtilitySource {
        self.source
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// Number of stored (action, frequency vector) entries.
    pub fn table_size(&self) -> usize {
        self.utility.len()
    }

    /// Utility of `action` against the others' counts `f`.
    ///
    /// Panics if `f` does not have `n_players - 1` total over the game's actions.
    pub fn utility(&self, action: usize, f: &FrequencyVector) -> &S {
        self.get_utility(action, f).unwrap_or_else(|| {
            panic!(
                "no utility entry for action {action} at {f} in a {}-player game",
                self.n_players
            )
        })
    }

    pub fn get_utility(&self, action: usize, f: &FrequencyVector) -> Option<&S> {
        if action >= self.action_count() || f.parts() != self.action_count() || f.total() != self.n_players - 1 {
            return None;
        }
        self.utility
            .get(action * self.table_width + composition_rank(f.counts()))
    }

    /// Every `(action, f, value)` entry in action-major, composition order.
    pub fn entries(&self) -> Vec<(usize, FrequencyVector, S)> {
        let keys = enumerate_compositions(self.n_players - 1, self.action_count()).expect("action set is non-empty");
        (0..self.action_count())
            .flat_map(|a| keys.iter().map(move |f| (a, f.clone())))
            .map(|(a, f)| {
                let v = self.utility(a, &f).clone();
                (a, f, v)
            })
            .collect()
    }

    pub(crate) fn check_alpha(&self, alpha: usize) -> Result<()> {
        if alpha >= self.n_players {
            return Err(Error::AlphaOutOfRange {
                alpha,
                max: self.n_players - 1,
            });
        }
        Ok(())
    }
}

/// The matching-actions game: utility 1 when the own action is played most often by the others.
pub fn make_matching_game<S: Scalar>(n_players: usize, m: usize, tie: TieRule) -> Result<Game<S>> {
    make_matching_game_with(n_players, ActionSet::numbered(m)?, tie, Limits::default())
}

/// Matching game over caller-supplied action labels.
pub fn make_matching_game_with<S: Scalar>(
    n_players: usize,
    actions: ActionSet,
    tie: TieRule,
    limits: Limits,
) -> Result<Game<S>> {
    let m = actions.len();
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "the matching game needs at least 2 actions, got {m}"
        )));
    }
    let game = Game::from_fn_with_limits(n_players, actions, limits, |a, f| {
        let own = f.count(a);
        let wins = match tie {
            TieRule::Inclusive => f.counts().iter().all(|&c| c <= own),
            TieRule::Strict => f.counts().iter().enumerate().all(|(b, &c)| b == a || c < own),
        };
        if wins {
            S::one()
        } else {
            S::zero()
        }
    })?;
    Ok(game.with_source(UtilitySource::Matching(tie)))
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub table_size: usize,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-checks the invariants of an in-memory game.
pub fn validate_game<S: Scalar>(game: &Game<S>) -> ValidationReport {
    let mut report = ValidationReport {
        table_size: game.table_size(),
        violations: Vec::new(),
    };
    if game.n_players < 2 {
        report.violations.push(format!("n_players = {} < 2", game.n_players));
    }
    if game.actions.is_empty() {
        report.violations.push("empty action set".into());
        return report;
    }
    let expected = composition_count(game.n_players.saturating_sub(1), game.action_count());
    if game.table_width as u128 != expected {
        report
            .violations
            .push(format!("table has {} columns, expected {expected}", game.table_width));
    }
    if game.utility.len() != game.table_width * game.action_count() {
        report.violations.push(format!(
            "table has {} entries, expected {}",
            game.utility.len(),
            game.table_width * game.action_count()
        ));
    }
    for (i, v) in game.utility.iter().enumerate() {
        if !v.is_finite() {
            report.violations.push(format!("entry {i} is not finite"));
        }
    }
    report
}
