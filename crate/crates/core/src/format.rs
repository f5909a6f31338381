//! JSON game and profile documents.
//!
//! A game file is either a full utility table or a reference to a builtin
//! generator. Rationals are written as `"p/q"` strings; numbers are accepted
//! on input and read through their decimal text, so `0.1` is exactly `1/10`
//! in exact mode.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    composition_count, enumerate_compositions, make_matching_game_with, ActionSet, FrequencyVector, Game, Limits,
    MixedStrategy, Profile, TieRule, UtilitySource, ValidationReport,
};
use crate::scalar::{from_decimal_f64, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameDocument {
    pub n_players: usize,
    pub actions: Vec<String>,
    pub utility: UtilityDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum UtilityDocument {
    Table {
        entries: Vec<EntryDocument>,
    },
    Builtin {
        name: String,
        #[serde(default = "default_tie", skip_serializing_if = "Option::is_none")]
        tie_rule: Option<TieRule>,
    },
}

fn default_tie() -> Option<TieRule> {
    Some(TieRule::Inclusive)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryDocument {
    pub action: String,
    pub freq: Vec<usize>,
    pub value: ValueText,
}

/// A scalar as it appears in a document: rational text or a JSON number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueText {
    Text(String),
    Number(serde_json::Number),
}

impl ValueText {
    pub fn parse<S: Scalar>(&self) -> Result<S> {
        match self {
            ValueText::Text(text) => S::parse_scalar(text),
            ValueText::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(S::from_ratio(i, 1))
                } else {
                    from_decimal_f64(n.as_f64().ok_or_else(|| Error::MalformedRational(n.to_string()))?)
                }
            }
        }
    }

    pub fn from_scalar<S: Scalar>(value: &S) -> Self {
        ValueText::Text(value.render())
    }

    fn describe(&self) -> String {
        match self {
            ValueText::Text(t) => t.clone(),
            ValueText::Number(n) => n.to_string(),
        }
    }
}

impl From<&str> for ValueText {
    fn from(text: &str) -> Self {
        ValueText::Text(text.to_string())
    }
}

impl GameDocument {
    /// Parses JSON text; syntax and schema errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidDocument(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("game documents always serialize")
    }

    /// Document for `game`; builtin games stay builtin unless `expand` is set.
    pub fn from_game<S: Scalar>(game: &Game<S>, expand: bool) -> Self {
        let utility = match (game.source(), expand) {
            (UtilitySource::Matching(tie), false) => UtilityDocument::Builtin {
                name: "matching".into(),
                tie_rule: Some(tie),
            },
            _ => UtilityDocument::Table {
                entries: game
                    .entries()
                    .into_iter()
                    .map(|(a, f, v)| EntryDocument {
                        action: game.actions().label(a).to_string(),
                        freq: f.counts().to_vec(),
                        value: ValueText::from_scalar(&v),
                    })
                    .collect(),
            },
        };
        Self {
            n_players: game.n_players(),
            actions: game.actions().labels().to_vec(),
            utility,
        }
    }
}

fn key_name(action: &str, freq: &[usize]) -> String {
    format!("action {action:?} at {}", FrequencyVector::new(freq.to_vec()))
}

/// Every violation in a document, without stopping at the first.
pub fn validate_document<S: Scalar>(doc: &GameDocument) -> ValidationReport {
    let mut violations = Vec::new();
    if doc.n_players < 2 {
        violations.push(format!("n_players = {} < 2", doc.n_players));
    }
    if let Err(e) = ActionSet::new(doc.actions.iter().cloned()) {
        violations.push(e.to_string());
    }
    let m = doc.actions.len();
    let others = doc.n_players.saturating_sub(1);
    let mut table_size = 0;
    match &doc.utility {
        UtilityDocument::Builtin { name, .. } => {
            if name != "matching" {
                violations.push(format!("unknown builtin {name:?}"));
            } else if m < 2 {
                violations.push("the matching game needs at least 2 actions".into());
            } else {
                table_size = (composition_count(others, m) as usize) * m;
            }
        }
        UtilityDocument::Table { entries } => {
            let mut seen: BTreeMap<(usize, Vec<usize>), S> = BTreeMap::new();
            for (i, entry) in entries.iter().enumerate() {
                let Some(a) = doc.actions.iter().position(|l| *l == entry.action) else {
                    violations.push(format!("entry {i}: unknown action {:?}", entry.action));
                    continue;
                };
                if entry.freq.len() != m {
                    violations.push(format!(
                        "entry {i}: frequency vector has {} parts, expected {m}",
                        entry.freq.len()
                    ));
                    continue;
                }
                let sum: usize = entry.freq.iter().sum();
                if sum != others {
                    violations.push(format!(
                        "entry {i}: frequency vector {} sums to {sum}, expected {others}",
                        FrequencyVector::new(entry.freq.clone())
                    ));
                    continue;
                }
                let value = match entry.value.parse::<S>() {
                    Ok(v) => v,
                    Err(e) => {
                        violations.push(format!("entry {i}: {e}"));
                        continue;
                    }
                };
                match seen.get(&(a, entry.freq.clone())) {
                    Some(prev) if *prev != value => violations.push(format!(
                        "entry {i}: conflicting value for {}",
                        key_name(&entry.action, &entry.freq)
                    )),
                    Some(_) => {}
                    None => {
                        seen.insert((a, entry.freq.clone()), value);
                    }
                }
            }
            table_size = seen.len();
            if m > 0 && doc.n_players >= 2 && violations.is_empty() {
                if let Ok(keys) = enumerate_compositions(others, m) {
                    for (a, label) in doc.actions.iter().enumerate() {
                        for f in &keys {
                            if !seen.contains_key(&(a, f.counts().to_vec())) {
                                violations.push(format!("missing {}", key_name(label, f.counts())));
                            }
                        }
                    }
                }
            }
        }
    }
    ValidationReport { table_size, violations }
}

/// Builds a game from a document, rejecting incomplete or contradictory tables.
pub fn make_table_game<S: Scalar>(doc: &GameDocument) -> Result<Game<S>> {
    make_game_with_limits(doc, Limits::default())
}

pub fn make_game_with_limits<S: Scalar>(doc: &GameDocument, limits: Limits) -> Result<Game<S>> {
    let actions = ActionSet::new(doc.actions.iter().cloned())?;
    if doc.n_players < 2 {
        return Err(Error::InvalidParameter(format!(
            "a game needs at least 2 players, got {}",
            doc.n_players
        )));
    }
    let m = actions.len();
    let others = doc.n_players - 1;
    match &doc.utility {
        UtilityDocument::Builtin { name, tie_rule } => {
            if name != "matching" {
                return Err(Error::InvalidDocument(format!("unknown builtin {name:?}")));
            }
            make_matching_game_with(doc.n_players, actions, tie_rule.unwrap_or(TieRule::Inclusive), limits)
        }
        UtilityDocument::Table { entries } => {
            let mut table: BTreeMap<(usize, Vec<usize>), (S, &ValueText)> = BTreeMap::new();
            for entry in entries {
                let a = actions.index_of(&entry.action)?;
                FrequencyVector::with_total(entry.freq.clone(), others)?;
                if entry.freq.len() != m {
                    return Err(Error::InvalidFrequency {
                        counts: entry.freq.clone(),
                        reason: format!("expected {m} parts"),
                    });
                }
                let value: S = entry.value.parse()?;
                match table.get(&(a, entry.freq.clone())) {
                    Some((prev, prev_text)) if *prev != value => {
                        return Err(Error::ConflictingEntry {
                            key: key_name(&entry.action, &entry.freq),
                            first: prev_text.describe(),
                            second: entry.value.describe(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        table.insert((a, entry.freq.clone()), (value, &entry.value));
                    }
                }
            }
            limits.check_compositions(others, m)?;
            let keys = enumerate_compositions(others, m)?;
            let missing: Vec<String> = (0..m)
                .flat_map(|a| keys.iter().map(move |f| (a, f)))
                .filter(|(a, f)| !table.contains_key(&(*a, f.counts().to_vec())))
                .map(|(a, f)| key_name(actions.label(a), f.counts()))
                .collect();
            if !missing.is_empty() {
                return Err(Error::IncompleteTable { missing });
            }
            Game::from_fn_with_limits(doc.n_players, actions.clone(), limits, |a, f| {
                table[&(a, f.counts().to_vec())].0.clone()
            })
        }
    }
}

/// Profile file: `{"symmetric": bool, "strategies": [[p, ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    #[serde(default)]
    pub symmetric: bool,
    pub strategies: Vec<Vec<ValueText>>,
}

impl ProfileDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidDocument(e.to_string()))
    }

    pub fn into_profile<S: Scalar>(&self, actions: &ActionSet) -> Result<Profile<S>> {
        let strategies = self
            .strategies
            .iter()
            .map(|probs| {
                if probs.len() != actions.len() {
                    return Err(Error::SizeMismatch(format!(
                        "strategy has {} entries but the game has {} actions",
                        probs.len(),
                        actions.len()
                    )));
                }
                MixedStrategy::new(probs.iter().map(ValueText::parse).collect::<Result<_>>()?)
            })
            .collect::<Result<Vec<_>>>()?;
        if self.symmetric {
            match <[MixedStrategy<S>; 1]>::try_from(strategies) {
                Ok([s]) => Ok(Profile::symmetric(s)),
                Err(v) => Err(Error::SizeMismatch(format!(
                    "a symmetric profile lists exactly one strategy, got {}",
                    v.len()
                ))),
            }
        } else {
            Ok(Profile::asymmetric(strategies))
        }
    }

    pub fn from_profile<S: Scalar>(profile: &Profile<S>) -> Self {
        Self {
            symmetric: profile.is_symmetric(),
            strategies: profile
                .strategies()
                .iter()
                .map(|s| s.probs().iter().map(ValueText::from_scalar).collect())
                .collect(),
        }
    }
}

/// Parses a symmetric strategy shorthand: `pure:<label>` or `mixed:p1,p2,...`.
pub fn parse_strategy_shorthand<S: Scalar>(text: &str, actions: &ActionSet) -> Result<MixedStrategy<S>> {
    if let Some(label) = text.strip_prefix("pure:") {
        let a = actions.index_of(label)?;
        Ok(MixedStrategy::pure(actions.len(), a))
    } else if let Some(list) = text.strip_prefix("mixed:") {
        let probs = list.split(',').map(S::parse_scalar).collect::<Result<Vec<_>>>()?;
        if probs.len() != actions.len() {
            return Err(Error::SizeMismatch(format!(
                "mixed strategy has {} entries but the game has {} actions",
                probs.len(),
                actions.len()
            )));
        }
        MixedStrategy::new(probs)
    } else {
        Err(Error::InvalidParameter(format!(
            "strategy {text:?} is neither pure:<label> nor mixed:p1,p2,..."
        )))
    }
}
