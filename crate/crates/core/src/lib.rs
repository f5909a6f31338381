//! Exact verification and search for defection-robust equilibria in finite
//! anonymous games.
//!
//! A profile is `alpha`-robust when no normal player wants to deviate as
//! long as the other normal players follow it, whatever the `alpha`
//! defectors do. All computations are generic over [`Scalar`]: exact
//! rationals ([`Rational`]) by default, `f64` with absolute tolerances for
//! numeric work.

pub mod documents;
pub mod error;
pub mod expectation;
pub mod format;
pub mod game;
pub mod oracle;
pub mod robustness;
pub mod scalar;
pub mod search;
pub mod sufficiency;

pub use error::{Error, Result};
pub use expectation::{
    expected_utility, expected_utility_mixed, freq_distribution, CrowdSpec, Defectors, FrequencyDistribution,
};
pub use format::{make_table_game, parse_strategy_shorthand, validate_document, GameDocument, ProfileDocument};
pub use game::{
    composition_count, enumerate_compositions, make_matching_game, validate_game, ActionSet, FrequencyVector, Game,
    Limits, MixedStrategy, Profile, TieRule, ValidationReport,
};
pub use oracle::{oracle_freq_dist, oracle_is_robust, oracle_pure_nash, OracleMethod, OracleVerdict};
pub use robustness::{
    best_response_set, check_profile, defection_index, defection_report, is_alpha_robust, robust_action_set,
    witness_holds, BestResponseSet, DefectionCheck, DefectionReport, RobustActionSet, RobustnessCertificate, Verdict,
    Witness,
};
pub use scalar::Scalar;
pub use search::{
    br_dynamics, find_pure_robust, robust_set_scan, Candidate, DynamicsConfig, DynamicsOutcome, ResponseRule,
    ScanReport, SearchReport, SearchStatus,
};
pub use sufficiency::{
    direction_invariance_check, sensitivity_check, sensitivity_scan, InvarianceReport, SensitivityReport,
};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type ExactGame = Game<Rational>;
pub type ExactStrategy = MixedStrategy<Rational>;
pub type ExactProfile = Profile<Rational>;
pub type ExactCertificate = RobustnessCertificate<Rational>;

pub type NumericGame = Game<f64>;
pub type NumericStrategy = MixedStrategy<f64>;
pub type NumericProfile = Profile<f64>;
pub type NumericCertificate = RobustnessCertificate<f64>;
