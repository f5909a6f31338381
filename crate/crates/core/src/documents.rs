//! JSON documents for certificates and reports. Scalars are rendered with
//! [`Scalar::render`] (`"p/q"` in exact mode); actions by label.

use serde::{Deserialize, Serialize};

use crate::game::ActionSet;
use crate::oracle::{OracleMethod, OracleVerdict};
use crate::robustness::{DefectionCheck, DefectionReport, RobustnessCertificate, Verdict};
use crate::scalar::Scalar;
use crate::search::{Candidate, DynamicsOutcome, SearchReport, SearchStatus};
use crate::sufficiency::{InvarianceReport, SensitivityReport, CONVENTION};

fn mode<S: Scalar>() -> String {
    if S::EXACT { "exact" } else { "numeric" }.to_string()
}

fn render_all<S: Scalar>(values: &[S]) -> Vec<String> {
    values.iter().map(Scalar::render).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub player: usize,
    pub config: Vec<usize>,
    pub deviation: String,
    pub deviation_value: String,
    pub strategy_value: String,
    pub gain: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigResponseDoc {
    pub config: Vec<usize>,
    pub actions: Vec<String>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerActionsDoc {
    pub player: usize,
    pub actions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceDoc {
    pub actions: Vec<String>,
    pub per_config: Vec<ConfigResponseDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub players: Vec<PlayerActionsDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub verdict: String,
    pub alpha: usize,
    pub mode: String,
    pub tolerance_qualified: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub defectors: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<EvidenceDoc>,
}

impl<S: Scalar> RobustnessCertificate<S> {
    pub fn to_document(&self, actions: &ActionSet) -> CertificateDoc {
        let witness = self.witness.as_ref().map(|w| WitnessDoc {
            player: w.player,
            config: w.config.counts().to_vec(),
            deviation: actions.label(w.deviation).to_string(),
            deviation_value: w.deviation_value.render(),
            strategy_value: w.strategy_value.render(),
            gain: w.gain.render(),
        });
        let evidence = self.evidence.first().map(|first| EvidenceDoc {
            actions: actions.render_indices(&first.robust_set.actions),
            per_config: first
                .robust_set
                .per_config
                .iter()
                .map(|(g, br)| ConfigResponseDoc {
                    config: g.counts().to_vec(),
                    actions: actions.render_indices(&br.actions),
                    value: br.value.render(),
                })
                .collect(),
            players: if self.evidence.len() > 1 {
                self.evidence
                    .iter()
                    .map(|e| PlayerActionsDoc {
                        player: e.player,
                        actions: actions.render_indices(&e.robust_set.actions),
                    })
                    .collect()
            } else {
                Vec::new()
            },
        });
        CertificateDoc {
            verdict: match self.verdict {
                Verdict::Robust => "robust",
                Verdict::NotRobust => "not-robust",
            }
            .into(),
            alpha: self.alpha,
            mode: mode::<S>(),
            tolerance_qualified: self.tolerance_qualified,
            defectors: self.defectors.clone(),
            witness,
            evidence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectionCheckDoc {
    pub alpha: usize,
    pub robust: bool,
    pub cases: Vec<CertificateDoc>,
}

impl<S: Scalar> DefectionCheck<S> {
    pub fn to_document(&self, actions: &ActionSet) -> DefectionCheckDoc {
        DefectionCheckDoc {
            alpha: self.alpha,
            robust: self.robust,
            cases: self.cases.iter().map(|c| c.to_document(actions)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexDoc {
    pub defection_index: i64,
    pub mode: String,
    pub chain: Vec<DefectionCheckDoc>,
}

impl<S: Scalar> DefectionReport<S> {
    pub fn to_document(&self, actions: &ActionSet) -> IndexDoc {
        IndexDoc {
            defection_index: self.index,
            mode: mode::<S>(),
            chain: self.chain.iter().map(|c| c.to_document(actions)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobustProfileDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Vec<String>>,
    pub check: DefectionCheckDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicsDoc {
    pub outcome: String,
    pub iterations: usize,
    pub last: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReportDoc {
    pub status: String,
    pub alpha: usize,
    pub mode: String,
    pub candidates_examined: usize,
    pub robust_profiles: Vec<RobustProfileDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsDoc>,
}

impl<S: Scalar> SearchReport<S> {
    pub fn to_document(&self, actions: &ActionSet) -> SearchReportDoc {
        SearchReportDoc {
            status: match self.status {
                SearchStatus::Exhaustive => "exhaustive",
                SearchStatus::Heuristic => "heuristic",
            }
            .into(),
            alpha: self.alpha,
            mode: mode::<S>(),
            candidates_examined: self.candidates_examined,
            robust_profiles: self
                .robust_profiles
                .iter()
                .map(|p| RobustProfileDoc {
                    assignment: match &p.candidate {
                        Candidate::Pure(a) => Some(a.counts().to_vec()),
                        Candidate::Symmetric(_) => None,
                    },
                    strategy: match &p.candidate {
                        Candidate::Pure(_) => None,
                        Candidate::Symmetric(s) => Some(s.render()),
                    },
                    check: p.check.to_document(actions),
                })
                .collect(),
            dynamics: self.dynamics.as_ref().map(|d| DynamicsDoc {
                outcome: match d.outcome {
                    DynamicsOutcome::Converged => "converged",
                    DynamicsOutcome::EmptyRobustSet => "empty-robust-set",
                    DynamicsOutcome::MaxIterations => "max-iterations",
                    DynamicsOutcome::VerificationRejected => "verification-rejected",
                }
                .into(),
                iterations: d.iterations,
                last: d.last.render(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitivityDoc {
    pub base_config: Vec<usize>,
    pub basis_action: String,
    pub c: Vec<String>,
    pub delta_c: Vec<String>,
    pub delta_c_raw: Vec<String>,
    pub y: String,
    pub bound: Vec<String>,
    pub holds: bool,
    pub holds_raw: bool,
    pub convention: String,
}

impl<S: Scalar> SensitivityReport<S> {
    pub fn to_document(&self, actions: &ActionSet) -> SensitivityDoc {
        SensitivityDoc {
            base_config: self.base_config.counts().to_vec(),
            basis_action: actions.label(self.basis_action).to_string(),
            c: render_all(&self.c),
            delta_c: render_all(&self.delta_c),
            delta_c_raw: render_all(&self.delta_c_raw),
            y: self.y.render(),
            bound: render_all(&self.bound),
            holds: self.holds,
            holds_raw: self.holds_raw,
            convention: CONVENTION.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigVectorDoc {
    pub config: Vec<usize>,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceDoc {
    pub invariant: bool,
    pub norm: String,
    pub reference_actions: Vec<String>,
    pub vectors: Vec<ConfigVectorDoc>,
}

impl<S: Scalar> InvarianceReport<S> {
    pub fn to_document(&self, actions: &ActionSet) -> InvarianceDoc {
        InvarianceDoc {
            invariant: self.invariant,
            norm: "euclidean".into(),
            reference_actions: actions.render_indices(&self.reference_actions),
            vectors: self
                .vectors
                .iter()
                .map(|(g, v)| ConfigVectorDoc {
                    config: g.counts().to_vec(),
                    values: render_all(v),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleDoc {
    pub robust: bool,
    pub method: String,
    pub samples: usize,
    pub seed: u64,
    pub pure_configs_checked: usize,
}

impl OracleVerdict {
    pub fn to_document(&self) -> OracleDoc {
        OracleDoc {
            robust: self.robust,
            method: match self.method {
                OracleMethod::ExhaustivePure => "exhaustive-pure",
                OracleMethod::SampledMixed => "sampled-mixed",
            }
            .into(),
            samples: self.samples,
            seed: self.seed,
            pure_configs_checked: self.pure_configs_checked,
        }
    }
}
