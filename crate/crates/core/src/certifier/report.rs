use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ingredients::GapResult;

/// Every check the certifier can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "two_space")]
    TwoSpace,
    #[serde(rename = "two_half_space")]
    TwoHalfSpace,
    #[serde(rename = "three_space")]
    ThreeSpace,
    #[serde(rename = "maassen_uffink")]
    MaassenUffink,
    #[serde(rename = "proof_replay_2")]
    ProofReplay2,
    #[serde(rename = "proof_replay_2half")]
    ProofReplay2Half,
    #[serde(rename = "concavity")]
    Concavity,
    #[serde(rename = "purification_reduction")]
    PurificationReduction,
    #[serde(rename = "triple_golden_thompson")]
    TripleGoldenThompson,
    #[serde(rename = "gibbs_variational")]
    GibbsVariational,
    #[serde(rename = "operator_jensen")]
    OperatorJensen,
}

impl Theorem {
    pub const ALL: [Theorem; 11] = [
        Theorem::TwoSpace,
        Theorem::TwoHalfSpace,
        Theorem::ThreeSpace,
        Theorem::MaassenUffink,
        Theorem::ProofReplay2,
        Theorem::ProofReplay2Half,
        Theorem::Concavity,
        Theorem::PurificationReduction,
        Theorem::TripleGoldenThompson,
        Theorem::GibbsVariational,
        Theorem::OperatorJensen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::TwoSpace => "two_space",
            Theorem::TwoHalfSpace => "two_half_space",
            Theorem::ThreeSpace => "three_space",
            Theorem::MaassenUffink => "maassen_uffink",
            Theorem::ProofReplay2 => "proof_replay_2",
            Theorem::ProofReplay2Half => "proof_replay_2half",
            Theorem::Concavity => "concavity",
            Theorem::PurificationReduction => "purification_reduction",
            Theorem::TripleGoldenThompson => "triple_golden_thompson",
            Theorem::GibbsVariational => "gibbs_variational",
            Theorem::OperatorJensen => "operator_jensen",
        }
    }

    pub fn from_name(name: &str) -> Option<Theorem> {
        Theorem::ALL.into_iter().find(|t| t.name() == name)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

impl NamedValue {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    /// `lhs ≥ rhs`, gap `lhs − rhs`.
    Inequality,
    /// `lhs = rhs`, gap `−|lhs − rhs|`.
    Identity,
}

/// One step of a replayed proof chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub name: String,
    pub kind: LinkKind,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ChainLink {
    pub fn inequality(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let gap = lhs - rhs;
        Self {
            name: name.into(),
            kind: LinkKind::Inequality,
            lhs,
            rhs,
            gap,
            tolerance,
            pass: gap >= -tolerance,
        }
    }

    pub fn identity(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let gap = -(lhs - rhs).abs();
        Self {
            name: name.into(),
            kind: LinkKind::Identity,
            lhs,
            rhs,
            gap,
            tolerance,
            pass: gap >= -tolerance,
        }
    }
}

/// Where an evaluated instance came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceDigest {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularization_delta: Option<f64>,
}

/// Evaluated inequality `Σ lhs_terms ≥ Σ rhs_terms`.
///
/// `slack = Σ lhs − Σ rhs`. For theorem checks `pass ⇔ slack ≥ −tolerance`;
/// proof replays additionally require every chain link to pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem: Theorem,
    pub lhs_terms: Vec<NamedValue>,
    pub rhs_terms: Vec<NamedValue>,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intermediates: Vec<NamedValue>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<ChainLink>,
    pub instance: InstanceDigest,
}

impl InequalityReport {
    pub fn new(
        theorem: Theorem,
        lhs_terms: Vec<NamedValue>,
        rhs_terms: Vec<NamedValue>,
        tolerance: f64,
    ) -> Self {
        let slack = Self::slack_of(&lhs_terms, &rhs_terms);
        Self {
            theorem,
            lhs_terms,
            rhs_terms,
            slack,
            tolerance,
            pass: slack >= -tolerance,
            intermediates: Vec::new(),
            links: Vec::new(),
            instance: InstanceDigest::default(),
        }
    }

    /// Wraps a single gap check as `gap ≥ 0`, keeping the two sides as
    /// intermediates.
    pub fn from_gap(theorem: Theorem, gap: &GapResult) -> Self {
        let mut report = Self::new(theorem, vec![NamedValue::new("gap", gap.gap)], Vec::new(), gap.tolerance);
        report.intermediates = vec![NamedValue::new("lhs", gap.lhs), NamedValue::new("rhs", gap.rhs)];
        report
    }

    fn slack_of(lhs: &[NamedValue], rhs: &[NamedValue]) -> f64 {
        lhs.iter().map(|t| t.value).sum::<f64>() - rhs.iter().map(|t| t.value).sum::<f64>()
    }

    /// Slack recomputed from the named terms.
    pub fn recomputed_slack(&self) -> f64 {
        Self::slack_of(&self.lhs_terms, &self.rhs_terms)
    }

    pub fn with_intermediate(mut self, name: impl Into<String>, value: f64) -> Self {
        self.intermediates.push(NamedValue::new(name, value));
        self
    }

    pub fn with_instance(mut self, instance: InstanceDigest) -> Self {
        self.instance = instance;
        self
    }

    pub(crate) fn with_links(mut self, links: Vec<ChainLink>) -> Self {
        self.pass = self.pass && links.iter().all(|l| l.pass);
        self.links = links;
        self
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.lhs_terms
            .iter()
            .chain(&self.rhs_terms)
            .chain(&self.intermediates)
            .find(|t| t.name == name)
            .map(|t| t.value)
    }

    pub fn link(&self, name: &str) -> Option<&ChainLink> {
        self.links.iter().find(|l| l.name == name)
    }
}
