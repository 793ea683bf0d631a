//! Named check results shared by the pipeline and the command-line reports.

use serde::{Deserialize, Serialize};

/// Which inequality or construction a check exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckTag {
    /// Turán's localization inequality for prime sums over a window.
    TuranCriterion,
    /// Counting subdivision intervals met by the image of the good set.
    CoveringCount,
    /// `xi >= p_N^{-q}` for prime phases.
    SpacingLowerBound,
    /// Increment and plain moment bounds for shifted polynomials.
    MomentBounds,
    /// Mean-value bound for prime polynomials over `[-T, T]`.
    MomentCorollary,
    /// Montgomery-Vaughan form of Hilbert's inequality.
    HilbertInequality,
    /// Chaining bound for local suprema.
    ChainingBound,
    /// Main parameter identities and the family supremum threshold.
    MainParameters,
    /// Independent zeta evaluation over candidate boxes.
    ZetaOracle,
}

impl CheckTag {
    /// The tags tied to a step of the construction; `ZetaOracle` is an
    /// outside cross-check and not among them.
    pub const CONSTRUCTION: [CheckTag; 8] = [
        CheckTag::TuranCriterion,
        CheckTag::CoveringCount,
        CheckTag::SpacingLowerBound,
        CheckTag::MomentBounds,
        CheckTag::MomentCorollary,
        CheckTag::HilbertInequality,
        CheckTag::ChainingBound,
        CheckTag::MainParameters,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckTag::TuranCriterion => "turan-criterion",
            CheckTag::CoveringCount => "covering-count",
            CheckTag::SpacingLowerBound => "spacing-lower-bound",
            CheckTag::MomentBounds => "moment-bounds",
            CheckTag::MomentCorollary => "moment-corollary",
            CheckTag::HilbertInequality => "hilbert-inequality",
            CheckTag::ChainingBound => "chaining-bound",
            CheckTag::MainParameters => "main-parameters",
            CheckTag::ZetaOracle => "zeta-oracle",
        }
    }
}

impl std::fmt::Display for CheckTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Computed and reported, but not an inequality the theory guarantees.
    Info,
    /// Skipped because the instance is beyond the feasibility cap.
    AnalysisOnly,
}

/// What backs a check. Only failures of `Theorem` checks count as bugs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    Theorem,
    Empirical,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub tag: CheckTag,
    pub name: String,
    pub basis: Basis,
    pub status: Status,
    pub detail: String,
}

impl Check {
    pub fn new(tag: CheckTag, name: impl Into<String>, basis: Basis, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            tag,
            name: name.into(),
            basis,
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    pub fn info(tag: CheckTag, name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            tag,
            name: name.into(),
            basis: Basis::Empirical,
            status: Status::Info,
            detail: detail.into(),
        }
    }

    pub fn analysis_only(tag: CheckTag, name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            tag,
            name: name.into(),
            basis: Basis::Theorem,
            status: Status::AnalysisOnly,
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    /// A theorem-backed inequality failed numerically.
    pub fn is_bug(&self) -> bool {
        self.basis == Basis::Theorem && self.status == Status::Fail
    }
}
