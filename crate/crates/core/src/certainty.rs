//! Mapping from rating scores to certainty levels.
//!
//! Crowd workers rate a statement on a scale from -2 (certainly wrong) to
//! 2 (certainly right). The mean rating maps onto four certainty levels,
//! each carrying the probability attached to facts built from it.

use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertaintyLevel {
    Tentative,
    Likely,
    StronglyLikely,
    Inherent,
}

impl CertaintyLevel {
    pub const ALL: [CertaintyLevel; 4] = [
        CertaintyLevel::Tentative,
        CertaintyLevel::Likely,
        CertaintyLevel::StronglyLikely,
        CertaintyLevel::Inherent,
    ];

    pub fn prob(self) -> f64 {
        match self {
            CertaintyLevel::Tentative => 0.5,
            CertaintyLevel::Likely => 0.7,
            CertaintyLevel::StronglyLikely => 0.9,
            CertaintyLevel::Inherent => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CertaintyLevel::Tentative => "tentative",
            CertaintyLevel::Likely => "likely",
            CertaintyLevel::StronglyLikely => "strongly_likely",
            CertaintyLevel::Inherent => "inherent",
        }
    }
}

impl fmt::Display for CertaintyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreOutOfRange(pub f64);

impl fmt::Display for ScoreOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mean rating {} outside [-2, 2]", self.0)
    }
}

/// Buckets a mean rating. Non-positive means carry no certainty at all and
/// map to `None`; the statement should be dropped, not stored at zero.
/// `Inherent` is never produced here, it marks curated definitional facts.
pub fn score_to_certainty(mean: f64) -> Result<Option<CertaintyLevel>, ScoreOutOfRange> {
    if !(-2.0..=2.0).contains(&mean) || mean.is_nan() {
        return Err(ScoreOutOfRange(mean));
    }
    Ok(if mean <= 0.0 {
        None
    } else if mean <= 0.7 {
        Some(CertaintyLevel::Tentative)
    } else if mean <= 1.4 {
        Some(CertaintyLevel::Likely)
    } else {
        Some(CertaintyLevel::StronglyLikely)
    })
}
