//! Driver reaction-time estimation from facial landmarks.

pub mod features;
pub mod fuzzy;
pub mod landmarks;

pub use features::{extract, eye_feature, motion_entropy, mouth_feature, FacialFeatures};
pub use fuzzy::{
    defuzzify, gaussian_membership, infer_reaction_time, rule_activation, FuzzyRule, FuzzyRuleBase, Gaussian,
    TNorm,
};
pub use landmarks::{read_landmarks, read_landmarks_file, write_landmarks, LandmarkFrame, LandmarkLayout, Point};

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// One row of a reaction-time trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionSample {
    pub frame: u64,
    /// Features of this frame (held from the previous valid frame when the
    /// frame itself is degenerate).
    pub features: FacialFeatures,
    pub held: bool,
    pub reaction_time: f64,
}

/// Per-frame features, averaged over a trailing window of `window` frames
/// and pushed through the rule base.
///
/// Degenerate frames (coincident eye or mouth corners) reuse the last valid
/// features. Degenerate frames before the first valid one take the first
/// valid frame's features; a trace with no valid frame is an error.
pub fn reaction_time_trace(
    frames: &[LandmarkFrame],
    rb: &FuzzyRuleBase,
    layout: &LandmarkLayout,
    window: usize,
) -> Result<Vec<ReactionSample>> {
    if window == 0 {
        return Err(Error::InvalidParameter("smoothing window must be >= 1".into()));
    }
    let raw: Vec<Option<FacialFeatures>> = frames
        .iter()
        .map(|f| match extract(f, layout) {
            Ok(ft) => Ok(Some(ft)),
            Err(Error::DegenerateFrame { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    if frames.is_empty() {
        return Ok(Vec::new());
    }
    let first_valid = raw
        .iter()
        .flatten()
        .next()
        .copied()
        .ok_or_else(|| Error::InvalidParameter("no frame with valid eye and mouth landmarks".into()))?;

    let mut last = first_valid;
    let mut recent: VecDeque<FacialFeatures> = VecDeque::with_capacity(window);
    let mut out = Vec::with_capacity(frames.len());
    for (frame, ft) in frames.iter().zip(raw) {
        let held = ft.is_none();
        let ft = ft.unwrap_or(last);
        last = ft;
        if recent.len() == window {
            recent.pop_front();
        }
        recent.push_back(ft);
        let n = recent.len() as f64;
        let sum = recent.iter().fold(FacialFeatures::default(), |acc, f| FacialFeatures {
            efv: acc.efv + f.efv,
            mfv: acc.mfv + f.mfv,
            entropy: acc.entropy + f.entropy,
        });
        let mean = FacialFeatures::new(sum.efv / n, sum.mfv / n, sum.entropy / n);
        out.push(ReactionSample {
            frame: frame.frame_index,
            features: ft,
            held,
            reaction_time: infer_reaction_time(&mean, rb)?,
        });
    }
    Ok(out)
}
