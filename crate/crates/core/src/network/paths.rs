//! Paths through the layer index sets, and the frequency-decreasing rule
//! that prunes the path tree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{AtomLabel, Direction};

/// An ordered choice of one atom label per traversed layer; empty for the
/// root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Path(pub Vec<AtomLabel>);

impl Path {
    pub fn empty() -> Self {
        Path(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for Path {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (k, label) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "/")?;
            }
            write!(f, "{label}")?;
        }
        Ok(())
    }
}

/// Path enumeration mode: the full per-layer product, or only paths whose
/// wavelet scales never drop below the running maximum (strict variant:
/// strictly increase past it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathPruning {
    #[default]
    Full,
    FrequencyDecreasing,
    FrequencyDecreasingStrict,
}

impl PathPruning {
    /// Whether an atom with this label may extend a path whose largest
    /// wavelet scale so far is `running_max` (0 when none). Unlabeled atoms
    /// are never pruned and do not move the running maximum.
    pub(crate) fn allows(self, running_max: u32, label: &AtomLabel) -> bool {
        let Some(scale) = label.scale() else { return true };
        match self {
            PathPruning::Full => true,
            PathPruning::FrequencyDecreasing => scale >= running_max,
            PathPruning::FrequencyDecreasingStrict => scale > running_max,
        }
    }

    pub(crate) fn advance(self, running_max: u32, label: &AtomLabel) -> u32 {
        label.scale().map_or(running_max, |s| s.max(running_max))
    }
}

fn direction_set(directions: usize) -> Result<&'static [Direction]> {
    match directions {
        1 => Ok(&[Direction::None]),
        3 => Ok(&[Direction::Horizontal, Direction::Vertical, Direction::Diagonal]),
        d => Err(Error::InvalidParameter(format!(
            "wavelet banks carry 1 or 3 directions, got {d}"
        ))),
    }
}

fn expand(
    prefix: &mut Vec<AtomLabel>,
    running_max: u32,
    depth_left: usize,
    scales: u32,
    dirs: &[Direction],
    pruning: PathPruning,
    out: &mut Vec<Path>,
) {
    if depth_left == 0 {
        out.push(Path(prefix.clone()));
        return;
    }
    for scale in 1..=scales {
        for &direction in dirs {
            let label = AtomLabel::Wavelet { scale, direction };
            if pruning.allows(running_max, &label) {
                let next_max = pruning.advance(running_max, &label);
                prefix.push(label);
                expand(prefix, next_max, depth_left - 1, scales, dirs, pruning, out);
                prefix.pop();
            }
        }
    }
}

/// All depth-`depth` paths over wavelet labels `(scale, direction)` with
/// scales in `1..=scales`, whose scale sequence never drops below its
/// running maximum. Directions are unconstrained. Lexicographic order.
pub fn frequency_decreasing_paths(
    scales: u32,
    directions: usize,
    depth: usize,
    strict: bool,
) -> Result<Vec<Path>> {
    let dirs = direction_set(directions)?;
    let pruning = if strict {
        PathPruning::FrequencyDecreasingStrict
    } else {
        PathPruning::FrequencyDecreasing
    };
    let mut out = Vec::new();
    expand(&mut Vec::new(), 0, depth, scales, dirs, pruning, &mut out);
    out.sort();
    Ok(out)
}
