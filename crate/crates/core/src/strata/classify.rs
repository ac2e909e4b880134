//! Which strata can meet a general point condition in the `j`-fibre.
//!
//! Imposing `3d - 1` general point conditions on the `6d - 1`-dimensional
//! space and restricting to one `j`-fibre leaves a 0-dimensional set, so a
//! stratum can only contribute when the part of it inside the closure of
//! smooth-domain maps has dimension at least `6d - 2`.

use serde::Serialize;

use super::enumerate::{enumerate_shapes, EnumerationConfig};
use super::{GraphKind, ShapeClass, StrataError, Stratum, StratumDimension};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Note {
    /// The open stratum of maps with irreducible domain.
    Trivial,
    /// Survives the dimension count, but its image is a union of two
    /// rational curves of positive degrees, which misses general points.
    PositivePartition,
    /// Large enough before, too small after the two-dimensional drop.
    DeformationCut,
    LowDimension,
    Empty,
    /// A survivor outside every expected family.
    Unexpected,
}

impl Note {
    pub fn label(self) -> &'static str {
        match self {
            Note::Trivial => "trivial",
            Note::PositivePartition => "positive-partition (geometrically avoided)",
            Note::DeformationCut => "deformation-cut",
            Note::LowDimension => "low-dimension",
            Note::Empty => "empty",
            Note::Unexpected => "unexpected",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classified {
    pub shape: ShapeClass,
    pub dimension: StratumDimension,
    pub bound: StratumDimension,
    pub survivor: bool,
    /// The survivor list predicted from the shape alone: the trivial tree,
    /// `e = 0` trees with two positively weighted tails, and weightless
    /// circuits with `k = 2` other than the single-tail one.
    pub expected_survivor: bool,
    pub note: Note,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurvivorReport {
    pub degree: u32,
    /// `6d - 2`.
    pub threshold: i64,
    pub entries: Vec<Classified>,
}

impl SurvivorReport {
    pub fn survivors(&self) -> impl Iterator<Item = &Classified> {
        self.entries.iter().filter(|c| c.survivor)
    }

    pub fn avoided(&self) -> impl Iterator<Item = &Classified> {
        self.entries.iter().filter(|c| !c.survivor)
    }

    /// Entries where the computed and predicted verdicts differ.
    pub fn mismatches(&self) -> impl Iterator<Item = &Classified> {
        self.entries
            .iter()
            .filter(|c| c.survivor != c.expected_survivor)
    }
}

fn expected_survivor(shape: &ShapeClass) -> bool {
    let d = shape.degree();
    let k = shape.extra_vertices();
    let e = shape.core_weight();
    match shape.kind() {
        GraphKind::Tree => {
            k == 0 || (e == 0 && k == 2 && shape.weights()[1..].iter().all(|&w| w > 0))
        }
        GraphKind::Circuit => {
            let core = shape.core();
            let tail_of_full_degree =
                (0..shape.vertex_count()).any(|v| !core.contains(&v) && shape.weights()[v] == d);
            e == 0 && k == 2 && !tail_of_full_degree
        }
    }
}

fn classify(shape: ShapeClass, threshold: i64) -> Result<Classified, StrataError> {
    let dimension = shape.dimension()?;
    let bound = shape.deformation_bound()?;
    let survivor = bound.value().is_some_and(|b| b >= threshold);
    let expected = expected_survivor(&shape);
    let note = match (dimension.value(), survivor) {
        (None, _) => Note::Empty,
        (Some(_), true) if shape.kind() == GraphKind::Tree && shape.extra_vertices() == 0 => {
            Note::Trivial
        }
        (Some(_), true) if expected && shape.kind() == GraphKind::Tree => Note::PositivePartition,
        (Some(_), true) => Note::Unexpected,
        (Some(dim), false) if dim >= threshold => Note::DeformationCut,
        (Some(_), false) => Note::LowDimension,
    };
    Ok(Classified {
        shape,
        dimension,
        bound,
        survivor,
        expected_survivor: expected,
        note,
    })
}

/// Classifies every enumerated shape as a survivor (deformation bound at
/// least `6d - 2`) or avoided, alongside the predicted verdict.
pub fn classify_survivors(config: &EnumerationConfig) -> Result<SurvivorReport, StrataError> {
    let shapes = enumerate_shapes(config)?;
    let threshold = 6 * i64::from(config.degree) - 2;
    let entries = shapes
        .into_iter()
        .map(|s| classify(s, threshold))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SurvivorReport {
        degree: config.degree,
        threshold,
        entries,
    })
}
