//! Combinatorial strata of the space of genus-one stable maps to the plane.
//!
//! A stable map from a genus-one curve breaks the domain into components
//! recorded by a dual graph. Two families index the strata:
//!
//! * trees with a distinguished vertex `c` (the genus-one component) carrying
//!   degree `e`, plus `k` rational vertices of degrees `w_1..w_k`;
//! * graphs with exactly one circuit of rational vertices (the nodal
//!   degeneration), `k + 1` vertices in total, where `e` is the total degree on
//!   the circuit.
//!
//! In both cases the degrees sum to `d` and the `3d - 1` marked legs are
//! distributed over the vertices. A zero-degree vertex must have at least
//! three special points (edges plus legs); the distinguished vertex of a tree
//! is exempt. The stratum is empty iff `e = 1`, has dimension `6d - 2 - k`
//! when `e >= 2` and `6d - k` when `e = 0`.
//!
//! Vertex 0 is the distinguished vertex of a tree. Circuit graphs have no
//! distinguished vertex.

mod canon;
mod classify;
mod enumerate;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::invariants::Count;

pub use canon::{automorphisms, is_isomorphic};
pub use classify::{classify_survivors, Classified, Note, SurvivorReport};
pub use enumerate::{
    enumerate, enumerate_marked, enumerate_shapes, EnumerationConfig, Listing, MarkedClass,
    DEFAULT_CEILING, MAX_EXTRA_VERTICES,
};

pub type Edge = (usize, usize);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrataError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("graph is not stable")]
    Unstable,
    #[error("degree must be at least 3, got {0}")]
    DegreeTooSmall(u32),
    #[error("at most {limit} extra vertices are supported, requested {requested}")]
    TooManyVertices { requested: usize, limit: usize },
    #[error("projected class count {projected} exceeds the ceiling {ceiling}")]
    CeilingExceeded { projected: Count, ceiling: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    /// Tree with a distinguished genus-one vertex.
    Tree,
    /// Graph of rational components with one circuit.
    Circuit,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::Tree => "tree",
            GraphKind::Circuit => "circuit",
        })
    }
}

/// Dimension of a stratum, or `Empty` when the stratum has no points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StratumDimension {
    Empty,
    Dim(i64),
}

impl StratumDimension {
    pub fn value(self) -> Option<i64> {
        match self {
            StratumDimension::Empty => None,
            StratumDimension::Dim(d) => Some(d),
        }
    }

    fn lowered(self, by: i64) -> Self {
        match self {
            StratumDimension::Empty => StratumDimension::Empty,
            StratumDimension::Dim(d) => StratumDimension::Dim(d - by),
        }
    }
}

impl fmt::Display for StratumDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StratumDimension::Empty => f.write_str("empty"),
            StratumDimension::Dim(d) => write!(f, "{d}"),
        }
    }
}

impl Serialize for StratumDimension {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            StratumDimension::Empty => serializer.serialize_none(),
            StratumDimension::Dim(d) => serializer.serialize_i64(*d),
        }
    }
}

fn incidence(n: usize, edges: &[Edge]) -> Vec<usize> {
    let mut deg = vec![0; n];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    deg
}

/// Vertices on the circuit, found by repeatedly stripping leaves. For a tree
/// this returns only the distinguished vertex.
fn core_vertices(kind: GraphKind, n: usize, edges: &[Edge]) -> Vec<usize> {
    if kind == GraphKind::Tree {
        return vec![0];
    }
    let mut deg = incidence(n, edges);
    let mut alive = vec![true; n];
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if alive[v] && deg[v] <= 1 {
                alive[v] = false;
                changed = true;
                for &(a, b) in edges {
                    if a == v && alive[b] {
                        deg[b] -= 1;
                    } else if b == v && alive[a] {
                        deg[a] -= 1;
                    }
                }
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

/// Shared view of a stratum-indexing graph. Everything here depends only on
/// the vertex weights, the edges and how many legs sit on each vertex.
pub trait Stratum {
    fn kind(&self) -> GraphKind;
    fn weights(&self) -> &[u32];
    fn edges(&self) -> &[Edge];
    fn leg_count(&self, v: usize) -> usize;

    fn vertex_count(&self) -> usize {
        self.weights().len()
    }

    /// `d`, the total degree.
    fn degree(&self) -> u32 {
        self.weights().iter().sum()
    }

    /// `k`: non-distinguished vertices of a tree, or one less than the
    /// vertex count of a circuit graph.
    fn extra_vertices(&self) -> usize {
        self.vertex_count() - 1
    }

    fn valence(&self, v: usize) -> usize {
        let edges = self
            .edges()
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum::<usize>();
        edges + self.leg_count(v)
    }

    fn core(&self) -> Vec<usize> {
        core_vertices(self.kind(), self.vertex_count(), self.edges())
    }

    /// `e`: the degree on the distinguished vertex, or the total degree on
    /// the circuit.
    fn core_weight(&self) -> u32 {
        self.core().iter().map(|&v| self.weights()[v]).sum()
    }

    fn is_stable(&self) -> bool {
        let first = match self.kind() {
            GraphKind::Tree => 1,
            GraphKind::Circuit => 0,
        };
        (first..self.vertex_count()).all(|v| self.weights()[v] != 0 || self.valence(v) >= 3)
    }

    fn dimension(&self) -> Result<StratumDimension, StrataError> {
        if !self.is_stable() {
            return Err(StrataError::Unstable);
        }
        let d = i64::from(self.degree());
        let k = self.extra_vertices() as i64;
        Ok(match self.core_weight() {
            1 => StratumDimension::Empty,
            0 => StratumDimension::Dim(6 * d - k),
            _ => StratumDimension::Dim(6 * d - 2 - k),
        })
    }

    /// The degree is contracted on the core and concentrated on a single
    /// rational vertex off the core. Limits of maps from smooth domains then
    /// force a cusp-type vanishing condition at the attaching node, cutting
    /// two dimensions.
    fn has_deformation_drop(&self) -> bool {
        let d = self.degree();
        let core: BTreeSet<usize> = self.core().into_iter().collect();
        self.core_weight() == 0
            && (0..self.vertex_count()).any(|v| !core.contains(&v) && self.weights()[v] == d)
    }

    /// Dimension of the part of the stratum lying in the closure of maps with
    /// irreducible domain.
    fn deformation_bound(&self) -> Result<StratumDimension, StrataError> {
        let dim = self.dimension()?;
        Ok(if self.has_deformation_drop() {
            dim.lowered(2)
        } else {
            dim
        })
    }
}

fn validate_skeleton(kind: GraphKind, weights: &[u32], edges: &[Edge]) -> Result<(), StrataError> {
    let n = weights.len();
    let invalid = |m: String| Err(StrataError::Invalid(m));
    let min_vertices = match kind {
        GraphKind::Tree => 1,
        GraphKind::Circuit => 2,
    };
    if n < min_vertices {
        return invalid(format!("a {kind} needs at least {min_vertices} vertices"));
    }
    if weights.iter().sum::<u32>() == 0 {
        return invalid("total degree must be positive".into());
    }
    let expected_edges = match kind {
        GraphKind::Tree => n - 1,
        GraphKind::Circuit => n,
    };
    if edges.len() != expected_edges {
        return invalid(format!(
            "a {kind} on {n} vertices has {expected_edges} edges, got {}",
            edges.len()
        ));
    }
    for &(a, b) in edges {
        if a >= n || b >= n {
            return invalid(format!("edge ({a}, {b}) out of range"));
        }
        if a == b {
            return invalid(format!("self edge at vertex {a}"));
        }
    }
    // Connected with |E| = |V| - 1 + b_1 pins the first Betti number.
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let next = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[next] {
                seen[next] = true;
                stack.push(next);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return invalid("graph is not connected".into());
    }
    Ok(())
}

/// A stratum-indexing graph with labelled legs `1..=3d-1`.
///
/// Construct trees with [`MarkedGraph::tree`] and circuit graphs with
/// [`MarkedGraph::circuit`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedGraph {
    kind: GraphKind,
    weights: Vec<u32>,
    edges: Vec<Edge>,
    legs: Vec<Vec<u32>>,
}

impl MarkedGraph {
    pub fn new(
        kind: GraphKind,
        weights: Vec<u32>,
        edges: Vec<Edge>,
        mut legs: Vec<Vec<u32>>,
    ) -> Result<Self, StrataError> {
        validate_skeleton(kind, &weights, &edges)?;
        if legs.len() != weights.len() {
            return Err(StrataError::Invalid(format!(
                "{} leg lists for {} vertices",
                legs.len(),
                weights.len()
            )));
        }
        let d: u32 = weights.iter().sum();
        let mut all: Vec<u32> = legs.iter().flatten().copied().collect();
        all.sort_unstable();
        if all != (1..=3 * d - 1).collect::<Vec<_>>() {
            return Err(StrataError::Invalid(format!(
                "legs must be exactly 1..={} each used once",
                3 * d - 1
            )));
        }
        for l in &mut legs {
            l.sort_unstable();
        }
        Ok(MarkedGraph {
            kind,
            weights,
            edges,
            legs,
        })
    }

    /// Tree with distinguished vertex 0.
    pub fn tree(
        weights: Vec<u32>,
        edges: Vec<Edge>,
        legs: Vec<Vec<u32>>,
    ) -> Result<Self, StrataError> {
        Self::new(GraphKind::Tree, weights, edges, legs)
    }

    pub fn circuit(
        weights: Vec<u32>,
        edges: Vec<Edge>,
        legs: Vec<Vec<u32>>,
    ) -> Result<Self, StrataError> {
        Self::new(GraphKind::Circuit, weights, edges, legs)
    }

    pub(crate) fn from_parts(
        kind: GraphKind,
        weights: Vec<u32>,
        edges: Vec<Edge>,
        legs: Vec<Vec<u32>>,
    ) -> Self {
        MarkedGraph {
            kind,
            weights,
            edges,
            legs,
        }
    }

    pub fn legs(&self) -> &[Vec<u32>] {
        &self.legs
    }

    pub fn leg_counts(&self) -> Vec<usize> {
        self.legs.iter().map(Vec::len).collect()
    }

    /// Moves vertex `v` to position `perm[v]`. Trees require `perm[0] == 0`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, StrataError> {
        let n = self.vertex_count();
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(StrataError::Invalid("not a permutation".into()));
        }
        if self.kind == GraphKind::Tree && perm[0] != 0 {
            return Err(StrataError::Invalid(
                "relabelling must fix the distinguished vertex".into(),
            ));
        }
        let mut weights = vec![0; n];
        let mut legs = vec![Vec::new(); n];
        for v in 0..n {
            weights[perm[v]] = self.weights[v];
            legs[perm[v]] = self.legs[v].clone();
        }
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| (perm[a], perm[b]))
            .collect();
        Ok(MarkedGraph::from_parts(self.kind, weights, edges, legs))
    }

    /// The shape obtained by forgetting leg labels.
    pub fn shape(&self) -> ShapeClass {
        ShapeClass::from_parts(
            self.kind,
            self.weights.clone(),
            self.edges.clone(),
            self.leg_counts(),
        )
    }

    /// Canonical serialization; equal exactly for isomorphic graphs.
    pub fn canonical_form(&self) -> String {
        canon::canonical_string(
            self.kind,
            &self.weights,
            &self.edges,
            canon::LegView::Labels(&self.legs),
        )
    }
}

impl Stratum for MarkedGraph {
    fn kind(&self) -> GraphKind {
        self.kind
    }
    fn weights(&self) -> &[u32] {
        &self.weights
    }
    fn edges(&self) -> &[Edge] {
        &self.edges
    }
    fn leg_count(&self, v: usize) -> usize {
        self.legs[v].len()
    }
}

/// A graph with leg labels forgotten, standing for all marked isomorphism
/// classes that share it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeClass {
    kind: GraphKind,
    weights: Vec<u32>,
    edges: Vec<Edge>,
    leg_counts: Vec<usize>,
    multiplicity: Count,
    canonical: String,
}

impl ShapeClass {
    /// Builds a shape and computes its multiplicity by orbit counting.
    pub fn new(
        kind: GraphKind,
        weights: Vec<u32>,
        edges: Vec<Edge>,
        leg_counts: Vec<usize>,
    ) -> Result<Self, StrataError> {
        validate_skeleton(kind, &weights, &edges)?;
        let d: u32 = weights.iter().sum();
        if leg_counts.len() != weights.len()
            || leg_counts.iter().sum::<usize>() != (3 * d - 1) as usize
        {
            return Err(StrataError::Invalid(format!(
                "leg counts must cover {} vertices and sum to {}",
                weights.len(),
                3 * d - 1
            )));
        }
        Ok(Self::from_parts(kind, weights, edges, leg_counts))
    }

    pub(crate) fn from_parts(
        kind: GraphKind,
        weights: Vec<u32>,
        edges: Vec<Edge>,
        leg_counts: Vec<usize>,
    ) -> Self {
        let canonical =
            canon::canonical_string(kind, &weights, &edges, canon::LegView::Counts(&leg_counts));
        let multiplicity = enumerate::orbit_count(kind, &weights, &edges, &leg_counts);
        ShapeClass {
            kind,
            weights,
            edges,
            leg_counts,
            multiplicity,
            canonical,
        }
    }

    pub fn leg_counts(&self) -> &[usize] {
        &self.leg_counts
    }

    /// Number of marked isomorphism classes with this shape.
    pub fn multiplicity(&self) -> &Count {
        &self.multiplicity
    }

    pub fn canonical_form(&self) -> &str {
        &self.canonical
    }
}

impl Stratum for ShapeClass {
    fn kind(&self) -> GraphKind {
        self.kind
    }
    fn weights(&self) -> &[u32] {
        &self.weights
    }
    fn edges(&self) -> &[Edge] {
        &self.edges
    }
    fn leg_count(&self, v: usize) -> usize {
        self.leg_counts[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legs_on(n: usize, vertex: usize, total: u32) -> Vec<Vec<u32>> {
        let mut legs = vec![Vec::new(); n];
        legs[vertex] = (1..=total).collect();
        legs
    }

    #[test]
    fn phi_shape_is_stable() {
        let g = MarkedGraph::tree(vec![0, 3], vec![(0, 1)], legs_on(2, 1, 8)).unwrap();
        assert!(g.is_stable());
        assert_eq!(g.dimension().unwrap(), StratumDimension::Dim(17));
        assert_eq!(g.deformation_bound().unwrap(), StratumDimension::Dim(15));
    }

    #[test]
    fn zero_weight_leaf_with_one_leg_is_unstable() {
        let mut legs = legs_on(2, 0, 7);
        legs[1].push(8);
        let g = MarkedGraph::tree(vec![3, 0], vec![(0, 1)], legs).unwrap();
        assert!(!g.is_stable());
        assert_eq!(g.dimension(), Err(StrataError::Unstable));
        assert_eq!(g.deformation_bound(), Err(StrataError::Unstable));
    }

    #[test]
    fn distinguished_vertex_is_exempt() {
        // c has weight 0 and valence 1.
        let g = MarkedGraph::tree(vec![0, 3], vec![(0, 1)], legs_on(2, 1, 8)).unwrap();
        assert_eq!(g.valence(0), 1);
        assert!(g.is_stable());
    }

    #[test]
    fn bare_double_edge_is_unstable() {
        let g = ShapeClass::from_parts(
            GraphKind::Circuit,
            vec![0, 0, 3],
            vec![(0, 1), (0, 1), (1, 2)],
            vec![0, 0, 8],
        );
        assert_eq!(g.valence(0), 2);
        assert!(!g.is_stable());
        let g = ShapeClass::from_parts(
            GraphKind::Circuit,
            vec![0, 0],
            vec![(0, 1), (0, 1)],
            vec![0, 0],
        );
        assert!(!g.is_stable());
    }

    #[test]
    fn dimension_examples() {
        let trivial = MarkedGraph::tree(vec![3], vec![], legs_on(1, 0, 8)).unwrap();
        assert_eq!(trivial.dimension().unwrap(), StratumDimension::Dim(16));
        assert_eq!(
            trivial.deformation_bound().unwrap(),
            StratumDimension::Dim(16)
        );

        let empty = MarkedGraph::tree(vec![1, 2], vec![(0, 1)], legs_on(2, 1, 8)).unwrap();
        assert_eq!(empty.dimension().unwrap(), StratumDimension::Empty);
        assert_eq!(empty.deformation_bound().unwrap(), StratumDimension::Empty);

        // Omega: weightless 2-circuit {0, 1}, vertex 2 of weight d on 1.
        let mut legs = legs_on(3, 2, 8);
        legs[2].retain(|&l| l != 8);
        legs[0].push(8);
        let omega =
            MarkedGraph::circuit(vec![0, 0, 3], vec![(0, 1), (1, 0), (1, 2)], legs).unwrap();
        assert!(omega.is_stable());
        assert_eq!(omega.core(), vec![0, 1]);
        assert_eq!(omega.dimension().unwrap(), StratumDimension::Dim(16));
        assert_eq!(
            omega.deformation_bound().unwrap(),
            StratumDimension::Dim(14)
        );

        // Circuit with degree 1 on the circuit.
        let g = MarkedGraph::circuit(
            vec![1, 0, 2],
            vec![(0, 1), (1, 2), (2, 0)],
            legs_on(3, 1, 8),
        )
        .unwrap();
        assert_eq!(g.core_weight(), 3);
        let g = MarkedGraph::circuit(
            vec![1, 0, 2],
            vec![(0, 1), (0, 1), (1, 2)],
            legs_on(3, 1, 8),
        )
        .unwrap();
        assert_eq!(g.core_weight(), 1);
        assert_eq!(g.dimension().unwrap(), StratumDimension::Empty);
    }

    #[test]
    fn deformation_drop_bound() {
        // c (e=0) - v1 (w=0) - v2 (w=3); v1 needs one leg to be stable.
        let mut legs = legs_on(3, 2, 8);
        legs[2].retain(|&l| l != 1);
        legs[1].push(1);
        let g = MarkedGraph::tree(vec![0, 0, 3], vec![(0, 1), (1, 2)], legs).unwrap();
        assert_eq!(g.dimension().unwrap(), StratumDimension::Dim(16));
        assert_eq!(g.deformation_bound().unwrap(), StratumDimension::Dim(14));
    }

    #[test]
    fn validation_errors() {
        assert!(MarkedGraph::tree(vec![3, 0], vec![], legs_on(2, 0, 8)).is_err());
        assert!(MarkedGraph::tree(vec![3], vec![], legs_on(1, 0, 7)).is_err());
        assert!(MarkedGraph::circuit(vec![3, 0], vec![(0, 0), (0, 1)], legs_on(2, 0, 8)).is_err());
        assert!(MarkedGraph::circuit(vec![3], vec![], legs_on(1, 0, 8)).is_err());
        // Two components: a double edge plus an isolated vertex.
        assert!(MarkedGraph::circuit(
            vec![1, 1, 1],
            vec![(0, 1), (0, 1), (1, 0)],
            legs_on(3, 0, 8)
        )
        .is_err());
        assert!(ShapeClass::new(GraphKind::Tree, vec![3], vec![], vec![7]).is_err());
    }

    #[test]
    fn relabel_rejects_moving_c() {
        let g = MarkedGraph::tree(vec![0, 3], vec![(0, 1)], legs_on(2, 1, 8)).unwrap();
        assert!(g.relabel(&[1, 0]).is_err());
        assert!(g.relabel(&[0, 0]).is_err());
    }
}
