//! Enumeration of stable strata up to isomorphism.
//!
//! Skeletons (unlabelled trees rooted at the distinguished vertex, and
//! unicyclic multigraphs) are generated once per vertex count and
//! deduplicated by canonical form. Every weight vector and leg-count vector
//! is then laid over each skeleton.
//!
//! Collapsed mode keeps one [`ShapeClass`] per shape and counts its marked
//! classes by Burnside's lemma. Full mode instead distributes the labelled
//! legs explicitly and deduplicates by canonical form, which gives an
//! independent count.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::canon::{self, LegView};
use super::{Edge, GraphKind, MarkedGraph, ShapeClass, StrataError, Stratum};
use crate::invariants::Count;

/// Largest supported number of non-distinguished vertices.
pub const MAX_EXTRA_VERTICES: usize = 4;

/// Default ceiling on the number of objects one enumeration may emit.
pub const DEFAULT_CEILING: u64 = 250_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub degree: u32,
    pub min_extra_vertices: usize,
    pub max_extra_vertices: usize,
    /// Keep only graphs with this `e`.
    pub core_weight: Option<u32>,
    pub include_trees: bool,
    pub include_circuits: bool,
    /// Keep `e = 1` strata, which are empty.
    pub include_empty: bool,
    pub collapsed: bool,
    pub ceiling: u64,
}

impl EnumerationConfig {
    pub fn new(degree: u32, max_extra_vertices: usize) -> Self {
        EnumerationConfig {
            degree,
            min_extra_vertices: 0,
            max_extra_vertices,
            core_weight: None,
            include_trees: true,
            include_circuits: false,
            include_empty: false,
            collapsed: true,
            ceiling: DEFAULT_CEILING,
        }
    }

    /// Trees with `k = 1` and `e = 0`: the degree sits on one rational tail.
    pub fn single_tail(degree: u32) -> Self {
        EnumerationConfig {
            min_extra_vertices: 1,
            core_weight: Some(0),
            ..Self::new(degree, 1)
        }
    }

    pub fn with_circuits(mut self, on: bool) -> Self {
        self.include_circuits = on;
        self
    }

    pub fn with_collapsed(mut self, on: bool) -> Self {
        self.collapsed = on;
        self
    }

    fn check(&self) -> Result<(), StrataError> {
        if self.degree < 3 {
            return Err(StrataError::DegreeTooSmall(self.degree));
        }
        if self.max_extra_vertices > MAX_EXTRA_VERTICES {
            return Err(StrataError::TooManyVertices {
                requested: self.max_extra_vertices,
                limit: MAX_EXTRA_VERTICES,
            });
        }
        Ok(())
    }

    fn kinds(&self) -> Vec<GraphKind> {
        let mut kinds = Vec::new();
        if self.include_trees {
            kinds.push(GraphKind::Tree);
        }
        if self.include_circuits {
            kinds.push(GraphKind::Circuit);
        }
        kinds
    }

    fn keeps_weights(&self, kind: GraphKind, weights: &[u32], edges: &[Edge]) -> bool {
        let e: u32 = super::core_vertices(kind, weights.len(), edges)
            .iter()
            .map(|&v| weights[v])
            .sum();
        (self.include_empty || e != 1) && self.core_weight.is_none_or(|want| want == e)
    }
}

/// Ordered tuples of `parts` non-negative integers summing to `total`.
fn compositions<T>(total: usize, parts: usize) -> Vec<Vec<T>>
where
    T: TryFrom<usize> + Copy,
    <T as TryFrom<usize>>::Error: std::fmt::Debug,
{
    fn rec<T: TryFrom<usize> + Copy>(
        left: usize,
        parts: usize,
        cur: &mut Vec<T>,
        out: &mut Vec<Vec<T>>,
    ) where
        <T as TryFrom<usize>>::Error: std::fmt::Debug,
    {
        if parts == 1 {
            cur.push(T::try_from(left).unwrap());
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(T::try_from(x).unwrap());
            rec(left - x, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

/// Decodes every Prüfer sequence into the labelled trees on `n` vertices.
fn labelled_trees(n: usize) -> Vec<Vec<Edge>> {
    match n {
        0 => return Vec::new(),
        1 => return vec![Vec::new()],
        2 => return vec![vec![(0, 1)]],
        _ => {}
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let seq: Vec<usize> = (0..len)
                .map(|_| {
                    let x = code % n;
                    code /= n;
                    x
                })
                .collect();
            let mut degree = vec![1; n];
            for &x in &seq {
                degree[x] += 1;
            }
            let mut edges = Vec::with_capacity(n - 1);
            for &x in &seq {
                let leaf = (0..n).find(|&v| degree[v] == 1).expect("leaf exists");
                edges.push((leaf, x));
                degree[leaf] -= 1;
                degree[x] -= 1;
            }
            let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
            edges.push((rest[0], rest[1]));
            edges
        })
        .collect()
}

/// Unlabelled skeletons on `n` vertices, one representative per class.
pub(crate) fn skeletons(kind: GraphKind, n: usize) -> Vec<Vec<Edge>> {
    let trees = labelled_trees(n);
    let candidates: Vec<Vec<Edge>> = match kind {
        GraphKind::Tree => trees,
        GraphKind::Circuit if n < 2 => Vec::new(),
        GraphKind::Circuit => trees
            .into_iter()
            .flat_map(|t| {
                (0..n)
                    .flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
                    .map(move |extra| {
                        let mut e = t.clone();
                        e.push(extra);
                        e
                    })
            })
            .collect(),
    };
    let zero_w = vec![0u32; n];
    let zero_l = vec![0usize; n];
    let mut seen = BTreeMap::new();
    for edges in candidates {
        let key = canon::canonical_string(kind, &zero_w, &edges, LegView::Counts(&zero_l));
        seen.entry(key).or_insert(edges);
    }
    seen.into_values().collect()
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, i| acc * i)
}

/// Marked classes of a shape: orbits of its automorphism group on leg
/// assignments with the given per-vertex counts. An automorphism fixes an
/// assignment exactly when it fixes every vertex that carries a leg.
pub(crate) fn orbit_count(
    kind: GraphKind,
    weights: &[u32],
    edges: &[Edge],
    leg_counts: &[usize],
) -> Count {
    let total: usize = leg_counts.iter().sum();
    let assignments = leg_counts
        .iter()
        .fold(factorial(total), |acc, &c| acc / factorial(c));
    let group = canon::automorphisms(kind, weights, edges, leg_counts);
    let fixing = group
        .iter()
        .filter(|p| (0..p.len()).all(|v| leg_counts[v] == 0 || p[v] == v))
        .count();
    let sum = assignments * fixing;
    let order = BigUint::from(group.len());
    debug_assert!((&sum % &order).is_zero());
    Count::new(sum / order)
}

fn legs_total(degree: u32) -> usize {
    (3 * degree - 1) as usize
}

type ShapeParts = (GraphKind, Vec<u32>, Vec<Edge>, Vec<usize>);

/// Collapsed enumeration, sorted by canonical form.
pub fn enumerate_shapes(config: &EnumerationConfig) -> Result<Vec<ShapeClass>, StrataError> {
    config.check()?;
    let legs = legs_total(config.degree);
    let mut found: BTreeMap<String, ShapeParts> = BTreeMap::new();
    for kind in config.kinds() {
        for k in config.min_extra_vertices..=config.max_extra_vertices {
            let n = k + 1;
            for edges in skeletons(kind, n) {
                for weights in compositions::<u32>(config.degree as usize, n) {
                    if !config.keeps_weights(kind, &weights, &edges) {
                        continue;
                    }
                    for counts in compositions::<usize>(legs, n) {
                        let probe = ShapeProbe {
                            kind,
                            weights: &weights,
                            edges: &edges,
                            counts: &counts,
                        };
                        if !probe.is_stable() {
                            continue;
                        }
                        let key = canon::canonical_string(
                            kind,
                            &weights,
                            &edges,
                            LegView::Counts(&counts),
                        );
                        found.entry(key).or_insert_with(|| {
                            (kind, weights.clone(), edges.clone(), counts.clone())
                        });
                    }
                }
            }
        }
    }
    if found.len() as u64 > config.ceiling {
        return Err(StrataError::CeilingExceeded {
            projected: Count::from(found.len() as u64),
            ceiling: config.ceiling,
        });
    }
    Ok(found
        .into_values()
        .map(|(kind, w, e, c)| ShapeClass::from_parts(kind, w, e, c))
        .collect())
}

/// Borrowed shape used to test stability before allocating.
struct ShapeProbe<'a> {
    kind: GraphKind,
    weights: &'a [u32],
    edges: &'a [Edge],
    counts: &'a [usize],
}

impl Stratum for ShapeProbe<'_> {
    fn kind(&self) -> GraphKind {
        self.kind
    }
    fn weights(&self) -> &[u32] {
        self.weights
    }
    fn edges(&self) -> &[Edge] {
        self.edges
    }
    fn leg_count(&self, v: usize) -> usize {
        self.counts[v]
    }
}

/// A fully marked isomorphism class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedClass {
    pub graph: MarkedGraph,
    pub canonical: String,
}

/// Distributes labelled legs over `counts`, calling `emit` per assignment.
fn assign_legs(
    counts: &mut [usize],
    next: u32,
    last: u32,
    cur: &mut [Vec<u32>],
    emit: &mut dyn FnMut(&[Vec<u32>]),
) {
    if next > last {
        emit(cur);
        return;
    }
    for v in 0..counts.len() {
        if counts[v] == 0 {
            continue;
        }
        counts[v] -= 1;
        cur[v].push(next);
        assign_legs(counts, next + 1, last, cur, emit);
        cur[v].pop();
        counts[v] += 1;
    }
}

/// Full enumeration: every marked isomorphism class, sorted by canonical
/// form. The projected total is computed from the collapsed multiplicities
/// first and checked against the ceiling.
pub fn enumerate_marked(config: &EnumerationConfig) -> Result<Vec<MarkedClass>, StrataError> {
    config.check()?;
    let shapes = enumerate_shapes(config)?;
    let projected = shapes
        .iter()
        .fold(BigUint::zero(), |acc, s| acc + s.multiplicity().value());
    if projected.to_u64().is_none_or(|p| p > config.ceiling) {
        return Err(StrataError::CeilingExceeded {
            projected: Count::new(projected),
            ceiling: config.ceiling,
        });
    }

    let last = legs_total(config.degree) as u32;
    let mut found: BTreeMap<String, MarkedGraph> = BTreeMap::new();
    for kind in config.kinds() {
        for k in config.min_extra_vertices..=config.max_extra_vertices {
            let n = k + 1;
            for edges in skeletons(kind, n) {
                for weights in compositions::<u32>(config.degree as usize, n) {
                    if !config.keeps_weights(kind, &weights, &edges) {
                        continue;
                    }
                    for mut counts in compositions::<usize>(last as usize, n) {
                        let probe = ShapeProbe {
                            kind,
                            weights: &weights,
                            edges: &edges,
                            counts: &counts,
                        };
                        if !probe.is_stable() {
                            continue;
                        }
                        let mut cur = vec![Vec::new(); n];
                        assign_legs(&mut counts, 1, last, &mut cur, &mut |legs| {
                            let key = canon::canonical_string(
                                kind,
                                &weights,
                                &edges,
                                LegView::Labels(legs),
                            );
                            found.entry(key).or_insert_with(|| {
                                MarkedGraph::from_parts(
                                    kind,
                                    weights.clone(),
                                    edges.clone(),
                                    legs.to_vec(),
                                )
                            });
                        });
                    }
                }
            }
        }
    }
    Ok(found
        .into_iter()
        .map(|(canonical, graph)| MarkedClass { graph, canonical })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Listing {
    Collapsed(Vec<ShapeClass>),
    Full(Vec<MarkedClass>),
}

impl Listing {
    /// Number of marked isomorphism classes represented.
    pub fn class_count(&self) -> Count {
        match self {
            Listing::Collapsed(shapes) => Count::new(
                shapes
                    .iter()
                    .fold(BigUint::zero(), |acc, s| acc + s.multiplicity().value()),
            ),
            Listing::Full(classes) => Count::from(classes.len() as u64),
        }
    }
}

/// Collapsed or full enumeration according to `config.collapsed`.
pub fn enumerate(config: &EnumerationConfig) -> Result<Listing, StrataError> {
    if config.collapsed {
        enumerate_shapes(config).map(Listing::Collapsed)
    } else {
        enumerate_marked(config).map(Listing::Full)
    }
}
