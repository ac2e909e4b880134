//! Canonical serialization and brute-force automorphisms.
//!
//! Grammar (whitespace-free):
//!
//! ```text
//! tree    := "T" term
//! circuit := "C[" term term+ "]"
//! term    := "(" weight "|" legs "|" term* ")"
//! legs    := "#" count                 -- shapes: number of legs
//!          | [label ("," label)*]      -- marked graphs: sorted labels
//! ```
//!
//! A tree is serialized rooted at the distinguished vertex. Each vertex term
//! lists its children sorted as strings. A circuit graph lists the terms of
//! its circuit vertices in cyclic order (off-circuit subtrees hang below each
//! one), choosing the lexicographically least sequence of terms over all
//! rotations and reflections of the circuit. Terms are parenthesis-balanced,
//! so the concatenation parses uniquely.

use itertools::Itertools;

use super::{core_vertices, Edge, GraphKind};

#[derive(Clone, Copy, Debug)]
pub(crate) enum LegView<'a> {
    Labels(&'a [Vec<u32>]),
    Counts(&'a [usize]),
}

impl LegView<'_> {
    fn write(&self, v: usize, out: &mut String) {
        match self {
            LegView::Counts(c) => {
                out.push('#');
                out.push_str(&c[v].to_string());
            }
            LegView::Labels(l) => {
                let mut labels = l[v].clone();
                labels.sort_unstable();
                out.push_str(&labels.iter().join(","));
            }
        }
    }
}

fn adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

fn term(
    v: usize,
    parent: Option<usize>,
    adj: &[Vec<usize>],
    skip: &[bool],
    weights: &[u32],
    legs: LegView<'_>,
) -> String {
    let mut children: Vec<String> = adj[v]
        .iter()
        .filter(|&&u| Some(u) != parent && !skip[u])
        .map(|&u| term(u, Some(v), adj, skip, weights, legs))
        .collect();
    children.sort_unstable();
    let mut out = format!("({}|", weights[v]);
    legs.write(v, &mut out);
    out.push('|');
    for c in children {
        out.push_str(&c);
    }
    out.push(')');
    out
}

/// Circuit vertices in cyclic order starting from the smallest index.
fn cycle_order(core: &[usize], adj: &[Vec<usize>]) -> Vec<usize> {
    if core.len() == 2 {
        return core.to_vec();
    }
    let on_core = |u: usize| core.contains(&u);
    let mut order = vec![core[0]];
    let mut prev = core[0];
    let mut cur = *adj[core[0]].iter().find(|&&u| on_core(u)).expect("circuit");
    while cur != core[0] {
        order.push(cur);
        let next = *adj[cur]
            .iter()
            .find(|&&u| on_core(u) && u != prev)
            .expect("circuit continues");
        prev = cur;
        cur = next;
    }
    order
}

pub(crate) fn canonical_string(
    kind: GraphKind,
    weights: &[u32],
    edges: &[Edge],
    legs: LegView<'_>,
) -> String {
    let n = weights.len();
    let adj = adjacency(n, edges);
    match kind {
        GraphKind::Tree => {
            let skip = vec![false; n];
            format!("T{}", term(0, None, &adj, &skip, weights, legs))
        }
        GraphKind::Circuit => {
            let core = core_vertices(kind, n, edges);
            let mut skip = vec![false; n];
            for &c in &core {
                skip[c] = true;
            }
            let order = cycle_order(&core, &adj);
            let terms: Vec<String> = order
                .iter()
                .map(|&c| term(c, None, &adj, &skip, weights, legs))
                .collect();
            let l = terms.len();
            let best = (0..l)
                .flat_map(|start| {
                    let forward: Vec<&String> = (0..l).map(|i| &terms[(start + i) % l]).collect();
                    let backward: Vec<&String> =
                        (0..l).map(|i| &terms[(start + l - i) % l]).collect();
                    [forward, backward]
                })
                .min()
                .expect("nonempty circuit");
            format!("C[{}]", best.into_iter().join(""))
        }
    }
}

fn sorted_edges(edges: impl Iterator<Item = Edge>) -> Vec<Edge> {
    let mut out: Vec<Edge> = edges.map(|(a, b)| (a.min(b), a.max(b))).collect();
    out.sort_unstable();
    out
}

/// Vertex permutations `perm` (vertex `v` goes to `perm[v]`) preserving
/// edges with multiplicity, weights and leg counts. Trees keep the
/// distinguished vertex fixed.
pub fn automorphisms(
    kind: GraphKind,
    weights: &[u32],
    edges: &[Edge],
    leg_counts: &[usize],
) -> Vec<Vec<usize>> {
    let n = weights.len();
    let target = sorted_edges(edges.iter().copied());
    (0..n)
        .permutations(n)
        .filter(|p| kind == GraphKind::Circuit || p[0] == 0)
        .filter(|p| {
            (0..n).all(|v| weights[p[v]] == weights[v] && leg_counts[p[v]] == leg_counts[v])
        })
        .filter(|p| sorted_edges(edges.iter().map(|&(a, b)| (p[a], p[b]))) == target)
        .collect()
}

/// Whether an explicit isomorphism maps `a` onto `b`, found by trying every
/// vertex permutation.
pub fn is_isomorphic(a: &super::MarkedGraph, b: &super::MarkedGraph) -> bool {
    use super::Stratum;
    if a.kind() != b.kind() || a.vertex_count() != b.vertex_count() {
        return false;
    }
    let n = a.vertex_count();
    let target = sorted_edges(b.edges().iter().copied());
    (0..n).permutations(n).any(|p| {
        (a.kind() == GraphKind::Circuit || p[0] == 0)
            && (0..n).all(|v| a.weights()[v] == b.weights()[p[v]] && a.legs()[v] == b.legs()[p[v]])
            && sorted_edges(a.edges().iter().map(|&(x, y)| (p[x], p[y]))) == target
    })
}
