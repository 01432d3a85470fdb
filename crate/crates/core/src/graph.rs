//! Moment graphs on the coroot lattice: Bruhat graphs of `W^J`, induced
//! subgraphs, specialisation checks over a field, and morphisms.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coxeter::{matmul, Elem, IntMatrix, WeylGroup};
use crate::error::{Error, Result};
use crate::ring::linalg_small::{determinant, int_to_field, proportional};
use crate::ring::Field;

pub const GRAPH_SCHEMA_VERSION: u32 = 1;

/// Vertex cap for graphs read from untrusted input.
pub const MAX_LOADED_VERTICES: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub word: String,
    pub length: u32,
    /// Present for graphs built from a group.
    pub elem: Option<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub label: Vec<i64>,
}

/// A finite moment graph. Vertex ids are positions in `vertices`; the order
/// is kept reflexive and transitively closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentGraph {
    rank: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    leq: Vec<bool>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    edge_index: HashMap<(usize, usize), usize>,
}

impl MomentGraph {
    /// Validates and assembles a graph. `order` lists strict relations
    /// `a < b`; their transitive closure is taken.
    pub fn new(
        rank: usize,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        order: &[(usize, usize)],
    ) -> Result<Self> {
        let n = vertices.len();
        let bad = |m: String| Error::InvalidGraph(m);
        let mut rows: Vec<Vec<u64>> = vec![vec![0u64; n.div_ceil(64)]; n];
        let set = |rows: &mut Vec<Vec<u64>>, a: usize, b: usize| rows[a][b / 64] |= 1 << (b % 64);
        for (i, row) in rows.iter_mut().enumerate() {
            row[i / 64] |= 1 << (i % 64);
        }
        for &(a, b) in order {
            if a >= n || b >= n {
                return Err(bad(format!("order pair ({a},{b}) out of range")));
            }
            if a == b {
                return Err(bad(format!("order pair ({a},{a}) is not strict")));
            }
            set(&mut rows, a, b);
        }
        for e in &edges {
            if e.tail >= n || e.head >= n {
                return Err(bad(format!("edge ({},{}) out of range", e.tail, e.head)));
            }
            if e.tail == e.head {
                return Err(bad(format!("edge at {} is a loop", e.tail)));
            }
            if e.label.len() != rank {
                return Err(bad(format!(
                    "edge ({},{}) label has length {}",
                    e.tail,
                    e.head,
                    e.label.len()
                )));
            }
            if e.label.iter().all(|&v| v == 0) {
                return Err(bad(format!("edge ({},{}) has zero label", e.tail, e.head)));
            }
            set(&mut rows, e.tail, e.head);
        }
        // Warshall on bit rows
        for k in 0..n {
            let rk = rows[k].clone();
            for row in rows.iter_mut() {
                if row[k / 64] >> (k % 64) & 1 == 1 {
                    for (w, r) in row.iter_mut().zip(&rk) {
                        *w |= r;
                    }
                }
            }
        }
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[a * n + b] = rows[a][b / 64] >> (b % 64) & 1 == 1;
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if leq[a * n + b] && leq[b * n + a] {
                    return Err(bad(format!("order has a cycle through {a} and {b}")));
                }
            }
        }
        let mut edge_index = HashMap::new();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            let key = (e.tail.min(e.head), e.tail.max(e.head));
            if edge_index.insert(key, i).is_some() {
                return Err(bad(format!(
                    "multiple edges between {} and {}",
                    key.0, key.1
                )));
            }
            up[e.tail].push(i);
            down[e.head].push(i);
        }
        Ok(MomentGraph {
            rank,
            vertices,
            edges,
            leq,
            up,
            down,
            edge_index,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.num_vertices() + b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// Edges `x -> y` leaving `x` upwards.
    pub fn up_edges(&self, x: usize) -> &[usize] {
        &self.up[x]
    }

    pub fn down_edges(&self, x: usize) -> &[usize] {
        &self.down[x]
    }

    pub fn incident_edges(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.down[x].iter().chain(&self.up[x]).copied()
    }

    /// The edge joining `a` and `b` in either orientation.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn vertex_of_elem(&self, w: Elem) -> Option<usize> {
        self.vertices.iter().position(|v| v.elem == Some(w))
    }

    pub fn elem(&self, v: usize) -> Option<Elem> {
        self.vertices[v].elem
    }

    pub fn maximal_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&a| !(0..self.num_vertices()).any(|b| self.lt(a, b)))
            .collect()
    }

    pub fn unique_maximum(&self) -> Result<usize> {
        match self.maximal_vertices().as_slice() {
            [m] => Ok(*m),
            other => Err(Error::NonUniqueMaximum(other.len())),
        }
    }

    /// `{y : y > x}`.
    pub fn strictly_above(&self, x: usize) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&y| self.lt(x, y))
            .collect()
    }

    /// Strict relations `a < b`, sorted.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.num_vertices();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.lt(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Induced subgraph on `vertex_set`, renumbered in the given order.
    pub fn restrict(&self, vertex_set: &[usize]) -> Result<MomentGraph> {
        let mut new_id = HashMap::new();
        for (i, &v) in vertex_set.iter().enumerate() {
            if v >= self.num_vertices() {
                return Err(Error::InvalidGraph(format!("vertex {v} out of range")));
            }
            if new_id.insert(v, i).is_some() {
                return Err(Error::InvalidGraph(format!("vertex {v} listed twice")));
            }
        }
        let vertices = vertex_set
            .iter()
            .map(|&v| self.vertices[v].clone())
            .collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                Some(Edge {
                    tail: *new_id.get(&e.tail)?,
                    head: *new_id.get(&e.head)?,
                    label: e.label.clone(),
                })
            })
            .collect();
        let mut order = Vec::new();
        for (i, &a) in vertex_set.iter().enumerate() {
            for (j, &b) in vertex_set.iter().enumerate() {
                if self.lt(a, b) {
                    order.push((i, j));
                }
            }
        }
        MomentGraph::new(self.rank, vertices, edges, &order)
    }

    /// The induced subgraph on `{x : x <= top}`.
    pub fn lower_set(&self, top: usize) -> Result<MomentGraph> {
        let set: Vec<usize> = (0..self.num_vertices())
            .filter(|&x| self.leq(x, top))
            .collect();
        self.restrict(&set)
    }

    /// Every label is nonzero in `Y_k`.
    pub fn is_k_moment_graph<F: Field>(&self, field: &F) -> bool {
        self.vanishing_labels(field).is_empty()
    }

    pub fn vanishing_labels<F: Field>(&self, field: &F) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| {
                self.edges[e]
                    .label
                    .iter()
                    .all(|&v| field.is_zero(&field.from_i64(v)))
            })
            .collect()
    }

    /// Pairs of distinct edges at a common vertex whose labels are linearly
    /// dependent over `k`.
    pub fn gkm_report<F: Field>(&self, field: &F) -> GkmReport {
        let labels: Vec<Vec<F::Elem>> = self
            .edges
            .iter()
            .map(|e| e.label.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        let mut violations = Vec::new();
        for v in 0..self.num_vertices() {
            let inc: Vec<usize> = self.incident_edges(v).collect();
            for (a, &e1) in inc.iter().enumerate() {
                for &e2 in &inc[a + 1..] {
                    if proportional(&labels[e1], &labels[e2], field) {
                        violations.push(GkmViolation {
                            vertex: v,
                            edges: (e1.min(e2), e1.max(e2)),
                        });
                    }
                }
            }
        }
        GkmReport {
            vanishing_labels: self.vanishing_labels(field),
            violations,
        }
    }

    pub fn is_gkm_pair<F: Field>(&self, field: &F) -> bool {
        self.gkm_report(field).is_gkm()
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph moment_graph {\n  rankdir=BT;\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let name = if v.word.is_empty() {
                "e"
            } else {
                v.word.as_str()
            };
            let _ = writeln!(s, "  v{i} [label=\"{name}\"];");
        }
        for e in &self.edges {
            let label: Vec<String> = e.label.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(
                s,
                "  v{} -> v{} [label=\"({})\"];",
                e.tail,
                e.head,
                label.join(",")
            );
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json_value(&self) -> GraphJson {
        GraphJson {
            schema_version: GRAPH_SCHEMA_VERSION,
            rank: self.rank,
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(id, v)| VertexJson {
                    id,
                    word: v.word.clone(),
                    length: v.length,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    tail: e.tail,
                    head: e.head,
                    label: e.label.clone(),
                })
                .collect(),
            order: self
                .strict_pairs()
                .into_iter()
                .map(|(a, b)| [a, b])
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("graph serialises") + "\n"
    }

    pub fn from_json_value(g: &GraphJson) -> Result<Self> {
        if g.schema_version != GRAPH_SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported graph schema version {}",
                g.schema_version
            )));
        }
        if g.vertices.len() > MAX_LOADED_VERTICES {
            return Err(Error::InvalidGraph(format!(
                "more than {MAX_LOADED_VERTICES} vertices"
            )));
        }
        if g.rank == 0 || g.rank > 9 {
            return Err(Error::InvalidGraph(format!(
                "lattice rank {} out of range",
                g.rank
            )));
        }
        let mut vertices = Vec::with_capacity(g.vertices.len());
        for (i, v) in g.vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::InvalidGraph(format!(
                    "vertex at position {i} has id {}",
                    v.id
                )));
            }
            vertices.push(Vertex {
                word: v.word.clone(),
                length: v.length,
                elem: None,
            });
        }
        let edges = g
            .edges
            .iter()
            .map(|e| Edge {
                tail: e.tail,
                head: e.head,
                label: e.label.clone(),
            })
            .collect::<Vec<_>>();
        let order: Vec<(usize, usize)> = g.order.iter().map(|p| (p[0], p[1])).collect();
        let graph = MomentGraph::new(g.rank, vertices, edges, &order)?;
        for e in graph.edges() {
            if !graph.lt(e.tail, e.head) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({},{}) runs against the order",
                    e.tail, e.head
                )));
            }
        }
        Ok(graph)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&g)
    }

    /// Re-attaches group elements to vertices by parsing their words.
    pub fn attach_group(&mut self, group: &WeylGroup) -> Result<()> {
        if group.rank() != self.rank {
            return Err(Error::RankMismatch(group.rank(), self.rank));
        }
        for v in &mut self.vertices {
            let w = group.parse_word(&v.word)?;
            if group.length(w) != v.length {
                return Err(Error::InvalidGraph(format!(
                    "word {:?} does not have length {}",
                    v.word, v.length
                )));
            }
            v.elem = Some(w);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexJson {
    pub id: usize,
    pub word: String,
    pub length: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub tail: usize,
    pub head: usize,
    pub label: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub schema_version: u32,
    pub rank: usize,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub order: Vec<[usize; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GkmViolation {
    pub vertex: usize,
    pub edges: (usize, usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GkmReport {
    pub vanishing_labels: Vec<usize>,
    pub violations: Vec<GkmViolation>,
}

impl GkmReport {
    pub fn is_gkm(&self) -> bool {
        self.vanishing_labels.is_empty() && self.violations.is_empty()
    }
}

/// The Bruhat moment graph on `W^J`: for `x < y` there is an edge `x -> y`
/// labelled by the coroot of `t` whenever `tx` lies in `y W_J`.
pub fn bruhat_graph(group: &WeylGroup, j: &[usize]) -> Result<MomentGraph> {
    let quotient = group.min_coset_reps(j)?;
    let reps = &quotient.min_reps;
    let pos: HashMap<Elem, usize> = reps.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let vertices = reps
        .iter()
        .map(|&x| Vertex {
            word: group.word(x),
            length: group.length(x),
            elem: Some(x),
        })
        .collect();
    let mut found: Vec<((usize, usize), Vec<i64>)> = Vec::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (xi, &x) in reps.iter().enumerate() {
        for r in group.reflections() {
            let y = group.project_to_min_rep(group.mul(r.element, x), &quotient.j);
            let yi = pos[&y];
            if yi == xi || !group.bruhat_lt(x, y) {
                continue;
            }
            match seen.get(&(xi, yi)) {
                None => {
                    seen.insert((xi, yi), found.len());
                    found.push(((xi, yi), r.coroot.clone()));
                }
                Some(&k) => {
                    let q = crate::ring::Rationals;
                    let a: Vec<_> = found[k].1.iter().map(|&v| q.from_i64(v)).collect();
                    let b: Vec<_> = r.coroot.iter().map(|&v| q.from_i64(v)).collect();
                    if !proportional(&a, &b, &q) {
                        return Err(Error::AmbiguousEdgeLabel(
                            group.word_or_e(x),
                            group.word_or_e(y),
                        ));
                    }
                }
            }
        }
    }
    found.sort_by_key(|(k, _)| *k);
    let edges = found
        .into_iter()
        .map(|((t, h), label)| Edge {
            tail: t,
            head: h,
            label,
        })
        .collect();
    let mut order = Vec::new();
    for (a, &x) in reps.iter().enumerate() {
        for (b, &y) in reps.iter().enumerate() {
            if group.bruhat_lt(x, y) {
                order.push((a, b));
            }
        }
    }
    MomentGraph::new(group.rank(), vertices, edges, &order)
}

/// `G^J` restricted to `{x <= w}` for `w` in `W^J`.
pub fn bruhat_lower_graph(group: &WeylGroup, j: &[usize], w: Elem) -> Result<MomentGraph> {
    let full = bruhat_graph(group, j)?;
    let top = full.vertex_of_elem(w).ok_or_else(|| {
        Error::Precondition(format!(
            "{} is not a minimal coset representative",
            group.word_or_e(w)
        ))
    })?;
    full.lower_set(top)
}

/// A vertex map together with a lattice automorphism per source vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MGMorphism {
    pub vertex_map: Vec<usize>,
    pub lattice_autos: Vec<IntMatrix>,
}

impl MGMorphism {
    pub fn identity(g: &MomentGraph) -> Self {
        let n = g.rank();
        let id = crate::coxeter::identity(n);
        MGMorphism {
            vertex_map: (0..g.num_vertices()).collect(),
            lattice_autos: vec![id; g.num_vertices()],
        }
    }

    /// `self` after `first`: vertex maps compose, and so do the lattice maps.
    pub fn compose_after(&self, first: &MGMorphism) -> MGMorphism {
        MGMorphism {
            vertex_map: first
                .vertex_map
                .iter()
                .map(|&v| self.vertex_map[v])
                .collect(),
            lattice_autos: first
                .vertex_map
                .iter()
                .zip(&first.lattice_autos)
                .map(|(&v, a)| matmul(&self.lattice_autos[v], a))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MorphismReport {
    pub violations: Vec<String>,
    /// Image edge of each source edge; `None` when the edge collapses.
    pub edge_map: Vec<Option<usize>>,
}

impl MorphismReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the homomorphism axioms over `k`: order preservation, edges map
/// to edges or collapse, labels are carried to unit multiples, and adjacent
/// lattice maps agree modulo the image label.
pub fn validate_morphism<F: Field>(
    f: &MGMorphism,
    g: &MomentGraph,
    g2: &MomentGraph,
    field: &F,
) -> MorphismReport {
    let mut report = MorphismReport::default();
    let v = &mut report.violations;
    let n = g.num_vertices();
    if f.vertex_map.len() != n || f.lattice_autos.len() != n {
        v.push(format!(
            "morphism covers {} vertices, graph has {n}",
            f.vertex_map.len()
        ));
        return report;
    }
    if g.rank() != g2.rank() {
        v.push(format!(
            "lattice ranks differ: {} vs {}",
            g.rank(),
            g2.rank()
        ));
        return report;
    }
    if let Some(x) = f.vertex_map.iter().position(|&t| t >= g2.num_vertices()) {
        v.push(format!("vertex {x} maps outside the target"));
        return report;
    }
    let r = g.rank();
    let autos: Vec<Vec<Vec<F::Elem>>> = f
        .lattice_autos
        .iter()
        .map(|m| int_to_field(m, field))
        .collect();
    for (x, (m, mk)) in f.lattice_autos.iter().zip(&autos).enumerate() {
        if m.len() != r || m.iter().any(|row| row.len() != r) {
            v.push(format!("lattice map at {x} is not {r}x{r}"));
            return report;
        }
        if determinant(mk, field).map_or(true, |d| field.is_zero(&d)) {
            v.push(format!("lattice map at {x} is not invertible over k"));
        }
    }
    for a in 0..n {
        for b in 0..n {
            if g.leq(a, b) && !g2.leq(f.vertex_map[a], f.vertex_map[b]) {
                v.push(format!("order not preserved: {a} <= {b}"));
            }
        }
    }
    let apply = |m: &Vec<Vec<F::Elem>>, l: &[i64]| -> Vec<F::Elem> {
        m.iter()
            .map(|row| {
                let mut acc = field.zero();
                for (c, &x) in row.iter().zip(l) {
                    field.add_mul_assign(&mut acc, c, &field.from_i64(x));
                }
                acc
            })
            .collect()
    };
    for (ei, e) in g.edges().iter().enumerate() {
        let (fx, fy) = (f.vertex_map[e.tail], f.vertex_map[e.head]);
        if fx == fy {
            report.edge_map.push(None);
            continue;
        }
        let Some(e2) = g2.edge_between(fx, fy) else {
            v.push(format!("edge {ei} maps to a non-edge ({fx},{fy})"));
            report.edge_map.push(None);
            continue;
        };
        report.edge_map.push(Some(e2));
        let l2: Vec<F::Elem> = g2
            .edge(e2)
            .label
            .iter()
            .map(|&c| field.from_i64(c))
            .collect();
        if l2.iter().all(|c| field.is_zero(c)) {
            v.push(format!("image label of edge {ei} vanishes over k"));
            continue;
        }
        for &x in &[e.tail, e.head] {
            let img = apply(&autos[x], &e.label);
            if img.iter().all(|c| field.is_zero(c)) || !proportional(&img, &l2, field) {
                v.push(format!(
                    "lattice map at {x} does not carry the label of edge {ei} to a unit multiple"
                ));
            }
        }
        let diff_ok = (0..r).all(|c| {
            let col: Vec<F::Elem> = (0..r)
                .map(|row| field.sub(&autos[e.tail][row][c], &autos[e.head][row][c]))
                .collect();
            proportional(&col, &l2, field)
        });
        if !diff_ok {
            v.push(format!(
                "lattice maps at the ends of edge {ei} differ modulo the image label"
            ));
        }
    }
    report
}

/// [`validate_morphism`] plus bijectivity on posets and a unique preimage
/// for every target edge.
pub fn validate_isomorphism<F: Field>(
    f: &MGMorphism,
    g: &MomentGraph,
    g2: &MomentGraph,
    field: &F,
) -> MorphismReport {
    let mut report = validate_morphism(f, g, g2, field);
    if f.vertex_map.len() != g.num_vertices() || report.edge_map.len() != g.edges().len() {
        return report;
    }
    let n = g.num_vertices();
    let mut hit = vec![false; g2.num_vertices()];
    for &t in &f.vertex_map {
        if t < hit.len() {
            hit[t] = true;
        }
    }
    if n != g2.num_vertices() || hit.iter().any(|h| !h) {
        report
            .violations
            .push("vertex map is not a bijection".into());
        return report;
    }
    for a in 0..n {
        for b in 0..n {
            if g2.leq(f.vertex_map[a], f.vertex_map[b]) && !g.leq(a, b) {
                report.violations.push(format!(
                    "inverse map does not preserve the order at ({a},{b})"
                ));
            }
        }
    }
    let mut preimages = vec![0usize; g2.edges().len()];
    for &e2 in report.edge_map.iter().flatten() {
        preimages[e2] += 1;
    }
    for (e2, &c) in preimages.iter().enumerate() {
        if c != 1 {
            report
                .violations
                .push(format!("target edge {e2} has {c} preimages"));
        }
    }
    report
}

/// `x -> x^{-1}` from `G_w` onto `G_{w^{-1}}` (graphs with `J` empty), with
/// `f_{l,x}` the action of `x^{-1}`.
pub fn inverse_morphism(
    group: &WeylGroup,
    source: &MomentGraph,
    target: &MomentGraph,
) -> Result<MGMorphism> {
    let mut vertex_map = Vec::with_capacity(source.num_vertices());
    let mut lattice_autos = Vec::with_capacity(source.num_vertices());
    for v in 0..source.num_vertices() {
        let x = source
            .elem(v)
            .ok_or_else(|| Error::Precondition("vertex carries no group element".into()))?;
        let xi = group.inv(x);
        let t = target.vertex_of_elem(xi).ok_or_else(|| {
            Error::Precondition(format!(
                "{} is missing from the target",
                group.word_or_e(xi)
            ))
        })?;
        vertex_map.push(t);
        lattice_autos.push(group.matrix(xi).clone());
    }
    Ok(MGMorphism {
        vertex_map,
        lattice_autos,
    })
}

pub fn inverse_automorphism(group: &WeylGroup, graph: &MomentGraph) -> Result<MGMorphism> {
    inverse_morphism(group, graph, graph)
}

/// The interval graphs `G|[y,w]`, `G|[ys,ws]` and the isomorphism `x -> xs`
/// between them with identity lattice maps. Needs `y <= w`, `ws < w` and
/// `y` not below `ws`.
pub fn right_mult_isomorphism(
    group: &WeylGroup,
    full: &MomentGraph,
    y: Elem,
    w: Elem,
    s: usize,
) -> Result<(MomentGraph, MomentGraph, MGMorphism)> {
    let ws = group.rmul_simple(w, s);
    if !group.bruhat_leq(y, w) || !group.is_right_descent(w, s) || group.bruhat_leq(y, ws) {
        return Err(Error::Precondition(
            "right multiplication needs y <= w, ws < w and y not below ws".into(),
        ));
    }
    let ys = group.rmul_simple(y, s);
    let locate = |xs: &[Elem]| -> Result<Vec<usize>> {
        xs.iter()
            .map(|&x| {
                full.vertex_of_elem(x)
                    .ok_or_else(|| Error::Precondition("element missing from graph".into()))
            })
            .collect()
    };
    let src_elems = group.interval(y, w)?;
    let dst_elems = group.interval(ys, ws)?;
    let source = full.restrict(&locate(&src_elems)?)?;
    let target = full.restrict(&locate(&dst_elems)?)?;
    let mut vertex_map = Vec::with_capacity(src_elems.len());
    for &x in &src_elems {
        let xs = group.rmul_simple(x, s);
        let t = target.vertex_of_elem(xs).ok_or_else(|| {
            Error::Precondition(format!("{} leaves [ys, ws]", group.word_or_e(xs)))
        })?;
        vertex_map.push(t);
    }
    let id = crate::coxeter::identity(group.rank());
    let f = MGMorphism {
        vertex_map,
        lattice_autos: vec![id; src_elems.len()],
    };
    Ok((source, target, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{PrimeField, Rationals};

    fn a2() -> WeylGroup {
        WeylGroup::parse_type("A2").unwrap()
    }

    #[test]
    fn a2_full_graph_edges() {
        let g = a2();
        let mg = bruhat_graph(&g, &[]).unwrap();
        assert_eq!(mg.num_vertices(), 6);
        let mut got: Vec<(String, String, Vec<i64>)> = mg
            .edges()
            .iter()
            .map(|e| {
                (
                    g.word_or_e(mg.elem(e.tail).unwrap()),
                    g.word_or_e(mg.elem(e.head).unwrap()),
                    e.label.clone(),
                )
            })
            .collect();
        got.sort();
        let mut want: Vec<(String, String, Vec<i64>)> = [
            ("e", "1", [1, 0]),
            ("e", "2", [0, 1]),
            ("e", "121", [1, 1]),
            ("1", "21", [0, 1]),
            ("1", "12", [1, 1]),
            ("2", "12", [1, 0]),
            ("2", "21", [1, 1]),
            ("12", "121", [0, 1]),
            ("21", "121", [1, 0]),
        ]
        .iter()
        .map(|(a, b, l)| (a.to_string(), b.to_string(), l.to_vec()))
        .collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn parabolic_a2_is_a_chain() {
        let g = a2();
        let mg = bruhat_graph(&g, &[0]).unwrap();
        let words: Vec<&str> = mg.vertices().iter().map(|v| v.word.as_str()).collect();
        assert_eq!(words, vec!["", "2", "12"]);
        assert_eq!(mg.edges().len(), 3);
    }

    #[test]
    fn restrict_examples() {
        let g = a2();
        let mg = bruhat_graph(&g, &[]).unwrap();
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(mg.restrict(&all).unwrap(), mg);
        let top = mg.vertex_of_elem(g.parse_word("12").unwrap()).unwrap();
        let low = mg.lower_set(top).unwrap();
        assert_eq!((low.num_vertices(), low.edges().len()), (4, 4));
        let single = mg.restrict(&[top]).unwrap();
        assert_eq!((single.num_vertices(), single.edges().len()), (1, 0));
    }

    #[test]
    fn gkm_audits() {
        let f3 = PrimeField::new(3).unwrap();
        let a3 = WeylGroup::parse_type("A3").unwrap();
        assert!(bruhat_graph(&a3, &[]).unwrap().is_gkm_pair(&f3));
        let g2 = WeylGroup::parse_type("G2").unwrap();
        let report = bruhat_graph(&g2, &[]).unwrap().gkm_report(&f3);
        assert!(!report.is_gkm());
        assert!(report.vanishing_labels.is_empty());
        assert!(bruhat_graph(&g2, &[]).unwrap().is_gkm_pair(&Rationals));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let g = a2();
        let mg = bruhat_graph(&g, &[]).unwrap();
        let text = mg.to_json();
        let back = MomentGraph::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert!(MomentGraph::from_json("{}").is_err());
        assert!(MomentGraph::from_json("not json").is_err());
    }

    #[test]
    fn loader_rejects_bad_graphs() {
        let cyclic = r#"{"schema_version":1,"rank":1,"vertices":[{"id":0,"word":"","length":0},{"id":1,"word":"1","length":1}],"edges":[],"order":[[0,1],[1,0]]}"#;
        assert!(MomentGraph::from_json(cyclic).is_err());
        let zero = r#"{"schema_version":1,"rank":1,"vertices":[{"id":0,"word":"","length":0},{"id":1,"word":"1","length":1}],"edges":[{"tail":0,"head":1,"label":[0]}],"order":[[0,1]]}"#;
        assert!(MomentGraph::from_json(zero).is_err());
        let against = r#"{"schema_version":1,"rank":1,"vertices":[{"id":0,"word":"","length":0},{"id":1,"word":"1","length":1}],"edges":[{"tail":1,"head":0,"label":[1]}],"order":[[0,1]]}"#;
        assert!(MomentGraph::from_json(against).is_err());
    }

    #[test]
    fn dot_output() {
        let g = a2();
        let mg = bruhat_graph(&g, &[]).unwrap();
        let dot = mg.to_dot();
        assert_eq!(dot.matches("[label=\"(").count(), 9);
        assert_eq!(
            dot.lines()
                .filter(|l| l.contains("v") && l.contains("[label=\"") && !l.contains("->"))
                .count(),
            6
        );
        let single = mg.restrict(&[0]).unwrap().to_dot();
        assert_eq!(single.matches("->").count(), 0);
    }

    #[test]
    fn identity_and_inverse_morphisms() {
        let g = a2();
        let mg = bruhat_graph(&g, &[]).unwrap();
        assert!(validate_isomorphism(&MGMorphism::identity(&mg), &mg, &mg, &Rationals).is_valid());
        let f = inverse_automorphism(&g, &mg).unwrap();
        assert!(validate_isomorphism(&f, &mg, &mg, &Rationals).is_valid());
        let s1s2 = mg.vertex_of_elem(g.parse_word("12").unwrap()).unwrap();
        assert_eq!(mg.vertex(f.vertex_map[s1s2]).word, "21");
        assert_eq!(f.vertex_map[0], 0);
    }

    #[test]
    fn collapsing_morphism() {
        // one edge crushed onto a single vertex
        let v = |w: &str, l| Vertex {
            word: w.into(),
            length: l,
            elem: None,
        };
        let src = MomentGraph::new(
            2,
            vec![v("", 0), v("1", 1)],
            vec![Edge {
                tail: 0,
                head: 1,
                label: vec![1, 0],
            }],
            &[(0, 1)],
        )
        .unwrap();
        let dst = MomentGraph::new(2, vec![v("", 0)], vec![], &[]).unwrap();
        let id = crate::coxeter::identity(2);
        let f = MGMorphism {
            vertex_map: vec![0, 0],
            lattice_autos: vec![id.clone(), id],
        };
        let r = validate_morphism(&f, &src, &dst, &Rationals);
        assert!(r.is_valid());
        assert_eq!(r.edge_map, vec![None]);
        assert!(!validate_isomorphism(&f, &src, &dst, &Rationals).is_valid());
    }

    #[test]
    fn bad_lattice_map_is_reported() {
        let g = a2();
        let mg = bruhat_graph(&g, &[]).unwrap();
        let mut f = MGMorphism::identity(&mg);
        f.lattice_autos[1] = vec![vec![3, 0], vec![0, 1]];
        assert!(validate_morphism(&f, &mg, &mg, &Rationals).violations.len() > 0);
        assert!(!validate_morphism(&f, &mg, &mg, &PrimeField::new(3).unwrap()).is_valid());
    }

    #[test]
    fn right_mult_preconditions() {
        let g = a2();
        let mg = bruhat_graph(&g, &[]).unwrap();
        let w0 = g.longest();
        // singleton interval [w0, w0] -> [w0 s, w0 s]
        let (src, dst, f) = right_mult_isomorphism(&g, &mg, w0, w0, 0).unwrap();
        assert_eq!((src.num_vertices(), dst.num_vertices()), (1, 1));
        assert!(validate_isomorphism(&f, &src, &dst, &Rationals).is_valid());
        assert!(
            right_mult_isomorphism(&g, &mg, g.simple(0), g.parse_word("12").unwrap(), 1).is_err()
        );
    }
}
