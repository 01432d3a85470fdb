//! Sheaves on moment graphs with graded free stalks.
//!
//! A stalk is `⊕ S_k{-d_i}`, recorded by its generator degrees. The module
//! on an edge `E: x -> y` is the head stalk modulo `l(E)`, the head map is
//! the quotient map, and the tail map is a matrix of polynomials reduced
//! modulo `l(E)`. Every space of sections is computed one degree at a time
//! as the kernel of a finite linear system over `k`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coxeter::WeylGroup;
use crate::error::{Error, Result};
use crate::graph::{validate_morphism, GraphJson, MGMorphism, MomentGraph};
use crate::linalg::{collect_sparse, kernel_basis, kernel_projection, Echelon, SparseVec};
use crate::ring::linalg_small::{int_to_field, inverse};
use crate::ring::{
    index_basis, monomial_basis, CoefficientField, Field, LinearReducer, Monomial, PolyTermJson,
    Polynomial,
};

pub const SHEAF_SCHEMA_VERSION: u32 = 1;

/// Limits applied to sheaves read from untrusted input.
pub const MAX_LOADED_GENERATORS: usize = 256;
pub const MAX_LOADED_DEGREE: u32 = 64;

/// Tail map `ρ_{x,E}`: `entries[i][j]` sends tail generator `j` to a
/// multiple of head generator `i`, of degree `d_j(tail) - d_i(head)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionMatrix<F: Field> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Polynomial<F>>>,
}

impl<F: Field> RestrictionMatrix<F> {
    pub fn zero(rows: usize, cols: usize, nvars: usize) -> Self {
        RestrictionMatrix {
            rows,
            cols,
            entries: vec![vec![Polynomial::zero(nvars); cols]; rows],
        }
    }

    pub fn identity(n: usize, nvars: usize, field: &F) -> Self {
        let mut m = Self::zero(n, n, nvars);
        for i in 0..n {
            m.entries[i][i] = Polynomial::one(field, nvars);
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct SheafData<F: Field> {
    graph: Arc<MomentGraph>,
    field: F,
    stalks: Vec<Vec<u32>>,
    restrictions: Vec<RestrictionMatrix<F>>,
    reducers: Vec<LinearReducer<F>>,
}

impl<F: Field> PartialEq for SheafData<F> {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph
            && self.stalks == other.stalks
            && self.restrictions == other.restrictions
    }
}

impl<F: Field> SheafData<F> {
    /// Validates dimensions, parity and homogeneity, and reduces every tail
    /// entry modulo its edge label.
    pub fn new(
        graph: Arc<MomentGraph>,
        field: F,
        stalks: Vec<Vec<u32>>,
        restrictions: Vec<RestrictionMatrix<F>>,
    ) -> Result<Self> {
        let mut sheaf = Self::zero(graph, field)?;
        if stalks.len() != sheaf.graph.num_vertices() {
            return Err(Error::InvalidSheaf(format!(
                "{} stalks for {} vertices",
                stalks.len(),
                sheaf.graph.num_vertices()
            )));
        }
        if restrictions.len() != sheaf.graph.edges().len() {
            return Err(Error::InvalidSheaf(format!(
                "{} restrictions for {} edges",
                restrictions.len(),
                sheaf.graph.edges().len()
            )));
        }
        for (v, degs) in stalks.iter().enumerate() {
            if let Some(d) = degs.iter().find(|&&d| d % 2 == 1) {
                return Err(Error::InvalidSheaf(format!(
                    "odd generator degree {d} at vertex {v}"
                )));
            }
        }
        sheaf.stalks = stalks;
        for (e, m) in restrictions.into_iter().enumerate() {
            sheaf.restrictions[e] = sheaf.normalise_restriction(e, m)?;
        }
        Ok(sheaf)
    }

    /// The sheaf with every stalk zero.
    pub fn zero(graph: Arc<MomentGraph>, field: F) -> Result<Self> {
        let n = graph.rank();
        let reducers = graph
            .edges()
            .iter()
            .map(|e| {
                LinearReducer::new(&field, &e.label)
                    .map_err(|_| Error::VanishingLabel(format!("{:?}", e.label)))
            })
            .collect::<Result<Vec<_>>>()?;
        let restrictions = graph
            .edges()
            .iter()
            .map(|_| RestrictionMatrix::zero(0, 0, n))
            .collect();
        let stalks = vec![Vec::new(); graph.num_vertices()];
        Ok(SheafData {
            graph,
            field,
            stalks,
            restrictions,
            reducers,
        })
    }

    fn normalise_restriction(
        &self,
        e: usize,
        m: RestrictionMatrix<F>,
    ) -> Result<RestrictionMatrix<F>> {
        let edge = self.graph.edge(e);
        let (tail, head) = (&self.stalks[edge.tail], &self.stalks[edge.head]);
        if m.rows != head.len()
            || m.cols != tail.len()
            || m.entries.len() != m.rows
            || m.entries.iter().any(|r| r.len() != m.cols)
        {
            return Err(Error::InvalidSheaf(format!(
                "restriction on edge {e} is not {}x{}",
                head.len(),
                tail.len()
            )));
        }
        let mut out = RestrictionMatrix::zero(m.rows, m.cols, self.graph.rank());
        for (i, row) in m.entries.into_iter().enumerate() {
            for (j, p) in row.into_iter().enumerate() {
                if p.nvars() != self.graph.rank() {
                    return Err(Error::RankMismatch(self.graph.rank(), p.nvars()));
                }
                let r = self.reducers[e].reduce(&p)?;
                if r.is_zero() {
                    continue;
                }
                let want = tail[j].checked_sub(head[i]);
                if r.homogeneous_degree() != want || want.is_none() {
                    return Err(Error::InvalidSheaf(format!(
                        "entry ({i},{j}) on edge {e} is not homogeneous of the right degree"
                    )));
                }
                out.entries[i][j] = r;
            }
        }
        Ok(out)
    }

    /// Replaces the stalk at `x` and the tail maps on its upward edges.
    pub(crate) fn set_vertex(
        &mut self,
        x: usize,
        degrees: Vec<u32>,
        up: Vec<(usize, RestrictionMatrix<F>)>,
    ) -> Result<()> {
        self.stalks[x] = degrees;
        for (e, m) in up {
            if self.graph.edge(e).tail != x {
                return Err(Error::InvalidSheaf(format!(
                    "edge {e} does not start at {x}"
                )));
            }
            self.restrictions[e] = self.normalise_restriction(e, m)?;
        }
        Ok(())
    }

    pub fn graph(&self) -> &MomentGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<MomentGraph> {
        &self.graph
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.graph.rank()
    }

    pub fn stalk_degrees(&self, x: usize) -> &[u32] {
        &self.stalks[x]
    }

    pub fn stalks(&self) -> &[Vec<u32>] {
        &self.stalks
    }

    /// Generator degrees of the edge module: those of the head stalk.
    pub fn edge_degrees(&self, e: usize) -> &[u32] {
        &self.stalks[self.graph.edge(e).head]
    }

    pub fn restriction(&self, e: usize) -> &RestrictionMatrix<F> {
        &self.restrictions[e]
    }

    pub fn reducer(&self, e: usize) -> &LinearReducer<F> {
        &self.reducers[e]
    }

    /// The linear system whose kernel is `Γ(I)_d`; unknowns are laid out
    /// vertex by vertex in the order given.
    pub fn section_system(&self, order: &[usize], d: u32) -> Result<SectionSystem<F>> {
        let layout = SliceLayout::new(self, order, d)?;
        let mut inset = vec![false; self.graph.num_vertices()];
        for &v in order {
            inset[v] = true;
        }
        let edges: Vec<usize> = (0..self.graph.edges().len())
            .filter(|&e| {
                let edge = self.graph.edge(e);
                inset[edge.tail] && inset[edge.head]
            })
            .collect();
        let elay = EdgeLayout::new(self, &edges, d)?;
        let mut rows: Vec<SparseVec<F::Elem>> = vec![Vec::new(); elay.dim()];
        let f = &self.field;
        for block in &layout.blocks {
            let v = block.vertex;
            for (k, m) in block.monos.iter().enumerate() {
                let col = block.offset + k;
                for &e in self.graph.up_edges(v) {
                    if !inset[self.graph.edge(e).head] {
                        continue;
                    }
                    let rm = &self.restrictions[e];
                    for i in 0..rm.rows {
                        let entry = &rm.entries[i][block.gen];
                        if entry.is_zero() {
                            continue;
                        }
                        let p = self.reducers[e].reduce(&entry.mul_monomial(m, f))?;
                        for (q, c) in p.terms() {
                            rows[elay.index(e, i, q)?].push((col, c.clone()));
                        }
                    }
                }
                for &e in self.graph.down_edges(v) {
                    if !inset[self.graph.edge(e).tail] {
                        continue;
                    }
                    let p = self.reducers[e].reduce_monomial(m);
                    for (q, c) in p.terms() {
                        rows[elay.index(e, block.gen, q)?].push((col, f.neg(c)));
                    }
                }
            }
        }
        rows.retain(|r| !r.is_empty());
        Ok(SectionSystem {
            ncols: layout.dim,
            layout,
            rows,
        })
    }

    /// A basis of `Γ(I)_d`.
    pub fn sections_slice(&self, vertices: &[usize], d: u32) -> Result<SectionSlice<F>> {
        let sys = self.section_system(vertices, d)?;
        let basis = kernel_basis(sys.rows, sys.ncols, &self.field);
        Ok(SectionSlice {
            layout: sys.layout,
            basis,
        })
    }

    /// `dim Γ(I)_d` for `d = 0, 2, ..., d_max`.
    pub fn hilbert_series(&self, vertices: &[usize], d_max: u32) -> Result<Vec<usize>> {
        (0..=d_max)
            .step_by(2)
            .map(|d| Ok(self.sections_slice(vertices, d)?.basis.len()))
            .collect()
    }

    /// `F^{δx}_d`: the image of `Γ({▷x})_d` in the upward edge modules of
    /// `x`, as an echelon basis in the coordinates of `layout`.
    pub fn delta_image(&self, x: usize, d: u32) -> Result<(EdgeLayout, Vec<SparseVec<F::Elem>>)> {
        let up: Vec<usize> = self.graph.up_edges(x).to_vec();
        let elay = EdgeLayout::new(self, &up, d)?;
        let heads: Vec<usize> = up.iter().map(|&e| self.graph.edge(e).head).collect();
        let mut order: Vec<usize> = self
            .graph
            .strictly_above(x)
            .into_iter()
            .filter(|y| !heads.contains(y))
            .collect();
        let split_vertices = order.len();
        order.extend(&heads);
        let sys = self.section_system(&order, d)?;
        let split = sys.layout.vertex_offset(split_vertices);
        let proj = kernel_projection(sys.rows, sys.ncols, split, &self.field);
        let f = &self.field;
        let mut ech = Echelon::new(f);
        for v in proj {
            let mut entries = Vec::new();
            for (c, a) in v {
                let (block, m) = sys.layout.locate(c + split);
                let e = up[heads
                    .iter()
                    .position(|&h| h == block.vertex)
                    .expect("head block")];
                for (q, cq) in self.reducers[e].reduce_monomial(m).terms() {
                    entries.push((elay.index(e, block.gen, q)?, f.mul(&a, cq)));
                }
            }
            ech.insert(collect_sparse(entries, f));
        }
        Ok((elay, ech.into_reduced()))
    }

    /// Images under `d_x` of the degree-`d` monomial multiples of the stalk
    /// generators at `x`, in the coordinates of `elay`.
    pub fn dx_image(&self, x: usize, elay: &EdgeLayout) -> Result<Vec<SparseVec<F::Elem>>> {
        let d = elay.degree;
        let f = &self.field;
        let mut out = Vec::new();
        for (j, &dj) in self.stalks[x].iter().enumerate() {
            if dj > d || (d - dj) % 2 == 1 {
                continue;
            }
            for m in monomial_basis(d - dj, self.nvars())? {
                let mut entries = Vec::new();
                for &e in elay.edges() {
                    let rm = &self.restrictions[e];
                    for i in 0..rm.rows {
                        let entry = &rm.entries[i][j];
                        if entry.is_zero() {
                            continue;
                        }
                        let p = self.reducers[e].reduce(&entry.mul_monomial(&m, f))?;
                        for (q, c) in p.terms() {
                            entries.push((elay.index(e, i, q)?, c.clone()));
                        }
                    }
                }
                out.push(collect_sparse(entries, f));
            }
        }
        Ok(out)
    }

    /// `Y_k · V` for `V` given in the coordinates of `lo`, landing in `hi`
    /// (two degrees up, over the same edges).
    pub fn times_linear(
        &self,
        lo: &EdgeLayout,
        vectors: &[SparseVec<F::Elem>],
        hi: &EdgeLayout,
    ) -> Result<Vec<SparseVec<F::Elem>>> {
        let f = &self.field;
        let mut out = Vec::new();
        for v in vectors {
            for k in 0..self.nvars() {
                let mut entries = Vec::new();
                for (c, a) in v {
                    let (block, m) = lo.locate(*c);
                    let p = self.reducers[block.edge].reduce_monomial(&m.times_var(k));
                    for (q, cq) in p.terms() {
                        entries.push((hi.index(block.edge, block.gen, q)?, f.mul(a, cq)));
                    }
                }
                let s = collect_sparse(entries, f);
                if !s.is_empty() {
                    out.push(s);
                }
            }
        }
        Ok(out)
    }

    /// Polynomial-arithmetic check of every edge condition inside the
    /// section's support.
    pub fn check_section(&self, s: &Section<F>) -> Result<bool> {
        let f = &self.field;
        for (e, edge) in self.graph.edges().iter().enumerate() {
            let (Some(mt), Some(mh)) = (s.components.get(&edge.tail), s.components.get(&edge.head))
            else {
                continue;
            };
            let rm = &self.restrictions[e];
            for i in 0..rm.rows {
                let mut acc = mh[i].negate(f);
                for (j, p) in mt.iter().enumerate() {
                    acc = acc.add(&rm.entries[i][j].mul(p, f)?, f)?;
                }
                if !self.reducers[e].reduce(&acc)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Flabbiness checked degree by degree: `F^{δx}_d` lies in the
    /// image of `d_x`. Returns the first failing `(x, d)`.
    pub fn flabby_witness(&self, d_max: u32) -> Result<Option<(usize, u32)>> {
        for x in 0..self.graph.num_vertices() {
            if self.graph.up_edges(x).is_empty() {
                continue;
            }
            for d in (0..=d_max).step_by(2) {
                let (elay, delta) = self.delta_image(x, d)?;
                let mut img = Echelon::new(&self.field);
                for v in self.dx_image(x, &elay)? {
                    img.insert(v);
                }
                if delta.iter().any(|v| !img.contains(v)) {
                    return Ok(Some((x, d)));
                }
            }
        }
        Ok(None)
    }

    pub fn is_flabby(&self, d_max: u32) -> Result<bool> {
        Ok(self.flabby_witness(d_max)?.is_none())
    }

    pub fn to_json_value(&self) -> Result<SheafJson> {
        let f = &self.field;
        let edges = self
            .graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                let rm = &self.restrictions[e];
                let restriction = rm
                    .entries
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|p| p.to_json_terms(f))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SheafEdgeJson {
                    edge: e,
                    head: edge.head,
                    label: edge.label.clone(),
                    cols: rm.cols,
                    restriction,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SheafJson {
            schema_version: SHEAF_SCHEMA_VERSION,
            field: f.kind().to_string(),
            graph: self.graph.to_json_value(),
            stalks: self.stalks.clone(),
            edges,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value()?).expect("sheaf serialises") + "\n")
    }

    pub fn from_json_value(j: &SheafJson, field: &F) -> Result<Self> {
        if j.schema_version != SHEAF_SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported sheaf schema version {}",
                j.schema_version
            )));
        }
        let kind: CoefficientField = j.field.parse()?;
        if kind != field.kind() {
            return Err(Error::InvalidSheaf(format!(
                "sheaf is over {kind}, expected {}",
                field.kind()
            )));
        }
        let graph = Arc::new(MomentGraph::from_json_value(&j.graph)?);
        if j.stalks
            .iter()
            .any(|s| s.len() > MAX_LOADED_GENERATORS || s.iter().any(|&d| d > MAX_LOADED_DEGREE))
        {
            return Err(Error::InvalidSheaf(
                "stalk exceeds the loader limits".into(),
            ));
        }
        if j.edges.len() != graph.edges().len() {
            return Err(Error::InvalidSheaf(
                "edge list does not match the graph".into(),
            ));
        }
        let n = graph.rank();
        let mut restrictions = Vec::with_capacity(j.edges.len());
        for (e, ej) in j.edges.iter().enumerate() {
            let edge = graph.edge(e);
            if ej.edge != e || ej.head != edge.head || ej.label != edge.label {
                return Err(Error::InvalidSheaf(format!(
                    "edge record {e} does not match the graph"
                )));
            }
            if ej.cols > MAX_LOADED_GENERATORS || ej.restriction.len() > MAX_LOADED_GENERATORS {
                return Err(Error::InvalidSheaf(
                    "restriction exceeds the loader limits".into(),
                ));
            }
            let entries = ej
                .restriction
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|t| Polynomial::from_json_terms(field, n, t))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            restrictions.push(RestrictionMatrix {
                rows: entries.len(),
                cols: ej.cols,
                entries,
            });
        }
        SheafData::new(graph, field.clone(), j.stalks.clone(), restrictions)
    }

    pub fn from_json(text: &str, field: &F) -> Result<Self> {
        let j: SheafJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&j, field)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafEdgeJson {
    pub edge: usize,
    pub head: usize,
    pub label: Vec<i64>,
    pub cols: usize,
    pub restriction: Vec<Vec<Vec<PolyTermJson>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafJson {
    pub schema_version: u32,
    pub field: String,
    pub graph: GraphJson,
    pub stalks: Vec<Vec<u32>>,
    pub edges: Vec<SheafEdgeJson>,
}

#[derive(Clone, Debug)]
pub struct StalkBlock {
    pub vertex: usize,
    pub gen: usize,
    pub offset: usize,
    pub monos: Vec<Monomial>,
}

/// Coordinates of `⊕_{x ∈ I} F^x_d`: vertex, then generator, then monomial.
#[derive(Clone, Debug)]
pub struct SliceLayout {
    pub degree: u32,
    pub vertices: Vec<usize>,
    blocks: Vec<StalkBlock>,
    vertex_offsets: Vec<usize>,
    dim: usize,
}

impl SliceLayout {
    fn new<F: Field>(sheaf: &SheafData<F>, order: &[usize], d: u32) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut vertex_offsets = Vec::with_capacity(order.len() + 1);
        let mut offset = 0;
        for &v in order {
            if v >= sheaf.graph.num_vertices() {
                return Err(Error::Precondition(format!("vertex {v} out of range")));
            }
            vertex_offsets.push(offset);
            for (gen, &dg) in sheaf.stalks[v].iter().enumerate() {
                if dg > d || (d - dg) % 2 == 1 {
                    continue;
                }
                let monos = monomial_basis(d - dg, sheaf.nvars())?;
                let len = monos.len();
                blocks.push(StalkBlock {
                    vertex: v,
                    gen,
                    offset,
                    monos,
                });
                offset += len;
            }
        }
        vertex_offsets.push(offset);
        Ok(SliceLayout {
            degree: d,
            vertices: order.to_vec(),
            blocks,
            vertex_offsets,
            dim: offset,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// First column of the `i`-th vertex in the layout order.
    pub fn vertex_offset(&self, i: usize) -> usize {
        self.vertex_offsets[i]
    }

    pub fn blocks(&self) -> &[StalkBlock] {
        &self.blocks
    }

    pub fn locate(&self, col: usize) -> (&StalkBlock, &Monomial) {
        let b = self.blocks.partition_point(|b| b.offset <= col) - 1;
        let block = &self.blocks[b];
        (block, &block.monos[col - block.offset])
    }

    pub fn to_section<F: Field>(&self, sheaf: &SheafData<F>, v: &SparseVec<F::Elem>) -> Section<F> {
        let f = sheaf.field();
        let n = sheaf.nvars();
        let mut components: BTreeMap<usize, Vec<Polynomial<F>>> = self
            .vertices
            .iter()
            .map(|&x| (x, vec![Polynomial::zero(n); sheaf.stalk_degrees(x).len()]))
            .collect();
        for (c, a) in v {
            let (block, m) = self.locate(*c);
            components.get_mut(&block.vertex).expect("vertex in layout")[block.gen].add_term(
                f,
                m.clone(),
                a.clone(),
            );
        }
        Section {
            degree: self.degree,
            components,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EdgeBlock {
    pub edge: usize,
    pub gen: usize,
    pub offset: usize,
    pub monos: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

/// Coordinates of `⊕_E F^E_d` over a list of edges: edge, head generator,
/// then monomial free of the label's pivot variable.
#[derive(Clone, Debug)]
pub struct EdgeLayout {
    pub degree: u32,
    edges: Vec<usize>,
    blocks: Vec<EdgeBlock>,
    block_of: HashMap<(usize, usize), usize>,
    dim: usize,
}

impl EdgeLayout {
    pub fn new<F: Field>(sheaf: &SheafData<F>, edges: &[usize], d: u32) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut block_of = HashMap::new();
        let mut offset = 0;
        for &e in edges {
            for (gen, &dg) in sheaf.edge_degrees(e).iter().enumerate() {
                if dg > d || (d - dg) % 2 == 1 {
                    continue;
                }
                let monos = sheaf.reducers[e].quotient_basis(d - dg)?;
                if monos.is_empty() {
                    continue;
                }
                let len = monos.len();
                block_of.insert((e, gen), blocks.len());
                blocks.push(EdgeBlock {
                    edge: e,
                    gen,
                    offset,
                    index: index_basis(&monos),
                    monos,
                });
                offset += len;
            }
        }
        Ok(EdgeLayout {
            degree: d,
            edges: edges.to_vec(),
            blocks,
            block_of,
            dim: offset,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn index(&self, e: usize, gen: usize, m: &Monomial) -> Result<usize> {
        let block = self
            .block_of
            .get(&(e, gen))
            .map(|&b| &self.blocks[b])
            .ok_or_else(|| {
                Error::InvalidSheaf(format!(
                    "edge {e} has no degree-{} slice for generator {gen}",
                    self.degree
                ))
            })?;
        block
            .index
            .get(m)
            .map(|&k| block.offset + k)
            .ok_or_else(|| {
                Error::InvalidSheaf(format!("monomial outside the edge basis on edge {e}"))
            })
    }

    pub fn locate(&self, col: usize) -> (&EdgeBlock, &Monomial) {
        let b = self.blocks.partition_point(|b| b.offset <= col) - 1;
        let block = &self.blocks[b];
        (block, &block.monos[col - block.offset])
    }

    /// The `E`-component of `v`, one polynomial per head generator.
    pub fn component<F: Field>(
        &self,
        v: &SparseVec<F::Elem>,
        e: usize,
        ngens: usize,
        nvars: usize,
        field: &F,
    ) -> Vec<Polynomial<F>> {
        let mut out = vec![Polynomial::zero(nvars); ngens];
        for (c, a) in v {
            let (block, m) = self.locate(*c);
            if block.edge == e {
                out[block.gen].add_term(field, m.clone(), a.clone());
            }
        }
        out
    }
}

pub struct SectionSystem<F: Field> {
    pub layout: SliceLayout,
    pub rows: Vec<SparseVec<F::Elem>>,
    pub ncols: usize,
}

pub struct SectionSlice<F: Field> {
    pub layout: SliceLayout,
    pub basis: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> SectionSlice<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn sections(&self, sheaf: &SheafData<F>) -> Vec<Section<F>> {
        self.basis
            .iter()
            .map(|v| self.layout.to_section(sheaf, v))
            .collect()
    }
}

/// A homogeneous local section: per vertex, a coefficient for each stalk
/// generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section<F: Field> {
    pub degree: u32,
    pub components: BTreeMap<usize, Vec<Polynomial<F>>>,
}

/// A tuple of polynomials indexed by the vertices of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureElement<F: Field> {
    pub components: Vec<Polynomial<F>>,
}

impl<F: Field> StructureElement<F> {
    pub fn constant(graph: &MomentGraph, field: &F, c: F::Elem) -> Self {
        StructureElement {
            components: vec![Polynomial::constant(field, graph.rank(), c); graph.num_vertices()],
        }
    }

    /// Degree of the first nonzero component.
    pub fn degree(&self) -> u32 {
        self.components
            .iter()
            .find_map(|p| p.homogeneous_degree())
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Self, field: &F) -> Result<Self> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.mul(b, field))
            .collect::<Result<_>>()?;
        Ok(StructureElement { components })
    }

    /// Componentwise action on a section.
    pub fn act(&self, s: &Section<F>, field: &F) -> Result<Section<F>> {
        let mut components = BTreeMap::new();
        for (&v, coeffs) in &s.components {
            let z = self.components.get(v).ok_or_else(|| {
                Error::Precondition(format!("vertex {v} outside the structure element"))
            })?;
            components.insert(
                v,
                coeffs
                    .iter()
                    .map(|p| z.mul(p, field))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(Section {
            degree: s.degree + self.degree(),
            components,
        })
    }
}

/// The first edge where `z_tail - z_head` is not divisible by the label.
pub fn structure_violation<F: Field>(
    z: &StructureElement<F>,
    graph: &MomentGraph,
    field: &F,
) -> Result<Option<usize>> {
    if z.components.len() != graph.num_vertices() {
        return Err(Error::Precondition(
            "structure element does not match the graph".into(),
        ));
    }
    for (e, edge) in graph.edges().iter().enumerate() {
        let diff = z.components[edge.tail].sub(&z.components[edge.head], field)?;
        let reducer = LinearReducer::new(field, &edge.label)
            .map_err(|_| Error::VanishingLabel(format!("{:?}", edge.label)))?;
        if !reducer.reduce(&diff)?.is_zero() {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

pub fn is_structure_element<F: Field>(
    z: &StructureElement<F>,
    graph: &MomentGraph,
    field: &F,
) -> bool {
    matches!(structure_violation(z, graph, field), Ok(None))
}

/// `c_s`, with component `x(α̌_s)` at each vertex `x`.
pub fn cs_element<F: Field>(
    group: &WeylGroup,
    graph: &MomentGraph,
    s: usize,
    field: &F,
) -> Result<StructureElement<F>> {
    if s >= group.rank() {
        return Err(Error::Precondition(format!(
            "simple index {} out of range",
            s + 1
        )));
    }
    let components = (0..graph.num_vertices())
        .map(|v| {
            let x = graph
                .elem(v)
                .ok_or_else(|| Error::Precondition("vertex carries no group element".into()))?;
            let col: Vec<i64> = group.matrix(x).iter().map(|row| row[s]).collect();
            Ok(Polynomial::linear(field, &col))
        })
        .collect::<Result<Vec<_>>>()?;
    let z = StructureElement { components };
    if let Some(e) = structure_violation(&z, graph, field)? {
        return Err(Error::NotStructureElement(e));
    }
    Ok(z)
}

/// `f^* F` in normal form: the stalk at `x` copies the one at `f(x)`; on an
/// edge that survives, tail entries are carried back through `f_{l,x}^{-1}`;
/// on a collapsed edge the tail map is the quotient map.
pub fn pullback<F: Field>(
    f: &MGMorphism,
    source: Arc<MomentGraph>,
    sheaf: &SheafData<F>,
) -> Result<SheafData<F>> {
    let field = sheaf.field();
    let report = validate_morphism(f, &source, sheaf.graph(), field);
    if !report.is_valid() {
        return Err(Error::InvalidMorphism(report.violations.join("; ")));
    }
    let n = source.rank();
    let stalks: Vec<Vec<u32>> = f
        .vertex_map
        .iter()
        .map(|&t| sheaf.stalk_degrees(t).to_vec())
        .collect();
    let inverses = f
        .lattice_autos
        .iter()
        .map(|m| inverse(&int_to_field(m, field), field).ok_or(Error::SingularMatrix))
        .collect::<Result<Vec<_>>>()?;
    let mut restrictions = Vec::with_capacity(source.edges().len());
    for (e, edge) in source.edges().iter().enumerate() {
        let m = match report.edge_map[e] {
            None => RestrictionMatrix::identity(stalks[edge.tail].len(), n, field),
            Some(e2) => {
                let orig = sheaf.restriction(e2);
                let entries = orig
                    .entries
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|p| p.twist_by_field_matrix(&inverses[edge.tail], field))
                            .collect()
                    })
                    .collect();
                RestrictionMatrix {
                    rows: orig.rows,
                    cols: orig.cols,
                    entries,
                }
            }
        };
        restrictions.push(m);
    }
    SheafData::new(source, field.clone(), stalks, restrictions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bruhat_graph, Edge, Vertex};
    use crate::ring::{PrimeField, Rationals};

    /// The constant sheaf `S_k` on every vertex with identity maps: on the
    /// full A2 graph this is the canonical sheaf.
    fn constant_sheaf<F: Field>(graph: MomentGraph, field: F) -> SheafData<F> {
        let n = graph.rank();
        let stalks = vec![vec![0]; graph.num_vertices()];
        let restrictions = graph
            .edges()
            .iter()
            .map(|_| RestrictionMatrix::identity(1, n, &field))
            .collect();
        SheafData::new(Arc::new(graph), field, stalks, restrictions).unwrap()
    }

    fn a2_graph() -> (WeylGroup, MomentGraph) {
        let g = WeylGroup::parse_type("A2").unwrap();
        let mg = bruhat_graph(&g, &[]).unwrap();
        (g, mg)
    }

    #[test]
    fn single_vertex_sections() {
        let v = Vertex {
            word: String::new(),
            length: 0,
            elem: None,
        };
        let mg = MomentGraph::new(2, vec![v], vec![], &[]).unwrap();
        let s = constant_sheaf(mg, Rationals);
        assert_eq!(s.sections_slice(&[0], 0).unwrap().dim(), 1);
        assert_eq!(s.hilbert_series(&[0], 6).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(s.hilbert_series(&[], 4).unwrap(), vec![0, 0, 0]);
        assert!(s.is_flabby(6).unwrap());
    }

    #[test]
    fn global_degree_zero_sections_are_constants() {
        let (_, mg) = a2_graph();
        let s = constant_sheaf(mg, Rationals);
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(s.sections_slice(&all, 0).unwrap().dim(), 1);
        assert_eq!(s.sections_slice(&all, 3).unwrap().dim(), 0);
    }

    #[test]
    fn sections_satisfy_edge_conditions() {
        let (_, mg) = a2_graph();
        let s = constant_sheaf(mg, Rationals);
        let above: Vec<usize> = (1..6).collect();
        for d in [0, 2, 4] {
            let slice = s.sections_slice(&above, d).unwrap();
            for sec in slice.sections(&s) {
                assert!(s.check_section(&sec).unwrap());
            }
        }
    }

    #[test]
    fn cs_examples() {
        let (g, mg) = a2_graph();
        let q = Rationals;
        let z = cs_element(&g, &mg, 0, &q).unwrap();
        let s1 = mg.vertex_of_elem(g.simple(0)).unwrap();
        let s2 = mg.vertex_of_elem(g.simple(1)).unwrap();
        assert_eq!(z.components[0], Polynomial::linear(&q, &[1, 0]));
        assert_eq!(z.components[s1], Polynomial::linear(&q, &[-1, 0]));
        assert_eq!(z.components[s2], Polynomial::linear(&q, &[1, 1]));
        let a3 = WeylGroup::parse_type("A3").unwrap();
        let f5 = PrimeField::new(5).unwrap();
        let mg3 = bruhat_graph(&a3, &[]).unwrap();
        for s in 0..3 {
            assert!(is_structure_element(
                &cs_element(&a3, &mg3, s, &f5).unwrap(),
                &mg3,
                &f5
            ));
        }
    }

    #[test]
    fn structure_membership() {
        let (_, mg) = a2_graph();
        let q = Rationals;
        assert!(is_structure_element(
            &StructureElement::constant(&mg, &q, q.from_i64(3)),
            &mg,
            &q
        ));
        let mut comps = vec![Polynomial::zero(2); 6];
        comps[0] = Polynomial::linear(&q, &[1, 0]);
        assert!(!is_structure_element(
            &StructureElement { components: comps },
            &mg,
            &q
        ));
    }

    #[test]
    fn action_of_cs_on_constant_section() {
        let (g, mg) = a2_graph();
        let q = Rationals;
        let all: Vec<usize> = (0..6).collect();
        let s = constant_sheaf(mg.clone(), q);
        let slice = s.sections_slice(&all, 0).unwrap();
        let c = &slice.sections(&s)[0];
        let z = cs_element(&g, &mg, 0, &q).unwrap();
        let zc = z.act(c, &q).unwrap();
        assert_eq!(zc.degree, 2);
        assert!(s.check_section(&zc).unwrap());
        let one = StructureElement::constant(&mg, &q, q.one());
        assert_eq!(&one.act(c, &q).unwrap(), c);
        let z2 = cs_element(&g, &mg, 1, &q).unwrap();
        let lhs = z.mul(&z2, &q).unwrap().act(c, &q).unwrap();
        let rhs = z.act(&z2.act(c, &q).unwrap(), &q).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn zeroed_stalk_breaks_flabbiness() {
        let (g, mg) = a2_graph();
        let s1 = mg.vertex_of_elem(g.simple(0)).unwrap();
        let s = constant_sheaf(mg.clone(), Rationals);
        assert!(s.is_flabby(4).unwrap());
        let mut stalks = s.stalks().to_vec();
        stalks[s1] = vec![];
        let restrictions = mg
            .edges()
            .iter()
            .map(|e| {
                let (rows, cols) = (stalks[e.head].len(), stalks[e.tail].len());
                if rows == cols {
                    RestrictionMatrix::identity(rows, 2, &Rationals)
                } else {
                    RestrictionMatrix::zero(rows, cols, 2)
                }
            })
            .collect();
        let broken = SheafData::new(Arc::new(mg), Rationals, stalks, restrictions).unwrap();
        assert_eq!(broken.flabby_witness(4).unwrap(), Some((s1, 0)));
    }

    #[test]
    fn validation_rejects_bad_entries() {
        let v = |w: &str, l| Vertex {
            word: w.into(),
            length: l,
            elem: None,
        };
        let mg = Arc::new(
            MomentGraph::new(
                2,
                vec![v("", 0), v("1", 1)],
                vec![Edge {
                    tail: 0,
                    head: 1,
                    label: vec![1, 0],
                }],
                &[(0, 1)],
            )
            .unwrap(),
        );
        let q = Rationals;
        // degree 2 entry where degree 0 is required
        let bad = RestrictionMatrix {
            rows: 1,
            cols: 1,
            entries: vec![vec![Polynomial::linear(&q, &[0, 1])]],
        };
        assert!(SheafData::new(mg.clone(), q, vec![vec![0], vec![0]], vec![bad]).is_err());
        // an entry divisible by the label reduces to zero and is accepted
        let ok = RestrictionMatrix {
            rows: 1,
            cols: 1,
            entries: vec![vec![Polynomial::linear(&q, &[1, 0])]],
        };
        assert!(SheafData::new(mg.clone(), q, vec![vec![2], vec![0]], vec![ok]).is_ok());
        assert!(SheafData::new(
            mg.clone(),
            q,
            vec![vec![1], vec![0]],
            vec![RestrictionMatrix::zero(1, 1, 2)]
        )
        .is_err());
        assert!(SheafData::new(mg, q, vec![vec![0]], vec![]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let (_, mg) = a2_graph();
        let f3 = PrimeField::new(3).unwrap();
        let s = constant_sheaf(mg, f3);
        let text = s.to_json().unwrap();
        let back = SheafData::from_json(&text, &f3).unwrap();
        assert_eq!(back.stalks(), s.stalks());
        assert!((0..9).all(|e| back.restriction(e) == s.restriction(e)));
        assert_eq!(back.to_json().unwrap(), text);
        assert!(SheafData::from_json(&text, &Rationals).is_err());
    }

    #[test]
    fn pullback_along_identity_and_inverse() {
        let (g, mg) = a2_graph();
        let s = constant_sheaf(mg.clone(), Rationals);
        let id = MGMorphism::identity(&mg);
        assert_eq!(pullback(&id, Arc::new(mg.clone()), &s).unwrap(), s);
        let inv = crate::graph::inverse_automorphism(&g, &mg).unwrap();
        let p = pullback(&inv, Arc::new(mg.clone()), &s).unwrap();
        for x in 0..6 {
            assert_eq!(p.stalk_degrees(x), s.stalk_degrees(inv.vertex_map[x]));
        }
    }

    #[test]
    fn pullback_along_collapse() {
        let v = |w: &str, l| Vertex {
            word: w.into(),
            length: l,
            elem: None,
        };
        let src = Arc::new(
            MomentGraph::new(
                2,
                vec![v("", 0), v("1", 1)],
                vec![Edge {
                    tail: 0,
                    head: 1,
                    label: vec![1, 0],
                }],
                &[(0, 1)],
            )
            .unwrap(),
        );
        let dst = MomentGraph::new(2, vec![v("", 0)], vec![], &[]).unwrap();
        let s = SheafData::new(Arc::new(dst), Rationals, vec![vec![0, 2]], vec![]).unwrap();
        let id = crate::coxeter::identity(2);
        let f = MGMorphism {
            vertex_map: vec![0, 0],
            lattice_autos: vec![id.clone(), id],
        };
        let p = pullback(&f, src, &s).unwrap();
        assert_eq!(p.edge_degrees(0), &[0, 2]);
        assert_eq!(
            p.restriction(0),
            &RestrictionMatrix::identity(2, 2, &Rationals)
        );
        // the edge module is the stalk modulo x1: in degree 2 it has x2 and the degree-2 generator
        let elay = EdgeLayout::new(&p, &[0], 2).unwrap();
        assert_eq!(elay.dim(), 2);
    }
}
