//! The canonical sheaf on a moment graph with a unique maximal vertex,
//! built top-down by projective covers, and the checks that certify it.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::coxeter::{Elem, WeylGroup};
use crate::error::{Error, Result};
use crate::graph::{bruhat_graph, MomentGraph};
use crate::kl::format_q_polynomial;
use crate::linalg::{Echelon, SparseVec};
use crate::ring::Field;
use crate::sheaf::{EdgeLayout, RestrictionMatrix, SheafData};

/// How far generators are searched for at each vertex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DegreePolicy {
    /// Extra degrees searched beyond the default cap.
    pub slack: u32,
}

impl DegreePolicy {
    /// `ℓ(w) - ℓ(x) + 2 + slack`, rounded up to an even degree.
    pub fn cap(&self, top_length: u32, length: u32) -> u32 {
        let c = top_length.saturating_sub(length) + 2 + self.slack;
        c + c % 2
    }
}

/// A graded free module's rank `Σ q^{d_i / 2}`; `coeffs[k]` counts the
/// generators in degree `2k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradedRank {
    pub coeffs: Vec<u64>,
}

impl GradedRank {
    pub fn from_degrees(degrees: &[u32]) -> Self {
        let mut coeffs = Vec::new();
        for &d in degrees {
            let k = (d / 2) as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0);
            }
            coeffs[k] += 1;
        }
        GradedRank { coeffs }
    }

    pub fn total(&self) -> u64 {
        self.coeffs.iter().sum()
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.coeffs.iter().map(|&c| c as i64).collect()
    }
}

impl fmt::Display for GradedRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_q_polynomial(&self.as_i64()))
    }
}

/// The output of [`build_bmp`].
#[derive(Clone, Debug)]
pub struct BmpSheaf<F: Field> {
    pub sheaf: SheafData<F>,
    pub top: usize,
    /// Search cap used at each vertex.
    pub caps: Vec<u32>,
    /// Whether the two highest searched degrees produced no generator.
    pub converged: Vec<bool>,
}

impl<F: Field> BmpSheaf<F> {
    pub fn graph(&self) -> &MomentGraph {
        self.sheaf.graph()
    }

    pub fn graded_rank(&self, y: usize) -> GradedRank {
        graded_rank(&self.sheaf, y)
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

pub fn graded_rank<F: Field>(sheaf: &SheafData<F>, y: usize) -> GradedRank {
    GradedRank::from_degrees(sheaf.stalk_degrees(y))
}

/// Vertices by decreasing length, ties broken by word. Fails unless this
/// lists every vertex after all vertices above it.
pub fn processing_order(graph: &MomentGraph) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..graph.num_vertices()).collect();
    order.sort_by(|&a, &b| {
        let (va, vb) = (graph.vertex(a), graph.vertex(b));
        vb.length
            .cmp(&va.length)
            .then_with(|| va.word.cmp(&vb.word))
    });
    let mut done = vec![false; graph.num_vertices()];
    for &x in &order {
        if graph.strictly_above(x).iter().any(|&y| !done[y]) {
            return Err(Error::Precondition(
                "vertex lengths do not refine the order".into(),
            ));
        }
        done[x] = true;
    }
    Ok(order)
}

/// Minimal generators of `F^{δx}` in degrees `0, 2, ..., cap`, as
/// `(degree, vector)` pairs, plus the layouts used.
fn minimal_generators<F: Field>(
    sheaf: &SheafData<F>,
    x: usize,
    cap: u32,
) -> Result<(
    Vec<(u32, SparseVec<F::Elem>)>,
    Vec<EdgeLayout>,
    Vec<Vec<SparseVec<F::Elem>>>,
)> {
    let degrees: Vec<u32> = (0..=cap).step_by(2).collect();
    let slices: Vec<(EdgeLayout, Vec<SparseVec<F::Elem>>)> = degrees
        .par_iter()
        .map(|&d| sheaf.delta_image(x, d))
        .collect::<Result<Vec<_>>>()?;
    let mut gens = Vec::new();
    let (layouts, deltas): (Vec<_>, Vec<_>) = slices.into_iter().unzip();
    for k in 0..degrees.len() {
        let mut ech = Echelon::new(sheaf.field());
        if k > 0 {
            for v in sheaf.times_linear(&layouts[k - 1], &deltas[k - 1], &layouts[k])? {
                ech.insert(v);
            }
        }
        for v in &deltas[k] {
            if ech.insert(v.clone()).is_some() {
                gens.push((degrees[k], v.clone()));
            }
        }
    }
    Ok((gens, layouts, deltas))
}

/// Builds the canonical sheaf on `graph` over `field`.
pub fn build_bmp<F: Field>(
    graph: Arc<MomentGraph>,
    field: F,
    policy: DegreePolicy,
) -> Result<BmpSheaf<F>> {
    let top = graph.unique_maximum()?;
    let order = processing_order(&graph)?;
    let top_length = graph.vertex(top).length;
    let nvars = graph.rank();
    let mut sheaf = SheafData::zero(graph.clone(), field)?;
    let mut caps = vec![0; graph.num_vertices()];
    let mut converged = vec![true; graph.num_vertices()];
    sheaf.set_vertex(top, vec![0], Vec::new())?;
    for &x in order.iter().filter(|&&x| x != top) {
        let cap = policy.cap(top_length, graph.vertex(x).length);
        caps[x] = cap;
        let (gens, layouts, _) = minimal_generators(&sheaf, x, cap)?;
        converged[x] = gens.iter().all(|(d, _)| *d + 2 < cap);
        let degrees: Vec<u32> = gens.iter().map(|(d, _)| *d).collect();
        let mut up = Vec::new();
        for &e in graph.up_edges(x) {
            let head = graph.edge(e).head;
            let rows = sheaf.stalk_degrees(head).len();
            let mut m = RestrictionMatrix::zero(rows, gens.len(), nvars);
            for (j, (d, v)) in gens.iter().enumerate() {
                let layout = &layouts[(*d / 2) as usize];
                for (i, p) in layout
                    .component(v, e, rows, nvars, sheaf.field())
                    .into_iter()
                    .enumerate()
                {
                    m.entries[i][j] = p;
                }
            }
            up.push((e, m));
        }
        sheaf.set_vertex(x, degrees, up)?;
    }
    Ok(BmpSheaf {
        sheaf,
        top,
        caps,
        converged,
    })
}

/// Outcome of [`verify_axioms`]; failures are listed as `(vertex, degree)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub unique_top: bool,
    pub top_is_free_of_rank_one: bool,
    /// Every edge module is its head stalk modulo the label, with the
    /// quotient map at the head. Holds by construction of the presentation
    /// once the labels are nonzero over `k`.
    pub head_maps_canonical: bool,
    pub minimality_failures: Vec<(usize, u32)>,
    pub surjectivity_failures: Vec<(usize, u32)>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.unique_top
            && self.top_is_free_of_rank_one
            && self.head_maps_canonical
            && self.minimality_failures.is_empty()
            && self.surjectivity_failures.is_empty()
    }
}

/// Checks the three characterising properties degree by degree up to the
/// policy cap: the top stalk is `S_k`, edge modules are quotients of head
/// stalks, and each `d_x` is a projective cover of `F^{δx}`.
pub fn verify_axioms<F: Field>(sheaf: &SheafData<F>, policy: DegreePolicy) -> Result<AxiomReport> {
    let graph = sheaf.graph();
    let mut report = AxiomReport {
        head_maps_canonical: graph.is_k_moment_graph(sheaf.field()),
        ..Default::default()
    };
    let Ok(top) = graph.unique_maximum() else {
        return Ok(report);
    };
    report.unique_top = true;
    report.top_is_free_of_rank_one = sheaf.stalk_degrees(top) == [0];
    let top_length = graph.vertex(top).length;
    for x in (0..graph.num_vertices()).filter(|&x| x != top) {
        let cap = policy.cap(top_length, graph.vertex(x).length);
        let (gens, layouts, deltas) = minimal_generators(sheaf, x, cap)?;
        for (k, layout) in layouts.iter().enumerate() {
            let d = layout.degree;
            let want = gens.iter().filter(|(g, _)| *g == d).count();
            let have = sheaf.stalk_degrees(x).iter().filter(|&&g| g == d).count();
            if want != have {
                report.minimality_failures.push((x, d));
            }
            let mut img = Echelon::new(sheaf.field());
            for v in sheaf.dx_image(x, layout)? {
                img.insert(v);
            }
            let mut delta = Echelon::new(sheaf.field());
            for v in &deltas[k] {
                delta.insert(v.clone());
            }
            let equal = img.rank() == delta.rank() && img.rows().iter().all(|r| delta.contains(r));
            if !equal {
                report.surjectivity_failures.push((x, d));
            }
        }
        if sheaf.stalk_degrees(x).iter().any(|&g| g > cap) {
            report.minimality_failures.push((x, cap + 2));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaReport {
    /// `dim Γ(I)_d` for `d = 0, 2, ..., cap`.
    pub series: Vec<usize>,
    /// Coefficients of `H / (1 + q)` truncated at the cap.
    pub quotient: Vec<i64>,
    pub vertices: usize,
}

impl GammaReport {
    pub fn divisible(&self) -> bool {
        self.quotient.iter().all(|&c| c >= 0)
    }
}

/// `H(q) / (1 + q)` as a power series truncated to the length of `h`.
pub fn divide_by_one_plus_q(h: &[usize]) -> Vec<i64> {
    let mut g = Vec::with_capacity(h.len());
    let mut prev = 0i64;
    for &c in h {
        prev = c as i64 - prev;
        g.push(prev);
    }
    g
}

/// Hilbert series of `Γ(I, B_w)` for `I = [ys, w] \ {ys, y}`, where `ys < y`
/// and `ws < w`, together with its quotient by `1 + q`.
pub fn gamma_divisibility_check<F: Field>(
    group: &WeylGroup,
    bmp: &BmpSheaf<F>,
    y: Elem,
    s: usize,
    policy: DegreePolicy,
) -> Result<GammaReport> {
    let graph = bmp.graph();
    let w = graph
        .elem(bmp.top)
        .ok_or_else(|| Error::Precondition("top vertex carries no group element".into()))?;
    let ys = group.rmul_simple(y, s);
    if !group.bruhat_leq(y, w) || !group.is_right_descent(y, s) || !group.is_right_descent(w, s) {
        return Err(Error::Precondition(
            "needs y <= w, ys < y and ws < w".into(),
        ));
    }
    let mut vertices = Vec::new();
    for v in 0..graph.num_vertices() {
        let x = graph
            .elem(v)
            .ok_or_else(|| Error::Precondition("vertex carries no group element".into()))?;
        if x != y && x != ys && group.bruhat_leq(ys, x) {
            vertices.push(v);
        }
    }
    let sub = graph.restrict(&vertices)?;
    let gkm = sub.gkm_report(bmp.sheaf.field());
    if !gkm.is_gkm() {
        return Err(Error::NotGkm(format!(
            "{} dependent label pairs on the interval",
            gkm.violations.len()
        )));
    }
    let cap = policy.cap(group.length(w), group.length(ys));
    let series = bmp.sheaf.hilbert_series(&vertices, cap)?;
    let quotient = divide_by_one_plus_q(&series);
    Ok(GammaReport {
        series,
        quotient,
        vertices: vertices.len(),
    })
}

/// Canonical sheaves on the lower intervals of one Bruhat graph over one
/// field, built on demand and cached.
pub struct BmpAtlas<'g, F: Field> {
    group: &'g WeylGroup,
    j: Vec<usize>,
    full: MomentGraph,
    field: F,
    policy: DegreePolicy,
    cache: Mutex<HashMap<Elem, Arc<BmpSheaf<F>>>>,
}

impl<'g, F: Field> BmpAtlas<'g, F> {
    pub fn new(group: &'g WeylGroup, j: &[usize], field: F, policy: DegreePolicy) -> Result<Self> {
        let full = bruhat_graph(group, j)?;
        let mut j = j.to_vec();
        j.sort_unstable();
        j.dedup();
        Ok(BmpAtlas {
            group,
            j,
            full,
            field,
            policy,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn group(&self) -> &'g WeylGroup {
        self.group
    }

    pub fn parabolic(&self) -> &[usize] {
        &self.j
    }

    pub fn full_graph(&self) -> &MomentGraph {
        &self.full
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn policy(&self) -> DegreePolicy {
        self.policy
    }

    /// The sheaf on `{x <= w}`; `w` must be a vertex of the graph.
    pub fn get(&self, w: Elem) -> Result<Arc<BmpSheaf<F>>> {
        if let Some(b) = self.cache.lock().expect("atlas lock").get(&w) {
            return Ok(b.clone());
        }
        let top = self.full.vertex_of_elem(w).ok_or_else(|| {
            Error::Precondition(format!(
                "{} is not a vertex of the graph",
                self.group.word_or_e(w)
            ))
        })?;
        let graph = Arc::new(self.full.lower_set(top)?);
        let built = Arc::new(build_bmp(graph, self.field.clone(), self.policy)?);
        self.cache
            .lock()
            .expect("atlas lock")
            .insert(w, built.clone());
        Ok(built)
    }

    /// Builds the sheaves for every `w` in parallel.
    pub fn prefetch(&self, ws: &[Elem]) -> Result<()> {
        ws.par_iter().try_for_each(|&w| self.get(w).map(|_| ()))
    }

    /// Graded rank of `B_w` at `y`; zero when `y` is not below `w`.
    pub fn rank(&self, w: Elem, y: Elem) -> Result<GradedRank> {
        let b = self.get(w)?;
        Ok(match b.graph().vertex_of_elem(y) {
            Some(v) => b.graded_rank(v),
            None => GradedRank::default(),
        })
    }

    pub fn converged(&self, w: Elem, y: Elem) -> Result<bool> {
        let b = self.get(w)?;
        Ok(b.graph().vertex_of_elem(y).map_or(true, |v| b.converged[v]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bruhat_lower_graph, Vertex};
    use crate::ring::{PrimeField, Rationals};

    #[test]
    fn graded_rank_formula() {
        assert_eq!(GradedRank::from_degrees(&[0]).to_string(), "1");
        assert_eq!(GradedRank::from_degrees(&[0, 2]).to_string(), "1+q");
        assert_eq!(
            GradedRank::from_degrees(&[0, 2, 2, 4]).to_string(),
            "1+2q+q^2"
        );
        assert_eq!(GradedRank::from_degrees(&[]).to_string(), "0");
    }

    #[test]
    fn caps_are_even() {
        let p = DegreePolicy::default();
        assert_eq!(p.cap(3, 0), 6);
        assert_eq!(p.cap(4, 0), 6);
        assert_eq!(DegreePolicy { slack: 1 }.cap(4, 0), 8);
    }

    #[test]
    fn single_vertex() {
        let v = Vertex {
            word: String::new(),
            length: 0,
            elem: None,
        };
        let g = Arc::new(MomentGraph::new(2, vec![v], vec![], &[]).unwrap());
        let b = build_bmp(g, Rationals, DegreePolicy::default()).unwrap();
        assert_eq!(b.sheaf.stalk_degrees(0), &[0]);
    }

    #[test]
    fn a2_w0_is_smooth() {
        let g = WeylGroup::parse_type("A2").unwrap();
        let graph = Arc::new(bruhat_lower_graph(&g, &[], g.longest()).unwrap());
        let b = build_bmp(graph.clone(), Rationals, DegreePolicy::default()).unwrap();
        assert!(b.all_converged());
        for y in 0..6 {
            assert_eq!(b.sheaf.stalk_degrees(y), &[0]);
        }
        let b = build_bmp(graph, PrimeField::new(3).unwrap(), DegreePolicy::default()).unwrap();
        assert!((0..6).all(|y| b.sheaf.stalk_degrees(y) == [0]));
    }

    #[test]
    fn a3_singular_stalk() {
        let g = WeylGroup::parse_type("A3").unwrap();
        let w = g.parse_word("2132").unwrap();
        let graph = Arc::new(bruhat_lower_graph(&g, &[], w).unwrap());
        let b = build_bmp(graph.clone(), Rationals, DegreePolicy::default()).unwrap();
        let y = graph.vertex_of_elem(g.simple(1)).unwrap();
        assert_eq!(b.sheaf.stalk_degrees(y), &[0, 2]);
        assert!(verify_axioms(&b.sheaf, DegreePolicy::default())
            .unwrap()
            .passed());
        assert!(b.sheaf.is_flabby(6).unwrap());
    }

    #[test]
    fn injected_generator_is_caught() {
        let g = WeylGroup::parse_type("A2").unwrap();
        let graph = Arc::new(bruhat_lower_graph(&g, &[], g.longest()).unwrap());
        let b = build_bmp(graph.clone(), Rationals, DegreePolicy::default()).unwrap();
        let x = graph.vertex_of_elem(g.simple(0)).unwrap();
        let mut stalks = b.sheaf.stalks().to_vec();
        stalks[x].push(2);
        let restrictions = (0..graph.edges().len())
            .map(|e| {
                let mut m = b.sheaf.restriction(e).clone();
                let edge = graph.edge(e);
                if edge.tail == x {
                    for row in &mut m.entries {
                        row.push(crate::ring::Polynomial::zero(2));
                    }
                    m.cols += 1;
                }
                if edge.head == x {
                    m.entries
                        .push(vec![crate::ring::Polynomial::zero(2); m.cols]);
                    m.rows += 1;
                }
                m
            })
            .collect();
        let mutant = SheafData::new(graph, Rationals, stalks, restrictions).unwrap();
        let r = verify_axioms(&mutant, DegreePolicy::default()).unwrap();
        assert!(!r.passed());
        assert!(r.minimality_failures.contains(&(x, 2)));
    }

    #[test]
    fn gamma_divisibility_a2() {
        let g = WeylGroup::parse_type("A2").unwrap();
        let graph = Arc::new(bruhat_lower_graph(&g, &[], g.longest()).unwrap());
        let b = build_bmp(graph, Rationals, DegreePolicy::default()).unwrap();
        let r = gamma_divisibility_check(&g, &b, g.simple(0), 0, DegreePolicy::default()).unwrap();
        assert_eq!(r.vertices, 4);
        assert!(r.divisible(), "{r:?}");
    }

    #[test]
    fn non_unique_maximum_is_rejected() {
        let v = |w: &str| Vertex {
            word: w.into(),
            length: 0,
            elem: None,
        };
        let g = Arc::new(MomentGraph::new(2, vec![v("a"), v("b")], vec![], &[]).unwrap());
        assert!(matches!(
            build_bmp(g, Rationals, DegreePolicy::default()),
            Err(Error::NonUniqueMaximum(2))
        ));
    }

    #[test]
    fn vanishing_label_is_rejected() {
        let g = WeylGroup::parse_type("G2").unwrap();
        let graph = Arc::new(bruhat_lower_graph(&g, &[], g.longest()).unwrap());
        let f3 = PrimeField::new(3).unwrap();
        let vanishing = !graph.is_k_moment_graph(&f3);
        let built = build_bmp(graph, f3, DegreePolicy::default());
        assert_eq!(vanishing, built.is_err());
    }

    #[test]
    fn divide_series() {
        assert_eq!(divide_by_one_plus_q(&[1, 2, 2, 2]), vec![1, 1, 1, 1]);
        assert_eq!(divide_by_one_plus_q(&[1, 0]), vec![1, -1]);
    }
}
