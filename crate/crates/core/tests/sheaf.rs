mod common;

use std::collections::HashMap;
use std::sync::Arc;

use momentkit::bmp::{build_bmp, verify_axioms, DegreePolicy};
use momentkit::graph::{bruhat_graph, bruhat_lower_graph, inverse_automorphism, MGMorphism, MomentGraph};
use momentkit::linalg::SparseVec;
use momentkit::sheaf::{cs_element, is_structure_element, pullback, RestrictionMatrix, Section, SheafData, StructureElement};
use momentkit::{Elem, Field, Polynomial, PrimeField, Rationals, WeylGroup};

use common::{dense_rank, group, w};

fn constant_sheaf<F: Field>(graph: MomentGraph, field: F) -> SheafData<F> {
    let n = graph.rank();
    let stalks = vec![vec![0]; graph.num_vertices()];
    let restrictions = graph.edges().iter().map(|_| RestrictionMatrix::identity(1, n, &field)).collect();
    SheafData::new(Arc::new(graph), field, stalks, restrictions).unwrap()
}

/// Coefficients of `Σ_{x<=w} q^{ℓ(x)} / (1-q)^n` up to `q^len`.
fn free_series(g: &WeylGroup, top: Elem, len: usize) -> Vec<usize> {
    let mut p = vec![0usize; len];
    for x in g.lower_interval(top) {
        if (g.length(x) as usize) < len {
            p[g.length(x) as usize] += 1;
        }
    }
    for _ in 0..g.rank() {
        for k in 1..len {
            p[k] += p[k - 1];
        }
    }
    p
}

/// The structure algebra of a Schubert moment graph is free over the
/// symmetric algebra with Poincaré polynomial `Σ_{x<=w} q^{ℓ(x)}`.
fn structure_algebra_series<F: Field>(t: &str, field: F, dmax: u32) {
    let g = group(t);
    for &top in g.elements() {
        let graph = bruhat_lower_graph(&g, &[], top).unwrap();
        if !graph.is_gkm_pair(&field) {
            continue;
        }
        let all: Vec<usize> = (0..graph.num_vertices()).collect();
        let sheaf = constant_sheaf(graph, field.clone());
        let h = sheaf.hilbert_series(&all, dmax).unwrap();
        assert_eq!(h, free_series(&g, top, h.len()), "{t} w={}", g.word(top));
    }
}

#[test]
fn structure_algebras_are_free() {
    structure_algebra_series("A2", Rationals, 8);
    structure_algebra_series("B2", Rationals, 8);
    structure_algebra_series("A2", PrimeField::new(3).unwrap(), 8);
    structure_algebra_series("A3", Rationals, 4);
}

#[test]
fn kernel_dimensions_match_dense_elimination() {
    let q = Rationals;
    let g = group("A3");
    for word in ["2132", "123", "1321", "21321"] {
        let graph = Arc::new(bruhat_lower_graph(&g, &[], w(&g, word)).unwrap());
        let b = build_bmp(graph.clone(), q, DegreePolicy::default()).unwrap();
        let all: Vec<usize> = (0..graph.num_vertices()).collect();
        for d in (0..=6).step_by(2) {
            let sys = b.sheaf.section_system(&all, d).unwrap();
            let want = sys.ncols - dense_rank(&sys.rows, sys.ncols, &q);
            let slice = b.sheaf.sections_slice(&all, d).unwrap();
            assert_eq!(slice.dim(), want, "{word} d={d}");
            for s in slice.sections(&b.sheaf) {
                assert!(b.sheaf.check_section(&s).unwrap());
                assert_eq!(s.degree, d);
            }
            // any proper subset of vertices also gives a kernel of the right size
            let some: Vec<usize> = all.iter().copied().filter(|v| v % 2 == 0).collect();
            let sys = b.sheaf.section_system(&some, d).unwrap();
            assert_eq!(b.sheaf.sections_slice(&some, d).unwrap().dim(), sys.ncols - dense_rank(&sys.rows, sys.ncols, &q));
        }
        assert_eq!(b.sheaf.sections_slice(&all, 3).unwrap().dim(), 0);
    }
}

#[test]
fn tampered_sections_fail_the_check() {
    let q = Rationals;
    let g = group("A2");
    let graph = bruhat_graph(&g, &[]).unwrap();
    let sheaf = constant_sheaf(graph, q);
    let all: Vec<usize> = (0..6).collect();
    let slice = sheaf.sections_slice(&all, 2).unwrap();
    let mut s = slice.sections(&sheaf).into_iter().next().unwrap();
    let comp = s.components.get_mut(&0).unwrap();
    comp[0] = comp[0].add(&Polynomial::var(&q, 2, 0), &q).unwrap();
    assert!(!sheaf.check_section(&s).unwrap());
}

#[test]
fn cs_elements() {
    let q = Rationals;
    let g = group("A2");
    let graph = bruhat_graph(&g, &[]).unwrap();
    let c1 = cs_element(&g, &graph, 0, &q).unwrap();
    let at = |z: &StructureElement<Rationals>, word: &str| z.components[graph.vertex_of_elem(w(&g, word)).unwrap()].clone();
    assert_eq!(at(&c1, ""), Polynomial::linear(&q, &[1, 0]));
    assert_eq!(at(&c1, "1"), Polynomial::linear(&q, &[-1, 0]));
    assert_eq!(at(&c1, "2"), Polynomial::linear(&q, &[1, 1]));
    assert!(cs_element(&g, &graph, 2, &q).is_err());
    // α̌1 placed at the identity only is not a global element
    let mut z = StructureElement { components: vec![Polynomial::zero(2); 6] };
    z.components[graph.vertex_of_elem(g.identity()).unwrap()] = Polynomial::linear(&q, &[1, 0]);
    assert!(!is_structure_element(&z, &graph, &q));
    let f5 = PrimeField::new(5).unwrap();
    let a3 = group("A3");
    let full = bruhat_graph(&a3, &[]).unwrap();
    for s in 0..3 {
        let c = cs_element(&a3, &full, s, &f5).unwrap();
        assert!(is_structure_element(&c, &full, &f5));
        assert_eq!(c.degree(), 2);
    }
}

/// Flattens sections into vectors indexed by (vertex, generator, monomial).
fn coordinates<F: Field>(sections: &[Section<F>]) -> (Vec<SparseVec<F::Elem>>, usize) {
    let mut index = HashMap::new();
    let rows = sections
        .iter()
        .map(|s| {
            let mut row = Vec::new();
            for (&v, comps) in &s.components {
                for (j, p) in comps.iter().enumerate() {
                    for (m, c) in p.terms() {
                        let n = index.len();
                        let col = *index.entry((v, j, m.clone())).or_insert(n);
                        row.push((col, c.clone()));
                    }
                }
            }
            row.sort_by_key(|&(c, _)| c);
            row
        })
        .collect();
    (rows, index.len())
}

#[test]
fn structure_action_on_sections() {
    let q = Rationals;
    let g = group("A3");
    let graph = Arc::new(bruhat_lower_graph(&g, &[], w(&g, "2132")).unwrap());
    let b = build_bmp(graph.clone(), q, DegreePolicy::default()).unwrap();
    let all: Vec<usize> = (0..graph.num_vertices()).collect();
    let sections = b.sheaf.sections_slice(&all, 2).unwrap().sections(&b.sheaf);
    assert!(!sections.is_empty());
    let one = StructureElement::constant(&graph, &q, q.one());
    let c1 = cs_element(&g, &graph, 0, &q).unwrap();
    let c2 = cs_element(&g, &graph, 1, &q).unwrap();
    let mut images = Vec::new();
    for s in &sections {
        assert_eq!(&one.act(s, &q).unwrap(), s);
        let img = c1.act(s, &q).unwrap();
        assert_eq!(img.degree, 4);
        assert!(b.sheaf.check_section(&img).unwrap());
        let lhs = c1.mul(&c2, &q).unwrap().act(s, &q).unwrap();
        assert_eq!(lhs, c1.act(&c2.act(s, &q).unwrap(), &q).unwrap());
        images.push(img);
    }
    let (rows, ncols) = coordinates(&images);
    assert_eq!(dense_rank(&rows, ncols, &q), sections.len());
}

#[test]
fn pullbacks() {
    let q = Rationals;
    let g = group("A2");
    let graph = Arc::new(bruhat_graph(&g, &[]).unwrap());
    let b = build_bmp(graph.clone(), q, DegreePolicy::default()).unwrap();
    let id = MGMorphism::identity(&graph);
    assert_eq!(pullback(&id, graph.clone(), &b.sheaf).unwrap(), b.sheaf);
    let inv = inverse_automorphism(&g, &graph).unwrap();
    let p = pullback(&inv, graph.clone(), &b.sheaf).unwrap();
    assert!(verify_axioms(&p, DegreePolicy::default()).unwrap().passed());
    for v in 0..graph.num_vertices() {
        assert_eq!(p.stalk_degrees(v), b.sheaf.stalk_degrees(v));
    }
    let all: Vec<usize> = (0..graph.num_vertices()).collect();
    assert_eq!(p.hilbert_series(&all, 6).unwrap(), b.sheaf.hilbert_series(&all, 6).unwrap());
    let mut bad = inv.clone();
    bad.vertex_map.swap(1, 2);
    assert!(pullback(&bad, graph, &b.sheaf).is_err());
}

#[test]
fn json_round_trip() {
    let f3 = PrimeField::new(3).unwrap();
    let g = group("A3");
    let graph = Arc::new(bruhat_lower_graph(&g, &[], w(&g, "2132")).unwrap());
    let b = build_bmp(graph, f3.clone(), DegreePolicy::default()).unwrap();
    let text = b.sheaf.to_json().unwrap();
    let back = SheafData::from_json(&text, &f3).unwrap();
    assert_eq!(back.to_json().unwrap(), text);
    assert!(SheafData::from_json(&text, &Rationals).is_err());
    assert!(SheafData::from_json("[]", &f3).is_err());
}
