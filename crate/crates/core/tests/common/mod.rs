//! Independent oracles shared by the integration tests. None of these call
//! into the Bruhat order, KL recursion or elimination code under test.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use momentkit::graph::MomentGraph;
use momentkit::linalg::SparseVec;
use momentkit::{Elem, Field, WeylGroup};

pub fn group(t: &str) -> WeylGroup {
    WeylGroup::parse_type(t).unwrap()
}

pub fn w(g: &WeylGroup, word: &str) -> Elem {
    g.parse_word(word).unwrap()
}

/// Products of all subwords of one reduced word of `w`.
pub fn subword_set(g: &WeylGroup, w: Elem) -> HashSet<Elem> {
    let mut set = HashSet::from([g.identity()]);
    for &i in g.reduced_word(w) {
        let next: Vec<Elem> = set.iter().map(|&x| g.rmul_simple(x, i as usize)).collect();
        set.extend(next);
    }
    set
}

pub fn subword_leq(g: &WeylGroup, x: Elem, w: Elem) -> bool {
    subword_set(g, w).contains(&x)
}

/// Number of positive coroots sent to negative ones by the matrix of `w`.
pub fn inversions(g: &WeylGroup, w: Elem) -> u32 {
    g.roots()
        .coroots
        .iter()
        .filter(|c| g.act(w, c).iter().any(|&v| v < 0))
        .count() as u32
}

/// Minimal-length element of each coset `x W_J`, found by scanning the
/// coset generated by right multiplication.
pub fn coset_scan(g: &WeylGroup, j: &[usize]) -> BTreeSet<Elem> {
    let mut reps = BTreeSet::new();
    for &x in g.elements() {
        let mut coset = HashSet::from([x]);
        let mut frontier = vec![x];
        while let Some(y) = frontier.pop() {
            for &i in j {
                let z = g.rmul_simple(y, i);
                if coset.insert(z) {
                    frontier.push(z);
                }
            }
        }
        let min = coset
            .into_iter()
            .min_by_key(|&z| (g.length(z), g.word(z)))
            .unwrap();
        reps.insert(min);
    }
    reps
}

type QPoly = Vec<i64>;

fn trim(mut p: QPoly) -> QPoly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn add_into(acc: &mut QPoly, p: &[i64], c: i64, shift: usize) {
    if acc.len() < p.len() + shift {
        acc.resize(p.len() + shift, 0);
    }
    for (k, &a) in p.iter().enumerate() {
        acc[k + shift] += c * a;
    }
}

fn mul(a: &[i64], b: &[i64]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// KL polynomials through R-polynomials:
/// `q^{ℓ(w)-ℓ(x)} P_{x,w}(q^{-1}) - P_{x,w} = Σ_{x<y<=w} R_{x,y} P_{y,w}`.
pub struct RPolyOracle<'g> {
    g: &'g WeylGroup,
    r: HashMap<(Elem, Elem), QPoly>,
    p: HashMap<(Elem, Elem), QPoly>,
}

impl<'g> RPolyOracle<'g> {
    pub fn new(g: &'g WeylGroup) -> Self {
        RPolyOracle {
            g,
            r: HashMap::new(),
            p: HashMap::new(),
        }
    }

    pub fn r(&mut self, x: Elem, w: Elem) -> QPoly {
        if let Some(v) = self.r.get(&(x, w)) {
            return v.clone();
        }
        let g = self.g;
        let v = match (0..g.rank()).find(|&s| g.is_right_descent(w, s)) {
            None => {
                if x == g.identity() {
                    vec![1]
                } else {
                    Vec::new()
                }
            }
            Some(s) => {
                let (xs, ws) = (g.rmul_simple(x, s), g.rmul_simple(w, s));
                if g.length(xs) < g.length(x) {
                    self.r(xs, ws)
                } else {
                    let mut acc = Vec::new();
                    add_into(&mut acc, &mul(&[-1, 1], &self.r(x, ws)), 1, 0);
                    add_into(&mut acc, &self.r(xs, ws), 1, 1);
                    trim(acc)
                }
            }
        };
        self.r.insert((x, w), v.clone());
        v
    }

    pub fn below(&mut self, x: Elem, w: Elem) -> bool {
        !self.r(x, w).is_empty()
    }

    pub fn p(&mut self, x: Elem, w: Elem) -> QPoly {
        if !self.p.contains_key(&(x, w)) {
            self.fill_column(w);
        }
        self.p[&(x, w)].clone()
    }

    fn fill_column(&mut self, w: Elem) {
        let g = self.g;
        let mut xs: Vec<Elem> = g.elements().to_vec();
        xs.sort_by_key(|&x| std::cmp::Reverse(g.length(x)));
        for x in xs {
            let val = if !self.below(x, w) {
                Vec::new()
            } else if x == w {
                vec![1]
            } else {
                let l = (g.length(w) - g.length(x)) as usize;
                let mut sum = Vec::new();
                for &y in g.elements() {
                    if y == x || !self.below(x, y) || !self.below(y, w) {
                        continue;
                    }
                    let ryx = self.r(x, y);
                    let pyw = self.p[&(y, w)].clone();
                    add_into(&mut sum, &mul(&ryx, &pyw), 1, 0);
                }
                trim(
                    sum.iter()
                        .enumerate()
                        .map(|(k, &c)| if 2 * k < l { -c } else { 0 })
                        .collect(),
                )
            };
            self.p.insert((x, w), val);
        }
    }
}

/// Rank of a sparse system by dense Gaussian elimination.
pub fn dense_rank<F: Field>(rows: &[SparseVec<F::Elem>], ncols: usize, field: &F) -> usize {
    let mut m: Vec<Vec<F::Elem>> = rows
        .iter()
        .map(|r| {
            let mut d = vec![field.zero(); ncols];
            for (c, v) in r {
                d[*c] = v.clone();
            }
            d
        })
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&i| !field.is_zero(&m[i][col])) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = field.inv(&m[rank][col]).unwrap();
        for i in 0..m.len() {
            if i != rank && !field.is_zero(&m[i][col]) {
                let c = field.mul(&m[i][col], &inv);
                for k in 0..ncols {
                    let t = field.mul(&c, &m[rank][k]);
                    m[i][k] = field.sub(&m[i][k], &t);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether two integer vectors are independent modulo `p` (`p = 0` for the
/// rationals), by 2x2 minors.
pub fn independent_mod(a: &[i64], b: &[i64], p: i64) -> bool {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let m = a[i] * b[j] - a[j] * b[i];
            let nonzero = if p == 0 { m != 0 } else { m.rem_euclid(p) != 0 };
            if nonzero {
                return true;
            }
        }
    }
    false
}

/// GKM by scanning every vertex and every pair of incident edges.
pub fn gkm_by_minor_scan(graph: &MomentGraph, p: i64) -> bool {
    for v in 0..graph.num_vertices() {
        let labels: Vec<&Vec<i64>> = graph
            .edges()
            .iter()
            .filter(|e| e.tail == v || e.head == v)
            .map(|e| &e.label)
            .collect();
        for i in 0..labels.len() {
            for j in i + 1..labels.len() {
                if !independent_mod(labels[i], labels[j], p) {
                    return false;
                }
            }
        }
    }
    true
}
