//! Kazhdan–Lusztig polynomials, ordinary and parabolic.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::coxeter::{Elem, WeylGroup};
use crate::error::{Error, Result};

/// A polynomial in `q` with integer coefficients, lowest degree first and
/// no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KLPolynomial {
    pub coeffs: Vec<i64>,
}

impl KLPolynomial {
    pub fn zero() -> Self {
        KLPolynomial::default()
    }

    pub fn one() -> Self {
        KLPolynomial { coeffs: vec![1] }
    }

    pub fn from_coeffs(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        KLPolynomial { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    /// `self + c q^shift other`.
    fn add_shifted(&mut self, other: &KLPolynomial, c: i64, shift: usize) {
        if other.coeffs.is_empty() || c == 0 {
            return;
        }
        if self.coeffs.len() < other.coeffs.len() + shift {
            self.coeffs.resize(other.coeffs.len() + shift, 0);
        }
        for (k, &a) in other.coeffs.iter().enumerate() {
            self.coeffs[k + shift] += c * a;
        }
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }
}

impl fmt::Display for KLPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_q_polynomial(&self.coeffs))
    }
}

/// `1+2q+q^2` style, lowest degree first; `0` when empty.
pub fn format_q_polynomial(coeffs: &[i64]) -> String {
    let mut s = String::new();
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if c < 0 {
            s.push('-');
        } else if !s.is_empty() {
            s.push('+');
        }
        let a = c.unsigned_abs();
        match k {
            0 => s.push_str(&a.to_string()),
            _ => {
                if a != 1 {
                    s.push_str(&a.to_string());
                }
                s.push('q');
                if k > 1 {
                    s.push_str(&format!("^{k}"));
                }
            }
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Memoised polynomials `P_{y,w}`, computed a column `P_{-,w}` at a time.
pub struct KazhdanLusztig<'g> {
    group: &'g WeylGroup,
    columns: Mutex<HashMap<Elem, Arc<Vec<KLPolynomial>>>>,
}

impl<'g> KazhdanLusztig<'g> {
    pub fn new(group: &'g WeylGroup) -> Self {
        KazhdanLusztig {
            group,
            columns: Mutex::new(HashMap::new()),
        }
    }

    pub fn group(&self) -> &'g WeylGroup {
        self.group
    }

    pub fn kl(&self, y: Elem, w: Elem) -> KLPolynomial {
        self.column(w)[y.idx()].clone()
    }

    /// `P_{y,w}` for every `y`, indexed by element.
    pub fn column(&self, w: Elem) -> Arc<Vec<KLPolynomial>> {
        if let Some(c) = self.columns.lock().expect("kl lock").get(&w) {
            return c.clone();
        }
        let s = (0..self.group.rank()).find(|&s| self.group.is_left_descent(w, s));
        let col = Arc::new(match s {
            None => self.identity_column(),
            Some(s) => self.column_via(w, s),
        });
        self.columns.lock().expect("kl lock").insert(w, col.clone());
        col
    }

    fn identity_column(&self) -> Vec<KLPolynomial> {
        let mut col = vec![KLPolynomial::zero(); self.group.order()];
        col[self.group.identity().idx()] = KLPolynomial::one();
        col
    }

    /// The column of `w` through the left descent `s` (requires `sw < w`):
    /// `P_{y,w} = q^{1-c} P_{sy,v} + q^c P_{y,v} - Σ_z μ(z,v) q^{(ℓ(w)-ℓ(z))/2} P_{y,z}`
    /// with `v = sw`, `c = [sy < y]`, and `z` over `y <= z < v` with `sz < z`.
    pub fn column_via(&self, w: Elem, s: usize) -> Vec<KLPolynomial> {
        let g = self.group;
        assert!(g.is_left_descent(w, s), "column_via needs a left descent");
        let si = g.simple(s);
        let v = g.mul(si, w);
        let pv = self.column(v);
        let lw = g.length(w);
        let terms: Vec<(i64, usize, Arc<Vec<KLPolynomial>>)> = g
            .lower_interval(v)
            .into_iter()
            .filter(|&z| z != v && g.is_left_descent(z, s))
            .filter_map(|z| {
                let m = self.mu(z, v);
                (m != 0).then(|| (m, ((lw - g.length(z)) / 2) as usize, self.column(z)))
            })
            .collect();
        let mut col = vec![KLPolynomial::zero(); g.order()];
        for &y in g.elements() {
            if !g.bruhat_leq(y, w) {
                continue;
            }
            let sy = g.mul(si, y);
            let c = usize::from(g.length(sy) < g.length(y));
            let mut p = KLPolynomial::zero();
            p.add_shifted(&pv[sy.idx()], 1, 1 - c);
            p.add_shifted(&pv[y.idx()], 1, c);
            for (m, shift, pz) in &terms {
                p.add_shifted(&pz[y.idx()], -m, *shift);
            }
            col[y.idx()] = p;
        }
        col
    }

    /// Coefficient of `q^{(ℓ(v)-ℓ(z)-1)/2}` in `P_{z,v}`; 0 unless the
    /// exponent is a nonnegative integer.
    pub fn mu(&self, z: Elem, v: Elem) -> i64 {
        let (lz, lv) = (self.group.length(z), self.group.length(v));
        if lv <= lz || (lv - lz) % 2 == 0 {
            return 0;
        }
        self.kl(z, v).coeff(((lv - lz - 1) / 2) as usize)
    }

    /// `P^{J,-1}_{y,w} = P_{y w_J, w w_J}` for minimal representatives.
    pub fn parabolic_kl(&self, j: &[usize], y: Elem, w: Elem) -> Result<KLPolynomial> {
        let g = self.group;
        let q = g.min_coset_reps(j)?;
        for x in [y, w] {
            if !g.is_min_rep(x, &q.j) {
                return Err(Error::Precondition(format!(
                    "{} is not a minimal coset representative",
                    g.word_or_e(x)
                )));
            }
        }
        Ok(self.kl(g.mul(y, q.w_j), g.mul(w, q.w_j)))
    }

    /// Exhaustive check of inversion symmetry, `P_{y,w} = P_{ys,ws}` when
    /// `y` is not below `ws`, and `P_{y,w} = P_{ys,w}` when `ws < w`.
    pub fn verify_identities(&self) -> IdentityReport {
        let g = self.group;
        let mut report = IdentityReport::default();
        let name = |x: Elem| g.word_or_e(x);
        for &w in g.elements() {
            let col = self.column(w);
            let col_inv = self.column(g.inv(w));
            for &y in g.elements() {
                report.checked[0] += 1;
                if col[y.idx()] != col_inv[g.inv(y).idx()] {
                    report.violations.push(format!(
                        "inversion fails at y={}, w={}",
                        name(y),
                        name(w)
                    ));
                }
                for s in 0..g.rank() {
                    if !g.is_right_descent(w, s) {
                        continue;
                    }
                    let (ys, ws) = (g.rmul_simple(y, s), g.rmul_simple(w, s));
                    report.checked[2] += 1;
                    if col[y.idx()] != col[ys.idx()] {
                        report.violations.push(format!(
                            "P(y,w)=P(ys,w) fails at y={}, w={}, s={}",
                            name(y),
                            name(w),
                            s + 1
                        ));
                    }
                    if g.bruhat_leq(y, w) && !g.bruhat_leq(y, ws) {
                        report.checked[1] += 1;
                        if col[y.idx()] != self.kl(ys, ws) {
                            report.violations.push(format!(
                                "P(y,w)=P(ys,ws) fails at y={}, w={}, s={}",
                                name(y),
                                name(w),
                                s + 1
                            ));
                        }
                    }
                }
            }
        }
        report
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdentityReport {
    /// Instances checked for each of the three identities.
    pub checked: [usize; 3],
    pub violations: Vec<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}
