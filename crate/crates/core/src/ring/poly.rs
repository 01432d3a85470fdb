//! Sparse polynomials in `S_k = Sym(Y_k)` with every variable in degree 2.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::field::Field;
use crate::error::{Error, Result};

/// An exponent vector. Ordered graded-lexicographically: lower total degree
/// first, and inside one degree `x1` before `x2` (higher powers of earlier
/// variables first).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// Polynomial degree, i.e. twice the total exponent.
    pub fn degree(&self) -> u32 {
        2 * self.total()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn times_var(&self, i: usize) -> Monomial {
        let mut e = self.0.clone();
        e[i] += 1;
        Monomial(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of polynomial degree `degree` in `nvars` variables, in
/// graded-lex order.
pub fn monomial_basis(degree: u32, nvars: usize) -> Result<Vec<Monomial>> {
    if degree % 2 != 0 {
        return Err(Error::OddDegree(degree));
    }
    let total = degree / 2;
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fill_compositions(total, 0, &mut cur, &mut out);
    Ok(out)
}

fn fill_compositions(remaining: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    let n = cur.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = remaining;
        out.push(Monomial(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        fill_compositions(remaining - a, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Number of monomials of polynomial degree `degree` in `nvars` variables.
pub fn monomial_count(degree: u32, nvars: usize) -> usize {
    if degree % 2 != 0 {
        return 0;
    }
    if nvars == 0 {
        return usize::from(degree == 0);
    }
    binomial(degree as usize / 2 + nvars - 1, nvars - 1)
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// A sparse polynomial with coefficients in `F`. No stored coefficient is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial<F: Field> {
    nvars: usize,
    terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> fmt::Debug for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms.iter().map(|(m, c)| (&m.0, c)))
            .finish()
    }
}

impl<F: Field> Polynomial<F> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &F, nvars: usize, c: F::Elem) -> Self {
        Self::monomial(field, Monomial::one(nvars), c)
    }

    pub fn one(field: &F, nvars: usize) -> Self {
        Self::constant(field, nvars, field.one())
    }

    pub fn monomial(field: &F, m: Monomial, c: F::Elem) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !field.is_zero(&c) {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn var(field: &F, nvars: usize, i: usize) -> Self {
        Self::monomial(field, Monomial::var(nvars, i), field.one())
    }

    /// The linear form `sum_i v_i x_i` for a lattice vector `v`.
    pub fn linear(field: &F, v: &[i64]) -> Self {
        let n = v.len();
        let mut p = Polynomial::zero(n);
        for (i, &c) in v.iter().enumerate() {
            p.add_term(field, Monomial::var(n, i), field.from_i64(c));
        }
        p
    }

    pub fn from_terms(
        field: &F,
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, F::Elem)>,
    ) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            p.add_term(field, m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F::Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&F::Elem> {
        self.terms.get(m)
    }

    /// `Some(d)` when every term has polynomial degree `d`; `None` for the
    /// zero polynomial or an inhomogeneous one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let d = it.next()?.degree();
        it.all(|m| m.degree() == d).then_some(d)
    }

    pub fn add_term(&mut self, field: &F, m: Monomial, c: F::Elem) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if field.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = field.add(existing, &c);
                if field.is_zero(existing) {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::RankMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self, field: &F) -> Result<Self> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(field, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self, field: &F) -> Result<Self> {
        self.add(&other.negate(field), field)
    }

    pub fn negate(&self, field: &F) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), field.neg(c)))
                .collect(),
        }
    }

    pub fn scalar_mul(&self, c: &F::Elem, field: &F) -> Self {
        if field.is_zero(c) {
            return Polynomial::zero(self.nvars);
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, a) in &self.terms {
            out.add_term(field, m.clone(), field.mul(c, a));
        }
        out
    }

    pub fn mul(&self, other: &Self, field: &F) -> Result<Self> {
        self.check_rank(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(field, m1.mul(m2), field.mul(c1, c2));
            }
        }
        Ok(out)
    }

    pub fn mul_monomial(&self, m: &Monomial, field: &F) -> Self {
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            out.add_term(field, m1.mul(m), c1.clone());
        }
        out
    }

    /// Ring automorphism extending the linear map with matrix `g` on `Y_k`:
    /// each variable `x_i` (the basis vector `e_i`) goes to column `i` of `g`.
    /// Composing, `twist(twist(p, h), g) = twist(p, g * h)`.
    pub fn twist_by_automorphism(&self, g: &[Vec<i64>], field: &F) -> Result<Self> {
        let n = self.nvars;
        if g.len() != n || g.iter().any(|row| row.len() != n) {
            return Err(Error::RankMismatch(n, g.len()));
        }
        let fm: Vec<Vec<F::Elem>> = g
            .iter()
            .map(|row| row.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        if super::linalg_small::determinant(&fm, field).map_or(true, |d| field.is_zero(&d)) {
            return Err(Error::SingularMatrix);
        }
        Ok(self.twist_by_field_matrix(&fm, field))
    }

    /// As [`twist_by_automorphism`](Self::twist_by_automorphism) with a matrix
    /// already over `k`. Invertibility is the caller's concern.
    pub fn twist_by_field_matrix(&self, g: &[Vec<F::Elem>], field: &F) -> Self {
        let n = self.nvars;
        let images: Vec<Polynomial<F>> = (0..n)
            .map(|i| {
                let mut p = Polynomial::zero(n);
                for (r, row) in g.iter().enumerate() {
                    p.add_term(field, Monomial::var(n, r), row[i].clone());
                }
                p
            })
            .collect();
        let mut out = Polynomial::zero(n);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(field, n, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&images[i], field).expect("same rank");
                }
            }
            out = out.add(&term, field).expect("same rank");
        }
        out
    }

    /// Sparse sum in graded-lex order, low degree first: `1 + x1 - 3*x2^2`.
    pub fn display(&self, field: &F) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let (num, den) = field.to_fraction(c);
            let negative = num.is_negative();
            let abs_num = num.abs();
            if idx == 0 {
                if negative {
                    s.push('-');
                }
            } else {
                s.push_str(if negative { " - " } else { " + " });
            }
            let is_const = m.total() == 0;
            let unit = abs_num.is_one() && den.is_one();
            if !unit || is_const {
                if den.is_one() {
                    s.push_str(&abs_num.to_string());
                } else {
                    s.push_str(&format!("{abs_num}/{den}"));
                }
                if !is_const {
                    s.push('*');
                }
            }
            let mut first = true;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    s.push('*');
                }
                first = false;
                s.push_str(&format!("x{}", i + 1));
                if e > 1 {
                    s.push_str(&format!("^{e}"));
                }
            }
        }
        s
    }

    pub fn to_json_terms(&self, field: &F) -> Result<Vec<PolyTermJson>> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let (n, d) = field.to_fraction(c);
                Ok(PolyTermJson {
                    exponents: m.0.clone(),
                    numerator: bigint_to_i64(&n)?,
                    denominator: bigint_to_i64(&d)?,
                })
            })
            .collect()
    }

    pub fn from_json_terms(field: &F, nvars: usize, terms: &[PolyTermJson]) -> Result<Self> {
        let mut p = Polynomial::zero(nvars);
        for t in terms {
            if t.exponents.len() != nvars {
                return Err(Error::RankMismatch(nvars, t.exponents.len()));
            }
            if t.exponents.iter().any(|&e| e > MAX_JSON_EXPONENT) {
                return Err(Error::Parse("exponent too large".into()));
            }
            let c =
                field.from_fraction(&BigInt::from(t.numerator), &BigInt::from(t.denominator))?;
            p.add_term(field, Monomial(t.exponents.clone()), c);
        }
        Ok(p)
    }
}

const MAX_JSON_EXPONENT: u32 = 64;

fn bigint_to_i64(v: &BigInt) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::Parse(format!("coefficient {v} does not fit in 64 bits")))
}

/// One term of a serialized polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub exponents: Vec<u32>,
    pub numerator: i64,
    pub denominator: i64,
}

/// Canonical reduction modulo a nonzero linear form `l`: the pivot variable
/// (least index whose coefficient is a unit in `k`) is eliminated by
/// substituting its solved expression in the remaining variables.
#[derive(Clone)]
pub struct LinearReducer<F: Field> {
    nvars: usize,
    pivot: usize,
    /// `x_pivot = sum_j subst[j] x_j` modulo `l`; `subst[pivot] = 0`.
    subst: Vec<F::Elem>,
    /// Reductions of powers of the pivot variable, `pivot_powers[a] = subst^a`.
    pivot_powers: std::sync::Arc<std::sync::Mutex<Vec<Polynomial<F>>>>,
    field: F,
}

impl<F: Field> fmt::Debug for LinearReducer<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearReducer")
            .field("pivot", &self.pivot)
            .field("subst", &self.subst)
            .finish()
    }
}

impl<F: Field> LinearReducer<F> {
    pub fn new(field: &F, label: &[i64]) -> Result<Self> {
        let coeffs: Vec<F::Elem> = label.iter().map(|&v| field.from_i64(v)).collect();
        Self::from_field_form(field, coeffs)
    }

    pub fn from_field_form(field: &F, coeffs: Vec<F::Elem>) -> Result<Self> {
        let nvars = coeffs.len();
        let pivot = coeffs
            .iter()
            .position(|c| !field.is_zero(c))
            .ok_or(Error::VanishingLinearForm)?;
        let inv = field.inv(&coeffs[pivot]).expect("nonzero in a field");
        let minus_inv = field.neg(&inv);
        let subst = coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j == pivot {
                    field.zero()
                } else {
                    field.mul(&minus_inv, c)
                }
            })
            .collect();
        Ok(LinearReducer {
            nvars,
            pivot,
            subst,
            pivot_powers: Default::default(),
            field: field.clone(),
        })
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    fn pivot_power(&self, a: u32) -> Polynomial<F> {
        let mut cache = self.pivot_powers.lock().expect("reducer cache poisoned");
        if cache.is_empty() {
            cache.push(Polynomial::one(&self.field, self.nvars));
        }
        let mut lin = Polynomial::zero(self.nvars);
        for (j, c) in self.subst.iter().enumerate() {
            lin.add_term(&self.field, Monomial::var(self.nvars, j), c.clone());
        }
        while cache.len() <= a as usize {
            let next = cache
                .last()
                .unwrap()
                .mul(&lin, &self.field)
                .expect("same rank");
            cache.push(next);
        }
        cache[a as usize].clone()
    }

    /// Reduction of a single monomial.
    pub fn reduce_monomial(&self, m: &Monomial) -> Polynomial<F> {
        let a = m.0[self.pivot];
        if a == 0 {
            return Polynomial::monomial(&self.field, m.clone(), self.field.one());
        }
        let mut rest = m.clone();
        rest.0[self.pivot] = 0;
        self.pivot_power(a).mul_monomial(&rest, &self.field)
    }

    pub fn reduce(&self, p: &Polynomial<F>) -> Result<Polynomial<F>> {
        if p.nvars() != self.nvars {
            return Err(Error::RankMismatch(self.nvars, p.nvars()));
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in p.terms() {
            if m.0[self.pivot] == 0 {
                out.add_term(&self.field, m.clone(), c.clone());
            } else {
                for (m2, c2) in self.reduce_monomial(m).terms() {
                    out.add_term(&self.field, m2.clone(), self.field.mul(c, c2));
                }
            }
        }
        Ok(out)
    }

    /// Monomials of degree `degree` free of the pivot variable: a basis of
    /// the degree slice of `S_k / (l)`.
    pub fn quotient_basis(&self, degree: u32) -> Result<Vec<Monomial>> {
        Ok(monomial_basis(degree, self.nvars)?
            .into_iter()
            .filter(|m| m.0[self.pivot] == 0)
            .collect())
    }
}

/// Canonical representative of `p` in `S_k / (l)`.
pub fn reduce_mod_linear<F: Field>(
    p: &Polynomial<F>,
    label: &[i64],
    field: &F,
) -> Result<Polynomial<F>> {
    LinearReducer::new(field, label)?.reduce(p)
}

/// Index lookup for an ordered monomial basis.
pub(crate) fn index_basis(basis: &[Monomial]) -> HashMap<Monomial, usize> {
    basis
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect()
}
