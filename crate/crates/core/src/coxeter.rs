//! Finite Weyl groups: root data, element arithmetic, length, Bruhat order,
//! reflections and parabolic quotients.
//!
//! Elements are stored once, as integer matrices acting on the coroot
//! lattice in the basis of simple coroots, and addressed by [`Elem`] handles.
//! The simple reflection `s_i` acts by `s_i(l) = l - <alpha_i, l> coroot_i`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Integer matrix, row-major.
pub type IntMatrix = Vec<Vec<i64>>;

/// Largest group order handled.
pub const MAX_GROUP_ORDER: usize = 1152;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CartanType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    G2,
}

impl CartanType {
    pub fn rank(&self) -> usize {
        match *self {
            CartanType::A(n) | CartanType::B(n) | CartanType::C(n) | CartanType::D(n) => n,
            CartanType::G2 => 2,
        }
    }

    fn check_supported(&self) -> Result<()> {
        let ok = match *self {
            CartanType::A(n) => (1..=4).contains(&n),
            CartanType::B(n) | CartanType::C(n) => (2..=3).contains(&n),
            CartanType::D(n) => n == 4,
            CartanType::G2 => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedType(self.to_string()))
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanType::A(n) => write!(f, "A{n}"),
            CartanType::B(n) => write!(f, "B{n}"),
            CartanType::C(n) => write!(f, "C{n}"),
            CartanType::D(n) => write!(f, "D{n}"),
            CartanType::G2 => write!(f, "G2"),
        }
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unsupported = || Error::UnsupportedType(s.to_string());
        if s == "G2" {
            return Ok(CartanType::G2);
        }
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(unsupported)?;
        let digits = chars.as_str();
        if digits.is_empty() || digits.len() > 2 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unsupported());
        }
        let n: usize = digits.parse().map_err(|_| unsupported())?;
        let t = match letter {
            'A' => CartanType::A(n),
            'B' => CartanType::B(n),
            'C' => CartanType::C(n),
            'D' => CartanType::D(n),
            _ => return Err(unsupported()),
        };
        t.check_supported()?;
        Ok(t)
    }
}

/// A Cartan type together with its Cartan matrix `a_ij = <coroot_i, alpha_j>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanDatum {
    pub type_label: CartanType,
    pub cartan_matrix: IntMatrix,
}

impl CartanDatum {
    pub fn new(t: CartanType) -> Result<Self> {
        t.check_supported()?;
        let n = t.rank();
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let link = |a: &mut IntMatrix, i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match t {
            CartanType::A(_) => (0..n - 1).for_each(|i| link(&mut a, i, i + 1)),
            CartanType::B(_) => {
                (0..n - 1).for_each(|i| link(&mut a, i, i + 1));
                // last simple root short
                a[n - 1][n - 2] = -2;
            }
            CartanType::C(_) => {
                (0..n - 1).for_each(|i| link(&mut a, i, i + 1));
                a[n - 2][n - 1] = -2;
            }
            CartanType::D(_) => {
                (0..n - 2).for_each(|i| link(&mut a, i, i + 1));
                link(&mut a, n - 3, n - 1);
            }
            CartanType::G2 => {
                a[0][1] = -1;
                a[1][0] = -3;
            }
        }
        Ok(CartanDatum {
            type_label: t,
            cartan_matrix: a,
        })
    }

    /// Validates a generalised Cartan matrix. Finiteness is confirmed when the
    /// group is enumerated.
    pub fn from_matrix(type_label: CartanType, cartan_matrix: IntMatrix) -> Result<Self> {
        let n = cartan_matrix.len();
        if n == 0 || cartan_matrix.iter().any(|r| r.len() != n) {
            return Err(Error::NotFiniteType("matrix is not square".into()));
        }
        for i in 0..n {
            if cartan_matrix[i][i] != 2 {
                return Err(Error::NotFiniteType(format!("diagonal entry {i} is not 2")));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if cartan_matrix[i][j] > 0 {
                    return Err(Error::NotFiniteType(format!("entry ({i},{j}) is positive")));
                }
                if (cartan_matrix[i][j] == 0) != (cartan_matrix[j][i] == 0) {
                    return Err(Error::NotFiniteType(format!(
                        "zero pattern at ({i},{j}) is not symmetric"
                    )));
                }
                // finite types need a_ij * a_ji < 4
                if cartan_matrix[i][j] * cartan_matrix[j][i] >= 4 {
                    return Err(Error::NotFiniteType(format!(
                        "rank-2 subsystem ({i},{j}) is affine or hyperbolic"
                    )));
                }
            }
        }
        Ok(CartanDatum {
            type_label,
            cartan_matrix,
        })
    }

    pub fn rank(&self) -> usize {
        self.cartan_matrix.len()
    }
}

/// Positive roots in simple-root coordinates with their coroots in
/// simple-coroot coordinates.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub rank: usize,
    pub positive_roots: Vec<Vec<i64>>,
    pub coroots: Vec<Vec<i64>>,
}

impl RootSystem {
    pub fn new(datum: &CartanDatum) -> Result<Self> {
        let n = datum.rank();
        let a = &datum.cartan_matrix;
        let unit = |i: usize| -> Vec<i64> { (0..n).map(|j| i64::from(i == j)).collect() };
        let mut seen: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
        let mut queue: VecDeque<(Vec<i64>, Vec<i64>)> = VecDeque::new();
        for i in 0..n {
            seen.insert(unit(i), unit(i));
            queue.push_back((unit(i), unit(i)));
        }
        while let Some((root, coroot)) = queue.pop_front() {
            for i in 0..n {
                let r = reflect_root(a, i, &root);
                let c = reflect_coroot(a, i, &coroot);
                if r.iter().all(|&v| v >= 0) && !seen.contains_key(&r) {
                    if seen.len() > MAX_GROUP_ORDER {
                        return Err(Error::NotFiniteType("root system is infinite".into()));
                    }
                    seen.insert(r.clone(), c.clone());
                    queue.push_back((r, c));
                }
            }
        }
        let mut pairs: Vec<(Vec<i64>, Vec<i64>)> = seen.into_iter().collect();
        pairs.sort_by(|x, y| {
            let hx: i64 = x.0.iter().sum();
            let hy: i64 = y.0.iter().sum();
            hx.cmp(&hy).then_with(|| y.0.cmp(&x.0))
        });
        let (positive_roots, coroots) = pairs.into_iter().unzip();
        Ok(RootSystem {
            rank: n,
            positive_roots,
            coroots,
        })
    }

    pub fn coroot_of(&self, root: &[i64]) -> Option<&[i64]> {
        self.positive_roots
            .iter()
            .position(|r| r == root)
            .map(|i| self.coroots[i].as_slice())
    }
}

fn reflect_root(a: &IntMatrix, i: usize, root: &[i64]) -> Vec<i64> {
    // s_i(b) = b - <b, coroot_i> alpha_i,  <alpha_j, coroot_i> = a[i][j]
    let pairing: i64 = (0..root.len()).map(|j| a[i][j] * root[j]).sum();
    let mut out = root.to_vec();
    out[i] -= pairing;
    out
}

fn reflect_coroot(a: &IntMatrix, i: usize, lambda: &[i64]) -> Vec<i64> {
    // s_i(l) = l - <alpha_i, l> coroot_i,  <alpha_i, coroot_j> = a[j][i]
    let pairing: i64 = (0..lambda.len()).map(|j| a[j][i] * lambda[j]).sum();
    let mut out = lambda.to_vec();
    out[i] -= pairing;
    out
}

/// Handle to an element of a [`WeylGroup`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u32);

impl Elem {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reflection {
    pub element: Elem,
    pub positive_root: Vec<i64>,
    pub coroot: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicQuotient {
    /// Zero-based simple indices.
    pub j: Vec<usize>,
    pub min_reps: Vec<Elem>,
    pub subgroup: Vec<Elem>,
    pub w_j: Elem,
}

/// Outcome of the lifting-property check for `(u, v, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftingReport {
    pub us_below_u: bool,
    /// `us < u  =>  us < vs`; `None` when `us > u`.
    pub descent_clause: Option<bool>,
    /// `us > u  =>  us <= v and u <= vs`; `None` when `us < u`.
    pub ascent_clause: Option<bool>,
    pub us_leq_v: bool,
}

impl LiftingReport {
    pub fn holds(&self) -> bool {
        self.descent_clause.unwrap_or(true) && self.ascent_clause.unwrap_or(true) && self.us_leq_v
    }
}

/// A finite Weyl group with all elements enumerated. Immutable after
/// construction; the Bruhat order is precomputed.
#[derive(Clone)]
pub struct WeylGroup {
    datum: CartanDatum,
    roots: RootSystem,
    matrices: Vec<IntMatrix>,
    index: HashMap<IntMatrix, Elem>,
    lengths: Vec<u32>,
    words: Vec<Vec<u8>>,
    mul: Vec<u32>,
    inverse: Vec<Elem>,
    leq: Vec<bool>,
    reflections: Vec<Reflection>,
    reflection_of: HashMap<Elem, usize>,
    sorted: Vec<Elem>,
    identity: Elem,
}

impl fmt::Debug for WeylGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "WeylGroup({}, order {})",
            self.datum.type_label,
            self.order()
        )
    }
}

impl WeylGroup {
    pub fn from_type(t: CartanType) -> Result<Self> {
        Self::build(CartanDatum::new(t)?)
    }

    pub fn parse_type(s: &str) -> Result<Self> {
        Self::from_type(s.parse()?)
    }

    /// Enumerates the group generated by the simple reflections.
    pub fn build(datum: CartanDatum) -> Result<Self> {
        let n = datum.rank();
        if n > 9 {
            return Err(Error::UnsupportedType(format!(
                "rank {n} exceeds the word alphabet"
            )));
        }
        let a = &datum.cartan_matrix;
        let gens: Vec<IntMatrix> = (0..n)
            .map(|i| {
                let mut m = identity(n);
                for c in 0..n {
                    m[i][c] -= a[c][i];
                }
                m
            })
            .collect();
        let roots = RootSystem::new(&datum)?;

        let mut matrices = vec![identity(n)];
        let mut index = HashMap::new();
        index.insert(identity(n), Elem(0));
        // BFS parent: element = parent * s_i
        let mut parent: Vec<Option<(Elem, usize)>> = vec![None];
        let mut head = 0;
        while head < matrices.len() {
            let cur = matrices[head].clone();
            for (i, g) in gens.iter().enumerate() {
                let next = matmul(&cur, g);
                if !index.contains_key(&next) {
                    if matrices.len() >= MAX_GROUP_ORDER {
                        return Err(Error::NotFiniteType(format!(
                            "group generated by {} has more than {MAX_GROUP_ORDER} elements",
                            datum.type_label
                        )));
                    }
                    index.insert(next.clone(), Elem(matrices.len() as u32));
                    matrices.push(next);
                    parent.push(Some((Elem(head as u32), i)));
                }
            }
            head += 1;
        }
        let order = matrices.len();

        let neg_coroot = |m: &IntMatrix, c: &[i64]| -> bool {
            let img = matvec(m, c);
            img.iter().all(|&v| v <= 0)
        };
        let lengths: Vec<u32> = matrices
            .iter()
            .map(|m| roots.coroots.iter().filter(|c| neg_coroot(m, c)).count() as u32)
            .collect();

        // multiplication table, filled along BFS parents: a * (b' s) = (a b') s
        let mut mul = vec![u32::MAX; order * order];
        let mut rmul_simple = vec![0u32; order * n];
        for (e, m) in matrices.iter().enumerate() {
            for (i, g) in gens.iter().enumerate() {
                rmul_simple[e * n + i] = index[&matmul(m, g)].0;
            }
        }
        for a_idx in 0..order {
            mul[a_idx * order] = a_idx as u32;
        }
        for b in 1..order {
            let (bp, s) = parent[b].expect("non-identity has a parent");
            for a_idx in 0..order {
                let ab = mul[a_idx * order + bp.idx()];
                mul[a_idx * order + b] = rmul_simple[ab as usize * n + s];
            }
        }
        let inverse: Vec<Elem> = (0..order)
            .map(|a_idx| {
                let b = (0..order)
                    .find(|&b| mul[a_idx * order + b] == 0)
                    .expect("group has inverses");
                Elem(b as u32)
            })
            .collect();

        // lexicographically least reduced word, greedy on left descents
        let simple_idx: Vec<usize> = gens.iter().map(|g| index[g].idx()).collect();
        let left_simple = |e: usize, i: usize| -> usize { mul[simple_idx[i] * order + e] as usize };
        let mut words = vec![Vec::new(); order];
        let mut by_len: Vec<usize> = (0..order).collect();
        by_len.sort_by_key(|&e| lengths[e]);
        for &e in &by_len {
            if e == 0 {
                continue;
            }
            let i = (0..n)
                .find(|&i| lengths[left_simple(e, i)] < lengths[e])
                .expect("non-identity has a left descent");
            let rest = left_simple(e, i);
            let mut w = vec![i as u8];
            w.extend_from_slice(&words[rest]);
            words[e] = w;
        }

        let mut sorted: Vec<Elem> = (0..order as u32).map(Elem).collect();
        sorted.sort_by(|x, y| {
            lengths[x.idx()]
                .cmp(&lengths[y.idx()])
                .then_with(|| words[x.idx()].cmp(&words[y.idx()]))
        });

        // Bruhat order by the descent recursion: take s with ws < w;
        // x <= w iff xs <= ws (when xs < x) or x <= ws (otherwise).
        let mut leq = vec![false; order * order];
        for &w in &sorted {
            let w = w.idx();
            if w == 0 {
                leq[0] = true;
                continue;
            }
            let s = (0..n)
                .find(|&i| lengths[rmul_simple[w * n + i] as usize] < lengths[w])
                .expect("non-identity has a right descent");
            let ws = rmul_simple[w * n + s] as usize;
            for x in 0..order {
                let xs = rmul_simple[x * n + s] as usize;
                leq[x * order + w] = if lengths[xs] < lengths[x] {
                    leq[xs * order + ws]
                } else {
                    leq[x * order + ws]
                };
            }
        }

        let mut reflections: Vec<Reflection> = roots
            .positive_roots
            .iter()
            .zip(&roots.coroots)
            .map(|(root, coroot)| {
                let m = reflection_matrix(a, root, coroot);
                let element = *index.get(&m).expect("reflection lies in the group");
                Reflection {
                    element,
                    positive_root: root.clone(),
                    coroot: coroot.clone(),
                }
            })
            .collect();
        reflections.sort_by(|x, y| {
            let (ex, ey) = (x.element.idx(), y.element.idx());
            lengths[ex]
                .cmp(&lengths[ey])
                .then_with(|| words[ex].cmp(&words[ey]))
        });
        let reflection_of = reflections
            .iter()
            .enumerate()
            .map(|(i, r)| (r.element, i))
            .collect();

        Ok(WeylGroup {
            datum,
            roots,
            matrices,
            index,
            lengths,
            words,
            mul,
            inverse,
            leq,
            reflections,
            reflection_of,
            sorted,
            identity: Elem(0),
        })
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn cartan_type(&self) -> CartanType {
        self.datum.type_label
    }

    pub fn roots(&self) -> &RootSystem {
        &self.roots
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn order(&self) -> usize {
        self.matrices.len()
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    /// Simple reflection `s_{i+1}` for zero-based `i`.
    pub fn simple(&self, i: usize) -> Elem {
        let mut m = identity(self.rank());
        for c in 0..self.rank() {
            m[i][c] -= self.datum.cartan_matrix[c][i];
        }
        self.index[&m]
    }

    pub fn simples(&self) -> Vec<Elem> {
        (0..self.rank()).map(|i| self.simple(i)).collect()
    }

    /// All elements sorted by (length, canonical word).
    pub fn elements(&self) -> &[Elem] {
        &self.sorted
    }

    pub fn longest(&self) -> Elem {
        *self.sorted.last().expect("group is nonempty")
    }

    pub fn matrix(&self, w: Elem) -> &IntMatrix {
        &self.matrices[w.idx()]
    }

    pub fn element_of_matrix(&self, m: &IntMatrix) -> Option<Elem> {
        self.index.get(m).copied()
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.idx() * self.order() + b.idx()])
    }

    pub fn inv(&self, a: Elem) -> Elem {
        self.inverse[a.idx()]
    }

    pub fn length(&self, w: Elem) -> u32 {
        self.lengths[w.idx()]
    }

    pub fn bruhat_leq(&self, x: Elem, w: Elem) -> bool {
        self.leq[x.idx() * self.order() + w.idx()]
    }

    pub fn bruhat_lt(&self, x: Elem, w: Elem) -> bool {
        x != w && self.bruhat_leq(x, w)
    }

    /// `w s_i`.
    pub fn rmul_simple(&self, w: Elem, i: usize) -> Elem {
        self.mul(w, self.simple(i))
    }

    pub fn is_right_descent(&self, w: Elem, i: usize) -> bool {
        self.length(self.rmul_simple(w, i)) < self.length(w)
    }

    pub fn is_left_descent(&self, w: Elem, i: usize) -> bool {
        self.length(self.mul(self.simple(i), w)) < self.length(w)
    }

    /// Zero-based letters of the lexicographically least reduced word.
    pub fn reduced_word(&self, w: Elem) -> &[u8] {
        &self.words[w.idx()]
    }

    /// The canonical word in the digits `1..9`; the identity is `""`.
    pub fn word(&self, w: Elem) -> String {
        self.words[w.idx()]
            .iter()
            .map(|&i| char::from(b'1' + i))
            .collect()
    }

    /// Product of the simple reflections named by the digits of `s`.
    pub fn parse_word(&self, s: &str) -> Result<Elem> {
        let s = s.trim();
        let mut w = self.identity;
        for ch in s.chars() {
            let d = ch
                .to_digit(10)
                .filter(|&d| d >= 1 && d as usize <= self.rank())
                .ok_or_else(|| {
                    Error::InvalidWord(
                        s.to_string(),
                        format!("letter {ch:?} is not a simple index"),
                    )
                })?;
            w = self.rmul_simple(w, d as usize - 1);
        }
        Ok(w)
    }

    /// Action of `w` on a coroot-lattice vector.
    pub fn act(&self, w: Elem, v: &[i64]) -> Vec<i64> {
        matvec(self.matrix(w), v)
    }

    pub fn reflections(&self) -> &[Reflection] {
        &self.reflections
    }

    pub fn reflection(&self, t: Elem) -> Option<&Reflection> {
        self.reflection_of.get(&t).map(|&i| &self.reflections[i])
    }

    pub fn is_reflection(&self, t: Elem) -> bool {
        self.reflection_of.contains_key(&t)
    }

    /// `{x : x <= w}`, sorted by (length, word).
    pub fn lower_interval(&self, w: Elem) -> Vec<Elem> {
        self.sorted
            .iter()
            .copied()
            .filter(|&x| self.bruhat_leq(x, w))
            .collect()
    }

    /// `{x : y <= x <= w}`, sorted by (length, word).
    pub fn interval(&self, y: Elem, w: Elem) -> Result<Vec<Elem>> {
        if !self.bruhat_leq(y, w) {
            return Err(Error::Precondition(format!(
                "{} is not below {}",
                self.word_or_e(y),
                self.word_or_e(w)
            )));
        }
        Ok(self
            .sorted
            .iter()
            .copied()
            .filter(|&x| self.bruhat_leq(y, x) && self.bruhat_leq(x, w))
            .collect())
    }

    /// Word for display, with `e` for the identity.
    pub fn word_or_e(&self, w: Elem) -> String {
        if w == self.identity {
            "e".into()
        } else {
            self.word(w)
        }
    }

    /// The subgroup generated by the zero-based simple indices `j`.
    pub fn parabolic_subgroup(&self, j: &[usize]) -> Vec<Elem> {
        let gens: Vec<Elem> = j.iter().map(|&i| self.simple(i)).collect();
        let mut seen = vec![false; self.order()];
        seen[self.identity.idx()] = true;
        let mut out = vec![self.identity];
        let mut head = 0;
        while head < out.len() {
            let cur = out[head];
            for &g in &gens {
                let next = self.mul(cur, g);
                if !seen[next.idx()] {
                    seen[next.idx()] = true;
                    out.push(next);
                }
            }
            head += 1;
        }
        self.sort_elems(&mut out);
        out
    }

    /// The unique minimal-length element of `w W_J`.
    pub fn project_to_min_rep(&self, w: Elem, j: &[usize]) -> Elem {
        let mut cur = w;
        while let Some(&i) = j.iter().find(|&&i| self.is_right_descent(cur, i)) {
            cur = self.rmul_simple(cur, i);
        }
        cur
    }

    pub fn is_min_rep(&self, w: Elem, j: &[usize]) -> bool {
        j.iter().all(|&i| !self.is_right_descent(w, i))
    }

    pub fn min_coset_reps(&self, j: &[usize]) -> Result<ParabolicQuotient> {
        let mut jj: Vec<usize> = j.to_vec();
        jj.sort_unstable();
        jj.dedup();
        if let Some(&bad) = jj.iter().find(|&&i| i >= self.rank()) {
            return Err(Error::Precondition(format!(
                "simple index {} out of range",
                bad + 1
            )));
        }
        let subgroup = self.parabolic_subgroup(&jj);
        let w_j = *subgroup.last().expect("subgroup contains the identity");
        let min_reps: Vec<Elem> = self
            .sorted
            .iter()
            .copied()
            .filter(|&w| self.is_min_rep(w, &jj))
            .collect();
        Ok(ParabolicQuotient {
            j: jj,
            min_reps,
            subgroup,
            w_j,
        })
    }

    /// `G_L(x, y) = {t : x < tx <= y}`, in reflection order.
    pub fn g_l_set(&self, x: Elem, y: Elem) -> Vec<Elem> {
        self.reflections
            .iter()
            .map(|r| r.element)
            .filter(|&t| {
                let tx = self.mul(t, x);
                self.bruhat_lt(x, tx) && self.bruhat_leq(tx, y)
            })
            .collect()
    }

    /// Lifting property for `vs < v`, `u < v`.
    pub fn check_lifting(&self, u: Elem, v: Elem, s: usize) -> Result<LiftingReport> {
        if !self.is_right_descent(v, s) || !self.bruhat_lt(u, v) {
            return Err(Error::Precondition("lifting needs vs < v and u < v".into()));
        }
        let us = self.rmul_simple(u, s);
        let vs = self.rmul_simple(v, s);
        let us_below_u = self.length(us) < self.length(u);
        let (descent_clause, ascent_clause) = if us_below_u {
            (Some(self.bruhat_lt(us, vs)), None)
        } else {
            (None, Some(self.bruhat_leq(us, v) && self.bruhat_leq(u, vs)))
        };
        Ok(LiftingReport {
            us_below_u,
            descent_clause,
            ascent_clause,
            us_leq_v: self.bruhat_leq(us, v),
        })
    }

    pub fn sort_elems(&self, v: &mut [Elem]) {
        v.sort_by(|x, y| {
            self.length(*x)
                .cmp(&self.length(*y))
                .then_with(|| self.words[x.idx()].cmp(&self.words[y.idx()]))
        });
    }
}

pub(crate) fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub(crate) fn matmul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub(crate) fn matvec(a: &IntMatrix, v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn reflection_matrix(a: &IntMatrix, root: &[i64], coroot: &[i64]) -> IntMatrix {
    // l -> l - <root, l> coroot,  <alpha_i, coroot_j> = a[j][i]
    let n = root.len();
    let mut m = identity(n);
    for c in 0..n {
        let pairing: i64 = (0..n).map(|i| root[i] * a[c][i]).sum();
        for r in 0..n {
            m[r][c] -= pairing * coroot[r];
        }
    }
    m
}
