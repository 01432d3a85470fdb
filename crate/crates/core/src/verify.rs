//! Named, exhaustive verification suites over one group and one field.
//! Each suite checks one family of identities and reports every failure.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::bmp::{
    build_bmp, gamma_divisibility_check, verify_axioms, BmpAtlas, DegreePolicy, GradedRank,
};
use crate::coxeter::{Elem, WeylGroup};
use crate::error::{Error, Result};
use crate::graph::{bruhat_graph, inverse_morphism, right_mult_isomorphism, validate_isomorphism};
use crate::kl::KazhdanLusztig;
use crate::ring::Field;
use crate::sheaf::{cs_element, is_structure_element, pullback};

/// Suite names in the order `all` runs them.
pub const SUITES: &[&str] = &[
    "kl-identities",
    "ranks-vs-kl",
    "thm58",
    "thm62",
    "parabolic",
    "smoothness",
    "gamma-div",
    "flabby",
    "lemmas",
    "pullback",
];

/// The statement a suite checks, in words.
pub fn statement(suite: &str) -> Option<&'static str> {
    Some(match suite {
        "kl-identities" => "P(y,w) = P(y^-1,w^-1); P(y,w) = P(ys,ws) if y is not below ws; P(y,w) = P(ys,w) if ws < w",
        "ranks-vs-kl" => "graded rank of B_w at y equals P(y,w) in characteristic zero",
        "thm58" => "rk B_w^y = rk B_{w^-1}^{y^-1}; rk B_w^y = rk B_{ws}^{ys} if ws < w and y is not below ws",
        "thm62" => "rk B_w^y = rk B_w^{ys} if ws < w",
        "parabolic" => "rk (B^J_w)^y = rk (B_{ww_J})^{yw_J} = P(yw_J,ww_J), and rk B_{ww_J} is constant on cosets xW_J",
        "smoothness" => "rk B_{w0}^y = 1 for every y",
        "gamma-div" => "Hilbert series of sections of B_w over [ys,w] minus {ys,y} is (1+q)G(q) with G >= 0",
        "flabby" => "every canonical sheaf B_w is flabby",
        "lemmas" => "reflection sets, s-stable intervals, lifting, interval bijections, c_s in the structure algebra",
        "pullback" => "pullbacks of canonical sheaves along inversion and right multiplication are canonical",
        _ => return None,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub statement: String,
    pub checked: usize,
    /// Instances whose hypothesis failed over the chosen field.
    pub skipped: usize,
    pub failures: Vec<String>,
    /// Informational findings that do not count as failures.
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            statement: statement(suite).unwrap_or("").to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(msg());
        }
    }
}

/// Shared state for running several suites: sheaves and polynomials are
/// computed once and reused.
pub struct Verifier<'g, F: Field> {
    group: &'g WeylGroup,
    field: F,
    policy: DegreePolicy,
    parabolic: Option<Vec<usize>>,
    atlas: BmpAtlas<'g, F>,
    kl: KazhdanLusztig<'g>,
}

impl<'g, F: Field> Verifier<'g, F> {
    /// `parabolic` restricts the parabolic suite to one `J`; by default it
    /// runs every nonempty proper subset.
    pub fn new(
        group: &'g WeylGroup,
        field: F,
        policy: DegreePolicy,
        parabolic: Option<Vec<usize>>,
    ) -> Result<Self> {
        if let Some(j) = &parabolic {
            group.min_coset_reps(j)?;
        }
        let atlas = BmpAtlas::new(group, &[], field.clone(), policy)?;
        Ok(Verifier {
            group,
            field,
            policy,
            parabolic,
            atlas,
            kl: KazhdanLusztig::new(group),
        })
    }

    pub fn atlas(&self) -> &BmpAtlas<'g, F> {
        &self.atlas
    }

    pub fn kl(&self) -> &KazhdanLusztig<'g> {
        &self.kl
    }

    fn char0(&self) -> bool {
        self.field.characteristic() == 0
    }

    fn name(&self, x: Elem) -> String {
        self.group.word_or_e(x)
    }

    fn prefetch_all(&self) -> Result<()> {
        self.atlas.prefetch(self.group.elements())
    }

    pub fn run(&self, suite: &str) -> Result<SuiteReport> {
        match suite {
            "kl-identities" => Ok(self.kl_identities()),
            "ranks-vs-kl" => self.ranks_vs_kl(),
            "thm58" => self.inversion_and_right_mult(),
            "thm62" => self.left_descent_ranks(),
            "parabolic" => self.parabolic(),
            "smoothness" => self.smoothness(),
            "gamma-div" => self.gamma_div(),
            "flabby" => self.flabby(),
            "lemmas" => self.lemmas(),
            "pullback" => self.pullbacks(),
            other => Err(Error::Precondition(format!("unknown suite {other:?}"))),
        }
    }

    fn kl_identities(&self) -> SuiteReport {
        let mut r = SuiteReport::new("kl-identities");
        let id = self.kl.verify_identities();
        r.checked = id.checked.iter().sum();
        r.failures = id.violations;
        r
    }

    fn ranks_vs_kl(&self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("ranks-vs-kl");
        self.prefetch_all()?;
        let g = self.group;
        let mut mismatches = 0;
        for &w in g.elements() {
            for y in g.lower_interval(w) {
                let rank = self.atlas.rank(w, y)?.as_i64();
                let p = self.kl.kl(y, w);
                let converged = self.atlas.converged(w, y)?;
                let msg = || {
                    format!(
                        "y={}, w={}: rank {} vs P = {}",
                        self.name(y),
                        self.name(w),
                        fmt_rank(&rank),
                        p
                    )
                };
                if self.char0() {
                    r.check(rank == p.coeffs && converged, msg);
                } else {
                    r.checked += 1;
                    if rank != p.coeffs {
                        mismatches += 1;
                        r.notes.push(msg());
                    }
                }
                if !converged {
                    r.notes.push(format!(
                        "y={}, w={}: generator search did not converge",
                        self.name(y),
                        self.name(w)
                    ));
                }
            }
        }
        if !self.char0() {
            r.notes.push(format!(
                "{mismatches} mismatches in positive characteristic (probe only)"
            ));
        }
        Ok(r)
    }

    fn inversion_and_right_mult(&self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("thm58");
        self.prefetch_all()?;
        let g = self.group;
        for &w in g.elements() {
            for y in g.lower_interval(w) {
                let (a, b) = (self.atlas.rank(w, y)?, self.atlas.rank(g.inv(w), g.inv(y))?);
                r.check(a == b, || {
                    format!(
                        "inversion: y={}, w={}: {a} vs {b}",
                        self.name(y),
                        self.name(w)
                    )
                });
                for s in (0..g.rank()).filter(|&s| g.is_right_descent(w, s)) {
                    let ws = g.rmul_simple(w, s);
                    if g.bruhat_leq(y, ws) {
                        continue;
                    }
                    let c = self.atlas.rank(ws, g.rmul_simple(y, s))?;
                    r.check(a == c, || {
                        format!(
                            "right multiplication: y={}, w={}, s={}: {a} vs {c}",
                            self.name(y),
                            self.name(w),
                            s + 1
                        )
                    });
                }
            }
        }
        Ok(r)
    }

    fn lower_is_gkm(&self, w: Elem) -> Result<bool> {
        Ok(self.atlas.get(w)?.graph().is_gkm_pair(&self.field))
    }

    fn left_descent_ranks(&self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("thm62");
        self.prefetch_all()?;
        let g = self.group;
        for &w in g.elements() {
            let gkm = self.lower_is_gkm(w)?;
            for s in (0..g.rank()).filter(|&s| g.is_right_descent(w, s)) {
                for y in g.lower_interval(w) {
                    let ys = g.rmul_simple(y, s);
                    if !g.is_right_descent(y, s) {
                        continue;
                    }
                    if !gkm {
                        r.skipped += 1;
                        continue;
                    }
                    let (a, b) = (self.atlas.rank(w, y)?, self.atlas.rank(w, ys)?);
                    r.check(a == b, || {
                        format!(
                            "y={}, w={}, s={}: {a} vs {b}",
                            self.name(y),
                            self.name(w),
                            s + 1
                        )
                    });
                }
            }
        }
        Ok(r)
    }

    fn parabolic_sets(&self) -> Vec<Vec<usize>> {
        if let Some(j) = &self.parabolic {
            return vec![j.clone()];
        }
        let n = self.group.rank();
        (1..(1u32 << n) - 1)
            .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
            .collect()
    }

    fn parabolic(&self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("parabolic");
        let g = self.group;
        for j in self.parabolic_sets() {
            let jname = j
                .iter()
                .map(|i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(",");
            let quotient = g.min_coset_reps(&j)?;
            let atlas_j = match BmpAtlas::new(g, &j, self.field.clone(), self.policy) {
                Ok(a) => a,
                Err(e @ Error::AmbiguousEdgeLabel(..)) => {
                    r.notes.push(format!("J={{{jname}}}: {e}"));
                    r.skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            atlas_j.prefetch(&quotient.min_reps)?;
            let lifts: Vec<Elem> = quotient
                .min_reps
                .iter()
                .map(|&w| g.mul(w, quotient.w_j))
                .collect();
            self.atlas.prefetch(&lifts)?;
            for &w in &quotient.min_reps {
                let wj = g.mul(w, quotient.w_j);
                if !self.lower_is_gkm(wj)? {
                    r.skipped += 1;
                    continue;
                }
                for &y in quotient.min_reps.iter().filter(|&&y| g.bruhat_leq(y, w)) {
                    let yj = g.mul(y, quotient.w_j);
                    let a = atlas_j.rank(w, y)?;
                    let b = self.atlas.rank(wj, yj)?;
                    let p = self.kl.parabolic_kl(&j, y, w)?;
                    let tag = || format!("J={{{jname}}}, y={}, w={}", self.name(y), self.name(w));
                    r.check(a == b, || format!("{}: parabolic rank {a} vs {b}", tag()));
                    if self.char0() {
                        r.check(a.as_i64() == p.coeffs, || {
                            format!("{}: parabolic rank {a} vs P = {p}", tag())
                        });
                    } else if a.as_i64() != p.coeffs {
                        r.notes.push(format!(
                            "{}: parabolic rank {a} vs P = {p} (probe only)",
                            tag()
                        ));
                    }
                    for &u in &quotient.subgroup {
                        let c = self.atlas.rank(wj, g.mul(y, u))?;
                        let d = self.atlas.rank(wj, y)?;
                        r.check(c == d, || {
                            format!(
                                "{}: coset rank at {} is {c}, at y is {d}",
                                tag(),
                                self.name(g.mul(y, u))
                            )
                        });
                    }
                }
            }
        }
        Ok(r)
    }

    fn smoothness(&self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("smoothness");
        let w0 = self.group.longest();
        let one = GradedRank { coeffs: vec![1] };
        for &y in self.group.elements() {
            let a = self.atlas.rank(w0, y)?;
            r.check(a == one, || format!("y={}: rank {a}", self.name(y)));
        }
        Ok(r)
    }

    fn gamma_div(&self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("gamma-div");
        self.prefetch_all()?;
        let g = self.group;
        for &w in g.elements() {
            let b = self.atlas.get(w)?;
            for s in (0..g.rank()).filter(|&s| g.is_right_descent(w, s)) {
                for y in g
                    .lower_interval(w)
                    .into_iter()
                    .filter(|&y| g.is_right_descent(y, s))
                {
                    match gamma_divisibility_check(g, &b, y, s, self.policy) {
                        Ok(rep) => r.check(rep.divisible(), || {
                            format!(
                                "y={}, w={}, s={}: series {:?}, quotient {:?}",
                                self.name(y),
                                self.name(w),
                                s + 1,
                                rep.series,
                                rep.quotient
                            )
                        }),
                        Err(Error::NotGkm(_)) => r.skipped += 1,
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Ok(r)
    }

    fn flabby(&self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("flabby");
        self.prefetch_all()?;
        for &w in self.group.elements() {
            let b = self.atlas.get(w)?;
            let d_max = self.policy.cap(self.group.length(w), 0);
            let witness = b.sheaf.flabby_witness(d_max)?;
            r.check(witness.is_none(), || {
                let (x, d) = witness.expect("failure has a witness");
                format!(
                    "w={}: extension fails at x={} in degree {d}",
                    self.name(w),
                    b.graph().vertex(x).word
                )
            });
        }
        Ok(r)
    }

    fn lemmas(&self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("lemmas");
        let g = self.group;
        for &w in g.elements() {
            for &x in g.elements() {
                r.check(
                    g.bruhat_leq(x, w) == g.bruhat_leq(g.inv(x), g.inv(w)),
                    || {
                        format!(
                            "inversion of the order fails at x={}, w={}",
                            self.name(x),
                            self.name(w)
                        )
                    },
                );
            }
            for s in (0..g.rank()).filter(|&s| g.is_right_descent(w, s)) {
                let ws = g.rmul_simple(w, s);
                for y in g.lower_interval(w) {
                    let ys = g.rmul_simple(y, s);
                    let tag = || format!("y={}, w={}, s={}", self.name(y), self.name(w), s + 1);
                    if y != w {
                        let lift = g.check_lifting(y, w, s)?;
                        r.check(lift.holds(), || format!("lifting: {}", tag()));
                    }
                    if g.is_right_descent(y, s) {
                        let lhs: BTreeSet<Elem> = g.g_l_set(ys, w).into_iter().collect();
                        let mut rhs: BTreeSet<Elem> = g.g_l_set(y, w).into_iter().collect();
                        rhs.insert(g.mul(ys, g.inv(y)));
                        r.check(lhs == rhs, || format!("reflection sets: {}", tag()));
                        let set: BTreeSet<Elem> = g
                            .interval(ys, w)?
                            .into_iter()
                            .filter(|&x| x != y && x != ys)
                            .collect();
                        r.check(
                            set.iter().all(|&x| set.contains(&g.rmul_simple(x, s))),
                            || format!("s-stable interval: {}", tag()),
                        );
                    }
                    if !g.bruhat_leq(y, ws) {
                        let src = g.interval(y, w)?;
                        let dst: BTreeSet<Elem> = g.interval(ys, ws)?.into_iter().collect();
                        let image: BTreeSet<Elem> =
                            src.iter().map(|&x| g.rmul_simple(x, s)).collect();
                        let monotone = src.iter().all(|&a| {
                            src.iter().all(|&b| {
                                g.bruhat_leq(a, b)
                                    == g.bruhat_leq(g.rmul_simple(a, s), g.rmul_simple(b, s))
                            })
                        });
                        r.check(image == dst && monotone, || {
                            format!("interval bijection: {}", tag())
                        });
                    }
                }
            }
        }
        let full = bruhat_graph(g, &[])?;
        for s in 0..g.rank() {
            let z = cs_element(g, &full, s, &self.field)?;
            r.check(is_structure_element(&z, &full, &self.field), || {
                format!("c_{} is not in the structure algebra", s + 1)
            });
        }
        Ok(r)
    }

    fn pullbacks(&self) -> Result<SuiteReport> {
        self.prefetch_all()?;
        self.pullbacks_at(self.group.elements())
    }

    /// The pullback checks whose top vertex is one of `ws`.
    pub fn pullbacks_at(&self, ws: &[Elem]) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("pullback");
        let g = self.group;
        for &w in ws {
            let (src, dst) = (self.atlas.get(w)?, self.atlas.get(g.inv(w))?);
            let f = inverse_morphism(g, src.graph(), dst.graph())?;
            let iso = validate_isomorphism(&f, src.graph(), dst.graph(), &self.field);
            r.check(iso.is_valid(), || {
                format!("inversion w={}: {:?}", self.name(w), iso.violations)
            });
            if !iso.is_valid() {
                continue;
            }
            let pb = pullback(&f, src.sheaf.graph_arc().clone(), &dst.sheaf)?;
            let axioms = verify_axioms(&pb, self.policy)?;
            r.check(axioms.passed(), || {
                format!(
                    "inversion w={}: pullback fails the axioms: {axioms:?}",
                    self.name(w)
                )
            });
            r.check(pb.stalks() == src.sheaf.stalks(), || {
                format!("inversion w={}: stalk degrees differ", self.name(w))
            });
        }
        let full = self.atlas.full_graph();
        for &w in ws {
            for s in (0..g.rank()).filter(|&s| g.is_right_descent(w, s)) {
                let ws = g.rmul_simple(w, s);
                for y in g
                    .lower_interval(w)
                    .into_iter()
                    .filter(|&y| !g.bruhat_leq(y, ws))
                {
                    let tag = || {
                        format!(
                            "right multiplication y={}, w={}, s={}",
                            self.name(y),
                            self.name(w),
                            s + 1
                        )
                    };
                    let (source, target, f) = right_mult_isomorphism(g, full, y, w, s)?;
                    let iso = validate_isomorphism(&f, &source, &target, &self.field);
                    r.check(iso.is_valid(), || {
                        format!("{}: {:?}", tag(), iso.violations)
                    });
                    if !iso.is_valid() {
                        continue;
                    }
                    let source = Arc::new(source);
                    let b_src = build_bmp(source.clone(), self.field.clone(), self.policy)?;
                    let b_dst = build_bmp(Arc::new(target), self.field.clone(), self.policy)?;
                    let pb = pullback(&f, source, &b_dst.sheaf)?;
                    let axioms = verify_axioms(&pb, self.policy)?;
                    r.check(axioms.passed(), || {
                        format!("{}: pullback fails the axioms: {axioms:?}", tag())
                    });
                    r.check(pb.stalks() == b_src.sheaf.stalks(), || {
                        format!("{}: stalk degrees differ", tag())
                    });
                }
            }
        }
        Ok(r)
    }
}

fn fmt_rank(c: &[i64]) -> String {
    crate::kl::format_q_polynomial(c)
}
