//! State-sum quantum traces over the two-triangle triangulation of the annulus.
//!
//! The annulus is cut into a left triangle and a right triangle glued along
//! two biangles. A basis web `B_k` crosses the left triangle in `n-k` parallel
//! arcs and the right triangle in `k` arcs; its two trivalent vertices sit in
//! the biangles. The simple loop crosses each triangle in a single arc.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use itertools::Itertools;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::biangle_counit::{counit_sink, counit_source, CounitConstants, StatePattern};
use crate::error::{invalid, Result};
use crate::fg_matrices::{left_matrix, right_matrix, QMatrix};
use crate::quantum_torus::{Exponents, TensorElement, Torus, TorusElement};
use crate::scalars::{qfact, qint, LaurentScalar, RingContext};
use crate::tropical_fan::{compositions_up_to, min_form, t_inverse_band, t_matrix, tropical_t, Side};

pub struct AnnulusContext {
    ring: RingContext,
    torus: Arc<Torus>,
    left: QMatrix,
    loop_left: QMatrix,
    loop_right: QMatrix,
    counit: CounitConstants,
    threads: Option<usize>,
}

impl AnnulusContext {
    pub fn new(n: u32) -> Result<Self> {
        Self::with_torus(Torus::new(n)?)
    }

    pub fn with_torus(torus: Arc<Torus>) -> Result<Self> {
        let ring = RingContext::new(torus.n())?;
        let left = left_matrix(&torus)?;
        let loop_left = right_matrix(&torus)?.rotate_vertices(1);
        let loop_right = left.clone();
        Ok(Self {
            ring,
            torus,
            left,
            loop_left,
            loop_right,
            counit: CounitConstants::default(),
            threads: None,
        })
    }

    pub fn with_counit(mut self, counit: CounitConstants) -> Self {
        self.counit = counit;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn n(&self) -> u32 {
        self.ring.n()
    }

    pub fn ring(&self) -> RingContext {
        self.ring
    }

    pub fn torus(&self) -> &Arc<Torus> {
        &self.torus
    }

    pub fn left_matrix(&self) -> &QMatrix {
        &self.left
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t.max(1))
                    .build()
                    .map_err(|e| invalid(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
            None => Ok(f()),
        }
    }

    /// Ordered product `M(s_1 t_1) M(s_2 t_2) ⋯` of 1-based matrix entries.
    fn entry_product(&self, rows: &[u32], cols: &[u32]) -> Result<Option<TorusElement>> {
        let mut acc = TorusElement::one(&self.torus);
        for (r, c) in rows.iter().zip(cols) {
            let e = self.left.get(*r as usize - 1, *c as usize - 1);
            if e.is_zero() {
                return Ok(None);
            }
            acc = acc.mul(e)?;
        }
        Ok(Some(acc))
    }

    /// The left-triangle factor for fixed right-edge states: the sum over the
    /// states of the `n-k` left arcs of both co-units times the arc product.
    fn left_factor(&self, i: &[u32], i_out: &[u32]) -> Result<TorusElement> {
        let n = self.n();
        let l_set: Vec<u32> = (1..=n).filter(|x| !i.contains(x)).map(|x| n + 1 - x).sorted().collect();
        let lp_set: Vec<u32> = (1..=n).filter(|x| !i_out.iter().any(|y| n + 1 - y == *x)).collect();
        let m = l_set.len();
        let mut acc = TorusElement::zero(&self.torus);
        for l in l_set.iter().copied().permutations(m) {
            let src = counit_source(self.ring, &StatePattern::new(n, i.to_vec(), l.clone())?, &self.counit);
            if src.is_zero() {
                continue;
            }
            for lp in lp_set.iter().copied().permutations(m) {
                let sink = counit_sink(self.ring, &StatePattern::new(n, lp.clone(), i_out.to_vec())?, &self.counit);
                if sink.is_zero() {
                    continue;
                }
                if let Some(p) = self.entry_product(&l, &lp)? {
                    acc = acc.add(&p.scale(&(&sink * &src)))?;
                }
            }
        }
        Ok(acc)
    }

    /// The quantum trace of the basis web `B_k`.
    pub fn trace_basis_web(&self, k: u32) -> Result<TensorElement> {
        let n = self.n();
        if k == 0 || k >= n {
            return Err(invalid(format!("k = {k} outside 1..{}", n - 1)));
        }
        let tuples: Vec<Vec<u32>> = (1..=n).permutations(k as usize).collect();
        let pairs: Vec<(&Vec<u32>, &Vec<u32>)> = tuples
            .iter()
            .cartesian_product(tuples.iter())
            .filter(|(i, ip)| i.iter().zip(ip.iter()).all(|(a, b)| a >= b))
            .collect();
        let parts: Vec<Result<TensorElement>> = self.run(|| {
            pairs
                .par_iter()
                .map(|(i, ip)| -> Result<TensorElement> {
                    let zero = TensorElement::zero(&self.torus, &self.torus);
                    let Some(right) = self.entry_product(i, ip)? else {
                        return Ok(zero);
                    };
                    let left = self.left_factor(i, ip)?;
                    if left.is_zero() {
                        return Ok(zero);
                    }
                    Ok(TensorElement::pure(&left, &right))
                })
                .collect()
        })?;
        let mut out = TensorElement::zero(&self.torus, &self.torus);
        for p in parts {
            out.add_assign(&p?)?;
        }
        Ok(out)
    }

    /// The product `B_1^{m_1} B_2^{m_2} ⋯ B_{n-1}^{m_{n-1}}`.
    pub fn trace_monomial(&self, m: &[u32]) -> Result<TraceReport> {
        let n = self.n();
        if m.len() != (n - 1) as usize {
            return Err(invalid(format!("expected {} exponents, got {}", n - 1, m.len())));
        }
        let mut acc = TensorElement::one(&self.torus, &self.torus);
        for (k, mk) in m.iter().enumerate() {
            if *mk > 0 {
                acc = acc.mul(&self.trace_basis_web(k as u32 + 1)?.pow(*mk)?)?;
            }
        }
        Ok(TraceReport::new(acc))
    }

    pub fn trace_basis_report(&self, k: u32) -> Result<TraceReport> {
        Ok(TraceReport::new(self.trace_basis_web(k)?))
    }

    /// The simple counterclockwise loop around the core.
    pub fn trace_simple_loop(&self) -> Result<TraceReport> {
        let n = self.n() as usize;
        let mut out = TensorElement::zero(&self.torus, &self.torus);
        for s in 0..n {
            for t in 0..n {
                let (a, b) = (self.loop_left.get(s, t), self.loop_right.get(t, s));
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                out.add_assign(&TensorElement::pure(a, b))?;
            }
        }
        Ok(TraceReport::new(out))
    }

    /// Tropical degree vectors `(t^L_k, t^R_k)` laid out in torus vertex order.
    pub fn tropical_degrees(&self, k: u32) -> Result<(Exponents, Exponents)> {
        let tl = tropical_t(self.n(), k, Side::L)?;
        let tr = tropical_t(self.n(), k, Side::R)?;
        let lay = |f: &crate::tropical_fan::TriangleFunction| -> Exponents {
            self.torus
                .triangle
                .vertices()
                .iter()
                .map(|v| f.get(*v).to_integer() as i32)
                .collect()
        };
        Ok((lay(&tl), lay(&tr)))
    }

    pub fn highest_degree_check(&self, k: u32) -> Result<HighestDegreeCheck> {
        let report = self.trace_basis_report(k)?;
        let expected = expected_coefficient(self.ring, k);
        let (tl, tr) = self.tropical_degrees(k)?;
        let degrees_match = report
            .highest
            .as_ref()
            .is_some_and(|(l, r)| *l == tl && *r == tr);
        let unit = report.coefficient.unit_ratio(&expected);
        Ok(HighestDegreeCheck {
            k,
            unique: report.highest.is_some(),
            degrees_match,
            unit,
            expected,
            report,
        })
    }

    /// Compares `B_1` with the scaled simple loop.
    pub fn peeling_check(&self) -> Result<PeelingCheck> {
        let b1 = self.trace_basis_web(1)?;
        let gamma = self.trace_simple_loop()?.element;
        let factor = peeling_factor(self.ring);
        let scaled = gamma.scale(&factor);
        let unit = match (b1.terms().iter().next(), scaled.terms().get(
            b1.terms().keys().next().unwrap_or(&(self.torus.zero_exps(), self.torus.zero_exps())),
        )) {
            (Some((_, a)), Some(b)) => a.unit_ratio(b),
            _ => None,
        };
        let proportional = match &unit {
            Some(u) => scaled.scale(u) == b1,
            None => false,
        };
        Ok(PeelingCheck {
            proportional,
            unit,
            factor,
            basis_terms: b1.len(),
            loop_terms: gamma.len(),
        })
    }
}

/// `q^{(n-k)(n-k-1)/2}[n-k]! q^{k(k-1)/2}[k]!`.
pub fn expected_coefficient(ring: RingContext, k: u32) -> LaurentScalar {
    let n = ring.n();
    let part = |m: u32| &ring.q_pow((m as i64) * (m as i64 - 1) / 2) * &qfact(ring, m);
    &part(n - k) * &part(k)
}

/// `∏_{k=1}^{n-1} q^{-k}[n-k]`.
pub fn peeling_factor(ring: RingContext) -> LaurentScalar {
    let n = ring.n();
    let mut acc = LaurentScalar::one();
    for k in 1..n {
        acc = &(&acc * &ring.q_pow(-(k as i64))) * &qint(ring, n - k);
    }
    acc
}

#[derive(Clone)]
pub struct TraceReport {
    pub element: TensorElement,
    pub highest: Option<(Exponents, Exponents)>,
    pub coefficient: LaurentScalar,
}

impl TraceReport {
    pub fn new(element: TensorElement) -> Self {
        match element.highest_degree() {
            Some((l, r, c)) => Self {
                element,
                highest: Some((l, r)),
                coefficient: c,
            },
            None => Self {
                element,
                highest: None,
                coefficient: LaurentScalar::zero(),
            },
        }
    }

    pub fn all_coefficients_one(&self) -> bool {
        self.element.terms().values().all(|c| c.is_one())
    }
}

impl Serialize for TraceReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TraceReport", 4)?;
        st.serialize_field("element", &self.element)?;
        st.serialize_field("highest", &self.highest.as_ref().map(|(l, r)| (l.to_vec(), r.to_vec())))?;
        st.serialize_field("coefficient", &self.coefficient)?;
        st.serialize_field("terms", &self.element.len())?;
        st.end()
    }
}

#[derive(Clone)]
pub struct HighestDegreeCheck {
    pub k: u32,
    pub unique: bool,
    pub degrees_match: bool,
    /// `coefficient = unit · expected`, when such a unit exists.
    pub unit: Option<LaurentScalar>,
    pub expected: LaurentScalar,
    pub report: TraceReport,
}

impl HighestDegreeCheck {
    pub fn passed(&self) -> bool {
        self.unique && self.degrees_match && self.unit.is_some()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeelingCheck {
    pub proportional: bool,
    pub unit: Option<LaurentScalar>,
    pub factor: LaurentScalar,
    pub basis_terms: usize,
    pub loop_terms: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndependenceReport {
    pub n: u32,
    pub max_total: u32,
    pub monomials: usize,
    pub distinct_degrees: usize,
    pub injective: bool,
    pub t_matrix: Vec<Vec<i64>>,
    pub t_inverse: Vec<Vec<String>>,
    pub inverse_matches: bool,
}

/// Degree vectors `Σ_k m_k t^R_k(a)` for `a = 1..n-1` over all `Σ m_k ≤ max_total`.
pub fn independence_check(n: u32, max_total: u32) -> Result<IndependenceReport> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    if max_total == 0 {
        return Err(invalid("max_total must be at least 1"));
    }
    let ni = n as i64;
    let ms = compositions_up_to((n - 1) as usize, max_total);
    let mut seen = HashSet::new();
    for m in &ms {
        let v: Vec<i64> = (1..ni)
            .map(|a| {
                m.iter()
                    .enumerate()
                    .map(|(k, mk)| *mk as i64 * min_form(ni, k as i64 + 1, ni - a))
                    .sum()
            })
            .collect();
        seen.insert(v);
    }
    let t = t_matrix(n);
    let inv = t_inverse_band(n);
    let size = t.len();
    let inverse_matches = (0..size).all(|i| {
        (0..size).all(|j| {
            let s: Ratio<i64> = (0..size).map(|k| Ratio::from_integer(t[i][k]) * inv[k][j]).sum();
            s == Ratio::from_integer((i == j) as i64)
        })
    });
    Ok(IndependenceReport {
        n,
        max_total,
        monomials: ms.len(),
        distinct_degrees: seen.len(),
        injective: seen.len() == ms.len(),
        t_matrix: t,
        t_inverse: inv.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        inverse_matches,
    })
}

/// Highest-degree pairs of every monomial with `Σ m_k ≤ max_total`.
pub fn highest_degree_table(
    ctx: &AnnulusContext,
    max_total: u32,
) -> Result<BTreeMap<Vec<u32>, Option<(Exponents, Exponents)>>> {
    let mut out = BTreeMap::new();
    for m in compositions_up_to((ctx.n() - 1) as usize, max_total) {
        let rep = ctx.trace_monomial(&m)?;
        out.insert(m, rep.highest);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_degrees(a: &(Exponents, Exponents), b: &(Exponents, Exponents)) -> (Exponents, Exponents) {
        let add = |x: &Exponents, y: &Exponents| x.iter().zip(y).map(|(p, q)| p + q).collect();
        (add(&a.0, &b.0), add(&a.1, &b.1))
    }

    #[test]
    fn n2_basis_web_degrees() {
        let c = AnnulusContext::new(2).unwrap();
        let chk = c.highest_degree_check(1).unwrap();
        assert!(chk.passed());
        let (l, r) = chk.report.highest.unwrap();
        let tri = &c.torus().triangle;
        for (idx, v) in tri.vertices().iter().enumerate() {
            let want = if v.0 == 1 { 1 } else { 0 };
            assert_eq!(l[idx], want);
            assert_eq!(r[idx], want);
        }
    }

    #[test]
    fn highest_degree_small() {
        for n in 2..=4 {
            let c = AnnulusContext::new(n).unwrap();
            for k in 1..n {
                let chk = c.highest_degree_check(k).unwrap();
                assert!(chk.passed(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn simple_loop_n2() {
        let c = AnnulusContext::new(2).unwrap();
        let rep = c.trace_simple_loop().unwrap();
        assert_eq!(rep.element.len(), 3);
        assert!(rep.all_coefficients_one());
        let (tl, tr) = c.tropical_degrees(1).unwrap();
        assert_eq!(rep.highest, Some((tl, tr)));
    }

    #[test]
    fn peeling_small() {
        for n in 2..=4 {
            let c = AnnulusContext::new(n).unwrap();
            assert!(c.peeling_check().unwrap().proportional, "n={n}");
        }
    }

    #[test]
    fn monomials_add_degrees() {
        let c = AnnulusContext::new(3).unwrap();
        assert!(c.trace_monomial(&[0, 0]).unwrap().element == TensorElement::one(c.torus(), c.torus()));
        let b1 = c.trace_basis_report(1).unwrap();
        let b2 = c.trace_basis_report(2).unwrap();
        assert!(c.trace_monomial(&[1, 0]).unwrap().element == b1.element);
        let both = c.trace_monomial(&[1, 1]).unwrap();
        let want = sum_degrees(b1.highest.as_ref().unwrap(), b2.highest.as_ref().unwrap());
        assert_eq!(both.highest.as_ref(), Some(&want));
        let tri = &c.torus().triangle;
        let r = &both.highest.unwrap().1;
        for (idx, v) in tri.vertices().iter().enumerate() {
            if v.0 > 0 {
                assert_eq!(r[idx], 3);
            }
        }
    }

    #[test]
    fn loop_without_corner_arrows_is_not_proportional() {
        use crate::quantum_torus::{DiscreteTriangle, QuiverForm};
        let tri = DiscreteTriangle::new(3).unwrap();
        let q = QuiverForm::without_corner_arrows(&tri);
        let c = AnnulusContext::with_torus(Torus::with_quiver(tri, q)).unwrap();
        assert!(!c.peeling_check().unwrap().proportional);
    }

    #[test]
    fn parallel_matches_serial() {
        let c = AnnulusContext::new(3).unwrap();
        let serial = c.trace_basis_web(1).unwrap();
        let c = c.with_threads(Some(3));
        assert!(c.trace_basis_web(1).unwrap() == serial);
    }

    #[test]
    fn independence_examples() {
        let r = independence_check(3, 3).unwrap();
        assert!(r.injective && r.inverse_matches);
        assert_eq!(r.t_matrix, vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(r.t_inverse, vec![vec!["-1/3", "2/3"], vec!["2/3", "-1/3"]]);
        let r = independence_check(2, 5).unwrap();
        assert!(r.injective);
        assert_eq!(r.t_matrix, vec![vec![1]]);
        let r = independence_check(5, 4).unwrap();
        assert_eq!(r.monomials, 70);
        assert!(r.injective);
        assert!(independence_check(3, 0).is_err());
    }

    #[test]
    fn out_of_range() {
        let c = AnnulusContext::new(3).unwrap();
        assert!(c.trace_basis_web(0).is_err());
        assert!(c.trace_basis_web(3).is_err());
        assert!(c.trace_monomial(&[1]).is_err());
    }
}

