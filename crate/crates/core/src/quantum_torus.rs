//! The `n`-root Fock–Goncharov quantum torus of a single triangle.
//!
//! Generators are indexed by the non-corner points of the discrete triangle
//! `{(a,b,c) : a+b+c = n}`. An exponent vector `d` stands for the Weyl-ordered
//! monomial `[X^{d/n}]`, and elements are stored as maps from exponent
//! vectors to scalars. Products use `[X^a][X^b] = (ω^{1/2})^{aᵀPb} [X^{a+b}]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{invalid, Error, Result};
use crate::scalars::LaurentScalar;

pub type Vertex = (u32, u32, u32);

/// Exponent vector over the vertices, in units of `1/n`.
pub type Exponents = SmallVec<[i32; 28]>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteTriangle {
    n: u32,
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
}

impl DiscreteTriangle {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("triangle needs n >= 2, got {n}")));
        }
        let mut vertices = Vec::new();
        for a in 0..=n {
            for b in 0..=(n - a) {
                let c = n - a - b;
                if a == n || b == n || c == n {
                    continue;
                }
                vertices.push((a, b, c));
            }
        }
        vertices.sort();
        let index = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        Ok(Self { n, vertices, index })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        self.vertices[i]
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn is_interior(v: Vertex) -> bool {
        v.0 > 0 && v.1 > 0 && v.2 > 0
    }

    /// `(a,b,c) ↦ (c,a,b)`.
    pub fn rotate(v: Vertex) -> Vertex {
        (v.2, v.0, v.1)
    }
}

/// The antisymmetric weight form of the triangle quiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverForm {
    size: usize,
    dense: Vec<i8>,
    rows: Vec<Vec<(usize, i32)>>,
}

impl QuiverForm {
    pub fn new(tri: &DiscreteTriangle) -> Self {
        Self::build(tri, true)
    }

    /// Only the arrows incident to interior vertices and the arrows along the sides.
    pub fn without_corner_arrows(tri: &DiscreteTriangle) -> Self {
        Self::build(tri, false)
    }

    fn build(tri: &DiscreteTriangle, corner_arrows: bool) -> Self {
        let size = tri.len();
        let mut dense = vec![0i8; size * size];
        let n = tri.n() as i64;
        let mut set = |u: (i64, i64, i64), v: (i64, i64, i64), w: i8| {
            let conv = |x: (i64, i64, i64)| -> Option<usize> {
                if x.0 < 0 || x.1 < 0 || x.2 < 0 {
                    return None;
                }
                tri.index_of((x.0 as u32, x.1 as u32, x.2 as u32))
            };
            if let (Some(i), Some(j)) = (conv(u), conv(v)) {
                dense[i * size + j] = w;
                dense[j * size + i] = -w;
            }
        };
        for &(a, b, c) in tri.vertices() {
            if !DiscreteTriangle::is_interior((a, b, c)) {
                continue;
            }
            let (a, b, c) = (a as i64, b as i64, c as i64);
            let v = (a, b, c);
            set(v, (a, b + 1, c - 1), 2);
            set(v, (a - 1, b, c + 1), 2);
            set(v, (a + 1, b - 1, c), 2);
            set(v, (a, b - 1, c + 1), -2);
            set(v, (a + 1, b, c - 1), -2);
            set(v, (a - 1, b + 1, c), -2);
        }
        for j in 0..n {
            set((j, n - j, 0), (j + 1, n - j - 1, 0), 1);
            set((n - j, 0, j), (n - j - 1, 0, j + 1), 1);
            set((0, j, n - j), (0, j + 1, n - j - 1), 1);
        }
        if corner_arrows {
            set((n - 1, 0, 1), (n - 1, 1, 0), 2);
            set((1, n - 1, 0), (0, n - 1, 1), 2);
            set((0, 1, n - 1), (1, 0, n - 1), 2);
        }
        let rows = (0..size)
            .map(|i| {
                (0..size)
                    .filter_map(|j| {
                        let w = dense[i * size + j];
                        (w != 0).then_some((j, w as i32))
                    })
                    .collect()
            })
            .collect();
        Self { size, dense, rows }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.dense[i * self.size + j] as i32
    }

    /// `P·b` as a dense vector.
    fn apply(&self, b: &[i32]) -> Vec<i64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w as i64 * b[j] as i64).sum())
            .collect()
    }

    /// `aᵀ P b`.
    pub fn pairing(&self, a: &[i32], b: &[i32]) -> i64 {
        let pb = self.apply(b);
        a.iter().zip(&pb).map(|(x, y)| *x as i64 * y).sum()
    }
}

/// A triangle together with its quiver; shared by all elements of one torus.
#[derive(Debug, PartialEq, Eq)]
pub struct Torus {
    pub triangle: DiscreteTriangle,
    pub quiver: QuiverForm,
}

impl Torus {
    pub fn new(n: u32) -> Result<Arc<Self>> {
        let triangle = DiscreteTriangle::new(n)?;
        let quiver = QuiverForm::new(&triangle);
        Ok(Arc::new(Self { triangle, quiver }))
    }

    pub fn with_quiver(triangle: DiscreteTriangle, quiver: QuiverForm) -> Arc<Self> {
        Arc::new(Self { triangle, quiver })
    }

    pub fn n(&self) -> u32 {
        self.triangle.n()
    }

    pub fn zero_exps(&self) -> Exponents {
        SmallVec::from_elem(0, self.triangle.len())
    }

    pub fn unit_exps(&self, v: Vertex, power: i32) -> Result<Exponents> {
        let idx = self
            .triangle
            .index_of(v)
            .ok_or_else(|| invalid(format!("{v:?} is not a vertex for n = {}", self.n())))?;
        let mut e = self.zero_exps();
        e[idx] = power;
        Ok(e)
    }

    /// Exponent of `ω^{1/2}` relating `[X^d]` to the ordered product
    /// `X_1^{d_1/n} ⋯ X_N^{d_N/n}`: `[X^d] = (ω^{1/2})^{w} X_1^{d_1/n}⋯`.
    pub fn weyl_exponent(&self, d: &[i32]) -> i64 {
        let mut s = 0i64;
        for i in 0..d.len() {
            if d[i] == 0 {
                continue;
            }
            for j in (i + 1)..d.len() {
                s += d[i] as i64 * d[j] as i64 * self.quiver.get(i, j) as i64;
            }
        }
        -s
    }
}

/// A single scaled monomial `c·[X^d]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusMonomial {
    pub scalar: LaurentScalar,
    pub exps: Exponents,
}

impl TorusMonomial {
    pub fn degree(&self) -> &[i32] {
        &self.exps
    }
}

/// The Weyl normalization of `X_1^{d_1/n}⋯X_N^{d_N/n}` in the fixed vertex order.
pub fn weyl_order(torus: &Torus, d: &[i32]) -> TorusMonomial {
    TorusMonomial {
        scalar: LaurentScalar::monomial(torus.weyl_exponent(d), 1),
        exps: SmallVec::from_slice(d),
    }
}

/// `a ≥ b` pointwise and `a ≠ b`.
pub fn strictly_dominates(a: &[i32], b: &[i32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a != b
}

fn add_exps(a: &[i32], b: &[i32]) -> Exponents {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[derive(Clone, PartialEq, Eq)]
pub struct TorusElement {
    torus: Arc<Torus>,
    terms: BTreeMap<Exponents, LaurentScalar>,
}

impl TorusElement {
    pub fn zero(torus: &Arc<Torus>) -> Self {
        Self {
            torus: torus.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(torus: &Arc<Torus>) -> Self {
        Self::monomial(torus, torus.zero_exps(), LaurentScalar::one())
    }

    pub fn monomial(torus: &Arc<Torus>, exps: Exponents, scalar: LaurentScalar) -> Self {
        let mut e = Self::zero(torus);
        if !scalar.is_zero() {
            e.terms.insert(exps, scalar);
        }
        e
    }

    /// `X_v^{power/n}`.
    pub fn generator(torus: &Arc<Torus>, v: Vertex, power: i32) -> Result<Self> {
        Ok(Self::monomial(torus, torus.unit_exps(v, power)?, LaurentScalar::one()))
    }

    pub fn torus(&self) -> &Arc<Torus> {
        &self.torus
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, LaurentScalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_monomial(&self) -> Option<TorusMonomial> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, s) = self.terms.iter().next()?;
        Some(TorusMonomial {
            scalar: s.clone(),
            exps: e.clone(),
        })
    }

    pub fn add_term(&mut self, exps: Exponents, scalar: &LaurentScalar) {
        if scalar.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(scalar.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += scalar;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.torus.n() != other.torus.n() {
            return Err(Error::ContextMismatch(format!(
                "torus for n = {} vs n = {}",
                self.torus.n(),
                other.torus.n()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, s) in &other.terms {
            out.add_term(e.clone(), s);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-LaurentScalar::one()))
    }

    pub fn scale(&self, s: &LaurentScalar) -> Self {
        let mut out = Self::zero(&self.torus);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &(c * s));
        }
        out
    }

    /// Product in the quantum torus.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.product(other, true)
    }

    /// Product of the underlying commuting Laurent polynomials, ignoring `P`.
    pub fn mul_commutative(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.product(other, false)
    }

    fn product(&self, other: &Self, twisted: bool) -> Result<Self> {
        let q = &self.torus.quiver;
        let rhs: Vec<(&Exponents, &LaurentScalar, Vec<i64>)> = other
            .terms
            .iter()
            .map(|(e, s)| (e, s, if twisted { q.apply(e) } else { Vec::new() }))
            .collect();
        let mut out = Self::zero(&self.torus);
        for (ea, sa) in &self.terms {
            for (eb, sb, pb) in &rhs {
                let twist: i64 = if twisted {
                    ea.iter().zip(pb).map(|(x, y)| *x as i64 * y).sum()
                } else {
                    0
                };
                out.add_term(add_exps(ea, eb), &(sa * *sb).shift(twist));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::one(&self.torus);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The term whose degree strictly dominates every other degree, if any.
    pub fn highest_degree(&self) -> Option<TorusMonomial> {
        let key = |e: &Exponents| e.iter().map(|x| *x as i64).sum::<i64>();
        let (best, s) = self.terms.iter().max_by_key(|(e, _)| key(e))?;
        for e in self.terms.keys() {
            if e != best && !strictly_dominates(best, e) {
                return None;
            }
        }
        Some(TorusMonomial {
            scalar: s.clone(),
            exps: best.clone(),
        })
    }

    /// Relabels exponents by `(a,b,c) ↦ (c,a,b)` applied `steps` times.
    pub fn rotate_vertices(&self, steps: u32) -> Self {
        let tri = &self.torus.triangle;
        let perm: Vec<usize> = (0..tri.len())
            .map(|i| {
                let mut v = tri.vertex(i);
                for _ in 0..steps % 3 {
                    v = DiscreteTriangle::rotate(v);
                }
                tri.index_of(v).expect("rotation preserves the vertex set")
            })
            .collect();
        let mut out = Self::zero(&self.torus);
        for (e, s) in &self.terms {
            let mut r = self.torus.zero_exps();
            for (i, x) in e.iter().enumerate() {
                r[perm[i]] = *x;
            }
            out.add_term(r, s);
        }
        out
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, s)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({s})[X^{:?}]", e.as_slice())?;
        }
        Ok(())
    }
}

fn exps_json(tri: &DiscreteTriangle, e: &[i32]) -> serde_json::Map<String, serde_json::Value> {
    let mut m = serde_json::Map::new();
    for (i, x) in e.iter().enumerate() {
        if *x != 0 {
            let (a, b, c) = tri.vertex(i);
            m.insert(format!("{a},{b},{c}"), (*x).into());
        }
    }
    m
}

impl Serialize for TorusElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let tri = &self.torus.triangle;
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                serde_json::json!({
                    "scalar": c,
                    "exp": exps_json(tri, e),
                })
            })
            .collect();
        let mut st = s.serialize_struct("TorusElement", 2)?;
        st.serialize_field("triangle_n", &self.torus.n())?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// Elements of the tensor product of two triangle tori.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorElement {
    left: Arc<Torus>,
    right: Arc<Torus>,
    terms: BTreeMap<(Exponents, Exponents), LaurentScalar>,
}

impl TensorElement {
    pub fn zero(left: &Arc<Torus>, right: &Arc<Torus>) -> Self {
        Self {
            left: left.clone(),
            right: right.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(left: &Arc<Torus>, right: &Arc<Torus>) -> Self {
        let mut t = Self::zero(left, right);
        t.add_term((left.zero_exps(), right.zero_exps()), &LaurentScalar::one());
        t
    }

    /// `a ⊗ b`.
    pub fn pure(a: &TorusElement, b: &TorusElement) -> Self {
        let mut t = Self::zero(&a.torus, &b.torus);
        for (ea, sa) in &a.terms {
            for (eb, sb) in &b.terms {
                t.add_term((ea.clone(), eb.clone()), &(sa * sb));
            }
        }
        t
    }

    pub fn terms(&self) -> &BTreeMap<(Exponents, Exponents), LaurentScalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn left_torus(&self) -> &Arc<Torus> {
        &self.left
    }

    pub fn right_torus(&self) -> &Arc<Torus> {
        &self.right
    }

    pub fn add_term(&mut self, key: (Exponents, Exponents), scalar: &LaurentScalar) {
        if scalar.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(scalar.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += scalar;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.left.n() != other.left.n() || self.right.n() != other.right.n() {
            return Err(Error::ContextMismatch("tensor factors differ in rank".into()));
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check(other)?;
        for (k, s) in &other.terms {
            self.add_term(k.clone(), s);
        }
        Ok(())
    }

    pub fn scale(&self, s: &LaurentScalar) -> Self {
        let mut out = Self::zero(&self.left, &self.right);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), &(c * s));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let ql = &self.left.quiver;
        let qr = &self.right.quiver;
        let rhs: Vec<_> = other
            .terms
            .iter()
            .map(|((l, r), s)| (l, r, s, ql.apply(l), qr.apply(r)))
            .collect();
        let mut out = Self::zero(&self.left, &self.right);
        for ((la, ra), sa) in &self.terms {
            for (lb, rb, sb, plb, prb) in &rhs {
                let twist: i64 = la.iter().zip(plb).map(|(x, y)| *x as i64 * y).sum::<i64>()
                    + ra.iter().zip(prb).map(|(x, y)| *x as i64 * y).sum::<i64>();
                out.add_term((add_exps(la, lb), add_exps(ra, rb)), &(sa * *sb).shift(twist));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::one(&self.left, &self.right);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The term whose degree pair strictly dominates all others in the product order.
    pub fn highest_degree(&self) -> Option<(Exponents, Exponents, LaurentScalar)> {
        let key = |(l, r): &(Exponents, Exponents)| {
            l.iter().chain(r.iter()).map(|x| *x as i64).sum::<i64>()
        };
        let (best, s) = self.terms.iter().max_by_key(|(k, _)| key(k))?;
        for k in self.terms.keys() {
            if k == best {
                continue;
            }
            let ge = best.0.iter().zip(&k.0).all(|(x, y)| x >= y)
                && best.1.iter().zip(&k.1).all(|(x, y)| x >= y);
            if !ge {
                return None;
            }
        }
        Some((best.0.clone(), best.1.clone(), s.clone()))
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((l, r), s)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({s})[X^{:?}]⊗[X^{:?}]", l.as_slice(), r.as_slice())?;
        }
        Ok(())
    }
}

impl Serialize for TensorElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|((l, r), c)| {
                serde_json::json!({
                    "scalar": c,
                    "left": exps_json(&self.left.triangle, l),
                    "right": exps_json(&self.right.triangle, r),
                })
            })
            .collect();
        let mut st = s.serialize_struct("TensorElement", 2)?;
        st.serialize_field("triangle_n", &self.left.n())?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn torus(n: u32) -> Arc<Torus> {
        Torus::new(n).unwrap()
    }

    /// Independent oracle: multiply ordered products of single generators
    /// using only the pairwise commutation rule.
    fn ordered_product_scalar(t: &Torus, factors: &[(usize, i32)]) -> (Exponents, i64) {
        // Sort the word into vertex order by adjacent swaps, tracking ω^{1/2} powers.
        let mut word = factors.to_vec();
        let mut exp = 0i64;
        let len = word.len();
        for i in 0..len {
            for j in 0..len - 1 - i {
                let (u, a) = word[j];
                let (v, b) = word[j + 1];
                if u > v {
                    // X_u^a X_v^b = ω^{ab P_uv} X_v^b X_u^a
                    exp += 2 * (a as i64) * (b as i64) * t.quiver.get(u, v) as i64;
                    word.swap(j, j + 1);
                }
            }
        }
        let mut d = t.zero_exps();
        for (u, a) in word {
            d[u] += a;
        }
        // ordered product = (ω^{1/2})^{-weyl} [X^d]
        (d.clone(), exp - t.weyl_exponent(&d))
    }

    #[test]
    fn triangle_sizes() {
        let t2 = DiscreteTriangle::new(2).unwrap();
        assert_eq!(t2.vertices(), &[(0, 1, 1), (1, 0, 1), (1, 1, 0)]);
        assert_eq!(DiscreteTriangle::new(3).unwrap().len(), 7);
        let t4 = DiscreteTriangle::new(4).unwrap();
        assert_eq!(t4.len(), 12);
        let interior: Vec<_> =
            t4.vertices().iter().copied().filter(|v| DiscreteTriangle::is_interior(*v)).collect();
        assert_eq!(interior, vec![(1, 1, 2), (1, 2, 1), (2, 1, 1)]);
        for n in 2..=8 {
            let t = DiscreteTriangle::new(n).unwrap();
            assert_eq!(t.len() as u32, (n + 1) * (n + 2) / 2 - 3);
        }
        assert!(DiscreteTriangle::new(1).is_err());
    }

    #[test]
    fn quiver_small_cases() {
        let t = DiscreteTriangle::new(2).unwrap();
        let p = QuiverForm::new(&t);
        let idx = |v| t.index_of(v).unwrap();
        assert_eq!(p.get(idx((1, 1, 0)), idx((0, 1, 1))), 2);
        assert_eq!(p.get(idx((1, 0, 1)), idx((1, 1, 0))), 2);
        assert_eq!(p.get(idx((0, 1, 1)), idx((1, 0, 1))), 2);
        let bare = QuiverForm::without_corner_arrows(&t);
        assert_eq!(bare.get(idx((1, 1, 0)), idx((0, 1, 1))), 0);

        let t = DiscreteTriangle::new(3).unwrap();
        let p = QuiverForm::new(&t);
        let c = t.index_of((1, 1, 1)).unwrap();
        let nonzero: Vec<i32> = (0..t.len()).map(|j| p.get(c, j)).filter(|w| *w != 0).collect();
        assert_eq!(nonzero.len(), 6);
        assert!(nonzero.iter().all(|w| w.abs() == 2));
        assert_eq!(p.get(c, t.index_of((1, 2, 0)).unwrap()), 2);
        assert_eq!(p.get(c, t.index_of((2, 1, 0)).unwrap()), -2);
    }

    #[test]
    fn quiver_antisymmetric_and_rotation_invariant() {
        for n in 2..=6 {
            let t = DiscreteTriangle::new(n).unwrap();
            let p = QuiverForm::new(&t);
            for i in 0..t.len() {
                for j in 0..t.len() {
                    assert_eq!(p.get(i, j), -p.get(j, i));
                    assert!(p.get(i, j).abs() <= 2);
                    let ri = t.index_of(DiscreteTriangle::rotate(t.vertex(i))).unwrap();
                    let rj = t.index_of(DiscreteTriangle::rotate(t.vertex(j))).unwrap();
                    assert_eq!(p.get(i, j), p.get(ri, rj));
                }
            }
        }
    }

    #[test]
    fn multiplication_examples() {
        let t = torus(3);
        let u = (1, 1, 1);
        let x = TorusElement::generator(&t, u, 3).unwrap();
        let xi = TorusElement::generator(&t, u, -3).unwrap();
        assert_eq!(x.mul(&xi).unwrap(), TorusElement::one(&t));

        let v = (1, 2, 0);
        let xv = TorusElement::generator(&t, v, 1).unwrap();
        let xu = TorusElement::generator(&t, u, 1).unwrap();
        let uv = xu.mul(&xv).unwrap();
        let vu = xv.mul(&xu).unwrap();
        // P(u,v) = 2 so X_u X_v = ω^2 X_v X_u
        assert_eq!(uv, vu.scale(&LaurentScalar::monomial(4, 1)));

        let other = torus(4);
        assert!(matches!(
            xu.mul(&TorusElement::one(&other)),
            Err(Error::ContextMismatch(_))
        ));
    }

    #[test]
    fn weyl_examples() {
        let t = torus(3);
        let u = t.triangle.index_of((1, 1, 1)).unwrap();
        let v = t.triangle.index_of((1, 2, 0)).unwrap();
        let mut d = t.zero_exps();
        d[u] = 1;
        assert!(weyl_order(&t, &d).scalar.is_one());
        d[v] = 1;
        // u < v in vertex order and P(u,v) = 2: scalar ω^{-1}
        assert!(u < v);
        assert_eq!(weyl_order(&t, &d).scalar, LaurentScalar::monomial(-2, 1));
    }

    #[test]
    fn highest_degree_examples() {
        let t = torus(2);
        let xu = TorusElement::generator(&t, (1, 0, 1), 1).unwrap();
        let xv = TorusElement::generator(&t, (0, 1, 1), 1).unwrap();
        assert_eq!(xu.highest_degree().unwrap().exps, xu.as_monomial().unwrap().exps);
        let uv = xu.mul_commutative(&xv).unwrap();
        let e = xu.add(&uv).unwrap();
        assert_eq!(e.highest_degree().unwrap().exps, uv.as_monomial().unwrap().exps);
        assert!(xu.add(&xv).unwrap().highest_degree().is_none());
    }

    #[test]
    fn tensor_examples() {
        let t = torus(2);
        let xu = TorusElement::generator(&t, (1, 0, 1), 1).unwrap();
        let xv = TorusElement::generator(&t, (0, 1, 1), 2).unwrap();
        let one = TorusElement::one(&t);
        let a = TensorElement::pure(&xu, &one);
        let b = TensorElement::pure(&one, &xv);
        assert_eq!(a.mul(&b).unwrap(), TensorElement::pure(&xu, &xv));
        assert_eq!(b.mul(&a).unwrap(), TensorElement::pure(&xu, &xv));
        let e = TensorElement::pure(&xu.add(&xv).unwrap(), &xv);
        assert_eq!(TensorElement::one(&t, &t).mul(&e).unwrap(), e);
    }

    #[test]
    fn rotation_examples() {
        let t = torus(2);
        let x = TorusElement::generator(&t, (1, 0, 1), 1).unwrap();
        let y = TorusElement::generator(&t, (1, 1, 0), 1).unwrap();
        assert_eq!(x.rotate_vertices(1), y);
        assert_eq!(TorusElement::one(&t).rotate_vertices(1), TorusElement::one(&t));
    }

    #[test]
    fn json_shape() {
        let t = torus(2);
        let x = TorusElement::generator(&t, (1, 0, 1), -1).unwrap();
        let j = serde_json::to_value(&x).unwrap();
        assert_eq!(j["triangle_n"], 2);
        assert_eq!(j["terms"][0]["exp"]["1,0,1"], -1);
    }

    fn arb_word(len: usize) -> impl Strategy<Value = Vec<(usize, i32)>> {
        prop::collection::vec((0usize..len, -3i32..=3), 0..6)
    }

    fn arb_elem(t: Arc<Torus>) -> impl Strategy<Value = TorusElement> {
        let len = t.triangle.len();
        prop::collection::vec(
            (prop::collection::vec(-2i32..=2, len), -3i64..4, -4i64..=4),
            1..3,
        )
        .prop_map(move |terms| {
            let mut e = TorusElement::zero(&t);
            for (d, c, w) in terms {
                e.add_term(SmallVec::from_vec(d), &LaurentScalar::monomial(w, c));
            }
            e
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn associativity(n in 2u32..=5, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let t = torus(n);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rand_mono = || {
                let d: Exponents = (0..t.triangle.len()).map(|_| rng.gen_range(-3..=3)).collect();
                TorusElement::monomial(&t, d, LaurentScalar::monomial(rng.gen_range(-5..5), 1))
            };
            let (a, b, c) = (rand_mono(), rand_mono(), rand_mono());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            let one = TorusElement::one(&t);
            prop_assert_eq!(one.mul(&a).unwrap(), a.clone());
            let inv = TorusElement::monomial(
                &t,
                a.terms().keys().next().unwrap().iter().map(|x| -x).collect(),
                LaurentScalar::one(),
            );
            let prod = a.mul(&inv).unwrap();
            prop_assert_eq!(prod.as_monomial().unwrap().exps, t.zero_exps());
        }

        #[test]
        fn ordered_products_match_weyl(n in 2u32..=4, word in arb_word(3)) {
            let t = torus(n);
            let word: Vec<(usize, i32)> = word.into_iter().map(|(u, a)| (u % t.triangle.len(), a)).collect();
            let mut prod = TorusElement::one(&t);
            for (u, a) in &word {
                let mut d = t.zero_exps();
                d[*u] = *a;
                prod = prod.mul(&TorusElement::monomial(&t, d, LaurentScalar::one())).unwrap();
            }
            let (d, exp) = ordered_product_scalar(&t, &word);
            prop_assert_eq!(prod, TorusElement::monomial(&t, d, LaurentScalar::monomial(exp, 1)));
        }

        #[test]
        fn canonical_form_independent_of_order(n in 2u32..=4, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            use rand::seq::SliceRandom;
            let t = torus(n);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let factors: Vec<Exponents> = (0..4)
                .map(|_| (0..t.triangle.len()).map(|_| rng.gen_range(-2..=2)).collect())
                .collect();
            let total: Exponents = factors.iter().fold(t.zero_exps(), |acc, f| add_exps(&acc, f));
            let weyl_product = |fs: &[Exponents]| {
                let mut acc = TorusElement::one(&t);
                for f in fs {
                    acc = acc.mul(&TorusElement::monomial(&t, f.clone(), LaurentScalar::one())).unwrap();
                }
                acc
            };
            let mut shuffled = factors.clone();
            shuffled.shuffle(&mut rng);
            let a = weyl_product(&factors);
            let b = weyl_product(&shuffled);
            prop_assert_eq!(a.as_monomial().unwrap().exps, total.clone());
            prop_assert_eq!(b.as_monomial().unwrap().exps, total);
        }

        #[test]
        fn tensor_factors_commute(n in 2u32..=3, a in arb_elem(torus(2)), b in arb_elem(torus(2))) {
            let _ = n;
            let t = a.torus().clone();
            let one = TorusElement::one(&t);
            let l = TensorElement::pure(&a, &one);
            let r = TensorElement::pure(&one, &b);
            prop_assert_eq!(l.mul(&r).unwrap(), r.mul(&l).unwrap());
        }

        #[test]
        fn rotation_has_order_three(a in arb_elem(torus(3))) {
            prop_assert_eq!(a.rotate_vertices(3), a.clone());
            prop_assert_eq!(a.rotate_vertices(1).rotate_vertices(2), a);
        }
    }
}
