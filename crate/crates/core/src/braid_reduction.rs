//! Reduction of annular braid closures to polynomials in the power knots `γ_m`.
//!
//! A braid word on `m` strands is read bottom to top; its closure wraps
//! around the annulus. In a positive letter `σ_i` the strand moving from
//! position `i+1` to position `i` passes over. Crossings are switched with
//! the crossing relation until the components are stacked in height and each
//! component is ascending from its lowest strand; an ascending knot on `m`
//! strands is `γ_m` up to a kink factor fixed by its writhe.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use itertools::Itertools;
use nalgebra::{DMatrix, Schur};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::gcd;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::biangle_counit::perm_length;
use crate::error::{invalid, Error, Result};
use crate::scalars::{in_bad_set, qint, LaurentScalar, RingContext, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: u32,
    /// Signed generator indices: `i` is `σ_i`, `-i` is `σ_i^{-1}`.
    pub word: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: u32, word: Vec<i32>) -> Result<Self> {
        if strands == 0 {
            return Err(invalid("a braid needs at least one strand"));
        }
        for &x in &word {
            if x == 0 || x.unsigned_abs() >= strands {
                return Err(invalid(format!("generator {x} outside ±1..±{}", strands - 1)));
            }
        }
        Ok(Self { strands, word })
    }

    pub fn parse(strands: u32, text: &str) -> Result<Self> {
        let word = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<i32>().map_err(|_| invalid(format!("bad generator {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(strands, word)
    }

    pub fn identity(strands: u32) -> Self {
        Self {
            strands,
            word: Vec::new(),
        }
    }

    /// `σ_{m-1} ⋯ σ_1`, whose closure is `γ_m`.
    pub fn gamma(m: u32) -> Self {
        Self {
            strands: m,
            word: (1..m as i32).rev().collect(),
        }
    }

    /// Positive lift of a permutation given by its images `p(s)` (0-based),
    /// so that the strand starting at position `s` ends at position `p(s)`.
    pub fn positive_lift(perm: &[usize]) -> Self {
        let m = perm.len();
        let mut cur: Vec<usize> = perm.to_vec();
        let mut word = Vec::new();
        loop {
            let Some(i) = (0..m.saturating_sub(1)).find(|&i| cur[i] > cur[i + 1]) else {
                break;
            };
            cur.swap(i, i + 1);
            word.push(i as i32 + 1);
        }
        Self {
            strands: m as u32,
            word,
        }
    }

    /// Removes adjacent inverse pairs until none remain.
    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<i32> = Vec::with_capacity(self.word.len());
        for &x in &self.word {
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        Self {
            strands: self.strands,
            word: out,
        }
    }

    pub fn writhe(&self) -> i64 {
        self.word.iter().map(|x| x.signum() as i64).sum()
    }

    fn trace(&self) -> Trace {
        let m = self.strands as usize;
        let mut at: Vec<usize> = (0..m).collect();
        let mut crossings = Vec::with_capacity(self.word.len());
        for &x in &self.word {
            let i = x.unsigned_abs() as usize - 1;
            let (up, down) = (at[i], at[i + 1]);
            crossings.push(Crossing {
                pos: i,
                rising: up,
                falling: down,
            });
            at.swap(i, i + 1);
        }
        let mut end = vec![0; m];
        for (p, &s) in at.iter().enumerate() {
            end[s] = p;
        }
        Trace { crossings, end }
    }

    /// Cycles of the underlying permutation, each starting at its smallest position.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components_of(&self.trace().end)
    }
}

#[derive(Debug, Clone, Copy)]
struct Crossing {
    pos: usize,
    /// Strand (named by its bottom position) moving from `pos` to `pos+1`.
    rising: usize,
    /// Strand moving from `pos+1` to `pos`.
    falling: usize,
}

struct Trace {
    crossings: Vec<Crossing>,
    end: Vec<usize>,
}

fn components_of(end: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; end.len()];
    let mut out = Vec::new();
    for s in 0..end.len() {
        if seen[s] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut t = s;
        while !seen[t] {
            seen[t] = true;
            cyc.push(t);
            t = end[t];
        }
        out.push(cyc);
    }
    out
}

/// A polynomial in the commuting power knots, keyed by the sorted multiset
/// of winding numbers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GammaPolynomial {
    terms: BTreeMap<Vec<u32>, LaurentScalar>,
}

impl GammaPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(gammas: Vec<u32>, coeff: LaurentScalar) -> Self {
        let mut p = Self::zero();
        p.add_term(gammas, &coeff);
        p
    }

    pub fn one() -> Self {
        Self::monomial(Vec::new(), LaurentScalar::one())
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, LaurentScalar> {
        &self.terms
    }

    pub fn coeff(&self, gammas: &[u32]) -> LaurentScalar {
        let mut key = gammas.to_vec();
        key.sort_unstable();
        self.terms.get(&key).cloned().unwrap_or_else(LaurentScalar::zero)
    }

    pub fn add_term(&mut self, mut gammas: Vec<u32>, c: &LaurentScalar) {
        if c.is_zero() {
            return;
        }
        gammas.sort_unstable();
        let e = self.terms.entry(gammas).or_insert_with(LaurentScalar::zero);
        *e += c;
        if e.is_zero() {
            let key: Vec<_> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &LaurentScalar) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), &(v * c));
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let key: Vec<u32> = ka.iter().chain(kb).copied().collect();
                out.add_term(key, &(va * vb));
            }
        }
        out
    }

    /// Every monomial has total winding `m`.
    pub fn conserves_winding(&self, m: u32) -> bool {
        self.terms.keys().all(|k| k.iter().sum::<u32>() == m)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let monomials: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(k, v)| serde_json::json!({ "gammas": k, "coeff": v }))
            .collect();
        serde_json::json!({ "monomials": monomials })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let list = value
            .get("monomials")
            .and_then(|m| m.as_array())
            .ok_or_else(|| invalid("missing monomials"))?;
        let mut out = Self::zero();
        for item in list {
            let gammas: Vec<u32> = serde_json::from_value(item.get("gammas").cloned().unwrap_or_default())
                .map_err(|e| invalid(format!("bad gammas: {e}")))?;
            if gammas.contains(&0) {
                return Err(invalid("winding numbers must be positive"));
            }
            let coeff: LaurentScalar = serde_json::from_value(item.get("coeff").cloned().unwrap_or_default())
                .map_err(|e| invalid(format!("bad coefficient: {e}")))?;
            out.add_term(gammas, &coeff);
        }
        Ok(out)
    }
}

/// Constants of the crossing relation `α_+ X_+ + α_- X_- = α_0 X_0`, the
/// positive-kink factor, and the unknot value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeinConstants {
    pub alpha_plus: LaurentScalar,
    pub alpha_minus: LaurentScalar,
    pub alpha_zero: LaurentScalar,
    pub kink: LaurentScalar,
    pub unknot: LaurentScalar,
}

impl SkeinConstants {
    pub fn standard(ctx: RingContext) -> Self {
        let n = ctx.n() as i64;
        let sign = if n % 2 == 1 { 1 } else { -1 };
        Self {
            alpha_plus: ctx.q_root_pow(1),
            alpha_minus: -ctx.q_root_pow(-1),
            alpha_zero: &ctx.q() - &ctx.q_pow(-1),
            kink: ctx.q_root_pow(n * n - 1).scale(&BigInt::from(sign)),
            unknot: qint(ctx, ctx.n()),
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("bad skein constants: {e}")))
    }

    fn validate(&self) -> Result<()> {
        if !self.alpha_plus.is_unit() || !self.alpha_minus.is_unit() || !self.kink.is_unit() {
            return Err(Error::NonUnitDivision);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

pub struct Reducer {
    consts: SkeinConstants,
    strategy: Strategy,
    memo: HashMap<BraidWord, GammaPolynomial>,
    // X_+ = plus_zero·X_0 + plus_minus·X_-, X_- = minus_zero·X_0 + minus_plus·X_+
    plus_zero: LaurentScalar,
    plus_minus: LaurentScalar,
    minus_zero: LaurentScalar,
    minus_plus: LaurentScalar,
}

impl Reducer {
    pub fn new(consts: SkeinConstants, strategy: Strategy) -> Result<Self> {
        consts.validate()?;
        let ap = consts.alpha_plus.inverse()?;
        let am = consts.alpha_minus.inverse()?;
        Ok(Self {
            plus_zero: &ap * &consts.alpha_zero,
            plus_minus: -(&ap * &consts.alpha_minus),
            minus_zero: &am * &consts.alpha_zero,
            minus_plus: -(&am * &consts.alpha_plus),
            consts,
            strategy,
            memo: HashMap::new(),
        })
    }

    pub fn standard(ctx: RingContext) -> Self {
        Self::new(SkeinConstants::standard(ctx), Strategy::Leftmost).expect("standard constants are units")
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn reduce(&mut self, beta: &BraidWord) -> Result<GammaPolynomial> {
        let beta = beta.free_reduce();
        if let Some(p) = self.memo.get(&beta) {
            return Ok(p.clone());
        }
        let out = self.reduce_uncached(&beta)?;
        self.memo.insert(beta, out.clone());
        Ok(out)
    }

    fn pick(&self, bad: &[usize]) -> Option<usize> {
        match self.strategy {
            Strategy::Leftmost => bad.first().copied(),
            Strategy::Rightmost => bad.last().copied(),
        }
    }

    fn reduce_uncached(&mut self, beta: &BraidWord) -> Result<GammaPolynomial> {
        let tr = beta.trace();
        let comps = components_of(&tr.end);
        let mut comp_of = vec![0usize; beta.strands as usize];
        for (c, cyc) in comps.iter().enumerate() {
            for &s in cyc {
                comp_of[s] = c;
            }
        }
        if comps.len() > 1 {
            // Components are stacked with the one holding position 1 lowest.
            let bad: Vec<usize> = tr
                .crossings
                .iter()
                .enumerate()
                .filter(|(t, c)| {
                    let (ca, cb) = (comp_of[c.rising], comp_of[c.falling]);
                    ca != cb && {
                        let over = over_strand(beta.word[*t], c);
                        let under = if over == c.rising { c.falling } else { c.rising };
                        comp_of[over] < comp_of[under]
                    }
                })
                .map(|(t, _)| t)
                .collect();
            if let Some(t) = self.pick(&bad) {
                return self.switch(beta, t);
            }
            let mut out = GammaPolynomial::one();
            for c in 0..comps.len() {
                let sub = restrict(beta, &tr, &comp_of, c);
                out = out.mul(&self.reduce(&sub)?);
            }
            return Ok(out);
        }
        // One component: ascending from the strand at position 1.
        let mut ord = vec![0usize; beta.strands as usize];
        let mut s = 0;
        for k in 0..beta.strands as usize {
            ord[s] = k;
            s = tr.end[s];
        }
        let bad: Vec<usize> = tr
            .crossings
            .iter()
            .enumerate()
            .filter(|(t, c)| {
                let later = if ord[c.rising] > ord[c.falling] { c.rising } else { c.falling };
                over_strand(beta.word[*t], c) != later
            })
            .map(|(t, _)| t)
            .collect();
        if let Some(t) = self.pick(&bad) {
            return self.switch(beta, t);
        }
        let m = beta.strands;
        let framing = beta.writhe() - (m as i64 - 1);
        Ok(GammaPolynomial::monomial(vec![m], self.consts.kink.powi(framing)?))
    }

    fn switch(&mut self, beta: &BraidWord, t: usize) -> Result<GammaPolynomial> {
        let letter = beta.word[t];
        let mut smoothed = beta.clone();
        smoothed.word.remove(t);
        let mut flipped = beta.clone();
        flipped.word[t] = -letter;
        let (c0, c1) = if letter > 0 {
            (self.plus_zero.clone(), self.plus_minus.clone())
        } else {
            (self.minus_zero.clone(), self.minus_plus.clone())
        };
        let mut out = GammaPolynomial::zero();
        if !c0.is_zero() {
            let p0 = self.reduce(&smoothed)?;
            out.add_scaled(&p0, &c0);
        }
        let p1 = self.reduce(&flipped)?;
        out.add_scaled(&p1, &c1);
        Ok(out)
    }
}

fn over_strand(letter: i32, c: &Crossing) -> usize {
    if letter > 0 {
        c.falling
    } else {
        c.rising
    }
}

/// The braid on the strands of one component, dropping every crossing with
/// other components.
fn restrict(beta: &BraidWord, tr: &Trace, comp_of: &[usize], c: usize) -> BraidWord {
    let m = beta.strands as usize;
    let mut at: Vec<usize> = (0..m).collect();
    let mut word = Vec::new();
    for (t, cr) in tr.crossings.iter().enumerate() {
        if comp_of[cr.rising] == c && comp_of[cr.falling] == c {
            let local = at[..cr.pos].iter().filter(|s| comp_of[**s] == c).count();
            word.push((local as i32 + 1) * beta.word[t].signum());
        }
        at.swap(cr.pos, cr.pos + 1);
    }
    let strands = comp_of.iter().filter(|x| **x == c).count() as u32;
    BraidWord { strands, word }
}

pub fn close_and_reduce(beta: &BraidWord, consts: &SkeinConstants, strategy: Strategy) -> Result<GammaPolynomial> {
    Reducer::new(consts.clone(), strategy)?.reduce(beta)
}

/// The coefficient of `γ_i` in the reduction of an `i`-strand braid.
pub fn p_beta(reducer: &mut Reducer, beta: &BraidWord) -> Result<LaurentScalar> {
    Ok(reducer.reduce(beta)?.coeff(&[beta.strands]))
}

/// `P_i = Σ_{σ ∈ Sym_i} (-q^{(1-n)/n})^{ℓ(σ)} P_{σ̃_+}`.
pub fn p_i(ctx: RingContext, reducer: &mut Reducer, i: u32) -> Result<LaurentScalar> {
    if i == 0 {
        return Err(invalid("i must be at least 1"));
    }
    let weight = -ctx.q_root_pow(1 - ctx.n() as i64);
    let mut total = LaurentScalar::zero();
    for perm in (0..i as usize).permutations(i as usize) {
        let len = perm_length(&perm.iter().map(|x| *x as u32).collect::<Vec<_>>());
        let beta = BraidWord::positive_lift(&perm);
        let p = p_beta(reducer, &beta)?;
        total += &(&weight.pow(len as u32) * &p);
    }
    Ok(total)
}

/// Integer polynomial coefficients, lowest degree first.
pub fn cyclotomic(d: u32) -> Vec<i64> {
    let mut num = vec![0i64; d as usize + 1];
    num[0] = -1;
    num[d as usize] = 1;
    for e in 1..d {
        if d % e == 0 {
            num = poly_div_exact(&num, &cyclotomic(e));
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = *den.last().expect("nonzero divisor");
    let mut quot = vec![0i64; rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd] / lead;
        quot[k] = c;
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|x| *x == 0));
    quot
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `∏_{j=2}^{i-1} ∏_{ζ^{2j}=1, ζ≠±1} (q - ζ)`, one factor per pair `(j, ζ)`.
pub fn root_product(i: u32) -> Vec<i64> {
    let mut acc = vec![1];
    for j in 2..i {
        for d in 3..=2 * j {
            if (2 * j) % d == 0 {
                acc = poly_mul(&acc, &cyclotomic(d));
            }
        }
    }
    acc
}

/// `(-1)^{i-1} q^{-(i-1)^2 + (i-1)/n} ∏ (q - ζ)`.
pub fn p_closed_form(ctx: RingContext, i: u32) -> LaurentScalar {
    let a = i as i64 - 1;
    let mut poly = LaurentScalar::zero();
    for (k, c) in root_product(i).iter().enumerate() {
        poly += &ctx.q_pow(k as i64).scale(&BigInt::from(*c));
    }
    let sign = if a % 2 == 0 { 1 } else { -1 };
    let pre = (&ctx.q_pow(-a * a) * &ctx.q_root_pow(a)).scale(&BigInt::from(sign));
    &pre * &poly
}

#[derive(Debug, Clone, Serialize)]
pub struct RootsReport {
    /// Distinct roots in `q^{1/n}`, as `[re, im]`.
    pub roots: Vec<[f64; 2]>,
    pub all_in_bad_set: bool,
    /// Largest `|P(x)|` over the reported roots after polishing.
    pub max_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormReport {
    pub n: u32,
    pub i: u32,
    pub p_i: LaurentScalar,
    pub closed_form: LaurentScalar,
    pub matches: bool,
    pub value_at_plus_one: String,
    pub value_at_minus_one: String,
    pub expected_at_plus_one: String,
    pub expected_at_minus_one: String,
    pub roots: RootsReport,
}

/// Integer coefficients of `P` as a polynomial in `y = x^g`, `x = q^{1/n}`,
/// after clearing the lowest power; `g` is the gcd of the exponent gaps.
fn as_reduced_polynomial(ctx: RingContext, p: &LaurentScalar) -> Result<(Vec<BigInt>, u32)> {
    let unit = ctx.q_root_unit();
    let lo = p.min_exp().ok_or(Error::ZeroEvaluation)?;
    let mut offsets = Vec::with_capacity(p.len());
    for (e, c) in p.terms() {
        if (e - lo) % unit != 0 {
            return Err(Error::Numeric("not a Laurent polynomial in q^{1/n}".into()));
        }
        offsets.push((((e - lo) / unit) as u64, c.clone()));
    }
    let g = offsets.iter().fold(0u64, |acc, (k, _)| gcd(acc, *k)).max(1);
    let deg = (offsets.last().map(|o| o.0).unwrap_or(0) / g) as usize;
    let mut out = vec![BigInt::zero(); deg + 1];
    for (k, c) in offsets {
        out[(k / g) as usize] = c;
    }
    Ok((out, g as u32))
}

type QPoly = Vec<BigRational>;

fn trim(mut a: QPoly) -> QPoly {
    while a.len() > 1 && a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

/// Quotient and remainder of exact polynomial division.
fn qpoly_divmod(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let b = trim(b.clone());
    let mut rem = trim(a.clone());
    if rem.len() < b.len() {
        return (vec![BigRational::zero()], rem);
    }
    let lead = b.last().expect("nonzero divisor").clone();
    let mut quot = vec![BigRational::zero(); rem.len() - b.len() + 1];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + b.len() - 1] / &lead;
        for (j, bj) in b.iter().enumerate() {
            rem[k + j] -= &c * bj;
        }
        quot[k] = c;
    }
    (trim(quot), trim(rem))
}

fn qpoly_gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut x, mut y) = (trim(a.clone()), trim(b.clone()));
    while !(y.len() == 1 && y[0].is_zero()) {
        let (_, r) = qpoly_divmod(&x, &y);
        x = y;
        y = r;
    }
    x
}

/// `p / gcd(p, p')`: the same roots, each simple.
fn square_free(c: &[BigInt]) -> Vec<f64> {
    let p: QPoly = c.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    if p.len() <= 2 {
        return c.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    }
    let dp: QPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, x)| x * BigRational::from_integer(BigInt::from(k)))
        .collect();
    let g = qpoly_gcd(&p, &dp);
    let (q, _) = qpoly_divmod(&p, &g);
    let lead = q.last().cloned().unwrap_or_else(BigRational::one);
    q.iter().map(|x| (x / &lead).to_f64().unwrap_or(f64::NAN)).collect()
}

fn eval_poly(c: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::zero();
    let mut d = Complex64::zero();
    for &a in c.iter().rev() {
        d = d * x + v;
        v = v * x + a;
    }
    (v, d)
}

fn polynomial_roots(c: &[f64], tol: f64) -> Result<(Vec<Complex64>, f64)> {
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let lead = c[deg];
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for k in 0..deg {
        comp[(0, k)] = -c[deg - 1 - k] / lead;
        if k + 1 < deg {
            comp[(k + 1, k)] = 1.0;
        }
    }
    let schur = Schur::try_new(comp, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Numeric("eigenvalue iteration did not converge".into()))?;
    let scale: f64 = c.iter().map(|x| x.abs()).sum();
    let mut roots = Vec::with_capacity(deg);
    let mut max_residual: f64 = 0.0;
    for z in schur.complex_eigenvalues().iter() {
        let mut x = *z;
        for _ in 0..50 {
            let (v, d) = eval_poly(c, x);
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            x -= step;
            if step.norm() < 1e-15 {
                break;
            }
        }
        let r = eval_poly(c, x).0.norm() / scale;
        if !r.is_finite() {
            return Err(Error::Numeric("root polishing diverged".into()));
        }
        max_residual = max_residual.max(r);
        roots.push(x);
    }
    if max_residual > tol {
        return Err(Error::Numeric(format!("root residual {max_residual:e} above {tol:e}")));
    }
    Ok((roots, max_residual))
}

/// All roots of `P` in `q^{1/n}`, and whether each gives a `q` in the bad set.
pub fn numeric_roots(ctx: RingContext, p: &LaurentScalar, tol: f64) -> Result<RootsReport> {
    let (c, g) = as_reduced_polynomial(ctx, p)?;
    let (ys, max_residual) = polynomial_roots(&square_free(&c), tol)?;
    let mut roots = Vec::with_capacity(ys.len() * g as usize);
    for y in ys {
        let (r, theta) = y.to_polar();
        for b in 0..g {
            let arg = (theta + 2.0 * std::f64::consts::PI * b as f64) / g as f64;
            roots.push(Complex64::from_polar(r.powf(1.0 / g as f64), arg));
        }
    }
    let n = ctx.n();
    let all_in_bad_set = roots.iter().all(|x| in_bad_set(x.powu(n), n, tol));
    let mut sorted: Vec<[f64; 2]> = roots.iter().map(|x| [x.re, x.im]).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(RootsReport {
        roots: sorted,
        all_in_bad_set,
        max_residual,
    })
}

fn factorial(k: u32) -> BigInt {
    (1..=k).map(BigInt::from).product()
}

/// `(-1)^{i-1} s^{(1-n)(i-1)} (i-1)!` for `q^{1/n} = s = ±1`.
pub fn expected_sign_value(n: u32, i: u32, s: i8) -> BigInt {
    let a = i as i64 - 1;
    let mut sign = if a % 2 == 0 { 1 } else { -1 };
    if s < 0 && ((1 - n as i64) * a).rem_euclid(2) == 1 {
        sign = -sign;
    }
    factorial(i - 1) * sign
}

pub fn verify_p_closed_form(ctx: RingContext, reducer: &mut Reducer, i: u32) -> Result<ClosedFormReport> {
    let p = p_i(ctx, reducer, i)?;
    let cf = p_closed_form(ctx, i);
    let roots = numeric_roots(ctx, &p, DEFAULT_TOL)?;
    Ok(ClosedFormReport {
        n: ctx.n(),
        i,
        matches: p == cf,
        value_at_plus_one: p.eval_at_q_root_sign(ctx, 1)?.to_string(),
        value_at_minus_one: p.eval_at_q_root_sign(ctx, -1)?.to_string(),
        expected_at_plus_one: expected_sign_value(ctx.n(), i, 1).to_string(),
        expected_at_minus_one: expected_sign_value(ctx.n(), i, -1).to_string(),
        p_i: p,
        closed_form: cf,
        roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(n: u32) -> RingContext {
        RingContext::new(n).unwrap()
    }

    fn random_braid(rng: &mut ChaCha8Rng, m: u32, len: usize) -> BraidWord {
        let word = (0..len)
            .map(|_| {
                let g = rng.gen_range(1..m as i32);
                if rng.gen_bool(0.5) {
                    g
                } else {
                    -g
                }
            })
            .collect();
        BraidWord::new(m, word).unwrap()
    }

    #[test]
    fn words_and_components() {
        assert_eq!(BraidWord::parse(3, "1 -2 1").unwrap().word, vec![1, -2, 1]);
        assert!(BraidWord::parse(3, "3").is_err());
        assert!(BraidWord::parse(3, "0").is_err());
        assert_eq!(BraidWord::gamma(4).components().len(), 1);
        assert_eq!(BraidWord::identity(3).components().len(), 3);
        assert_eq!(BraidWord::new(3, vec![1, 2, 1]).unwrap().components(), vec![vec![0, 2], vec![1]]);
        assert_eq!(BraidWord::new(2, vec![1, -1, 1]).unwrap().free_reduce().word, vec![1]);
        let lift = BraidWord::positive_lift(&[1, 2, 3, 0]);
        assert_eq!(lift.word.len(), 3);
        assert_eq!(lift.components().len(), 1);
    }

    #[test]
    fn basic_reductions() {
        let c = ctx(3);
        let k = SkeinConstants::standard(c);
        let id = close_and_reduce(&BraidWord::identity(2), &k, Strategy::Leftmost).unwrap();
        assert_eq!(id, GammaPolynomial::monomial(vec![1, 1], LaurentScalar::one()));
        let g2 = close_and_reduce(&BraidWord::new(2, vec![1]).unwrap(), &k, Strategy::Leftmost).unwrap();
        assert_eq!(g2, GammaPolynomial::monomial(vec![2], LaurentScalar::one()));
        for m in 1..=5 {
            let g = close_and_reduce(&BraidWord::gamma(m), &k, Strategy::Leftmost).unwrap();
            assert_eq!(g, GammaPolynomial::monomial(vec![m], LaurentScalar::one()));
        }
    }

    #[test]
    fn inverse_generator_closure() {
        let c = ctx(3);
        let k = SkeinConstants::standard(c);
        let p = close_and_reduce(&BraidWord::new(2, vec![-1]).unwrap(), &k, Strategy::Leftmost).unwrap();
        let minus_zero = &k.alpha_minus.inverse().unwrap() * &k.alpha_zero;
        let minus_plus = -(&k.alpha_minus.inverse().unwrap() * &k.alpha_plus);
        assert_eq!(p.coeff(&[1, 1]), minus_zero);
        assert_eq!(p.coeff(&[2]), minus_plus);
        assert_eq!(p.terms().len(), 2);
    }

    #[test]
    fn small_p_values() {
        for n in 2..=5 {
            let c = ctx(n);
            let mut r = Reducer::standard(c);
            assert!(p_i(c, &mut r, 1).unwrap().is_one());
            assert_eq!(p_i(c, &mut r, 2).unwrap(), -(&c.q_pow(-1) * &c.q_root_pow(1)));
        }
    }

    #[test]
    fn closed_forms() {
        for n in 2..=5 {
            let c = ctx(n);
            let mut r = Reducer::standard(c);
            for i in 1..=4 {
                let rep = verify_p_closed_form(c, &mut r, i).unwrap();
                assert!(rep.matches, "n={n} i={i}: {} vs {}", rep.p_i, rep.closed_form);
                assert_eq!(rep.value_at_plus_one, rep.expected_at_plus_one);
                assert_eq!(rep.value_at_minus_one, rep.expected_at_minus_one);
                if i < n {
                    assert!(rep.roots.all_in_bad_set, "n={n} i={i}");
                }
            }
        }
    }

    #[test]
    fn root_counts() {
        let c = ctx(4);
        let mut r = Reducer::standard(c);
        assert!(numeric_roots(c, &p_i(c, &mut r, 2).unwrap(), DEFAULT_TOL).unwrap().roots.is_empty());
        let rep = numeric_roots(c, &p_i(c, &mut r, 3).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(rep.roots.len(), 8);
        for [re, im] in rep.roots {
            let q = Complex64::new(re, im).powu(4);
            assert!((q.norm() - 1.0).abs() < 1e-9 && q.re.abs() < 1e-9);
        }
    }

    #[test]
    fn cyclotomic_examples() {
        assert_eq!(cyclotomic(1), vec![-1, 1]);
        assert_eq!(cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(root_product(3), vec![1, 0, 1]);
        assert_eq!(root_product(2), vec![1]);
        assert_eq!(root_product(4).len(), 7);
        assert_eq!(root_product(5), poly_mul(&root_product(4), &[1, 0, 1, 0, 1, 0, 1]));
    }

    #[test]
    fn confluence_and_winding() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in 2..=4 {
            let c = ctx(3);
            let k = SkeinConstants::standard(c);
            let mut left = Reducer::new(k.clone(), Strategy::Leftmost).unwrap();
            let mut right = Reducer::new(k, Strategy::Rightmost).unwrap();
            for _ in 0..10 {
                let len = rng.gen_range(0..8);
                let b = random_braid(&mut rng, m, len);
                let a = left.reduce(&b).unwrap();
                assert!(a.conserves_winding(m));
                assert_eq!(a, right.reduce(&b).unwrap(), "{b:?}");
            }
        }
    }

    #[test]
    fn specialization_at_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 4] {
            let c = ctx(n);
            let mut r = Reducer::standard(c);
            for _ in 0..10 {
                let m = rng.gen_range(1..=4);
                let len = if m == 1 { 0 } else { rng.gen_range(0..7) };
                let b = random_braid(&mut rng, m, len);
                let mut cycle_type: Vec<u32> = b.components().iter().map(|x| x.len() as u32).collect();
                cycle_type.sort_unstable();
                let p = r.reduce(&b).unwrap();
                for (key, v) in p.terms() {
                    let val = v.eval_at_q_root_sign(c, 1).unwrap();
                    let want = BigInt::from((*key == cycle_type) as i32);
                    assert_eq!(val, want, "{b:?} {key:?}");
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let c = ctx(3);
        let p = close_and_reduce(&BraidWord::new(2, vec![-1]).unwrap(), &SkeinConstants::standard(c), Strategy::Leftmost)
            .unwrap();
        assert_eq!(GammaPolynomial::from_json(&p.to_json()).unwrap(), p);
        let k = SkeinConstants::standard(c);
        let text = serde_json::to_string(&k).unwrap();
        assert_eq!(serde_json::from_str::<SkeinConstants>(&text).unwrap(), k);
    }
}
