//! Tropical coordinate functions on the discrete triangle, Knutson–Tao rhombus
//! numbers, the cone they cut out, its Hilbert basis, and the annulus gluing.

use std::collections::{BTreeMap, HashSet};

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quantum_torus::{DiscreteTriangle, Vertex};

pub type Q = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

/// A function on the non-corner vertices; corner values are 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriangleFunction {
    n: u32,
    values: BTreeMap<Vertex, Q>,
}

impl TriangleFunction {
    pub fn zero(n: u32) -> Self {
        Self {
            n,
            values: BTreeMap::new(),
        }
    }

    pub fn from_fn(n: u32, f: impl Fn(Vertex) -> Q) -> Result<Self> {
        let tri = DiscreteTriangle::new(n)?;
        let mut out = Self::zero(n);
        for &v in tri.vertices() {
            out.set(v, f(v));
        }
        Ok(out)
    }

    /// A function of the first coordinate only; `g(0)` and `g(n)` are ignored.
    pub fn from_first_coordinate(n: u32, g: impl Fn(u32) -> Q) -> Result<Self> {
        Self::from_fn(n, |(a, _, _)| g(a))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn set(&mut self, v: Vertex, x: Q) {
        if x.is_zero() {
            self.values.remove(&v);
        } else {
            self.values.insert(v, x);
        }
    }

    pub fn get(&self, v: Vertex) -> Q {
        self.values.get(&v).copied().unwrap_or_else(Q::zero)
    }

    fn get_signed(&self, a: i64, b: i64, c: i64) -> Q {
        if a < 0 || b < 0 || c < 0 {
            return Q::zero();
        }
        self.get((a as u32, b as u32, c as u32))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(invalid("functions on different triangles"));
        }
        let mut out = self.clone();
        for (v, x) in &other.values {
            out.set(*v, out.get(*v) + x);
        }
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> Self {
        let mut out = Self::zero(self.n);
        for (v, x) in &self.values {
            out.set(*v, x * c);
        }
        out
    }

    pub fn values(&self) -> &BTreeMap<Vertex, Q> {
        &self.values
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for ((a, b, c), x) in &self.values {
            let v = if x.is_integer() {
                serde_json::Value::from(x.to_integer())
            } else {
                serde_json::Value::from(format!("{}/{}", x.numer(), x.denom()))
            };
            m.insert(format!("{a},{b},{c}"), v);
        }
        serde_json::json!({ "n": self.n, "values": m })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let n = value
            .get("n")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| invalid("missing n"))? as u32;
        let tri = DiscreteTriangle::new(n)?;
        let mut out = Self::zero(n);
        let vals = value
            .get("values")
            .and_then(|x| x.as_object())
            .ok_or_else(|| invalid("missing values"))?;
        for (key, x) in vals {
            let parts: Vec<u32> = key
                .split(',')
                .map(|p| p.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| invalid(format!("bad vertex key {key}")))?;
            if parts.len() != 3 {
                return Err(invalid(format!("bad vertex key {key}")));
            }
            let v = (parts[0], parts[1], parts[2]);
            if tri.index_of(v).is_none() {
                return Err(invalid(format!("{key} is not a non-corner vertex for n = {n}")));
            }
            out.set(v, parse_rational(x)?);
        }
        Ok(out)
    }
}

fn parse_rational(x: &serde_json::Value) -> Result<Q> {
    if let Some(i) = x.as_i64() {
        return Ok(Q::from_integer(i));
    }
    if let Some(s) = x.as_str() {
        let mut it = s.split('/');
        let num: i64 = it
            .next()
            .and_then(|p| p.trim().parse().ok())
            .ok_or_else(|| invalid(format!("bad rational {s}")))?;
        let den: i64 = match it.next() {
            Some(p) => p.trim().parse().map_err(|_| invalid(format!("bad rational {s}")))?,
            None => 1,
        };
        if den == 0 || it.next().is_some() {
            return Err(invalid(format!("bad rational {s}")));
        }
        return Ok(Q::new(num, den));
    }
    if let Some(f) = x.as_f64() {
        if f.fract() == 0.0 {
            return Ok(Q::from_integer(f as i64));
        }
    }
    Err(invalid(format!("unsupported value {x}")))
}

/// `min{kx, (n-k)(n-x)}`.
pub fn min_form(n: i64, k: i64, x: i64) -> i64 {
    (k * x).min(n * (n - k) - (n - k) * x)
}

/// `t^L_k(a,b,c) = min{f_k(a), g_k(a)}` and `t^R_k(a,b,c) = min{f_k(n-a), g_k(n-a)}`.
pub fn tropical_t(n: u32, k: u32, side: Side) -> Result<TriangleFunction> {
    if k == 0 || k >= n {
        return Err(invalid(format!("k = {k} outside 1..{}", n.saturating_sub(1))));
    }
    let (ni, ki) = (n as i64, k as i64);
    TriangleFunction::from_first_coordinate(n, |a| {
        let a = a as i64;
        let x = match side {
            Side::L => a,
            Side::R => ni - a,
        };
        if a == 0 {
            Q::zero()
        } else {
            Q::from_integer(min_form(ni, ki, x))
        }
    })
}

/// The three families `r^t`, `r^bl`, `r^br`, each indexed by `1 ≤ i ≤ n-1`,
/// `1 ≤ j ≤ n-i` (stored 0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhombusNumbers {
    pub n: u32,
    pub top: Vec<Vec<Q>>,
    pub bottom_left: Vec<Vec<Q>>,
    pub bottom_right: Vec<Vec<Q>>,
}

impl RhombusNumbers {
    pub fn all(&self) -> impl Iterator<Item = &Q> {
        self.top
            .iter()
            .chain(&self.bottom_left)
            .chain(&self.bottom_right)
            .flat_map(|r| r.iter())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let fmt = |rows: &Vec<Vec<Q>>| -> Vec<Vec<String>> {
            rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
        };
        serde_json::json!({
            "top": fmt(&self.top),
            "bottom_left": fmt(&self.bottom_left),
            "bottom_right": fmt(&self.bottom_right),
        })
    }
}

pub fn rhombus(f: &TriangleFunction) -> RhombusNumbers {
    let n = f.n() as i64;
    let g = |a: i64, b: i64, c: i64| f.get_signed(a, b, c);
    let nq = Q::from_integer(n);
    let mut top = Vec::new();
    let mut bl = Vec::new();
    let mut br = Vec::new();
    for i in 1..n {
        let mut rt = Vec::new();
        let mut rbl = Vec::new();
        let mut rbr = Vec::new();
        for j in 1..=(n - i) {
            let m = n - i - j;
            rt.push((g(m + 1, i, j - 1) + g(m, i, j) - g(m + 1, i - 1, j) - g(m, i + 1, j - 1)) / nq);
            rbl.push((g(i, j - 1, m + 1) + g(i, j, m) - g(i - 1, j, m + 1) - g(i + 1, j - 1, m)) / nq);
            rbr.push((g(j - 1, m + 1, i) + g(j, m, i) - g(j, m + 1, i - 1) - g(j - 1, m, i + 1)) / nq);
        }
        top.push(rt);
        bl.push(rbl);
        br.push(rbr);
    }
    RhombusNumbers {
        n: f.n(),
        top,
        bottom_left: bl,
        bottom_right: br,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FanClass {
    ConeC,
    Fan,
    Lattice,
    None,
}

pub fn fan_membership(f: &TriangleFunction) -> FanClass {
    let r = rhombus(f);
    if !r.all().all(|x| x.is_integer()) {
        return FanClass::None;
    }
    if !r.all().all(|x| *x >= Q::zero()) {
        return FanClass::Lattice;
    }
    let vanishes_on_a0 = f.values().iter().all(|((a, _, _), x)| *a != 0 || x.is_zero());
    if vanishes_on_a0 {
        FanClass::ConeC
    } else {
        FanClass::Fan
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertReport {
    pub n: u32,
    pub bound: u32,
    pub members: usize,
    pub basis: Vec<TriangleFunction>,
    /// The basis is exactly `{t^R_k}` and every member is recovered as
    /// `Σ_k r^bl_{k,1}(f) t^R_k`.
    pub decomposition_sound: bool,
    pub certified: bool,
}

/// Members of the cone with values in `(1/n)ℤ ∩ [0, bound]` that depend on the
/// first coordinate only, as numerator vectors `(n·f(1), …, n·f(n-1))`.
fn reduced_members(n: u32, bound: u32) -> Vec<Vec<i64>> {
    let n_i = n as i64;
    let top = bound as i64 * n_i;
    let mut out = Vec::new();
    let mut cur = vec![0i64; n as usize + 1];
    fn rec(pos: usize, n: usize, top: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        // cur holds n·f(a); curvature 2f(a) − f(a−1) − f(a+1) must be a nonnegative multiple of n·n.
        let nn = (n * n) as i64;
        let ok_at = |cur: &Vec<i64>, a: usize| {
            let c = 2 * cur[a] - cur[a - 1] - cur[a + 1];
            c >= 0 && c % nn == 0
        };
        if pos == n {
            if ok_at(cur, n - 1) {
                out.push(cur[1..n].to_vec());
            }
            return;
        }
        for v in 0..=top {
            cur[pos] = v;
            if pos >= 2 && !ok_at(cur, pos - 1) {
                continue;
            }
            rec(pos + 1, n, top, cur, out);
        }
        cur[pos] = 0;
    }
    rec(1, n as usize, top, &mut cur, &mut out);
    let _ = n_i;
    out
}

fn reduced_to_function(n: u32, v: &[i64]) -> TriangleFunction {
    TriangleFunction::from_first_coordinate(n, |a| {
        if a == 0 || a == n {
            Q::zero()
        } else {
            Q::new(v[a as usize - 1], n as i64)
        }
    })
    .expect("n >= 2")
}

fn irreducibles(members: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let set: HashSet<&Vec<i64>> = members.iter().collect();
    let nonzero: Vec<&Vec<i64>> = members.iter().filter(|m| m.iter().any(|x| *x != 0)).collect();
    let mut out = Vec::new();
    for f in &nonzero {
        let reducible = nonzero.iter().any(|g| {
            if g == f {
                return false;
            }
            let h: Vec<i64> = f.iter().zip(g.iter()).map(|(a, b)| a - b).collect();
            h.iter().any(|x| *x != 0) && set.contains(&h)
        });
        if !reducible {
            out.push((*f).clone());
        }
    }
    out.sort();
    out
}

pub fn hilbert_basis(n: u32, bound: u32) -> Result<HilbertReport> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    let members = reduced_members(n, bound);
    for m in &members {
        let f = reduced_to_function(n, m);
        if fan_membership(&f) != FanClass::ConeC {
            return Err(invalid("enumeration produced a non-member"));
        }
    }
    let basis_vecs = irreducibles(&members);
    let basis: Vec<TriangleFunction> = basis_vecs.iter().map(|v| reduced_to_function(n, v)).collect();
    let t_r: Vec<TriangleFunction> = (1..n).map(|k| tropical_t(n, k, Side::R)).collect::<Result<_>>()?;
    let same_set = basis.len() == t_r.len() && t_r.iter().all(|t| basis.contains(t));
    let mut sound = same_set;
    for m in &members {
        let f = reduced_to_function(n, m);
        let r = rhombus(&f);
        let mut acc = TriangleFunction::zero(n);
        for (k, t) in t_r.iter().enumerate() {
            let c = r.bottom_left[k][0];
            if !c.is_integer() || c < Q::zero() {
                sound = false;
                break;
            }
            acc = acc.add(&t.scale(c.to_integer()))?;
        }
        if acc != f {
            sound = false;
        }
    }
    Ok(HilbertReport {
        n,
        bound,
        members: members.len(),
        basis,
        decomposition_sound: sound,
        certified: sound && bound >= n * n,
    })
}

/// Exhaustive search over every assignment of values in `(1/n)ℤ ∩ [0, bound]`
/// to the vertices with `a > 0`, returning the cone members found. Used to
/// confirm that members depend on the first coordinate only.
pub fn brute_force_cone(n: u32, bound: u32) -> Result<Vec<TriangleFunction>> {
    let tri = DiscreteTriangle::new(n)?;
    let free: Vec<Vertex> = tri.vertices().iter().copied().filter(|v| v.0 > 0).collect();
    let top = (bound * n) as i64;
    let mut idx = vec![0i64; free.len()];
    let mut out = Vec::new();
    loop {
        let mut f = TriangleFunction::zero(n);
        for (v, x) in free.iter().zip(&idx) {
            f.set(*v, Q::new(*x, n as i64));
        }
        if fan_membership(&f) == FanClass::ConeC {
            out.push(f);
        }
        let mut p = 0;
        loop {
            if p == idx.len() {
                return Ok(out);
            }
            idx[p] += 1;
            if idx[p] <= top {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnulusFanPoint {
    pub left: TriangleFunction,
    pub right: TriangleFunction,
}

impl AnnulusFanPoint {
    pub fn satisfies_gluing(&self) -> bool {
        let n = self.left.n();
        (0..=n).all(|a| {
            self.left.get((a, 0, n - a)) == self.right.get((n - a, 0, a))
                && self.left.get((a, n - a, 0)) == self.right.get((n - a, a, 0))
        })
    }
}

/// All weak compositions of at most `total` into `parts` parts, in lexicographic order.
pub fn compositions_up_to(parts: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, total, &mut cur, &mut out);
    out
}

pub fn annulus_fan_points(n: u32, max_total: u32) -> Result<Vec<AnnulusFanPoint>> {
    let tl: Vec<TriangleFunction> = (1..n).map(|k| tropical_t(n, k, Side::L)).collect::<Result<_>>()?;
    let tr: Vec<TriangleFunction> = (1..n).map(|k| tropical_t(n, k, Side::R)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for m in compositions_up_to((n - 1) as usize, max_total) {
        let mut left = TriangleFunction::zero(n);
        let mut right = TriangleFunction::zero(n);
        for (k, mk) in m.iter().enumerate() {
            left = left.add(&tl[k].scale(*mk as i64))?;
            right = right.add(&tr[k].scale(*mk as i64))?;
        }
        out.push(AnnulusFanPoint { left, right });
    }
    Ok(out)
}

/// Every glued pair of cone members with right values bounded by `bound`
/// arises as a combination of the pairs `(t^L_k, t^R_k)`.
pub fn glued_pairs_are_generated(n: u32, bound: u32) -> Result<bool> {
    let tl: Vec<TriangleFunction> = (1..n).map(|k| tropical_t(n, k, Side::L)).collect::<Result<_>>()?;
    let tr: Vec<TriangleFunction> = (1..n).map(|k| tropical_t(n, k, Side::R)).collect::<Result<_>>()?;
    for v in reduced_members(n, bound) {
        let right = reduced_to_function(n, &v);
        let mut rev = v.clone();
        rev.reverse();
        let left = reduced_to_function(n, &rev);
        let point = AnnulusFanPoint {
            left: left.clone(),
            right: right.clone(),
        };
        if !point.satisfies_gluing() || fan_membership(&left) != FanClass::ConeC {
            return Ok(false);
        }
        let r = rhombus(&right);
        let mut l_acc = TriangleFunction::zero(n);
        let mut r_acc = TriangleFunction::zero(n);
        for k in 0..(n - 1) as usize {
            let c = r.bottom_left[k][0].to_integer();
            l_acc = l_acc.add(&tl[k].scale(c))?;
            r_acc = r_acc.add(&tr[k].scale(c))?;
        }
        if l_acc != left || r_acc != right {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `T_{ij} = t^R_j(n-i)` for `1 ≤ i, j ≤ n-1`.
pub fn t_matrix(n: u32) -> Vec<Vec<i64>> {
    let ni = n as i64;
    (1..ni)
        .map(|i| (1..ni).map(|j| min_form(ni, j, ni - (ni - i))).collect())
        .collect()
}

/// `(1/n)` times the band with `2` on the anti-diagonal and `-1` beside it.
pub fn t_inverse_band(n: u32) -> Vec<Vec<Q>> {
    let ni = n as i64;
    (1..ni)
        .map(|i| {
            (1..ni)
                .map(|j| {
                    let d = i + j - ni;
                    let v = match d.abs() {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    };
                    Q::new(v, ni)
                })
                .collect()
        })
        .collect()
}

pub fn t_times_band_is_identity(n: u32) -> bool {
    let t = t_matrix(n);
    let b = t_inverse_band(n);
    let m = t.len();
    (0..m).all(|i| {
        (0..m).all(|j| {
            let s: Q = (0..m).map(|k| Q::from_integer(t[i][k]) * b[k][j]).sum();
            s == if i == j { Q::one() } else { Q::zero() }
        })
    })
}
