//! Co-unit values of the biangle for source and sink webs and through strands.
//!
//! A source web with `k` legs on the left edge (states `i_1..i_k`) and
//! `n-k` legs on the right edge (states `l_1..l_{n-k}`) is nonzero only when
//! `(i_1, …, i_k, l̄_{n-k}, …, l̄_1)` is a permutation `σ` of `1..n`, where
//! `l̄ = n+1-l`. Its value is a base constant times a power of the
//! permutation factor. The sink web is treated the same way with the roles
//! of the two edges exchanged.

use std::path::Path;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalars::{qfact, LaurentScalar, RingContext};

/// Inversion count of a sequence of distinct values.
pub fn perm_length(sigma: &[u32]) -> usize {
    let mut count = 0;
    for i in 0..sigma.len() {
        for j in (i + 1)..sigma.len() {
            if sigma[i] > sigma[j] {
                count += 1;
            }
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatePattern {
    pub n: u32,
    pub k: u32,
    pub i_states: Vec<u32>,
    pub l_states: Vec<u32>,
}

impl StatePattern {
    pub fn new(n: u32, i_states: Vec<u32>, l_states: Vec<u32>) -> Result<Self> {
        let k = i_states.len() as u32;
        if k + l_states.len() as u32 != n {
            return Err(invalid("state lengths must add up to n"));
        }
        if i_states.iter().chain(&l_states).any(|s| *s == 0 || *s > n) {
            return Err(invalid(format!("states must lie in 1..{n}")));
        }
        Ok(Self {
            n,
            k,
            i_states,
            l_states,
        })
    }

    /// `(i_1, …, i_k, l̄_{n-k}, …, l̄_1)`.
    pub fn merged(&self) -> Vec<u32> {
        self.i_states
            .iter()
            .copied()
            .chain(self.l_states.iter().rev().map(|l| self.n + 1 - l))
            .collect()
    }

    pub fn is_admissible(&self) -> bool {
        self.merged().iter().all_unique()
    }
}

/// Where the powers of the permutation factor come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthRule {
    /// Count only the inversions inside each of the two blocks of `σ`.
    WithinBlocks,
    /// Count every inversion of `σ`.
    Full,
}

/// The constants entering the co-unit, stored as exponents of `ω^{1/2}` and signs
/// so that they can be rebuilt for any rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounitConstants {
    /// `base_source(n,k)`; defaults to 1.
    pub base_source: Option<LaurentScalar>,
    /// `base_sink(n,k)`; defaults to 1.
    pub base_sink: Option<LaurentScalar>,
    /// Factor per unit of length; `None` means `-q` for the ring in use.
    pub perm_factor_base: Option<LaurentScalar>,
    pub length_rule: LengthRule,
}

impl Default for CounitConstants {
    fn default() -> Self {
        Self {
            base_source: None,
            base_sink: None,
            perm_factor_base: None,
            length_rule: LengthRule::WithinBlocks,
        }
    }
}

impl CounitConstants {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("bad constants table: {e}")))
    }

    pub fn perm_factor(&self, ctx: RingContext) -> LaurentScalar {
        self.perm_factor_base.clone().unwrap_or_else(|| -ctx.q())
    }

    fn length(&self, sigma: &[u32], k: usize) -> usize {
        match self.length_rule {
            LengthRule::Full => perm_length(sigma),
            LengthRule::WithinBlocks => perm_length(&sigma[..k]) + perm_length(&sigma[k..]),
        }
    }
}

fn counit_value(
    ctx: RingContext,
    pattern: &StatePattern,
    base: &Option<LaurentScalar>,
    consts: &CounitConstants,
) -> LaurentScalar {
    if !pattern.is_admissible() {
        return LaurentScalar::zero();
    }
    let sigma = pattern.merged();
    let len = consts.length(&sigma, pattern.k as usize);
    let b = base.clone().unwrap_or_else(LaurentScalar::one);
    &b * &consts.perm_factor(ctx).pow(len as u32)
}

/// Source web with `k` legs (states `i`) and `n-k` legs (states `l`).
pub fn counit_source(
    ctx: RingContext,
    pattern: &StatePattern,
    consts: &CounitConstants,
) -> LaurentScalar {
    counit_value(ctx, pattern, &consts.base_source, consts)
}

/// Sink web with `n-k` legs (states `l′`) and `k` legs (states `i′`); the
/// pattern's `i_states` hold `l′` and its `l_states` hold `i′`.
pub fn counit_sink(
    ctx: RingContext,
    pattern: &StatePattern,
    consts: &CounitConstants,
) -> LaurentScalar {
    counit_value(ctx, pattern, &consts.base_sink, consts)
}

pub fn counit_through_strand(i: u32, j: u32) -> LaurentScalar {
    if i == j {
        LaurentScalar::one()
    } else {
        LaurentScalar::zero()
    }
}

/// Brute-force `Σ_{σ ∈ Sym_k} (-q)^{2ℓ(σ)}`.
pub fn qsum_over_symmetric_group(ctx: RingContext, k: u32) -> LaurentScalar {
    let f = (-ctx.q()).pow(2);
    let mut acc = LaurentScalar::zero();
    for p in (1..=k).permutations(k as usize) {
        acc += &f.pow(perm_length(&p) as u32);
    }
    acc
}

/// `q^{k(k-1)/2}[k]!`.
pub fn qsum_closed_form(ctx: RingContext, k: u32) -> LaurentScalar {
    &ctx.q_pow((k as i64) * (k as i64 - 1) / 2) * &qfact(ctx, k)
}

/// Checks the collected co-unit identity for one sorted admissible choice of
/// states: summing sink times source over simultaneous permutations of the
/// two blocks gives the sorted product times
/// `q^{(n-k)(n-k-1)/2}[n-k]! q^{k(k-1)/2}[k]!`.
pub fn check_collected_identity(
    ctx: RingContext,
    k: u32,
    i_sorted: &[u32],
    l_sorted: &[u32],
    consts: &CounitConstants,
) -> Result<bool> {
    let n = ctx.n();
    let source = |i: Vec<u32>, l: Vec<u32>| -> Result<LaurentScalar> {
        Ok(counit_source(ctx, &StatePattern::new(n, i, l)?, consts))
    };
    let sink = |l: Vec<u32>, i: Vec<u32>| -> Result<LaurentScalar> {
        Ok(counit_sink(ctx, &StatePattern::new(n, l, i)?, consts))
    };
    let base = &sink(l_sorted.to_vec(), i_sorted.to_vec())? * &source(i_sorted.to_vec(), l_sorted.to_vec())?;
    let mut total = LaurentScalar::zero();
    for sk in (0..k as usize).permutations(k as usize) {
        let i: Vec<u32> = sk.iter().map(|&x| i_sorted[x]).collect();
        for sl in (0..(n - k) as usize).permutations((n - k) as usize) {
            let l: Vec<u32> = sl.iter().map(|&x| l_sorted[x]).collect();
            total += &(&sink(l.clone(), i.clone())? * &source(i.clone(), l)?);
        }
    }
    let expect = &(&qsum_closed_form(ctx, n - k) * &qsum_closed_form(ctx, k)) * &base;
    Ok(!base.is_zero() && total == expect)
}

/// All sorted admissible state choices: `i` and `l` increasing with
/// `{i} ∪ {l̄}` the full set.
pub fn sorted_admissible_patterns(n: u32, k: u32) -> Vec<(Vec<u32>, Vec<u32>)> {
    (1..=n)
        .combinations(k as usize)
        .map(|i| {
            let mut l: Vec<u32> = (1..=n).filter(|x| !i.contains(x)).map(|x| n + 1 - x).collect();
            l.sort_unstable();
            (i, l)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32) -> RingContext {
        RingContext::new(n).unwrap()
    }

    #[test]
    fn perm_length_examples() {
        assert_eq!(perm_length(&[1, 2, 3, 4]), 0);
        assert_eq!(perm_length(&[2, 1]), 1);
        assert_eq!(perm_length(&[3, 1, 2, 4]), 2);
    }

    #[test]
    fn source_examples() {
        let c = ctx(2);
        let k = CounitConstants::default();
        let p = StatePattern::new(2, vec![1], vec![2]).unwrap();
        assert!(counit_source(c, &p, &k).is_zero());
        let p = StatePattern::new(2, vec![1], vec![1]).unwrap();
        assert!(counit_source(c, &p, &k).is_one());
    }

    #[test]
    fn permuted_ratio_is_minus_q_power() {
        let c = ctx(4);
        for k in [CounitConstants::default(), CounitConstants { length_rule: LengthRule::Full, ..Default::default() }] {
            let src = |i: Vec<u32>, l: Vec<u32>| counit_source(c, &StatePattern::new(4, i, l).unwrap(), &k);
            let snk = |l: Vec<u32>, i: Vec<u32>| counit_sink(c, &StatePattern::new(4, l, i).unwrap(), &k);
            let sorted = &snk(vec![1, 3], vec![1, 3]) * &src(vec![1, 3], vec![1, 3]);
            let swapped = &snk(vec![3, 1], vec![3, 1]) * &src(vec![3, 1], vec![3, 1]);
            assert!(!sorted.is_zero());
            assert_eq!(swapped, &sorted * &(-c.q()).pow(4));
            let half = &snk(vec![1, 3], vec![3, 1]) * &src(vec![3, 1], vec![1, 3]);
            assert_eq!(half, &sorted * &(-c.q()).pow(2));
        }
    }

    #[test]
    fn through_strand() {
        assert!(counit_through_strand(1, 1).is_one());
        assert!(counit_through_strand(1, 2).is_zero());
        for i in 1..=4 {
            for k in 1..=4 {
                let mut s = LaurentScalar::zero();
                for j in 1..=4 {
                    s += &(&counit_through_strand(i, j) * &counit_through_strand(j, k));
                }
                assert_eq!(s, counit_through_strand(i, k));
            }
        }
    }

    #[test]
    fn symmetric_group_sum() {
        let c = ctx(3);
        assert!(qsum_over_symmetric_group(c, 1).is_one());
        assert_eq!(qsum_over_symmetric_group(c, 2), &LaurentScalar::one() + &c.q_pow(2));
        for k in 0..=5 {
            assert_eq!(qsum_over_symmetric_group(c, k), qsum_closed_form(c, k));
        }
    }

    #[test]
    fn zero_detection_exhaustive() {
        let consts = CounitConstants::default();
        for n in 2..=4u32 {
            let c = ctx(n);
            for k in 1..n {
                let states = (0..n).map(|_| 1..=n).multi_cartesian_product();
                for s in states {
                    let p = StatePattern::new(n, s[..k as usize].to_vec(), s[k as usize..].to_vec())
                        .unwrap();
                    let merged = p.merged();
                    let repeat = !merged.iter().all_unique();
                    assert_eq!(counit_source(c, &p, &consts).is_zero(), repeat);
                    assert_eq!(counit_sink(c, &p, &consts).is_zero(), repeat);
                }
            }
        }
    }

    #[test]
    fn collected_identity_small() {
        let consts = CounitConstants::default();
        for n in 2..=4 {
            let c = ctx(n);
            for k in 1..n {
                for (i, l) in sorted_admissible_patterns(n, k) {
                    assert!(check_collected_identity(c, k, &i, &l, &consts).unwrap());
                }
            }
        }
        let full = CounitConstants {
            length_rule: LengthRule::Full,
            ..CounitConstants::default()
        };
        for (i, l) in sorted_admissible_patterns(4, 2) {
            assert!(check_collected_identity(ctx(4), 2, &i, &l, &full).unwrap());
        }
    }

    #[test]
    fn constants_json_round_trip() {
        let k = CounitConstants {
            perm_factor_base: Some(LaurentScalar::monomial(8, -1)),
            ..CounitConstants::default()
        };
        let s = serde_json::to_string(&k).unwrap();
        let back: CounitConstants = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
    }
}
