//! Exact rational verification of the algebraic identities behind the
//! `R₁₂₁₂` lower bound, the Bianchi expansion of `R₁₂₃₄`, and the family of
//! second fundamental forms attaining the bound.
//!
//! All public indices are 0-based; formulas are written with 1-based
//! accessors internally so they read like the usual index notation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fundforms::FundamentalData;

pub type Q = BigRational;

fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// A totally symmetric cubic form with exact entries, keyed by sorted index triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCubicTensor {
    n: usize,
    entries: BTreeMap<[usize; 3], Q>,
}

fn sorted(i: usize, j: usize, k: usize) -> [usize; 3] {
    let mut key = [i, j, k];
    key.sort_unstable();
    key
}

impl RationalCubicTensor {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Q {
        self.entries.get(&sorted(i, j, k)).cloned().unwrap_or_else(Q::zero)
    }

    /// Sets the entry for the multiset `{i, j, k}` (all its permutations).
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Q) {
        assert!(i < self.n && j < self.n && k < self.n, "index out of range");
        let key = sorted(i, j, k);
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }

    /// Number of stored (nonzero) multisets.
    pub fn support(&self) -> usize {
        self.entries.len()
    }

    /// Uniform integer entries in `[lo, hi]` on every multiset.
    pub fn random_integer<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: i64, hi: i64) -> Self {
        let mut t = Self::zero(n);
        for_each_multiset(n, |[i, j, k]| t.set(i, j, k, q(rng.random_range(lo..=hi))));
        t
    }

    /// Entries `a/b` with `a ∈ [−bound, bound]`, `b ∈ [1, bound]`.
    pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> Self {
        let mut t = Self::zero(n);
        for_each_multiset(n, |[i, j, k]| {
            let num = rng.random_range(-bound..=bound);
            let den = rng.random_range(1..=bound);
            t.set(i, j, k, frac(num, den));
        });
        t
    }

    /// Floating-point image, for feeding the numeric pipeline.
    pub fn to_fundamental(&self, c: f64) -> FundamentalData {
        FundamentalData::symmetric_from_fn(self.n, c, |i, j, k| self.get(i, j, k).to_f64().unwrap_or(f64::NAN))
    }

    /// `S = Σ_{ijk} (h_ij^k)²` over all ordered triples.
    pub fn squared_norm(&self) -> Q {
        let mut s = Q::zero();
        for (key, v) in &self.entries {
            s += v * v * q(permutations(key));
        }
        s
    }

    /// `n H_r = Σ_j h_jj^r` (0-based `r`).
    pub fn trace(&self, r: usize) -> Q {
        (0..self.n).map(|j| self.get(j, j, r)).sum()
    }

    /// `n²H² = Σ_r (n H_r)²`.
    pub fn n2h2(&self) -> Q {
        (0..self.n).map(|r| self.trace(r).pow(2)).sum()
    }
}

fn for_each_multiset(n: usize, mut f: impl FnMut([usize; 3])) {
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                f([i, j, k]);
            }
        }
    }
}

fn permutations(key: &[usize; 3]) -> i64 {
    match (key[0] == key[1], key[1] == key[2]) {
        (true, true) => 1,
        (false, false) => 6,
        _ => 3,
    }
}

/// 1-based view `h(i, j, r) = h_ij^{r*}`.
struct OneBased<'a>(&'a RationalCubicTensor);

impl OneBased<'_> {
    fn h(&self, i: usize, j: usize, r: usize) -> Q {
        self.0.get(i - 1, j - 1, r - 1)
    }
}

fn require(t: &RationalCubicTensor, min: usize) -> Result<()> {
    if t.n < min {
        return Err(Error::Dimension(format!("identity needs n ≥ {min}, got {}", t.n)));
    }
    Ok(())
}

/// The `r = 1, 2` block `II₁`: its defining sum and its completed-square form.
pub fn ii1_sides(t: &RationalCubicTensor) -> Result<(Q, Q)> {
    require(t, 3)?;
    let n = t.n;
    let v = OneBased(t);
    let nq = q(n as i64);
    let mut lhs = Q::zero();
    let mut rhs = Q::zero();
    for r in 1..=2 {
        let a = v.h(1, 1, r) + v.h(2, 2, r);
        let mut inner = Q::zero();
        for j in 3..=n {
            let hj = v.h(j, j, r);
            inner += &a * &hj - &hj * &hj;
            for i in 3..j {
                inner += v.h(i, i, r) * &hj;
            }
        }
        lhs -= inner;

        let mut squares = Q::zero();
        for j in 3..=n {
            let d = &a - q(3) * v.h(j, j, r);
            squares += &d * &d;
            for i in 3..j {
                let e = v.h(i, i, r) - v.h(j, j, r);
                squares += q(3) * &e * &e;
            }
        }
        let tr = t.trace(r - 1);
        rhs += (squares - (&nq - q(2)) * &tr * &tr) / q(2 * (n as i64 + 1));
    }
    Ok((lhs, rhs))
}

/// The `r ≥ 3` block `II₂`: its defining sum and its completed-square form.
pub fn ii2_sides(t: &RationalCubicTensor) -> Result<(Q, Q)> {
    require(t, 3)?;
    let n = t.n;
    let ni = n as i64;
    let v = OneBased(t);
    let mut lhs = Q::zero();
    let mut rhs = Q::zero();
    for r in 3..=n {
        let a = v.h(1, 1, r) + v.h(2, 2, r);
        let mut inner = Q::zero();
        for j in 3..=n {
            let hj = v.h(j, j, r);
            inner += &a * &hj;
            for i in 3..j {
                inner += v.h(i, i, r) * &hj;
            }
        }
        for j in (1..=n).filter(|&j| j != r) {
            let hj = v.h(j, j, r);
            inner -= &hj * &hj;
        }
        lhs -= inner;

        let hrr = v.h(r, r, r);
        let mut squares = Q::zero();
        for j in (3..=n).filter(|&j| j != r) {
            let hj = v.h(j, j, r);
            let d = q(2) * &a - q(3) * &hj;
            squares += &d * &d;
            let e = &hrr - q(3) * &hj;
            squares += q(2) * &e * &e;
            for i in (3..j).filter(|&i| i != r) {
                let f = v.h(i, i, r) - &hj;
                squares += q(6) * &f * &f;
            }
        }
        let diff = v.h(1, 1, r) - v.h(2, 2, r);
        squares += q(2 * ni + 3) * &diff * &diff;
        let g = &hrr - q(2) * &a;
        squares += q(3) * &g * &g;
        let tr = t.trace(r - 1);
        rhs += -frac(2 * ni - 3, 2 * (2 * ni + 3)) * &tr * &tr + squares / q(2 * (2 * ni + 3));
    }
    Ok((lhs, rhs))
}

/// The nonnegative groups whose sum with the final bound reproduces `R₁₂₁₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct R1212Groups {
    pub trace_terms: Q,
    pub h12_terms: Q,
    pub h1_offdiag_terms: Q,
    pub distinct_index_terms: Q,
    pub first_normal_squares: Q,
    pub other_normal_squares: Q,
}

impl R1212Groups {
    pub fn total(&self) -> Q {
        &self.trace_terms
            + &self.h12_terms
            + &self.h1_offdiag_terms
            + &self.distinct_index_terms
            + &self.first_normal_squares
            + &self.other_normal_squares
    }

    pub fn all_nonnegative(&self) -> bool {
        [
            &self.trace_terms,
            &self.h12_terms,
            &self.h1_offdiag_terms,
            &self.distinct_index_terms,
            &self.first_normal_squares,
            &self.other_normal_squares,
        ]
        .iter()
        .all(|x| !x.is_negative())
    }
}

/// `½(6n²H²/(2n+3) + 2c − S)`.
pub fn r1212_final_bound(t: &RationalCubicTensor, c: &Q) -> Q {
    let ni = t.n as i64;
    (q(6) * t.n2h2() / q(2 * ni + 3) + q(2) * c - t.squared_norm()) / q(2)
}

/// Sum-of-squares groups in the decomposition of `R₁₂₁₂`.
pub fn r1212_groups(t: &RationalCubicTensor) -> Result<R1212Groups> {
    require(t, 3)?;
    let n = t.n;
    let ni = n as i64;
    let v = OneBased(t);
    let sq = |x: Q| &x * &x;

    let trace_terms = frac(3, 2 * (ni + 1) * (2 * ni + 3)) * (sq(t.trace(0)) + sq(t.trace(1)));
    let h12_terms = q(2) * (3..=n).map(|j| sq(v.h(1, 2, j))).sum::<Q>();
    let mut h1_offdiag_terms = Q::zero();
    for i in 3..=n {
        for j in (i + 1)..=n {
            h1_offdiag_terms += q(3) * sq(v.h(i, j, 1));
        }
    }
    let mut distinct_index_terms = Q::zero();
    for i in 2..=n {
        for j in (i + 1)..=n {
            for r in (j + 1)..=n {
                distinct_index_terms += q(3) * sq(v.h(i, j, r));
            }
        }
    }

    let mut first = Q::zero();
    for r in 1..=2 {
        let a = v.h(1, 1, r) + v.h(2, 2, r);
        for j in 3..=n {
            first += sq(&a - q(3) * v.h(j, j, r));
            for i in 3..j {
                first += q(3) * sq(v.h(i, i, r) - v.h(j, j, r));
            }
        }
    }
    let first_normal_squares = first / q(2 * (ni + 1));

    let mut other = Q::zero();
    for r in 3..=n {
        let a = v.h(1, 1, r) + v.h(2, 2, r);
        let hrr = v.h(r, r, r);
        for j in (3..=n).filter(|&j| j != r) {
            let hj = v.h(j, j, r);
            other += sq(q(2) * &a - q(3) * &hj) + q(2) * sq(&hrr - q(3) * &hj);
            for i in (3..j).filter(|&i| i != r) {
                other += q(6) * sq(v.h(i, i, r) - &hj);
            }
        }
        other += q(2 * ni + 3) * sq(v.h(1, 1, r) - v.h(2, 2, r));
        other += q(3) * sq(&hrr - q(2) * &a);
    }
    let other_normal_squares = other / q(2 * (2 * ni + 3));

    Ok(R1212Groups {
        trace_terms,
        h12_terms,
        h1_offdiag_terms,
        distinct_index_terms,
        first_normal_squares,
        other_normal_squares,
    })
}

/// `(R₁₂₁₂ by the Gauss equation, the same as bound + square groups, the bound)`.
pub fn r1212_chain(t: &RationalCubicTensor, c: &Q) -> Result<(Q, Q, Q)> {
    require(t, 3)?;
    let v = OneBased(t);
    let mut gauss = c.clone();
    for r in 1..=t.n {
        let h12 = v.h(1, 2, r);
        gauss += v.h(1, 1, r) * v.h(2, 2, r) - &h12 * &h12;
    }
    let bound = r1212_final_bound(t, c);
    let decomposed = &bound + r1212_groups(t)?.total();
    Ok((gauss, decomposed, bound))
}

/// `−R₁₂₃₄` from the Gauss equation versus its expansion through `h`.
pub fn bianchi_expansion_sides(t: &RationalCubicTensor) -> Result<(Q, Q)> {
    require(t, 4)?;
    let v = OneBased(t);
    let mut lhs = Q::zero();
    for r in 1..=t.n {
        lhs += v.h(1, 4, r) * v.h(2, 3, r) - v.h(1, 3, r) * v.h(2, 4, r);
    }
    let mut rhs = Q::zero();
    for r in 5..=t.n {
        rhs += v.h(1, 4, r) * v.h(2, 3, r) - v.h(1, 3, r) * v.h(2, 4, r);
    }
    let h = |i, j, r| v.h(i, j, r);
    rhs += (h(3, 3, 2) - h(1, 1, 2)) * h(3, 4, 1)
        + (h(1, 1, 4) - h(3, 3, 4)) * h(1, 2, 3)
        + (h(1, 1, 2) - h(4, 4, 2)) * h(3, 4, 1)
        + (h(4, 4, 3) - h(1, 1, 3)) * h(1, 2, 4)
        + (h(2, 2, 1) - h(3, 3, 1)) * h(2, 3, 4)
        + (h(3, 3, 4) - h(2, 2, 4)) * h(2, 3, 1)
        + (h(4, 4, 1) - h(2, 2, 1)) * h(2, 3, 4)
        + (h(2, 2, 3) - h(4, 4, 3)) * h(1, 2, 4);
    Ok((lhs, rhs))
}

/// Parameters of the tensors attaining the `R₁₂₁₂` bound; `b[k]` is `b_{k+3}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityCaseParams {
    pub n: usize,
    pub a1: Q,
    pub a2: Q,
    pub b: Vec<Q>,
}

impl EqualityCaseParams {
    pub fn new(n: usize, a1: Q, a2: Q, b: Vec<Q>) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension(format!("equality case needs n ≥ 3, got {n}")));
        }
        if b.len() != n - 2 {
            return Err(Error::Dimension(format!("expected {} values of b, got {}", n - 2, b.len())));
        }
        Ok(Self { n, a1, a2, b })
    }
}

pub fn build_equality_case(p: &EqualityCaseParams) -> RationalCubicTensor {
    let n = p.n;
    let mut t = RationalCubicTensor::zero(n);
    // 1-based multisets
    let mut put = |i: usize, j: usize, k: usize, v: Q| t.set(i - 1, j - 1, k - 1, v);
    put(1, 1, 1, p.a1.clone());
    put(1, 2, 2, -p.a1.clone());
    put(1, 1, 2, p.a2.clone());
    put(2, 2, 2, -p.a2.clone());
    for r in 3..=n {
        let b = &p.b[r - 3];
        put(1, 1, r, q(3) * b);
        put(2, 2, r, q(3) * b);
        put(r, r, r, q(12) * b);
        for j in (3..=n).filter(|&j| j != r) {
            put(j, j, r, q(4) * b);
        }
    }
    t
}

/// Outcome of a randomized exact identity run for one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub n: usize,
    pub trials: usize,
    pub ii1_failures: usize,
    pub ii2_failures: usize,
    pub r1212_failures: usize,
    /// Trials where a square group came out negative or the bound exceeded `R₁₂₁₂`.
    pub inequality_failures: usize,
    pub bianchi_failures: usize,
    pub equality_case_failures: usize,
}

impl IdentityCheck {
    pub fn failures(&self) -> usize {
        self.ii1_failures
            + self.ii2_failures
            + self.r1212_failures
            + self.inequality_failures
            + self.bianchi_failures
            + self.equality_case_failures
    }
}

fn trial_rng(seed: u64, n: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | trial as u64);
    rng
}

/// Runs every identity on `trials` random integer tensors with entries in
/// `[−9, 9]`, plus a random rational equality-case tensor per trial.
/// Trial `k` uses its own derived stream, so results do not depend on scheduling.
pub fn check_identities(n: usize, trials: usize, seed: u64) -> Result<IdentityCheck> {
    if n < 3 {
        return Err(Error::Dimension(format!("identity suite needs n ≥ 3, got {n}")));
    }
    let per_trial: Vec<[usize; 6]> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<[usize; 6]> {
            let mut rng = trial_rng(seed, n, trial);
            let t = RationalCubicTensor::random_integer(&mut rng, n, -9, 9);
            let c = q(rng.random_range(-3..=3));
            let mut out = [0usize; 6];
            let (l, r) = ii1_sides(&t)?;
            out[0] = (l != r) as usize;
            let (l, r) = ii2_sides(&t)?;
            out[1] = (l != r) as usize;
            let (gauss, decomposed, bound) = r1212_chain(&t, &c)?;
            out[2] = (gauss != decomposed) as usize;
            out[3] = (!r1212_groups(&t)?.all_nonnegative() || gauss < bound) as usize;
            if n >= 4 {
                let (l, r) = bianchi_expansion_sides(&t)?;
                out[4] = (l != r) as usize;
            }
            let params = EqualityCaseParams::new(
                n,
                frac(rng.random_range(-9..=9), rng.random_range(1..=5)),
                frac(rng.random_range(-9..=9), rng.random_range(1..=5)),
                (3..=n)
                    .map(|_| frac(rng.random_range(-9..=9), rng.random_range(1..=5)))
                    .collect(),
            )?;
            let (gauss, _, bound) = r1212_chain(&build_equality_case(&params), &Q::zero())?;
            out[5] = (gauss != bound) as usize;
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let sum = |k: usize| per_trial.iter().map(|o| o[k]).sum();
    Ok(IdentityCheck {
        n,
        trials,
        ii1_failures: sum(0),
        ii2_failures: sum(1),
        r1212_failures: sum(2),
        inequality_failures: sum(3),
        bianchi_failures: sum(4),
        equality_case_failures: sum(5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anchor_ii1() -> RationalCubicTensor {
        let mut t = RationalCubicTensor::zero(4);
        for j in 0..4 {
            t.set(j, j, 0, q(j as i64 + 1));
        }
        t
    }

    #[test]
    fn symmetric_storage() {
        let mut t = RationalCubicTensor::zero(3);
        t.set(2, 0, 1, frac(1, 3));
        assert_eq!(t.get(1, 2, 0), frac(1, 3));
        assert_eq!(t.get(0, 0, 0), Q::zero());
        assert_eq!(t.squared_norm(), frac(6, 9));
        t.set(0, 1, 2, Q::zero());
        assert_eq!(t.support(), 0);
    }

    #[test]
    fn zero_tensor_sides_vanish() {
        let t = RationalCubicTensor::zero(5);
        assert_eq!(ii1_sides(&t).unwrap(), (Q::zero(), Q::zero()));
        assert_eq!(ii2_sides(&t).unwrap(), (Q::zero(), Q::zero()));
        assert_eq!(bianchi_expansion_sides(&t).unwrap(), (Q::zero(), Q::zero()));
        let c = frac(-7, 3);
        let (a, b, d) = r1212_chain(&t, &c).unwrap();
        assert!(a == c && b == c && d == c);
    }

    #[test]
    fn ii1_anchor() {
        assert_eq!(ii1_sides(&anchor_ii1()).unwrap(), (q(-8), q(-8)));
    }

    #[test]
    fn equality_case_anchor() {
        let p = EqualityCaseParams::new(4, Q::zero(), Q::zero(), vec![q(1), Q::zero()]).unwrap();
        let t = build_equality_case(&p);
        assert_eq!(t.trace(2), q(22));
        assert_eq!(t.squared_norm(), q(246));
        assert_eq!(t.n2h2(), q(484));
        let (g, d, b) = r1212_chain(&t, &Q::zero()).unwrap();
        assert_eq!((g.clone(), d, b), (q(9), q(9), q(9)));
        assert_eq!(t.to_fundamental(0.0).s(), 246.0);
    }

    #[test]
    fn trivial_equality_case_is_zero() {
        let p = EqualityCaseParams::new(5, Q::zero(), Q::zero(), vec![Q::zero(); 3]).unwrap();
        assert_eq!(build_equality_case(&p), RationalCubicTensor::zero(5));
        assert!(EqualityCaseParams::new(2, Q::zero(), Q::zero(), vec![]).is_err());
        assert!(EqualityCaseParams::new(4, Q::zero(), Q::zero(), vec![]).is_err());
    }

    #[test]
    fn single_entry_bianchi() {
        let mut t = RationalCubicTensor::zero(4);
        t.set(0, 1, 2, q(1));
        let (l, r) = bianchi_expansion_sides(&t).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn dimension_errors() {
        let t = RationalCubicTensor::zero(2);
        assert!(ii1_sides(&t).is_err());
        assert!(ii2_sides(&t).is_err());
        assert!(r1212_chain(&t, &Q::zero()).is_err());
        assert!(bianchi_expansion_sides(&RationalCubicTensor::zero(3)).is_err());
        assert!(check_identities(2, 1, 0).is_err());
    }

    #[test]
    fn random_suite_small() {
        for n in 3..=5 {
            let report = check_identities(n, 50, 3).unwrap();
            assert_eq!(report.failures(), 0, "{report:?}");
        }
    }

    #[test]
    fn random_rational_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 3..=6 {
            for _ in 0..20 {
                let t = RationalCubicTensor::random_rational(&mut rng, n, 7);
                let (g, d, b) = r1212_chain(&t, &frac(1, 2)).unwrap();
                assert_eq!(g, d);
                assert!(g >= b);
            }
        }
    }

    #[test]
    fn suite_is_seed_deterministic() {
        let a = check_identities(4, 10, 1).unwrap();
        let b = check_identities(4, 10, 1).unwrap();
        assert_eq!(a, b);
    }
}
