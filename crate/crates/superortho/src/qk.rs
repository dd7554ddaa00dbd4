//! Distinct-index sums over finite scalar sequences.
//!
//! For sequences `a^1, …, a^k` of common length `n`, the distinct-index sum
//! is
//!
//! ```text
//! Q_k(a^1, …, a^k) = Σ a^1_{j_1} · a^2_{j_2} · ⋯ · a^k_{j_k}
//! ```
//!
//! taken over all tuples `(j_1, …, j_k)` of pairwise distinct indices. Three
//! independent evaluators are provided:
//!
//! * [`qk_bruteforce`] — direct enumeration of all distinct-index tuples.
//!   Exponential, but it is the reference the others are checked against,
//!   so it stays.
//! * [`qk_recursive`] — peels off the last sequence by inclusion–exclusion:
//!   `Q_{m+1}` equals `Q_m · s(a^{m+1})` minus the `m` sums in which
//!   `a^{m+1}` is glued pointwise onto one of the earlier sequences.
//! * [`qk_partition`] — closed form as a sum over set partitions of
//!   `{1, …, k}`, each block contributing `(-1)^{|B|-1} (|B|-1)!` times the
//!   plain sum of the pointwise product over the block. Polynomial in `n`
//!   for fixed `k`; this is the evaluator the rest of the crate uses.
//!
//! On top of the evaluators, [`check_inequality`] certifies the comparison
//!
//! ```text
//! |Q_k − Π_i s(a^i)| ≤ (k! − 1) · B² · max(A, B)^{k-2}
//! ```
//!
//! with `A = max_i |s(a^i)|` and `B = max_i ‖a^i‖`, entirely in exact
//! arithmetic by squaring both sides. [`check_real_variant`] certifies the
//! one-sided consequence `Π_i s(a^i) ≤ (k!-1) B² max(A,B)^{k-2} + Re Q_k`
//! when the product of plain sums is real. Campaign drivers run either
//! check, or the three-way evaluator agreement, over seeded random input.

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::random;
use crate::scalar::{QSqrt2, Rational, Scalar};

/// Plain sum `s(a) = Σ_j a_j` of one sequence.
pub fn sum_s(seq: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for x in seq {
        acc += x;
    }
    acc
}

/// Squared Euclidean norm `‖a‖² = Σ_j |a_j|²` of one sequence.
pub fn norm_squared(seq: &[Scalar]) -> QSqrt2 {
    let mut acc = QSqrt2::zero();
    for x in seq {
        acc += &x.modulus_squared();
    }
    acc
}

fn validate(seqs: &[Vec<Scalar>]) -> crate::Result<usize> {
    if seqs.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one sequence".into(),
        ));
    }
    let n = seqs[0].len();
    if seqs.iter().any(|s| s.len() != n) {
        return Err(Error::InvalidArgument(
            "sequences must share a common length".into(),
        ));
    }
    Ok(n)
}

/// Reference evaluator: walk every tuple of pairwise distinct indices.
///
/// Runs in `O(n^k)`; branches whose running product is already zero are
/// pruned. Kept as the oracle for the other two evaluators.
pub fn qk_bruteforce(seqs: &[Vec<Scalar>]) -> crate::Result<Scalar> {
    let n = validate(seqs)?;

    fn walk(
        seqs: &[Vec<Scalar>],
        depth: usize,
        used: &mut [bool],
        prefix: &Scalar,
        acc: &mut Scalar,
    ) {
        if depth == seqs.len() {
            *acc += prefix;
            return;
        }
        for j in 0..used.len() {
            if used[j] {
                continue;
            }
            let term = prefix * &seqs[depth][j];
            if term.is_zero() {
                continue;
            }
            used[j] = true;
            walk(seqs, depth + 1, used, &term, acc);
            used[j] = false;
        }
    }

    let mut acc = Scalar::zero();
    walk(seqs, 0, &mut vec![false; n], &Scalar::one(), &mut acc);
    Ok(acc)
}

fn hadamard(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Inclusion–exclusion evaluator.
///
/// `Q_1 = s(a^1)`, and `Q_{m+1}(a^1,…,a^{m+1})` is `Q_m(a^1,…,a^m)` times
/// `s(a^{m+1})` minus the sum over `i ≤ m` of `Q_m` with `a^i` replaced by
/// the pointwise product `a^i ⊙ a^{m+1}` — the subtracted terms are exactly
/// the tuples where the new index collides with index `i`.
pub fn qk_recursive(seqs: &[Vec<Scalar>]) -> crate::Result<Scalar> {
    validate(seqs)?;

    fn eval(seqs: &[Vec<Scalar>]) -> Scalar {
        let (last, rest) = seqs.split_last().expect("validated nonempty");
        if rest.is_empty() {
            return sum_s(last);
        }
        let mut acc = &eval(rest) * &sum_s(last);
        for i in 0..rest.len() {
            let mut glued = rest.to_vec();
            glued[i] = hadamard(&rest[i], last);
            acc -= &eval(&glued);
        }
        acc
    }

    Ok(eval(seqs))
}

/// Visit every set partition of `{0, …, k-1}` as a restricted growth
/// string: `rgs[0] = 0` and each later entry is at most one more than the
/// running maximum. `blocks` receives the number of blocks.
fn for_each_partition(k: usize, f: &mut impl FnMut(&[usize], usize)) {
    fn extend(rgs: &mut Vec<usize>, max: usize, k: usize, f: &mut impl FnMut(&[usize], usize)) {
        if rgs.len() == k {
            f(rgs, max + 1);
            return;
        }
        for b in 0..=max + 1 {
            rgs.push(b);
            extend(rgs, max.max(b), k, f);
            rgs.pop();
        }
    }
    let mut rgs = vec![0];
    extend(&mut rgs, 0, k, f);
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Closed-form evaluator: sum over set partitions of the index positions.
///
/// Each partition `P` of `{1,…,k}` contributes
/// `Π_{B ∈ P} (-1)^{|B|-1} (|B|-1)! · s(⊙_{i∈B} a^i)`. The number of
/// partitions is the Bell number `B_k`, so the cost is polynomial in the
/// sequence length for fixed `k`. The per-block sums are shared across
/// partitions through a table over all `2^k − 1` subsets, which caps `k`
/// at 16 — far beyond where enumerating the partitions stops being
/// feasible anyway.
pub fn qk_partition(seqs: &[Vec<Scalar>]) -> crate::Result<Scalar> {
    validate(seqs)?;
    let k = seqs.len();
    if k > 16 {
        return Err(Error::InvalidArgument(
            "the partition evaluator supports at most 16 sequences".into(),
        ));
    }

    // s_of[mask] = s(⊙_{i ∈ mask} a^i), built by peeling one index off
    // each subset.
    let mut products: Vec<Vec<Scalar>> = Vec::with_capacity(1 << k);
    let mut s_of: Vec<Scalar> = Vec::with_capacity(1 << k);
    products.push(Vec::new());
    s_of.push(Scalar::zero());
    for mask in 1..1usize << k {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let seq = if rest == 0 {
            seqs[low].clone()
        } else {
            hadamard(&products[rest], &seqs[low])
        };
        s_of.push(sum_s(&seq));
        products.push(seq);
    }
    drop(products);

    // coeff[m] = (-1)^{m-1} (m-1)! for block size m.
    let coeff: Vec<Scalar> = (0..=k as u64)
        .map(|m| {
            if m == 0 {
                Scalar::zero()
            } else {
                let mut c = Rational::from_big(factorial(m - 1), BigInt::one())
                    .expect("denominator one");
                if m % 2 == 0 {
                    c = -&c;
                }
                Scalar::from_rational(c)
            }
        })
        .collect();

    let mut acc = Scalar::zero();
    let mut block_masks = vec![0usize; k];
    for_each_partition(k, &mut |rgs, blocks| {
        for m in block_masks.iter_mut().take(blocks) {
            *m = 0;
        }
        for (i, &block) in rgs.iter().enumerate() {
            block_masks[block] |= 1 << i;
        }
        let mut term = Scalar::one();
        for &mask in block_masks.iter().take(blocks) {
            let s = &s_of[mask];
            if s.is_zero() {
                return;
            }
            term = &(&term * s) * &coeff[mask.count_ones() as usize];
        }
        acc += &term;
    });
    Ok(acc)
}

/// Exact verdict on one instance of the distinct-index comparison.
///
/// All fields are squared so that the comparison stays inside the scalar
/// field: `lhs_sq = |Q_k − Π s|²` against
/// `rhs_sq = (k!-1)² · b_sq² · max(a_sq, b_sq)^{k-2}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QkReport {
    pub k: u32,
    pub qk: Scalar,
    pub product_s: Scalar,
    pub a_sq: QSqrt2,
    pub b_sq: QSqrt2,
    pub lhs_sq: QSqrt2,
    pub rhs_sq: QSqrt2,
    pub holds: bool,
}

impl QkReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn extremes(seqs: &[Vec<Scalar>]) -> (Scalar, QSqrt2, QSqrt2) {
    let mut product_s = Scalar::one();
    let mut a_sq = QSqrt2::zero();
    let mut b_sq = QSqrt2::zero();
    for seq in seqs {
        let s = sum_s(seq);
        a_sq = a_sq.max(s.modulus_squared());
        b_sq = b_sq.max(norm_squared(seq));
        product_s = &product_s * &s;
    }
    (product_s, a_sq, b_sq)
}

fn bound_squared(k: u32, a_sq: &QSqrt2, b_sq: &QSqrt2) -> QSqrt2 {
    let c = Rational::from_big(factorial(k as u64) - 1, BigInt::one()).expect("denominator one");
    let c_sq = QSqrt2::from_rational(&c * &c);
    &(&c_sq * &(b_sq * b_sq)) * &a_sq.clone().max(b_sq.clone()).pow(k - 2)
}

/// Check `|Q_k − Π_i s(a^i)| ≤ (k!-1) B² max(A, B)^{k-2}` exactly, by
/// comparing squares. Requires `k ≥ 2`.
pub fn check_inequality(seqs: &[Vec<Scalar>]) -> crate::Result<QkReport> {
    validate(seqs)?;
    let k = seqs.len() as u32;
    if k < 2 {
        return Err(Error::InvalidArgument(
            "the comparison needs at least two sequences".into(),
        ));
    }
    let qk = qk_partition(seqs)?;
    let (product_s, a_sq, b_sq) = extremes(seqs);
    let lhs_sq = (&qk - &product_s).modulus_squared();
    let rhs_sq = bound_squared(k, &a_sq, &b_sq);
    let holds = lhs_sq <= rhs_sq;
    Ok(QkReport {
        k,
        qk,
        product_s,
        a_sq,
        b_sq,
        lhs_sq,
        rhs_sq,
        holds,
    })
}

/// Exact verdict on the one-sided real consequence of the comparison.
///
/// `excess = Π s − Re Q_k`; the claim holds when `excess ≤ 0` outright or
/// when `excess² ≤ rhs_sq` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealVariantReport {
    pub k: u32,
    pub qk: Scalar,
    pub product_s: QSqrt2,
    pub excess: QSqrt2,
    pub rhs_sq: QSqrt2,
    pub holds: bool,
}

impl RealVariantReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Check `Π_i s(a^i) ≤ (k!-1) B² max(A, B)^{k-2} + Re Q_k`. The product of
/// plain sums must be real; otherwise this is an invalid-argument error.
pub fn check_real_variant(seqs: &[Vec<Scalar>]) -> crate::Result<RealVariantReport> {
    validate(seqs)?;
    let k = seqs.len() as u32;
    if k < 2 {
        return Err(Error::InvalidArgument(
            "the comparison needs at least two sequences".into(),
        ));
    }
    let qk = qk_partition(seqs)?;
    let (product_s, a_sq, b_sq) = extremes(seqs);
    if !product_s.is_real() {
        return Err(Error::InvalidArgument(
            "the product of plain sums must be real for the one-sided variant".into(),
        ));
    }
    let product_s = product_s.re;
    let excess = &product_s - &qk.re;
    let rhs_sq = bound_squared(k, &a_sq, &b_sq);
    let holds = !excess.is_positive() || &excess * &excess <= rhs_sq;
    Ok(RealVariantReport {
        k,
        qk,
        product_s,
        excess,
        rhs_sq,
        holds,
    })
}

/// Constant from the two-term recursion `C_2 = 1`,
/// `C_{k+1} = (k+1) C_k + k`; returns the entries for `k = 2, …, k_max`.
/// This closes to `C_k = k! − 1`, which [`constants_match_closed_form`]
/// pins down and the test suite re-checks.
pub fn constant_recursion(k_max: u32) -> Vec<BigInt> {
    assert!(k_max >= 2);
    let mut out = vec![BigInt::one()];
    for k in 2..k_max {
        let prev = out.last().expect("seeded").clone();
        out.push(prev * (k + 1) + k);
    }
    out
}

/// `true` when every entry of [`constant_recursion`] equals `k! − 1`.
pub fn constants_match_closed_form(k_max: u32) -> bool {
    constant_recursion(k_max)
        .iter()
        .zip(2..=k_max)
        .all(|(c, k)| *c == factorial(k as u64) - 1)
}

/// Input shape for sequence files: `{"k": 2, "sequences": [[…], …]}` with
/// scalars as four-string arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSet {
    pub k: u32,
    pub sequences: Vec<Vec<Scalar>>,
}

impl SequenceSet {
    /// Validate shape (declared `k` matches, common length) and return the
    /// sequences.
    pub fn into_sequences(self) -> crate::Result<Vec<Vec<Scalar>>> {
        if self.sequences.len() != self.k as usize {
            return Err(Error::InvalidArgument(format!(
                "declared k = {} but {} sequences given",
                self.k,
                self.sequences.len()
            )));
        }
        validate(&self.sequences)?;
        Ok(self.sequences)
    }
}

/// One random instance: `k` sequences of common length `n`, with a coin
/// flip deciding whether the entries get imaginary parts.
fn random_instance(
    seed: u64,
    instance: u64,
    k_range: (u32, u32),
    dim_range: (usize, usize),
    complex: bool,
) -> Vec<Vec<Scalar>> {
    let mut rng = random::rng_for(seed, instance);
    let k = rng.gen_range(k_range.0..=k_range.1) as usize;
    let n = rng.gen_range(dim_range.0..=dim_range.1);
    let gaussian = complex && rng.gen_bool(0.5);
    random::sequences(&mut rng, k, n, gaussian)
}

#[derive(Debug, Clone, Serialize)]
pub struct FirstViolation {
    pub instance: u64,
    pub report: QkReport,
}

/// Outcome of a seeded inequality campaign.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityCampaignReport {
    pub seed: u64,
    pub trials: u64,
    pub k_min: u32,
    pub k_max: u32,
    pub dim_min: usize,
    pub dim_max: usize,
    pub complex: bool,
    pub violations: u64,
    /// Largest observed `|Q_k − Π s| / bound` as a float, over instances
    /// with a nonzero bound. Diagnostic only; the verdicts are exact.
    pub max_ratio_float: f64,
    pub first_violation: Option<FirstViolation>,
}

impl InequalityCampaignReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Run [`check_inequality`] on `trials` seeded random instances.
pub fn inequality_campaign(
    seed: u64,
    trials: u64,
    k_range: (u32, u32),
    dim_range: (usize, usize),
    complex: bool,
) -> crate::Result<InequalityCampaignReport> {
    if k_range.0 < 2 || k_range.0 > k_range.1 || dim_range.0 == 0 || dim_range.0 > dim_range.1 {
        return Err(Error::InvalidArgument(
            "need 2 <= k_min <= k_max and 1 <= dim_min <= dim_max".into(),
        ));
    }
    use rayon::prelude::*;
    let outcomes: Vec<(u64, f64, Option<QkReport>)> = (0..trials)
        .into_par_iter()
        .map(|instance| {
            let seqs = random_instance(seed, instance, k_range, dim_range, complex);
            let report = check_inequality(&seqs).expect("validated shape");
            let ratio = if report.rhs_sq.is_zero() {
                f64::NAN
            } else {
                (report.lhs_sq.to_f64() / report.rhs_sq.to_f64()).sqrt()
            };
            let witness = (!report.holds).then_some(report);
            (instance, ratio, witness)
        })
        .collect();

    let mut violations = 0;
    let mut max_ratio_float = 0.0f64;
    let mut first_violation = None;
    for (instance, ratio, witness) in outcomes {
        if ratio.is_finite() {
            max_ratio_float = max_ratio_float.max(ratio);
        }
        if let Some(report) = witness {
            violations += 1;
            if first_violation.is_none() {
                first_violation = Some(FirstViolation { instance, report });
            }
        }
    }
    Ok(InequalityCampaignReport {
        seed,
        trials,
        k_min: k_range.0,
        k_max: k_range.1,
        dim_min: dim_range.0,
        dim_max: dim_range.1,
        complex,
        violations,
        max_ratio_float,
        first_violation,
    })
}

/// Outcome of an evaluator-agreement campaign: every instance is run
/// through all three evaluators, which must agree exactly.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub instances: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<u64>,
}

impl EquivalenceReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn agree(seqs: &[Vec<Scalar>]) -> bool {
    let brute = qk_bruteforce(seqs).expect("validated shape");
    let rec = qk_recursive(seqs).expect("validated shape");
    let part = qk_partition(seqs).expect("validated shape");
    brute == rec && brute == part
}

/// Three-way evaluator agreement on seeded random instances.
pub fn equivalence_campaign(
    seed: u64,
    trials: u64,
    k_range: (u32, u32),
    dim_range: (usize, usize),
    complex: bool,
) -> crate::Result<EquivalenceReport> {
    if k_range.0 == 0 || k_range.0 > k_range.1 || dim_range.0 == 0 || dim_range.0 > dim_range.1 {
        return Err(Error::InvalidArgument(
            "need 1 <= k_min <= k_max and 1 <= dim_min <= dim_max".into(),
        ));
    }
    use rayon::prelude::*;
    let mismatched: Vec<u64> = (0..trials)
        .into_par_iter()
        .filter(|&instance| {
            let seqs = random_instance(seed, instance, k_range, dim_range, complex);
            !agree(&seqs)
        })
        .collect();
    Ok(EquivalenceReport {
        instances: trials,
        mismatches: mismatched.len() as u64,
        first_mismatch: mismatched.iter().min().copied(),
    })
}

/// Three-way evaluator agreement on every family of `k` sequences with
/// entries in `{+1, -1}`, for all `1 ≤ k ≤ k_max` and lengths up to
/// `dim_max`.
pub fn equivalence_exhaustive_pm1(k_max: u32, dim_max: usize) -> crate::Result<EquivalenceReport> {
    if k_max == 0 || dim_max == 0 {
        return Err(Error::InvalidArgument(
            "need k_max >= 1 and dim_max >= 1".into(),
        ));
    }
    let mut instances = 0u64;
    let mut mismatches = 0u64;
    let mut first_mismatch = None;
    for k in 1..=k_max as usize {
        for n in 1..=dim_max {
            // Each sequence is one of 2^n sign patterns; sweep all k-tuples
            // of patterns by digits of a counter in base 2^n.
            let patterns: u64 = 1 << n;
            let total = patterns.pow(k as u32);
            for code in 0..total {
                let mut seqs = Vec::with_capacity(k);
                let mut rest = code;
                for _ in 0..k {
                    let bits = rest % patterns;
                    rest /= patterns;
                    seqs.push(
                        (0..n)
                            .map(|j| {
                                if bits >> j & 1 == 0 {
                                    Scalar::one()
                                } else {
                                    -&Scalar::one()
                                }
                            })
                            .collect::<Vec<_>>(),
                    );
                }
                if !agree(&seqs) {
                    mismatches += 1;
                    if first_mismatch.is_none() {
                        first_mismatch = Some(instances);
                    }
                }
                instances += 1;
            }
        }
    }
    Ok(EquivalenceReport {
        instances,
        mismatches,
        first_mismatch,
    })
}
