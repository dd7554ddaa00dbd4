//! Exact verification of square-function and decoupling estimates.
//!
//! Everything here compares `2r`-th powers of `L^{2r}` norms, never the
//! norms themselves, so the comparisons stay inside the scalar field and
//! every verdict is an exact sign test. The lone floating-point number in
//! any report is the advisory `ratio_float`.
//!
//! * [`constant_bound`] produces a certified rational upper bound for
//!   `C^{2r}`, where `C` is the constant in the square function estimate
//!   `‖Σ f_j‖_{2r} ≤ C ‖(Σ|f_j|²)^{1/2}‖_{2r}`. The `baseline` method is
//!   the constant that falls directly out of the distinct-index
//!   comparison; `optimized` sharpens it by splitting the mixed term with
//!   a weighted Young inequality, with the weight chosen at the constraint
//!   boundary. Only the weight's `r`-th power enters, so the value stays
//!   rational.
//! * [`verify_square_estimate`] checks `∫|Σ f_j|^{2r} ≤ C^{2r} ∫(Σ|f_j|²)^r`.
//! * [`verify_intermediate`] checks the two-term split
//!   `∫|Σf|^{2r} ≤ ((2r)!−1)(∫(Σ|f_j|²)^r + ∫(Σ|f_j|²)|Σf|^{2r−2})`
//!   that the square estimate is extracted from.
//! * [`verify_decoupling`] checks
//!   `∫|Σf|^{2r} ≤ C^{2r} (Σ_j (∫|f_j|^{2r})^{1/r})^r`, taking exact
//!   `r`-th roots when they exist in the field and otherwise certifying
//!   the comparison with dyadic interval enclosures at escalating
//!   precision; a comparison still undecided at the highest precision is
//!   an error, never a guess.
//! * [`verify_haar_sqfn`] decomposes a mean-zero grid function into its
//!   dyadic martingale differences, asserts the decomposition reproduces
//!   the function exactly, and runs the square estimate on it.

use num_bigint::BigInt;
use num_traits::One;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::families::{martingale_difference, DyadicInterval};
use crate::qk::factorial;
use crate::scalar::{QSqrt2, Rational};
use crate::stepfn::{Family, FamilyOrdering, StepFunction};

/// How a constant bound was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundMethod {
    /// `C^{2r} = 2^r ((2r)!−1)^r` for `r ≥ 2`, and `1` for `r = 1`.
    Baseline,
    /// `C^{2r} = 2((2r)!−1)(1 + E/r)` with
    /// `E = (2(r−1)((2r)!−1)/r)^{r−1}`; requires `r ≥ 2`.
    Optimized,
    /// A caller-supplied value for `C^{2r}` (must be ≥ 1).
    User(Rational),
}

impl BoundMethod {
    pub fn name(&self) -> &'static str {
        match self {
            BoundMethod::Baseline => "baseline",
            BoundMethod::Optimized => "optimized",
            BoundMethod::User(_) => "user",
        }
    }
}

impl std::str::FromStr for BoundMethod {
    type Err = Error;

    /// Accepts `baseline`, `optimized`, or `user:<rational>`.
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "baseline" => Ok(BoundMethod::Baseline),
            "optimized" => Ok(BoundMethod::Optimized),
            _ => match s.strip_prefix("user:") {
                Some(v) => Ok(BoundMethod::User(v.parse()?)),
                None => Err(Error::Parse(format!(
                    "unknown bound method {s:?}; expected baseline, optimized, or user:<value>"
                ))),
            },
        }
    }
}

/// A certified rational upper bound for `C^{2r}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantBound {
    pub r: u32,
    pub c_pow_2r: Rational,
    pub method: BoundMethod,
}

impl Serialize for ConstantBound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("method", self.method.name())?;
        map.serialize_entry("c_pow_2r", &self.c_pow_2r)?;
        map.end()
    }
}

fn big_rational(n: BigInt) -> Rational {
    Rational::from_big(n, BigInt::one()).expect("denominator one")
}

/// Certified upper bound for `C^{2r}`. See [`BoundMethod`] for the two
/// built-in formulas; `User` values are validated to be ≥ 1.
pub fn constant_bound(r: u32, method: BoundMethod) -> crate::Result<ConstantBound> {
    if r < 1 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let c_pow_2r = match &method {
        BoundMethod::Baseline => {
            if r == 1 {
                Rational::one()
            } else {
                let f = big_rational(factorial(2 * r as u64) - 1);
                &Rational::pow2(r as i64) * &f.pow(r)
            }
        }
        BoundMethod::Optimized => {
            if r == 1 {
                return Err(Error::InvalidArgument(
                    "the optimized bound needs r >= 2".into(),
                ));
            }
            let f = big_rational(factorial(2 * r as u64) - 1);
            let r_q = Rational::from_int(r as i64);
            // E = (2(r−1)((2r)!−1)/r)^{r−1}
            let e = (&(&Rational::from_int(2 * (r as i64 - 1)) * &f) * &r_q.recip().expect("r > 0"))
                .pow(r - 1);
            let one_plus = &Rational::one() + &(&e * &r_q.recip().expect("r > 0"));
            &(&Rational::from_int(2) * &f) * &one_plus
        }
        BoundMethod::User(v) => {
            if v < &Rational::one() {
                return Err(Error::InvalidArgument(
                    "a user bound must be at least 1".into(),
                ));
            }
            v.clone()
        }
    };
    Ok(ConstantBound {
        r,
        c_pow_2r,
        method,
    })
}

fn check_family_and_r(fam: &Family, r: u32, bound: &ConstantBound) -> crate::Result<()> {
    if fam.is_empty() {
        return Err(Error::InvalidArgument("family is empty".into()));
    }
    if r < 1 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    if bound.r != r {
        return Err(Error::InvalidArgument(format!(
            "bound was computed for r = {} but the check uses r = {}",
            bound.r, r
        )));
    }
    Ok(())
}

fn ratio_float(lhs: &QSqrt2, rhs: &QSqrt2, two_r: u32) -> f64 {
    let (l, r) = (lhs.to_f64(), rhs.to_f64());
    if r > 0.0 {
        (l / r).powf(1.0 / two_r as f64)
    } else if l == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Verdict on one square-estimate instance: `lhs_pow = ∫|Σ f_j|^{2r}`
/// against `c_pow_2r · rhs_pow` with `rhs_pow = ∫(Σ_j |f_j|²)^r`.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub r: u32,
    pub bound: ConstantBound,
    pub lhs_pow: QSqrt2,
    pub rhs_pow: QSqrt2,
    pub holds: bool,
    /// `(lhs_pow / rhs_pow)^{1/2r}` — the observed constant, as a float,
    /// ignoring the bound. Advisory only.
    pub ratio_float: f64,
}

impl EstimateReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Check `∫|Σ f_j|^{2r} ≤ c_pow_2r · ∫(Σ_j |f_j|²)^r` exactly.
pub fn verify_square_estimate(
    fam: &Family,
    r: u32,
    bound: &ConstantBound,
) -> crate::Result<EstimateReport> {
    check_family_and_r(fam, r, bound)?;
    let lhs_pow = fam.sum().lp_power(2 * r)?;
    let rhs_pow = fam.square_function_power(r)?;
    let holds = lhs_pow <= &QSqrt2::from_rational(bound.c_pow_2r.clone()) * &rhs_pow;
    let ratio = ratio_float(&lhs_pow, &rhs_pow, 2 * r);
    Ok(EstimateReport {
        r,
        bound: bound.clone(),
        lhs_pow,
        rhs_pow,
        holds,
        ratio_float: ratio,
    })
}

/// Pointwise `e`-th power of a real step function (`e ≥ 1`).
fn pointwise_pow(f: &StepFunction, e: u32) -> StepFunction {
    debug_assert!(e >= 1);
    let mut acc = f.clone();
    for _ in 1..e {
        acc = &acc * f;
    }
    acc
}

/// Verdict on the two-term split of the `2r`-th power of the sum.
#[derive(Debug, Clone, Serialize)]
pub struct IntermediateReport {
    pub r: u32,
    pub lhs_pow: QSqrt2,
    /// `∫ (Σ_j |f_j|²)^r`.
    pub square_term: QSqrt2,
    /// `∫ (Σ_j |f_j|²) · |Σ f_j|^{2r−2}`.
    pub mixed_term: QSqrt2,
    /// `(2r)! − 1`.
    pub factor: Rational,
    pub rhs_pow: QSqrt2,
    pub holds: bool,
}

impl IntermediateReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Check `∫|Σf|^{2r} ≤ ((2r)!−1)(∫(Σ|f_j|²)^r + ∫(Σ|f_j|²)|Σf|^{2r−2})`
/// exactly. Requires `r ≥ 2`.
pub fn verify_intermediate(fam: &Family, r: u32) -> crate::Result<IntermediateReport> {
    if fam.is_empty() {
        return Err(Error::InvalidArgument("family is empty".into()));
    }
    if r < 2 {
        return Err(Error::InvalidArgument(
            "the two-term split needs r >= 2".into(),
        ));
    }
    let sum = fam.sum();
    let lhs_pow = sum.lp_power(2 * r)?;
    let square_fn = fam.square_sum();
    let square_term = fam.square_function_power(r)?;
    let mixed = &square_fn * &pointwise_pow(&sum.abs_squared(), r - 1);
    let mixed_integral = mixed.integral();
    debug_assert!(mixed_integral.is_real());
    let mixed_term = mixed_integral.re;
    let factor = big_rational(factorial(2 * r as u64) - 1);
    let rhs_pow = &QSqrt2::from_rational(factor.clone()) * &(&square_term + &mixed_term);
    let holds = lhs_pow <= rhs_pow;
    Ok(IntermediateReport {
        r,
        lhs_pow,
        square_term,
        mixed_term,
        factor,
        rhs_pow,
        holds,
    })
}

/// Nonnegative `root`-th root of a nonnegative field element, when it
/// exists in the field. Odd parts of the root index are taken through the
/// rational case only; square roots may introduce a `√2` part.
fn exact_root(x: &QSqrt2, root: u32) -> Option<QSqrt2> {
    debug_assert!(root >= 1 && !x.is_negative());
    let mut m = root;
    let mut halvings = 0u32;
    while m % 2 == 0 {
        m /= 2;
        halvings += 1;
    }
    let mut y = if m == 1 {
        x.clone()
    } else if x.b.is_zero() {
        QSqrt2::from_rational(x.a.nth_root(m)?)
    } else {
        return None;
    };
    for _ in 0..halvings {
        y = y.sqrt()?;
        if y.is_negative() {
            y = -&y;
        }
    }
    Some(y)
}

/// Floor of `q^{1/r} · 2^bits` for a nonnegative rational `q`.
fn floor_root_scaled(q: &Rational, r: u32, bits: u32) -> BigInt {
    debug_assert!(!q.is_negative());
    let scaled = (q.numer() << (r as u64 * bits as u64)) / q.denom();
    scaled.nth_root(r)
}

/// Dyadic enclosure `lo ≤ √2 ≤ hi` with `hi − lo = 2^{-bits}`.
fn sqrt2_enclosure(bits: u32) -> (Rational, Rational) {
    let t = (BigInt::from(2) << (2 * bits as u64)).sqrt();
    let scale = Rational::pow2(-(bits as i64));
    let lo = &big_rational(t.clone()) * &scale;
    let hi = &big_rational(t + 1) * &scale;
    (lo, hi)
}

/// Rational enclosure of a field element at the given precision.
fn qsqrt2_enclosure(x: &QSqrt2, bits: u32) -> (Rational, Rational) {
    let (s_lo, s_hi) = sqrt2_enclosure(bits);
    if x.b.is_negative() {
        (&x.a + &(&x.b * &s_hi), &x.a + &(&x.b * &s_lo))
    } else {
        (&x.a + &(&x.b * &s_lo), &x.a + &(&x.b * &s_hi))
    }
}

/// Rational enclosure of `x^{1/r}` for a nonnegative field element.
fn root_enclosure(x: &QSqrt2, r: u32, bits: u32) -> (Rational, Rational) {
    let (lo, hi) = qsqrt2_enclosure(x, bits);
    let lo = if lo.is_negative() { Rational::zero() } else { lo };
    let scale = Rational::pow2(-(bits as i64));
    let root_lo = &big_rational(floor_root_scaled(&lo, r, bits)) * &scale;
    let root_hi = &big_rational(floor_root_scaled(&hi, r, bits) + 1) * &scale;
    (root_lo, root_hi)
}

/// Verdict on one decoupling instance:
/// `lhs_pow ≤ c_pow_2r · (Σ_j (∫|f_j|^{2r})^{1/r})^r`.
#[derive(Debug, Clone, Serialize)]
pub struct DecouplingReport {
    pub r: u32,
    pub bound: ConstantBound,
    pub lhs_pow: QSqrt2,
    /// `(Σ_j (∫|f_j|^{2r})^{1/r})^r`, when every per-term root exists in
    /// the field; absent when the comparison was certified by intervals.
    pub rhs_pow: Option<QSqrt2>,
    /// `true` when the comparison was settled by exact arithmetic,
    /// `false` when it was certified by interval enclosures.
    pub exact: bool,
    /// Enclosure precision that settled the comparison, if intervals were
    /// needed.
    pub precision_bits: Option<u32>,
    pub holds: bool,
    pub ratio_float: f64,
}

impl DecouplingReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

const CERTIFICATION_BITS: [u32; 5] = [16, 32, 64, 128, 256];

/// Check `∫|Σ f_j|^{2r} ≤ c_pow_2r · (Σ_j (∫|f_j|^{2r})^{1/r})^r`.
///
/// When every `(∫|f_j|^{2r})^{1/r}` exists in the field the comparison is
/// a single exact sign test. Otherwise each root is enclosed in a dyadic
/// interval and the comparison is certified at escalating precision; if
/// the two sides cannot be separated at the highest precision (for
/// instance because they are exactly equal through an irrational root),
/// the check fails with [`Error::Undecided`] rather than guessing.
pub fn verify_decoupling(
    fam: &Family,
    r: u32,
    bound: &ConstantBound,
) -> crate::Result<DecouplingReport> {
    check_family_and_r(fam, r, bound)?;
    let lhs_pow = fam.sum().lp_power(2 * r)?;
    let terms: Vec<QSqrt2> = fam
        .iter()
        .map(|(_, f)| f.lp_power(2 * r))
        .collect::<crate::Result<_>>()?;
    let c = QSqrt2::from_rational(bound.c_pow_2r.clone());

    let rhs_float = bound.c_pow_2r.to_f64()
        * terms
            .iter()
            .map(|t| t.to_f64().powf(1.0 / r as f64))
            .sum::<f64>()
            .powi(r as i32);
    let ratio = if rhs_float > 0.0 {
        (lhs_pow.to_f64() / rhs_float).powf(1.0 / (2 * r) as f64)
    } else if lhs_pow.is_zero() {
        0.0
    } else {
        f64::INFINITY
    };

    let roots: Option<Vec<QSqrt2>> = terms.iter().map(|t| exact_root(t, r)).collect();
    if let Some(roots) = roots {
        let mut sum = QSqrt2::zero();
        for rho in &roots {
            sum += rho;
        }
        let rhs_pow = &c * &sum.pow(r);
        let holds = lhs_pow <= rhs_pow;
        return Ok(DecouplingReport {
            r,
            bound: bound.clone(),
            lhs_pow,
            rhs_pow: Some(rhs_pow),
            exact: true,
            precision_bits: None,
            holds,
            ratio_float: ratio,
        });
    }

    for bits in CERTIFICATION_BITS {
        let mut sum_lo = Rational::zero();
        let mut sum_hi = Rational::zero();
        for t in &terms {
            let (lo, hi) = root_enclosure(t, r, bits);
            sum_lo += &lo;
            sum_hi += &hi;
        }
        let rhs_lo = &bound.c_pow_2r * &sum_lo.pow(r);
        let rhs_hi = &bound.c_pow_2r * &sum_hi.pow(r);
        let (lhs_lo, lhs_hi) = qsqrt2_enclosure(&lhs_pow, bits);
        let verdict = if lhs_hi <= rhs_lo {
            Some(true)
        } else if lhs_lo > rhs_hi {
            Some(false)
        } else {
            None
        };
        if let Some(holds) = verdict {
            return Ok(DecouplingReport {
                r,
                bound: bound.clone(),
                lhs_pow,
                rhs_pow: None,
                exact: false,
                precision_bits: Some(bits),
                holds,
                ratio_float: ratio,
            });
        }
    }
    Err(Error::Undecided(format!(
        "decoupling comparison not separated at {} bits of precision",
        CERTIFICATION_BITS.last().expect("nonempty"),
    )))
}

/// Verdict on the martingale-difference square estimate for one function.
#[derive(Debug, Clone, Serialize)]
pub struct HaarSqfnReport {
    pub root: String,
    pub depth: u32,
    /// The difference functions sum back to the input exactly; always
    /// true in a successful report.
    pub reconstructed: bool,
    pub estimate: EstimateReport,
}

impl HaarSqfnReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Decompose a mean-zero function constant on the depth-`depth` dyadic
/// grid of `root` into martingale differences `{D_m f}`, assert
/// `Σ D_m f = f` exactly, and run the square estimate on the difference
/// family with the baseline constant.
pub fn verify_haar_sqfn(
    f: &StepFunction,
    root: &DyadicInterval,
    depth: u32,
    r: u32,
) -> crate::Result<HaarSqfnReport> {
    if depth < 1 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if !f.integral().is_zero() {
        return Err(Error::InvalidArgument(
            "the function must have zero mean".into(),
        ));
    }
    let mut members = Vec::with_capacity(depth as usize);
    let mut total = StepFunction::zero();
    for level in 0..depth {
        let d = martingale_difference(f, root, level)?;
        total = &total + &d;
        members.push((level.to_string(), d));
    }
    if total != *f {
        return Err(Error::InvalidArgument(format!(
            "the function is not constant on the depth-{depth} grid of {root}"
        )));
    }
    let fam = Family::new(members, FamilyOrdering::Natural)?;
    let bound = constant_bound(r, BoundMethod::Baseline)?;
    let estimate = verify_square_estimate(&fam, r, &bound)?;
    Ok(HaarSqfnReport {
        root: root.to_string(),
        depth,
        reconstructed: true,
        estimate,
    })
}
