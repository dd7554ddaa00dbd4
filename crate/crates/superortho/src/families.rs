//! Constructors for the concrete families the crate studies: Haar functions
//! on dyadic grids, Rademacher functions, the indicator-complement family,
//! the Rademacher-based distinct-index construction, and dyadic martingale
//! differences.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::scalar::{QSqrt2, Rational, Scalar};
use crate::stepfn::{Family, FamilyOrdering, StepFunction};

/// Hard cap on the number of pieces any single constructor will materialize.
const MAX_PIECES: u64 = 1 << 22;

/// Standard dyadic interval `[2^k l, 2^k (l+1))`.
///
/// Larger `k` means a longer interval; children live at scale `k - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DyadicInterval {
    pub k: i64,
    pub l: i64,
}

impl DyadicInterval {
    pub fn new(k: i64, l: i64) -> Self {
        DyadicInterval { k, l }
    }

    pub fn lo(&self) -> Rational {
        &Rational::pow2(self.k) * &Rational::from_int(self.l)
    }

    pub fn hi(&self) -> Rational {
        &Rational::pow2(self.k) * &Rational::from_int(self.l + 1)
    }

    pub fn length(&self) -> Rational {
        Rational::pow2(self.k)
    }

    pub fn left_child(&self) -> Self {
        DyadicInterval::new(self.k - 1, 2 * self.l)
    }

    pub fn right_child(&self) -> Self {
        DyadicInterval::new(self.k - 1, 2 * self.l + 1)
    }

    pub fn parent(&self) -> Self {
        DyadicInterval::new(self.k + 1, self.l >> 1)
    }

    /// Whether `other` is contained in `self` (as sets of reals).
    pub fn contains(&self, other: &DyadicInterval) -> bool {
        if other.k > self.k {
            return false;
        }
        // Arithmetic shift floors toward minus infinity, which is exactly
        // the ancestor computation for negative positions too.
        (other.l >> (self.k - other.k)) == self.l
    }

    /// Recovers the interval from its endpoints; fails unless both are of
    /// the dyadic form.
    pub fn from_endpoints(lo: &Rational, hi: &Rational) -> crate::Result<Self> {
        let len = hi - lo;
        if !len.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "interval [{lo}, {hi}) is empty"
            )));
        }
        let k = dyadic_log2(&len).ok_or_else(|| {
            Error::InvalidArgument(format!("length of [{lo}, {hi}) is not a power of 2"))
        })?;
        let pos = lo * &Rational::pow2(-k);
        if !pos.denom().is_one() {
            return Err(Error::InvalidArgument(format!(
                "left endpoint {lo} is not aligned to the scale-2^{k} grid"
            )));
        }
        let l = big_to_i64(pos.numer()).ok_or_else(|| {
            Error::InvalidArgument(format!("position of [{lo}, {hi}) out of range"))
        })?;
        Ok(DyadicInterval::new(k, l))
    }
}

impl std::fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{})", self.lo(), self.hi())
    }
}

impl std::str::FromStr for DyadicInterval {
    type Err = Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let s = s.trim();
        let inner = s
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected [lo,hi), got {s:?}")))?;
        let (lo, hi) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected [lo,hi), got {s:?}")))?;
        let lo: Rational = lo.parse()?;
        let hi: Rational = hi.parse()?;
        DyadicInterval::from_endpoints(&lo, &hi)
    }
}

/// `k` with `x = 2^k`, if `x` is an integer power of 2.
fn dyadic_log2(x: &Rational) -> Option<i64> {
    fn pow2_exp(n: &BigInt) -> Option<i64> {
        if n.is_positive() && (n & &(n - 1i32)).is_zero() {
            Some(n.bits() as i64 - 1)
        } else {
            None
        }
    }
    if x.denom().is_one() {
        pow2_exp(x.numer())
    } else if x.numer().is_one() {
        Some(-pow2_exp(x.denom())?)
    } else {
        None
    }
}

fn big_to_i64(n: &BigInt) -> Option<i64> {
    use num_traits::ToPrimitive;
    n.to_i64()
}

/// Haar function of `interval`: positive on the left child, negative on the
/// right. Normalized means unit 2-norm, so the value magnitude is
/// `|I|^{-1/2}`, an element of Q(sqrt 2) for every scale.
pub fn haar(interval: &DyadicInterval, normalized: bool) -> StepFunction {
    let c = if normalized {
        // 2^(-k/2): rational for even k, a multiple of sqrt 2 for odd k.
        if interval.k % 2 == 0 {
            QSqrt2::from_rational(Rational::pow2(-interval.k / 2))
        } else {
            QSqrt2::new(Rational::zero(), Rational::pow2((-interval.k - 1) / 2))
        }
    } else {
        QSqrt2::one()
    };
    let val = Scalar::from_real(c);
    StepFunction::new(
        vec![interval.lo(), interval.right_child().lo(), interval.hi()],
        vec![val.clone(), -&val],
    )
    .expect("dyadic endpoints are strictly increasing")
}

/// The `2^depth - 1` normalized Haar functions on dyadic subintervals of
/// `root` down to scale `root.k - depth + 1`, labelled by interval.
///
/// The family carries an explicit total order ranking shorter intervals
/// higher: scanning the returned order from least to greatest goes level by
/// level from the root down, left to right within a level. This is the
/// direction that makes order-maximality line up with the parity rule for
/// nested Haar products: a product with a nonzero integral repeats its
/// deepest interval, so the order maximum of such a tuple is never unique.
pub fn haar_grid(root: &DyadicInterval, depth: u32) -> crate::Result<Family> {
    if depth < 1 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if depth > 24 {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} exceeds the supported maximum of 24"
        )));
    }
    let mut order = Vec::with_capacity((1usize << depth) - 1);
    let mut members = Vec::with_capacity(order.capacity());
    for level in 0..depth as i64 {
        let base = root
            .l
            .checked_mul(1i64 << level)
            .ok_or_else(|| Error::InvalidArgument("root position too large".into()))?;
        for offset in 0..(1i64 << level) {
            let interval = DyadicInterval::new(root.k - level, base + offset);
            let label = interval.to_string();
            order.push(label.clone());
            members.push((label, haar(&interval, true)));
        }
    }
    Family::new(members, FamilyOrdering::Explicit(order))
}

/// The `j`-th Rademacher function restricted to `[a, b)`: the 1-periodic
/// sign pattern alternating on half-open pieces of length `2^-j`, starting
/// positive at each integer.
pub fn rademacher(j: u32, a: i64, b: i64) -> crate::Result<StepFunction> {
    if j < 1 {
        return Err(Error::InvalidArgument("rademacher index must be at least 1".into()));
    }
    if b <= a {
        return Err(Error::InvalidArgument(format!("domain [{a}, {b}) is empty")));
    }
    let pieces = ((b as i128 - a as i128) as u128) << j.min(62);
    if j > 62 || pieces > MAX_PIECES as u128 {
        return Err(Error::InvalidArgument(format!(
            "rademacher({j}) on [{a}, {b}) needs {pieces} pieces; refusing"
        )));
    }
    let per_unit = 1usize << j;
    let mut values = Vec::with_capacity((b - a) as usize * per_unit);
    for _ in a..b {
        for i in 0..per_unit {
            values.push(Scalar::from_int(if i % 2 == 0 { 1 } else { -1 }));
        }
    }
    StepFunction::from_grid(Rational::from_int(a), Rational::pow2(-(j as i64)), values)
}

/// Family `f_0, ..., f_{n-1}` on `[0, 1)` where `f_j` is 1 off the `j`-th
/// subinterval of an `n`-piece split and 0 on it. Labels are `0..n-1` with
/// the natural order.
pub fn indicator_complement_family(n: u32) -> crate::Result<Family> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 members".into()));
    }
    let whole = StepFunction::indicator(Rational::from_int(0), Rational::from_int(1))?;
    let mut members = Vec::with_capacity(n as usize);
    for j in 0..n {
        let hole = StepFunction::indicator(
            Rational::new(j as i64, n as i64)?,
            Rational::new(j as i64 + 1, n as i64)?,
        )?;
        members.push((j.to_string(), &whole - &hole));
    }
    Family::new(members, FamilyOrdering::Natural)
}

/// Parameters for [`typeiv_construction`]: tuples have length `2k`, indices
/// run over `1..=n`, and each index carries a positive weight.
#[derive(Clone, Debug)]
pub struct TypeIVConfig {
    k: u32,
    n: u32,
    g_values: Vec<Rational>,
}

impl TypeIVConfig {
    /// `k >= 2` and `n >= 2k - 2`; weights default to 1.
    pub fn new(k: u32, n: u32) -> crate::Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("k = {k} must be at least 2")));
        }
        if n < 2 * k - 2 {
            return Err(Error::InvalidArgument(format!(
                "n = {n} must be at least 2k - 2 = {}",
                2 * k - 2
            )));
        }
        Ok(TypeIVConfig {
            k,
            n,
            g_values: vec![Rational::one(); n as usize],
        })
    }

    /// Replaces the per-index weights; all must be strictly positive.
    pub fn with_g(mut self, g_values: Vec<Rational>) -> crate::Result<Self> {
        if g_values.len() != self.n as usize {
            return Err(Error::InvalidArgument(format!(
                "expected {} weights, got {}",
                self.n,
                g_values.len()
            )));
        }
        if let Some(bad) = g_values.iter().find(|g| !g.is_positive()) {
            return Err(Error::InvalidArgument(format!(
                "weight {bad} is not strictly positive"
            )));
        }
        self.g_values = g_values;
        Ok(self)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of unit intervals: strictly increasing `(2k-2)`-tuples
    /// from `1..=n`.
    pub fn interval_count(&self) -> u64 {
        num_integer::binomial(self.n as u64, 2 * self.k as u64 - 2)
    }
}

/// Builds the finite truncation of the Rademacher-based construction whose
/// distinct-index products all integrate to zero.
///
/// Unit intervals `[l, l+1)`, one per strictly increasing `(2k-2)`-tuple
/// from `1..=n` in lexicographic order. On the interval belonging to a
/// tuple, `f_i` is frozen to the constant `g_i` when `i` is in the tuple
/// and equals `g_i` times the 1-periodic `i`-th Rademacher pattern
/// otherwise. Labels are `1..=n` with the natural order.
pub fn typeiv_construction(cfg: &TypeIVConfig) -> crate::Result<Family> {
    let m = cfg.interval_count();
    let width = 2 * cfg.k as usize - 2;
    let finest = 1u64 << cfg.n.min(63);
    if cfg.n > 24 || m.saturating_mul(finest) > MAX_PIECES {
        return Err(Error::InvalidArgument(format!(
            "construction with k = {}, n = {} is too large to materialize",
            cfg.k, cfg.n
        )));
    }
    let tuples: Vec<Vec<u32>> = (1..=cfg.n).combinations(width).collect();
    debug_assert_eq!(tuples.len() as u64, m);
    let mut members = Vec::with_capacity(cfg.n as usize);
    for i in 1..=cfg.n {
        let g = Scalar::from_rational(cfg.g_values[(i - 1) as usize].clone());
        let per_unit = 1usize << i;
        let step = Rational::pow2(-(i as i64));
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        for (l, tuple) in tuples.iter().enumerate() {
            let left = Rational::from_int(l as i64);
            if tuple.contains(&i) {
                breakpoints.push(left);
                values.push(g.clone());
            } else {
                for t in 0..per_unit {
                    breakpoints.push(&left + &(&step * &Rational::from_int(t as i64)));
                    values.push(if t % 2 == 0 { g.clone() } else { -&g });
                }
            }
        }
        breakpoints.push(Rational::from_int(m as i64));
        members.push((i.to_string(), StepFunction::new(breakpoints, values)?));
    }
    Family::new(members, FamilyOrdering::Natural)
}

/// Projection of `f` onto the Haar functions at a single scale below
/// `root`: the sum of `<f, psi_I> psi_I` over the `2^level` dyadic
/// subintervals of length `|root| 2^-level`.
pub fn martingale_difference(
    f: &StepFunction,
    root: &DyadicInterval,
    level: u32,
) -> crate::Result<StepFunction> {
    if level > 24 {
        return Err(Error::InvalidArgument(format!(
            "level {level} exceeds the supported maximum of 24"
        )));
    }
    if let Some((lo, hi)) = f.support_bounds() {
        if *lo < root.lo() || *hi > root.hi() {
            return Err(Error::InvalidArgument(format!(
                "support [{lo}, {hi}) leaves the root interval {root}"
            )));
        }
    }
    let base = root
        .l
        .checked_mul(1i64 << level)
        .ok_or_else(|| Error::InvalidArgument("root position too large".into()))?;
    let mut acc = StepFunction::zero();
    for offset in 0..(1i64 << level) {
        let interval = DyadicInterval::new(root.k - level as i64, base + offset);
        let psi = haar(&interval, true);
        let coef = (f * &psi.conj()).integral();
        if !coef.is_zero() {
            acc = &acc + &psi.scale(&coef);
        }
    }
    Ok(acc)
}
