//! Compactly supported step functions on the real line, and finite labelled
//! families of them.
//!
//! A [`StepFunction`] is constant on finitely many half-open pieces
//! `[x_i, x_{i+1})` and zero outside the hull of its breakpoints. Every
//! constructor and operation canonicalizes: adjacent pieces with equal values
//! are merged and zero-valued end pieces are dropped, so structural equality
//! is pointwise equality and the zero function has no pieces at all.
//!
//! The class is closed under sums, pointwise products and conjugation, and
//! every integral the crate forms is a finite exact sum of
//! `value * piece length` terms.

use std::collections::HashMap;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::scalar::{QSqrt2, Rational, Scalar};

/// Member name inside a [`Family`].
pub type Label = String;

/// Piecewise-constant, compactly supported function.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StepFunction {
    /// Strictly increasing; empty exactly for the zero function.
    breakpoints: Vec<Rational>,
    /// `values[i]` is taken on `[breakpoints[i], breakpoints[i+1])`.
    /// In canonical form no two adjacent values are equal and the first and
    /// last values are nonzero.
    values: Vec<Scalar>,
}

impl StepFunction {
    pub fn zero() -> Self {
        StepFunction { breakpoints: Vec::new(), values: Vec::new() }
    }

    /// Builds from raw piece data, validating shape and canonicalizing.
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Scalar>) -> crate::Result<Self> {
        if breakpoints.is_empty() {
            if !values.is_empty() {
                return Err(Error::InvalidArgument(
                    "values present without breakpoints".into(),
                ));
            }
            return Ok(StepFunction::zero());
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                values.len()
            )));
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidArgument(format!(
                    "breakpoints not strictly increasing at {} >= {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self::canonical(breakpoints, values))
    }

    /// Indicator of `[lo, hi)`.
    pub fn indicator(lo: Rational, hi: Rational) -> crate::Result<Self> {
        Self::constant_on(lo, hi, Scalar::one())
    }

    /// `value` on `[lo, hi)`, zero elsewhere.
    pub fn constant_on(lo: Rational, hi: Rational, value: Scalar) -> crate::Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "empty interval [{lo}, {hi})"
            )));
        }
        Self::new(vec![lo, hi], vec![value])
    }

    /// Uniform grid: `values[i]` on `[start + i*step, start + (i+1)*step)`.
    pub fn from_grid(start: Rational, step: Rational, values: Vec<Scalar>) -> crate::Result<Self> {
        if !step.is_positive() {
            return Err(Error::InvalidArgument(format!("grid step {step} not positive")));
        }
        let mut breakpoints = Vec::with_capacity(values.len() + 1);
        let mut x = start;
        for _ in 0..=values.len() {
            breakpoints.push(x.clone());
            x = &x + &step;
        }
        Self::new(breakpoints, values)
    }

    fn canonical(breakpoints: Vec<Rational>, values: Vec<Scalar>) -> Self {
        let mut bp: Vec<Rational> = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<Scalar> = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            if let Some(last) = vals.last() {
                if *last == v {
                    continue;
                }
            }
            bp.push(breakpoints[i].clone());
            vals.push(v);
        }
        if let Some(end) = breakpoints.last() {
            bp.push(end.clone());
        }
        while matches!(vals.first(), Some(v) if v.is_zero()) {
            vals.remove(0);
            bp.remove(0);
        }
        while matches!(vals.last(), Some(v) if v.is_zero()) {
            vals.pop();
            bp.pop();
        }
        if vals.is_empty() {
            return StepFunction::zero();
        }
        StepFunction { breakpoints: bp, values: vals }
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of constant pieces in canonical form (zero gaps between
    /// merged pieces count; the zero function has none).
    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(Scalar::is_real)
    }

    /// Hull `[first breakpoint, last breakpoint)` of the support.
    pub fn support_bounds(&self) -> Option<(&Rational, &Rational)> {
        match self.breakpoints.as_slice() {
            [] => None,
            bp => Some((&bp[0], &bp[bp.len() - 1])),
        }
    }

    /// Iterates `(left, right, value)` over the pieces.
    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational, &Scalar)> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (&self.breakpoints[i], &self.breakpoints[i + 1], v))
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn eval(&self, x: &Rational) -> Scalar {
        if self.values.is_empty() {
            return Scalar::zero();
        }
        let bp = &self.breakpoints;
        if x < &bp[0] || x >= &bp[bp.len() - 1] {
            return Scalar::zero();
        }
        let i = bp.partition_point(|b| b <= x) - 1;
        self.values[i].clone()
    }

    /// Common refinement of two breakpoint sets with both value sequences.
    fn aligned(&self, other: &StepFunction) -> (Vec<Rational>, Vec<(Scalar, Scalar)>) {
        let mut grid: Vec<Rational> = Vec::with_capacity(self.breakpoints.len() + other.breakpoints.len());
        let (mut i, mut j) = (0, 0);
        while i < self.breakpoints.len() || j < other.breakpoints.len() {
            let next = match (self.breakpoints.get(i), other.breakpoints.get(j)) {
                (Some(a), Some(b)) => {
                    if a < b {
                        i += 1;
                        a
                    } else if b < a {
                        j += 1;
                        b
                    } else {
                        i += 1;
                        j += 1;
                        a
                    }
                }
                (Some(a), None) => {
                    i += 1;
                    a
                }
                (None, Some(b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            grid.push(next.clone());
        }
        let mut pairs = Vec::with_capacity(grid.len().saturating_sub(1));
        for left in grid.iter().take(grid.len().saturating_sub(1)) {
            pairs.push((self.eval(left), other.eval(left)));
        }
        (grid, pairs)
    }

    fn zip_with(&self, other: &StepFunction, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> StepFunction {
        let (grid, pairs) = self.aligned(other);
        let values = pairs.iter().map(|(a, b)| op(a, b)).collect();
        StepFunction::canonical(grid, values)
    }

    /// Transforms each value; `op` must send zero to zero so the implicit
    /// zero outside the support stays consistent.
    fn map_values(&self, op: impl Fn(&Scalar) -> Scalar) -> StepFunction {
        debug_assert!(op(&Scalar::zero()).is_zero());
        let values = self.values.iter().map(op).collect();
        StepFunction::canonical(self.breakpoints.clone(), values)
    }

    pub fn scale(&self, c: &Scalar) -> StepFunction {
        self.map_values(|v| v * c)
    }

    pub fn conj(&self) -> StepFunction {
        self.map_values(Scalar::conj)
    }

    /// `|f|^2` as a real-valued step function.
    pub fn abs_squared(&self) -> StepFunction {
        self.map_values(|v| Scalar::from_real(v.modulus_squared()))
    }

    /// Exact Lebesgue integral.
    pub fn integral(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for (l, r, v) in self.pieces() {
            acc += &(v * &Scalar::from_rational(r - l));
        }
        acc
    }

    /// `\int |f|^p` for even `p >= 2`; stays inside Q(sqrt 2).
    pub fn lp_power(&self, p: u32) -> crate::Result<QSqrt2> {
        if p == 0 || p % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "exponent {p} must be even and positive"
            )));
        }
        let mut acc = QSqrt2::zero();
        for (l, r, v) in self.pieces() {
            let len = QSqrt2::from_rational(r - l);
            acc += &(&v.modulus_squared().pow(p / 2) * &len);
        }
        Ok(acc)
    }

    pub fn l2_norm_squared(&self) -> QSqrt2 {
        self.lp_power(2).expect("2 is even")
    }
}

impl std::ops::Add<&StepFunction> for &StepFunction {
    type Output = StepFunction;
    fn add(self, rhs: &StepFunction) -> StepFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl std::ops::Sub<&StepFunction> for &StepFunction {
    type Output = StepFunction;
    fn sub(self, rhs: &StepFunction) -> StepFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Pointwise product.
impl std::ops::Mul<&StepFunction> for &StepFunction {
    type Output = StepFunction;
    fn mul(self, rhs: &StepFunction) -> StepFunction {
        if self.is_zero() || rhs.is_zero() {
            return StepFunction::zero();
        }
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl std::ops::Neg for &StepFunction {
    type Output = StepFunction;
    fn neg(self) -> StepFunction {
        self.map_values(|v| -v)
    }
}

#[derive(Serialize)]
struct StepFnSer<'a> {
    breakpoints: &'a [Rational],
    values: &'a [Scalar],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepFnDe {
    breakpoints: Vec<Rational>,
    values: Vec<Scalar>,
}

impl Serialize for StepFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StepFnSer { breakpoints: &self.breakpoints, values: &self.values }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = StepFnDe::deserialize(deserializer)?;
        StepFunction::new(raw.breakpoints, raw.values)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Total order on a family's labels, when one is declared.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FamilyOrdering {
    /// No order declared; order-sensitive checks are not applicable.
    None,
    /// Labels are integers, ordered numerically.
    Natural,
    /// Explicit list, least first; must be a permutation of the labels.
    Explicit(Vec<Label>),
}

/// Finite labelled family of step functions.
///
/// Members are kept sorted by label so that every enumeration the crate
/// performs is deterministic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Family {
    members: Vec<(Label, StepFunction)>,
    ordering: FamilyOrdering,
    all_real: bool,
}

impl Family {
    pub fn new(
        members: Vec<(Label, StepFunction)>,
        ordering: FamilyOrdering,
    ) -> crate::Result<Self> {
        let mut members = members;
        members.sort_by(|(a, _), (b, _)| a.cmp(b));
        for w in members.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateLabel(w[0].0.clone()));
            }
        }
        match &ordering {
            FamilyOrdering::None => {}
            FamilyOrdering::Natural => {
                for (label, _) in &members {
                    if label.parse::<i64>().is_err() {
                        return Err(Error::InvalidArgument(format!(
                            "natural ordering needs integer labels, got {label:?}"
                        )));
                    }
                }
            }
            FamilyOrdering::Explicit(list) => {
                let mut sorted: Vec<&Label> = list.iter().collect();
                sorted.sort();
                for w in sorted.windows(2) {
                    if w[0] == w[1] {
                        return Err(Error::DuplicateLabel((*w[0]).clone()));
                    }
                }
                if sorted.len() != members.len()
                    || sorted.iter().zip(&members).any(|(l, (m, _))| *l != m)
                {
                    return Err(Error::InvalidArgument(
                        "explicit ordering is not a permutation of the labels".into(),
                    ));
                }
            }
        }
        let all_real = members.iter().all(|(_, f)| f.is_real());
        Ok(Family { members, ordering, all_real })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Labels in ascending lexicographic order.
    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.members.iter().map(|(l, _)| l)
    }

    /// Member at position `i` of the sorted label list.
    pub fn member(&self, i: usize) -> (&Label, &StepFunction) {
        let (l, f) = &self.members[i];
        (l, f)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &StepFunction)> {
        self.members.iter().map(|(l, f)| (l, f))
    }

    pub fn get(&self, label: &str) -> Option<&StepFunction> {
        self.members
            .binary_search_by(|(l, _)| l.as_str().cmp(label))
            .ok()
            .map(|i| &self.members[i].1)
    }

    pub fn ordering(&self) -> &FamilyOrdering {
        &self.ordering
    }

    pub fn has_ordering(&self) -> bool {
        !matches!(self.ordering, FamilyOrdering::None)
    }

    /// True when every member is real-valued.
    pub fn all_real(&self) -> bool {
        self.all_real
    }

    /// Rank of each label in the declared total order, least first.
    pub fn rank(&self) -> crate::Result<HashMap<Label, usize>> {
        match &self.ordering {
            FamilyOrdering::None => Err(Error::MissingOrdering),
            FamilyOrdering::Natural => {
                let mut keyed: Vec<(i64, Label)> = self
                    .members
                    .iter()
                    .map(|(l, _)| (l.parse::<i64>().expect("validated at construction"), l.clone()))
                    .collect();
                keyed.sort();
                Ok(keyed
                    .into_iter()
                    .enumerate()
                    .map(|(i, (_, l))| (l, i))
                    .collect())
            }
            FamilyOrdering::Explicit(list) => Ok(list
                .iter()
                .enumerate()
                .map(|(i, l)| (l.clone(), i))
                .collect()),
        }
    }

    /// Pointwise sum of all members.
    pub fn sum(&self) -> StepFunction {
        let mut acc = StepFunction::zero();
        for (_, f) in &self.members {
            acc = &acc + f;
        }
        acc
    }

    /// Sum of `|f_j|^2` over the family, as a real step function.
    pub fn square_sum(&self) -> StepFunction {
        let mut acc = StepFunction::zero();
        for (_, f) in &self.members {
            acc = &acc + &f.abs_squared();
        }
        acc
    }

    /// `\int (sum_j |f_j|^2)^r` for `r >= 1`.
    pub fn square_function_power(&self, r: u32) -> crate::Result<QSqrt2> {
        if r == 0 {
            return Err(Error::InvalidArgument("exponent r must be positive".into()));
        }
        let g = self.square_sum();
        let mut acc = QSqrt2::zero();
        for (l, rt, v) in g.pieces() {
            let len = QSqrt2::from_rational(rt - l);
            acc += &(&v.re.pow(r) * &len);
        }
        Ok(acc)
    }
}

#[derive(Serialize)]
struct MemberSer<'a> {
    label: &'a str,
    #[serde(rename = "fn")]
    func: &'a StepFunction,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberDe {
    label: String,
    #[serde(rename = "fn")]
    func: StepFunction,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OrderingRepr {
    Keyword(String),
    List(Vec<String>),
}

#[derive(Serialize)]
struct FamilySer<'a> {
    members: Vec<MemberSer<'a>>,
    ordering: Option<OrderingRepr>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDe {
    members: Vec<MemberDe>,
    #[serde(default)]
    ordering: Option<OrderingRepr>,
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let members = self
            .members
            .iter()
            .map(|(l, f)| MemberSer { label: l, func: f })
            .collect();
        let ordering = match &self.ordering {
            FamilyOrdering::None => None,
            FamilyOrdering::Natural => Some(OrderingRepr::Keyword("natural".into())),
            FamilyOrdering::Explicit(list) => Some(OrderingRepr::List(list.clone())),
        };
        FamilySer { members, ordering }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = FamilyDe::deserialize(deserializer)?;
        let ordering = match raw.ordering {
            None => FamilyOrdering::None,
            Some(OrderingRepr::Keyword(k)) if k == "natural" => FamilyOrdering::Natural,
            Some(OrderingRepr::Keyword(k)) => {
                return Err(D::Error::custom(format!(
                    "unknown ordering keyword {k:?}; expected \"natural\", a label list or null"
                )))
            }
            Some(OrderingRepr::List(list)) => FamilyOrdering::Explicit(list),
        };
        let members = raw.members.into_iter().map(|m| (m.label, m.func)).collect();
        Family::new(members, ordering).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn int(n: i64) -> Rational {
        Rational::from_int(n)
    }

    /// `+1` on the left half of `[0, 1)`, `-1` on the right half.
    fn haar_unit() -> StepFunction {
        StepFunction::new(
            vec![int(0), rat(1, 2), int(1)],
            vec![Scalar::from_int(1), Scalar::from_int(-1)],
        )
        .unwrap()
    }

    #[test]
    fn canonical_merges_and_trims() {
        let f = StepFunction::new(
            vec![int(0), int(1), int(2), int(3), int(4)],
            vec![
                Scalar::zero(),
                Scalar::from_int(5),
                Scalar::from_int(5),
                Scalar::zero(),
            ],
        )
        .unwrap();
        assert_eq!(f.breakpoints(), &[int(1), int(3)]);
        assert_eq!(f.values(), &[Scalar::from_int(5)]);

        let z = StepFunction::new(vec![int(0), int(1)], vec![Scalar::zero()]).unwrap();
        assert!(z.is_zero());
        assert_eq!(z, StepFunction::zero());
    }

    #[test]
    fn interior_zero_pieces_survive() {
        let f = StepFunction::new(
            vec![int(0), int(1), int(2), int(3)],
            vec![Scalar::from_int(1), Scalar::zero(), Scalar::from_int(1)],
        )
        .unwrap();
        assert_eq!(f.values().len(), 3);
        assert_eq!(f.eval(&rat(3, 2)), Scalar::zero());
    }

    #[test]
    fn new_rejects_bad_shapes() {
        assert!(StepFunction::new(vec![int(0)], vec![Scalar::one()]).is_err());
        assert!(StepFunction::new(vec![int(0), int(0)], vec![Scalar::one()]).is_err());
        assert!(StepFunction::new(vec![int(1), int(0)], vec![Scalar::one()]).is_err());
        assert!(StepFunction::new(vec![], vec![Scalar::one()]).is_err());
        assert!(StepFunction::indicator(int(1), int(1)).is_err());
    }

    #[test]
    fn eval_is_right_open() {
        let f = StepFunction::indicator(int(0), int(1)).unwrap();
        assert_eq!(f.eval(&int(0)), Scalar::one());
        assert_eq!(f.eval(&rat(999, 1000)), Scalar::one());
        assert_eq!(f.eval(&int(1)), Scalar::zero());
        assert_eq!(f.eval(&rat(-1, 2)), Scalar::zero());
    }

    #[test]
    fn sum_of_adjacent_indicators_merges() {
        let a = StepFunction::indicator(int(0), int(1)).unwrap();
        let b = StepFunction::indicator(int(1), int(2)).unwrap();
        let s = &a + &b;
        assert_eq!(s, StepFunction::indicator(int(0), int(2)).unwrap());
        let zero = &a - &a;
        assert!(zero.is_zero());
    }

    #[test]
    fn product_intersects_supports() {
        let a = StepFunction::indicator(int(0), int(1)).unwrap();
        let b = StepFunction::indicator(rat(1, 2), int(2)).unwrap();
        assert_eq!(&a * &b, StepFunction::indicator(rat(1, 2), int(1)).unwrap());
        assert_eq!(&a * &StepFunction::zero(), StepFunction::zero());
    }

    #[test]
    fn integral_and_lp_power() {
        let h = haar_unit();
        assert_eq!(h.integral(), Scalar::zero());
        assert_eq!(h.l2_norm_squared(), QSqrt2::one());
        assert_eq!(h.lp_power(4).unwrap(), QSqrt2::one());
        assert!(h.lp_power(3).is_err());
        assert!(h.lp_power(0).is_err());

        // Mass 1/2 spread over [0, 2) with value sqrt 2 / 2 per unit piece:
        // the 2-norm squared is 2 * (1/2) = 1.
        let half_sqrt2 = Scalar::from_real(QSqrt2::new(int(0), rat(1, 2)));
        let g = StepFunction::new(vec![int(0), int(2)], vec![half_sqrt2]).unwrap();
        assert_eq!(g.l2_norm_squared(), QSqrt2::one());
    }

    #[test]
    fn complex_values_integrate_componentwise() {
        let z = Scalar::new(QSqrt2::one(), QSqrt2::from_int(3));
        let f = StepFunction::constant_on(int(0), rat(1, 2), z.clone()).unwrap();
        assert_eq!(
            f.integral(),
            &z * &Scalar::from_rational(rat(1, 2))
        );
        assert_eq!(f.abs_squared().integral(), Scalar::from_int(5));
    }

    #[test]
    fn serde_fixed_form() {
        let h = haar_unit();
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(
            json,
            r#"{"breakpoints":["0","1/2","1"],"values":[["1","0","0","0"],["-1","0","0","0"]]}"#
        );
        let back: StepFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
        // Non-canonical input canonicalizes on the way in.
        let padded: StepFunction = serde_json::from_str(
            r#"{"breakpoints":["-1","0","1/2","1"],"values":[["0","0","0","0"],["1","0","0","0"],["-1","0","0","0"]]}"#,
        )
        .unwrap();
        assert_eq!(padded, h);
        assert!(serde_json::from_str::<StepFunction>(
            r#"{"breakpoints":["1","0"],"values":[["1","0","0","0"]]}"#
        )
        .is_err());
    }

    #[test]
    fn family_sorts_and_validates() {
        let f = StepFunction::indicator(int(0), int(1)).unwrap();
        let fam = Family::new(
            vec![("b".into(), f.clone()), ("a".into(), f.clone())],
            FamilyOrdering::None,
        )
        .unwrap();
        assert_eq!(fam.labels().collect::<Vec<_>>(), ["a", "b"]);
        assert!(fam.get("a").is_some());
        assert!(fam.get("c").is_none());

        let dup = Family::new(
            vec![("a".into(), f.clone()), ("a".into(), f.clone())],
            FamilyOrdering::None,
        );
        assert!(matches!(dup, Err(Error::DuplicateLabel(_))));

        let bad_natural = Family::new(
            vec![("x".into(), f.clone())],
            FamilyOrdering::Natural,
        );
        assert!(bad_natural.is_err());

        let bad_explicit = Family::new(
            vec![("a".into(), f.clone())],
            FamilyOrdering::Explicit(vec!["a".into(), "b".into()]),
        );
        assert!(bad_explicit.is_err());
    }

    #[test]
    fn natural_rank_is_numeric_not_lexicographic() {
        let f = StepFunction::indicator(int(0), int(1)).unwrap();
        let fam = Family::new(
            vec![
                ("2".into(), f.clone()),
                ("10".into(), f.clone()),
                ("1".into(), f.clone()),
            ],
            FamilyOrdering::Natural,
        )
        .unwrap();
        let rank = fam.rank().unwrap();
        assert_eq!(rank["1"], 0);
        assert_eq!(rank["2"], 1);
        assert_eq!(rank["10"], 2);

        let unordered = Family::new(vec![("1".into(), f)], FamilyOrdering::None).unwrap();
        assert!(matches!(unordered.rank(), Err(Error::MissingOrdering)));
    }

    #[test]
    fn square_function_power_examples() {
        let mk_haar = |lo: Rational, mid: Rational, hi: Rational| {
            StepFunction::new(
                vec![lo, mid, hi],
                vec![Scalar::one(), Scalar::from_int(-1)],
            )
            .unwrap()
        };
        let h0 = mk_haar(int(0), rat(1, 2), int(1));
        let h1 = mk_haar(int(1), rat(3, 2), int(2));
        let fam = Family::new(
            vec![("0".into(), h0), ("1".into(), h1)],
            FamilyOrdering::None,
        )
        .unwrap();
        // Each |h_j|^2 is an indicator, the square sum is an indicator of
        // [0, 2), and its square integrates to 2.
        assert_eq!(fam.square_function_power(2).unwrap(), QSqrt2::from_int(2));

        let chi = StepFunction::indicator(int(0), int(1)).unwrap();
        let twice = Family::new(
            vec![("a".into(), chi.clone()), ("b".into(), chi)],
            FamilyOrdering::None,
        )
        .unwrap();
        assert_eq!(twice.square_function_power(2).unwrap(), QSqrt2::from_int(4));
        assert!(twice.square_function_power(0).is_err());
    }

    #[test]
    fn family_serde_round_trip() {
        let h = haar_unit();
        let fam = Family::new(
            vec![("0".into(), h.clone()), ("1".into(), h.scale(&Scalar::i()))],
            FamilyOrdering::Explicit(vec!["1".into(), "0".into()]),
        )
        .unwrap();
        assert!(!fam.all_real());
        let json = serde_json::to_string(&fam).unwrap();
        let back: Family = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fam);

        let natural: Family = serde_json::from_str(
            r#"{"members":[{"label":"0","fn":{"breakpoints":["0","1"],"values":[["1","0","0","0"]]}}],"ordering":"natural"}"#,
        )
        .unwrap();
        assert!(natural.has_ordering());

        let none: Family = serde_json::from_str(
            r#"{"members":[{"label":"0","fn":{"breakpoints":["0","1"],"values":[["1","0","0","0"]]}}],"ordering":null}"#,
        )
        .unwrap();
        assert!(!none.has_ordering());

        assert!(serde_json::from_str::<Family>(
            r#"{"members":[],"ordering":"backwards"}"#
        )
        .is_err());
    }
}
