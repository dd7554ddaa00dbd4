//! Superorthogonality type classification.
//!
//! A family is superorthogonal of a given type for `2r`-tuples when the
//! integral of `f_{j_1} ... f_{j_r} conj(f_{j_{r+1}} ... f_{j_{2r}})`
//! vanishes on every tuple in that type's zone. The zones form a chain:
//! all-distinct (IV) inside unique-order-maximum (III) inside
//! some-multiplicity-one (II) inside some-odd-multiplicity (I) inside
//! halves-not-permutations (I*), so the types get strictly harder to
//! satisfy from IV up to I*.
//!
//! The integrand only depends on the multisets formed by the two halves of
//! a tuple, so the classifier walks canonical [`TupleClass`] representatives
//! instead of raw tuples. That collapses the `|J|^{2r}` tuple space to the
//! much smaller class space and is what makes exhaustive exact
//! classification tractable; [`classify_naive`] keeps the raw tuple walk
//! alive as a cross-checking oracle.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::scalar::Scalar;
use crate::stepfn::{Family, Label, StepFunction};

/// Number of combined multisets handed to the thread pool at a time. Fixed
/// so that violation counting is independent of the worker count.
const BATCH: usize = 512;

/// The five superorthogonality types, strongest zone last.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SuperType {
    IStar,
    I,
    II,
    III,
    IV,
}

impl SuperType {
    /// Chain order from smallest zone to largest: IV, III, II, I, I*.
    pub const CHAIN: [SuperType; 5] = [
        SuperType::IV,
        SuperType::III,
        SuperType::II,
        SuperType::I,
        SuperType::IStar,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuperType::IStar => "I*",
            SuperType::I => "I",
            SuperType::II => "II",
            SuperType::III => "III",
            SuperType::IV => "IV",
        }
    }

    /// Whether membership in the zone is decided by the combined multiset
    /// alone (true for IV, III, II, I; false for I*, which compares halves).
    fn combined_decided(&self) -> bool {
        !matches!(self, SuperType::IStar)
    }
}

impl fmt::Display for SuperType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuperType {
    type Err = Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I*" | "ISTAR" => Ok(SuperType::IStar),
            "I" => Ok(SuperType::I),
            "II" => Ok(SuperType::II),
            "III" => Ok(SuperType::III),
            "IV" => Ok(SuperType::IV),
            other => Err(Error::Parse(format!(
                "unknown type {other:?}; expected one of I*, I, II, III, IV"
            ))),
        }
    }
}

/// Canonical representative of all `2r`-tuples whose first half permutes
/// `left` and second half permutes `right`; both halves are kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TupleClass {
    left: Vec<Label>,
    right: Vec<Label>,
}

impl TupleClass {
    pub fn new(mut left: Vec<Label>, mut right: Vec<Label>) -> Self {
        left.sort();
        right.sort();
        TupleClass { left, right }
    }

    pub fn left(&self) -> &[Label] {
        &self.left
    }

    pub fn right(&self) -> &[Label] {
        &self.right
    }

    /// All `2r` labels with multiplicity, sorted.
    pub fn combined(&self) -> Vec<&Label> {
        self.left.iter().merge(self.right.iter()).collect()
    }

    fn counts(&self) -> Vec<(&Label, usize)> {
        let mut out: Vec<(&Label, usize)> = Vec::new();
        for l in self.combined() {
            match out.last_mut() {
                Some((prev, m)) if *prev == l => *m += 1,
                _ => out.push((l, 1)),
            }
        }
        out
    }
}

impl Serialize for TupleClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("TupleClass", 2)?;
        s.serialize_field("left", &self.left)?;
        s.serialize_field("right", &self.right)?;
        s.end()
    }
}

/// Exact membership of a class in the zone of a type. Type III needs the
/// family's rank map.
pub fn in_zone(
    t: SuperType,
    cls: &TupleClass,
    rank: Option<&HashMap<Label, usize>>,
) -> crate::Result<bool> {
    if t == SuperType::IStar {
        return Ok(cls.left != cls.right);
    }
    let counts = cls.counts();
    Ok(match t {
        SuperType::IV => counts.iter().all(|(_, m)| *m == 1),
        SuperType::II => counts.iter().any(|(_, m)| *m == 1),
        SuperType::I => counts.iter().any(|(_, m)| *m % 2 == 1),
        SuperType::III => {
            let rank = rank.ok_or(Error::MissingOrdering)?;
            let mut top: Option<(usize, usize)> = None;
            for (label, m) in &counts {
                let r = *rank
                    .get(*label)
                    .ok_or_else(|| Error::UnknownLabel((*label).clone()))?;
                if top.map_or(true, |(best, _)| r > best) {
                    top = Some((r, *m));
                }
            }
            matches!(top, Some((_, 1)))
        }
        SuperType::IStar => unreachable!("handled above"),
    })
}

/// Exact integral of the class: product of the left members times the
/// conjugates of the right members.
pub fn product_integral(fam: &Family, cls: &TupleClass) -> crate::Result<Scalar> {
    let mut acc: Option<StepFunction> = None;
    for (half, conj) in [(&cls.left, false), (&cls.right, true)] {
        for label in half {
            let f = fam
                .get(label)
                .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            let f = if conj { f.conj() } else { f.clone() };
            acc = Some(match acc.take() {
                None => f,
                Some(a) => &a * &f,
            });
            if matches!(&acc, Some(a) if a.is_zero()) {
                return Ok(Scalar::zero());
            }
        }
    }
    Ok(acc.map_or_else(Scalar::zero, |a| a.integral()))
}

/// Verdict for a single type inside a [`ClassificationReport`].
#[derive(Clone, Debug)]
pub struct TypeVerdict {
    /// `Some(true)` holds, `Some(false)` fails, `None` not applicable
    /// (type III on a family without a declared order).
    pub holds: Option<bool>,
    /// Number of exact integral evaluations performed for this type. For a
    /// real family one evaluation covers every split of a combined
    /// multiset, since conjugation does not change the integrand.
    pub classes_checked: u64,
    pub witness: Option<Witness>,
}

/// A zone class with a nonzero integral, disproving one type.
#[derive(Clone, Debug)]
pub struct Witness {
    pub class: TupleClass,
    pub integral: Scalar,
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub r: u32,
    /// In chain order IV, III, II, I, I*, restricted to the requested types.
    pub types: Vec<(SuperType, TypeVerdict)>,
}

impl ClassificationReport {
    /// True when every requested, applicable type holds.
    pub fn all_hold(&self) -> bool {
        self.types
            .iter()
            .all(|(_, v)| v.holds.unwrap_or(true))
    }

    pub fn verdict(&self, t: SuperType) -> Option<&TypeVerdict> {
        self.types.iter().find(|(s, _)| *s == t).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut types = serde_json::Map::new();
        for (t, v) in &self.types {
            let mut obj = serde_json::Map::new();
            obj.insert("holds".into(), serde_json::to_value(v.holds).unwrap());
            obj.insert("classes_checked".into(), v.classes_checked.into());
            if let Some(w) = &v.witness {
                let mut wobj = serde_json::Map::new();
                wobj.insert("left".into(), serde_json::to_value(w.class.left()).unwrap());
                wobj.insert("right".into(), serde_json::to_value(w.class.right()).unwrap());
                wobj.insert("integral".into(), serde_json::to_value(&w.integral).unwrap());
                obj.insert("witness".into(), wobj.into());
            }
            types.insert(t.name().into(), obj.into());
        }
        let mut root = serde_json::Map::new();
        root.insert("r".into(), self.r.into());
        root.insert("types".into(), types.into());
        root.into()
    }
}

impl Serialize for ClassificationReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// Run-length encoding of a sorted index multiset.
fn runs(c: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &i in c {
        match out.last_mut() {
            Some((prev, m)) if *prev == i => *m += 1,
            _ => out.push((i, 1)),
        }
    }
    out
}

/// Zone membership decided on the combined multiset. For I* this means
/// "some split of this multiset lies in the zone".
fn combined_in_zone(t: SuperType, rs: &[(usize, usize)], rank_of: Option<&[usize]>) -> bool {
    match t {
        SuperType::IV => rs.iter().all(|(_, m)| *m == 1),
        SuperType::II => rs.iter().any(|(_, m)| *m == 1),
        SuperType::I => rs.iter().any(|(_, m)| *m % 2 == 1),
        SuperType::III => {
            let rank_of = rank_of.expect("rank required for type III");
            rs.iter()
                .max_by_key(|(i, _)| rank_of[*i])
                .map_or(false, |(_, m)| *m == 1)
        }
        SuperType::IStar => rs.len() >= 2,
    }
}

/// All distinct sub-multisets of size `r` of the sorted multiset `c`, in
/// lexicographic order, paired with their complements.
fn splits(c: &[usize], r: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let rs = runs(c);
    let mut out = Vec::new();
    let mut take = vec![0usize; rs.len()];
    fn rec(
        rs: &[(usize, usize)],
        pos: usize,
        remaining: usize,
        take: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if pos == rs.len() {
            if remaining == 0 {
                let mut sub = Vec::new();
                for (j, &(i, _)) in rs.iter().enumerate() {
                    sub.extend(std::iter::repeat(i).take(take[j]));
                }
                out.push(sub);
            }
            return;
        }
        let avail: usize = rs[pos..].iter().map(|(_, m)| m).sum();
        if avail < remaining {
            return;
        }
        // Taking more of the smallest remaining index first yields
        // lexicographically increasing sub-multisets.
        let hi = rs[pos].1.min(remaining);
        for k in (0..=hi).rev() {
            take[pos] = k;
            rec(rs, pos + 1, remaining - k, take, out);
        }
        take[pos] = 0;
    }
    let mut lefts = Vec::new();
    rec(&rs, 0, r, &mut take, &mut lefts);
    for left in lefts {
        let mut right = Vec::with_capacity(c.len() - r);
        let mut it = left.iter().peekable();
        for &x in c {
            if it.peek() == Some(&&x) {
                it.next();
            } else {
                right.push(x);
            }
        }
        out.push((left, right));
    }
    out
}

fn class_from_indices(fam: &Family, left: &[usize], right: &[usize]) -> TupleClass {
    let lab = |i: &usize| fam.member(*i).0.clone();
    TupleClass::new(left.iter().map(lab).collect(), right.iter().map(lab).collect())
}

/// Integral of the product of the members given by the sorted index
/// multiset `left` and the conjugates of those in `right`, with early exit
/// once the running product vanishes.
fn integral_of_split(fam: &Family, left: &[usize], right: &[usize]) -> Scalar {
    let mut acc: Option<StepFunction> = None;
    for (half, conj) in [(left, false), (right, true)] {
        for &i in half {
            let f = fam.member(i).1;
            let f = if conj { f.conj() } else { f.clone() };
            acc = Some(match acc.take() {
                None => f,
                Some(a) => &a * &f,
            });
            if matches!(&acc, Some(a) if a.is_zero()) {
                return Scalar::zero();
            }
        }
    }
    acc.map_or_else(Scalar::zero, |a| a.integral())
}

/// Work done by one parallel task: how many integrals it evaluated and the
/// first violation it hit, if any, with the count up to that violation.
struct TaskOutcome {
    checks: u64,
    violation: Option<(u64, TupleClass, Scalar)>,
}

/// Checks one combined multiset for one type. Real families evaluate a
/// single integral per multiset; complex families evaluate one per split.
fn check_combined(
    fam: &Family,
    r: usize,
    t: SuperType,
    rank_of: Option<&[usize]>,
    c: &[usize],
) -> TaskOutcome {
    let rs = runs(c);
    if !combined_in_zone(t, &rs, rank_of) {
        return TaskOutcome { checks: 0, violation: None };
    }
    if fam.all_real() {
        // Conjugation is the identity, so the integrand is the plain product
        // over the combined multiset and every split shares its value.
        let (left, right) = (&c[..r], &c[r..]);
        let v = integral_of_split(fam, left, right);
        let violation = (!v.is_zero()).then(|| (1, class_from_indices(fam, left, right), v));
        TaskOutcome { checks: 1, violation }
    } else {
        let mut checks = 0;
        for (left, right) in splits(c, r) {
            if t == SuperType::IStar && left == right {
                continue;
            }
            checks += 1;
            let v = integral_of_split(fam, &left, &right);
            if !v.is_zero() {
                return TaskOutcome {
                    checks,
                    violation: Some((checks, class_from_indices(fam, &left, &right), v)),
                };
            }
        }
        TaskOutcome { checks, violation: None }
    }
}

fn walk_type(fam: &Family, r: u32, t: SuperType, rank_of: Option<&[usize]>) -> TypeVerdict {
    let n = fam.len();
    let r = r as usize;
    let mut checked: u64 = 0;
    let mut iter = (0..n).combinations_with_replacement(2 * r);
    loop {
        let batch: Vec<Vec<usize>> = iter.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            break;
        }
        let outcomes: Vec<TaskOutcome> = batch
            .par_iter()
            .map(|c| check_combined(fam, r, t, rank_of, c))
            .collect();
        for outcome in outcomes {
            match outcome.violation {
                Some((at, class, integral)) => {
                    return TypeVerdict {
                        holds: Some(false),
                        classes_checked: checked + at,
                        witness: Some(Witness { class, integral }),
                    };
                }
                None => checked += outcome.checks,
            }
        }
    }
    TypeVerdict { holds: Some(true), classes_checked: checked, witness: None }
}

/// Restricts and orders the requested types along the chain, dropping
/// duplicates.
fn canonical_request(types: &[SuperType]) -> Vec<SuperType> {
    SuperType::CHAIN
        .iter()
        .copied()
        .filter(|t| types.contains(t))
        .collect()
}

/// Ranks indexed by member position, when the family declares an order.
fn rank_by_position(fam: &Family) -> crate::Result<Option<Vec<usize>>> {
    if !fam.has_ordering() {
        return Ok(None);
    }
    let map = fam.rank()?;
    Ok(Some(
        (0..fam.len()).map(|i| map[fam.member(i).0]).collect(),
    ))
}

/// Classifies the family for each requested type by exhausting that type's
/// zone classes, short-circuiting on the first nonzero integral. Witnesses
/// are the earliest violations in a fixed canonical order (combined
/// multisets lexicographic over sorted labels, splits lexicographic within
/// one), so reports are identical across worker counts.
pub fn classify(fam: &Family, r: u32, types: &[SuperType]) -> crate::Result<ClassificationReport> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let rank_of = rank_by_position(fam)?;
    let mut out = Vec::new();
    for t in canonical_request(types) {
        if t == SuperType::III && rank_of.is_none() {
            out.push((t, TypeVerdict { holds: None, classes_checked: 0, witness: None }));
            continue;
        }
        out.push((t, walk_type(fam, r, t, rank_of.as_deref())));
    }
    Ok(ClassificationReport { r, types: out })
}

/// Tuple-by-tuple oracle for [`classify`]: walks all `|J|^{2r}` raw tuples
/// in lexicographic order and evaluates every in-zone tuple directly. Cost
/// grows too fast for real use; kept to cross-check the class walk.
/// `classes_checked` counts tuples here.
pub fn classify_naive(
    fam: &Family,
    r: u32,
    types: &[SuperType],
) -> crate::Result<ClassificationReport> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let rank_of = rank_by_position(fam)?;
    let n = fam.len();
    let width = 2 * r as usize;
    let mut out = Vec::new();
    for t in canonical_request(types) {
        if t == SuperType::III && rank_of.is_none() {
            out.push((t, TypeVerdict { holds: None, classes_checked: 0, witness: None }));
            continue;
        }
        let mut verdict = TypeVerdict { holds: Some(true), classes_checked: 0, witness: None };
        for tuple in (0..width).map(|_| 0..n).multi_cartesian_product() {
            if !tuple_in_zone(t, &tuple, r as usize, rank_of.as_deref()) {
                continue;
            }
            verdict.classes_checked += 1;
            let (left, right) = tuple.split_at(r as usize);
            let mut left = left.to_vec();
            let mut right = right.to_vec();
            left.sort_unstable();
            right.sort_unstable();
            let v = integral_of_split(fam, &left, &right);
            if !v.is_zero() {
                verdict.holds = Some(false);
                verdict.witness = Some(Witness {
                    class: class_from_indices(fam, &left, &right),
                    integral: v,
                });
                break;
            }
        }
        out.push((t, verdict));
    }
    Ok(ClassificationReport { r, types: out })
}

/// Zone membership for a raw index tuple (first `r` entries unconjugated).
fn tuple_in_zone(t: SuperType, tuple: &[usize], r: usize, rank_of: Option<&[usize]>) -> bool {
    if t == SuperType::IStar {
        let mut left = tuple[..r].to_vec();
        let mut right = tuple[r..].to_vec();
        left.sort_unstable();
        right.sort_unstable();
        return left != right;
    }
    let mut sorted = tuple.to_vec();
    sorted.sort_unstable();
    combined_in_zone(t, &runs(&sorted), rank_of)
}

/// Enumerates the canonical classes of `Z(t)` over the given labels, in the
/// same order `classify` visits them. `merge_swapped` folds `(left, right)`
/// with `(right, left)` into one representative, which is sound whenever
/// the two have equal integrals (real families).
pub fn enumerate_classes(
    labels: &[Label],
    r: u32,
    t: SuperType,
    rank: Option<&HashMap<Label, usize>>,
    merge_swapped: bool,
) -> crate::Result<Vec<TupleClass>> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let mut sorted: Vec<&Label> = labels.iter().collect();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateLabel(w[0].clone()));
        }
    }
    let rank_of: Option<Vec<usize>> = match (t, rank) {
        (SuperType::III, None) => return Err(Error::MissingOrdering),
        (SuperType::III, Some(map)) => {
            let mut of = Vec::with_capacity(sorted.len());
            for l in &sorted {
                of.push(
                    *map.get(*l)
                        .ok_or_else(|| Error::UnknownLabel((*l).clone()))?,
                );
            }
            Some(of)
        }
        _ => None,
    };
    let r = r as usize;
    let mut out = Vec::new();
    for c in (0..sorted.len()).combinations_with_replacement(2 * r) {
        let rs = runs(&c);
        if t.combined_decided() && !combined_in_zone(t, &rs, rank_of.as_deref()) {
            continue;
        }
        for (left, right) in splits(&c, r) {
            if t == SuperType::IStar && left == right {
                continue;
            }
            if merge_swapped && left > right {
                continue;
            }
            let to_labels =
                |half: &[usize]| half.iter().map(|&i| sorted[i].clone()).collect::<Vec<_>>();
            out.push(TupleClass::new(to_labels(&left), to_labels(&right)));
        }
    }
    Ok(out)
}

/// One inclusion of the zone chain, verified tuple by tuple.
#[derive(Clone, Debug, Serialize)]
pub struct InclusionStep {
    pub smaller: SuperType,
    pub larger: SuperType,
    /// No tuple of the smaller zone escaped the larger zone.
    pub inclusion_holds: bool,
    /// A tuple in the larger zone but not the smaller one, if any exists.
    pub strictness_witness: Option<Vec<Label>>,
}

impl Serialize for SuperType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Exhaustively verifies the zone chain `Z(IV) ⊆ Z(III) ⊆ Z(II) ⊆ Z(I) ⊆
/// Z(I*)` over all `|labels|^{2r}` tuples, recording for each step whether
/// the inclusion held and the first tuple witnessing strictness.
pub fn check_zone_inclusions(
    labels: &[Label],
    r: u32,
    rank: &HashMap<Label, usize>,
) -> crate::Result<Vec<InclusionStep>> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let mut sorted: Vec<&Label> = labels.iter().collect();
    sorted.sort();
    let mut rank_of = Vec::with_capacity(sorted.len());
    for l in &sorted {
        rank_of.push(
            *rank
                .get(*l)
                .ok_or_else(|| Error::UnknownLabel((*l).clone()))?,
        );
    }
    let width = 2 * r as usize;
    let mut steps: Vec<InclusionStep> = SuperType::CHAIN
        .windows(2)
        .map(|w| InclusionStep {
            smaller: w[0],
            larger: w[1],
            inclusion_holds: true,
            strictness_witness: None,
        })
        .collect();
    for tuple in (0..width).map(|_| 0..sorted.len()).multi_cartesian_product() {
        let membership: Vec<bool> = SuperType::CHAIN
            .iter()
            .map(|&t| tuple_in_zone(t, &tuple, r as usize, Some(&rank_of)))
            .collect();
        for (i, step) in steps.iter_mut().enumerate() {
            if membership[i] && !membership[i + 1] {
                step.inclusion_holds = false;
            }
            if membership[i + 1] && !membership[i] && step.strictness_witness.is_none() {
                step.strictness_witness =
                    Some(tuple.iter().map(|&j| sorted[j].clone()).collect());
            }
        }
    }
    Ok(steps)
}
