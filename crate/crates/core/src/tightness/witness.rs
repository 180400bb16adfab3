//! Assignments to the tightness system: (de)serialization, exact
//! verification, and the explicit 2x2 counterexample family.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::system::{RowKind, TightnessSystem};
use super::vars::{IndexSet, VarKey};
use super::TightnessError;
use crate::classes::{two_by_two_case, TwoByTwoCase};
use crate::numerics::{format_rational, parse_rational, rat, RatMatrix, Rational};

/// Values keyed by unknown. Keys need not be canonical: `x{1,2}^(1)` is
/// accepted and checked against `x{2}^(1)`.
///
/// Serializes as a JSON object `{"x{1,3}^(2)": "1/2", ...}` in key order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment(BTreeMap<VarKey, Rational>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// One value per canonical unknown of `system`, in system order.
    pub fn from_values(system: &TightnessSystem, values: &[Rational]) -> Self {
        assert_eq!(values.len(), system.variables().len());
        Self(
            system
                .variables()
                .iter()
                .copied()
                .zip(values.iter().cloned())
                .collect(),
        )
    }

    pub fn all_ones(system: &TightnessSystem) -> Self {
        Self::from_values(system, &vec![Rational::one(); system.variables().len()])
    }

    pub fn insert(&mut self, key: VarKey, value: Rational) -> Option<Rational> {
        self.0.insert(key, value)
    }

    pub fn get(&self, key: &VarKey) -> Option<&Rational> {
        self.0.get(key)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarKey, &Rational)> {
        self.0.iter()
    }

    /// Value of a canonical unknown: its own entry, else the first entry
    /// whose key canonicalizes to it, else one for the fixed unknowns.
    fn resolve(&self, key: VarKey) -> Option<Rational> {
        if let Some(v) = self.0.get(&key) {
            return Some(v.clone());
        }
        if let Some((_, v)) = self.0.iter().find(|(k, _)| k.canonical() == key) {
            return Some(v.clone());
        }
        key.is_constant().then(Rational::one)
    }
}

impl FromIterator<(VarKey, Rational)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (VarKey, Rational)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(&k.to_string(), &format_rational(v))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct AssignmentVisitor;

        impl<'de> Visitor<'de> for AssignmentVisitor {
            type Value = Assignment;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object mapping keys like \"x{1,3}^(2)\" to rational strings")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Assignment, A::Error> {
                let mut out = Assignment::new();
                while let Some((key, value)) = access.next_entry::<String, String>()? {
                    let k: VarKey = key.parse().map_err(de::Error::custom)?;
                    let v = parse_rational(&value)
                        .map_err(|e| de::Error::custom(format!("{key}: {e}")))?;
                    if out.insert(k, v).is_some() {
                        return Err(de::Error::custom(format!("duplicate key {k}")));
                    }
                }
                Ok(out)
            }
        }

        d.deserialize_map(AssignmentVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintCheck {
    pub id: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<ConstraintCheck>,
    pub is_all_ones: bool,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Satisfies every constraint and differs from the all-ones solution.
    pub fn is_nontrivial_solution(&self) -> bool {
        self.all_passed() && !self.is_all_ones
    }
}

/// Checks `a` against every constraint of `system` exactly.
///
/// Besides the system rows this checks the fixed unknowns, the ranges, and
/// agreement of every non-canonical entry with its canonical unknown.
pub fn verify_assignment(
    system: &TightnessSystem,
    a: &Assignment,
) -> Result<VerificationReport, TightnessError> {
    let d = system.dim();
    if let Some((k, _)) = a
        .iter()
        .find(|(k, _)| k.max_index().is_some_and(|m| m >= d))
    {
        return Err(TightnessError::UnknownVariable(*k, d));
    }
    let values = system
        .variables()
        .iter()
        .map(|&k| a.resolve(k).ok_or(TightnessError::MissingVariable(k)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut checks = Vec::new();
    let mut check = |id: String, passed: bool| checks.push(ConstraintCheck { id, passed });
    for (k, v) in system.variables().iter().zip(&values) {
        if k.is_constant() {
            check(format!("fixed {k} = 1"), v.is_one());
        } else {
            check(format!("range {k}"), system.bounds_of(*k).contains(v));
        }
    }
    for (k, v) in a.iter().filter(|(k, _)| !k.is_canonical()) {
        let canonical = k.canonical();
        let target = &values[system.position(canonical).expect("key within dimension")];
        check(format!("alias {k} = {canonical}"), v == target);
    }
    for row in system.rows() {
        let id = match row.kind {
            RowKind::Balance { set, face } => format!("balance D={set} row {}", face + 1),
            RowKind::Monotone { upper, lower } => format!("monotone {upper} >= {lower}"),
        };
        check(id, row.is_satisfied_by(&values));
    }
    let is_all_ones = values.iter().all(One::is_one) && a.iter().all(|(_, v)| v.is_one());
    Ok(VerificationReport {
        checks,
        is_all_ones,
    })
}

/// Non-tightness certificate for a completely-S but not tight 2x2 matrix.
///
/// With `a1 = R12 b2 / (R11 b1)` and `a2 = R21 b1 / (R22 b2)`:
/// `x{1} = (eps a1 + 1) / (a1 + 1)`, `x{2} = (eps a2 + 1) / (a2 + 1)` and
/// `x{1,2} = x{2}^(1) = x{1}^(2) = eps`. For `eps < 1` this is a solution
/// other than all-ones; `eps = 1` gives all-ones.
pub fn two_by_two_witness(
    r: &RatMatrix,
    b: &[Rational],
    eps: &Rational,
) -> Result<Assignment, TightnessError> {
    if two_by_two_case(r)? != TwoByTwoCase::CompletelySNotTight {
        return Err(TightnessError::WrongCase);
    }
    if !eps.is_positive() || eps > &Rational::one() {
        return Err(TightnessError::InvalidEpsilon);
    }
    let system = TightnessSystem::build(r, b, true)?;
    let a1 = &r[(0, 1)] * &b[1] / (&r[(0, 0)] * &b[0]);
    let a2 = &r[(1, 0)] * &b[0] / (&r[(1, 1)] * &b[1]);
    if a1.is_negative() || a2.is_negative() {
        return Err(TightnessError::WrongCase);
    }
    let face = |alpha: &Rational| (eps * alpha + Rational::one()) / (alpha + Rational::one());
    let set = |idx: &[usize]| IndexSet::from_indices(idx.iter().copied());
    let mut a = Assignment::all_ones(&system);
    a.insert(VarKey::plain(set(&[0])), face(&a1));
    a.insert(VarKey::plain(set(&[1])), face(&a2));
    a.insert(VarKey::plain(set(&[0, 1])), eps.clone());
    a.insert(VarKey::boundary(set(&[1]), 0), eps.clone());
    a.insert(VarKey::boundary(set(&[0]), 1), eps.clone());
    Ok(a)
}

/// Parameter used for the 2x2 certificate unless told otherwise: `1/2`.
pub fn default_epsilon() -> Rational {
    rat(1, 2)
}
