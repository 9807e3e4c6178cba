//! Index-parametric bracket rules.
//!
//! A rule `[L, R] = sum of terms` binds the e-index of an `E` pattern on the
//! left to the variable `i` and on the right to `j`; parameter sums bind `k`
//! to the index set of a named parameter array. Coefficients are affine in
//! `(i, j)` over the rationals and target indices are affine in `(i, j, k)`
//! over the integers.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("rule {rule}: parameter array {name:?} is not bound")]
    UnboundParam { rule: usize, name: String },
    #[error("rule {rule}: invalid pattern: {reason}")]
    BadPattern { rule: usize, reason: String },
    #[error("rule {rule}, term {term}: {reason}")]
    BadTerm {
        rule: usize,
        term: usize,
        reason: String,
    },
    #[error("rule {rule}, term {term}: target e-index can drop below 1")]
    TargetBelowOne { rule: usize, term: usize },
    #[error("rule {rule}, term {term}: target degree below the pattern degree sum (filtration violated)")]
    Filtration { rule: usize, term: usize },
    #[error("rules {first} and {second} match a common basis pair")]
    Overlap { first: usize, second: usize },
    #[error("bracket table is not antisymmetric at [{a}, {b}]")]
    NotAntisymmetric { a: String, b: String },
    #[error("presentation uses {0} but does not declare it")]
    MissingGenerator(&'static str),
}

/// Integer affine form `i*I + j*J + k*K + c`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexForm {
    pub i: i64,
    pub j: i64,
    pub k: i64,
    pub c: i64,
}

impl IndexForm {
    pub const fn new(i: i64, j: i64, k: i64, c: i64) -> Self {
        Self { i, j, k, c }
    }

    pub fn eval(&self, i: i64, j: i64, k: i64) -> i64 {
        self.i * i + self.j * j + self.k * k + self.c
    }
}

/// Rational affine form `i*I + j*J + c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoeffForm {
    pub i: Rational,
    pub j: Rational,
    pub c: Rational,
}

impl CoeffForm {
    pub fn constant(c: Rational) -> Self {
        Self {
            i: Rational::zero(),
            j: Rational::zero(),
            c,
        }
    }

    pub fn eval(&self, i: i64, j: i64) -> Rational {
        &self.i * Rational::from_integer(i.into())
            + &self.j * Rational::from_integer(j.into())
            + &self.c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coefficient {
    Affine(CoeffForm),
    /// `scale * sum_k params[name][k]`, one summand per index of the array.
    ParamSum { param: String, scale: Rational },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    E(IndexForm),
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleTerm {
    pub coeff: Coefficient,
    pub target: Target,
}

impl RuleTerm {
    pub fn affine(coeff: CoeffForm, target: Target) -> Self {
        Self {
            coeff: Coefficient::Affine(coeff),
            target,
        }
    }

    pub fn param_sum(param: &str, scale: Rational, target: Target) -> Self {
        Self {
            coeff: Coefficient::ParamSum {
                param: param.to_string(),
                scale,
            },
            target,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// `e_v` with `min <= v <= max` (`max = None` means unbounded).
    E { min: u32, max: Option<u32> },
    X,
    Y,
}

impl Pattern {
    pub const fn e_from(min: u32) -> Self {
        Pattern::E { min, max: None }
    }

    pub const fn e_exact(index: u32) -> Self {
        Pattern::E {
            min: index,
            max: Some(index),
        }
    }

    fn intersects(&self, other: &Pattern) -> bool {
        match (self, other) {
            (Pattern::X, Pattern::X) | (Pattern::Y, Pattern::Y) => true,
            (Pattern::E { min: a, max: b }, Pattern::E { min: c, max: d }) => {
                let lo = (*a).max(*c);
                match (b, d) {
                    (None, None) => true,
                    (Some(h), None) | (None, Some(h)) => lo <= *h,
                    (Some(h1), Some(h2)) => lo <= (*h1).min(*h2),
                }
            }
            _ => false,
        }
    }

    fn is_e(&self) -> bool {
        matches!(self, Pattern::E { .. })
    }

    /// Range of the bound variable; degree-0 generators pin it to 0.
    fn range(&self) -> (i64, Option<i64>) {
        match self {
            Pattern::E { min, max } => (i64::from(*min), max.map(i64::from)),
            Pattern::X | Pattern::Y => (0, Some(0)),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::E { min, max: None } => write!(f, "e_(>={min})"),
            Pattern::E {
                min,
                max: Some(max),
            } if min == max => write!(f, "e{min}"),
            Pattern::E {
                min,
                max: Some(max),
            } => write!(f, "e_({min}..={max})"),
            Pattern::X => f.write_str("x"),
            Pattern::Y => f.write_str("y"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BracketRule {
    pub left: Pattern,
    pub right: Pattern,
    pub terms: Vec<RuleTerm>,
}

/// Parameter array with its first index, e.g. `beta = (beta_3, beta_4, ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamArray {
    pub start: i64,
    pub values: Vec<Rational>,
}

impl ParamArray {
    pub fn new(start: i64, values: Vec<Rational>) -> Self {
        Self { start, values }
    }

    pub fn index_range(&self) -> Option<(i64, i64)> {
        (!self.values.is_empty()).then(|| (self.start, self.start + self.values.len() as i64 - 1))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(n, q)| (self.start + n as i64, q))
    }
}

/// A validated algebra presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    name: String,
    has_x: bool,
    has_y: bool,
    rules: Vec<BracketRule>,
    params: BTreeMap<String, ParamArray>,
    max_shift: Option<i64>,
}

impl Presentation {
    /// Validates and builds a presentation: bound parameters, pattern
    /// disjointness, target indices >= 1 and filtration compatibility.
    pub fn new(
        name: impl Into<String>,
        has_x: bool,
        has_y: bool,
        rules: Vec<BracketRule>,
        params: BTreeMap<String, ParamArray>,
    ) -> Result<Self, PresentationError> {
        let mut p = Self::new_unchecked(name, has_x, has_y, rules, params)?;
        p.validate_structure()?;
        p.max_shift = p.compute_max_shift();
        Ok(p)
    }

    /// Skips the pattern-disjointness and filtration checks. Parameter
    /// binding and generator declarations are still enforced. Used for
    /// deliberately broken tables in regression tests.
    pub fn new_unchecked(
        name: impl Into<String>,
        has_x: bool,
        has_y: bool,
        rules: Vec<BracketRule>,
        params: BTreeMap<String, ParamArray>,
    ) -> Result<Self, PresentationError> {
        let mut p = Self {
            name: name.into(),
            has_x,
            has_y,
            rules,
            params,
            max_shift: None,
        };
        p.validate_binding()?;
        p.max_shift = p.compute_max_shift();
        Ok(p)
    }

    pub fn abelian(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            has_x: false,
            has_y: false,
            rules: Vec::new(),
            params: BTreeMap::new(),
            max_shift: Some(0),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_x(&self) -> bool {
        self.has_x
    }

    pub fn has_y(&self) -> bool {
        self.has_y
    }

    pub fn rules(&self) -> &[BracketRule] {
        &self.rules
    }

    pub fn params(&self) -> &BTreeMap<String, ParamArray> {
        &self.params
    }

    /// Largest `deg(target) - deg(left) - deg(right)` over all rule terms;
    /// `None` when unbounded.
    pub fn max_shift(&self) -> Option<i64> {
        self.max_shift
    }

    fn validate_binding(&self) -> Result<(), PresentationError> {
        for (r, rule) in self.rules.iter().enumerate() {
            for pat in [&rule.left, &rule.right] {
                match pat {
                    Pattern::X if !self.has_x => return Err(PresentationError::MissingGenerator("x")),
                    Pattern::Y if !self.has_y => return Err(PresentationError::MissingGenerator("y")),
                    Pattern::E { min, max } => {
                        if *min < 1 {
                            return Err(PresentationError::BadPattern {
                                rule: r,
                                reason: "e-index lower bound must be >= 1".into(),
                            });
                        }
                        if max.is_some_and(|m| m < *min) {
                            return Err(PresentationError::BadPattern {
                                rule: r,
                                reason: "empty index range".into(),
                            });
                        }
                    }
                    _ => {}
                }
            }
            for (t, term) in rule.terms.iter().enumerate() {
                let bad = |reason: &str| PresentationError::BadTerm {
                    rule: r,
                    term: t,
                    reason: reason.to_string(),
                };
                match &term.target {
                    Target::X if !self.has_x => return Err(PresentationError::MissingGenerator("x")),
                    Target::Y if !self.has_y => return Err(PresentationError::MissingGenerator("y")),
                    _ => {}
                }
                let (uses_i, uses_j, uses_k) = term_variables(term);
                if uses_i && !rule.left.is_e() {
                    return Err(bad("uses i but the left pattern is not an e-pattern"));
                }
                if uses_j && !rule.right.is_e() {
                    return Err(bad("uses j but the right pattern is not an e-pattern"));
                }
                match &term.coeff {
                    Coefficient::Affine(_) if uses_k => {
                        return Err(bad("k is only bound inside parameter sums"))
                    }
                    Coefficient::ParamSum { param, .. } if !self.params.contains_key(param) => {
                        return Err(PresentationError::UnboundParam {
                            rule: r,
                            name: param.clone(),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn validate_structure(&self) -> Result<(), PresentationError> {
        for (a, ra) in self.rules.iter().enumerate() {
            for (b, rb) in self.rules.iter().enumerate().skip(a + 1) {
                let direct = ra.left.intersects(&rb.left) && ra.right.intersects(&rb.right);
                let crossed = ra.left.intersects(&rb.right) && ra.right.intersects(&rb.left);
                if direct || crossed {
                    return Err(PresentationError::Overlap {
                        first: a,
                        second: b,
                    });
                }
            }
        }
        for (r, rule) in self.rules.iter().enumerate() {
            for (t, term) in rule.terms.iter().enumerate() {
                let Some(region) = self.term_region(rule, term) else {
                    continue;
                };
                match term.target {
                    Target::E(form) => {
                        if lower_bound(&form, &region).is_none_or(|m| m < 1) {
                            return Err(PresentationError::TargetBelowOne { rule: r, term: t });
                        }
                        let shift = shift_form(rule, &form);
                        if lower_bound(&shift, &region).is_none_or(|m| m < 0) {
                            return Err(PresentationError::Filtration { rule: r, term: t });
                        }
                    }
                    Target::X | Target::Y => {
                        if rule.left.is_e() || rule.right.is_e() {
                            return Err(PresentationError::Filtration { rule: r, term: t });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Variable box `(i, j, k)` over which a term is live; `None` for an
    /// empty parameter sum.
    fn term_region(&self, rule: &BracketRule, term: &RuleTerm) -> Option<Region> {
        let k = match &term.coeff {
            Coefficient::Affine(_) => (0, Some(0)),
            Coefficient::ParamSum { param, .. } => {
                let (lo, hi) = self.params.get(param)?.index_range()?;
                (lo, Some(hi))
            }
        };
        Some([rule.left.range(), rule.right.range(), k])
    }

    fn compute_max_shift(&self) -> Option<i64> {
        let mut best = 0i64;
        for rule in &self.rules {
            for term in &rule.terms {
                let Target::E(form) = term.target else {
                    continue;
                };
                let Some(region) = self.term_region(rule, term) else {
                    continue;
                };
                best = best.max(upper_bound(&shift_form(rule, &form), &region)?);
            }
        }
        Some(best)
    }
}

fn term_variables(term: &RuleTerm) -> (bool, bool, bool) {
    let (mut i, mut j, mut k) = (false, false, false);
    if let Target::E(f) = term.target {
        i |= f.i != 0;
        j |= f.j != 0;
        k |= f.k != 0;
    }
    if let Coefficient::Affine(c) = &term.coeff {
        i |= !c.i.is_zero();
        j |= !c.j.is_zero();
    }
    (i, j, k)
}

type Region = [(i64, Option<i64>); 3];

fn shift_form(rule: &BracketRule, target: &IndexForm) -> IndexForm {
    IndexForm {
        i: target.i - i64::from(rule.left.is_e()),
        j: target.j - i64::from(rule.right.is_e()),
        k: target.k,
        c: target.c,
    }
}

fn coeffs(form: &IndexForm) -> [i64; 3] {
    [form.i, form.j, form.k]
}

/// Minimum of the form over the box; `None` means unbounded below.
fn lower_bound(form: &IndexForm, region: &Region) -> Option<i64> {
    let mut acc = form.c;
    for (a, (lo, hi)) in coeffs(form).into_iter().zip(region) {
        match a.cmp(&0) {
            std::cmp::Ordering::Greater => acc += a * lo,
            std::cmp::Ordering::Less => acc += a * (*hi)?,
            std::cmp::Ordering::Equal => {}
        }
    }
    Some(acc)
}

/// Maximum of the form over the box; `None` means unbounded above.
fn upper_bound(form: &IndexForm, region: &Region) -> Option<i64> {
    let mut acc = form.c;
    for (a, (lo, hi)) in coeffs(form).into_iter().zip(region) {
        match a.cmp(&0) {
            std::cmp::Ordering::Greater => acc += a * (*hi)?,
            std::cmp::Ordering::Less => acc += a * lo,
            std::cmp::Ordering::Equal => {}
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn unit_term(target: Target) -> RuleTerm {
        RuleTerm::affine(CoeffForm::constant(rat(1)), target)
    }

    #[test]
    fn overlapping_patterns_rejected() {
        let r1 = BracketRule {
            left: Pattern::e_from(2),
            right: Pattern::e_exact(1),
            terms: vec![unit_term(Target::E(IndexForm::new(1, 0, 0, 1)))],
        };
        let r2 = BracketRule {
            left: Pattern::e_exact(3),
            right: Pattern::e_from(1),
            terms: vec![],
        };
        let err = Presentation::new("bad", false, false, vec![r1, r2], BTreeMap::new()).unwrap_err();
        assert_eq!(err, PresentationError::Overlap { first: 0, second: 1 });
    }

    #[test]
    fn crossed_overlap_rejected() {
        // [e1, e_j] and [e_i, e1] share (e1, e1) reversed
        let r1 = BracketRule {
            left: Pattern::e_exact(1),
            right: Pattern::e_from(2),
            terms: vec![],
        };
        let r2 = BracketRule {
            left: Pattern::e_from(2),
            right: Pattern::e_exact(1),
            terms: vec![],
        };
        assert!(matches!(
            Presentation::new("bad", false, false, vec![r1, r2], BTreeMap::new()),
            Err(PresentationError::Overlap { .. })
        ));
    }

    #[test]
    fn filtration_violation_rejected() {
        // [e_i, e1] = e_i lowers degree by one
        let r = BracketRule {
            left: Pattern::e_from(2),
            right: Pattern::e_exact(1),
            terms: vec![unit_term(Target::E(IndexForm::new(1, 0, 0, 0)))],
        };
        assert_eq!(
            Presentation::new("bad", false, false, vec![r], BTreeMap::new()).unwrap_err(),
            PresentationError::Filtration { rule: 0, term: 0 }
        );
    }

    #[test]
    fn unbound_parameter_rejected() {
        let r = BracketRule {
            left: Pattern::X,
            right: Pattern::e_from(2),
            terms: vec![RuleTerm::param_sum(
                "beta",
                rat(-1),
                Target::E(IndexForm::new(0, 1, 1, -2)),
            )],
        };
        assert_eq!(
            Presentation::new("bad", true, false, vec![r], BTreeMap::new()).unwrap_err(),
            PresentationError::UnboundParam {
                rule: 0,
                name: "beta".into()
            }
        );
    }

    #[test]
    fn shift_of_parameter_sum() {
        let r = BracketRule {
            left: Pattern::X,
            right: Pattern::e_from(2),
            terms: vec![RuleTerm::param_sum(
                "beta",
                rat(-1),
                Target::E(IndexForm::new(0, 1, 1, -2)),
            )],
        };
        let mut params = BTreeMap::new();
        params.insert("beta".into(), ParamArray::new(3, vec![rat(1), rat(0), rat(2)]));
        let p = Presentation::new("b", true, false, vec![r], params).unwrap();
        assert_eq!(p.max_shift(), Some(3));
    }

    #[test]
    fn unbounded_shift_is_reported() {
        // [e1, e_j] = e_{2j}
        let r = BracketRule {
            left: Pattern::e_exact(1),
            right: Pattern::e_from(2),
            terms: vec![unit_term(Target::E(IndexForm::new(0, 2, 0, 0)))],
        };
        let p = Presentation::new("d", false, false, vec![r], BTreeMap::new()).unwrap();
        assert_eq!(p.max_shift(), None);
    }
}
