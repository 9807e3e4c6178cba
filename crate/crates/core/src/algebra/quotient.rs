use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use super::basis::{BasisSymbol, Element};
use super::presentation::{Coefficient, Pattern, Presentation, PresentationError, Target};
use crate::linalg::{Rational, SparseVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("window needs N >= 1 and B < N (got N = {top}, B = {buffer})")]
    BadWindow { top: u32, buffer: u32 },
    #[error("{0} is not a basis symbol of this quotient")]
    OutsideQuotient(BasisSymbol),
    #[error("rule {rule}, term {term}: target e-index {index} is below 1 at ({left}, {right})")]
    TargetBelowOne {
        rule: usize,
        term: usize,
        index: i64,
        left: BasisSymbol,
        right: BasisSymbol,
    },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("structure tables have different generator signatures")]
    SignatureMismatch,
    #[error("basis change is not invertible (rank {rank} < {dim})")]
    NotInvertible { rank: usize, dim: usize },
}

/// Truncation window: keep `e_1 .. e_N`, read results on `e_1 .. e_{N-B}` plus `x, y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Window {
    #[serde(rename = "N")]
    top: u32,
    #[serde(rename = "B")]
    buffer: u32,
}

impl Window {
    pub fn new(top: u32, buffer: u32) -> Result<Self, QuotientError> {
        if top == 0 || buffer >= top {
            return Err(QuotientError::BadWindow { top, buffer });
        }
        Ok(Self { top, buffer })
    }

    /// `B` defaults to the presentation's degree shift, capped at `N / 2`.
    pub fn with_default_buffer(top: u32, p: &Presentation) -> Result<Self, QuotientError> {
        Self::new(top, default_buffer(top, p.max_shift()))
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn buffer(&self) -> u32 {
        self.buffer
    }

    /// Largest e-index in the interior.
    pub fn interior_top(&self) -> u32 {
        self.top - self.buffer
    }
}

pub fn default_buffer(top: u32, max_shift: Option<i64>) -> u32 {
    let cap = top / 2;
    match max_shift {
        Some(s) => (s.max(0) as u32).min(cap),
        None => cap,
    }
}

/// Finite-dimensional quotient `L / I_{N+1}` with its full bracket table.
///
/// Basis order is `e_1, .., e_N, x, y`; coordinate `k` is the `k`-th symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    name: String,
    window: Window,
    has_x: bool,
    has_y: bool,
    max_shift: Option<i64>,
    symbols: Vec<BasisSymbol>,
    table: Vec<Vec<SparseVec>>,
}

impl Quotient {
    pub fn new(p: &Presentation, window: Window) -> Result<Self, QuotientError> {
        let symbols = basis_symbols(window.top, p.has_x(), p.has_y());
        let n = symbols.len();
        let mut q = Self {
            name: p.name().to_string(),
            window,
            has_x: p.has_x(),
            has_y: p.has_y(),
            max_shift: p.max_shift(),
            symbols,
            table: vec![vec![SparseVec::new(); n]; n],
        };
        let mut direct: Vec<Vec<Option<SparseVec>>> = vec![vec![None; n]; n];
        for a in 0..n {
            for b in 0..n {
                direct[a][b] = q.evaluate_rules(p, a, b)?;
            }
        }
        for a in 0..n {
            for b in 0..n {
                let value = match (&direct[a][b], &direct[b][a]) {
                    (Some(v), Some(w)) => {
                        if &-w.clone() != v {
                            return Err(PresentationError::NotAntisymmetric {
                                a: q.symbols[a].to_string(),
                                b: q.symbols[b].to_string(),
                            }
                            .into());
                        }
                        v.clone()
                    }
                    (Some(v), None) => v.clone(),
                    (None, Some(w)) => -w.clone(),
                    (None, None) => SparseVec::new(),
                };
                if a == b && !value.is_zero() {
                    return Err(PresentationError::NotAntisymmetric {
                        a: q.symbols[a].to_string(),
                        b: q.symbols[b].to_string(),
                    }
                    .into());
                }
                q.table[a][b] = value;
            }
        }
        Ok(q)
    }

    /// Builds a quotient from an explicit bracket table `table[a][b] = [b_a, b_b]`.
    /// The table must be antisymmetric.
    pub fn from_table(
        name: impl Into<String>,
        window: Window,
        has_x: bool,
        has_y: bool,
        table: Vec<Vec<SparseVec>>,
    ) -> Result<Self, QuotientError> {
        let symbols = basis_symbols(window.top, has_x, has_y);
        let n = symbols.len();
        assert_eq!(table.len(), n, "table size must match the quotient dimension");
        for a in 0..n {
            for b in 0..=a {
                if table[a][b] != -table[b][a].clone() {
                    return Err(PresentationError::NotAntisymmetric {
                        a: symbols[a].to_string(),
                        b: symbols[b].to_string(),
                    }
                    .into());
                }
            }
        }
        Ok(Self {
            name: name.into(),
            window,
            has_x,
            has_y,
            max_shift: None,
            symbols,
            table,
        })
    }

    fn evaluate_rules(
        &self,
        p: &Presentation,
        a: usize,
        b: usize,
    ) -> Result<Option<SparseVec>, QuotientError> {
        let (sa, sb) = (self.symbols[a], self.symbols[b]);
        let Some((r, rule)) = p
            .rules()
            .iter()
            .enumerate()
            .find(|(_, rule)| matches(&rule.left, sa) && matches(&rule.right, sb))
        else {
            return Ok(None);
        };
        let i = i64::from(sa.degree());
        let j = i64::from(sb.degree());
        let mut out = SparseVec::new();
        for (t, term) in rule.terms.iter().enumerate() {
            let mut push = |coeff: Rational, k: i64| -> Result<(), QuotientError> {
                if coeff.is_zero() {
                    return Ok(());
                }
                let sym = match term.target {
                    Target::X => BasisSymbol::X,
                    Target::Y => BasisSymbol::Y,
                    Target::E(form) => {
                        let idx = form.eval(i, j, k);
                        if idx < 1 {
                            return Err(QuotientError::TargetBelowOne {
                                rule: r,
                                term: t,
                                index: idx,
                                left: sa,
                                right: sb,
                            });
                        }
                        if idx > i64::from(self.window.top) {
                            return Ok(());
                        }
                        BasisSymbol::E(idx as u32)
                    }
                };
                let pos = self.index_of(sym).ok_or(QuotientError::OutsideQuotient(sym))?;
                out.add_at(pos, &coeff);
                Ok(())
            };
            match &term.coeff {
                Coefficient::Affine(form) => push(form.eval(i, j), 0)?,
                Coefficient::ParamSum { param, scale } => {
                    let arr = p.params().get(param).ok_or_else(|| {
                        PresentationError::UnboundParam {
                            rule: r,
                            name: param.clone(),
                        }
                    })?;
                    for (k, val) in arr.iter() {
                        push(scale * val, k)?;
                    }
                }
            }
        }
        Ok(Some(out))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn has_x(&self) -> bool {
        self.has_x
    }

    pub fn has_y(&self) -> bool {
        self.has_y
    }

    pub fn dim(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[BasisSymbol] {
        &self.symbols
    }

    pub fn symbol(&self, idx: usize) -> BasisSymbol {
        self.symbols[idx]
    }

    pub fn index_of(&self, sym: BasisSymbol) -> Option<usize> {
        let n = self.window.top as usize;
        match sym {
            BasisSymbol::E(i) if i >= 1 && i <= self.window.top => Some(i as usize - 1),
            BasisSymbol::X if self.has_x => Some(n),
            BasisSymbol::Y if self.has_y => Some(n + usize::from(self.has_x)),
            _ => None,
        }
    }

    pub fn degree(&self, idx: usize) -> u32 {
        self.symbols[idx].degree()
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        match self.symbols[idx] {
            BasisSymbol::E(i) => i <= self.window.interior_top(),
            _ => true,
        }
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.is_interior(k)).collect()
    }

    pub fn max_shift(&self) -> Option<i64> {
        self.max_shift
    }

    /// Degree shift used by the Jacobi guard: the presentation's maximal
    /// shift capped at `N / 2` (unbounded or unknown shifts use the cap).
    pub fn guard_shift(&self) -> u32 {
        default_buffer(self.window.top, self.max_shift)
    }

    /// `[b_a, b_b]` for basis indices.
    pub fn bracket_basis(&self, a: usize, b: usize) -> &SparseVec {
        &self.table[a][b]
    }

    pub fn table(&self) -> &[Vec<SparseVec>] {
        &self.table
    }

    pub fn bracket_vec(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, ca) in u.iter() {
            for (b, cb) in v.iter() {
                let t = &self.table[a][b];
                if !t.is_zero() {
                    out.add_scaled(t, &(ca * cb));
                }
            }
        }
        out
    }

    pub fn bracket(&self, a: &Element, b: &Element) -> Result<Element, QuotientError> {
        Ok(self.to_element(&self.bracket_vec(&self.to_vec(a)?, &self.to_vec(b)?)))
    }

    pub fn to_vec(&self, e: &Element) -> Result<SparseVec, QuotientError> {
        let mut v = SparseVec::new();
        for (s, q) in e.iter() {
            let idx = self.index_of(s).ok_or(QuotientError::OutsideQuotient(s))?;
            v.add_at(idx, q);
        }
        Ok(v)
    }

    pub fn to_element(&self, v: &SparseVec) -> Element {
        Element::from_terms(v.iter().map(|(k, q)| (self.symbols[k], q.clone())))
    }

    /// Image of `e` under the quotient map: drops every `e_k` with `k > N`.
    pub fn project_element(&self, e: &Element) -> Element {
        Element::from_terms(
            e.iter()
                .filter(|(s, _)| self.index_of(*s).is_some())
                .map(|(s, q)| (s, q.clone())),
        )
    }

    /// Nonzero structure constants as `(a, b) -> [a, b]` for `a < b`.
    pub fn structure_constants(&self) -> BTreeMap<(BasisSymbol, BasisSymbol), Element> {
        let n = self.dim();
        let mut out = BTreeMap::new();
        for a in 0..n {
            for b in a + 1..n {
                let v = &self.table[a][b];
                if !v.is_zero() {
                    out.insert((self.symbols[a], self.symbols[b]), self.to_element(v));
                }
            }
        }
        out
    }

    pub fn same_signature(&self, other: &Quotient) -> bool {
        self.window.top == other.window.top
            && self.has_x == other.has_x
            && self.has_y == other.has_y
    }

    /// Entry-wise equality of the two bracket tables.
    pub fn same_table(&self, other: &Quotient) -> Result<bool, QuotientError> {
        if !self.same_signature(other) {
            return Err(QuotientError::SignatureMismatch);
        }
        Ok(self.table == other.table)
    }
}

fn basis_symbols(top: u32, has_x: bool, has_y: bool) -> Vec<BasisSymbol> {
    let mut s: Vec<BasisSymbol> = (1..=top).map(BasisSymbol::E).collect();
    if has_x {
        s.push(BasisSymbol::X);
    }
    if has_y {
        s.push(BasisSymbol::Y);
    }
    s
}

fn matches(p: &Pattern, s: BasisSymbol) -> bool {
    match (p, s) {
        (Pattern::E { min, max }, BasisSymbol::E(v)) => v >= *min && max.is_none_or(|m| v <= m),
        (Pattern::X, BasisSymbol::X) | (Pattern::Y, BasisSymbol::Y) => true,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::presentation::{BracketRule, CoeffForm, IndexForm, RuleTerm};
    use crate::linalg::rat;
    use std::collections::BTreeMap as Map;

    fn m0_presentation() -> Presentation {
        let rule = BracketRule {
            left: Pattern::e_from(2),
            right: Pattern::e_exact(1),
            terms: vec![RuleTerm::affine(
                CoeffForm::constant(rat(1)),
                Target::E(IndexForm::new(1, 0, 0, 1)),
            )],
        };
        Presentation::new("m0", false, false, vec![rule], Map::new()).unwrap()
    }

    #[test]
    fn window_bounds() {
        assert!(Window::new(0, 0).is_err());
        assert!(Window::new(4, 4).is_err());
        assert_eq!(Window::new(8, 3).unwrap().interior_top(), 5);
    }

    #[test]
    fn antisymmetric_extension_and_truncation() {
        let q = Quotient::new(&m0_presentation(), Window::new(4, 0).unwrap()).unwrap();
        let e = |i| Element::basis(BasisSymbol::E(i));
        assert_eq!(q.bracket(&e(2), &e(1)).unwrap(), e(3));
        assert_eq!(q.bracket(&e(1), &e(2)).unwrap(), -e(3));
        assert!(q.bracket(&e(4), &e(1)).unwrap().is_zero());
        assert!(q.bracket(&e(2), &e(3)).unwrap().is_zero());
    }

    #[test]
    fn outside_symbols_rejected() {
        let q = Quotient::new(&m0_presentation(), Window::new(4, 0).unwrap()).unwrap();
        let x = Element::basis(BasisSymbol::X);
        assert_eq!(
            q.to_vec(&x),
            Err(QuotientError::OutsideQuotient(BasisSymbol::X))
        );
    }

    #[test]
    fn interior_mask() {
        let q = Quotient::new(&m0_presentation(), Window::new(6, 2).unwrap()).unwrap();
        assert_eq!(q.interior_indices(), vec![0, 1, 2, 3]);
    }
}
