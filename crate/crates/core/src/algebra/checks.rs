//! Structural diagnostics on a windowed quotient.

use serde::Serialize;

use super::basis::{BasisSymbol, Element};
use super::quotient::Quotient;
use crate::linalg::{Echelon, Matrix, SparseVec, Subspace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobiFailure {
    pub triple: [BasisSymbol; 3],
    pub residual: Element,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobiReport {
    pub ok: bool,
    /// Triples are checked when their degree sum is at most this bound.
    pub guard_bound: i64,
    pub checked_triples: usize,
    pub skipped_triples: usize,
    pub failures: usize,
    pub first_failure: Option<JacobiFailure>,
}

/// Jacobi residual `[a,[b,c]] + [b,[c,a]] + [c,[a,b]]` on basis indices.
pub fn jacobi_residual(q: &Quotient, a: usize, b: usize, c: usize) -> SparseVec {
    let ua = SparseVec::unit(a);
    let ub = SparseVec::unit(b);
    let uc = SparseVec::unit(c);
    let mut r = q.bracket_vec(&ua, q.bracket_basis(b, c));
    r = &r + &q.bracket_vec(&ub, q.bracket_basis(c, a));
    &r + &q.bracket_vec(&uc, q.bracket_basis(a, b))
}

pub fn jacobi_check(q: &Quotient) -> JacobiReport {
    let n = q.dim();
    let bound = i64::from(q.window().top()) - i64::from(q.guard_shift());
    let mut report = JacobiReport {
        ok: true,
        guard_bound: bound,
        checked_triples: 0,
        skipped_triples: 0,
        failures: 0,
        first_failure: None,
    };
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let deg = i64::from(q.degree(a) + q.degree(b) + q.degree(c));
                if deg > bound {
                    report.skipped_triples += 1;
                    continue;
                }
                report.checked_triples += 1;
                let r = jacobi_residual(q, a, b, c);
                if !r.is_zero() {
                    report.ok = false;
                    report.failures += 1;
                    if report.first_failure.is_none() {
                        report.first_failure = Some(JacobiFailure {
                            triple: [q.symbol(a), q.symbol(b), q.symbol(c)],
                            residual: q.to_element(&r),
                        });
                    }
                }
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesReport {
    pub dims: Vec<usize>,
    /// Successive codimensions `dims[k] - dims[k+1]`.
    pub codims: Vec<usize>,
    pub reaches_zero: bool,
}

impl SeriesReport {
    fn from_dims(dims: Vec<usize>) -> Self {
        let codims = dims.windows(2).map(|w| w[0] - w[1]).collect();
        let reaches_zero = dims.last() == Some(&0);
        Self {
            dims,
            codims,
            reaches_zero,
        }
    }
}

fn bracket_span(q: &Quotient, left: &[SparseVec], right: &[SparseVec]) -> Subspace {
    let mut ech = Echelon::new(q.dim());
    for u in left {
        for v in right {
            ech.insert(&q.bracket_vec(u, v));
        }
    }
    Subspace::from_echelon(ech)
}

fn unit_basis(n: usize) -> Vec<SparseVec> {
    (0..n).map(SparseVec::unit).collect()
}

/// Terms of a series, starting from the whole quotient, until a term
/// repeats or vanishes. The repeated term is not listed twice.
fn series(q: &Quotient, step: impl Fn(&Subspace) -> Subspace) -> Vec<Subspace> {
    let mut terms = vec![Subspace::full(q.dim())];
    loop {
        let last = terms.last().expect("series starts non-empty");
        if last.dim() == 0 {
            break;
        }
        let next = step(last);
        if next.dim() == last.dim() {
            break;
        }
        terms.push(next);
    }
    terms
}

pub fn lower_central_terms(q: &Quotient) -> Vec<Subspace> {
    let all = unit_basis(q.dim());
    series(q, |s| bracket_span(q, s.basis(), &all))
}

pub fn derived_terms(q: &Quotient) -> Vec<Subspace> {
    series(q, |s| bracket_span(q, s.basis(), s.basis()))
}

pub fn lower_central_series(q: &Quotient) -> SeriesReport {
    SeriesReport::from_dims(lower_central_terms(q).iter().map(Subspace::dim).collect())
}

pub fn derived_series(q: &Quotient) -> SeriesReport {
    SeriesReport::from_dims(derived_terms(q).iter().map(Subspace::dim).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProReport {
    pub pro_nilpotent_window: bool,
    pub pro_solvable_window: bool,
}

/// Window-level certificate only: both series are finite-codimensional by
/// construction, so the flags record whether each series reaches zero.
pub fn pro_check(q: &Quotient) -> ProReport {
    ProReport {
        pro_nilpotent_window: lower_central_series(q).reaches_zero,
        pro_solvable_window: derived_series(q).reaches_zero,
    }
}

/// Interior elements commuting with the whole quotient.
pub fn center(q: &Quotient) -> Subspace {
    let n = q.dim();
    let interior = q.interior_indices();
    // Unknowns: coefficients on interior basis symbols; rows: (b, component).
    let mut rows = Vec::new();
    for b in 0..n {
        let mut by_comp: std::collections::BTreeMap<usize, SparseVec> = Default::default();
        for (col, &v) in interior.iter().enumerate() {
            for (t, c) in q.bracket_basis(v, b).iter() {
                by_comp.entry(t).or_default().add_at(col, c);
            }
        }
        rows.extend(by_comp.into_values().filter(|r| !r.is_zero()));
    }
    let m = Matrix::from_rows(interior.len(), rows).expect("row indices are interior columns");
    let kernel: Vec<SparseVec> = m
        .kernel_vectors()
        .into_iter()
        .map(|v| v.reindexed(|c| Some(interior[c])))
        .collect();
    Subspace::span(n, kernel.iter()).expect("reindexed into the quotient")
}
