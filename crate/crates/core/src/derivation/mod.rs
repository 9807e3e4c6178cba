//! Derivations of windowed quotients.

mod closed_form;

pub use closed_form::{closed_form_derivations, closed_form_space, ClosedFormDirection};

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    center, jacobi_check, Element, JacobiFailure, Presentation, Quotient, QuotientError, Window,
};
use crate::catalog::CatalogError;
use crate::linalg::{Echelon, Matrix, SparseVec, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("Jacobi identity fails at {0:?}; refusing to solve")]
    NotLie(Box<JacobiFailure>),
    #[error("family {0} has no closed-form derivation space")]
    Unsupported(String),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// Endomorphism of a quotient; `images[s]` is the image of basis vector `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMapWindow {
    window: Window,
    images: Vec<SparseVec>,
}

impl LinearMapWindow {
    pub fn zero(q: &Quotient) -> Self {
        Self {
            window: q.window(),
            images: vec![SparseVec::new(); q.dim()],
        }
    }

    pub fn identity(q: &Quotient) -> Self {
        Self {
            window: q.window(),
            images: (0..q.dim()).map(SparseVec::unit).collect(),
        }
    }

    pub fn from_images(q: &Quotient, images: Vec<SparseVec>) -> Self {
        assert_eq!(images.len(), q.dim(), "one image per basis vector");
        Self {
            window: q.window(),
            images,
        }
    }

    /// Inverse of [`LinearMapWindow::to_flat`].
    pub fn from_flat(q: &Quotient, v: &SparseVec) -> Self {
        let n = q.dim();
        let mut images = vec![SparseVec::new(); n];
        for (var, c) in v.iter() {
            images[var / n].add_at(var % n, c);
        }
        Self {
            window: q.window(),
            images,
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, s: usize) -> &SparseVec {
        &self.images[s]
    }

    pub fn images(&self) -> &[SparseVec] {
        &self.images
    }

    pub fn set_image(&mut self, s: usize, v: SparseVec) {
        self.images[s] = v;
    }

    /// Matrix in the canonical basis: column `s` is the image of basis `s`.
    pub fn matrix(&self) -> Matrix {
        Matrix::from_columns(self.dim(), &self.images).expect("images live in the quotient")
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (s, c) in v.iter() {
            out.add_scaled(&self.images[s], c);
        }
        out
    }

    /// Coordinates in the map space: entry `s * n + t` is the `t`-component of `f(b_s)`.
    pub fn to_flat(&self) -> SparseVec {
        let n = self.dim();
        let mut out = SparseVec::new();
        for (s, img) in self.images.iter().enumerate() {
            for (t, c) in img.iter() {
                out.set(s * n + t, c.clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(SparseVec::is_zero)
    }
}

/// Keeps map-space coordinates `(s, t)` with both `s` and `t` interior.
pub fn interior_map_filter(q: &Quotient) -> impl Fn(usize) -> bool + '_ {
    let n = q.dim();
    move |var| q.is_interior(var / n) && q.is_interior(var % n)
}

fn ensure_lie(q: &Quotient) -> Result<(), DerivationError> {
    let report = jacobi_check(q);
    match report.first_failure {
        Some(f) => Err(DerivationError::NotLie(Box::new(f))),
        None => Ok(()),
    }
}

/// Rows of `d[a,b] - [d a, b] - [a, d b] = 0` over all pairs `a < b`,
/// one row per output component.
pub fn derivation_constraints(q: &Quotient) -> Vec<SparseVec> {
    let n = q.dim();
    let mut rows = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut eq: std::collections::BTreeMap<usize, SparseVec> = Default::default();
            for (k, c) in q.bracket_basis(a, b).iter() {
                for t in 0..n {
                    eq.entry(t).or_default().add_at(k * n + t, c);
                }
            }
            for s in 0..n {
                for (t, c) in q.bracket_basis(s, b).iter() {
                    eq.entry(t).or_default().add_at(a * n + s, &-c.clone());
                }
                for (t, c) in q.bracket_basis(a, s).iter() {
                    eq.entry(t).or_default().add_at(b * n + s, &-c.clone());
                }
            }
            rows.extend(eq.into_values().filter(|r| !r.is_zero()));
        }
    }
    rows
}

/// Derivation residual of a map on one pair.
pub fn leibniz_residual(q: &Quotient, d: &LinearMapWindow, a: usize, b: usize) -> SparseVec {
    let lhs = d.apply(q.bracket_basis(a, b));
    let r1 = q.bracket_vec(d.image(a), &SparseVec::unit(b));
    let r2 = q.bracket_vec(&SparseVec::unit(a), d.image(b));
    &(&lhs - &r1) - &r2
}

pub fn is_derivation(q: &Quotient, d: &LinearMapWindow) -> bool {
    let n = q.dim();
    (0..n).all(|a| (a + 1..n).all(|b| leibniz_residual(q, d, a, b).is_zero()))
}

/// Raw derivation space of the quotient, as a subspace of the map space.
pub fn raw_derivations(q: &Quotient) -> Subspace {
    let n = q.dim();
    let m = Matrix::from_rows(n * n, derivation_constraints(q)).expect("map-space coordinates");
    m.nullspace_basis()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationSpace {
    pub raw: Subspace,
    pub interior: Subspace,
    pub stable_dim: usize,
}

/// Solves in window `w` and in the next window with the same interior; the
/// stable dimension counts interior directions that extend one step further.
pub fn solve_derivations(p: &Presentation, w: Window) -> Result<DerivationSpace, DerivationError> {
    let q = Quotient::new(p, w)?;
    ensure_lie(&q)?;
    let raw = raw_derivations(&q);
    let interior = raw.project(interior_map_filter(&q));

    let next = Quotient::new(p, Window::new(w.top() + 1, w.buffer() + 1)?)?;
    ensure_lie(&next)?;
    let raw_next = raw_derivations(&next);
    let (n, n1) = (q.dim(), next.dim());
    let reindex = |var: usize| -> Option<usize> {
        let (s, t) = (var / n1, var % n1);
        if !next.is_interior(s) || !next.is_interior(t) {
            return None;
        }
        let s2 = q.index_of(next.symbol(s))?;
        let t2 = q.index_of(next.symbol(t))?;
        Some(s2 * n + t2)
    };
    let restricted: Vec<SparseVec> = raw_next.basis().iter().map(|v| v.reindexed(reindex)).collect();
    let restricted = Subspace::span(n * n, restricted.iter()).expect("reindexed into window");
    let stable_dim = interior
        .intersection(&restricted)
        .expect("same ambient")
        .dim();
    Ok(DerivationSpace {
        raw,
        interior,
        stable_dim,
    })
}

/// `b -> [a, b]`
pub fn inner_derivation(q: &Quotient, a: &Element) -> Result<LinearMapWindow, QuotientError> {
    let av = q.to_vec(a)?;
    Ok(inner_of_vec(q, &av))
}

fn inner_of_vec(q: &Quotient, av: &SparseVec) -> LinearMapWindow {
    let images = (0..q.dim())
        .map(|b| q.bracket_vec(av, &SparseVec::unit(b)))
        .collect();
    LinearMapWindow::from_images(q, images)
}

pub fn inner_space(q: &Quotient) -> Subspace {
    let n = q.dim();
    let mut ech = Echelon::new(n * n);
    for a in 0..n {
        ech.insert(&inner_of_vec(q, &SparseVec::unit(a)).to_flat());
    }
    Subspace::from_echelon(ech)
}

/// `dim interior(Der) - dim interior(Inder)`.
pub fn h1_dimension(q: &Quotient, der: &DerivationSpace) -> usize {
    let inner = inner_space(q).project(interior_map_filter(q));
    der.interior.dim() - inner.dim()
}

/// True iff the descending chain of iterated images reaches zero.
pub fn potentially_nilpotent_window(m: &LinearMapWindow) -> bool {
    let n = m.dim();
    let mut current = Subspace::span(n, m.images().iter()).expect("images live in the window");
    loop {
        if current.dim() == 0 {
            return true;
        }
        let next_vecs: Vec<SparseVec> = current.basis().iter().map(|v| m.apply(v)).collect();
        let next = Subspace::span(n, next_vecs.iter()).expect("images live in the window");
        if next.dim() == current.dim() {
            return false;
        }
        current = next;
    }
}

/// Rank of the diagonal-entry functionals on the interior derivation space.
pub fn nil_independent_count(q: &Quotient, der: &DerivationSpace) -> usize {
    let n = q.dim();
    let mut ech = Echelon::new(n);
    for v in der.interior.basis() {
        let diag = SparseVec::from_pairs(
            q.interior_indices()
                .into_iter()
                .map(|s| (s, v.get(s * n + s))),
        );
        ech.insert(&diag);
    }
    ech.rank()
}

/// Element `a` with `ad_a = d` on the interior, if one exists. Free
/// coordinates are set to zero, which picks the least-index representative.
pub fn inner_witness(q: &Quotient, d: &SparseVec) -> Option<Element> {
    let n = q.dim();
    let keep = interior_map_filter(q);
    let cols: Vec<SparseVec> = (0..n)
        .map(|a| inner_of_vec(q, &SparseVec::unit(a)).to_flat().filtered(&keep))
        .collect();
    let m = Matrix::from_columns(n * n, &cols).expect("map-space coordinates");
    m.solve(&d.filtered(&keep))
        .expect("map-space coordinates")
        .map(|x| q.to_element(&x))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompletenessReport {
    pub center_dim: usize,
    pub center_trivial: bool,
    pub h1: usize,
    pub h1_zero: bool,
    /// Inner witness for each interior derivation basis element, in basis order.
    pub witnesses: Vec<Option<Element>>,
}

pub fn completeness_check(q: &Quotient, der: &DerivationSpace) -> CompletenessReport {
    let center_dim = center(q).dim();
    let h1 = h1_dimension(q, der);
    let witnesses = der
        .interior
        .basis()
        .iter()
        .map(|d| inner_witness(q, d))
        .collect();
    CompletenessReport {
        center_dim,
        center_trivial: center_dim == 0,
        h1,
        h1_zero: h1 == 0,
        witnesses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BasisSymbol;
    use crate::catalog::{family_quotient, FamilyId};

    #[test]
    fn abelian_every_map_is_derivation() {
        let p = Presentation::abelian("ab");
        let w = Window::new(3, 0).unwrap();
        let der = solve_derivations(&p, w).unwrap();
        assert_eq!(der.raw.dim(), 9);
        let q = Quotient::new(&p, w).unwrap();
        assert_eq!(h1_dimension(&q, &der), 9);
    }

    #[test]
    fn strict_shift_is_potentially_nilpotent() {
        let q = family_quotient(FamilyId::M0, None, Window::new(6, 0).unwrap()).unwrap();
        let images = (0..6)
            .map(|s| if s + 1 < 6 { SparseVec::unit(s + 1) } else { SparseVec::new() })
            .collect();
        assert!(potentially_nilpotent_window(&LinearMapWindow::from_images(&q, images)));
        assert!(potentially_nilpotent_window(&LinearMapWindow::zero(&q)));
        assert!(!potentially_nilpotent_window(&LinearMapWindow::identity(&q)));
    }

    #[test]
    fn inner_derivation_of_y() {
        let q = family_quotient(FamilyId::M0Tilde, None, Window::new(6, 0).unwrap()).unwrap();
        let ad = inner_derivation(&q, &Element::basis(BasisSymbol::Y)).unwrap();
        assert!(ad.image(0).is_zero());
        for i in 1..6 {
            assert_eq!(ad.image(i), &-SparseVec::unit(i));
        }
        assert!(is_derivation(&q, &ad));
    }

    #[test]
    fn flat_round_trip() {
        let q = family_quotient(FamilyId::M2Tilde, None, Window::new(5, 0).unwrap()).unwrap();
        let ad = inner_derivation(&q, &Element::basis(BasisSymbol::X)).unwrap();
        assert_eq!(LinearMapWindow::from_flat(&q, &ad.to_flat()), ad);
    }
}
