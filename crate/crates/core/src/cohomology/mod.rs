//! Adjoint 2-cochains, cocycles and coboundaries on windowed quotients.

mod m0tilde;
mod witness;

pub use m0tilde::{
    m0tilde_trivializer, prop_cocycle_m0tilde, prop_oracle_check, random_prop_params,
    trivializer_check, M0TildeParams, PropOracleReport, PropSymbol, PropVariant,
    TrivializerVariant, VariantCheck,
};
pub use witness::{m2tilde_witness, WitnessReport};

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{jacobi_check, BasisSymbol, Element, Quotient, Window};
use crate::derivation::LinearMapWindow;
use crate::linalg::{Echelon, Matrix, SparseVec, Subspace};

/// Default cap on the number of unknowns of the cocycle system.
pub const DEFAULT_UNKNOWN_CAP: usize = 6000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("cocycle system has {unknowns} unknowns (cap {cap}); lower N")]
    TooLarge { unknowns: usize, cap: usize },
    #[error("Jacobi identity fails in this window; refusing to solve")]
    NotLie,
    #[error("window N = {top} too small: need N >= {needed}")]
    WindowTooSmall { top: u32, needed: u32 },
    #[error("{0} is required for this operation")]
    WrongAlgebra(&'static str),
    #[error("support bound {bound} exceeds N = {top}")]
    SupportBound { bound: u32, top: u32 },
}

/// Index of the pair `a < b` among all pairs of `0..n` in lexicographic order.
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Flat coordinate of the `t`-component of `phi(a, b)` and the sign from
/// reordering the pair; `None` on the diagonal.
fn var(n: usize, a: usize, b: usize, t: usize) -> Option<(usize, bool)> {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Some((pair_index(n, a, b) * n + t, false)),
        std::cmp::Ordering::Greater => Some((pair_index(n, b, a) * n + t, true)),
        std::cmp::Ordering::Equal => None,
    }
}

/// Alternating bilinear map on a quotient, stored on pairs `a < b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain2 {
    window: Window,
    n: usize,
    flat: SparseVec,
}

impl Cochain2 {
    pub fn zero(q: &Quotient) -> Self {
        Self {
            window: q.window(),
            n: q.dim(),
            flat: SparseVec::new(),
        }
    }

    pub fn from_flat(q: &Quotient, flat: SparseVec) -> Self {
        Self {
            window: q.window(),
            n: q.dim(),
            flat,
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn flat(&self) -> &SparseVec {
        &self.flat
    }

    /// Adds `c * b_t` to `phi(a, b)` (and its negative to `phi(b, a)`).
    pub fn add(&mut self, a: usize, b: usize, t: usize, c: &crate::linalg::Rational) {
        if let Some((v, flip)) = var(self.n, a, b, t) {
            if flip {
                self.flat.add_at(v, &-c.clone());
            } else {
                self.flat.add_at(v, c);
            }
        }
    }

    pub fn value(&self, a: usize, b: usize) -> SparseVec {
        let n = self.n;
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => SparseVec::new(),
            std::cmp::Ordering::Less => {
                let base = pair_index(n, a, b) * n;
                SparseVec::from_pairs((0..n).map(|t| (t, self.flat.get(base + t))))
            }
            std::cmp::Ordering::Greater => -self.value(b, a),
        }
    }

    pub fn scaled(&self, c: &crate::linalg::Rational) -> Self {
        Self {
            flat: self.flat.scaled(c),
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.flat.is_zero()
    }

    /// Nonzero values `phi(a, b)` for `a < b`.
    pub fn values(&self, q: &Quotient) -> BTreeMap<(BasisSymbol, BasisSymbol), Element> {
        let n = self.n;
        let mut out: BTreeMap<(BasisSymbol, BasisSymbol), Element> = BTreeMap::new();
        let mut pairs = Vec::with_capacity(pair_count(n));
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((a, b));
            }
        }
        for (v, c) in self.flat.iter() {
            let (a, b) = pairs[v / n];
            let key = (q.symbol(a), q.symbol(b));
            let entry = out.entry(key).or_default();
            entry.add_term(q.symbol(v % n), c);
        }
        out
    }
}

/// Keeps cochain coordinates whose pair and component are all interior.
pub fn interior_cochain_filter(q: &Quotient) -> impl Fn(usize) -> bool + '_ {
    let n = q.dim();
    let mut pairs = Vec::with_capacity(pair_count(n));
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((a, b));
        }
    }
    move |v| {
        let (a, b) = pairs[v / n];
        q.is_interior(a) && q.is_interior(b) && q.is_interior(v % n)
    }
}

/// `Z(a,b,c) = [a,phi(b,c)] - [phi(a,b),c] + [phi(a,c),b]
///           + phi(a,[b,c]) - phi([a,b],c) + phi([a,c],b)`
pub fn z_residual(q: &Quotient, phi: &Cochain2, a: usize, b: usize, c: usize) -> SparseVec {
    let ua = SparseVec::unit(a);
    let ub = SparseVec::unit(b);
    let uc = SparseVec::unit(c);
    let apply = |u: &SparseVec, w: usize| -> SparseVec {
        let mut out = SparseVec::new();
        for (k, coef) in u.iter() {
            out.add_scaled(&phi.value(k, w), coef);
        }
        out
    };
    let mut r = q.bracket_vec(&ua, &phi.value(b, c));
    r = &r - &q.bracket_vec(&phi.value(a, b), &uc);
    r = &r + &q.bracket_vec(&phi.value(a, c), &ub);
    r = &r - &apply(q.bracket_basis(b, c), a);
    r = &r - &apply(q.bracket_basis(a, b), c);
    &r + &apply(q.bracket_basis(a, c), b)
}

/// Linear rows of the cocycle condition over all triples `a < b < c`,
/// one row per output component.
pub fn z2_constraints(q: &Quotient) -> Vec<SparseVec> {
    let n = q.dim();
    let mut rows = Vec::new();
    let add = |eq: &mut BTreeMap<usize, SparseVec>, t: usize, slot: Option<(usize, bool)>, co: &crate::linalg::Rational| {
        if let Some((v, flip)) = slot {
            let co = if flip { -co.clone() } else { co.clone() };
            eq.entry(t).or_default().add_at(v, &co);
        }
    };
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let mut eq: BTreeMap<usize, SparseVec> = BTreeMap::new();
                for s in 0..n {
                    for (t, co) in q.bracket_basis(a, s).iter() {
                        add(&mut eq, t, var(n, b, c, s), co);
                    }
                    for (t, co) in q.bracket_basis(s, c).iter() {
                        add(&mut eq, t, var(n, a, b, s), &-co.clone());
                    }
                    for (t, co) in q.bracket_basis(s, b).iter() {
                        add(&mut eq, t, var(n, a, c, s), co);
                    }
                }
                for (k, co) in q.bracket_basis(b, c).iter() {
                    for t in 0..n {
                        add(&mut eq, t, var(n, a, k, t), co);
                    }
                }
                for (k, co) in q.bracket_basis(a, b).iter() {
                    for t in 0..n {
                        add(&mut eq, t, var(n, k, c, t), &-co.clone());
                    }
                }
                for (k, co) in q.bracket_basis(a, c).iter() {
                    for t in 0..n {
                        add(&mut eq, t, var(n, k, b, t), co);
                    }
                }
                rows.extend(eq.into_values().filter(|r| !r.is_zero()));
            }
        }
    }
    rows
}

pub fn is_cocycle(q: &Quotient, phi: &Cochain2) -> bool {
    first_residual(q, phi).is_none()
}

/// First triple (in lexicographic order) with a nonzero residual.
pub fn first_residual(q: &Quotient, phi: &Cochain2) -> Option<([BasisSymbol; 3], Element)> {
    let n = q.dim();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let r = z_residual(q, phi, a, b, c);
                if !r.is_zero() {
                    return Some(([q.symbol(a), q.symbol(b), q.symbol(c)], q.to_element(&r)));
                }
            }
        }
    }
    None
}

/// `psi(a,b) = [f a, b] + [a, f b] - f([a,b])`
pub fn d1(q: &Quotient, f: &LinearMapWindow) -> Cochain2 {
    let n = q.dim();
    let mut out = Cochain2::zero(q);
    for a in 0..n {
        for b in a + 1..n {
            let mut v = q.bracket_vec(f.image(a), &SparseVec::unit(b));
            v = &v + &q.bracket_vec(&SparseVec::unit(a), f.image(b));
            v = &v - &f.apply(q.bracket_basis(a, b));
            let base = pair_index(n, a, b) * n;
            for (t, c) in v.iter() {
                out.flat.set(base + t, c.clone());
            }
        }
    }
    out
}

pub fn solve_z2(q: &Quotient, cap: usize) -> Result<Subspace, CohomologyError> {
    let unknowns = pair_count(q.dim()) * q.dim();
    if unknowns > cap {
        return Err(CohomologyError::TooLarge { unknowns, cap });
    }
    if !jacobi_check(q).ok {
        return Err(CohomologyError::NotLie);
    }
    let m = Matrix::from_rows(unknowns, z2_constraints(q)).expect("cochain coordinates");
    Ok(m.nullspace_basis())
}

/// Image of `d1` over the elementary maps `b_s -> b_t`.
pub fn b2_space(q: &Quotient) -> Subspace {
    let n = q.dim();
    let mut ech = Echelon::new(pair_count(n) * n);
    for s in 0..n {
        for t in 0..n {
            let mut images = vec![SparseVec::new(); n];
            images[s] = SparseVec::unit(t);
            ech.insert(d1(q, &LinearMapWindow::from_images(q, images)).flat());
        }
    }
    Subspace::from_echelon(ech)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleReport {
    pub z2: Subspace,
    pub b2: Subspace,
    pub z2_interior: Subspace,
    pub b2_interior: Subspace,
    pub h2_raw: usize,
    pub h2_interior_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H2Summary {
    pub dim_z2_raw: usize,
    pub dim_b2_raw: usize,
    pub h2_raw: usize,
    pub dim_z2_interior: usize,
    pub dim_b2_interior: usize,
    pub h2_interior: usize,
}

impl CocycleReport {
    pub fn summary(&self) -> H2Summary {
        H2Summary {
            dim_z2_raw: self.z2.dim(),
            dim_b2_raw: self.b2.dim(),
            h2_raw: self.h2_raw,
            dim_z2_interior: self.z2_interior.dim(),
            dim_b2_interior: self.b2_interior.dim(),
            h2_interior: self.h2_interior_dim,
        }
    }
}

pub fn h2_report(q: &Quotient, cap: usize) -> Result<CocycleReport, CohomologyError> {
    let z2 = solve_z2(q, cap)?;
    let b2 = b2_space(q);
    let keep = interior_cochain_filter(q);
    let z2_interior = z2.project(&keep);
    let b2_interior = b2.project(&keep);
    debug_assert!(b2_interior.leq(&z2_interior).unwrap_or(false));
    Ok(CocycleReport {
        h2_raw: z2.dim() - b2.dim(),
        h2_interior_dim: z2_interior.dim() - b2_interior.dim(),
        z2,
        b2,
        z2_interior,
        b2_interior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Presentation;
    use crate::catalog::{family_quotient, FamilyId};
    use crate::linalg::rat;

    #[test]
    fn pair_indexing_is_dense() {
        let n = 6;
        let mut k = 0;
        for a in 0..n {
            for b in a + 1..n {
                assert_eq!(pair_index(n, a, b), k);
                k += 1;
            }
        }
        assert_eq!(k, pair_count(n));
    }

    #[test]
    fn abelian_cohomology() {
        let q = Quotient::new(&Presentation::abelian("ab"), Window::new(3, 0).unwrap()).unwrap();
        let r = h2_report(&q, DEFAULT_UNKNOWN_CAP).unwrap();
        assert_eq!(r.z2.dim(), 9);
        assert_eq!(r.b2.dim(), 0);
        assert_eq!(r.h2_interior_dim, 9);
    }

    #[test]
    fn d1_of_identity_is_bracket() {
        let q = family_quotient(FamilyId::M0Tilde, None, Window::new(6, 0).unwrap()).unwrap();
        let psi = d1(&q, &LinearMapWindow::identity(&q));
        for a in 0..q.dim() {
            for b in 0..q.dim() {
                assert_eq!(psi.value(a, b), q.bracket_basis(a, b).clone());
            }
        }
    }

    #[test]
    fn cochain_is_alternating() {
        let q = family_quotient(FamilyId::M2Tilde, None, Window::new(5, 0).unwrap()).unwrap();
        let mut phi = Cochain2::zero(&q);
        phi.add(3, 1, 4, &rat(2));
        assert_eq!(phi.value(1, 3), SparseVec::unit(4).scaled(&rat(-2)));
        assert!(phi.value(2, 2).is_zero());
    }

    #[test]
    fn size_cap_refuses() {
        let q = family_quotient(FamilyId::M0Tilde, None, Window::new(10, 0).unwrap()).unwrap();
        assert!(matches!(solve_z2(&q, 100), Err(CohomologyError::TooLarge { .. })));
    }
}
