use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{BasisSymbol, Element, Quotient};
use crate::linalg::{rat, Echelon, SparseVec};

use super::{b2_space, first_residual, interior_cochain_filter, z2_constraints, Cochain2, CohomologyError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub j_min: u32,
    pub is_cocycle: bool,
    /// Number of nonzero rows of the cocycle system on this cochain.
    pub residual_rows: usize,
    pub first_residual: Option<([BasisSymbol; 3], Element)>,
    pub is_coboundary: bool,
    /// `phi(e3, e5)` lies outside `{ (d1 f)(e3, e5) : f linear }`.
    pub obstruction_reproduced: bool,
}

fn check_m2tilde(q: &Quotient) -> Result<(), CohomologyError> {
    if !q.has_x() || q.has_y() {
        return Err(CohomologyError::WrongAlgebra("M2t"));
    }
    Ok(())
}

/// `phi(e3, e_j) = e_{j+3}` for `j >= j_min, j != 3` and
/// `phi(e2, e_j) = (4 - j) e_{j+2}` for `j >= 5`; zero elsewhere.
pub fn m2tilde_cochain(q: &Quotient, j_min: u32) -> Cochain2 {
    let top = q.window().top();
    let mut phi = Cochain2::zero(q);
    let idx = |i: u32| q.index_of(BasisSymbol::E(i));
    for j in j_min.max(1)..=top {
        if j == 3 {
            continue;
        }
        if let (Some(a), Some(b), Some(t)) = (idx(3), idx(j), idx(j + 3)) {
            phi.add(a, b, t, &rat(1));
        }
    }
    for j in 5..=top {
        if let (Some(a), Some(b), Some(t)) = (idx(2), idx(j), idx(j + 2)) {
            phi.add(a, b, t, &rat(4 - i64::from(j)));
        }
    }
    phi
}

pub fn m2tilde_witness(q: &Quotient, j_min: u32) -> Result<(Cochain2, WitnessReport), CohomologyError> {
    check_m2tilde(q)?;
    let top = q.window().top();
    let needed = (j_min + 4).max(8);
    if top < needed {
        return Err(CohomologyError::WindowTooSmall { top, needed });
    }
    let phi = m2tilde_cochain(q, j_min);
    let residual_rows = z2_constraints(q)
        .iter()
        .filter(|r| !r.dot(phi.flat()).is_zero())
        .count();
    let first = first_residual(q, &phi);
    let keep = interior_cochain_filter(q);
    let b2_interior = b2_space(q).project(&keep);
    let is_coboundary = b2_interior
        .contains(&phi.flat().filtered(&keep))
        .expect("cochain coordinates");
    let report = WitnessReport {
        j_min,
        is_cocycle: residual_rows == 0,
        residual_rows,
        first_residual: first,
        is_coboundary,
        obstruction_reproduced: obstruction(q, &phi),
    };
    Ok((phi, report))
}

/// `(d1 f)(e3, e5) = [f e3, e5] + [e3, f e5] - f([e3, e5])` ranges over the span
/// of `[b, e5]`, `[e3, b]` and, when `[e3, e5] != 0`, the whole quotient.
fn obstruction(q: &Quotient, phi: &Cochain2) -> bool {
    let (Some(a), Some(b)) = (q.index_of(BasisSymbol::E(3)), q.index_of(BasisSymbol::E(5))) else {
        return false;
    };
    let n = q.dim();
    let mut ech = Echelon::new(n);
    for s in 0..n {
        ech.insert(q.bracket_basis(s, b));
        ech.insert(q.bracket_basis(a, s));
    }
    if !q.bracket_basis(a, b).is_zero() {
        for s in 0..n {
            ech.insert(&SparseVec::unit(s));
        }
    }
    !ech.reduce(&phi.value(a, b)).is_zero()
}
