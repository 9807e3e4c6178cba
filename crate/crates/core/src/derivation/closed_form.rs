use crate::algebra::{BasisSymbol, Element, Quotient, Window};
use crate::catalog::{family_quotient, FamilyId, ParamVector};
use crate::linalg::{rat, Rational, SparseVec, Subspace};

use super::{DerivationError, LinearMapWindow};

/// One free parameter of a closed-form derivation family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormDirection {
    pub label: String,
    pub map: LinearMapWindow,
    /// `a` with `d = ad_a`, for families whose derivations are all inner.
    pub inner_witness: Option<Element>,
}

/// Partially specified map; targets above the window are dropped.
struct Draft<'a> {
    q: &'a Quotient,
    images: Vec<SparseVec>,
}

impl<'a> Draft<'a> {
    fn new(q: &'a Quotient) -> Self {
        Self {
            q,
            images: vec![SparseVec::new(); q.dim()],
        }
    }

    fn put(&mut self, src: BasisSymbol, dst: BasisSymbol, c: i64) {
        let (Some(s), Some(t)) = (self.q.index_of(src), self.q.index_of(dst)) else {
            return;
        };
        self.images[s].add_at(t, &rat(c));
    }

    fn finish(self) -> LinearMapWindow {
        LinearMapWindow::from_images(self.q, self.images)
    }
}

fn e(i: u32) -> BasisSymbol {
    BasisSymbol::E(i)
}

fn elem(terms: &[(BasisSymbol, i64)]) -> Element {
    Element::from_terms(terms.iter().map(|(s, c)| (*s, rat(*c))))
}

fn is_zero_params(params: Option<&ParamVector>) -> bool {
    params.is_none_or(|p| p.values.iter().all(|q: &Rational| q == &rat(0)))
}

/// Closed-form derivation directions, one per free parameter that survives
/// truncation to the window.
pub fn closed_form_derivations(
    f: FamilyId,
    params: Option<&ParamVector>,
    w: Window,
) -> Result<Vec<ClosedFormDirection>, DerivationError> {
    let base = match f {
        FamilyId::M0Beta if is_zero_params(params) => FamilyId::M0Tilde,
        FamilyId::M2Gamma if is_zero_params(params) => FamilyId::M2Tilde,
        FamilyId::M0 | FamilyId::M2 | FamilyId::M0Tilde | FamilyId::M2Tilde => f,
        _ => return Err(DerivationError::Unsupported(f.cli_name().to_string())),
    };
    let q = family_quotient(f, params, w)?;
    let top = w.top();
    let ext = top + 2;
    let mut out = Vec::new();
    let mut push = |label: String, d: Draft, witness: Option<Element>| {
        let map = d.finish();
        if !map.is_zero() {
            out.push(ClosedFormDirection {
                label,
                map,
                inner_witness: witness.map(|a| q.project_element(&a)),
            });
        }
    };
    let (x, y) = (BasisSymbol::X, BasisSymbol::Y);
    match base {
        FamilyId::M0 => {
            let mut d = Draft::new(&q);
            d.put(e(1), e(1), 1);
            for k in 2..=top {
                d.put(e(k), e(k), i64::from(k) - 2);
            }
            push("alpha_1".into(), d, None);
            for m in 2..=ext {
                let mut d = Draft::new(&q);
                d.put(e(1), e(m), 1);
                push(format!("alpha_{m}"), d, None);
            }
            let mut d = Draft::new(&q);
            for k in 2..=top {
                d.put(e(k), e(k), 1);
            }
            push("beta_2".into(), d, None);
            for m in 3..=ext {
                let mut d = Draft::new(&q);
                for k in 2..=top {
                    d.put(e(k), e(m + k - 2), 1);
                }
                push(format!("beta_{m}"), d, None);
            }
        }
        FamilyId::M2 => {
            let mut d = Draft::new(&q);
            for k in 1..=top {
                d.put(e(k), e(k), i64::from(k));
            }
            push("alpha_1".into(), d, None);
            for m in 3..=ext {
                let mut d = Draft::new(&q);
                d.put(e(1), e(m), 1);
                for i in 3..=top {
                    d.put(e(i), e(m + i - 1), -1);
                }
                push(format!("alpha_{m}"), d, None);
            }
            for m in 3..=ext {
                let mut d = Draft::new(&q);
                d.put(e(2), e(m), 1);
                for i in 3..=top {
                    d.put(e(i), e(m + i - 2), 1);
                }
                push(format!("beta_{m}"), d, None);
            }
        }
        FamilyId::M0Tilde => {
            let mut d = Draft::new(&q);
            d.put(e(1), e(1), 1);
            for i in 2..=top {
                d.put(e(i), e(i), i64::from(i) - 2);
            }
            push("alpha_1".into(), d, Some(elem(&[(x, -1), (y, 1)])));
            let mut d = Draft::new(&q);
            for i in 2..=top {
                d.put(e(i), e(i), 1);
            }
            push("beta_2".into(), d, Some(elem(&[(y, -1)])));
            let mut d = Draft::new(&q);
            for i in 2..=top {
                d.put(e(i), e(i + 1), 1);
            }
            d.put(x, e(1), -1);
            push("beta_3".into(), d, Some(elem(&[(e(1), -1)])));
            for m in 3..=ext {
                let mut d = Draft::new(&q);
                d.put(e(1), e(m), 1);
                d.put(x, e(m - 1), i64::from(m) - 2);
                d.put(y, e(m - 1), 1);
                push(format!("alpha_{m}"), d, Some(elem(&[(e(m - 1), 1)])));
            }
        }
        FamilyId::M2Tilde => {
            let mut d = Draft::new(&q);
            for k in 1..=top {
                d.put(e(k), e(k), i64::from(k));
            }
            push("alpha_1".into(), d, Some(elem(&[(x, -1)])));
            let mut d = Draft::new(&q);
            d.put(e(2), e(3), 1);
            for i in 3..=top {
                d.put(e(i), e(i + 1), 1);
            }
            d.put(x, e(1), 1);
            push("beta_3".into(), d, Some(elem(&[(e(1), 1)])));
            for m in 3..=ext {
                let mut d = Draft::new(&q);
                d.put(e(1), e(m), 1);
                if m == 3 {
                    for i in 3..=top {
                        d.put(e(i), e(i + 2), -1);
                    }
                } else {
                    d.put(e(2), e(m + 1), 1);
                }
                d.put(x, e(m - 1), -(i64::from(m) - 1));
                push(format!("alpha_{m}"), d, Some(elem(&[(e(m - 1), -1)])));
            }
        }
        _ => unreachable!("base family resolved above"),
    }
    Ok(out)
}

/// Span of the closed-form directions in the map space.
pub fn closed_form_space(
    f: FamilyId,
    params: Option<&ParamVector>,
    w: Window,
) -> Result<Subspace, DerivationError> {
    let dirs = closed_form_derivations(f, params, w)?;
    let n = family_quotient(f, params, w)?.dim();
    let flats: Vec<SparseVec> = dirs.iter().map(|d| d.map.to_flat()).collect();
    Ok(Subspace::span(n * n, flats.iter()).expect("map-space coordinates"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::{inner_derivation, is_derivation};

    #[test]
    fn m0_beta_2_direction() {
        let w = Window::new(6, 0).unwrap();
        let dirs = closed_form_derivations(FamilyId::M0, None, w).unwrap();
        let b2 = dirs.iter().find(|d| d.label == "beta_2").unwrap();
        assert!(b2.map.image(0).is_zero());
        for k in 1..6 {
            assert_eq!(b2.map.image(k), &SparseVec::unit(k));
        }
    }

    #[test]
    fn every_direction_is_a_derivation() {
        for f in [FamilyId::M0, FamilyId::M2, FamilyId::M0Tilde, FamilyId::M2Tilde] {
            let w = Window::new(9, 0).unwrap();
            let q = family_quotient(f, None, w).unwrap();
            for d in closed_form_derivations(f, None, w).unwrap() {
                assert!(is_derivation(&q, &d.map), "{f} {}", d.label);
            }
        }
    }

    #[test]
    fn tilde_witnesses_are_exact() {
        for f in [FamilyId::M0Tilde, FamilyId::M2Tilde] {
            let w = Window::new(9, 0).unwrap();
            let q = family_quotient(f, None, w).unwrap();
            for d in closed_form_derivations(f, None, w).unwrap() {
                let a = d.inner_witness.clone().unwrap();
                assert_eq!(inner_derivation(&q, &a).unwrap(), d.map, "{f} {}", d.label);
            }
        }
    }

    #[test]
    fn witt_has_no_closed_form() {
        assert!(closed_form_derivations(FamilyId::WittPositive, None, Window::new(6, 0).unwrap()).is_err());
    }
}
