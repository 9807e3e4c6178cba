use proptest::prelude::*;

use prosolv_core::algebra::{Quotient, Window};
use prosolv_core::catalog::{family_quotient, FamilyId, ParamVector};
use prosolv_core::cohomology::{d1, is_cocycle, z_residual, Cochain2};
use prosolv_core::derivation::{inner_derivation, is_derivation, LinearMapWindow};
use prosolv_core::linalg::{Matrix, Rational, SparseVec, Subspace};

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

/// Sparse-ish entries: roughly half are zero.
fn entry() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(Rational::from_integer(0.into())), rational()]
}

fn matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(entry(), c), r)
            .prop_map(|rows| Matrix::from_dense(&rows).unwrap())
    })
}

fn vector(n: usize) -> impl Strategy<Value = SparseVec> {
    prop::collection::vec(entry(), n).prop_map(|v| SparseVec::from_dense(&v))
}

fn m0_beta() -> Quotient {
    let pv = ParamVector::new(vec![Rational::new(1.into(), 2.into()), Rational::from_integer((-3).into())]);
    family_quotient(FamilyId::M0Beta, Some(&pv), Window::new(7, 0).unwrap()).unwrap()
}

fn m2_tilde() -> Quotient {
    family_quotient(FamilyId::M2Tilde, None, Window::new(6, 0).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(m in matrix(12)) {
        prop_assert_eq!(m.rank() + m.nullspace_basis().dim(), m.cols());
    }

    #[test]
    fn rref_idempotent(m in matrix(10)) {
        let once = m.rref();
        let twice = once.matrix.rref();
        prop_assert_eq!(&once.matrix, &twice.matrix);
        prop_assert_eq!(once.pivots, twice.pivots);
    }

    #[test]
    fn kernel_is_annihilated(m in matrix(10)) {
        for v in m.kernel_vectors() {
            prop_assert!(m.mul_vec(&v).unwrap().is_zero());
        }
    }

    #[test]
    fn membership_reconstructs(vs in prop::collection::vec(vector(8), 1..6), coeffs in prop::collection::vec(rational(), 6)) {
        let s = Subspace::span(8, vs.iter()).unwrap();
        let mut v = SparseVec::new();
        for (b, c) in vs.iter().zip(&coeffs) {
            v.add_scaled(b, c);
        }
        let coords = s.membership(&v).unwrap().expect("combination lies in the span");
        let mut back = SparseVec::new();
        for (b, c) in s.basis().iter().zip(&coords) {
            back.add_scaled(b, c);
        }
        prop_assert_eq!(back, v);
    }

    #[test]
    fn bracket_antisymmetric_and_bilinear(a in vector(9), b in vector(9), c in vector(9), s in rational()) {
        let q = m0_beta();
        let ab = q.bracket_vec(&a, &b);
        prop_assert_eq!(&ab, &-q.bracket_vec(&b, &a));
        let lhs = q.bracket_vec(&(&a.scaled(&s) + &b), &c);
        let rhs = &q.bracket_vec(&a, &c).scaled(&s) + &q.bracket_vec(&b, &c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ad_is_derivation(a in vector(9)) {
        let q = m0_beta();
        let ad = inner_derivation(&q, &q.to_element(&a)).unwrap();
        prop_assert!(is_derivation(&q, &ad));
    }

    #[test]
    fn coboundary_of_any_map_is_cocycle(images in prop::collection::vec(vector(7), 7)) {
        let q = m2_tilde();
        let f = LinearMapWindow::from_images(&q, images);
        prop_assert!(is_cocycle(&q, &d1(&q, &f)));
    }

    #[test]
    fn d1_is_linear(f in prop::collection::vec(vector(7), 7), g in prop::collection::vec(vector(7), 7), s in rational()) {
        let q = m2_tilde();
        let combo: Vec<SparseVec> = f.iter().zip(&g).map(|(a, b)| &a.scaled(&s) + b).collect();
        let lhs = d1(&q, &LinearMapWindow::from_images(&q, combo));
        let rhs = &d1(&q, &LinearMapWindow::from_images(&q, f)).flat().scaled(&s)
            + d1(&q, &LinearMapWindow::from_images(&q, g)).flat();
        prop_assert_eq!(lhs.flat(), &rhs);
    }

    #[test]
    fn z_residual_is_linear(u in vector(147), v in vector(147), s in rational(), t in 0usize..35) {
        let q = m2_tilde();
        let (a, b, c) = triple(t, q.dim());
        let phi = Cochain2::from_flat(&q, u.clone());
        let psi = Cochain2::from_flat(&q, v.clone());
        let combo = Cochain2::from_flat(&q, &u.scaled(&s) + &v);
        let lhs = z_residual(&q, &combo, a, b, c);
        let rhs = &z_residual(&q, &phi, a, b, c).scaled(&s) + &z_residual(&q, &psi, a, b, c);
        prop_assert_eq!(lhs, rhs);
    }
}

fn triple(t: usize, n: usize) -> (usize, usize, usize) {
    let mut all = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                all.push((a, b, c));
            }
        }
    }
    all[t % all.len()]
}
