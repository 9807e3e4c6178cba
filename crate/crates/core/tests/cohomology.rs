use prosolv_core::algebra::{BasisSymbol, Element, Quotient, Window};
use prosolv_core::catalog::{family_quotient, FamilyId};
use prosolv_core::cohomology::{
    b2_space, d1, first_residual, h2_report, interior_cochain_filter, is_cocycle, m0tilde_trivializer,
    m2tilde_witness, prop_cocycle_m0tilde, prop_oracle_check, random_prop_params, solve_z2,
    trivializer_check, z_residual, Cochain2, M0TildeParams, PropVariant,
    TrivializerVariant, DEFAULT_UNKNOWN_CAP,
};
use prosolv_core::derivation::{inner_derivation, LinearMapWindow};
use prosolv_core::linalg::{rat, Rational, SparseVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn m0t(n: u32, b: u32) -> Quotient {
    family_quotient(FamilyId::M0Tilde, None, Window::new(n, b).unwrap()).unwrap()
}

fn m2t(n: u32, b: u32) -> Quotient {
    family_quotient(FamilyId::M2Tilde, None, Window::new(n, b).unwrap()).unwrap()
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into())
}

#[test]
fn m0_tilde_h2_vanishes() {
    for (n, b, z) in [(8, 3, 49), (8, 2, 64), (8, 4, 36), (10, 3, 81)] {
        let r = h2_report(&m0t(n, b), DEFAULT_UNKNOWN_CAP).unwrap();
        assert_eq!(r.h2_interior_dim, 0, "N={n} B={b}");
        assert_eq!(r.z2_interior.dim(), z, "N={n} B={b}");
        assert_eq!(r.h2_raw, 0);
    }
    let r = h2_report(&m0t(8, 3), DEFAULT_UNKNOWN_CAP).unwrap();
    assert_eq!((r.z2.dim(), r.b2.dim()), (90, 90));
}

#[test]
fn m2_tilde_h2() {
    let r = h2_report(&m2t(10, 3), DEFAULT_UNKNOWN_CAP).unwrap();
    assert_eq!((r.z2.dim(), r.b2.dim()), (111, 110));
    assert_eq!(r.h2_interior_dim, 1);
    // With B = 4 the surviving class takes values outside the interior.
    assert_eq!(h2_report(&m2t(10, 4), DEFAULT_UNKNOWN_CAP).unwrap().h2_interior_dim, 0);
    assert_eq!(h2_report(&m2t(12, 4), DEFAULT_UNKNOWN_CAP).unwrap().h2_interior_dim, 1);
}

#[test]
fn coboundaries_are_cocycles() {
    let q = m2t(8, 0);
    let z2 = solve_z2(&q, DEFAULT_UNKNOWN_CAP).unwrap();
    let b2 = b2_space(&q);
    assert!(b2.leq(&z2).unwrap());
    let keep = interior_cochain_filter(&q);
    assert!(b2.project(&keep).leq(&z2.project(&keep)).unwrap());
}

#[test]
fn inner_maps_have_zero_coboundary() {
    let q = m0t(8, 0);
    for &s in q.symbols() {
        let ad = inner_derivation(&q, &Element::basis(s)).unwrap();
        assert!(d1(&q, &ad).is_zero(), "{s}");
    }
    assert!(d1(&q, &LinearMapWindow::zero(&q)).is_zero());
}

#[test]
fn zero_cochain_residuals() {
    let q = m0t(6, 0);
    let phi = Cochain2::zero(&q);
    assert!(z_residual(&q, &phi, 0, 1, 6).is_zero());
    assert!(is_cocycle(&q, &phi));
}

#[test]
fn witness_sweep() {
    let q = m2t(12, 0);
    let expected = [(2, false), (3, true), (4, true), (5, false), (6, false)];
    for (j_min, cocycle) in expected {
        let (_, r) = m2tilde_witness(&q, j_min).unwrap();
        assert_eq!(r.is_cocycle, cocycle, "j_min = {j_min}");
        assert!(!r.is_coboundary, "j_min = {j_min}");
        assert_eq!(r.obstruction_reproduced, j_min <= 5, "j_min = {j_min}");
    }
    let (_, r) = m2tilde_witness(&q, 5).unwrap();
    assert_eq!(r.residual_rows, 3);
    let (triple, residual) = r.first_residual.unwrap();
    assert_eq!(triple, [BasisSymbol::E(1), BasisSymbol::E(2), BasisSymbol::E(4)]);
    assert_eq!(residual, Element::basis(BasisSymbol::E(7)));
    let (phi, _) = m2tilde_witness(&q, 5).unwrap();
    let e8 = SparseVec::unit(7);
    assert_eq!(z_residual(&q, &phi, 0, 2, 3), -e8);
}

#[test]
fn witness_residual_at_e1_e3_e5() {
    let q = m2t(12, 0);
    let (phi, _) = m2tilde_witness(&q, 5).unwrap();
    assert!(z_residual(&q, &phi, 0, 2, 4).is_zero());
}

#[test]
fn scaled_witness_keeps_its_class() {
    let q = m2t(12, 0);
    let (phi, _) = m2tilde_witness(&q, 4).unwrap();
    let two = phi.scaled(&rat(2));
    assert!(is_cocycle(&q, &two));
    let b2 = b2_space(&q);
    assert!(!b2.contains(two.flat()).unwrap());
}

#[test]
fn witness_needs_room() {
    assert!(m2tilde_witness(&m2t(8, 0), 5).is_err());
    assert!(m2tilde_witness(&m0t(12, 0), 5).is_err());
}

#[test]
fn prop_parametrization_matches_z2() {
    for (n, b) in [(8, 1), (8, 3), (8, 4)] {
        let q = m0t(n, b);
        let z2 = solve_z2(&q, DEFAULT_UNKNOWN_CAP).unwrap();
        let r = prop_oracle_check(&q, &z2).unwrap();
        assert!(r.equal, "N={n} B={b}: {r:?}");
        assert!(r.non_cocycle_directions.is_empty());
    }
}

#[test]
fn prop_needs_a_buffer() {
    let q = m0t(8, 0);
    let z2 = solve_z2(&q, DEFAULT_UNKNOWN_CAP).unwrap();
    let r = prop_oracle_check(&q, &z2).unwrap();
    assert!(!r.equal);
    assert_eq!(r.dim_prop_span_interior + 1, r.dim_z2_interior);
}

#[test]
fn printed_readings() {
    let q = m0t(8, 3);
    let z2 = solve_z2(&q, DEFAULT_UNKNOWN_CAP).unwrap();
    let r = prop_oracle_check(&q, &z2).unwrap();
    for c in &r.printed_coefficients {
        assert!(c.adopted_consistent, "{}", c.item);
        assert!(!c.printed_consistent, "{}", c.item);
    }
    assert_eq!(r.printed_coefficients.len(), 6);
}

#[test]
fn random_prop_cocycles_trivialize() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let q = m0t(10, 4);
    for _ in 0..3 {
        let params = random_prop_params(10, || small_rational(&mut rng));
        let phi = prop_cocycle_m0tilde(&q, &params, PropVariant::ADOPTED).unwrap();
        assert!(first_residual(&q, &phi).is_none());
        let f = m0tilde_trivializer(&q, &params, TrivializerVariant::ADOPTED).unwrap();
        assert_eq!(d1(&q, &f), phi);
        let residual = trivializer_check(&q, &params, PropVariant::ADOPTED, TrivializerVariant::ADOPTED)
            .unwrap();
        assert!(residual.is_zero());
    }
}

#[test]
fn every_direction_trivializes() {
    let q = m0t(8, 3);
    for s in M0TildeParams::free_symbols(8, 8, 8) {
        let params = M0TildeParams::unit(8, s);
        let r = trivializer_check(&q, &params, PropVariant::ADOPTED, TrivializerVariant::ADOPTED)
            .unwrap();
        assert!(r.is_zero(), "{s}");
    }
}
