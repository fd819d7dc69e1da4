use sato::hierarchy::*;
use sato::matop::{IndexSet, MatPsdo};
use sato::superpoly::{frac, DiffPoly, Var};

fn gl11() -> Hierarchy {
    Hierarchy::new(&IndexSet::superset(1, 1), 2).unwrap()
}

fn u(m: usize, i: usize, j: usize) -> DiffPoly {
    DiffPoly::var(Var::u(m, i, j, (i == 2) ^ (j == 2)))
}

fn matrix(m: usize) -> MatPsdo {
    coefficient_matrix(&IndexSet::superset(1, 1), |i, j| u(m, i, j))
}

#[test]
fn scalar_h1_from_root_expansion() {
    let h = Hierarchy::new(&IndexSet::superset(1, 0), 2).unwrap();
    let (a, b) = (u(1, 1, 1), u(0, 1, 1));
    let want = b - a.d().scale(&frac(1, 2)) - (&a * &a).scale(&frac(1, 4));
    assert_eq!(h.hamiltonian_density(1, 4).unwrap(), want);
}

#[test]
fn root_powers_back_to_l() {
    let h = gl11();
    let b = h.root(4).unwrap();
    let sq = b.circ_pow_to(2, Some(-2)).unwrap();
    assert!(sq.agrees_with(h.l()));
    assert!(h.power(2, 4).unwrap().agrees_with(h.l()));
}

#[test]
fn gl11_h1() {
    let h = gl11();
    let v = |i, j| u(1, i, j);
    let w = |i, j| u(0, i, j);
    let want = w(1, 1) - w(2, 2) - (v(1, 1).d() - v(2, 2).d()).scale(&frac(1, 2)) - (&v(1, 1) * &v(1, 1)).scale(&frac(1, 4))
        + (&v(1, 2) * &v(2, 1)).scale(&frac(1, 2))
        + (&v(2, 2) * &v(2, 2)).scale(&frac(1, 4));
    assert_eq!(h.hamiltonian_density(1, 4).unwrap(), want);
    assert_eq!(h.hamiltonian_density(1, 6).unwrap(), want);
}

#[test]
fn h_n_vanishes() {
    let h = gl11();
    assert!(h.hamiltonian_density(2, 5).unwrap().is_zero());
    assert!(h.hamiltonian_density(4, 7).unwrap().is_zero());
}

#[test]
fn variational_identity() {
    for (m, n, big_n, ks) in [(1, 0, 2, vec![1, 3]), (1, 1, 2, vec![1, 3]), (1, 0, 3, vec![1, 2])] {
        let h = Hierarchy::new(&IndexSet::superset(m, n), big_n).unwrap();
        for k in ks {
            let bad = h.variational_identity_check(k, default_depth(k, big_n)).unwrap();
            assert!(bad.is_empty(), "{m} {n} {big_n} k={k}: {bad:?}");
        }
    }
}

#[test]
fn lax_matches_bracket_h() {
    let h = gl11();
    for k in [1, 2, 3] {
        assert!(h.lax_matches_bracket(Bracket::H, k, default_depth(k, 2)).unwrap(), "k={k}");
    }
}

#[test]
fn lax_matches_bracket_k() {
    let h = gl11();
    for k in [1, 2, 3, 4] {
        assert!(h.lax_matches_bracket(Bracket::K, k, default_depth(k, 2)).unwrap(), "k={k}");
    }
}

#[test]
fn lenard_magri() {
    let r = gl11().check_lenard_magri(3, 0).unwrap();
    assert!(r.passed(), "{r:?}");
    let s = Hierarchy::new(&IndexSet::superset(1, 0), 2).unwrap().check_lenard_magri(3, 0).unwrap();
    assert!(s.passed(), "{s:?}");
}

fn entry00(m: &MatPsdo, a: usize, b: usize) -> DiffPoly {
    m.get(a, b).coeff(0)
}

fn dmat(m: &MatPsdo, n: usize) -> MatPsdo {
    m.map_coeffs(|p| p.d_n(n))
}

#[test]
fn first_flow_display() {
    let h = gl11();
    let f = h.flow_h(1, default_depth(1, 2)).unwrap();
    let (v, w) = (matrix(1), matrix(0));
    let half = frac(1, 2);
    let vdv = v.circ_mul(&dmat(&v, 1)).unwrap();
    let comm = &v.circ_mul(&w).unwrap() - &w.circ_mul(&v).unwrap();
    let rhs = &(&dmat(&w, 1) - &dmat(&v, 2).scale(&half)) + &(&comm - &vdv).scale(&half);
    for a in 1..=2 {
        for b in 1..=2 {
            assert!(f.dgen[&Var::u(1, a, b, (a == 2) ^ (b == 2))].is_zero());
            assert_eq!(f.dgen[&Var::u(0, a, b, (a == 2) ^ (b == 2))], entry00(&rhs, a, b), "w{a}{b}");
        }
    }
}

#[test]
fn reduced_third_flow_display() {
    let h = gl11();
    let f = h.flow_h(3, default_depth(3, 2)).unwrap();
    let w = matrix(0);
    let dw = dmat(&w, 1);
    let sym = &w.circ_mul(&dw).unwrap() + &dw.circ_mul(&w).unwrap();
    let rhs = &dmat(&w, 3).scale(&frac(1, 4)) + &sym.scale(&frac(3, 4));
    for a in 1..=2 {
        for b in 1..=2 {
            let got = h.reduce(&f.dgen[&Var::u(0, a, b, (a == 2) ^ (b == 2))]);
            assert_eq!(got, entry00(&rhs, a, b), "w{a}{b}");
        }
    }
}

#[test]
fn flows_without_top_motion() {
    let h = gl11();
    for k in [1, 2, 3] {
        assert!(h.moving_top_generators(k, default_depth(k, 2)).unwrap().is_empty());
    }
    assert!(h.flow_h(2, default_depth(2, 2)).unwrap().is_zero());
}

#[test]
fn conservation_and_commutation() {
    let h = gl11();
    for (k, k2) in [(1, 1), (1, 3), (3, 1), (3, 3)] {
        assert!(h.check_conservation(k, k2, default_depth(k.max(k2), 2)).unwrap(), "{k} {k2}");
    }
    assert!(h.check_commutation(1, 3, default_depth(3, 2)).unwrap().is_empty());
}

#[test]
fn depth_stability() {
    let h = gl11();
    for k in [1, 3] {
        let d = default_depth(k, 2);
        stable(d, |d| h.hamiltonian_density(k, d)).unwrap();
        stable(d, |d| Ok(h.flow_h(k, d)?.dgen)).unwrap();
    }
    assert!(matches!(h.hamiltonian_density(3, 2), Err(sato::Error::Untrusted { .. })));
}

#[test]
fn lenard_magri_wider_block() {
    let h = Hierarchy::new(&IndexSet::superset(2, 1), 2).unwrap();
    let r = h.check_lenard_magri(1, 0).unwrap();
    assert!(r.passed(), "{r:?}");
}
