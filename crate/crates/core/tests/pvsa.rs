use num_rational::BigRational;
use sato::matop::{IndexSet, MatPsdo};
use sato::psdo::Psdo;
use sato::pvsa::*;
use sato::superpoly::{frac, int, sign, DiffPoly, Family, Var};

fn lam() -> DiffPoly {
    DiffPoly::lambda()
}

fn lam_pow(n: u32) -> DiffPoly {
    DiffPoly::var_pow(Var::lambda(), n)
}

fn scalar_uv() -> (Var, Var) {
    (Var::u(1, 1, 1, false), Var::u(0, 1, 1, false))
}

fn printed_virasoro_table() -> BracketTable {
    let (u, v) = scalar_uv();
    let (du, dv) = (DiffPoly::var(u), DiffPoly::var(v));
    let mut t = BracketTable::new(vec![u, v]);
    t.insert(u, u, lam().scale_int(2));
    t.insert(u, v, lam_pow(2) + &du * &lam());
    t.insert(v, u, -flip(&(lam_pow(2) + &du * &lam())));
    let vv = -lam_pow(3) + &(&du * &du - dv.scale_int(2) + du.d().scale_int(2)) * &lam() + du.d_n(2) + &du * &du.d()
        - dv.d();
    t.insert(v, v, vv);
    t
}

#[test]
fn printed_virasoro_table_is_skew_and_jacobi() {
    let t = printed_virasoro_table();
    assert!(check_skew(&t).is_empty());
    assert!(check_jacobi(&t).is_empty());
}

#[test]
fn virasoro_family_from_master_formula() {
    let t = printed_virasoro_table();
    let (u, v) = scalar_uv();
    let (du, dv) = (DiffPoly::var(u), DiffPoly::var(v));
    for (p, q) in [(0, 1), (1, 2), (-3, 4), (2, 1)] {
        let alpha = frac(p, q);
        let w = -dv.clone() + (&du * &du).scale(&frac(1, 2)) + du.d().scale(&alpha);
        let got = master_eval(&t, &w, &w, Family::Lambda).unwrap();
        let c = &(&alpha * &alpha) * &int(-2) + &alpha * &int(2) - int(1);
        let want = w.d() + (&w * &lam()).scale_int(2) + lam_pow(3).scale(&c);
        assert_eq!(got, want, "alpha = {alpha}");
    }
}

#[test]
fn scalar_generic_table_is_negated_virasoro_table() {
    let set = IndexSet::superset(1, 0);
    let h = generic_table(&set, 2, GenericKind::H).unwrap();
    let printed = printed_virasoro_table();
    let (u, v) = scalar_uv();
    for (a, b) in [(u, u), (u, v), (v, u), (v, v)] {
        assert_eq!(h.get(&a, &b).unwrap(), -printed.get(&a, &b).unwrap(), "{a} {b}");
    }
}

#[test]
fn leading_coefficient_brackets() {
    for (m, n, big_n) in [(1, 1, 2), (2, 0, 2), (1, 1, 3)] {
        let set = IndexSet::superset(m, n);
        let top = big_n - 1;
        let ids = set.ids().to_vec();
        for &a in &ids {
            for &b in &ids {
                for &c in &ids {
                    for &d in &ids {
                        let par = |x: usize| set.parity_of(x).unwrap();
                        let s = (par(a) && par(b)) ^ (par(a) && par(c)) ^ (par(b) && par(c));
                        let got = generic_h_bracket(&set, big_n, (top, a, b), (top, c, d)).unwrap().scale(&sign(s));
                        let uv = |i: usize, j: usize| DiffPoly::var(Var::u(top, i, j, par(i) ^ par(j)));
                        let mut want = DiffPoly::zero();
                        if c == b {
                            want += &uv(a, d);
                        }
                        if a == d {
                            want -= &uv(c, b);
                        }
                        if a == d && c == b {
                            want -= &lam().scale_int(big_n as i64);
                        }
                        assert_eq!(got, want);
                        for l in 0..big_n {
                            assert!(generic_k_bracket(&set, big_n, (top, a, b), (l, c, d)).unwrap().is_zero());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn n_equal_one_is_affine_level_minus_one() {
    let set = IndexSet::superset(1, 1);
    let h = generic_table(&set, 1, GenericKind::H).unwrap();
    let k = generic_table(&set, 1, GenericKind::K).unwrap();
    assert_eq!(k.entries().count(), 0);
    let level = -BigRational::from_integer(1.into());
    let par = |x: usize| set.parity_of(x).unwrap();
    let to_q = |p: &DiffPoly| {
        p.substitute(&|v: &Var| {
            (v.family == Family::U).then(|| DiffPoly::var(Var::q(v.i as usize, v.j as usize, v.odd)).scale(&sign(par(v.i as usize))))
        })
    };
    for x in h.generators() {
        for y in h.generators() {
            let (a, b, c, d) = (x.i as usize, x.j as usize, y.i as usize, y.j as usize);
            let want = affine_bracket(&set, &level, (a, b), (c, d)).scale(&sign(par(a) ^ par(c)));
            assert_eq!(to_q(&h.get(x, y).unwrap()), want, "{x} {y}");
        }
    }
}

#[test]
fn affine_examples() {
    let set = IndexSet::superset(2, 0);
    let level = -BigRational::from_integer(1.into());
    let q = |i, j| DiffPoly::var(Var::q(i, j, false));
    assert_eq!(affine_bracket(&set, &level, (1, 2), (2, 1)), q(1, 1) - q(2, 2) - lam());
    assert!(affine_bracket(&set, &level, (1, 1), (2, 2)).is_zero());
    for lv in [int(-1), int(0), frac(5, 3)] {
        let t = affine_table(&IndexSet::superset(1, 1), &lv);
        assert!(check_skew(&t).is_empty());
        assert!(check_jacobi(&t).is_empty());
    }
}

#[test]
fn affine_operator_is_adler_at_level_minus_one() {
    for (m, n) in [(1, 1), (2, 0), (1, 2)] {
        let set = IndexSet::superset(m, n);
        let t = affine_table(&set, &int(-1));
        let a = affine_operator(&set);
        assert!(verify_adler_identity(&a, &t, 1, 1, 0, false).unwrap().is_empty());
        let t0 = affine_table(&set, &int(0));
        assert!(!verify_adler_identity(&a, &t0, 1, 1, 0, false).unwrap().is_empty());
    }
}

#[test]
fn corrupted_tables_are_reported() {
    let set = IndexSet::superset(1, 1);
    let h = generic_table(&set, 2, GenericKind::H).unwrap();
    let mut bad = (*h).clone();
    let x = Var::u(0, 1, 2, true);
    let y = Var::u(1, 2, 1, true);
    let v = bad.get(&x, &y).unwrap();
    assert!(!v.is_zero());
    bad.insert(x, y, -v);
    let mut report = check_skew(&bad);
    report.sort();
    let mut want = vec![(x, y), (y, x)];
    want.sort();
    assert_eq!(report, want);
    let mut bad2 = printed_virasoro_table();
    let (u, _) = scalar_uv();
    bad2.insert(u, u, lam().scale_int(3));
    assert!(check_skew(&bad2).is_empty());
    assert!(!check_jacobi(&bad2).is_empty());
}

#[test]
fn generic_tables_are_pvsa() {
    for (m, n, big_n) in [(1, 1, 2), (2, 0, 2)] {
        let set = IndexSet::superset(m, n);
        let h = generic_table(&set, big_n, GenericKind::H).unwrap();
        assert!(check_parity(&h).is_empty());
        assert!(check_skew(&h).is_empty());
        assert!(check_jacobi(&h).is_empty());
        let e = deformed_table(&set, big_n).unwrap();
        assert!(check_skew(&e).is_empty());
        assert!(check_jacobi(&e).is_empty());
    }
}

#[test]
fn k_bracket_is_epsilon_derivative() {
    let set = IndexSet::superset(1, 1);
    let big_n = 2;
    let eps = DiffPoly::param(Family::Eps);
    let shifted = |p: &DiffPoly| {
        p.substitute(&|v: &Var| (v.family == Family::U && v.m == Some(0) && v.i == v.j).then(|| DiffPoly::var(*v) + eps.clone()))
    };
    let l = generic_operator(&set, big_n);
    let le = l.map_coeffs(shifted);
    let hk = generic_table(&set, big_n, GenericKind::H).unwrap();
    let kk = generic_table(&set, big_n, GenericKind::K).unwrap();
    for x in hk.generators() {
        for y in hk.generators() {
            let (pa, pb) = (set.position(x.i as usize).unwrap(), set.position(x.j as usize).unwrap());
            let (pc, pd) = (set.position(y.i as usize).unwrap(), set.position(y.j as usize).unwrap());
            let v = adler_coefficient(le.at(pc, pb), le.at(pa, pd), x.m.unwrap() as i32, y.m.unwrap() as i32).unwrap();
            let s = (set.odd_at(pa) && set.odd_at(pb)) ^ (set.odd_at(pa) && set.odd_at(pc)) ^ (set.odd_at(pb) && set.odd_at(pc));
            let v = v.scale(&sign(s));
            let parts = v.coeffs_in(Family::Eps);
            assert!(parts.keys().all(|e| *e <= 1));
            assert_eq!(parts.get(&0).cloned().unwrap_or_default(), hk.get(x, y).unwrap());
            assert_eq!(parts.get(&1).cloned().unwrap_or_default(), kk.get(x, y).unwrap());
        }
    }
}

#[test]
fn generic_operator_is_adler() {
    let set = IndexSet::superset(1, 1);
    let l = generic_operator(&set, 2);
    let h = generic_table(&set, 2, GenericKind::H).unwrap();
    assert!(verify_adler_identity(&l, &h, 2, 2, 0, false).unwrap().is_empty());
    let e = deformed_table(&set, 2).unwrap();
    let eps = DiffPoly::param(Family::Eps);
    let le = &l + &MatPsdo::identity(&set).map(|p| Psdo::mult(eps.clone()).compose(p));
    assert!(verify_adler_identity(&le, &e, 2, 2, 0, false).unwrap().is_empty());
    let sub = l.submatrix(&[2], &[2]).unwrap();
    assert!(verify_adler_identity(&sub, &h, 2, 2, 0, false).unwrap().is_empty());
}

#[test]
fn star_inverse_is_adler_for_opposite_bracket() {
    let set = IndexSet::superset(1, 1);
    let l = generic_operator(&set, 2);
    let h = generic_table(&set, 2, GenericKind::H).unwrap();
    let depth = 3;
    let inv = l.star_inverse_monic(2 * depth + 2).unwrap();
    assert!(verify_adler_identity(&inv, &h, -2, -2, depth, true).unwrap().is_empty());
}

#[test]
fn gd_brackets_match_lambda_brackets() {
    let set = IndexSet::superset(1, 1);
    let big_n = 2;
    let h = generic_table(&set, big_n, GenericKind::H).unwrap();
    let k = generic_table(&set, big_n, GenericKind::K).unwrap();
    let g = |m, i, j| DiffPoly::var(Var::u(m, i, j, i != j));
    let samples = vec![
        g(0, 1, 1),
        &g(1, 1, 1) * &g(0, 2, 2),
        &g(1, 1, 2) * &g(0, 2, 1).d(),
        &g(0, 1, 1) * &g(1, 2, 2).d() + &g(1, 1, 2) * &g(1, 2, 1),
    ];
    for f in &samples {
        for gg in &samples {
            let q = gd_quadratic(f, gg, &set, big_n).unwrap();
            let lq = master_eval(&h, f, gg, Family::Lambda).unwrap().at_zero(Family::Lambda);
            assert!((&q - &lq).is_total_derivative().unwrap(), "quadratic {f} ; {gg}");
            let lin = gd_linear(f, gg, &set, big_n).unwrap();
            let ll = master_eval(&k, f, gg, Family::Lambda).unwrap().at_zero(Family::Lambda);
            assert!((&lin - &ll).is_total_derivative().unwrap(), "linear {f} ; {gg}");
        }
    }
}

#[test]
fn circ_tables_are_twisted_pvsa() {
    for (m, n, big_n) in [(1, 1, 2), (2, 1, 2), (1, 2, 3)] {
        let set = IndexSet::superset(m, n);
        let par = |x: u16| set.parity_of(x as usize).unwrap();
        for kind in [GenericKind::H, GenericKind::K] {
            let h = generic_table(&set, big_n, kind).unwrap();
            let c = circ_table(&set, big_n, kind).unwrap();
            for &x in h.generators() {
                for &y in h.generators() {
                    let s = (par(x.i) ^ par(y.i)) && (par(x.j) ^ par(y.j));
                    assert_eq!(c.get(&x, &y).unwrap(), h.get(&x, &y).unwrap().scale(&sign(s)));
                }
            }
        }
    }
    let set = IndexSet::superset(1, 1);
    for kind in [GenericKind::H, GenericKind::K] {
        let c = circ_table(&set, 2, kind).unwrap();
        assert!(check_skew(&c).is_empty());
        assert!(check_jacobi(&c).is_empty());
    }
}
