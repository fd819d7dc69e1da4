use sato::pvsa::{affine_operator, affine_table, verify_adler_identity};
use sato::psdo::Psdo;
use sato::superpoly::{int, sign, DiffPoly, Var};
use sato::wgen::*;

fn spec(m: usize, n: usize, big_n: usize) -> RectangularSpec {
    RectangularSpec::new(m, n, big_n).unwrap()
}

fn qv(s: &RectangularSpec, i: usize, j: usize) -> DiffPoly {
    DiffPoly::var(Var::q(i, j, s.is_odd(i) ^ s.is_odd(j)))
}

#[test]
fn affine_operator_shape_and_adler() {
    let s = spec(1, 1, 2);
    let a = affine_operator(&s.pi());
    assert_eq!(a.rows().len(), 4);
    assert_eq!(a.get(1, 1), &(&Psdo::d_pow(1) + &Psdo::mult(qv(&s, 1, 1))));
    assert_eq!(a.get(2, 2), &(&Psdo::d_pow(1) - &Psdo::mult(qv(&s, 2, 2))));
    let t = affine_table(&s.pi(), &int(-1));
    assert!(verify_adler_identity(&a, &t, 1, 1, 0, false).unwrap().is_empty());
}

#[test]
fn rho_cases() {
    let s = spec(1, 1, 3);
    let a = affine_operator(&s.pi());
    let ra = rho_matrix(&s, &a);
    for u in 1..3 {
        for x in 1..=2 {
            for y in 1..=2 {
                let e = ra.get(s.global(u, x), s.global(u + 1, y));
                let want = if x == y { Psdo::one() } else { Psdo::zero() };
                assert_eq!(e, &want);
            }
        }
    }
    assert!(rho(&s, &DiffPoly::var(s.q(1, 3, 1, 2))).is_zero());
    let q11 = DiffPoly::var(s.q(1, 1, 1, 2));
    assert_eq!(rho(&s, &q11), q11);
}

#[test]
fn two_block_generators_match_closed_form() {
    for (m, n) in [(1, 1), (2, 1), (1, 0), (0, 2)] {
        let s = spec(m, n, 2);
        let w = WAlgebra::new(s).unwrap();
        let b = s.block_size();
        for i in 1..=b {
            for j in 1..=b {
                let si = sign(s.is_odd(i));
                let v = (qv(&s, i, j) + qv(&s, i + b, j + b)).scale(&si);
                let mut ww = qv(&s, i, j).d().scale(&si) - qv(&s, i + b, j).scale(&si);
                for k in 1..=b {
                    ww += &(&qv(&s, i + b, k + b) * &qv(&s, k, j)).scale(&sign(s.is_odd(i) ^ s.is_odd(k)));
                }
                assert_eq!(w.generator(i, j, 1), &v);
                assert_eq!(w.generator(i, j, 0), &ww);
            }
        }
    }
}

#[test]
fn chain_sum_agrees_with_quasi_determinant() {
    for (m, n, big_n) in [(1, 1, 2), (2, 1, 2), (1, 1, 3), (2, 1, 3), (1, 0, 4)] {
        let s = spec(m, n, big_n);
        assert_eq!(build_l(&s).unwrap(), build_l_by_chains(&s).unwrap());
    }
}

#[test]
fn gl63_first_entry() {
    let s = spec(2, 1, 3);
    let w = WAlgebra::new(s).unwrap();
    let q = |i, j| qv(&s, i, j);
    assert_eq!(w.generator(1, 1, 2), &(q(1, 1) + q(4, 4) + q(7, 7)));
    let w1 = -q(7, 4) - q(4, 1) + q(1, 1).d().scale_int(2) + q(4, 4).d()
        + &q(4, 4) * &q(1, 1)
        + &q(7, 7) * &q(1, 1)
        + &q(7, 7) * &q(4, 4)
        + &q(4, 5) * &q(2, 1)
        - &q(4, 6) * &q(3, 1)
        + &q(7, 8) * &q(5, 4)
        + &q(7, 8) * &q(2, 1)
        - &q(7, 9) * &q(6, 4)
        - &q(7, 9) * &q(3, 1);
    assert_eq!(w.generator(1, 1, 1), &w1);
    let qq = |a, b, c, d| &q(a, b) * &q(c, d);
    let w0 = q(1, 1).d_n(2) + q(7, 1) - q(4, 1).d() + qq(4, 4, 1, 1).d() + &q(7, 7) * &q(1, 1).d() - qq(7, 4, 1, 1)
        - qq(7, 5, 2, 1)
        + qq(7, 6, 3, 1)
        - qq(7, 7, 4, 1)
        - qq(7, 8, 5, 1)
        + qq(7, 9, 6, 1)
        + qq(4, 5, 2, 1).d()
        - qq(4, 6, 3, 1).d()
        + &q(7, 8) * &q(2, 1).d()
        - &q(7, 9) * &q(3, 1).d()
        + &q(7, 7) * &qq(4, 4, 1, 1)
        + &q(7, 7) * &qq(4, 5, 2, 1)
        - &q(7, 7) * &qq(4, 6, 3, 1)
        + &q(7, 8) * &qq(5, 4, 1, 1)
        + &q(7, 8) * &qq(5, 5, 2, 1)
        - &q(7, 8) * &qq(5, 6, 3, 1)
        - &q(7, 9) * &qq(6, 4, 1, 1)
        - &q(7, 9) * &qq(6, 5, 2, 1)
        + &q(7, 9) * &qq(6, 6, 3, 1);
    assert_eq!(w.generator(1, 1, 0), &w0);
    assert_eq!(conformal_weight(&s, w.generator(1, 1, 1)), Weight::Homogeneous(2));
}

#[test]
fn generator_counts_weights_and_linear_parts() {
    for (m, n, big_n) in [(1, 1, 2), (2, 1, 2), (1, 1, 3), (2, 1, 3)] {
        let s = spec(m, n, big_n);
        let w = WAlgebra::new(s).unwrap();
        let b = s.block_size();
        assert_eq!(w.generators().len(), big_n * b * b);
        for g in w.generators() {
            assert_eq!(conformal_weight(&s, &g.value), Weight::Homogeneous((big_n - g.k) as i64));
            let mut f = DiffPoly::zero();
            for h in 0..=g.k {
                f += &DiffPoly::var(s.q(big_n + h - g.k, h + 1, g.i, g.j));
            }
            let f = f.scale(&sign(g.k % 2 == 1));
            let lin = WAlgebra::linear_part(&g.value);
            let c = sign(((big_n - 1) % 2 == 1) ^ s.is_odd(g.i));
            assert_eq!(lin, f.scale(&c), "w{}_{}{}", g.k, g.i, g.j);
        }
    }
}

#[test]
fn conformal_weight_examples() {
    let s = spec(1, 1, 2);
    let q = DiffPoly::var(s.q(1, 1, 1, 1));
    assert_eq!(conformal_weight(&s, &q), Weight::Homogeneous(1));
    assert_eq!(conformal_weight(&s, &(&q.d() * &q)), Weight::Homogeneous(3));
    assert_eq!(conformal_weight(&s, &(q.d() + q.clone())), Weight::Inhomogeneous);
    assert_eq!(conformal_weight(&s, &DiffPoly::var(s.q(2, 1, 1, 1))), Weight::Homogeneous(2));
}

#[test]
fn membership() {
    for (m, n, big_n) in [(1, 1, 2), (2, 1, 2), (1, 1, 3)] {
        let w = WAlgebra::new(spec(m, n, big_n)).unwrap();
        for g in w.generators() {
            assert!(w.check_membership(&g.value).unwrap().is_empty());
        }
    }
    let s = spec(1, 1, 2);
    let w = WAlgebra::new(s).unwrap();
    assert!(!w.check_membership(&DiffPoly::var(s.q(1, 1, 1, 1))).unwrap().is_empty());
    assert!(w.check_membership(&DiffPoly::int(7)).unwrap().is_empty());
    assert!(w.w_bracket(&DiffPoly::var(s.q(1, 1, 1, 1)), &DiffPoly::one()).is_err());
}

#[test]
fn two_block_lambda_relations_for_v() {
    let s = spec(1, 1, 2);
    let w = WAlgebra::new(s).unwrap();
    let vv = |i: usize, j: usize| DiffPoly::var(Var::w(1, i, j, s.is_odd(i) ^ s.is_odd(j)));
    let lam = DiffPoly::lambda();
    for i in 1..=2 {
        for j in 1..=2 {
            for h in 1..=2 {
                for k in 1..=2 {
                    let b = w.w_bracket(w.generator(i, j, 1), w.generator(h, k, 1)).unwrap();
                    let r = w.rewrite(&b).unwrap();
                    let (pi, pj, ph) = (s.is_odd(i), s.is_odd(j), s.is_odd(h));
                    let sg = sign((pi && pj) ^ (pi && ph) ^ (pj && ph));
                    let mut want = DiffPoly::zero();
                    if h == j {
                        want += &vv(i, k);
                    }
                    if i == k {
                        want -= &vv(h, j);
                    }
                    if h == j && i == k {
                        want -= &lam.scale_int(2);
                    }
                    assert_eq!(r, want.scale(&sg));
                }
            }
        }
    }
}

#[test]
fn isomorphism_small_specs() {
    for (m, n, big_n) in [(1, 1, 2), (2, 0, 2), (1, 0, 2), (1, 1, 3)] {
        let w = WAlgebra::get(spec(m, n, big_n)).unwrap();
        let rep = w.verify_isomorphism().unwrap();
        assert!(rep.passed(), "{m} {n} {big_n}: {:?}", rep.mismatches.len());
    }
}

#[test]
fn l_is_adler_for_w_bracket() {
    let w = WAlgebra::get(spec(1, 1, 2)).unwrap();
    let t = w.bracket_table().unwrap();
    let l = w.abstract_l();
    assert!(verify_adler_identity(&l, &t, 2, 2, 0, false).unwrap().is_empty());
}

#[test]
fn two_block_lambda_relations_with_w() {
    let s = spec(1, 1, 2);
    let w = WAlgebra::new(s).unwrap();
    let gv = |k: usize, i: usize, j: usize| DiffPoly::var(Var::w(k, i, j, s.is_odd(i) ^ s.is_odd(j)));
    let (v_, w_) = (|i, j| gv(1, i, j), |i, j| gv(0, i, j));
    let lam = DiffPoly::lambda();
    let lp = |p: &DiffPoly| &lam * p + p.d();
    let delta = |a: usize, b: usize| if a == b { DiffPoly::one() } else { DiffPoly::zero() };
    for i in 1..=2 {
        for j in 1..=2 {
            for h in 1..=2 {
                for k in 1..=2 {
                    let (pi, pj, ph) = (s.is_odd(i), s.is_odd(j), s.is_odd(h));
                    let sg = sign((pi && pj) ^ (pi && ph) ^ (pj && ph));
                    let sj = sign(pj);
                    let vw = w.rewrite(&w.w_bracket(w.generator(i, j, 1), w.generator(h, k, 0)).unwrap()).unwrap();
                    let want = -(&delta(i, k) * &(&v_(h, j) * &lam + w_(h, j))).scale(&sg)
                        + (&delta(h, j) * &w_(i, k)).scale(&sj)
                        - (&(&delta(j, h) * &delta(i, k)) * &(&lam * &lam)).scale(&sj);
                    assert_eq!(vw, want, "v{i}{j} w{h}{k}");
                    let ww = w.rewrite(&w.w_bracket(w.generator(i, j, 0), w.generator(h, k, 0)).unwrap()).unwrap();
                    let dd = &delta(i, k) * &delta(h, j);
                    let want = &delta(h, j) * &lp(&w_(i, k))
                        + &v_(h, j) * &w_(i, k)
                        + &dd * &(&lam * &(&lam * &lam))
                        + &delta(i, k) * &(&v_(h, j) * &(&lam * &lam))
                        + &delta(i, k) * &(&w_(h, j) * &lam)
                        - &delta(h, j) * &lp(&lp(&v_(i, k)))
                        - &v_(h, j) * &lp(&v_(i, k))
                        - &w_(h, j) * &v_(i, k);
                    assert_eq!(ww, want.scale(&sg), "w{i}{j} w{h}{k}");
                }
            }
        }
    }
}

#[test]
fn scalar_two_block_is_negated_virasoro_display() {
    let s = spec(1, 0, 2);
    let w = WAlgebra::new(s).unwrap();
    let (u, v) = (DiffPoly::var(Var::w(1, 1, 1, false)), DiffPoly::var(Var::w(0, 1, 1, false)));
    let lam = DiffPoly::lambda();
    let l2 = &lam * &lam;
    let br = |a: usize, b: usize| w.rewrite(&w.w_bracket(w.generator(1, 1, a), w.generator(1, 1, b)).unwrap()).unwrap();
    assert_eq!(br(1, 1), -lam.scale_int(2));
    assert_eq!(br(1, 0), -(l2.clone() + &u * &lam));
    let vv = -(&l2 * &lam) + &(&u * &u - v.scale_int(2) + u.d().scale_int(2)) * &lam + u.d_n(2) + &u * &u.d() - v.d();
    assert_eq!(br(0, 0), -vv);
}
