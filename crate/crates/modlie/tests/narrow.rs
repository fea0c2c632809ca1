use modlie::cartan::{make_D, make_H_omega2, Hamiltonian};
use modlie::grading::*;
use modlie::linalg::{is_zero_vec, unit_vec, vec_add, vec_scale};
use modlie::narrow::*;
use modlie::Error;
use proptest::prelude::*;

fn maximal_class_prefix(h: &Hamiltonian, depth_periods: usize) -> (LoopPrefix, Homog, Homog) {
    let g = specialize(&a_grading(h).unwrap(), -(h.p2() as i64), -1).unwrap();
    let n = g.cyclic_dims().unwrap().len();
    let d = make_D(h).unwrap().matrix;
    let lp = LoopPrefix::new(&g, depth_periods * n, Some(d)).unwrap();
    let x = lp.element(1, unit_vec(h.dim(), h.index(1, 0).unwrap()));
    let y = Homog { d: 1, ..x.clone() };
    (lp, x, y)
}

fn thin_prefix(h: &Hamiltonian) -> (LoopPrefix, Homog, Homog) {
    let g = specialize(&a_grading(h).unwrap(), 1 - h.p2() as i64, -1).unwrap();
    let n = g.cyclic_dims().unwrap().len();
    let lp = LoopPrefix::new(&g, 3 * n, None).unwrap();
    let x = lp.element(1, unit_vec(h.dim(), h.index(1, 0).unwrap()));
    let y = lp.element(1, unit_vec(h.dim(), h.index(0, h.p2() - 1).unwrap()));
    (lp, x, y)
}

#[test]
fn maximal_class_through_three_periods() {
    for (p, n1, n2) in [(3u32, 1u32, 1u32), (2, 1, 2), (5, 1, 1), (2, 2, 1), (3, 1, 2)] {
        let h = make_H_omega2(p, n1, n2).unwrap();
        let (lp, _, _) = maximal_class_prefix(&h, 3);
        assert_eq!(lp.depth, 3 * (h.dim()));
        assert_eq!(lp.check_maximal_class(), None, "({p},{n1},{n2})");
        assert_eq!(lp.dim(1), 2);
    }
}

#[test]
fn without_the_derivation_degree_one_is_too_small() {
    let h = make_H_omega2(3, 1, 1).unwrap();
    let g = specialize(&a_grading(&h).unwrap(), -3, -1).unwrap();
    let lp = LoopPrefix::new(&g, 10, None).unwrap();
    assert_eq!(lp.check_maximal_class(), Some(1));
}

#[test]
fn adjoined_map_must_be_a_degree_one_derivation() {
    let h = make_H_omega2(3, 1, 1).unwrap();
    let g = specialize(&a_grading(&h).unwrap(), -3, -1).unwrap();
    let d = make_D(&h).unwrap().matrix;
    assert!(matches!(LoopPrefix::new(&g, 10, Some(d.pow(2))), Err(Error::InvalidParameter(_))));
    let f = h.algebra.field().clone();
    let id = modlie::Matrix::identity(&f, h.dim());
    assert!(matches!(LoopPrefix::new(&g, 10, Some(id)), Err(Error::InvalidParameter(_))));
    assert!(LoopPrefix::new(&g, 0, Some(d)).is_err());
}

/// X = x centralizes exactly the components spanned by a pure power of x.
fn centralizer_oracle(h: &Hamiltonian, lp: &LoopPrefix, k: usize) -> Centralizer {
    let v = &lp.component(k)[0].v;
    let b = v.iter().position(|&c| c != 0).unwrap();
    let pure_x = (1..h.p1()).any(|a| h.index(a, 0).unwrap() == b);
    if pure_x {
        Centralizer::X
    } else {
        Centralizer::Y
    }
}

#[test]
fn two_step_centralizers_match_direct_computation() {
    for (p, n1, n2) in [(3u32, 1u32, 1u32), (2, 1, 2), (5, 1, 1), (2, 2, 1)] {
        let h = make_H_omega2(p, n1, n2).unwrap();
        let (lp, x, y) = maximal_class_prefix(&h, 3);
        let seq = lp.two_step_centralizers(&x, &y).unwrap();
        assert_eq!(seq.len(), lp.depth - 1);
        let n = h.dim();
        let q = h.p2() as usize;
        for &(k, c) in &seq {
            assert_eq!(c, centralizer_oracle(&h, &lp, k), "({p},{n1},{n2}) degree {k}");
            // X-side degrees are the multiples iq, 2 <= i <= p^{n1}, modulo the period
            let xside = (2..=h.p1() as usize).any(|i| (i * q) % n == k % n);
            assert_eq!(c == Centralizer::X, xside);
        }
    }
}

#[test]
fn stated_congruence_rule_does_not_describe_the_centralizers() {
    let h = make_H_omega2(3, 1, 1).unwrap();
    let (lp, x, y) = maximal_class_prefix(&h, 3);
    let seq = lp.two_step_centralizers(&x, &y).unwrap();
    let q = h.p2() as usize;
    let mismatches = seq.iter().filter(|&&(k, c)| (c == Centralizer::X) != (k % (q - 1) == 1)).count();
    assert!(mismatches > 0);
    assert_eq!(seq[1], (3, Centralizer::Y));
}

#[test]
fn centralizers_need_maximal_class() {
    let h = make_H_omega2(3, 1, 1).unwrap();
    let (lp, x, y) = thin_prefix(&h);
    assert!(matches!(lp.two_step_centralizers(&x, &y), Err(Error::Check(_))));
}

#[test]
fn thin_grading_diamonds_have_infinite_type() {
    for (p, n1, n2) in [(3u32, 1u32, 1u32), (3, 1, 2), (5, 1, 1), (2, 1, 2), (2, 2, 2)] {
        let h = make_H_omega2(p, n1, n2).unwrap();
        let (lp, x, y) = thin_prefix(&h);
        assert_eq!(lp.check_thin(), None, "({p},{n1},{n2})");
        let q = h.p2() as usize;
        let n = lp.period();
        let r = lp.diamonds(&x, &y, &|k| k % n == q % n);
        let want: Vec<usize> = (2..=lp.depth).filter(|&k| k % (q - 1) == 1 % (q - 1) && k % n != q % n).collect();
        if q > 2 {
            assert_eq!(r.positions, want);
        }
        for e in &r.entries {
            if e.fake {
                assert_eq!(lp.dim(e.degree), 1);
                assert_eq!(e.degree % n, q % n);
                assert_eq!(e.lambda, Lambda::Finite(0));
            } else {
                assert_eq!(e.lambda, Lambda::Infinite, "degree {}", e.degree);
            }
        }
        assert_eq!(lp.second_diamond(), r.positions.first().copied());
    }
}

#[test]
fn elements_below_diamonds_are_x_powers_times_y() {
    for (p, n1, n2) in [(3u32, 1u32, 2u32), (2, 2, 2), (5, 1, 1)] {
        let h = make_H_omega2(p, n1, n2).unwrap();
        let (lp, _, _) = thin_prefix(&h);
        let q = h.p2() as usize;
        assert_eq!(lp.component(q - 1)[0].v, unit_vec(h.dim(), h.index(0, 1).unwrap()));
        let n = lp.period() as i64;
        for i in 0..h.p1() {
            let below = ((q as i64 - 1) * (1 - i as i64)).rem_euclid(n);
            let below = if below == 0 { n } else { below } as usize;
            assert_eq!(lp.component(below)[0].v, unit_vec(h.dim(), h.index(i, 1).unwrap()));
            assert_eq!(lp.dim(below + 1), if i == 0 { 1 } else { 2 });
        }
    }
}

#[test]
fn lemma_grading_diamond_types_progress() {
    for (p, n2) in [(3u32, 1u32), (3, 2), (5, 1), (2, 2)] {
        let t = lemma_thin_grading(p, 1, n2).unwrap();
        let f = t.field.clone();
        let n = t.grading.cyclic_dims().unwrap().len();
        let lp = LoopPrefix::new(&t.grading, 2 * n + 2, None).unwrap();
        assert_eq!(lp.check_thin(), None, "({p},{n2})");
        let x = lp.element(1, t.ebar_vec(1));
        let y = lp.element(1, t.e_vec(1, 1));
        let q = t.p2() as usize;
        let r = lp.diamonds(&x, &y, &|k| k % n == q % n);
        let mut seen = 0;
        for alpha in 0..p as usize {
            for period in 0..2 {
                let k = q + alpha * (q - 1) + period * n;
                if k > lp.depth {
                    continue;
                }
                let e = r.entries.iter().find(|e| e.degree == k).unwrap();
                assert_eq!(e.lambda, Lambda::Finite(f.from_int(alpha as i64)), "({p},{n2}) degree {k}");
                assert_eq!(e.fake, alpha == 0);
                seen += 1;
            }
        }
        assert!(seen >= p as usize);
        // the diamond L_1 of the next period has type -1
        let e = r.entries.iter().find(|e| e.degree == n + 1).unwrap();
        assert_eq!(e.lambda, Lambda::Finite(f.neg(1)));
    }
}

#[test]
fn y_centralizes_components_away_from_diamonds() {
    for (p, n2) in [(3u32, 2u32), (5, 1), (2, 2)] {
        let t = lemma_thin_grading(p, 1, n2).unwrap();
        let n = t.grading.cyclic_dims().unwrap().len();
        let lp = LoopPrefix::new(&t.grading, n, None).unwrap();
        let y = lp.element(1, t.e_vec(1, 1));
        let q = t.p2() as usize;
        for k in 1..=n {
            let r = k % (q - 1);
            let comp = lp.component(k);
            let killed = comp.iter().all(|v| lp.bracket(v, &y).is_zero());
            if r != 0 && r != 1 % (q - 1) {
                assert!(killed, "({p},{n2}) degree {k}");
            }
        }
    }
}

#[test]
fn covering_fails_for_a_non_thin_grading() {
    let h = make_H_omega2(3, 1, 1).unwrap();
    let g = specialize(&a_grading(&h).unwrap(), 0, -1).unwrap();
    let lp = LoopPrefix::new(&g, 4, None).unwrap();
    assert_eq!(lp.check_thin().map(|t| t.0), Some(1));
}

proptest! {
    #[test]
    fn loop_bracket_is_alternating_and_graded(i in 1usize..20, j in 1usize..20, a in 0u32..3, b in 0u32..3, c in 0u32..3) {
        let h = make_H_omega2(3, 1, 1).unwrap();
        let (lp, _, _) = maximal_class_prefix(&h, 3);
        let f = lp.field().clone();
        let mut u = lp.component(i).into_iter().fold(None::<Homog>, |acc, e| match acc {
            None => Some(Homog { v: vec_scale(&f, a, &e.v), d: f.mul(a, e.d), ..e }),
            Some(s) => Some(Homog { v: vec_add(&f, &s.v, &vec_scale(&f, b, &e.v)), d: f.add(s.d, f.mul(b, e.d)), ..s }),
        }).unwrap();
        u.d = f.add(u.d, if i == 1 { c } else { 0 });
        let w = lp.component(j)[0].clone();
        let uw = lp.bracket(&u, &w);
        let wu = lp.bracket(&w, &u);
        prop_assert_eq!(uw.degree, i + j);
        prop_assert!(is_zero_vec(&vec_add(&f, &uw.v, &wu.v)));
        let span = lp.component(i + j);
        let coeffs: Vec<usize> = uw.v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(t, _)| t).collect();
        for t in coeffs {
            prop_assert!(span.iter().any(|e| e.v[t] != 0));
        }
    }
}
