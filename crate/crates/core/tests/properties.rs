use cnalg_core::alt::{Alternating, KForm};
use cnalg_core::bundle::{anchor_anchor_dual, check_courant_axioms, make_sl2, make_twisted_tm};
use cnalg_core::cartan::{
    bianchi_defects, coord_field, exterior_d, levi_civita, lie_derivative, lie_derivative_components, metricity_defect,
    nijenhuis_torsion, scale_vf, schouten_square, Bivector, EndoTM, SymBilinear,
};
use cnalg_core::deriv::{
    check_nijenhuis, dual_apply_frames, gamma_l_basis, gamma_l_defect, make_lift, make_metric_derivation, LiftKind,
    NijenhuisMode, OneDerivation,
};
use cnalg_core::linalg::{is_zero_vec, vadd, vdot, vscale, vsub, Matrix, Vector};
use cnalg_core::sample::Sampler;
use cnalg_field::{Chart, RatFunc};
use proptest::prelude::*;

fn plane() -> Chart {
    Chart::new(&["x", "y"]).unwrap()
}

fn space() -> Chart {
    Chart::new(&["x", "y", "z"]).unwrap()
}

fn mat(c: &Chart, rows: &[&[&str]]) -> Matrix {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| c.parse(s).unwrap()).collect()).collect())
}

fn random_form(s: &mut Sampler, n: usize, k: usize) -> KForm {
    Alternating::from_fn(n, k, |_| s.poly())
}

/// An arbitrary 1-derivation with polynomial data; almost never compatible with anything.
fn random_derivation(c: &Chart, rank: usize, s: &mut Sampler) -> OneDerivation {
    let n = c.dim();
    let labels = (1..=rank).map(|i| format!("e{i}")).collect();
    OneDerivation::new(
        c.clone(),
        EndoTM(s.matrix(n, n)),
        s.matrix(rank, rank),
        (0..n).map(|_| s.matrix(rank, rank)).collect(),
        labels,
    )
    .unwrap()
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), k in 0usize..3) {
        let mut s = Sampler::new(seed, 3);
        let w = random_form(&mut s, 3, k);
        prop_assert!(exterior_d(&exterior_d(&w)).is_zero());
    }

    #[test]
    fn cartan_formula_matches_components(seed in any::<u64>(), k in 0usize..4) {
        let mut s = Sampler::new(seed, 3);
        let w = random_form(&mut s, 3, k);
        let x = s.vector(3);
        prop_assert_eq!(lie_derivative(&x, &w), lie_derivative_components(&x, &w));
    }

    #[test]
    fn nijenhuis_torsion_is_tensorial(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, 2);
        let t = EndoTM(s.matrix(2, 2));
        let (f, x, y) = (s.poly(), s.vector(2), s.vector(2));
        let lhs = nijenhuis_torsion(&t, &scale_vf(&f, &x), &y);
        prop_assert!(is_zero_vec(&vsub(&lhs, &scale_vf(&f, &nijenhuis_torsion(&t, &x, &y)))));
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>()) {
        let c = plane();
        let mut s = Sampler::new(seed, 2);
        let d = random_derivation(&c, 2, &mut s);
        let (f, sigma, x) = (s.poly(), s.vector(2), s.vector(2));
        let lhs = d.apply(&x, &vscale(&f, &sigma));
        let xf = cnalg_core::cartan::apply_vf(&x, &f);
        let rxf = cnalg_core::cartan::apply_vf(&d.base().apply(&x), &f);
        let rhs = vsub(
            &vadd(&vscale(&f, &d.apply(&x, &sigma)), &vscale(&xf, &d.apply_l(&sigma))),
            &vscale(&rxf, &sigma),
        );
        prop_assert!(is_zero_vec(&vsub(&lhs, &rhs)));
    }

    #[test]
    fn duality_is_pairing_compatible_and_involutive(seed in any::<u64>()) {
        let c = plane();
        let mut s = Sampler::new(seed, 2);
        let d = random_derivation(&c, 2, &mut s);
        // constant nondegenerate symmetric pairing
        let (a, b) = (s.int(1, 3), s.int(-2, 2));
        let g = Matrix::from_rows(vec![
            vec![RatFunc::from_int(a), RatFunc::from_int(b)],
            vec![RatFunc::from_int(b), RatFunc::from_int(-a)],
        ]);
        let dual = d.dualize(&g).unwrap();
        let (mu, sigma, x) = (s.vector(2), s.vector(2), s.vector(2));
        let pair = |u: &[RatFunc], v: &[RatFunc]| vdot(u, &g.apply(v));
        let rx = d.base().apply(&x);
        let v = pair(&dual.apply(&x, &mu), &sigma)
            .add(&pair(&mu, &d.apply(&x, &sigma)))
            .sub(&cnalg_core::cartan::apply_vf(&x, &pair(&mu, &d.apply_l(&sigma))))
            .add(&cnalg_core::cartan::apply_vf(&rx, &pair(&mu, &sigma)));
        prop_assert!(v.is_zero());
        prop_assert!(dual.dualize(&g).unwrap().difference(&d).is_none());
    }

    #[test]
    fn nijenhuis_iff_dual_nijenhuis(seed in any::<u64>()) {
        let c = plane();
        let mut s = Sampler::new(seed, 2);
        let r = EndoTM(s.matrix(2, 2));
        for d in [random_derivation(&c, 2, &mut s), make_lift(&c, &r, LiftKind::Tangent).unwrap()] {
            let dual = d.dualize(&Matrix::identity(2)).unwrap();
            prop_assert_eq!(
                check_nijenhuis(&d, NijenhuisMode::Nijenhuis, seed).passed(),
                check_nijenhuis(&dual, NijenhuisMode::Nijenhuis, seed).passed()
            );
        }
    }

    #[test]
    fn lift_nijenhuis_iff_torsion_free(seed in any::<u64>(), which in 0usize..4) {
        let c = plane();
        let mut s = Sampler::new(seed, 2);
        let r = match which {
            0 => EndoTM(s.matrix(2, 2)),
            1 => EndoTM(mat(&c, &[&["0", "-1"], &["1", "0"]])),
            2 => EndoTM(mat(&c, &[&["y", "0"], &["0", "0"]])),
            _ => EndoTM(Matrix::identity(2).scale(&s.poly())),
        };
        let torsion_free = is_zero_vec(&nijenhuis_torsion(&r, &coord_field(2, 0), &coord_field(2, 1)));
        let d = make_lift(&c, &r, LiftKind::Tangent).unwrap();
        prop_assert_eq!(check_nijenhuis(&d, NijenhuisMode::Nijenhuis, seed).passed(), torsion_free);
    }
}

proptest! {
    #![proptest_config(cases(8))]

    #[test]
    fn levi_civita_is_metric_torsion_free_and_bianchi(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, 2);
        let (p, q) = (s.poly(), s.poly());
        let off = RatFunc::from_int(s.int(-1, 1));
        // p² + 1 and q² + 2 keep the metric nondegenerate over ℚ(x)
        let g = Matrix::from_rows(vec![
            vec![p.mul(&p).add(&RatFunc::one()), off.clone()],
            vec![off, q.mul(&q).add(&RatFunc::from_int(2))],
        ]);
        let g = SymBilinear::new(g, 2).unwrap();
        let gamma = levi_civita(&g).unwrap();
        prop_assert!(gamma.is_symmetric());
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!(metricity_defect(&g, &gamma, k, i, j).is_zero());
                }
            }
        }
        prop_assert!(bianchi_defects(&gamma).is_empty());
    }

    #[test]
    fn inverse_of_constant_symplectic_form_is_poisson(a in -4i64..5, b in -4i64..5, c in 1i64..5, d in -4i64..5, e in -4i64..5, f in 1i64..5) {
        let i = RatFunc::from_int;
        let w = Matrix::from_rows(vec![
            vec![i(0), i(c), i(a), i(b)],
            vec![i(-c), i(0), i(d), i(e)],
            vec![i(-a), i(-d), i(0), i(f)],
            vec![i(-b), i(-e), i(-f), i(0)],
        ]);
        prop_assume!(!w.det().is_zero());
        let pi = Bivector::new(w.inverse().unwrap(), 4).unwrap();
        prop_assert!(schouten_square(&pi).is_zero());
    }

    #[test]
    fn gamma_l_preserved_when_l_commutes(seed in any::<u64>(), which in 0usize..3) {
        let c = plane();
        let rot = EndoTM(mat(&c, &[&["0", "-1"], &["1", "0"]]));
        let d = match which {
            0 => make_lift(&c, &rot, LiftKind::Generalized).unwrap(),
            1 => make_metric_derivation(&c, Some(&rot), &SymBilinear::new(Matrix::identity(2), 2).unwrap()).unwrap(),
            _ => make_lift(&c, &EndoTM(mat(&c, &[&["x", "0"], &["0", "x"]])), LiftKind::Generalized).unwrap(),
        };
        let commute = check_nijenhuis(&d, NijenhuisMode::Nijenhuis, seed);
        prop_assume!(commute.entry("D_X∘l - l∘D_X").unwrap().passed());
        let mut s = Sampler::new(seed, 2);
        let x = s.vector(2);
        for m in 1..=2 {
            for mu in gamma_l_basis(&d, m) {
                let mu = mu.scale(&s.poly());
                prop_assert!(gamma_l_defect(&d, &mu).is_none());
                prop_assert!(gamma_l_defect(&d, &dual_apply_frames(&d, &x, &mu)).is_none());
            }
        }
    }
}

proptest! {
    #![proptest_config(cases(4))]

    #[test]
    fn twisted_tm_satisfies_courant_axioms(seed in any::<u64>()) {
        let c = space();
        let mut s = Sampler::new(seed, 3);
        let h = Alternating::from_fn(3, 3, |_| s.poly());
        let e = make_twisted_tm(&c, &h).unwrap();
        let rep = check_courant_axioms(&e, seed);
        prop_assert!(rep.passed(), "{}", rep.render_text());
        prop_assert!(anchor_anchor_dual(&e).is_zero());
    }
}

#[test]
fn quadratic_lie_algebra_axioms() {
    let e = make_sl2(&plane());
    assert!(check_courant_axioms(&e, 1).passed());
    assert!(anchor_anchor_dual(&e).is_zero());
}

#[test]
fn c4_on_random_sections() {
    let c = space();
    let e = make_twisted_tm(&c, &Alternating::from_fn(3, 3, |_| c.parse("x*y").unwrap())).unwrap();
    let mut s = Sampler::new(5, 3);
    for _ in 0..4 {
        let (a, b): (Vector, Vector) = (s.vector(6), s.vector(6));
        let sym = vadd(&e.bracket(&a, &b), &e.bracket(&b, &a));
        let d = e.anchor_dual(&cnalg_core::cartan::gradient(3, &e.pair(&a, &b)));
        assert!(is_zero_vec(&vsub(&sym, &d)));
    }
}
