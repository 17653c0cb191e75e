// Cross-module invariants over seeded and proptest-generated inputs.

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use qharm::axial::{algebra_mul, build_planar, AnalyticGenerator};
use qharm::calculus::f1_residuals;
use qharm::ensemble::{prng, random_harmonic, random_planar_element, random_scalar, random_vector};
use qharm::harmonic::{classify, Classification};
use qharm::spectrum::{h_action, multiplicativity_check, reconcile, DiracFunctional, DiracMixture, GeneratorPanel, HFunctional};
use qharm::{Domain, DomainSpec, Quaternion};

fn domain() -> Arc<Domain> {
    static D: OnceLock<Arc<Domain>> = OnceLock::new();
    D.get_or_init(|| Arc::new(Domain::new(DomainSpec::unit_ball(0.2)).unwrap())).clone()
}

fn quaternion() -> impl Strategy<Value = Quaternion> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c, d)| Quaternion::new(a, [b, c, d]))
}

fn interior_point() -> impl Strategy<Value = [f64; 3]> {
    (-0.57..0.57f64, -0.57..0.57f64, -0.57..0.57f64).prop_map(|(a, b, c)| [a, b, c])
}

fn generator() -> impl Strategy<Value = AnalyticGenerator> {
    prop::collection::vec((-8i32..=8, -8i32..=8), 1..4)
        .prop_map(|c| AnalyticGenerator::new(&c.iter().map(|&(a, b)| [a as f64 / 4.0, b as f64 / 4.0]).collect::<Vec<_>>()))
}

fn axis() -> impl Strategy<Value = [f64; 3]> {
    prop::sample::select(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [0.0, -1.0, 0.0]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn f1_identities_exact(seed in any::<u64>()) {
        let d = domain();
        let mut rng = prng(seed);
        let (u, v) = (random_vector(&mut rng, &d, 3).unwrap(), random_vector(&mut rng, &d, 3).unwrap());
        let (a, b) = (random_scalar(&mut rng, &d, 3).unwrap(), random_scalar(&mut rng, &d, 3).unwrap());
        for (name, r) in f1_residuals(&u, &v, &a, &b).unwrap() {
            prop_assert!(r.is_identically_zero(), "{}", name);
        }
    }

    #[test]
    fn h_module_laws(a in quaternion(), b in quaternion(), seed in any::<u64>()) {
        let d = domain();
        let mut rng = prng(seed);
        let p = random_harmonic(&mut rng, &d, true).unwrap();
        let q = random_harmonic(&mut rng, &d, true).unwrap();
        // Exact: (ab)p = a(bp) and a(p + q) = ap + aq.
        let ab = Quaternion::new(0.0, [0.0; 3]).to_exact() + a.to_exact() * b.to_exact();
        let lhs = h_action(&a, &h_action(&b, &p));
        let rhs = qharm::QuaternionField::constant_poly(&d, &ab).pointwise_product(&p).unwrap();
        prop_assert_eq!(lhs, rhs);
        let sum = p.try_add(&q).unwrap();
        prop_assert_eq!(h_action(&a, &sum), h_action(&a, &p).try_add(&h_action(&a, &q)).unwrap());
        prop_assert_eq!(classify(&h_action(&a, &p), 0.0).classification, Classification::PureHarmonic);
    }

    #[test]
    fn dirac_is_h_linear(a in quaternion(), m in interior_point(), seed in any::<u64>()) {
        let d = domain();
        let p = random_harmonic(&mut prng(seed), &d, true).unwrap();
        let theta = DiracFunctional::at(m);
        let lhs = theta.apply(&h_action(&a, &p)).unwrap();
        let rhs = a * theta.apply(&p).unwrap();
        let scale = 1.0 + a.modulus() * theta.apply(&p).unwrap().modulus();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * scale);
    }

    #[test]
    fn same_axis_products_stay_in_the_algebra(omega in axis(), f in generator(), g in generator()) {
        let d = domain();
        let p = build_planar(omega, &f, &d).unwrap();
        let q = build_planar(omega, &g, &d).unwrap();
        let pq = algebra_mul(&p, &q).unwrap();
        prop_assert!(pq.validate(0.0).pass);
        prop_assert_eq!(pq.field(), &p.field().pointwise_product(q.field()).unwrap());
        let qp = algebra_mul(&q, &p).unwrap();
        prop_assert_eq!(pq.field(), qp.field());
    }

    #[test]
    fn recovery_round_trip(m in interior_point()) {
        let d = domain();
        let panel = GeneratorPanel::standard(&d).unwrap();
        let r = reconcile(&panel.forward(&DiracFunctional::at(m)).unwrap(), &panel);
        prop_assert_eq!(r.point, m);
        prop_assert_eq!(r.inconsistency, 0.0);
    }

    #[test]
    fn mixtures_fail_multiplicativity(m1 in interior_point(), m2 in interior_point()) {
        let sep = (m1[0] - m2[0]).hypot(m1[1] - m2[1]);
        prop_assume!(sep >= 0.1);
        let d = domain();
        let z = build_planar([0.0, 0.0, 1.0], &AnalyticGenerator::power(1), &d).unwrap();
        let r = multiplicativity_check(&DiracMixture::average(m1, m2), &[(z.clone(), z)], 0.0).unwrap();
        prop_assert!((r.max_residual - sep * sep / 4.0).abs() <= 1e-12);
    }
}

#[test]
fn evaluation_inequality_and_totality() {
    let d = domain();
    let mut rng = prng(99);
    for _ in 0..20 {
        let e = random_planar_element(&mut rng, &d, 3).unwrap();
        let p = e.field();
        let sup = p.sup_norm().value;
        let mut best = 0.0f64;
        for &m in d.points() {
            let v = DiracFunctional::at(m).apply(p).unwrap().modulus();
            assert!(v <= sup * (1.0 + 1e-12));
            best = best.max(v);
        }
        if !p.is_identically_zero() {
            assert!(best > 0.0);
        }
    }
}
