// Harmonic residuals, product residual formulas and a product leaving Q.

use std::sync::Arc;

use qharm::axial::{build_planar, AnalyticGenerator};
use qharm::harmonic::{classify, direct_product_residual, residual, residual_product_pure};
use qharm::{Domain, DomainSpec};

fn main() {
    let d = Arc::new(Domain::new(DomainSpec::unit_ball(0.1)).unwrap());
    let p = build_planar([0.0, 0.0, 1.0], &AnalyticGenerator::power(2), &d).unwrap();
    let q = build_planar([1.0, 0.0, 0.0], &AnalyticGenerator::power(1), &d).unwrap();
    for (name, f) in [("p", p.field()), ("q", q.field())] {
        let r = classify(f, 0.0);
        println!("{name}: {:?} (eps {:e}, div {:e})", r.classification, r.epsilon_max, r.div_max);
    }

    let pq = p.field().pointwise_product(q.field()).unwrap();
    let eps = residual(&pq);
    println!("eps(pq) = ({}, {}, {})", fmt(&eps, 0), fmt(&eps, 1), fmt(&eps, 2));
    println!("pq classifies as {:?}", classify(&pq, 1e-10).classification);

    // For pure harmonic factors eps(pq) = -2 (v.grad) u.
    let (formula, _) = residual_product_pure(p.field(), q.field()).unwrap();
    let (direct, _) = direct_product_residual(p.field(), q.field()).unwrap();
    println!("pure formula matches direct computation: {}", formula == direct);
}

fn fmt(v: &qharm::VectorField, i: usize) -> String {
    v.component(i).as_poly().map(|p| p.to_string()).unwrap_or_default()
}
