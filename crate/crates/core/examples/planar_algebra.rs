// A planar axial algebra: elements from analytic generators, validation and closure.

use std::sync::Arc;

use qharm::axial::{algebra_mul, build_planar, AnalyticGenerator};
use qharm::{Domain, DomainSpec};

fn main() {
    let d = Arc::new(Domain::new(DomainSpec::unit_ball(0.1)).unwrap());
    let omega = [0.0, 0.6, 0.8];
    let z = build_planar(omega, &AnalyticGenerator::power(1), &d).unwrap();
    let g = build_planar(omega, &AnalyticGenerator::new(&[[1.0, 0.0], [0.0, 0.5], [0.25, 0.0]]), &d).unwrap();

    for (name, e) in [("z", &z), ("1 + i z/2 + z^2/4", &g)] {
        let v = e.validate(1e-12);
        println!("{name}: valid {} ({:?})", v.pass, v.classification);
    }

    let zg = algebra_mul(&z, &g).unwrap();
    let gz = algebra_mul(&g, &z).unwrap();
    println!("commutative: {}", zg.field() == gz.field());
    println!("product generator: {:?}", zg.generator().coeffs_f64());
    println!("product valid: {}", zg.validate(1e-12).pass);
    let pointwise = z.field().pointwise_product(g.field()).unwrap();
    let gap = zg.field().try_sub(&pointwise).unwrap();
    println!("equals pointwise product up to {:e}", gap.sup_norm().value);
}
