// The six product-rule identities, exact on polynomials and second order on the grid.

use std::sync::Arc;

use qharm::calculus::identity_battery_f1;
use qharm::ensemble::{prng, random_scalar, random_vector};
use qharm::{Domain, DomainSpec};

fn main() {
    let coarse = Arc::new(Domain::new(DomainSpec::cube(-1.0, 1.0, 0.1)).unwrap());
    let fine = Arc::new(Domain::new(DomainSpec::cube(-1.0, 1.0, 0.05)).unwrap());
    let mut rng = prng(42);
    let (u, v) = (random_vector(&mut rng, &coarse, 3).unwrap(), random_vector(&mut rng, &coarse, 3).unwrap());
    let (a, b) = (random_scalar(&mut rng, &coarse, 3).unwrap(), random_scalar(&mut rng, &coarse, 3).unwrap());

    println!("polynomial backend:");
    for r in identity_battery_f1(&u, &v, &a, &b, 0.0).unwrap() {
        println!("  {:<18} max residual {:e}", r.name, r.max_residual);
        assert!(r.pass);
    }

    let on = |d: &Arc<Domain>| {
        let s = |f: &qharm::ScalarField| f.sample_on(d).unwrap();
        let w = |f: &qharm::VectorField| f.sample_on(d).unwrap();
        identity_battery_f1(&w(&u), &w(&v), &s(&a), &s(&b), f64::INFINITY).unwrap()
    };
    println!("grid backend, h = 0.1 and 0.05 (evaluation nodes of each grid):");
    for (c, f) in on(&coarse).iter().zip(on(&fine)) {
        println!("  {:<18} {:.3e} -> {:.3e}", c.name, c.max_residual, f.max_residual);
    }
}
