// A radial axial algebra on the grid and its second-order convergence.

use std::sync::Arc;

use qharm::axial::{algebra_mul, build_radial, AnalyticGenerator};
use qharm::harmonic::{classify, residual};
use qharm::{Domain, DomainSpec};

fn main() {
    let f = AnalyticGenerator::power(1);
    for h in [0.05, 0.025] {
        let d = Arc::new(Domain::new(DomainSpec::ball([0.0, 0.0, 2.0], 0.5, h)).unwrap());
        let p = build_radial([0.0; 3], &f, &d).unwrap();
        let eps = residual(p.field()).max_norm_on(&d.nodes_at_depth(0.1));
        let v = p.validate(p.default_tolerance());
        println!("h = {h}: eps max {eps:.3e}, validation {} ({:?})", v.pass, v.classification);
        if h == 0.05 {
            let p2 = algebra_mul(&p, &p).unwrap();
            let v = p2.validate(p2.default_tolerance());
            let r = classify(p2.field(), 0.0);
            let law = v.check("div_im_is_2psi_over_r").unwrap().max_residual;
            println!("  zeta^2 element: valid {}, div max {:.3e}, |div - 2 psi / r| max {law:.3e}", v.pass, r.div_max);
        }
    }
    let d = Arc::new(Domain::new(DomainSpec::ball([0.0, 0.0, 2.0], 0.5, 0.05)).unwrap());
    match build_radial([0.0, 0.0, 2.2], &f, &d) {
        Err(e) => println!("pole inside the domain: {e}"),
        Ok(_) => unreachable!(),
    }
}
