// Dirac functionals: unit norm, multiplicativity and recovery of the point.

use std::sync::Arc;

use qharm::spectrum::{
    functional_norm, multiplicativity_check, recover_point, DiracFunctional, DiracMixture, GeneratorPanel,
};
use qharm::{Domain, DomainSpec};

fn main() {
    let d = Arc::new(Domain::new(DomainSpec::unit_ball(0.1)).unwrap());
    let panel = GeneratorPanel::standard(&d).unwrap();
    let probes = panel.probes().unwrap();
    let pairs = panel.algebra_pairs().unwrap();

    let theta = DiracFunctional::at([0.3, -0.2, 0.5]);
    let norm = functional_norm(&theta, &probes).unwrap();
    let mult = multiplicativity_check(&theta, &pairs, 0.0).unwrap();
    let rec = recover_point(&panel.forward(&theta).unwrap(), &panel, 1e-12).unwrap();
    println!("dirac at {:?}: norm {norm}, multiplicative {}, recovered {:?}", theta.m, mult.pass, rec.point);

    let mixture = DiracMixture::average([0.5, 0.0, 0.0], [0.0, 0.5, 0.0]);
    let norm = functional_norm(&mixture, &probes).unwrap();
    let mult = multiplicativity_check(&mixture, &pairs, 1e-12).unwrap();
    println!("average of two diracs: norm {norm}, multiplicative {} (residual {:.4})", mult.pass, mult.max_residual);
}
