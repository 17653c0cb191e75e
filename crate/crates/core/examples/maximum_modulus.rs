// Maximum modulus and subharmonicity of |p|^2 for planar elements on a grid.

use std::sync::Arc;

use qharm::ensemble::{prng, random_planar_element};
use qharm::experiments::bump_fixture;
use qharm::harmonic::{max_modulus_check, subharmonic_mismatch_tolerance, subharmonicity};
use qharm::{Domain, DomainSpec};

fn main() {
    let d = Arc::new(Domain::new(DomainSpec::unit_ball(0.05)).unwrap());
    let slack = 10.0 * d.h();
    let mut rng = prng(7);
    for i in 0..5 {
        let e = random_planar_element(&mut rng, &d, 2).unwrap().sample();
        let m = max_modulus_check(e.field(), slack);
        let s = subharmonicity(&e, 1e-8, subharmonic_mismatch_tolerance(&e).unwrap()).unwrap();
        println!(
            "element {i}: M_int {:.4} M_bd {:.4} pass {}; min lap|p|^2 {:.3e}, mismatch {:.2e}",
            m.m_interior, m.m_boundary, m.pass, s.min_laplacian, s.max_mismatch
        );
    }
    let bump = bump_fixture(&d).unwrap().sample();
    let m = max_modulus_check(&bump, slack);
    println!("bump: M_int {:.4} M_bd {:.4} pass {} (expected false)", m.m_interior, m.m_boundary, m.pass);
}
