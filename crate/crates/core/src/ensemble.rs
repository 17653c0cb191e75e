//! Seeded random ensembles.
//!
//! All randomness comes from ChaCha8 seeded with a 64-bit integer
//! (`rand_chacha::ChaCha8Rng::seed_from_u64`). Coefficients are small
//! dyadic or integer rationals so that polynomial fields are exact and
//! their `f64` images are exactly representable.

use std::sync::Arc;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::axial::{build_planar, build_planar_with_frame, AnalyticGenerator, AxialElement, PlanarFrame};
use crate::domain::{Domain, Shape};
use crate::error::Result;
use crate::fields::{QuaternionField, ScalarField, VectorField};
use crate::poly::Poly;
use crate::quaternion::{norm3, Quaternion};

pub type Prng = ChaCha8Rng;

pub fn prng(seed: u64) -> Prng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n / d` with `n` in `[-4, 4]` and `d` in `{1, 2, 4}`.
pub fn random_rational(rng: &mut Prng) -> BigRational {
    let n: i64 = rng.random_range(-4..=4);
    let d: i64 = [1, 2, 4][rng.random_range(0..3)];
    BigRational::new(n.into(), d.into())
}

/// Each monomial of total degree `<= degree` is present with probability 1/2.
pub fn random_poly(rng: &mut Prng, degree: u32) -> Poly {
    let mut terms = Vec::new();
    for d in 0..=degree {
        for i in 0..=d {
            for j in 0..=(d - i) {
                if rng.random_bool(0.5) {
                    terms.push((random_rational(rng), [i, j, d - i - j]));
                }
            }
        }
    }
    Poly::from_terms(terms)
}

pub fn random_scalar(rng: &mut Prng, domain: &Arc<Domain>, degree: u32) -> Result<ScalarField> {
    ScalarField::from_poly(domain, random_poly(rng, degree))
}

pub fn random_vector(rng: &mut Prng, domain: &Arc<Domain>, degree: u32) -> Result<VectorField> {
    let polys = [random_poly(rng, degree), random_poly(rng, degree), random_poly(rng, degree)];
    VectorField::from_polys(domain, polys)
}

pub fn random_quaternion_field(rng: &mut Prng, domain: &Arc<Domain>, degree: u32) -> Result<QuaternionField> {
    let s = random_poly(rng, degree);
    let v = [random_poly(rng, degree), random_poly(rng, degree), random_poly(rng, degree)];
    QuaternionField::from_polys(domain, s, v)
}

/// Components uniform in `[-1, 1)`.
pub fn random_quaternion(rng: &mut Prng) -> Quaternion {
    let mut c = || rng.random_range(-1.0..1.0);
    Quaternion::new(c(), [c(), c(), c()])
}

/// Uniform direction on the unit sphere by rejection from the cube.
pub fn random_unit(rng: &mut Prng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = norm3(&v);
        if n > 0.1 && n <= 1.0 {
            return v.map(|c| c / n);
        }
    }
}

/// Uniform point in the open ball of radius `r` about `center`.
pub fn random_point_in_ball(rng: &mut Prng, center: [f64; 3], r: f64) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if norm3(&v) < 1.0 {
            return std::array::from_fn(|i| center[i] + r * v[i]);
        }
    }
}

/// Uniform point in the open interior of the domain's shape.
pub fn random_interior_point(rng: &mut Prng, domain: &Domain) -> [f64; 3] {
    match domain.shape() {
        Shape::Ball { center, radius } => random_point_in_ball(rng, *center, *radius),
        Shape::Box { min, max } => loop {
            let x: [f64; 3] = std::array::from_fn(|i| rng.random_range(min[i]..max[i]));
            if (0..3).all(|i| x[i] > min[i]) {
                return x;
            }
        },
    }
}

/// Exact orthonormal frame from the rotation of a random integer quaternion.
pub fn random_rational_frame(rng: &mut Prng) -> PlanarFrame {
    let q: [i64; 4] = loop {
        let q: [i64; 4] = std::array::from_fn(|_| rng.random_range(-4..=4));
        if q.iter().any(|c| *c != 0) {
            break q;
        }
    };
    let [w, x, y, z] = q;
    let n = w * w + x * x + y * y + z * z;
    let r = |v: i64| BigRational::new(v.into(), n.into());
    // Columns of the rotation matrix of q.
    let c1 = [r(w * w + x * x - y * y - z * z), r(2 * (x * y + w * z)), r(2 * (x * z - w * y))];
    let c3 = [r(2 * (x * z + w * y)), r(2 * (y * z - w * x)), r(w * w - x * x - y * y + z * z)];
    PlanarFrame::from_rational(c1, c3).expect("rotation columns are orthonormal")
}

/// Generator of degree `<= degree` with coefficient parts `k/8` in `[-bound, bound]`.
pub fn random_generator(rng: &mut Prng, degree: usize, bound: f64) -> AnalyticGenerator {
    let steps = (bound * 8.0).floor() as i64;
    let mut part = || rng.random_range(-steps..=steps) as f64 / 8.0;
    let coeffs: Vec<[f64; 2]> = (0..=degree).map(|_| [part(), part()]).collect();
    AnalyticGenerator::new(&coeffs)
}

/// Planar element on an exact random frame, generator degree `<= degree`,
/// coefficient parts in `[-1, 1]`.
pub fn random_planar_element(rng: &mut Prng, domain: &Arc<Domain>, degree: usize) -> Result<AxialElement> {
    let frame = random_rational_frame(rng);
    let g = random_generator(rng, degree, 1.0);
    build_planar_with_frame(frame, &g, domain)
}

const STANDARD_AXES: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Harmonic polynomial field: planar elements on the standard axes plus a
/// gradient part `{c, grad chi}`. With `pure`, `chi` is itself harmonic
/// and the result is pure harmonic; otherwise `chi` is a random cubic.
pub fn random_harmonic(rng: &mut Prng, domain: &Arc<Domain>, pure: bool) -> Result<QuaternionField> {
    let mut acc = QuaternionField::from_polys(domain, Poly::zero(), [Poly::zero(), Poly::zero(), Poly::zero()])?;
    for omega in STANDARD_AXES {
        if rng.random_bool(0.7) {
            let g = random_generator(rng, 3, 1.0);
            acc = acc.try_add(build_planar(omega, &g, domain)?.field())?;
        }
    }
    let chi = if pure {
        let omega = STANDARD_AXES[rng.random_range(0..3)];
        let g = random_generator(rng, 3, 1.0);
        build_planar(omega, &g, domain)?.phi().as_poly().cloned().unwrap_or_else(Poly::zero)
    } else {
        random_poly(rng, 3)
    };
    let c = Poly::constant(random_rational(rng));
    let grad_chi = [chi.deriv(0), chi.deriv(1), chi.deriv(2)];
    acc.try_add(&QuaternionField::from_polys(domain, c, grad_chi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::harmonic::{classify, Classification};

    fn ball() -> Arc<Domain> {
        Arc::new(Domain::new(DomainSpec::unit_ball(0.25)).unwrap())
    }

    #[test]
    fn same_seed_same_draws() {
        let (mut a, mut b) = (prng(7), prng(7));
        assert_eq!(random_poly(&mut a, 3), random_poly(&mut b, 3));
        assert_eq!(random_quaternion(&mut a), random_quaternion(&mut b));
        assert_ne!(random_poly(&mut prng(1), 3), random_poly(&mut prng(2), 3));
    }

    #[test]
    fn harmonic_ensembles_classify() {
        let d = ball();
        let mut rng = prng(3);
        for _ in 0..10 {
            let h = random_harmonic(&mut rng, &d, false).unwrap();
            assert!(classify(&h, 0.0).classification >= Classification::Harmonic);
            let p = random_harmonic(&mut rng, &d, true).unwrap();
            assert_eq!(classify(&p, 0.0).classification, Classification::PureHarmonic);
        }
    }

    #[test]
    fn rational_frames_validate_exactly() {
        let d = ball();
        let mut rng = prng(11);
        for _ in 0..5 {
            let el = random_planar_element(&mut rng, &d, 3).unwrap();
            let v = el.validate(0.0);
            assert!(v.pass, "{:?}", v.failures());
        }
    }

    #[test]
    fn sphere_and_ball_draws() {
        let mut rng = prng(5);
        for _ in 0..100 {
            assert!((norm3(&random_unit(&mut rng)) - 1.0).abs() < 1e-15);
            assert!(norm3(&random_point_in_ball(&mut rng, [0.0; 3], 1.0)) < 1.0);
        }
        let g = random_generator(&mut rng, 2, 1.0);
        assert!(g.coeffs_f64().iter().flatten().all(|c| c.abs() <= 1.0 && (c * 8.0).fract() == 0.0));
    }
}
