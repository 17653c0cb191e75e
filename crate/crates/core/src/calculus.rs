//! Flat-space vector calculus on fields: gradient, divergence, rotor,
//! Laplacian, directional derivative and the pointwise products, plus the
//! six product-rule identities relating them.
//!
//! Polynomial fields are differentiated exactly. Grid fields use centred
//! second-order differences, switching to one-sided second-order stencils
//! where a neighbour is missing.

use serde::Serialize;

use crate::error::Result;
use crate::fields::{ScalarField, VectorField};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Stencil {
    #[default]
    CenteredSecondOrder,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum BoundaryScheme {
    #[default]
    OneSidedSecondOrder,
    OneSidedFirstOrder,
}

/// Discretisation used by the grid backend. The spacing comes from the
/// field's domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiffOperatorConfig {
    pub stencil: Stencil,
    pub boundary_scheme: BoundaryScheme,
}

/// Partial derivative along `axis` with the default discretisation.
pub fn partial(f: &ScalarField, axis: usize) -> ScalarField {
    partial_with(f, axis, &DiffOperatorConfig::default())
}

pub fn partial_with(f: &ScalarField, axis: usize, cfg: &DiffOperatorConfig) -> ScalarField {
    if let Some(p) = f.as_poly() {
        return ScalarField::poly_unchecked(f.domain(), p.deriv(axis));
    }
    let domain = f.domain();
    let v = f.values().expect("grid field");
    let h = domain.h();
    let second_order = cfg.boundary_scheme == BoundaryScheme::OneSidedSecondOrder;
    let out = (0..domain.node_count())
        .map(|n| {
            let fwd = domain.neighbor(n, axis, 1);
            let bwd = domain.neighbor(n, axis, -1);
            match (bwd, fwd) {
                (Some(m), Some(p)) => (v[p] - v[m]) / (2.0 * h),
                (None, Some(p)) => match domain.neighbor(p, axis, 1) {
                    Some(pp) if second_order => (-3.0 * v[n] + 4.0 * v[p] - v[pp]) / (2.0 * h),
                    _ => (v[p] - v[n]) / h,
                },
                (Some(m), None) => match domain.neighbor(m, axis, -1) {
                    Some(mm) if second_order => (3.0 * v[n] - 4.0 * v[m] + v[mm]) / (2.0 * h),
                    _ => (v[n] - v[m]) / h,
                },
                // Isolated along this axis: no information, derivative taken as 0.
                (None, None) => 0.0,
            }
        })
        .collect();
    ScalarField::from_values(domain, out).expect("node count preserved")
}

pub fn grad(f: &ScalarField) -> VectorField {
    VectorField::new_unchecked([partial(f, 0), partial(f, 1), partial(f, 2)])
}

pub fn div(u: &VectorField) -> ScalarField {
    let [a, b, c] = u.components();
    &(&partial(a, 0) + &partial(b, 1)) + &partial(c, 2)
}

/// Right-handed curl `(d2 u3 - d3 u2, d3 u1 - d1 u3, d1 u2 - d2 u1)`.
pub fn rot(u: &VectorField) -> VectorField {
    let [a, b, c] = u.components();
    VectorField::new_unchecked([
        &partial(c, 1) - &partial(b, 2),
        &partial(a, 2) - &partial(c, 0),
        &partial(b, 0) - &partial(a, 1),
    ])
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    div(&grad(f))
}

/// `(v . grad) u`, componentwise.
pub fn dirderiv(v: &VectorField, u: &VectorField) -> VectorField {
    let comps = u.components();
    VectorField::new_unchecked(std::array::from_fn(|i| dot(v, &grad(&comps[i]))))
}

pub fn dot(u: &VectorField, v: &VectorField) -> ScalarField {
    u.try_dot(v).expect("incompatible fields")
}

pub fn wedge(u: &VectorField, v: &VectorField) -> VectorField {
    u.try_wedge(v).expect("incompatible fields")
}

/// A scalar or vector residual field.
#[derive(Clone, Debug)]
pub enum Residual {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl Residual {
    pub fn max_on(&self, nodes: &[usize]) -> f64 {
        match self {
            Residual::Scalar(f) => f.max_abs_on(nodes),
            Residual::Vector(u) => u.max_norm_on(nodes),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            Residual::Scalar(f) => f.is_identically_zero(),
            Residual::Vector(u) => u.is_identically_zero(),
        }
    }
}

pub const F1_NAMES: [&str; 6] = [
    "grad_product",
    "grad_dot",
    "rot_scalar_vector",
    "rot_wedge",
    "div_wedge",
    "div_scalar_vector",
];

/// `lhs - rhs` for each of the six product-rule identities, in [`F1_NAMES`] order.
pub fn f1_residuals(
    u: &VectorField,
    v: &VectorField,
    a: &ScalarField,
    b: &ScalarField,
) -> Result<Vec<(&'static str, Residual)>> {
    // grad(ab) = b grad a + a grad b
    let grad_product = grad(&a.try_mul(b)?)
        .try_sub(&grad(a).try_mul_scalar(b)?.try_add(&grad(b).try_mul_scalar(a)?)?)?;

    // grad(u.v) = (v.grad)u + (u.grad)v + v ^ rot u + u ^ rot v
    let rot_u = rot(u);
    let rot_v = rot(v);
    let grad_dot = grad(&u.try_dot(v)?).try_sub(
        &dirderiv(v, u)
            .try_add(&dirderiv(u, v))?
            .try_add(&v.try_wedge(&rot_u)?)?
            .try_add(&u.try_wedge(&rot_v)?)?,
    )?;

    // rot(a v) = grad a ^ v + a rot v
    let rot_scalar_vector =
        rot(&v.try_mul_scalar(a)?).try_sub(&grad(a).try_wedge(v)?.try_add(&rot_v.try_mul_scalar(a)?)?)?;

    // rot(u ^ v) = (v.grad)u - (u.grad)v - (div u) v + (div v) u
    let u_wedge_v = u.try_wedge(v)?;
    let rot_wedge = rot(&u_wedge_v).try_sub(
        &dirderiv(v, u)
            .try_sub(&dirderiv(u, v))?
            .try_sub(&v.try_mul_scalar(&div(u))?)?
            .try_add(&u.try_mul_scalar(&div(v))?)?,
    )?;

    // div(u ^ v) = v . rot u - u . rot v
    let div_wedge = div(&u_wedge_v).try_sub(&v.try_dot(&rot_u)?.try_sub(&u.try_dot(&rot_v)?)?)?;

    // div(a v) = grad a . v + a div v
    let div_scalar_vector =
        div(&v.try_mul_scalar(a)?).try_sub(&grad(a).try_dot(v)?.try_add(&a.try_mul(&div(v))?)?)?;

    Ok(vec![
        (F1_NAMES[0], Residual::Vector(grad_product)),
        (F1_NAMES[1], Residual::Vector(grad_dot)),
        (F1_NAMES[2], Residual::Vector(rot_scalar_vector)),
        (F1_NAMES[3], Residual::Vector(rot_wedge)),
        (F1_NAMES[4], Residual::Scalar(div_wedge)),
        (F1_NAMES[5], Residual::Scalar(div_scalar_vector)),
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evaluates the six product-rule identities and reports the largest
/// residual of each over the evaluation nodes (depth `>= 2h`).
pub fn identity_battery_f1(
    u: &VectorField,
    v: &VectorField,
    a: &ScalarField,
    b: &ScalarField,
    tolerance: f64,
) -> Result<Vec<IdentityResidual>> {
    let nodes = u.domain().evaluation_nodes();
    Ok(f1_residuals(u, v, a, b)?
        .into_iter()
        .map(|(name, r)| {
            let max_residual = r.max_on(&nodes);
            IdentityResidual { name: name.to_string(), max_residual, tolerance, pass: max_residual <= tolerance }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_rational::BigRational;

    use super::*;
    use crate::domain::{Domain, DomainSpec};
    use crate::poly::Poly;

    fn cube(h: f64) -> Arc<Domain> {
        Arc::new(Domain::new(DomainSpec::cube(-1.0, 1.0, h)).unwrap())
    }

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    fn s(d: &Arc<Domain>, p: Poly) -> ScalarField {
        ScalarField::from_poly(d, p).unwrap()
    }

    fn vf(d: &Arc<Domain>, p: [Poly; 3]) -> VectorField {
        VectorField::from_polys(d, p).unwrap()
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn gradient_examples() {
        let d = cube(0.1);
        assert_eq!(grad(&s(&d, &x(0) * &x(1))), vf(&d, [x(1), x(0), Poly::zero()]));
        assert!(grad(&s(&d, Poly::from_int(7))).is_identically_zero());

        // Centred differences are exact on quadratics: d/dx1 x1^2 = 0.6 at x1 = 0.3.
        let g = grad(&s(&d, &x(0) * &x(0)).sample());
        let node = (0..d.node_count())
            .find(|&n| {
                let p = d.point(n);
                (p[0] - 0.3).abs() < 1e-12 && p[1].abs() < 1e-12 && p[2].abs() < 1e-12
            })
            .unwrap();
        let val = g.node_values()[node];
        assert!((val[0] - 0.6).abs() < 1e-12 && val[1] == 0.0 && val[2] == 0.0);
    }

    #[test]
    fn divergence_and_rotor_examples() {
        let d = cube(0.1);
        assert_eq!(div(&vf(&d, [x(0), x(1), x(2)])), s(&d, Poly::from_int(3)));
        let u = vf(&d, [&x(1) * &x(2), &x(0) * &x(0), Poly::zero()]);
        assert!(div(&rot(&u)).is_identically_zero());
        assert_eq!(rot(&vf(&d, [Poly::zero(), Poly::zero(), x(1)])), vf(&d, [Poly::one(), Poly::zero(), Poly::zero()]));
        let f = s(&d, &(&x(0) * &x(0)) * &x(2));
        assert!(rot(&grad(&f)).is_identically_zero());
        assert_eq!(
            rot(&vf(&d, [-x(1), x(0), Poly::zero()])),
            vf(&d, [Poly::zero(), Poly::zero(), Poly::from_int(2)])
        );
    }

    #[test]
    fn laplacian_examples() {
        let d = cube(0.1);
        assert!(laplacian(&s(&d, &(&x(0) * &x(0)) - &(&x(1) * &x(1)))).is_identically_zero());
        assert_eq!(laplacian(&s(&d, &x(0) * &x(0))), s(&d, Poly::from_int(2)));
        assert!(laplacian(&s(&d, &(&x(0) * &x(1)) * &x(2))).is_identically_zero());
    }

    #[test]
    fn directional_derivative_examples() {
        let d = cube(0.1);
        let e1 = vf(&d, [Poly::one(), Poly::zero(), Poly::zero()]);
        assert_eq!(dirderiv(&e1, &vf(&d, [x(0), Poly::zero(), Poly::zero()])), e1);
        // (x3 e1 . grad)(2 x1 x2 e3) = 2 x2 x3 e3
        let v = vf(&d, [x(2), Poly::zero(), Poly::zero()]);
        let u = vf(&d, [Poly::zero(), Poly::zero(), (&x(0) * &x(1)).scale(&int(2))]);
        assert_eq!(dirderiv(&v, &u), vf(&d, [Poly::zero(), Poly::zero(), (&x(1) * &x(2)).scale(&int(2))]));
    }

    #[test]
    fn products() {
        let d = cube(0.1);
        let e1 = vf(&d, [Poly::one(), Poly::zero(), Poly::zero()]);
        let e2 = vf(&d, [Poly::zero(), Poly::one(), Poly::zero()]);
        assert_eq!(wedge(&e1, &e2), vf(&d, [Poly::zero(), Poly::zero(), Poly::one()]));
        let u = vf(&d, [x(0), Poly::one(), Poly::zero()]);
        let v = vf(&d, [Poly::zero(), x(1), Poly::one()]);
        assert!(dot(&u, &wedge(&u, &v)).is_identically_zero());
        assert!(wedge(&u, &u).is_identically_zero());
    }

    #[test]
    fn f1_battery_exact_on_worked_fields() {
        let d = cube(0.25);
        let u = vf(&d, [x(1), Poly::zero(), Poly::zero()]);
        let v = vf(&d, [Poly::zero(), x(2), Poly::zero()]);
        let report = identity_battery_f1(&u, &v, &s(&d, x(0)), &s(&d, x(1)), 0.0).unwrap();
        assert_eq!(report.len(), 6);
        assert!(report.iter().all(|r| r.pass && r.max_residual == 0.0), "{report:?}");

        let z = vf(&d, [Poly::zero(), Poly::zero(), Poly::zero()]);
        let report = identity_battery_f1(&z, &z, &s(&d, Poly::zero()), &s(&d, Poly::zero()), 0.0).unwrap();
        assert!(report.iter().all(|r| r.max_residual == 0.0));
    }

    #[test]
    fn one_sided_stencil_is_second_order_exact_on_quadratics() {
        let d = cube(0.1);
        let f = s(&d, &x(0) * &x(0)).sample();
        let g = partial(&f, 0);
        for (n, p) in d.points().iter().enumerate() {
            assert!((g.values().unwrap()[n] - 2.0 * p[0]).abs() < 1e-11, "node {n} at {p:?}");
        }
        let first = partial_with(
            &f,
            0,
            &DiffOperatorConfig { boundary_scheme: BoundaryScheme::OneSidedFirstOrder, ..Default::default() },
        );
        let edge = (0..d.node_count()).find(|&n| d.point(n)[0] == -1.0).unwrap();
        assert!((first.values().unwrap()[edge] + 2.0).abs() > 0.05);
    }

    #[test]
    fn grid_rot_grad_vanishes_in_interior() {
        // Centred difference operators along different axes commute.
        let d = cube(0.1);
        let f = s(&d, &(&(&x(0) * &x(0)) * &(&x(1) * &x(2))) + &(&x(2) * &(&x(2) * &x(2)))).sample();
        let nodes = d.evaluation_nodes();
        assert!(rot(&grad(&f)).max_norm_on(&nodes) < 1e-10);
        let u = vf(&d, [&x(1) * &(&x(2) * &x(2)), &x(0) * &x(0), &x(0) * &(&x(1) * &x(1))]).sample();
        assert!(div(&rot(&u)).max_abs_on(&nodes) < 1e-10);
    }
}
