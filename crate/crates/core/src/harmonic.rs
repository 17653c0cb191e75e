//! Harmonic residuals, product residual formulas, subharmonicity of `|p|^2`
//! and the maximum-modulus check.
//!
//! For `p = {a, u}` the harmonic residual is `eps(p) = grad a - rot u`;
//! `p` is harmonic when `eps(p) = 0` and pure harmonic when also `div u = 0`.
//! Residual maxima are taken over the evaluation nodes of the domain (depth
//! `>= 2h`), which keeps one-sided boundary stencils out of grid
//! measurements.

use serde::Serialize;

use crate::axial::AxialElement;
use crate::calculus::{div, dirderiv, grad, laplacian, rot};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::fields::{Backend, QuaternionField, ScalarField, VectorField};

/// Default classification tolerance for polynomial fields.
pub const POLY_TOLERANCE: f64 = 1e-10;

/// Constant `C` in the grid tolerance `C h^2 S`.
pub const GRID_TOLERANCE_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    NotHarmonic,
    Harmonic,
    PureHarmonic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub epsilon_max: f64,
    pub div_max: f64,
    #[serde(rename = "class")]
    pub classification: Classification,
    pub tol: f64,
    pub backend: Backend,
    pub domain: DomainSpec,
}

/// `eps(p) = grad(Re p) - rot(Im p)`.
pub fn residual(p: &QuaternionField) -> VectorField {
    &grad(p.scalar()) - &rot(p.vector())
}

/// Largest second difference of any component, divided by `h^2`, over the
/// evaluation nodes: the scale `S` in the grid tolerance.
pub fn second_difference_scale(p: &QuaternionField) -> f64 {
    std::iter::once(p.scalar())
        .chain(p.vector().components().iter())
        .map(scalar_second_difference_scale)
        .fold(0.0, f64::max)
}

/// [`second_difference_scale`] for a single scalar field.
pub fn scalar_second_difference_scale(f: &ScalarField) -> f64 {
    let domain = f.domain();
    let h2 = domain.h() * domain.h();
    let v = f.node_values();
    let mut scale: f64 = 0.0;
    for n in domain.evaluation_nodes() {
        for axis in 0..3 {
            if let (Some(a), Some(b)) = (domain.neighbor(n, axis, -1), domain.neighbor(n, axis, 1)) {
                scale = scale.max((v[a] - 2.0 * v[n] + v[b]).abs() / h2);
            }
        }
    }
    scale
}

/// `POLY_TOLERANCE` for polynomial fields, `C h^2 max(S, 1)` for grid fields.
pub fn default_tolerance(p: &QuaternionField) -> f64 {
    match p.backend() {
        Backend::Polynomial => POLY_TOLERANCE,
        Backend::Grid => {
            let h = p.domain().h();
            GRID_TOLERANCE_FACTOR * h * h * second_difference_scale(p).max(1.0)
        }
    }
}

pub fn classify(p: &QuaternionField, tol: f64) -> ResidualReport {
    let nodes = p.domain().evaluation_nodes();
    let epsilon_max = residual(p).max_norm_on(&nodes);
    let div_max = div(p.vector()).max_abs_on(&nodes);
    let classification = if epsilon_max > tol {
        Classification::NotHarmonic
    } else if div_max > tol {
        Classification::Harmonic
    } else {
        Classification::PureHarmonic
    };
    ResidualReport {
        epsilon_max,
        div_max,
        classification,
        tol,
        backend: p.backend(),
        domain: p.domain().spec().clone(),
    }
}

pub fn classify_default(p: &QuaternionField) -> ResidualReport {
    classify(p, default_tolerance(p))
}

/// Harmonic residual and divergence of the vector part of `pq`, computed
/// directly from the product.
pub fn direct_product_residual(p: &QuaternionField, q: &QuaternionField) -> Result<(VectorField, ScalarField)> {
    let pq = p.pointwise_product(q)?;
    Ok((residual(&pq), div(pq.vector())))
}

/// Right-hand sides expressing `eps(pq)` and `div Im(pq)` through the
/// factors:
///
/// ```text
/// eps(pq)     = b eps(p) + a eps(q) + v ^ eps(p) + u ^ eps(q) + (div u) v - (div v) u - 2 (v.grad) u
/// div Im(pq)  = a div v + b div u + u . eps(q) + v . eps(p) + 2 v . rot u
/// ```
///
/// for `p = {a, u}`, `q = {b, v}`.
pub fn residual_product_general(p: &QuaternionField, q: &QuaternionField) -> Result<(VectorField, ScalarField)> {
    check(p, q)?;
    let (a, u) = (p.scalar(), p.vector());
    let (b, v) = (q.scalar(), q.vector());
    let (eps_p, eps_q) = (residual(p), residual(q));
    let (div_u, div_v) = (div(u), div(v));

    let eps = eps_p
        .try_mul_scalar(b)?
        .try_add(&eps_q.try_mul_scalar(a)?)?
        .try_add(&v.try_wedge(&eps_p)?)?
        .try_add(&u.try_wedge(&eps_q)?)?
        .try_add(&v.try_mul_scalar(&div_u)?)?
        .try_sub(&u.try_mul_scalar(&div_v)?)?
        .try_sub(&dirderiv(v, u).scale(2.0))?;
    let divergence = a
        .try_mul(&div_v)?
        .try_add(&b.try_mul(&div_u)?)?
        .try_add(&u.try_dot(&eps_q)?)?
        .try_add(&v.try_dot(&eps_p)?)?
        .try_add(&v.try_dot(&rot(u))?.scale(2.0))?;
    Ok((eps, divergence))
}

/// The harmonic-factor forms: `(div u) v - (div v) u - 2 (v.grad) u` and
/// `a div v + b div u + 2 v . rot u`.
pub fn residual_product_harmonic(p: &QuaternionField, q: &QuaternionField) -> Result<(VectorField, ScalarField)> {
    check(p, q)?;
    let (a, u) = (p.scalar(), p.vector());
    let (b, v) = (q.scalar(), q.vector());
    let (div_u, div_v) = (div(u), div(v));
    let eps = v
        .try_mul_scalar(&div_u)?
        .try_sub(&u.try_mul_scalar(&div_v)?)?
        .try_sub(&dirderiv(v, u).scale(2.0))?;
    let divergence = a
        .try_mul(&div_v)?
        .try_add(&b.try_mul(&div_u)?)?
        .try_add(&v.try_dot(&rot(u))?.scale(2.0))?;
    Ok((eps, divergence))
}

/// Pure-harmonic forms `eps(pq) = -2 (v.grad) u`, `div Im(pq) = 2 v . rot u`.
///
/// Both factors must classify as pure harmonic at their default tolerance.
pub fn residual_product_pure(p: &QuaternionField, q: &QuaternionField) -> Result<(VectorField, ScalarField)> {
    check(p, q)?;
    for (name, f) in [("p", p), ("q", q)] {
        let report = classify_default(f);
        if report.classification != Classification::PureHarmonic {
            return Err(Error::Precondition(format!(
                "argument {name} is not pure harmonic (eps max {:e}, div max {:e})",
                report.epsilon_max, report.div_max
            )));
        }
    }
    Ok(pure_forms(p, q))
}

pub(crate) fn pure_forms(p: &QuaternionField, q: &QuaternionField) -> (VectorField, ScalarField) {
    let (u, v) = (p.vector(), q.vector());
    (dirderiv(v, u).scale(-2.0), v.try_dot(&rot(u)).expect("checked").scale(2.0))
}

fn check(p: &QuaternionField, q: &QuaternionField) -> Result<()> {
    if p.compatible(q) {
        Ok(())
    } else {
        Err(Error::BackendMismatch)
    }
}

/// `laplacian(|p|^2)` for a validated axial element.
pub fn modulus_squared_laplacian(element: &AxialElement, tol: f64) -> Result<ScalarField> {
    let validation = element.validate(tol);
    if !validation.pass {
        return Err(Error::Precondition(format!(
            "element fails the axial structure checks: {}",
            validation.failures().join(", ")
        )));
    }
    Ok(laplacian(&element.field().modulus_squared()?))
}

/// Tolerance for `|laplacian(|p|^2) - 2 (|grad phi|^2 + |rot h|^2)|`: zero
/// on the polynomial backend, `C h^2 max(S, 1)` with `S` the
/// second-difference scale of `|p|^2` on the grid.
pub fn subharmonic_mismatch_tolerance(element: &AxialElement) -> Result<f64> {
    let p = element.field();
    Ok(match p.backend() {
        Backend::Polynomial => 0.0,
        Backend::Grid => {
            let h = p.domain().h();
            GRID_TOLERANCE_FACTOR * h * h * scalar_second_difference_scale(&p.modulus_squared()?).max(1.0)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubharmonicReport {
    /// Minimum of `laplacian(|p|^2)` over the evaluation nodes.
    pub min_laplacian: f64,
    /// Max of `|laplacian(|p|^2) - 2 (|grad phi|^2 + |rot h|^2)|` over the evaluation nodes.
    pub max_mismatch: f64,
    pub tolerance: f64,
    /// True when the two sides agree identically (polynomial backend).
    pub exact: bool,
    pub pass: bool,
}

/// Checks `laplacian(|p|^2) = 2 (|grad phi|^2 + |rot h|^2) >= 0` for an axial element.
///
/// `tol` gates the structure validation and the lower bound; `mismatch_tol`
/// bounds the disagreement between the two sides.
pub fn subharmonicity(element: &AxialElement, tol: f64, mismatch_tol: f64) -> Result<SubharmonicReport> {
    let lap = modulus_squared_laplacian(element, tol)?;
    let p = element.field();
    let g = grad(p.scalar());
    let r = rot(p.vector());
    let rhs = g.try_dot(&g)?.try_add(&r.try_dot(&r)?)?.scale(2.0);
    let diff = lap.try_sub(&rhs)?;
    let nodes = p.domain().evaluation_nodes();
    let min_laplacian = lap.min_on(&nodes);
    let max_mismatch = diff.max_abs_on(&nodes);
    Ok(SubharmonicReport {
        min_laplacian,
        max_mismatch,
        tolerance: mismatch_tol,
        exact: diff.is_identically_zero(),
        pass: min_laplacian >= -tol && max_mismatch <= mismatch_tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxModulusReport {
    pub m_interior: f64,
    pub m_boundary: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares the largest modulus over interior nodes with the largest over
/// boundary nodes; passes iff `M_int <= M_bd + tol`.
pub fn max_modulus_check(p: &QuaternionField, tol: f64) -> MaxModulusReport {
    let domain = p.domain();
    let values = p.node_values();
    let (mut m_interior, mut m_boundary) = (0.0f64, 0.0f64);
    for (n, q) in values.iter().enumerate() {
        let m = q.modulus();
        if domain.is_boundary(n) {
            m_boundary = m_boundary.max(m);
        } else {
            m_interior = m_interior.max(m);
        }
    }
    MaxModulusReport { m_interior, m_boundary, tol, pass: m_interior <= m_boundary + tol }
}
