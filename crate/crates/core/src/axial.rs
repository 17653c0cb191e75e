//! Commutative axial algebras of harmonic quaternion fields in R^3.
//!
//! An axial element is `p = {phi, psi e}` where `e` is a unit geodesic field
//! (the axis) and `phi + i psi` is an analytic function of a complex
//! coordinate on the surfaces orthogonal to `e`. Two families are built:
//!
//! * planar: `e = omega` constant, `z = x.a + i x.b` for an oriented
//!   orthonormal frame `(a, b, omega)`. Elements are pure harmonic and are
//!   realised exactly as polynomials.
//! * radial: `e = (x - O)/|x - O|`, with `phi + i psi = f(zeta)` where
//!   `zeta` is a stereographic coordinate of the direction `e`. Elements are
//!   harmonic but not pure (`div(psi e) = 2 psi / r`); they are realised on
//!   the grid by closed-form evaluation at the nodes.
//!
//! Within one axis the product is `{phi, psi e}{lam, mu e} =
//! {phi lam - psi mu, (phi mu + psi lam) e}`, which is the product of the
//! generating analytic functions.

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::calculus::{div, dirderiv, grad, laplacian, rot};
use crate::domain::{sub, Domain};
use crate::error::{Error, Result};
use crate::fields::{Backend, QuaternionField, ScalarField, VectorField};
use crate::harmonic::{classify, default_tolerance, residual, Classification};
use crate::poly::Poly;
use crate::quaternion::{cross3, dot3, exact, norm3, to_f64};

/// Tolerance on `|omega| = 1` accepted by [`build_planar`].
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Oriented orthonormal frame `(a, b, omega)` with `b = omega x a`, stored
/// exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarFrame {
    a: [BigRational; 3],
    b: [BigRational; 3],
    omega: [BigRational; 3],
}

impl PlanarFrame {
    /// Frame for a unit axis: `a` is the normalised projection of the first
    /// standard basis vector `k` with `|omega x k| > 1/2` onto the plane
    /// orthogonal to `omega`, and `b = omega x a`.
    ///
    /// For `omega = e3` this gives `a = e1, b = e2`; for `omega = e1` it
    /// gives `a = e2, b = e3`. Axes along signed basis vectors yield exact
    /// frames; other axes carry double-precision rounding.
    pub fn from_axis(omega: [f64; 3]) -> Result<Self> {
        let (a, _) = frame_f64(omega)?;
        let omega_x: [BigRational; 3] = omega.map(exact);
        let a_x: [BigRational; 3] = a.map(exact);
        let b_x = cross3(&omega_x, &a_x);
        Ok(Self { a: a_x, b: b_x, omega: omega_x })
    }

    /// Frame from exact rational `a` and `omega`, which must be exactly
    /// orthonormal.
    pub fn from_rational(a: [BigRational; 3], omega: [BigRational; 3]) -> Result<Self> {
        let one = BigRational::one();
        if dot3(&a, &a) != one || dot3(&omega, &omega) != one || !dot3(&a, &omega).is_zero() {
            return Err(Error::Precondition("rational frame is not orthonormal".into()));
        }
        let b = cross3(&omega, &a);
        Ok(Self { a, b, omega })
    }

    pub fn a(&self) -> [f64; 3] {
        self.a.each_ref().map(to_f64)
    }

    pub fn b(&self) -> [f64; 3] {
        self.b.each_ref().map(to_f64)
    }

    pub fn omega(&self) -> [f64; 3] {
        self.omega.each_ref().map(to_f64)
    }

    pub fn exact_a(&self) -> &[BigRational; 3] {
        &self.a
    }

    pub fn exact_b(&self) -> &[BigRational; 3] {
        &self.b
    }

    pub fn exact_omega(&self) -> &[BigRational; 3] {
        &self.omega
    }
}

/// `(a, b)` in double precision for a unit axis, `b = omega x a`.
fn frame_f64(omega: [f64; 3]) -> Result<([f64; 3], [f64; 3])> {
    let len = norm3(&omega);
    if !len.is_finite() || (len - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NonUnitAxis(len));
    }
    let k = (0..3)
        .map(|j| {
            let mut k = [0.0; 3];
            k[j] = 1.0;
            k
        })
        .find(|k| norm3(&cross3(&omega, k)) > 0.5)
        .expect("some basis vector is far from a unit axis");
    let kw = dot3(&k, &omega);
    let proj: [f64; 3] = std::array::from_fn(|i| k[i] - kw * omega[i]);
    let n = norm3(&proj);
    let a = proj.map(|c| c / n);
    Ok((a, cross3(&omega, &a)))
}

/// Stereographic coordinate on the unit sphere of directions around a pole.
///
/// With `d` the unit direction from the pole to the domain centre and
/// `(a, b, d)` an oriented frame, a direction `s` has coordinate
/// `zeta = (s.a + i s.b) / (1 + s.d)`: projection from the antipode `-d`,
/// orientation-preserving for the outward normal.
#[derive(Clone, Debug, PartialEq)]
pub struct StereoChart {
    pub d: [f64; 3],
    pub a: [f64; 3],
    pub b: [f64; 3],
}

/// Minimum of `1 + s.d` accepted on the domain before the chart counts as singular.
const CHART_MARGIN: f64 = 1e-6;

impl StereoChart {
    pub fn towards(d: [f64; 3]) -> Result<Self> {
        let (a, b) = frame_f64(d)?;
        Ok(Self { d, a, b })
    }

    pub fn zeta(&self, s: &[f64; 3]) -> Complex64 {
        let den = 1.0 + dot3(s, &self.d);
        Complex64::new(dot3(s, &self.a) / den, dot3(s, &self.b) / den)
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq)]
pub enum AxisDescriptor {
    Planar(PlanarFrame),
    Radial { pole: [f64; 3], chart: StereoChart },
}

impl AxisDescriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            AxisDescriptor::Planar(_) => "planar",
            AxisDescriptor::Radial { .. } => "radial",
        }
    }
}

/// Complex polynomial `f(z) = sum c_k z^k` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyticGenerator {
    coeffs: Vec<(BigRational, BigRational)>,
}

impl AnalyticGenerator {
    /// Coefficients `[re, im]` from the constant term up; trailing zeros are stripped.
    pub fn new(coeffs: &[[f64; 2]]) -> Self {
        Self::from_exact(coeffs.iter().map(|c| (exact(c[0]), exact(c[1]))).collect())
    }

    pub fn from_exact(mut coeffs: Vec<(BigRational, BigRational)>) -> Self {
        while coeffs.last().is_some_and(|(re, im)| re.is_zero() && im.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(re: f64, im: f64) -> Self {
        Self::new(&[[re, im]])
    }

    /// `f(z) = z^k`.
    pub fn power(k: usize) -> Self {
        let mut c = vec![[0.0, 0.0]; k + 1];
        c[k] = [1.0, 0.0];
        Self::new(&c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[(BigRational, BigRational)] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<[f64; 2]> {
        self.coeffs.iter().map(|(re, im)| [to_f64(re), to_f64(im)]).collect()
    }

    /// Product of generators.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self { coeffs: Vec::new() };
        }
        let mut out = vec![(BigRational::zero(), BigRational::zero()); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, (ar, ai)) in self.coeffs.iter().enumerate() {
            for (j, (br, bi)) in other.coeffs.iter().enumerate() {
                out[i + j].0 += ar * br - ai * bi;
                out[i + j].1 += ar * bi + ai * br;
            }
        }
        Self::from_exact(out)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (re, im)| acc * z + Complex64::new(to_f64(re), to_f64(im)))
    }

    /// `f(P + iQ)` for polynomial real and imaginary parts, exactly.
    fn eval_poly(&self, re: &Poly, im: &Poly) -> (Poly, Poly) {
        let mut acc = (Poly::zero(), Poly::zero());
        for (cr, ci) in self.coeffs.iter().rev() {
            let next_re = &(&acc.0 * re) - &(&acc.1 * im);
            let next_im = &(&acc.0 * im) + &(&acc.1 * re);
            acc = (&next_re + &Poly::constant(cr.clone()), &next_im + &Poly::constant(ci.clone()));
        }
        acc
    }
}

/// An element `{phi, psi e}` of an axial algebra together with its construction data.
#[derive(Clone, Debug)]
pub struct AxialElement {
    axis: AxisDescriptor,
    generator: AnalyticGenerator,
    phi: ScalarField,
    psi: ScalarField,
    field: QuaternionField,
}

pub fn build_planar(omega: [f64; 3], f: &AnalyticGenerator, domain: &Arc<Domain>) -> Result<AxialElement> {
    build_planar_with_frame(PlanarFrame::from_axis(omega)?, f, domain)
}

/// Planar element on the polynomial backend with `z = x.a + i x.b`.
pub fn build_planar_with_frame(frame: PlanarFrame, f: &AnalyticGenerator, domain: &Arc<Domain>) -> Result<AxialElement> {
    let (phi_p, psi_p) = f.eval_poly(&Poly::linear(&frame.a), &Poly::linear(&frame.b));
    let vector: [Poly; 3] = std::array::from_fn(|i| psi_p.scale(&frame.omega[i]));
    let phi = ScalarField::from_poly(domain, phi_p.clone())?;
    let psi = ScalarField::from_poly(domain, psi_p)?;
    let field = QuaternionField::from_polys(domain, phi_p, vector)?;
    Ok(AxialElement { axis: AxisDescriptor::Planar(frame), generator: f.clone(), phi, psi, field })
}

/// Radial element on the grid backend, evaluated in closed form at the nodes.
///
/// The pole must lie at distance at least `2h` from the closed domain.
pub fn build_radial(pole: [f64; 3], f: &AnalyticGenerator, domain: &Arc<Domain>) -> Result<AxialElement> {
    let dist = domain.distance_to(&pole);
    if dist.is_nan() || dist < 2.0 * domain.h() {
        return Err(Error::PoleTooClose(pole, dist));
    }
    let to_centre = sub(&domain.center(), &pole);
    let len = norm3(&to_centre);
    let chart = StereoChart::towards(to_centre.map(|c| c / len))?;
    let dirs: Vec<[f64; 3]> = domain
        .points()
        .iter()
        .map(|x| {
            let r = sub(x, &pole);
            let n = norm3(&r);
            r.map(|c| c / n)
        })
        .collect();
    if dirs.iter().any(|s| 1.0 + dot3(s, &chart.d) < CHART_MARGIN) {
        return Err(Error::ChartSingular);
    }
    let w: Vec<Complex64> = dirs.iter().map(|s| f.eval(chart.zeta(s))).collect();
    let phi = ScalarField::from_values(domain, w.iter().map(|w| w.re).collect())?;
    let psi = ScalarField::from_values(domain, w.iter().map(|w| w.im).collect())?;
    let e = VectorField::from_fn(domain, |x| unit_from(&pole, x));
    let field = QuaternionField::new(phi.clone(), e.try_mul_scalar(&psi)?)?;
    Ok(AxialElement { axis: AxisDescriptor::Radial { pole, chart }, generator: f.clone(), phi, psi, field })
}

fn unit_from(pole: &[f64; 3], x: &[f64; 3]) -> [f64; 3] {
    let r = sub(x, pole);
    let n = norm3(&r);
    r.map(|c| c / n)
}

/// Product within one axial algebra.
pub fn algebra_mul(p: &AxialElement, q: &AxialElement) -> Result<AxialElement> {
    if p.axis != q.axis {
        return Err(Error::AxisMismatch);
    }
    if !p.field.compatible(&q.field) {
        return Err(Error::BackendMismatch);
    }
    let phi = p.phi.try_mul(&q.phi)?.try_sub(&p.psi.try_mul(&q.psi)?)?;
    let psi = p.phi.try_mul(&q.psi)?.try_add(&p.psi.try_mul(&q.phi)?)?;
    let vector = p.axis_field().try_mul_scalar(&psi)?;
    Ok(AxialElement {
        axis: p.axis.clone(),
        generator: p.generator.mul(&q.generator),
        field: QuaternionField::new(phi.clone(), vector)?,
        phi,
        psi,
    })
}

impl AxialElement {
    pub fn axis(&self) -> &AxisDescriptor {
        &self.axis
    }

    pub fn generator(&self) -> &AnalyticGenerator {
        &self.generator
    }

    pub fn field(&self) -> &QuaternionField {
        &self.field
    }

    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }

    pub fn psi(&self) -> &ScalarField {
        &self.psi
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.field.domain()
    }

    pub fn backend(&self) -> Backend {
        self.field.backend()
    }

    /// The axis field `e` on the element's backend.
    pub fn axis_field(&self) -> VectorField {
        match &self.axis {
            AxisDescriptor::Planar(frame) if self.backend() == Backend::Polynomial => {
                VectorField::new_unchecked(std::array::from_fn(|i| {
                    ScalarField::poly_unchecked(self.domain(), Poly::constant(frame.omega[i].clone()))
                }))
            }
            AxisDescriptor::Planar(frame) => VectorField::constant_like(&self.phi, frame.omega()),
            AxisDescriptor::Radial { pole, .. } => VectorField::from_fn(self.domain(), |x| unit_from(pole, x)),
        }
    }

    /// The distance function `tau` with `grad tau = e`: `x.omega` or `|x - O|`.
    pub fn tau(&self) -> ScalarField {
        match &self.axis {
            AxisDescriptor::Planar(frame) => {
                let t = ScalarField::poly_unchecked(self.domain(), Poly::linear(&frame.omega));
                match self.backend() {
                    Backend::Polynomial => t,
                    Backend::Grid => t.sample(),
                }
            }
            AxisDescriptor::Radial { pole, .. } => ScalarField::from_fn(self.domain(), |x| norm3(&sub(x, pole))),
        }
    }

    /// Grid copy of the element.
    pub fn sample(&self) -> AxialElement {
        AxialElement {
            axis: self.axis.clone(),
            generator: self.generator.clone(),
            phi: self.phi.sample(),
            psi: self.psi.sample(),
            field: self.field.sample(),
        }
    }

    /// `(phi, psi)` at an arbitrary point from the closed form.
    pub fn phi_psi_at(&self, x: &[f64; 3]) -> Result<(f64, f64)> {
        match &self.axis {
            AxisDescriptor::Planar(frame) => {
                let z = Complex64::new(dot3(x, &frame.a()), dot3(x, &frame.b()));
                if let (Some(phi), Some(psi)) = (self.phi.as_poly(), self.psi.as_poly()) {
                    return Ok((phi.eval(x), psi.eval(x)));
                }
                let w = self.generator.eval(z);
                Ok((w.re, w.im))
            }
            AxisDescriptor::Radial { pole, chart } => {
                let s = unit_from(pole, x);
                if !s.iter().all(|c| c.is_finite()) || 1.0 + dot3(&s, &chart.d) < CHART_MARGIN {
                    return Err(Error::ChartSingular);
                }
                let w = self.generator.eval(chart.zeta(&s));
                Ok((w.re, w.im))
            }
        }
    }

    /// Default validation tolerance for the element's backend.
    pub fn default_tolerance(&self) -> f64 {
        default_tolerance(&self.field)
    }

    pub fn validate(&self, tol: f64) -> AxialValidation {
        validate_axial(self, tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureCheck {
    pub name: String,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxialValidation {
    pub kind: String,
    pub checks: Vec<StructureCheck>,
    pub classification: Classification,
    pub tol: f64,
    pub pass: bool,
}

impl AxialValidation {
    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect()
    }

    pub fn check(&self, name: &str) -> Option<&StructureCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Evaluates the structure equations of an axial element over the
/// evaluation nodes:
///
/// * `e.grad phi`, `e.grad psi`, `(e.grad) e`, `e . rot e`,
/// * `laplacian phi`, `laplacian psi`, `grad psi - grad tau ^ grad phi`,
/// * the harmonic residual,
/// * `laplacian tau` (planar: `0`; radial: `2/r`), and for radial
///   elements `div(psi e) - 2 psi / r` plus non-purity when `psi` is not
///   identically small.
pub fn validate_axial(p: &AxialElement, tol: f64) -> AxialValidation {
    let nodes = p.domain().evaluation_nodes();
    let e = p.axis_field();
    let tau = p.tau();
    let grad_phi = grad(&p.phi);
    let grad_psi = grad(&p.psi);
    let mut checks = Vec::new();
    let mut push = |name: &str, max_residual: f64, pass: bool| {
        checks.push(StructureCheck { name: name.to_string(), max_residual, pass })
    };
    let mut scalar = |name: &str, f: ScalarField| {
        let m = f.max_abs_on(&nodes);
        push(name, m, m <= tol)
    };
    scalar("grad_e_phi", e.try_dot(&grad_phi).expect("compatible"));
    scalar("grad_e_psi", e.try_dot(&grad_psi).expect("compatible"));
    scalar("frobenius", e.try_dot(&rot(&e)).expect("compatible"));
    scalar("laplacian_phi", laplacian(&p.phi));
    scalar("laplacian_psi", laplacian(&p.psi));
    let r = match &p.axis {
        AxisDescriptor::Planar(_) => None,
        AxisDescriptor::Radial { .. } => Some(tau.clone()),
    };
    let lap_tau = laplacian(&tau);
    match &r {
        None => scalar("laplacian_tau", lap_tau),
        Some(r) => scalar("laplacian_tau", lap_tau.try_sub(&r.map_values(|r| 2.0 / r)).expect("compatible")),
    }
    if let Some(r) = &r {
        let expected = p.psi.try_mul(&r.map_values(|r| 2.0 / r)).expect("compatible");
        scalar("div_im_is_2psi_over_r", div(p.field.vector()).try_sub(&expected).expect("compatible"));
    }

    let mut vector = |name: &str, u: VectorField| {
        let m = u.max_norm_on(&nodes);
        push(name, m, m <= tol)
    };
    vector("grad_e_e", dirderiv(&e, &e));
    vector(
        "cr_coupling",
        grad_psi.try_sub(&grad(&tau).try_wedge(&grad_phi).expect("compatible")).expect("compatible"),
    );
    vector("harmonic_residual", residual(&p.field));

    let report = classify(&p.field, tol);
    if matches!(p.axis, AxisDescriptor::Radial { .. }) && p.psi.max_abs_on(&nodes) > tol {
        let not_pure = report.classification != Classification::PureHarmonic;
        push("not_pure", report.div_max, not_pure);
    }
    let pass = checks.iter().all(|c| c.pass);
    AxialValidation { kind: p.axis.kind().to_string(), checks, classification: report.classification, tol, pass }
}

/// JSON description of a single axial element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneratorSpec {
    Planar { omega: [f64; 3], coeffs: Vec<[f64; 2]> },
    Radial { pole: [f64; 3], coeffs: Vec<[f64; 2]> },
}

impl GeneratorSpec {
    pub fn generator(&self) -> AnalyticGenerator {
        match self {
            GeneratorSpec::Planar { coeffs, .. } | GeneratorSpec::Radial { coeffs, .. } => AnalyticGenerator::new(coeffs),
        }
    }

    pub fn build(&self, domain: &Arc<Domain>) -> Result<AxialElement> {
        match self {
            GeneratorSpec::Planar { omega, .. } => build_planar(*omega, &self.generator(), domain),
            GeneratorSpec::Radial { pole, .. } => build_radial(*pole, &self.generator(), domain),
        }
    }
}
