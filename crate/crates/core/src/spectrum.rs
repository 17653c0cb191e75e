//! Quaternion Dirac functionals and recovery of domain points.
//!
//! A Dirac functional `theta_m(p) = p(m)` has unit norm and is
//! multiplicative on every axial algebra. A finite panel of three planar
//! algebras with orthonormal axes, each generated by `f(z) = z`, separates
//! points: `theta_m(p) = {m.a, (m.b) omega}` reads two coordinates of `m`
//! per axis, six readings for three unknowns.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axial::{algebra_mul, build_planar_with_frame, AnalyticGenerator, AxialElement, AxisDescriptor, PlanarFrame};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::fields::{Backend, QuaternionField};
use crate::quaternion::{dot3, exact, norm3, to_f64, ExactQuaternion, Quaternion};

/// Tolerance on `omega_i . omega_j = delta_ij` for a panel.
pub const PANEL_ORTHONORMAL_TOLERANCE: f64 = 1e-12;

/// Left multiplication by a constant quaternion, `x -> a p(x)`.
pub fn h_action(a: &Quaternion, p: &QuaternionField) -> QuaternionField {
    let c = match p.backend() {
        Backend::Polynomial => QuaternionField::constant_poly(p.domain(), &a.to_exact()),
        Backend::Grid => QuaternionField::constant_like(p.scalar(), a),
    };
    c.pointwise_product(p).expect("constant field shares the domain and backend")
}

/// A quaternion-valued functional on fields, represented by how it acts.
pub trait HFunctional {
    fn apply(&self, p: &QuaternionField) -> Result<Quaternion>;

    /// Exact value on the polynomial backend, `None` on the grid.
    fn apply_exact(&self, p: &QuaternionField) -> Result<Option<ExactQuaternion>>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracFunctional {
    pub m: [f64; 3],
}

impl DiracFunctional {
    pub fn at(m: [f64; 3]) -> Self {
        Self { m }
    }
}

fn check_inside(p: &QuaternionField, m: &[f64; 3]) -> Result<()> {
    if p.domain().contains(m, 1e-12) {
        Ok(())
    } else {
        Err(Error::OutsideDomain(m[0], m[1], m[2]))
    }
}

impl HFunctional for DiracFunctional {
    fn apply(&self, p: &QuaternionField) -> Result<Quaternion> {
        p.evaluate(&self.m)
    }

    fn apply_exact(&self, p: &QuaternionField) -> Result<Option<ExactQuaternion>> {
        check_inside(p, &self.m)?;
        Ok(p.evaluate_exact(&self.m.map(exact)))
    }
}

/// Convex combination of Dirac functionals. Unit norm, but not
/// multiplicative unless it collapses to a single point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracMixture {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl DiracMixture {
    pub fn average(m1: [f64; 3], m2: [f64; 3]) -> Self {
        Self { points: vec![m1, m2], weights: vec![0.5, 0.5] }
    }
}

impl HFunctional for DiracMixture {
    fn apply(&self, p: &QuaternionField) -> Result<Quaternion> {
        let mut acc = Quaternion::zero();
        for (m, w) in self.points.iter().zip(&self.weights) {
            acc = acc + p.evaluate(m)?.scale(w);
        }
        Ok(acc)
    }

    fn apply_exact(&self, p: &QuaternionField) -> Result<Option<ExactQuaternion>> {
        let mut acc = ExactQuaternion::zero();
        for (m, w) in self.points.iter().zip(&self.weights) {
            check_inside(p, m)?;
            match p.evaluate_exact(&m.map(exact)) {
                Some(v) => acc = acc + v.scale(&exact(*w)),
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }
}

/// Either kind of candidate functional, as read from configs and scanned.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Functional {
    Dirac(DiracFunctional),
    Mixture(DiracMixture),
}

impl HFunctional for Functional {
    fn apply(&self, p: &QuaternionField) -> Result<Quaternion> {
        match self {
            Functional::Dirac(t) => t.apply(p),
            Functional::Mixture(t) => t.apply(p),
        }
    }

    fn apply_exact(&self, p: &QuaternionField) -> Result<Option<ExactQuaternion>> {
        match self {
            Functional::Dirac(t) => t.apply_exact(p),
            Functional::Mixture(t) => t.apply_exact(p),
        }
    }
}

/// `max_p |theta(p)| / sup|p|` over the probes with nonzero sup norm.
pub fn functional_norm(theta: &impl HFunctional, probes: &[QuaternionField]) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::EmptyProbeSet);
    }
    let sups: Vec<f64> = probes.iter().map(|p| p.sup_norm().value).collect();
    norm_with_sups(theta, probes, &sups)
}

fn norm_with_sups(theta: &impl HFunctional, probes: &[QuaternionField], sups: &[f64]) -> Result<f64> {
    let mut best = 0.0f64;
    for (p, &sup) in probes.iter().zip(sups) {
        if sup > 0.0 {
            best = best.max(theta.apply(p)?.modulus() / sup);
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplicativityReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// `|theta(yz) - theta(y) theta(z)|` for each same-axis pair; exact on
/// the polynomial backend.
pub fn multiplicativity_check(
    theta: &impl HFunctional,
    pairs: &[(AxialElement, AxialElement)],
    tol: f64,
) -> Result<MultiplicativityReport> {
    let products = pairs.iter().map(|(y, z)| algebra_mul(y, z)).collect::<Result<Vec<_>>>()?;
    multiplicativity_with_products(theta, pairs, &products, tol)
}

fn multiplicativity_with_products(
    theta: &impl HFunctional,
    pairs: &[(AxialElement, AxialElement)],
    products: &[AxialElement],
    tol: f64,
) -> Result<MultiplicativityReport> {
    let mut residuals = Vec::with_capacity(pairs.len());
    for ((y, z), yz) in pairs.iter().zip(products) {
        let exact = (theta.apply_exact(yz.field())?, theta.apply_exact(y.field())?, theta.apply_exact(z.field())?);
        let r = match exact {
            (Some(yz), Some(y), Some(z)) => to_f64(&(yz - y * z).modulus_squared()).sqrt(),
            _ => (theta.apply(yz.field())? - theta.apply(y.field())? * theta.apply(z.field())?).modulus(),
        };
        residuals.push(r);
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(MultiplicativityReport { residuals, max_residual, tol, pass: max_residual <= tol })
}

/// Three planar elements `f(z) = z` on pairwise orthonormal axes.
#[derive(Clone, Debug)]
pub struct GeneratorPanel {
    elements: [AxialElement; 3],
}

impl GeneratorPanel {
    /// Axes `e1, e2, e3` on the polynomial backend.
    pub fn standard(domain: &Arc<Domain>) -> Result<Self> {
        Self::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], domain)
    }

    pub fn new(axes: [[f64; 3]; 3], domain: &Arc<Domain>) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot3(&axes[i], &axes[j]) - target).abs() > PANEL_ORTHONORMAL_TOLERANCE {
                    return Err(Error::Precondition(format!("panel axes {i} and {j} are not orthonormal")));
                }
            }
        }
        let [f0, f1, f2] = axes.map(PlanarFrame::from_axis);
        Self::build([f0?, f1?, f2?], domain)
    }

    /// Panel from exact frames; the axes must be exactly orthonormal.
    pub fn from_frames(frames: [PlanarFrame; 3], domain: &Arc<Domain>) -> Result<Self> {
        for i in 0..3 {
            for j in (i + 1)..3 {
                if !dot3(frames[i].exact_omega(), frames[j].exact_omega()).is_zero() {
                    return Err(Error::Precondition(format!("panel axes {i} and {j} are not orthogonal")));
                }
            }
        }
        Self::build(frames, domain)
    }

    fn build(frames: [PlanarFrame; 3], domain: &Arc<Domain>) -> Result<Self> {
        let z = AnalyticGenerator::power(1);
        let [f0, f1, f2] = frames;
        Ok(Self {
            elements: [
                build_planar_with_frame(f0, &z, domain)?,
                build_planar_with_frame(f1, &z, domain)?,
                build_planar_with_frame(f2, &z, domain)?,
            ],
        })
    }

    pub fn elements(&self) -> &[AxialElement; 3] {
        &self.elements
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.elements[0].domain()
    }

    pub fn frames(&self) -> [&PlanarFrame; 3] {
        self.elements.each_ref().map(|e| match e.axis() {
            AxisDescriptor::Planar(f) => f,
            AxisDescriptor::Radial { .. } => unreachable!("panel elements are planar"),
        })
    }

    /// `(z, z)` and `(z, z^2)` on each axis.
    pub fn algebra_pairs(&self) -> Result<Vec<(AxialElement, AxialElement)>> {
        let mut pairs = Vec::with_capacity(6);
        for z in &self.elements {
            let z2 = algebra_mul(z, z)?;
            pairs.push((z.clone(), z.clone()));
            pairs.push((z.clone(), z2));
        }
        Ok(pairs)
    }

    /// The unit field, the panel elements and their squares.
    pub fn probes(&self) -> Result<Vec<QuaternionField>> {
        let unit = Quaternion::<BigRational>::one();
        let mut probes = vec![QuaternionField::constant_poly(self.domain(), &unit)];
        for z in &self.elements {
            probes.push(z.field().clone());
            probes.push(algebra_mul(z, z)?.field().clone());
        }
        Ok(probes)
    }

    /// `theta(p_i)` for the three panel elements.
    pub fn forward(&self, theta: &impl HFunctional) -> Result<[Quaternion; 3]> {
        let [a, b, c] = &self.elements;
        Ok([theta.apply(a.field())?, theta.apply(b.field())?, theta.apply(c.field())?])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Recovery {
    pub point: [f64; 3],
    pub inconsistency: f64,
}

/// Least-squares point from the six panel readings `re = m.a`,
/// `im.omega = m.b`, with the largest disagreement among readings. The
/// component of `im` off the axis also counts as inconsistency.
pub fn reconcile(values: &[Quaternion; 3], panel: &GeneratorPanel) -> Recovery {
    let mut rows: Vec<([f64; 3], f64)> = Vec::with_capacity(6);
    let mut off_axis = 0.0f64;
    for (q, frame) in values.iter().zip(panel.frames()) {
        let omega = frame.omega();
        let along = dot3(&q.im, &omega);
        let perp: [f64; 3] = std::array::from_fn(|i| q.im[i] - along * omega[i]);
        off_axis = off_axis.max(norm3(&perp));
        rows.push((frame.a(), q.re));
        rows.push((frame.b(), along));
    }
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (row, y) in &rows {
        let r = Vector3::from(*row);
        ata += r * r.transpose();
        aty += r * *y;
    }
    let m = ata.lu().solve(&aty).expect("orthonormal panel gives an invertible normal matrix");
    let point = [m[0], m[1], m[2]];
    let inconsistency = rows.iter().map(|(row, y)| (dot3(row, &point) - y).abs()).fold(off_axis, f64::max);
    Recovery { point, inconsistency }
}

/// [`reconcile`], failing when the readings disagree by more than `tol`.
pub fn recover_point(values: &[Quaternion; 3], panel: &GeneratorPanel, tol: f64) -> Result<Recovery> {
    let r = reconcile(values, panel);
    if r.inconsistency > tol {
        return Err(Error::Inconsistent(r.inconsistency, tol));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanEntry {
    /// Evaluation point of a Dirac candidate, `None` for mixtures.
    pub node: Option<[f64; 3]>,
    pub passed: bool,
    pub norm: f64,
    pub max_mult_residual: f64,
    pub recovered_point: [f64; 3],
    pub inconsistency: f64,
}

/// Tests each candidate for unit norm on the panel probes and
/// multiplicativity on the panel algebras, then recovers its point.
pub fn scan_functionals(panel: &GeneratorPanel, candidates: &[Functional], tol: f64) -> Result<Vec<ScanEntry>> {
    let probes = panel.probes()?;
    let sups: Vec<f64> = probes.iter().map(|p| p.sup_norm().value).collect();
    let pairs = panel.algebra_pairs()?;
    let products = pairs.iter().map(|(y, z)| algebra_mul(y, z)).collect::<Result<Vec<_>>>()?;
    candidates
        .par_iter()
        .map(|theta| {
            let norm = norm_with_sups(theta, &probes, &sups)?;
            let mult = multiplicativity_with_products(theta, &pairs, &products, tol)?;
            let rec = reconcile(&panel.forward(theta)?, panel);
            Ok(ScanEntry {
                node: match theta {
                    Functional::Dirac(d) => Some(d.m),
                    Functional::Mixture(_) => None,
                },
                passed: (norm - 1.0).abs() <= tol && mult.pass,
                norm,
                max_mult_residual: mult.max_residual,
                recovered_point: rec.point,
                inconsistency: rec.inconsistency,
            })
        })
        .collect()
}

/// Scans the Dirac functional of every node of `domain`.
pub fn spectrum_scan(panel: &GeneratorPanel, domain: &Domain, tol: f64) -> Result<Vec<ScanEntry>> {
    let candidates: Vec<Functional> =
        domain.points().iter().map(|m| Functional::Dirac(DiracFunctional::at(*m))).collect();
    scan_functionals(panel, &candidates, tol)
}

/// Points of the entries that passed.
pub fn accepted_points(entries: &[ScanEntry]) -> Vec<[f64; 3]> {
    entries.iter().filter(|e| e.passed).map(|e| e.recovered_point).collect()
}
