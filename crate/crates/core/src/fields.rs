//! Scalar, vector and quaternion fields on a [`Domain`].
//!
//! Every field is backed either by exact polynomials or by values sampled at
//! the domain nodes. Arithmetic between fields requires the same backend and
//! the same domain: the `try_*` methods report a mismatch as an error, the
//! operator impls panic on it.

use std::io::Write;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::poly::{eval_f64_terms, Poly};
use crate::quaternion::{exact, to_f64, ExactQuaternion, Quaternion};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Polynomial,
    Grid,
}

#[derive(Clone, Debug, PartialEq)]
enum ScalarData {
    Poly(Poly),
    Grid(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct ScalarField {
    domain: Arc<Domain>,
    data: ScalarData,
}

/// Three scalar components sharing one backend and one domain.
#[derive(Clone, Debug)]
pub struct VectorField {
    comps: [ScalarField; 3],
}

/// A pair `{scalar, vector}` of fields on one domain and backend.
#[derive(Clone, Debug)]
pub struct QuaternionField {
    scalar: ScalarField,
    vector: VectorField,
}

fn same_domain(a: &Arc<Domain>, b: &Arc<Domain>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl ScalarField {
    pub fn from_poly(domain: &Arc<Domain>, poly: Poly) -> Result<Self> {
        poly.check_degree(domain.degree_cap())?;
        Ok(Self { domain: domain.clone(), data: ScalarData::Poly(poly) })
    }

    pub(crate) fn poly_unchecked(domain: &Arc<Domain>, poly: Poly) -> Self {
        Self { domain: domain.clone(), data: ScalarData::Poly(poly) }
    }

    pub fn from_values(domain: &Arc<Domain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.node_count() {
            return Err(Error::Precondition(format!(
                "grid field needs {} values, got {}",
                domain.node_count(),
                values.len()
            )));
        }
        Ok(Self { domain: domain.clone(), data: ScalarData::Grid(values) })
    }

    /// Grid field from a closed-form function evaluated at every node.
    pub fn from_fn(domain: &Arc<Domain>, f: impl Fn(&[f64; 3]) -> f64) -> Self {
        let values = domain.points().iter().map(f).collect();
        Self { domain: domain.clone(), data: ScalarData::Grid(values) }
    }

    pub fn zero_like(&self) -> Self {
        self.constant_like(0.0)
    }

    /// Constant field on the same domain and backend.
    pub fn constant_like(&self, c: f64) -> Self {
        match &self.data {
            ScalarData::Poly(_) => Self::poly_unchecked(&self.domain, Poly::constant(exact(c))),
            ScalarData::Grid(v) => Self {
                domain: self.domain.clone(),
                data: ScalarData::Grid(vec![c; v.len()]),
            },
        }
    }

    pub fn backend(&self) -> Backend {
        match self.data {
            ScalarData::Poly(_) => Backend::Polynomial,
            ScalarData::Grid(_) => Backend::Grid,
        }
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match &self.data {
            ScalarData::Poly(p) => Some(p),
            ScalarData::Grid(_) => None,
        }
    }

    pub fn values(&self) -> Option<&[f64]> {
        match &self.data {
            ScalarData::Grid(v) => Some(v),
            ScalarData::Poly(_) => None,
        }
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.backend() == other.backend() && same_domain(&self.domain, &other.domain)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::BackendMismatch)
        }
    }

    /// Exact for polynomials, trilinear interpolation for grids.
    pub fn evaluate(&self, x: &[f64; 3]) -> Result<f64> {
        match &self.data {
            ScalarData::Poly(p) => {
                if !self.domain.contains(x, 1e-12) {
                    return Err(Error::OutsideDomain(x[0], x[1], x[2]));
                }
                Ok(p.eval(x))
            }
            ScalarData::Grid(v) => Ok(self
                .domain
                .interpolation_weights(x)?
                .into_iter()
                .map(|(n, w)| w * v[n])
                .sum()),
        }
    }

    pub fn evaluate_exact(&self, x: &[BigRational; 3]) -> Option<BigRational> {
        self.as_poly().map(|p| p.eval_exact(x))
    }

    /// Values at every domain node, in node order.
    pub fn node_values(&self) -> Vec<f64> {
        match &self.data {
            ScalarData::Grid(v) => v.clone(),
            ScalarData::Poly(p) => {
                let terms = p.to_f64_terms();
                self.domain.points().iter().map(|x| eval_f64_terms(&terms, x)).collect()
            }
        }
    }

    /// Grid copy of the field. Polynomial coefficients are rounded to double
    /// precision before evaluation at the nodes.
    pub fn sample(&self) -> Self {
        Self { domain: self.domain.clone(), data: ScalarData::Grid(self.node_values()) }
    }

    /// Grid copy on another domain.
    pub fn sample_on(&self, domain: &Arc<Domain>) -> Result<Self> {
        match &self.data {
            ScalarData::Poly(p) => {
                let terms = p.to_f64_terms();
                Ok(Self::from_fn(domain, |x| eval_f64_terms(&terms, x)))
            }
            ScalarData::Grid(_) if same_domain(&self.domain, domain) => Ok(self.clone()),
            ScalarData::Grid(_) => Err(Error::BackendMismatch),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match &self.data {
            ScalarData::Poly(p) => p.is_zero(),
            ScalarData::Grid(v) => v.iter().all(|x| *x == 0.0),
        }
    }

    /// Max absolute value over the given nodes; exactly 0 for the zero polynomial.
    pub fn max_abs_on(&self, nodes: &[usize]) -> f64 {
        match &self.data {
            ScalarData::Poly(p) if p.is_zero() => 0.0,
            ScalarData::Poly(p) => {
                let terms = p.to_f64_terms();
                let pts = self.domain.points();
                nodes.iter().map(|&n| eval_f64_terms(&terms, &pts[n]).abs()).fold(0.0, f64::max)
            }
            ScalarData::Grid(v) => nodes.iter().map(|&n| v[n].abs()).fold(0.0, f64::max),
        }
    }

    pub fn min_on(&self, nodes: &[usize]) -> f64 {
        let v = self.node_values();
        nodes.iter().map(|&n| v[n]).fold(f64::INFINITY, f64::min)
    }

    fn zip(&self, other: &Self, fp: impl Fn(&Poly, &Poly) -> Poly, fg: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check(other)?;
        let data = match (&self.data, &other.data) {
            (ScalarData::Poly(a), ScalarData::Poly(b)) => ScalarData::Poly(fp(a, b)),
            (ScalarData::Grid(a), ScalarData::Grid(b)) => {
                ScalarData::Grid(a.iter().zip(b).map(|(x, y)| fg(*x, *y)).collect())
            }
            _ => unreachable!("backends checked"),
        };
        Ok(Self { domain: self.domain.clone(), data })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b, |x, y| x + y)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b, |x, y| x - y)
    }

    /// Pointwise product; the polynomial result is checked against the degree cap.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let out = self.zip(other, |a, b| a * b, |x, y| x * y)?;
        if let ScalarData::Poly(p) = &out.data {
            p.check_degree(self.domain.degree_cap())?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("incompatible fields")
    }

    pub fn scale(&self, c: f64) -> Self {
        match &self.data {
            ScalarData::Poly(p) => Self::poly_unchecked(&self.domain, p.scale(&exact(c))),
            ScalarData::Grid(v) => Self {
                domain: self.domain.clone(),
                data: ScalarData::Grid(v.iter().map(|x| x * c).collect()),
            },
        }
    }

    pub fn scale_exact(&self, c: &BigRational) -> Self {
        match &self.data {
            ScalarData::Poly(p) => Self::poly_unchecked(&self.domain, p.scale(c)),
            ScalarData::Grid(_) => self.scale(to_f64(c)),
        }
    }

    /// Applies a function to grid values; polynomial fields are sampled first.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        let values = self.node_values().into_iter().map(f).collect();
        Self { domain: self.domain.clone(), data: ScalarData::Grid(values) }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let values = self.node_values();
        write_csv(&self.domain, &["value"], out, |n| vec![values[n]])
    }
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        same_domain(&self.domain, &other.domain) && self.data == other.data
    }
}

impl Add<&ScalarField> for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.try_add(rhs).expect("incompatible fields")
    }
}

impl Sub<&ScalarField> for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.try_sub(rhs).expect("incompatible fields")
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        match &self.data {
            ScalarData::Poly(p) => ScalarField::poly_unchecked(&self.domain, -p),
            ScalarData::Grid(_) => self.scale(-1.0),
        }
    }
}

impl VectorField {
    pub fn new(comps: [ScalarField; 3]) -> Result<Self> {
        comps[0].check(&comps[1])?;
        comps[0].check(&comps[2])?;
        Ok(Self { comps })
    }

    pub(crate) fn new_unchecked(comps: [ScalarField; 3]) -> Self {
        Self { comps }
    }

    pub fn from_polys(domain: &Arc<Domain>, polys: [Poly; 3]) -> Result<Self> {
        let [a, b, c] = polys;
        Ok(Self {
            comps: [
                ScalarField::from_poly(domain, a)?,
                ScalarField::from_poly(domain, b)?,
                ScalarField::from_poly(domain, c)?,
            ],
        })
    }

    pub fn from_fn(domain: &Arc<Domain>, f: impl Fn(&[f64; 3]) -> [f64; 3]) -> Self {
        let values: Vec<[f64; 3]> = domain.points().iter().map(f).collect();
        Self {
            comps: std::array::from_fn(|i| ScalarField {
                domain: domain.clone(),
                data: ScalarData::Grid(values.iter().map(|v| v[i]).collect()),
            }),
        }
    }

    /// Constant vector field on the same domain and backend as `like`.
    pub fn constant_like(like: &ScalarField, c: [f64; 3]) -> Self {
        Self { comps: std::array::from_fn(|i| like.constant_like(c[i])) }
    }

    pub fn zero_like(like: &ScalarField) -> Self {
        Self::constant_like(like, [0.0; 3])
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.comps[i]
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.comps
    }

    pub fn backend(&self) -> Backend {
        self.comps[0].backend()
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.comps[0].domain()
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.comps[0].compatible(&other.comps[0])
    }

    pub fn evaluate(&self, x: &[f64; 3]) -> Result<[f64; 3]> {
        Ok([self.comps[0].evaluate(x)?, self.comps[1].evaluate(x)?, self.comps[2].evaluate(x)?])
    }

    pub fn evaluate_exact(&self, x: &[BigRational; 3]) -> Option<[BigRational; 3]> {
        Some([
            self.comps[0].evaluate_exact(x)?,
            self.comps[1].evaluate_exact(x)?,
            self.comps[2].evaluate_exact(x)?,
        ])
    }

    pub fn sample(&self) -> Self {
        Self { comps: std::array::from_fn(|i| self.comps[i].sample()) }
    }

    pub fn sample_on(&self, domain: &Arc<Domain>) -> Result<Self> {
        Ok(Self {
            comps: [
                self.comps[0].sample_on(domain)?,
                self.comps[1].sample_on(domain)?,
                self.comps[2].sample_on(domain)?,
            ],
        })
    }

    pub fn node_values(&self) -> Vec<[f64; 3]> {
        let [a, b, c] = &self.comps;
        let (a, b, c) = (a.node_values(), b.node_values(), c.node_values());
        (0..a.len()).map(|n| [a[n], b[n], c[n]]).collect()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.comps.iter().all(ScalarField::is_identically_zero)
    }

    /// Max Euclidean length over the given nodes; exactly 0 for the zero polynomial field.
    pub fn max_norm_on(&self, nodes: &[usize]) -> f64 {
        if self.is_identically_zero() {
            return 0.0;
        }
        let v = self.node_values();
        nodes
            .iter()
            .map(|&n| (v[n][0] * v[n][0] + v[n][1] * v[n][1] + v[n][2] * v[n][2]).sqrt())
            .fold(0.0, f64::max)
    }

    fn zip(&self, other: &Self, f: impl Fn(&ScalarField, &ScalarField) -> Result<ScalarField>) -> Result<Self> {
        Ok(Self {
            comps: [
                f(&self.comps[0], &other.comps[0])?,
                f(&self.comps[1], &other.comps[1])?,
                f(&self.comps[2], &other.comps[2])?,
            ],
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip(other, ScalarField::try_add)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, ScalarField::try_sub)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { comps: std::array::from_fn(|i| self.comps[i].scale(c)) }
    }

    /// Multiplies every component by the scalar field `a`.
    pub fn try_mul_scalar(&self, a: &ScalarField) -> Result<Self> {
        Ok(Self {
            comps: [a.try_mul(&self.comps[0])?, a.try_mul(&self.comps[1])?, a.try_mul(&self.comps[2])?],
        })
    }

    pub fn mul_scalar(&self, a: &ScalarField) -> Self {
        self.try_mul_scalar(a).expect("incompatible fields")
    }

    /// Pointwise Euclidean inner product.
    pub fn try_dot(&self, other: &Self) -> Result<ScalarField> {
        let [a0, a1, a2] = &self.comps;
        let [b0, b1, b2] = &other.comps;
        a0.try_mul(b0)?.try_add(&a1.try_mul(b1)?)?.try_add(&a2.try_mul(b2)?)
    }

    /// Pointwise right-handed cross product.
    pub fn try_wedge(&self, other: &Self) -> Result<Self> {
        let [a0, a1, a2] = &self.comps;
        let [b0, b1, b2] = &other.comps;
        Ok(Self {
            comps: [
                a1.try_mul(b2)?.try_sub(&a2.try_mul(b1)?)?,
                a2.try_mul(b0)?.try_sub(&a0.try_mul(b2)?)?,
                a0.try_mul(b1)?.try_sub(&a1.try_mul(b0)?)?,
            ],
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let v = self.node_values();
        write_csv(self.domain(), &["v1", "v2", "v3"], out, |n| v[n].to_vec())
    }
}

impl PartialEq for VectorField {
    fn eq(&self, other: &Self) -> bool {
        self.comps == other.comps
    }
}

impl Add<&VectorField> for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        self.try_add(rhs).expect("incompatible fields")
    }
}

impl Sub<&VectorField> for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        self.try_sub(rhs).expect("incompatible fields")
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        VectorField { comps: std::array::from_fn(|i| -&self.comps[i]) }
    }
}

/// Result of a sup-norm estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupNorm {
    pub value: f64,
    /// Spacing of the lattice the maximum was taken over.
    pub lattice_h: f64,
    pub argmax: [f64; 3],
}

impl QuaternionField {
    pub fn new(scalar: ScalarField, vector: VectorField) -> Result<Self> {
        scalar.check(vector.component(0))?;
        Ok(Self { scalar, vector })
    }

    pub fn from_polys(domain: &Arc<Domain>, scalar: Poly, vector: [Poly; 3]) -> Result<Self> {
        Ok(Self {
            scalar: ScalarField::from_poly(domain, scalar)?,
            vector: VectorField::from_polys(domain, vector)?,
        })
    }

    pub fn from_fn(domain: &Arc<Domain>, f: impl Fn(&[f64; 3]) -> Quaternion) -> Self {
        let values: Vec<Quaternion> = domain.points().iter().map(f).collect();
        let scalar = ScalarField {
            domain: domain.clone(),
            data: ScalarData::Grid(values.iter().map(|q| q.re).collect()),
        };
        let vector = VectorField {
            comps: std::array::from_fn(|i| ScalarField {
                domain: domain.clone(),
                data: ScalarData::Grid(values.iter().map(|q| q.im[i]).collect()),
            }),
        };
        Self { scalar, vector }
    }

    /// The constant field `x -> a` on the same domain and backend as `like`.
    pub fn constant_like(like: &ScalarField, a: &Quaternion) -> Self {
        Self {
            scalar: like.constant_like(a.re),
            vector: VectorField::constant_like(like, a.im),
        }
    }

    /// Exact constant polynomial field.
    pub fn constant_poly(domain: &Arc<Domain>, a: &ExactQuaternion) -> Self {
        Self {
            scalar: ScalarField::poly_unchecked(domain, Poly::constant(a.re.clone())),
            vector: VectorField::new_unchecked(std::array::from_fn(|i| {
                ScalarField::poly_unchecked(domain, Poly::constant(a.im[i].clone()))
            })),
        }
    }

    pub fn scalar(&self) -> &ScalarField {
        &self.scalar
    }

    pub fn vector(&self) -> &VectorField {
        &self.vector
    }

    pub fn backend(&self) -> Backend {
        self.scalar.backend()
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.scalar.domain()
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.scalar.compatible(&other.scalar)
    }

    pub fn evaluate(&self, x: &[f64; 3]) -> Result<Quaternion> {
        Ok(Quaternion::new(self.scalar.evaluate(x)?, self.vector.evaluate(x)?))
    }

    /// Exact value at an exact point, for polynomial fields.
    pub fn evaluate_exact(&self, x: &[BigRational; 3]) -> Option<ExactQuaternion> {
        Some(Quaternion::new(self.scalar.evaluate_exact(x)?, self.vector.evaluate_exact(x)?))
    }

    pub fn node_values(&self) -> Vec<Quaternion> {
        let s = self.scalar.node_values();
        let v = self.vector.node_values();
        s.into_iter().zip(v).map(|(re, im)| Quaternion::new(re, im)).collect()
    }

    pub fn sample(&self) -> Self {
        Self { scalar: self.scalar.sample(), vector: self.vector.sample() }
    }

    pub fn sample_on(&self, domain: &Arc<Domain>) -> Result<Self> {
        Ok(Self { scalar: self.scalar.sample_on(domain)?, vector: self.vector.sample_on(domain)? })
    }

    pub fn is_identically_zero(&self) -> bool {
        self.scalar.is_identically_zero() && self.vector.is_identically_zero()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            scalar: self.scalar.try_add(&other.scalar)?,
            vector: self.vector.try_add(&other.vector)?,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            scalar: self.scalar.try_sub(&other.scalar)?,
            vector: self.vector.try_sub(&other.vector)?,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { scalar: self.scalar.scale(c), vector: self.vector.scale(c) }
    }

    /// Pointwise quaternion product `(pq)(x) = p(x) q(x)`.
    pub fn pointwise_product(&self, other: &Self) -> Result<Self> {
        self.scalar.check(&other.scalar)?;
        let (a, u) = (&self.scalar, &self.vector);
        let (b, v) = (&other.scalar, &other.vector);
        let scalar = a.try_mul(b)?.try_sub(&u.try_dot(v)?)?;
        let vector = v
            .try_mul_scalar(a)?
            .try_add(&u.try_mul_scalar(b)?)?
            .try_add(&u.try_wedge(v)?)?;
        Ok(Self { scalar, vector })
    }

    /// `|p|^2` as a scalar field.
    pub fn modulus_squared(&self) -> Result<ScalarField> {
        self.scalar.try_mul(&self.scalar)?.try_add(&self.vector.try_dot(&self.vector)?)
    }

    /// Sup norm over the domain nodes.
    pub fn sup_norm(&self) -> SupNorm {
        let domain = self.domain();
        let values = self.node_values();
        let mut best = SupNorm { value: 0.0, lattice_h: domain.h(), argmax: domain.center() };
        for (n, q) in values.iter().enumerate() {
            let m = q.modulus();
            if m > best.value {
                best.value = m;
                best.argmax = domain.point(n);
            }
        }
        best
    }

    /// Sup norm over the lattice of spacing `h_eval` covering the same shape.
    pub fn sup_norm_with_lattice(&self, h_eval: f64) -> Result<SupNorm> {
        let lattice = Arc::new(Domain::new(self.domain().spec().with_h(h_eval))?);
        match self.backend() {
            Backend::Polynomial => Ok(self.sample_on(&lattice)?.sup_norm()),
            Backend::Grid => {
                let values: Vec<Quaternion> =
                    lattice.points().iter().map(|x| self.evaluate(x)).collect::<Result<_>>()?;
                let mut best = SupNorm { value: 0.0, lattice_h: h_eval, argmax: lattice.center() };
                for (n, q) in values.iter().enumerate() {
                    if q.modulus() > best.value {
                        best.value = q.modulus();
                        best.argmax = lattice.point(n);
                    }
                }
                Ok(best)
            }
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let values = self.node_values();
        write_csv(self.domain(), &["re", "v1", "v2", "v3"], out, |n| {
            let q = &values[n];
            vec![q.re, q.im[0], q.im[1], q.im[2]]
        })
    }
}

impl PartialEq for QuaternionField {
    fn eq(&self, other: &Self) -> bool {
        self.scalar == other.scalar && self.vector == other.vector
    }
}

/// Pointwise quaternion product of two fields.
pub fn pointwise_product(p: &QuaternionField, q: &QuaternionField) -> Result<QuaternionField> {
    p.pointwise_product(q)
}

pub fn sup_norm(p: &QuaternionField) -> SupNorm {
    p.sup_norm()
}

fn write_csv<W: Write>(
    domain: &Domain,
    value_cols: &[&str],
    out: W,
    row: impl Fn(usize) -> Vec<f64>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x1", "x2", "x3"];
    header.extend_from_slice(value_cols);
    header.push("boundary");
    w.write_record(&header)?;
    for n in 0..domain.node_count() {
        let x = domain.point(n);
        let mut rec: Vec<String> = x.iter().chain(row(n).iter()).map(|v| v.to_string()).collect();
        rec.push(if domain.is_boundary(n) { "1" } else { "0" }.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;

    fn ball(h: f64) -> Arc<Domain> {
        Arc::new(Domain::new(DomainSpec::unit_ball(h)).unwrap())
    }

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    #[test]
    fn evaluate_polynomial_and_grid() {
        let d = Arc::new(Domain::new(DomainSpec::cube(-1.0, 4.0, 0.1)).unwrap());
        let f = ScalarField::from_poly(&d, &x(0) * &x(0)).unwrap();
        assert_eq!(f.evaluate(&[3.0, 0.0, 0.0]).unwrap(), 9.0);
        assert!(f.evaluate(&[5.0, 0.0, 0.0]).is_err());

        let g = f.sample();
        for n in [0, 17, d.node_count() - 1] {
            assert_eq!(g.evaluate(&d.point(n)).unwrap(), g.values().unwrap()[n]);
        }
        let lin = ScalarField::from_poly(&d, x(0)).unwrap().sample();
        let a = d.point(100);
        let b = d.neighbor(100, 0, 1).map(|n| d.point(n)).unwrap();
        let mid = [0.5 * (a[0] + b[0]), a[1], a[2]];
        assert!((lin.evaluate(&mid).unwrap() - 0.5 * (a[0] + b[0])).abs() < 1e-15);
    }

    #[test]
    fn unit_and_square_products() {
        let d = ball(0.25);
        let p = QuaternionField::from_polys(&d, x(0), [Poly::zero(), Poly::zero(), x(1)]).unwrap();
        let one = QuaternionField::constant_like(p.scalar(), &Quaternion::one());
        assert_eq!(p.pointwise_product(&one).unwrap(), p);
        let sq = p.pointwise_product(&p).unwrap();
        let expect = QuaternionField::from_polys(
            &d,
            &(&x(0) * &x(0)) - &(&x(1) * &x(1)),
            [Poly::zero(), Poly::zero(), (&x(0) * &x(1)).scale(&BigRational::from_integer(2.into()))],
        )
        .unwrap();
        assert_eq!(sq, expect);

        let a = QuaternionField::from_polys(&d, Poly::zero(), [x(0), Poly::zero(), Poly::zero()]).unwrap();
        let b = QuaternionField::from_polys(&d, Poly::zero(), [Poly::zero(), x(1), Poly::zero()]).unwrap();
        let ab = a.pointwise_product(&b).unwrap();
        assert!(ab.scalar().is_identically_zero());
        assert_eq!(ab.vector().component(2).as_poly().unwrap(), &(&x(0) * &x(1)));
    }

    #[test]
    fn mismatch_is_an_error() {
        let d = ball(0.25);
        let p = QuaternionField::from_polys(&d, x(0), [Poly::zero(), Poly::zero(), Poly::zero()]).unwrap();
        assert!(matches!(p.pointwise_product(&p.sample()), Err(Error::BackendMismatch)));
        let other = ball(0.5);
        let q = QuaternionField::from_polys(&other, x(0), [Poly::zero(), Poly::zero(), Poly::zero()]).unwrap();
        assert!(p.pointwise_product(&q).is_err());
    }

    #[test]
    fn sup_norm_examples() {
        let d = ball(0.1);
        let one = QuaternionField::constant_poly(&d, &Quaternion::<f64>::one().to_exact());
        assert_eq!(one.sup_norm().value, 1.0);
        let p = QuaternionField::from_polys(&d, x(0), [Poly::zero(), Poly::zero(), Poly::zero()]).unwrap();
        assert_eq!(p.sup_norm().value, 1.0);
        let p = QuaternionField::from_polys(&d, x(0), [Poly::zero(), Poly::zero(), x(1)]).unwrap();
        assert_eq!(p.sup_norm().value, 1.0);
        assert_eq!(p.sup_norm_with_lattice(0.25).unwrap().lattice_h, 0.25);

        let cube = Arc::new(Domain::new(DomainSpec::cube(-1.0, 1.0, 0.1)).unwrap());
        let f = QuaternionField::from_polys(&cube, &(&x(0) * &x(0)) + &(&x(1) * &x(1)), [Poly::zero(), Poly::zero(), Poly::zero()])
            .unwrap()
            .sample();
        let s = f.sup_norm();
        assert_eq!(s.value, 2.0);
        assert_eq!(s.argmax[0].abs(), 1.0);
        let zero = ScalarField::from_poly(&cube, Poly::zero()).unwrap().sample();
        assert!(zero.values().unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn degree_cap_enforced_on_products() {
        let mut spec = DomainSpec::unit_ball(0.5);
        spec.degree_cap = 3;
        let d = Arc::new(Domain::new(spec).unwrap());
        let f = ScalarField::from_poly(&d, &x(0) * &x(1)).unwrap();
        assert!(matches!(f.try_mul(&f), Err(Error::DegreeCap { degree: 4, cap: 3 })));
    }

    #[test]
    fn csv_dump_columns() {
        let d = Arc::new(Domain::new(DomainSpec::cube(0.0, 1.0, 0.5)).unwrap());
        let f = ScalarField::from_poly(&d, x(0)).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x1,x2,x3,value,boundary"));
        assert_eq!(lines.count(), 27);
        let mut buf = Vec::new();
        VectorField::constant_like(&f, [1.0, 2.0, 3.0]).write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x1,x2,x3,v1,v2,v3,boundary\n0,0,0,1,2,3,1"));
    }
}
