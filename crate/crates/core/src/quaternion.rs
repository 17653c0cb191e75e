//! Geometric quaternions: pairs `{re, im}` of a scalar and a 3-vector.
//!
//! The 3-vector lives in the fixed right-handed frame `e1, e2, e3`, so
//! `{a, (b, c, d)}` is identified with `a + b i + c j + d k`. The product is
//!
//! ```text
//! {a, u} {b, v} = {ab - u.v, a v + b u + u x v}
//! ```
//!
//! The scalar type is generic so the same code serves double precision and
//! exact rationals (`num_rational::BigRational`).

use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A real scalar usable as a quaternion component.
pub trait Real: Clone + Num + Neg<Output = Self> {}

impl<T: Clone + Num + Neg<Output = T>> Real for T {}

pub type Vec3<T> = [T; 3];

pub fn dot3<T: Real>(u: &Vec3<T>, v: &Vec3<T>) -> T {
    u[0].clone() * v[0].clone() + u[1].clone() * v[1].clone() + u[2].clone() * v[2].clone()
}

/// Right-handed cross product.
pub fn cross3<T: Real>(u: &Vec3<T>, v: &Vec3<T>) -> Vec3<T> {
    [
        u[1].clone() * v[2].clone() - u[2].clone() * v[1].clone(),
        u[2].clone() * v[0].clone() - u[0].clone() * v[2].clone(),
        u[0].clone() * v[1].clone() - u[1].clone() * v[0].clone(),
    ]
}

pub fn norm3(u: &Vec3<f64>) -> f64 {
    dot3(u, u).sqrt()
}

/// A geometric quaternion `{re, im}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quaternion<T = f64> {
    pub re: T,
    pub im: Vec3<T>,
}

pub type ExactQuaternion = Quaternion<BigRational>;

impl<T: Real> Quaternion<T> {
    pub fn new(re: T, im: Vec3<T>) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), [T::zero(), T::zero(), T::zero()])
    }

    pub fn one() -> Self {
        Self::new(T::one(), [T::zero(), T::zero(), T::zero()])
    }

    pub fn from_real(re: T) -> Self {
        Self::new(re, [T::zero(), T::zero(), T::zero()])
    }

    pub fn pure(im: Vec3<T>) -> Self {
        Self::new(T::zero(), im)
    }

    /// Quaternion product `self * other`.
    pub fn qmul(&self, other: &Self) -> Self {
        let (a, u) = (&self.re, &self.im);
        let (b, v) = (&other.re, &other.im);
        let uxv = cross3(u, v);
        let re = a.clone() * b.clone() - dot3(u, v);
        let im = std::array::from_fn(|i| {
            a.clone() * v[i].clone() + b.clone() * u[i].clone() + uxv[i].clone()
        });
        Self::new(re, im)
    }

    /// The involution `{re, im} -> {re, -im}`.
    pub fn conj(&self) -> Self {
        Self::new(
            self.re.clone(),
            [-self.im[0].clone(), -self.im[1].clone(), -self.im[2].clone()],
        )
    }

    /// `|q|^2 = re^2 + |im|^2`, exact for exact scalars.
    pub fn modulus_squared(&self) -> T {
        self.re.clone() * self.re.clone() + dot3(&self.im, &self.im)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(
            self.re.clone() * s.clone(),
            std::array::from_fn(|i| self.im[i].clone() * s.clone()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.iter().all(Zero::is_zero)
    }
}

impl Quaternion<f64> {
    pub fn modulus(&self) -> f64 {
        self.modulus_squared().sqrt()
    }

    /// Whether the two quaternions commute, i.e. `|im(p) x im(q)| <= tol`.
    pub fn commutes(&self, other: &Self, tol: f64) -> bool {
        norm3(&cross3(&self.im, &other.im)) <= tol
    }

    /// Exact rational copy; every finite double is a dyadic rational.
    pub fn to_exact(&self) -> ExactQuaternion {
        Quaternion::new(
            exact(self.re),
            [exact(self.im[0]), exact(self.im[1]), exact(self.im[2])],
        )
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).modulus()
    }
}

impl ExactQuaternion {
    /// Round every component to the nearest double.
    pub fn to_f64(&self) -> Quaternion<f64> {
        Quaternion::new(
            to_f64(&self.re),
            [to_f64(&self.im[0]), to_f64(&self.im[1]), to_f64(&self.im[2])],
        )
    }
}

/// Exact rational value of a finite double.
///
/// Panics on NaN or infinity.
pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(|| panic!("non-finite value {x}"))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let [u0, u1, u2] = self.im;
        let [v0, v1, v2] = rhs.im;
        Self::new(self.re + rhs.re, [u0 + v0, u1 + v1, u2 + v2])
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        let [u0, u1, u2] = self.im;
        Self::new(-self.re, [-u0, -u1, -u2])
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.qmul(&rhs)
    }
}

/// Free-function forms of the operations.
pub fn qmul<T: Real>(p: &Quaternion<T>, q: &Quaternion<T>) -> Quaternion<T> {
    p.qmul(q)
}

pub fn conj<T: Real>(q: &Quaternion<T>) -> Quaternion<T> {
    q.conj()
}

pub fn modulus(q: &Quaternion<f64>) -> f64 {
    q.modulus()
}

pub fn commutes(p: &Quaternion<f64>, q: &Quaternion<f64>, tol: f64) -> bool {
    p.commutes(q, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(re: f64, im: [f64; 3]) -> Quaternion {
        Quaternion::new(re, im)
    }

    #[test]
    fn multiplication_table() {
        let i = q(0.0, [1.0, 0.0, 0.0]);
        let j = q(0.0, [0.0, 1.0, 0.0]);
        let k = q(0.0, [0.0, 0.0, 1.0]);
        assert_eq!(qmul(&i, &j), k);
        assert_eq!(qmul(&j, &k), i);
        assert_eq!(qmul(&k, &i), j);
        assert_eq!(qmul(&j, &i), -k);
        for u in [&i, &j, &k] {
            assert_eq!(qmul(u, u), q(-1.0, [0.0; 3]));
        }
    }

    #[test]
    fn real_scalar_acts_componentwise() {
        assert_eq!(
            qmul(&q(2.0, [0.0; 3]), &q(3.0, [1.0, 1.0, 1.0])),
            q(6.0, [2.0, 2.0, 2.0])
        );
    }

    #[test]
    fn product_with_conjugate_is_modulus_squared() {
        let p = q(1.0, [1.0, 0.0, 0.0]);
        assert_eq!(qmul(&p, &conj(&p)), q(2.0, [0.0; 3]));
        let p = q(3.0, [4.0, 0.0, 0.0]);
        assert_eq!(qmul(&p, &conj(&p)), q(25.0, [0.0; 3]));
    }

    #[test]
    fn conjugation() {
        assert_eq!(conj(&q(1.0, [2.0, 3.0, 4.0])), q(1.0, [-2.0, -3.0, -4.0]));
        assert!(conj(&Quaternion::<f64>::zero()).is_zero());
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(modulus(&q(1.0, [1.0, 1.0, 1.0])), 2.0);
        assert_eq!(modulus(&Quaternion::zero()), 0.0);
        // {1,e1}{2,e2} = {2, (2, 1, 1)} by hand; |.|^2 = 4 + 4 + 1 + 1 = 10.
        let prod = qmul(&q(1.0, [1.0, 0.0, 0.0]), &q(2.0, [0.0, 1.0, 0.0]));
        assert_eq!(prod, q(2.0, [2.0, 1.0, 1.0]));
        assert!((modulus(&prod) - 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn commutation_examples() {
        assert!(commutes(&q(1.0, [1.0, 0.0, 0.0]), &q(5.0, [2.0, 0.0, 0.0]), 0.0));
        assert!(!commutes(&q(0.0, [1.0, 0.0, 0.0]), &q(0.0, [0.0, 1.0, 0.0]), 0.0));
        assert!(commutes(&q(7.0, [0.0; 3]), &q(-1.5, [0.3, 2.0, -4.0]), 0.0));
    }

    #[test]
    fn exact_variant_matches_table() {
        let i = q(0.0, [1.0, 0.0, 0.0]).to_exact();
        let j = q(0.0, [0.0, 1.0, 0.0]).to_exact();
        assert_eq!(qmul(&i, &j), q(0.0, [0.0, 0.0, 1.0]).to_exact());
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&q(1.5, [0.0, -2.0, 3.0])).unwrap();
        assert_eq!(s, r#"{"re":1.5,"im":[0.0,-2.0,3.0]}"#);
        let back: Quaternion = serde_json::from_str(r#"{"re": 1, "im": [2, 3, 4]}"#).unwrap();
        assert_eq!(back, q(1.0, [2.0, 3.0, 4.0]));
    }

    fn arb_q() -> impl Strategy<Value = Quaternion> {
        (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64)
            .prop_map(|(a, b, c, d)| q(a, [b, c, d]))
    }

    fn arb_small_int_q() -> impl Strategy<Value = Quaternion> {
        (-20i32..20, -20i32..20, -20i32..20, -20i32..20)
            .prop_map(|(a, b, c, d)| q(a as f64, [b as f64, c as f64, d as f64]))
    }

    proptest! {
        #[test]
        fn exact_associativity(a in arb_q(), b in arb_q(), c in arb_q()) {
            let (a, b, c) = (a.to_exact(), b.to_exact(), c.to_exact());
            prop_assert_eq!(qmul(&qmul(&a, &b), &c), qmul(&a, &qmul(&b, &c)));
        }

        #[test]
        fn conj_is_anti_homomorphism(p in arb_small_int_q(), r in arb_small_int_q()) {
            prop_assert_eq!(conj(&qmul(&p, &r)), qmul(&conj(&r), &conj(&p)));
        }

        #[test]
        fn norm_multiplicative(p in arb_q(), r in arb_q()) {
            let lhs = modulus(&qmul(&p, &r));
            let rhs = modulus(&p) * modulus(&r);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn commutes_iff_parallel(p in arb_small_int_q(), r in arb_small_int_q()) {
            let parallel = cross3(&p.im, &r.im).iter().all(|c| *c == 0.0);
            prop_assert_eq!(commutes(&p, &r, 0.0), parallel);
            let commutator = qmul(&p, &r) - qmul(&r, &p);
            prop_assert_eq!(commutator.is_zero(), parallel);
        }
    }
}
