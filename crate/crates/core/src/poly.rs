//! Sparse polynomials in `x1, x2, x3` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::{exact, to_f64};

/// Exponent vector `[i, j, k]` standing for `x1^i x2^j x3^k`.
pub type Powers = [u32; 3];

/// Canonical sparse polynomial: no zero coefficients are ever stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PolyTerm>", into = "Vec<PolyTerm>")]
pub struct Poly {
    terms: BTreeMap<Powers, BigRational>,
}

/// One entry of the JSON polynomial format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coef: String,
    pub powers: Powers,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The coordinate function `x_{axis+1}`.
    pub fn var(axis: usize) -> Self {
        let mut powers = [0; 3];
        powers[axis] = 1;
        Self::monomial(BigRational::one(), powers)
    }

    pub fn monomial(c: BigRational, powers: Powers) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(powers, c);
        }
        Self { terms }
    }

    /// Linear form `c . x`.
    pub fn linear(c: &[BigRational; 3]) -> Self {
        (0..3).fold(Self::zero(), |acc, i| acc + Self::var(i).scale(&c[i]))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BigRational, Powers)>) -> Self {
        let mut p = Self::zero();
        for (c, powers) in terms {
            p.add_term(powers, c);
        }
        p
    }

    fn add_term(&mut self, powers: Powers, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(powers).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&powers);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Powers, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|p| p.iter().sum()).max().unwrap_or(0)
    }

    pub fn check_degree(&self, cap: u32) -> Result<()> {
        let degree = self.degree();
        if degree > cap {
            return Err(Error::DegreeCap { degree, cap });
        }
        Ok(())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Partial derivative with respect to `x_{axis+1}`.
    pub fn deriv(&self, axis: usize) -> Self {
        let mut out = Self::zero();
        for (powers, c) in &self.terms {
            let e = powers[axis];
            if e == 0 {
                continue;
            }
            let mut lowered = *powers;
            lowered[axis] -= 1;
            out.add_term(lowered, c * BigRational::from_integer(e.into()));
        }
        out
    }

    pub fn eval_exact(&self, x: &[BigRational; 3]) -> BigRational {
        let max_pow = self.terms.keys().flat_map(|p| p.iter().copied()).max().unwrap_or(0);
        // Powers table per coordinate keeps the evaluation cost linear in the term count.
        let table: Vec<Vec<BigRational>> = x
            .iter()
            .map(|xi| {
                let mut v = Vec::with_capacity(max_pow as usize + 1);
                v.push(BigRational::one());
                for k in 1..=max_pow as usize {
                    let next = &v[k - 1] * xi;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = BigRational::zero();
        for (p, c) in &self.terms {
            acc += c * &table[0][p[0] as usize] * &table[1][p[1] as usize] * &table[2][p[2] as usize];
        }
        acc
    }

    /// Evaluates at a double-precision point exactly, rounding once at the end.
    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        if self.terms.is_empty() {
            return 0.0;
        }
        to_f64(&self.eval_exact(&[exact(x[0]), exact(x[1]), exact(x[2])]))
    }

    /// Coefficients rounded to double precision, for bulk sampling.
    pub fn to_f64_terms(&self) -> Vec<(Powers, f64)> {
        self.terms.iter().map(|(p, c)| (*p, to_f64(c))).collect()
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.terms.values().map(|c| to_f64(&c.abs())).fold(0.0, f64::max)
    }
}

/// Double-precision evaluation of a term list from [`Poly::to_f64_terms`].
pub fn eval_f64_terms(terms: &[(Powers, f64)], x: &[f64; 3]) -> f64 {
    terms
        .iter()
        .map(|(p, c)| c * x[0].powi(p[0] as i32) * x[1].powi(p[1] as i32) * x[2].powi(p[2] as i32))
        .sum()
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"-0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Ok(r) = BigRational::from_str(s) {
        return Ok(r);
    }
    let bad = || Error::Parse(format!("bad rational literal {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').ok_or_else(bad)?;
    if frac.is_empty() && int.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num = num_bigint::BigInt::from_str(&digits).map_err(|_| bad())?;
    let den = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

impl TryFrom<Vec<PolyTerm>> for Poly {
    type Error = Error;
    fn try_from(terms: Vec<PolyTerm>) -> Result<Self> {
        let mut p = Poly::zero();
        for t in terms {
            p.add_term(t.powers, parse_rational(&t.coef)?);
        }
        Ok(p)
    }
}

impl From<Poly> for Vec<PolyTerm> {
    fn from(p: Poly) -> Self {
        p.terms
            .into_iter()
            .map(|(powers, c)| PolyTerm { coef: c.to_string(), powers })
            .collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (p, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (i, e) in p.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(*p, c.clone());
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(*p, -c.clone());
        }
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (pa, ca) in &self.terms {
            for (pb, cb) in &rhs.terms {
                let powers = [pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]];
                out.add_term(powers, ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let x = Poly::var(0);
        let p = &x - &x;
        assert!(p.is_zero());
        assert_eq!(p.len(), 0);
        let q = Poly::from_terms([(r(1, 2), [1, 0, 0]), (r(-1, 2), [1, 0, 0]), (r(0, 1), [0, 2, 0])]);
        assert!(q.is_zero());
    }

    #[test]
    fn evaluates_exactly() {
        let x1 = Poly::var(0);
        assert_eq!((&x1 * &x1).eval(&[3.0, 0.0, 0.0]), 9.0);
        let p = Poly::from_terms([(r(1, 3), [0, 0, 0])]);
        assert_eq!(p.eval_exact(&[r(0, 1), r(0, 1), r(0, 1)]), r(1, 3));
    }

    #[test]
    fn derivative_and_product() {
        // d/dx1 (x1^2 x3) = 2 x1 x3
        let p = Poly::from_terms([(r(1, 1), [2, 0, 1])]);
        assert_eq!(p.deriv(0), Poly::from_terms([(r(2, 1), [1, 0, 1])]));
        assert!(p.deriv(1).is_zero());
        let sq = &(&Poly::var(0) + &Poly::var(1)) * &(&Poly::var(0) - &Poly::var(1));
        assert_eq!(sq, &(&Poly::var(0) * &Poly::var(0)) - &(&Poly::var(1) * &Poly::var(1)));
        assert_eq!(sq.degree(), 2);
    }

    #[test]
    fn json_round_trip_and_literals() {
        let json = r#"[{"coef":"3/4","powers":[1,0,2]},{"coef":"-2","powers":[0,0,0]},{"coef":"0.5","powers":[0,1,0]}]"#;
        let p: Poly = serde_json::from_str(json).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.eval(&[2.0, 2.0, 1.0]), 0.5);
        let back: Poly = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Poly>(r#"[{"coef":"x","powers":[0,0,0]}]"#).is_err());
        assert_eq!(parse_rational("-0.25").unwrap(), r(-1, 4));
    }

    #[test]
    fn degree_cap() {
        let p = Poly::from_terms([(r(1, 1), [10, 5, 2])]);
        assert!(p.check_degree(16).is_err());
        assert!(p.check_degree(17).is_ok());
    }
}
