//! Exact arithmetic in Q(√2, √3, i).
//!
//! The fixed-angle Hardy interferometer only uses splitter amplitudes
//! 1/√2, 1/√3 and √(2/3), so every transfer coefficient and every amplitude
//! lives in this field. Elements are stored as rational coordinates over the
//! basis {1, √2, √3, √6}, separately for real and imaginary parts.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::Scalar;

const RADICANDS: [i64; 4] = [1, 2, 3, 6];

/// Product of basis elements `i` and `j`: `(factor, k)` with
/// `b_i * b_j = factor * b_k`.
const fn basis_product(i: usize, j: usize) -> (i64, usize) {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    match (lo, hi) {
        (0, k) => (1, k),
        (1, 1) => (2, 0),
        (1, 2) => (1, 3),
        (1, 3) => (2, 2),
        (2, 2) => (3, 0),
        (2, 3) => (3, 1),
        _ => (6, 0),
    }
}

/// A real number a + b√2 + c√3 + d√6 with rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    coords: [BigRational; 4],
}

impl Surd {
    pub fn rational(value: BigRational) -> Self {
        let mut coords: [BigRational; 4] = Default::default();
        coords[0] = value;
        Self { coords }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(num.into(), den.into()))
    }

    /// `coef * √radicand` for radicand in {1, 2, 3, 6}.
    pub fn radical(coef: BigRational, radicand: i64) -> Option<Self> {
        let idx = RADICANDS.iter().position(|&r| r == radicand)?;
        let mut coords: [BigRational; 4] = Default::default();
        coords[idx] = coef;
        Some(Self { coords })
    }

    /// Square root of a non-negative rational, when it lies in the field.
    pub fn sqrt_rational(value: &BigRational) -> Option<Self> {
        if value.is_negative() {
            return None;
        }
        if value.is_zero() {
            return Some(Self::zero());
        }
        for &k in &RADICANDS {
            // value = q^2 * k  <=>  value / k is a rational square
            let reduced = value / BigRational::from_integer(k.into());
            if let Some(root) = rational_sqrt(&reduced) {
                return Self::radical(root, k);
            }
        }
        None
    }

    pub fn coords(&self) -> &[BigRational; 4] {
        &self.coords
    }

    /// The rational value, when all irrational coordinates vanish.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.coords
            .iter()
            .zip(RADICANDS)
            .map(|(c, k)| c.to_f64().unwrap_or(f64::NAN) * (k as f64).sqrt())
            .sum()
    }
}

fn rational_sqrt(value: &BigRational) -> Option<BigRational> {
    let num = value.numer();
    let den = value.denom();
    let rn = exact_isqrt(num)?;
    let rd = exact_isqrt(den)?;
    Some(BigRational::new(rn, rd))
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Self {
            coords: Default::default(),
        }
    }

    fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

impl One for Surd {
    fn one() -> Self {
        Self::rational(BigRational::one())
    }
}

impl Add for Surd {
    type Output = Surd;

    fn add(mut self, rhs: Surd) -> Surd {
        for (a, b) in self.coords.iter_mut().zip(rhs.coords) {
            *a += b;
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;

    fn sub(mut self, rhs: Surd) -> Surd {
        for (a, b) in self.coords.iter_mut().zip(rhs.coords) {
            *a -= b;
        }
        self
    }
}

impl Neg for Surd {
    type Output = Surd;

    fn neg(mut self) -> Surd {
        for a in self.coords.iter_mut() {
            *a = -a.clone();
        }
        self
    }
}

impl Mul for Surd {
    type Output = Surd;

    fn mul(self, rhs: Surd) -> Surd {
        let mut out = Surd::zero();
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let (factor, k) = basis_product(i, j);
                out.coords[k] += a * b * BigRational::from_integer(factor.into());
            }
        }
        out
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (c, k) in self.coords.iter().zip(RADICANDS) {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            if k == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})√{k}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A complex number with [`Surd`] real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: Surd,
    pub im: Surd,
}

impl ExactComplex {
    pub fn new(re: Surd, im: Surd) -> Self {
        Self { re, im }
    }

    pub fn real(re: Surd) -> Self {
        Self {
            re,
            im: Surd::zero(),
        }
    }

    pub fn i() -> Self {
        Self {
            re: Surd::zero(),
            im: Surd::one(),
        }
    }

    /// `|z|^2`, a real element of the field.
    pub fn norm_sqr(&self) -> Surd {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    /// Rational value, when both the imaginary part and all radicals vanish.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.im.is_zero() {
            self.re.as_rational()
        } else {
            None
        }
    }
}

impl Zero for ExactComplex {
    fn zero() -> Self {
        Self::real(Surd::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for ExactComplex {
    fn one() -> Self {
        Self::real(Surd::one())
    }
}

impl Add for ExactComplex {
    type Output = ExactComplex;

    fn add(self, rhs: ExactComplex) -> ExactComplex {
        ExactComplex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for ExactComplex {
    type Output = ExactComplex;

    fn sub(self, rhs: ExactComplex) -> ExactComplex {
        ExactComplex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for ExactComplex {
    type Output = ExactComplex;

    fn neg(self) -> ExactComplex {
        ExactComplex::new(-self.re, -self.im)
    }
}

impl Mul for ExactComplex {
    type Output = ExactComplex;

    fn mul(self, rhs: ExactComplex) -> ExactComplex {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        ExactComplex::new(re, im)
    }
}

impl Scalar for ExactComplex {
    fn conj(&self) -> Self {
        ExactComplex::new(self.re.clone(), -self.im.clone())
    }

    fn from_integer(n: i64) -> Self {
        Self::real(Surd::from_ratio(n, 1))
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Debug for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "i[{}]", self.im)
        } else {
            write!(f, "{} + i[{}]", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn radicals_multiply_into_the_basis() {
        let s2 = Surd::radical(q(1, 1), 2).unwrap();
        let s3 = Surd::radical(q(1, 1), 3).unwrap();
        let s6 = s2.clone() * s3.clone();
        assert_eq!(s6, Surd::radical(q(1, 1), 6).unwrap());
        assert_eq!(s6.clone() * s6.clone(), Surd::from_ratio(6, 1));
        assert_eq!(s6 * s2, Surd::radical(q(2, 1), 3).unwrap());
    }

    #[test]
    fn sqrt_of_rationals() {
        assert_eq!(Surd::sqrt_rational(&q(1, 2)), Surd::radical(q(1, 2), 2));
        assert_eq!(Surd::sqrt_rational(&q(2, 3)), Surd::radical(q(1, 3), 6));
        assert_eq!(Surd::sqrt_rational(&q(9, 4)), Some(Surd::from_ratio(3, 2)));
        assert_eq!(Surd::sqrt_rational(&q(5, 1)), None);
        assert_eq!(Surd::sqrt_rational(&q(-1, 1)), None);
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = ExactComplex::i();
        assert_eq!(i.clone() * i, -ExactComplex::one());
    }

    #[test]
    fn float_view_matches() {
        let z = ExactComplex::new(
            Surd::radical(q(1, 3), 3).unwrap(),
            Surd::radical(q(1, 3), 6).unwrap(),
        );
        let c = z.to_complex();
        assert!((c.re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((c.im - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(z.norm_sqr(), Surd::from_ratio(1, 1));
    }
}
