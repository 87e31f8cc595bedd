use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::algebra::poly::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Quotient of two polynomials in lowest terms with a monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    numerator: Polynomial,
    denominator: Polynomial,
}

impl RationalFunction {
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::SingularSystem);
        }
        if numerator.is_zero() {
            return Ok(RationalFunction {
                numerator,
                denominator: Polynomial::one(),
            });
        }
        let g = numerator.gcd(&denominator);
        let (num, den) = if g.is_constant() {
            (numerator, denominator)
        } else {
            (numerator.div_rem(&g).0, denominator.div_rem(&g).0)
        };
        let lead = den.leading().expect("nonzero denominator").recip();
        Ok(RationalFunction {
            numerator: num.scale(&lead),
            denominator: den.scale(&lead),
        })
    }

    pub fn polynomial(p: Polynomial) -> Self {
        RationalFunction {
            numerator: p,
            denominator: Polynomial::one(),
        }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.denominator
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator.is_constant()
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.denominator.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.numerator.eval(x) / d)
        }
    }

    /// First `n` Taylor coefficients at `z = 0`; `None` when 0 is a pole.
    pub fn taylor(&self, n: usize) -> Option<Vec<Rational>> {
        let d0 = self.denominator.coeff(0);
        if d0.is_zero() {
            return None;
        }
        let inv = d0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = self.numerator.coeff(k);
            for j in 1..=k {
                let dj = self.denominator.coeff(j);
                if !dj.is_zero() {
                    c -= dj * &out[k - j];
                }
            }
            out.push(c * &inv);
        }
        Some(out)
    }

    /// `a/b == c/d` checked by cross-multiplication.
    pub fn equals_fraction(&self, num: &Polynomial, den: &Polynomial) -> bool {
        &self.numerator * den == &self.denominator * num
    }
}

impl Add<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &self.numerator * &rhs.denominator + &rhs.numerator * &self.denominator,
            &self.denominator * &rhs.denominator,
        )
        .expect("product of nonzero denominators")
    }
}

impl Sub<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &self.numerator * &rhs.denominator - &rhs.numerator * &self.denominator,
            &self.denominator * &rhs.denominator,
        )
        .expect("product of nonzero denominators")
    }
}

impl Mul<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &self.numerator * &rhs.numerator,
            &self.denominator * &rhs.denominator,
        )
        .expect("product of nonzero denominators")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "({}) / ({})", self.numerator, self.denominator)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn reduces_to_lowest_terms() {
        // (z^2 - 1) / (2z - 2) = (z + 1) / 2 -> monic denominator 1
        let r = RationalFunction::new(p(&[-1, 0, 1]), p(&[-2, 2])).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.numerator(), &Polynomial::new(vec![crate::scalar::frac(1, 2); 2]));
        assert!(RationalFunction::new(p(&[1]), Polynomial::zero()).is_err());
    }

    #[test]
    fn geometric_series() {
        // 1 / (1 - 2z) = sum 2^k z^k
        let r = RationalFunction::new(p(&[1]), p(&[1, -2])).unwrap();
        let t = r.taylor(5).unwrap();
        assert_eq!(t, vec![int(1), int(2), int(4), int(8), int(16)]);
        assert_eq!(r.eval(&crate::scalar::frac(1, 2)), None);
        let sum = &r + &r;
        assert_eq!(sum.taylor(2).unwrap(), vec![int(2), int(4)]);
        let diff = &sum - &r;
        assert_eq!(diff, r);
        let prod = &r * &RationalFunction::polynomial(p(&[1, -2]));
        assert_eq!(prod, RationalFunction::polynomial(p(&[1])));
    }
}
