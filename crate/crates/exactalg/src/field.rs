use crate::rational::{format_rational, parse_rational, Rational};
use num_complex::Complex;
use num_traits::{One, Zero};
use std::fmt;

/// Exact coefficient field. Implemented for the rationals and for the
/// Gaussian rationals `Q(i)`, the two fields the operator algebras need.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Zero + One + Send + Sync + 'static {
    fn fadd(&self, o: &Self) -> Self;
    fn fsub(&self, o: &Self) -> Self;
    fn fmul(&self, o: &Self) -> Self;
    /// Panics on division by zero.
    fn fdiv(&self, o: &Self) -> Self;
    fn fneg(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Rational coordinates over `Q` (one for `Q`, two for `Q(i)`). Linear
    /// systems with rational unknowns split every equation along these.
    fn rational_parts(&self) -> Vec<Rational>;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.fmul(&base);
            }
            base = base.fmul(&base);
            e >>= 1;
        }
        acc
    }
}

impl Field for Rational {
    fn fadd(&self, o: &Self) -> Self {
        self + o
    }
    fn fsub(&self, o: &Self) -> Self {
        self - o
    }
    fn fmul(&self, o: &Self) -> Self {
        self * o
    }
    fn fdiv(&self, o: &Self) -> Self {
        self / o
    }
    fn fneg(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn rational_parts(&self) -> Vec<Rational> {
        vec![self.clone()]
    }
}

/// Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gaussian(pub Complex<Rational>);

impl Gaussian {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gaussian(Complex::new(re, im))
    }

    pub fn i() -> Self {
        Gaussian::new(Zero::zero(), One::one())
    }

    pub fn re(&self) -> &Rational {
        &self.0.re
    }

    pub fn im(&self) -> &Rational {
        &self.0.im
    }

    pub fn conj(&self) -> Self {
        Gaussian(self.0.conj())
    }

    /// Parses `"re"` or `"re,im"` (each part a `p/q` rational).
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.split_once(',') {
            Some((re, im)) => Ok(Gaussian::new(parse_rational(re)?, parse_rational(im)?)),
            None => Ok(Gaussian::new(parse_rational(s)?, Zero::zero())),
        }
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im.is_zero() {
            write!(f, "{}", format_rational(&self.0.re))
        } else {
            write!(f, "{},{}", format_rational(&self.0.re), format_rational(&self.0.im))
        }
    }
}

impl std::ops::Add for Gaussian {
    type Output = Gaussian;
    fn add(self, o: Gaussian) -> Gaussian {
        Gaussian(self.0 + o.0)
    }
}

impl std::ops::Mul for Gaussian {
    type Output = Gaussian;
    fn mul(self, o: Gaussian) -> Gaussian {
        Gaussian(self.0 * o.0)
    }
}

impl Zero for Gaussian {
    fn zero() -> Self {
        Gaussian(Complex::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.re.is_zero() && self.0.im.is_zero()
    }
}

impl One for Gaussian {
    fn one() -> Self {
        Gaussian(Complex::one())
    }
}

impl Field for Gaussian {
    fn fadd(&self, o: &Self) -> Self {
        Gaussian(&self.0 + &o.0)
    }
    fn fsub(&self, o: &Self) -> Self {
        Gaussian(&self.0 - &o.0)
    }
    fn fmul(&self, o: &Self) -> Self {
        Gaussian(&self.0 * &o.0)
    }
    fn fdiv(&self, o: &Self) -> Self {
        let n = o.0.norm_sqr();
        assert!(!n.is_zero(), "division by zero");
        let p = &self.0 * o.0.conj();
        Gaussian(Complex::new(p.re / &n, p.im / &n))
    }
    fn fneg(&self) -> Self {
        Gaussian(-self.0.clone())
    }
    fn from_rational(r: &Rational) -> Self {
        Gaussian::new(r.clone(), Zero::zero())
    }
    fn rational_parts(&self) -> Vec<Rational> {
        vec![self.0.re.clone(), self.0.im.clone()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn gaussian_division_roundtrip() {
        let a = Gaussian::new(rat(1, 2), rat(-3, 1));
        let b = Gaussian::new(rat(2, 1), rat(5, 7));
        assert_eq!(Field::fdiv(&Field::fmul(&a, &b), &b), a);
        assert_eq!(Field::fmul(&Gaussian::i(), &Gaussian::i()), Gaussian::from_i64(-1));
    }

    #[test]
    fn gaussian_parse() {
        assert_eq!(Gaussian::parse("1/2,-3").unwrap(), Gaussian::new(rat(1, 2), rat(-3, 1)));
        assert_eq!(Gaussian::parse("4").unwrap(), Gaussian::from_i64(4));
    }
}
