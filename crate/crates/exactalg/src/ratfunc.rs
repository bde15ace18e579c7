use crate::field::Field;
use crate::rational::Rational;
use crate::upoly::UniPoly;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Univariate rational function in lowest terms with a monic denominator.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFunc<F: Field = Rational> {
    num: UniPoly<F>,
    den: UniPoly<F>,
}

impl<F: Field> RatFunc<F> {
    /// Panics if `den` is zero.
    pub fn new(num: UniPoly<F>, den: UniPoly<F>) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let lead = d.leading().unwrap().clone();
        if !lead.is_one() {
            let inv = F::one().fdiv(&lead);
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RatFunc { num: n, den: d }
    }

    pub fn zero() -> Self {
        RatFunc { num: UniPoly::zero(), den: UniPoly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(UniPoly::one())
    }

    pub fn constant(c: F) -> Self {
        Self::from_poly(UniPoly::constant(c))
    }

    pub fn from_poly(p: UniPoly<F>) -> Self {
        RatFunc { num: p, den: UniPoly::one() }
    }

    pub fn num(&self) -> &UniPoly<F> {
        &self.num
    }

    pub fn den(&self) -> &UniPoly<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial itself when the denominator is one.
    pub fn as_poly(&self) -> Option<&UniPoly<F>> {
        self.den.is_constant().then_some(&self.num)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &UniPoly<F>) -> Self {
        Self::new(&self.num * p, self.den.clone())
    }

    pub fn inv(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &F) -> Option<F> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x).fdiv(&d))
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(n, &self.den * &self.den)
    }

    /// `f(x + c)`
    pub fn shift(&self, c: &F) -> Self {
        Self::new(self.num.shift(c), self.den.shift(c))
    }

    /// `f(s·x)`
    pub fn scale_arg(&self, s: &F) -> Self {
        Self::new(self.num.scale_arg(s), self.den.scale_arg(s))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> RatFunc<G> {
        RatFunc::new(self.num.map(&f), self.den.map(&f))
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.den.is_constant() {
            self.num.to_string_in(var)
        } else {
            format!("({})/({})", self.num.to_string_in(var), self.den.to_string_in(var))
        }
    }
}

impl<F: Field> fmt::Display for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("x"))
    }
}

impl<F: Field> Add for &RatFunc<F> {
    type Output = RatFunc<F>;
    fn add(self, o: &RatFunc<F>) -> RatFunc<F> {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone());
        }
        let g = self.den.gcd(&o.den);
        let a = self.den.div_exact(&g).unwrap();
        let b = o.den.div_exact(&g).unwrap();
        RatFunc::new(&(&self.num * &b) + &(&o.num * &a), &a * &o.den)
    }
}

impl<F: Field> Neg for &RatFunc<F> {
    type Output = RatFunc<F>;
    fn neg(self) -> RatFunc<F> {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl<F: Field> Sub for &RatFunc<F> {
    type Output = RatFunc<F>;
    fn sub(self, o: &RatFunc<F>) -> RatFunc<F> {
        self + &(-o)
    }
}

impl<F: Field> Mul for &RatFunc<F> {
    type Output = RatFunc<F>;
    fn mul(self, o: &RatFunc<F>) -> RatFunc<F> {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_constant() && o.den.is_constant() {
            return RatFunc::from_poly(&self.num * &o.num);
        }
        // Cross-cancel before multiplying to keep degrees small.
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = o.den.div_exact(&g1).unwrap();
        let n2 = o.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        RatFunc::new(&n1 * &n2, &d1 * &d2)
    }
}

impl<F: Field> Div for &RatFunc<F> {
    type Output = RatFunc<F>;
    fn div(self, o: &RatFunc<F>) -> RatFunc<F> {
        self * &o.inv()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<F: Field> $tr for RatFunc<F> {
            type Output = RatFunc<F>;
            fn $m(self, o: RatFunc<F>) -> RatFunc<F> {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::upoly::poly_i;

    #[test]
    fn reduces_common_factor() {
        let f = RatFunc::new(poly_i(&[-1, 0, 1]), poly_i(&[2, 2]));
        assert_eq!(f.num(), &UniPoly::new(vec![rat(-1, 2), rat(1, 2)]));
        assert_eq!(f.den(), &UniPoly::one());
        assert!(f.as_poly().is_some());
    }

    #[test]
    fn arithmetic_and_eval() {
        let a = RatFunc::new(poly_i(&[1]), poly_i(&[1, 1]));
        let b = RatFunc::new(poly_i(&[1]), poly_i(&[-1, 1]));
        let s = &a + &b;
        assert_eq!(s, RatFunc::new(poly_i(&[0, 2]), poly_i(&[-1, 0, 1])));
        assert_eq!(s.eval(&int(2)), Some(rat(4, 3)));
        assert_eq!(s.eval(&int(1)), None);
        assert_eq!(&(&a * &b) / &b, a);
    }

    #[test]
    fn derivative_quotient_rule() {
        let f = RatFunc::new(poly_i(&[0, 1]), poly_i(&[1, 1]));
        assert_eq!(f.derivative(), RatFunc::new(poly_i(&[1]), poly_i(&[1, 2, 1])));
    }
}
