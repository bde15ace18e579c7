//! Differential and shift operator algebras with rational-function
//! coefficients.

mod diff;
mod shift;

pub use diff::DiffOp;
pub use shift::{ShiftKind, ShiftOp};

use exactalg::{Field, Gaussian, RatFunc, Rational, UniPoly};
use num_traits::{One, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpError {
    #[error("operators belong to different algebras")]
    AlgebraMismatch,
    #[error("image of a polynomial is not a polynomial in eta")]
    NonPolynomialImage,
}

/// How the sinusoidal coordinate is written in the operator's working variable `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaBinding {
    /// η = v
    Identity,
    /// η = v²
    Square,
    /// η = (v + 1/v)/2
    Joukowski,
}

impl EtaBinding {
    /// η as a rational function of `v`.
    pub fn eta<F: Field>(self) -> RatFunc<F> {
        match self {
            EtaBinding::Identity => RatFunc::from_poly(UniPoly::x()),
            EtaBinding::Square => RatFunc::from_poly(UniPoly::monomial(F::one(), 2)),
            EtaBinding::Joukowski => RatFunc::new(
                UniPoly::new(vec![F::one(), F::zero(), F::one()]),
                UniPoly::monomial(F::from_i64(2), 1),
            ),
        }
    }

    /// Rewrites a polynomial in η as a function of the working variable.
    pub fn embed<F: Field>(self, p: &UniPoly) -> RatFunc<F> {
        let p = p.map(F::from_rational);
        match self {
            EtaBinding::Identity => RatFunc::from_poly(p),
            EtaBinding::Square => {
                let mut v = vec![F::zero(); 2 * p.coeffs().len()];
                for (k, c) in p.coeffs().iter().enumerate() {
                    v[2 * k] = c.clone();
                }
                RatFunc::from_poly(UniPoly::new(v))
            }
            EtaBinding::Joukowski => {
                // p((v²+1)/(2v)) = Σ c_k (v²+1)^k (2v)^(d−k) / (2v)^d
                let Some(d) = p.degree() else { return RatFunc::zero() };
                let sq = UniPoly::new(vec![F::one(), F::zero(), F::one()]);
                let two_v = UniPoly::monomial(F::from_i64(2), 1);
                let mut num = UniPoly::zero();
                for (k, c) in p.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    num = &num + &(&sq.pow(k as u32) * &two_v.pow((d - k) as u32)).scale(c);
                }
                RatFunc::new(num, two_v.pow(d as u32))
            }
        }
    }

    /// Inverse of [`embed`](Self::embed): recovers a real polynomial in η,
    /// or `None` when `f` is not of that form.
    pub fn extract<F: Field>(self, f: &RatFunc<F>) -> Option<UniPoly> {
        if f.is_zero() {
            return Some(UniPoly::zero());
        }
        let real = |c: &F| -> Option<Rational> {
            let parts = c.rational_parts();
            parts[1..].iter().all(|x| x.is_zero()).then(|| parts[0].clone())
        };
        match self {
            EtaBinding::Identity => {
                let p = f.as_poly()?;
                let v: Option<Vec<Rational>> = p.coeffs().iter().map(real).collect();
                Some(UniPoly::new(v?))
            }
            EtaBinding::Square => {
                let p = f.as_poly()?;
                let mut v = Vec::new();
                for (k, c) in p.coeffs().iter().enumerate() {
                    if k % 2 == 1 {
                        if !c.is_zero() {
                            return None;
                        }
                    } else {
                        v.push(real(c)?);
                    }
                }
                Some(UniPoly::new(v))
            }
            EtaBinding::Joukowski => {
                // f must be N(v)/v^m with N palindromic of degree 2m.
                let den = f.den();
                let m = den.degree()?;
                if den != &UniPoly::monomial(F::one(), m) {
                    return None;
                }
                let mut rest = f.clone();
                let mut out = vec![Rational::zero(); m + 1];
                for d in (0..=m).rev() {
                    let lead = if rest.is_zero() {
                        F::zero()
                    } else {
                        let rd = rest.den().degree().unwrap_or(0);
                        // coefficient of v^d in N/v^rd
                        rest.num().coeff(d + rd)
                    };
                    if lead.is_zero() {
                        continue;
                    }
                    // η^d = v^d/2^d + lower
                    let c = lead.fmul(&F::from_i64(2).powu(d as u32));
                    out[d] = real(&c)?;
                    let term = self.embed::<F>(&UniPoly::monomial(out[d].clone(), d));
                    rest = &rest - &term;
                }
                rest.is_zero().then(|| UniPoly::new(out))
            }
        }
    }
}

/// Common interface of the operator algebras.
pub trait Operator: Clone + fmt::Debug + Send + Sync + Sized {
    type F: Field;

    fn zero_like(&self) -> Self;
    /// Multiplication by `f(v)`, in the same algebra as `self`.
    fn mul_like(&self, f: RatFunc<Self::F>) -> Self;
    fn compose(&self, o: &Self) -> Result<Self, OpError>;
    fn add(&self, o: &Self) -> Result<Self, OpError>;
    fn scale(&self, c: &Self::F) -> Self;
    fn apply(&self, f: &RatFunc<Self::F>) -> RatFunc<Self::F>;
    /// Nonzero coefficients keyed by derivative order or shift index.
    fn terms(&self) -> Vec<(i64, &RatFunc<Self::F>)>;
    fn binding(&self) -> EtaBinding;

    fn is_zero(&self) -> bool {
        self.terms().is_empty()
    }

    fn identity_like(&self) -> Self {
        self.mul_like(RatFunc::one())
    }

    fn sub(&self, o: &Self) -> Result<Self, OpError> {
        self.add(&o.scale(&Self::F::one().fneg()))
    }

    /// Multiplication by a polynomial in η.
    fn mul_eta_poly(&self, p: &UniPoly) -> Self {
        self.mul_like(self.binding().embed(p))
    }

    /// Action on a polynomial in η; the image must again be one.
    fn apply_poly(&self, p: &UniPoly) -> Result<UniPoly, OpError> {
        let b = self.binding();
        b.extract(&self.apply(&b.embed(p))).ok_or(OpError::NonPolynomialImage)
    }
}

pub fn commutator<O: Operator>(a: &O, b: &O) -> Result<O, OpError> {
    a.compose(b)?.sub(&b.compose(a)?)
}

/// Powers of a fixed operator, computed on demand and kept.
#[derive(Debug, Clone)]
pub struct PowerCache<O: Operator> {
    powers: Vec<O>,
}

impl<O: Operator> PowerCache<O> {
    pub fn new(h: O) -> Self {
        let id = h.identity_like();
        PowerCache { powers: vec![id, h] }
    }

    pub fn base(&self) -> &O {
        &self.powers[1]
    }

    pub fn get(&mut self, j: usize) -> Result<&O, OpError> {
        while self.powers.len() <= j {
            let next = self.powers.last().unwrap().compose(&self.powers[1])?;
            self.powers.push(next);
        }
        Ok(&self.powers[j])
    }

    /// `R(H)` for a polynomial with rational coefficients.
    pub fn poly_of(&mut self, r: &UniPoly) -> Result<O, OpError> {
        let mut acc = self.powers[0].zero_like();
        for (j, c) in r.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = self.get(j)?.scale(&O::F::from_rational(c));
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

/// `op ∘ R(H)`.
pub fn right_mul_poly_of_h<O: Operator>(op: &O, r: &UniPoly, h: &mut PowerCache<O>) -> Result<O, OpError> {
    op.compose(&h.poly_of(r)?)
}

/// Tagged union of the three concrete algebras.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorExpr {
    Diff(DiffOp),
    Wilson(ShiftOp<Gaussian>),
    AskeyWilson(ShiftOp<Rational>),
}

macro_rules! same_algebra {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $body:expr) => {
        match ($a, $b) {
            (OperatorExpr::Diff($x), OperatorExpr::Diff($y)) => Ok(OperatorExpr::Diff($body?)),
            (OperatorExpr::Wilson($x), OperatorExpr::Wilson($y)) => Ok(OperatorExpr::Wilson($body?)),
            (OperatorExpr::AskeyWilson($x), OperatorExpr::AskeyWilson($y)) => Ok(OperatorExpr::AskeyWilson($body?)),
            _ => Err(OpError::AlgebraMismatch),
        }
    };
}

impl OperatorExpr {
    pub fn compose(&self, o: &Self) -> Result<Self, OpError> {
        same_algebra!(self, o, |x, y| x.compose(y))
    }

    pub fn commutator(&self, o: &Self) -> Result<Self, OpError> {
        same_algebra!(self, o, |x, y| commutator(x, y))
    }

    pub fn add(&self, o: &Self) -> Result<Self, OpError> {
        same_algebra!(self, o, |x, y| Operator::add(x, y))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            OperatorExpr::Diff(x) => x.is_zero(),
            OperatorExpr::Wilson(x) => x.is_zero(),
            OperatorExpr::AskeyWilson(x) => x.is_zero(),
        }
    }

    pub fn binding(&self) -> EtaBinding {
        match self {
            OperatorExpr::Diff(x) => x.binding(),
            OperatorExpr::Wilson(x) => x.binding(),
            OperatorExpr::AskeyWilson(x) => x.binding(),
        }
    }

    pub fn apply_poly(&self, p: &UniPoly) -> Result<UniPoly, OpError> {
        match self {
            OperatorExpr::Diff(x) => x.apply_poly(p),
            OperatorExpr::Wilson(x) => x.apply_poly(p),
            OperatorExpr::AskeyWilson(x) => x.apply_poly(p),
        }
    }

    /// Multiplication by a polynomial in η within the same algebra.
    pub fn mul_eta_poly(&self, p: &UniPoly) -> Self {
        match self {
            OperatorExpr::Diff(x) => OperatorExpr::Diff(x.mul_eta_poly(p)),
            OperatorExpr::Wilson(x) => OperatorExpr::Wilson(x.mul_eta_poly(p)),
            OperatorExpr::AskeyWilson(x) => OperatorExpr::AskeyWilson(x.mul_eta_poly(p)),
        }
    }

    pub fn right_mul_poly_of_h(&self, r: &UniPoly, h: &OperatorExpr) -> Result<Self, OpError> {
        same_algebra!(self, h, |x, y| right_mul_poly_of_h(x, r, &mut PowerCache::new(y.clone())))
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorExpr::Diff(x) => write!(f, "{x}"),
            OperatorExpr::Wilson(x) => write!(f, "{x}"),
            OperatorExpr::AskeyWilson(x) => write!(f, "{x}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use exactalg::upoly::poly_i;
    use exactalg::{int, rat};

    #[test]
    fn joukowski_round_trip() {
        let p = UniPoly::new(vec![rat(1, 3), int(-2), int(0), rat(5, 2)]);
        let f: RatFunc = EtaBinding::Joukowski.embed(&p);
        assert_eq!(EtaBinding::Joukowski.extract(&f), Some(p.clone()));
        let g: RatFunc<Gaussian> = EtaBinding::Square.embed(&p);
        assert_eq!(EtaBinding::Square.extract(&g), Some(p));
    }

    #[test]
    fn extract_rejects_non_polynomials() {
        let f: RatFunc = RatFunc::new(poly_i(&[1]), poly_i(&[1, 1]));
        assert_eq!(EtaBinding::Identity.extract(&f), None);
        let odd: RatFunc = RatFunc::from_poly(poly_i(&[0, 1]));
        assert_eq!(EtaBinding::Square.extract(&odd), None);
        let v: RatFunc = RatFunc::from_poly(poly_i(&[0, 1]));
        assert_eq!(EtaBinding::Joukowski.extract(&v), None);
    }
}
