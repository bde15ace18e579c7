use super::{EtaBinding, OpError, Operator};
use exactalg::{Field, RatFunc, Rational};
use std::fmt;

/// `Σ_k f_k(η) ∂^k` with rational-function coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct DiffOp<F: Field = Rational> {
    coeffs: Vec<RatFunc<F>>,
}

fn binomial<F: Field>(n: usize, k: usize) -> F {
    let mut acc = 1i128;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    F::from_i64(acc as i64)
}

impl<F: Field> DiffOp<F> {
    pub fn new(mut coeffs: Vec<RatFunc<F>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DiffOp { coeffs }
    }

    pub fn zero() -> Self {
        DiffOp { coeffs: Vec::new() }
    }

    pub fn multiplication(f: RatFunc<F>) -> Self {
        Self::new(vec![f])
    }

    /// `∂^k`
    pub fn derivative(k: usize) -> Self {
        let mut v = vec![RatFunc::zero(); k + 1];
        v[k] = RatFunc::one();
        Self::new(v)
    }

    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> RatFunc<F> {
        self.coeffs.get(k).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn coeffs(&self) -> &[RatFunc<F>] {
        &self.coeffs
    }

    fn combine(&self, o: &Self, sign: &F) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|k| {
                let b = o.coeff(k);
                if b.is_zero() {
                    self.coeff(k)
                } else {
                    &self.coeff(k) + &b.scale(sign)
                }
            })
            .collect();
        Self::new(v)
    }

    /// Leibniz rule: `∂^k ∘ g = Σ_j C(k,j) g^(j) ∂^(k−j)`.
    pub fn compose_with(&self, o: &Self) -> Self {
        let (Some(ka), Some(kb)) = (self.order(), o.order()) else {
            return Self::zero();
        };
        // derivs[l][j] = j-th derivative of o's l-th coefficient
        let derivs: Vec<Vec<RatFunc<F>>> = o
            .coeffs
            .iter()
            .map(|c| {
                let mut v = vec![c.clone()];
                for _ in 0..ka {
                    let next = if v.last().unwrap().is_zero() { RatFunc::zero() } else { v.last().unwrap().derivative() };
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = vec![RatFunc::zero(); ka + kb + 1];
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (l, dl) in derivs.iter().enumerate() {
                for (j, d) in dl.iter().enumerate().take(k + 1) {
                    if d.is_zero() {
                        continue;
                    }
                    let term = (a * d).scale(&binomial::<F>(k, j));
                    let slot = &mut out[k - j + l];
                    *slot = &*slot + &term;
                }
            }
        }
        Self::new(out)
    }

    pub fn apply_to(&self, f: &RatFunc<F>) -> RatFunc<F> {
        let mut acc = RatFunc::zero();
        let mut d = f.clone();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                d = d.derivative();
            }
            if !a.is_zero() && !d.is_zero() {
                acc = &acc + &(a * &d);
            }
        }
        acc
    }
}

impl<F: Field> Operator for DiffOp<F> {
    type F = F;

    fn zero_like(&self) -> Self {
        Self::zero()
    }

    fn mul_like(&self, f: RatFunc<F>) -> Self {
        Self::multiplication(f)
    }

    fn compose(&self, o: &Self) -> Result<Self, OpError> {
        Ok(self.compose_with(o))
    }

    fn add(&self, o: &Self) -> Result<Self, OpError> {
        Ok(self.combine(o, &F::one()))
    }

    fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.scale(c)).collect())
    }

    fn apply(&self, f: &RatFunc<F>) -> RatFunc<F> {
        self.apply_to(f)
    }

    fn terms(&self) -> Vec<(i64, &RatFunc<F>)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k as i64, c)).collect()
    }

    fn binding(&self) -> EtaBinding {
        EtaBinding::Identity
    }
}

impl<F: Field> fmt::Display for DiffOp<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms()
            .into_iter()
            .map(|(k, c)| match k {
                0 => format!("[{}]", c.to_string_in("eta")),
                1 => format!("[{}]∂", c.to_string_in("eta")),
                _ => format!("[{}]∂^{k}", c.to_string_in("eta")),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::commutator;
    use exactalg::upoly::poly_i;
    use exactalg::{int, UniPoly};

    fn mul(c: &[i64]) -> DiffOp {
        DiffOp::multiplication(RatFunc::from_poly(poly_i(c)))
    }

    #[test]
    fn canonical_commutation() {
        let d = DiffOp::derivative(1);
        let eta = mul(&[0, 1]);
        let expect = DiffOp::new(vec![RatFunc::one(), RatFunc::from_poly(poly_i(&[0, 1]))]);
        assert_eq!(d.compose_with(&eta), expect);
        assert_eq!(commutator(&DiffOp::derivative(2), &eta).unwrap(), DiffOp::derivative(1).scale(&int(2)));
    }

    #[test]
    fn apply_matches_composition() {
        let a = DiffOp::new(vec![RatFunc::from_poly(poly_i(&[1, 2])), RatFunc::from_poly(poly_i(&[0, 0, 1]))]);
        let b = DiffOp::new(vec![RatFunc::zero(), RatFunc::zero(), RatFunc::from_poly(poly_i(&[3, 1]))]);
        let p = UniPoly::new((0..6).map(|k| int(k * k - 3)).collect());
        let lhs = a.compose_with(&b).apply_poly(&p).unwrap();
        let rhs = a.apply_poly(&b.apply_poly(&p).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
