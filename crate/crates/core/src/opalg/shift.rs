use super::{EtaBinding, OpError, Operator};
use exactalg::{Field, RatFunc};
use std::collections::BTreeMap;
use std::fmt;

/// How `T_s` acts on the working variable.
#[derive(Clone, PartialEq, Debug)]
pub enum ShiftKind<F: Field> {
    /// `v → v + s·step` (Wilson: step = −i).
    Additive { step: F },
    /// `v → q^s·v` (Askey-Wilson).
    Multiplicative { q: F },
}

/// `Σ_s f_s(v) T_s`.
#[derive(Clone, PartialEq, Debug)]
pub struct ShiftOp<F: Field> {
    kind: ShiftKind<F>,
    coeffs: BTreeMap<i64, RatFunc<F>>,
}

impl<F: Field> ShiftOp<F> {
    pub fn new(kind: ShiftKind<F>, coeffs: impl IntoIterator<Item = (i64, RatFunc<F>)>) -> Self {
        let mut m = BTreeMap::new();
        for (s, c) in coeffs {
            let e: &mut RatFunc<F> = m.entry(s).or_insert_with(RatFunc::zero);
            *e = &*e + &c;
        }
        m.retain(|_, c| !c.is_zero());
        ShiftOp { kind, coeffs: m }
    }

    pub fn kind(&self) -> &ShiftKind<F> {
        &self.kind
    }

    pub fn coeff(&self, s: i64) -> RatFunc<F> {
        self.coeffs.get(&s).cloned().unwrap_or_else(RatFunc::zero)
    }

    /// `T_s` alone.
    pub fn shift(kind: ShiftKind<F>, s: i64) -> Self {
        Self::new(kind, [(s, RatFunc::one())])
    }

    /// `f` with its argument moved by `T_s`.
    pub fn shifted(&self, f: &RatFunc<F>, s: i64) -> RatFunc<F> {
        if s == 0 || f.is_zero() {
            return f.clone();
        }
        match &self.kind {
            ShiftKind::Additive { step } => f.shift(&step.fmul(&F::from_i64(s))),
            ShiftKind::Multiplicative { q } => {
                let qs = q.powu(s.unsigned_abs() as u32);
                let qs = if s < 0 { F::one().fdiv(&qs) } else { qs };
                f.scale_arg(&qs)
            }
        }
    }

    fn check(&self, o: &Self) -> Result<(), OpError> {
        if self.kind == o.kind {
            Ok(())
        } else {
            Err(OpError::AlgebraMismatch)
        }
    }
}

impl<F: Field> Operator for ShiftOp<F> {
    type F = F;

    fn zero_like(&self) -> Self {
        Self::new(self.kind.clone(), [])
    }

    fn mul_like(&self, f: RatFunc<F>) -> Self {
        Self::new(self.kind.clone(), [(0, f)])
    }

    /// `(f T_a) ∘ (g T_b) = f · g(T_a v) · T_{a+b}`.
    fn compose(&self, o: &Self) -> Result<Self, OpError> {
        self.check(o)?;
        let mut out = Vec::new();
        for (a, f) in &self.coeffs {
            for (b, g) in &o.coeffs {
                out.push((a + b, f * &self.shifted(g, *a)));
            }
        }
        Ok(Self::new(self.kind.clone(), out))
    }

    fn add(&self, o: &Self) -> Result<Self, OpError> {
        self.check(o)?;
        let all = self.coeffs.iter().chain(&o.coeffs).map(|(s, c)| (*s, c.clone()));
        Ok(Self::new(self.kind.clone(), all))
    }

    fn scale(&self, c: &F) -> Self {
        Self::new(self.kind.clone(), self.coeffs.iter().map(|(s, f)| (*s, f.scale(c))))
    }

    fn apply(&self, f: &RatFunc<F>) -> RatFunc<F> {
        self.coeffs.iter().fold(RatFunc::zero(), |acc, (s, c)| &acc + &(c * &self.shifted(f, *s)))
    }

    fn terms(&self) -> Vec<(i64, &RatFunc<F>)> {
        self.coeffs.iter().map(|(s, c)| (*s, c)).collect()
    }

    fn binding(&self) -> EtaBinding {
        match self.kind {
            ShiftKind::Additive { .. } => EtaBinding::Square,
            ShiftKind::Multiplicative { .. } => EtaBinding::Joukowski,
        }
    }
}

impl<F: Field> fmt::Display for ShiftOp<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = match self.kind {
            ShiftKind::Additive { .. } => "x",
            ShiftKind::Multiplicative { .. } => "z",
        };
        let parts: Vec<String> =
            self.coeffs.iter().map(|(s, c)| format!("[{}]T_{s}", c.to_string_in(var))).collect();
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
    use exactalg::{rat, Gaussian, Rational, UniPoly};

    fn wilson() -> ShiftKind<Gaussian> {
        ShiftKind::Additive { step: Gaussian::new(rat(0, 1), rat(-1, 1)) }
    }

    #[test]
    fn shifts_compose_and_invert() {
        let k = ShiftKind::Multiplicative { q: rat(1, 4) };
        let t1 = ShiftOp::<Rational>::shift(k.clone(), 1);
        let tm = ShiftOp::shift(k.clone(), -1);
        assert_eq!(t1.compose(&tm).unwrap(), t1.identity_like());
        let f = RatFunc::from_poly(poly_i(&[1, 2]));
        let g = RatFunc::from_poly(poly_i(&[0, 0, 3]));
        let a = ShiftOp::new(k.clone(), [(1, f.clone())]);
        let b = ShiftOp::new(k.clone(), [(1, g.clone())]);
        let expect = ShiftOp::new(k, [(2, &f * &g.scale_arg(&rat(1, 4)))]);
        assert_eq!(a.compose(&b).unwrap(), expect);
    }

    #[test]
    fn multiplication_operators_commute() {
        let k = wilson();
        let a = ShiftOp::new(k.clone(), [(0, RatFunc::from_poly(UniPoly::x()))]);
        let b = ShiftOp::new(k, [(0, RatFunc::from_poly(UniPoly::monomial(Gaussian::i(), 3)))]);
        assert!(commutator(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn mixed_kinds_rejected() {
        let a = ShiftOp::<Rational>::shift(ShiftKind::Multiplicative { q: rat(1, 4) }, 1);
        let b = ShiftOp::<Rational>::shift(ShiftKind::Multiplicative { q: rat(1, 9) }, 1);
        assert_eq!(a.compose(&b), Err(OpError::AlgebraMismatch));
    }
}
