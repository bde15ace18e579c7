//! Elements `u + v·s` of a quadratic extension where `s² = disc`.

use exactalg::{Bindings, ParamPoly, Rational};
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadExt {
    pub u: ParamPoly,
    pub v: ParamPoly,
}

impl QuadExt {
    pub fn new(u: ParamPoly, v: ParamPoly) -> Self {
        QuadExt { u, v }
    }

    pub fn rational(u: ParamPoly) -> Self {
        QuadExt { u, v: ParamPoly::zero() }
    }

    pub fn conj(&self) -> Self {
        QuadExt { u: self.u.clone(), v: -&self.v }
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadExt { u: &self.u + &o.u, v: &self.v + &o.v }
    }

    pub fn mul(&self, o: &Self, disc: &ParamPoly) -> Self {
        QuadExt {
            u: &(&self.u * &o.u) + &(&(&self.v * &o.v) * disc),
            v: &(&self.u * &o.v) + &(&self.v * &o.u),
        }
    }

    /// `x + x̄` and `x·x̄`, both free of `s`.
    pub fn trace_norm(&self, disc: &ParamPoly) -> (ParamPoly, ParamPoly) {
        (self.u.scale(&Rational::from_integer(2.into())), &(&self.u * &self.u) - &(&(&self.v * &self.v) * disc))
    }

    pub fn partial_eval(&self, b: &Bindings) -> Self {
        QuadExt { u: self.u.partial_eval(b), v: self.v.partial_eval(b) }
    }

    /// Value with every symbol bound and `s` replaced by `s_value`.
    pub fn eval_with(&self, b: &Bindings, s_value: &Rational) -> Option<Rational> {
        Some(self.u.eval(b).ok()? + self.v.eval(b).ok()? * s_value)
    }

    /// Exact sign of `u + v·s` with `s = +√disc`, all symbols bound.
    pub fn sign(&self, b: &Bindings, disc: &Rational) -> Option<Ordering> {
        let u = self.u.eval(b).ok()?;
        let v = self.v.eval(b).ok()?;
        Some(sign_of(&u, &v, disc))
    }
}

/// Sign of `u + v·√d` for `d ≥ 0`.
pub fn sign_of(u: &Rational, v: &Rational, d: &Rational) -> Ordering {
    let su = u.signum();
    let sv = if d.is_zero() { Rational::zero() } else { v.signum() };
    let zero = Rational::zero();
    if sv.is_zero() {
        return su.cmp(&zero);
    }
    if su.is_zero() || su == sv {
        return sv.cmp(&zero);
    }
    // opposite signs: compare magnitudes via squares
    match (u * u).cmp(&(v * v * d)) {
        Ordering::Greater => su.cmp(&zero),
        Ordering::Less => sv.cmp(&zero),
        Ordering::Equal => Ordering::Equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use exactalg::{int, rat};

    #[test]
    fn signs() {
        // 3 − √8 > 0, 2 − √8 < 0, −3 + √9 = 0
        assert_eq!(sign_of(&int(3), &int(-1), &int(8)), Ordering::Greater);
        assert_eq!(sign_of(&int(2), &int(-1), &int(8)), Ordering::Less);
        assert_eq!(sign_of(&int(-3), &int(1), &int(9)), Ordering::Equal);
        assert_eq!(sign_of(&rat(-1, 2), &int(0), &int(5)), Ordering::Less);
    }
}
