//! Classical Laguerre and Jacobi polynomials from their explicit sums, with
//! coefficients either numeric or polynomial in the parameters.

use super::params::{Family, ParamSet};
use crate::opalg::DiffOp;
use exactalg::{int, rat, ParamPoly, RatFunc, Rational, UniPoly};

/// The two coefficient domains the generators run over.
pub trait Coef: Clone {
    fn from_q(r: Rational) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
}

impl Coef for Rational {
    fn from_q(r: Rational) -> Self {
        r
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
}

impl Coef for ParamPoly {
    fn from_q(r: Rational) -> Self {
        ParamPoly::constant(r)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
}

/// `(x + 1)_k / k!` expanded, i.e. the binomial `C(x + k, k)`.
fn binom_top<C: Coef>(x: &C, k: usize) -> C {
    let mut acc = C::from_q(int(1));
    for i in 1..=k {
        let f = x.plus(&C::from_q(int(i as i64))).times(&C::from_q(rat(1, i as i64)));
        acc = acc.times(&f);
    }
    acc
}

fn poly_mul<C: Coef>(a: &[C], b: &[C]) -> Vec<C> {
    let mut out = vec![C::from_q(int(0)); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].plus(&x.times(y));
        }
    }
    out
}

/// Coefficients (ascending in η) of `L_n^{(α)}(η) = Σ_k (−1)^k C(n+α, n−k) η^k/k!`.
pub fn laguerre_coeffs<C: Coef>(n: usize, alpha: &C) -> Vec<C> {
    let mut fact = int(1);
    (0..=n)
        .map(|k| {
            if k > 0 {
                fact *= int(k as i64);
            }
            let sign = if k % 2 == 0 { int(1) } else { int(-1) };
            // C(n+α, n−k) = C((α+k) + (n−k), n−k)
            let top = alpha.plus(&C::from_q(int(k as i64)));
            binom_top(&top, n - k).times(&C::from_q(sign / &fact))
        })
        .collect()
}

/// Coefficients of `P_n^{(α,β)}(η) = Σ_k C(n+α, n−k) C(n+β, k) ((η−1)/2)^k ((η+1)/2)^(n−k)`.
pub fn jacobi_coeffs<C: Coef>(n: usize, alpha: &C, beta: &C) -> Vec<C> {
    let half = C::from_q(rat(1, 2));
    let minus = [C::from_q(rat(-1, 2)), half.clone()];
    let plus = [half.clone(), half];
    let mut out = vec![C::from_q(int(0)); n + 1];
    for k in 0..=n {
        let a = binom_top(&alpha.plus(&C::from_q(int(k as i64))), n - k);
        let b = binom_top(&beta.plus(&C::from_q(int((n - k) as i64))), k);
        let mut basis = vec![a.times(&b)];
        for _ in 0..k {
            basis = poly_mul(&basis, &minus);
        }
        for _ in 0..n - k {
            basis = poly_mul(&basis, &plus);
        }
        for (i, c) in basis.into_iter().enumerate() {
            out[i] = out[i].plus(&c);
        }
    }
    out
}

pub fn laguerre(n: usize, alpha: &Rational) -> UniPoly {
    UniPoly::new(laguerre_coeffs(n, alpha))
}

pub fn jacobi(n: usize, alpha: &Rational, beta: &Rational) -> UniPoly {
    UniPoly::new(jacobi_coeffs(n, alpha, beta))
}

fn to_param(coeffs: Vec<ParamPoly>) -> ParamPoly {
    let eta = ParamPoly::var("eta");
    coeffs.iter().enumerate().fold(ParamPoly::zero(), |acc, (k, c)| &acc + &(c * &eta.pow(k as u32)))
}

/// Undeformed eigenpolynomial `P_n(η)` with the family parameters kept
/// symbolic (L: `L_n^{(g−½)}`, J: `P_n^{(g−½,h−½)}`).
pub fn classical_poly_symbolic(family: Family, n: usize) -> ParamPoly {
    let shift = ParamPoly::constant(rat(-1, 2));
    match family {
        Family::L => to_param(laguerre_coeffs(n, &(&ParamPoly::var("g") + &shift))),
        Family::J => {
            to_param(jacobi_coeffs(n, &(&ParamPoly::var("g") + &shift), &(&ParamPoly::var("h") + &shift)))
        }
        _ => panic!("classical polynomials are built in for L and J only"),
    }
}

/// Undeformed eigenpolynomial at numeric parameters.
pub fn classical_poly(p: &ParamSet, n: usize) -> UniPoly {
    let half = rat(1, 2);
    match p.family() {
        Family::L => laguerre(n, &(p.get("g") - half)),
        Family::J => jacobi(n, &(p.get("g") - &half), &(p.get("h") - &half)),
        f => panic!("no built-in classical polynomials for {f}"),
    }
}

/// Leading and first-order coefficients of the undeformed `H̃ = −4(c₂∂² + c₁∂)`.
pub fn classical_coefficients(p: &ParamSet) -> (UniPoly, UniPoly) {
    match p.family() {
        Family::L => (UniPoly::x(), UniPoly::new(vec![p.get("g") + rat(1, 2), int(-1)])),
        Family::J => (
            UniPoly::new(vec![int(1), int(0), int(-1)]),
            UniPoly::new(vec![p.get("h") - p.get("g"), -(p.get("a") + int(1))]),
        ),
        f => panic!("no differential form for {f}"),
    }
}

pub fn classical_h_tilde(p: &ParamSet) -> DiffOp {
    let (c2, c1) = classical_coefficients(p);
    DiffOp::new(vec![RatFunc::zero(), RatFunc::from_poly(c1.scale(&int(-4))), RatFunc::from_poly(c2.scale(&int(-4)))])
}
