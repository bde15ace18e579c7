//! Multiplication by `X(η)` in the basis of deformed eigenpolynomials: the
//! `1+2L`-term recurrence with constant coefficients.

use crate::families::{build_x, DeformedFamily, FamilyError, MultiIndex};
use crate::sampling::{reconstruct, ReconstructError};
use exactalg::{bindings, int, Bindings, Expr, ExprError, Field, ParamPoly, Rational, UniPoly};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecurrenceError {
    #[error("X·P_D,{n} leaves a nonzero remainder of degree {degree:?} in the basis span")]
    NonzeroRemainder { n: usize, degree: Option<usize> },
    #[error("P_D,{0} is not available")]
    BasisUnavailable(usize),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// `∫₀^η Ξ Y` with the parameters kept symbolic.
pub fn build_x_symbolic(xi: &ParamPoly, y: &ParamPoly) -> ParamPoly {
    let prod = xi * y;
    let eta = ParamPoly::var("eta");
    prod.coeffs_in("eta")
        .into_iter()
        .enumerate()
        .fold(ParamPoly::zero(), |acc, (k, c)| &acc + &(&c * &eta.pow(k as u32 + 1)).scale(&exactalg::rat(1, k as i64 + 1)))
}

/// Coefficients `r_{n,k}`, `k = −L..L`, of `X P_{D,n} = Σ_k r_{n,k} P_{D,n+k}`,
/// by leading-term elimination.
pub fn expand_in_basis(df: &DeformedFamily, x: &UniPoly, n: usize) -> Result<Vec<Rational>, RecurrenceError> {
    let l = x.degree().unwrap_or(0);
    let ell = df.ell();
    let pn = df.p(n as i64).ok_or(RecurrenceError::BasisUnavailable(n))?;
    let mut rem = x * &pn;
    let mut out = vec![Rational::zero(); 2 * l + 1];
    let lowest = n.saturating_sub(l);
    for m in (lowest..=n + l).rev() {
        let pm = df.p(m as i64).ok_or(RecurrenceError::BasisUnavailable(m))?;
        let c = rem.coeff(ell + m).fdiv(pm.leading().expect("basis polynomials are nonzero"));
        if !c.is_zero() {
            rem = &rem - &pm.scale(&c);
        }
        out[m + l - n] = c;
    }
    if !rem.is_zero() {
        return Err(RecurrenceError::NonzeroRemainder { n, degree: rem.degree() });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceTable {
    pub x: UniPoly,
    pub l: usize,
    pub d: MultiIndex,
    /// `rows[n][k + L] = r_{n,k}`.
    pub rows: Vec<Vec<Rational>>,
}

impl RecurrenceTable {
    /// Rows `0..=n_max`, computed in parallel.
    pub fn build(df: &DeformedFamily, x: &UniPoly, n_max: usize) -> Result<Self, RecurrenceError> {
        let rows = (0..=n_max).into_par_iter().map(|n| expand_in_basis(df, x, n)).collect::<Result<Vec<_>, _>>()?;
        Ok(RecurrenceTable { x: x.clone(), l: x.degree().unwrap_or(0), d: df.multi_index().clone(), rows })
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `r_{n,k}`; zero outside `|k| ≤ L` and for `n + k < 0`.
    pub fn r(&self, n: i64, k: i64) -> Rational {
        let l = self.l as i64;
        if n < 0 || k.abs() > l || n + k < 0 {
            return Rational::zero();
        }
        self.rows.get(n as usize).map(|row| row[(k + l) as usize].clone()).unwrap_or_else(Rational::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckEntry {
    pub n: i64,
    pub k: i64,
    pub pass: bool,
    pub expected: String,
    pub actual: String,
}

impl CheckEntry {
    fn new(n: i64, k: i64, expected: &Rational, actual: &Rational) -> Self {
        CheckEntry {
            n,
            k,
            pass: expected == actual,
            expected: exactalg::format_rational(expected),
            actual: exactalg::format_rational(actual),
        }
    }
}

/// `r_{n,−l} = (h_{D,n}/h_{D,n−l}) r_{n−l,l}` for `1 ≤ l ≤ L`; entries are
/// keyed by `(n, −l)`.
pub fn check_h_symmetry(df: &DeformedFamily, t: &RecurrenceTable) -> Vec<CheckEntry> {
    let mut out = Vec::new();
    for n in 0..=t.n_max() as i64 {
        for l in 1..=t.l as i64 {
            let expected = if l > n { Rational::zero() } else { df.h_ratio(n, l) * t.r(n - l, l) };
            out.push(CheckEntry::new(n, -l, &expected, &t.r(n, -l)));
        }
    }
    out
}

/// `r_{n,L} = c^X c^P_{D,n} / c^P_{D,n+L}`.
pub fn check_leading(df: &DeformedFamily, t: &RecurrenceTable) -> Vec<CheckEntry> {
    let cx = t.x.leading().cloned().unwrap_or_else(Rational::zero);
    (0..=t.n_max() as i64)
        .map(|n| {
            let expected = match (df.leading(n), df.leading(n + t.l as i64)) {
                (Some(a), Some(b)) => &cx * a / b,
                _ => Rational::zero(),
            };
            CheckEntry::new(n, t.l as i64, &expected, &t.r(n, t.l as i64))
        })
        .collect()
}

/// Compares every `r_{n,k}` with `formulas[k]` evaluated at the family
/// parameters and `n`.
pub fn closed_form_compare(
    t: &RecurrenceTable,
    params: &Bindings,
    formulas: &BTreeMap<i64, Expr>,
) -> Result<Vec<CheckEntry>, ExprError> {
    let mut out = Vec::new();
    for n in 0..=t.n_max() as i64 {
        let mut b = params.clone();
        b.insert("n".into(), int(n));
        for (&k, f) in formulas {
            if n + k < 0 {
                continue;
            }
            out.push(CheckEntry::new(n, k, &f.eval(&b)?, &t.r(n, k)));
        }
    }
    Ok(out)
}

/// Closed forms of the five-term recurrence of the `D = {1^I}` systems with
/// `X = X_min`, as expressions in `n` and the family parameters.
pub fn five_term_formulas(family: crate::families::Family) -> Option<BTreeMap<i64, Expr>> {
    use crate::families::Family;
    let src: [(i64, &str); 5] = match family {
        Family::L => [
            (2, "(n+1)(n+2)/2"),
            (1, "-(n+1)(2g+2n+3)"),
            (0, "(24n^2+4(10g+11)n+(2g+1)(6g+13))/8"),
            (-1, "-(2g+2n-1)(2g+2n+3)/2"),
            (-2, "(2g+2n-3)(2g+2n+3)/8"),
        ],
        Family::J => [
            (2, "poch(n+1,2)(b+2)poch(a+n,2)(2h+2n-3)/(poch(a+2n,4)(2h+2n+1))"),
            (1, "(n+1)(a-1)(a+n)(2g+2n+3)(2h+2n-3)/(poch(a+2n-1,3)(a+2n+3))"),
            (
                0,
                "(b+2)/(4poch(a+2n-2,2)poch(a+2n+1,2))\
                 *(-b(b+4)(2n(a+n)-(a-2)(a-1))+(a+2n-1)(a+2n+1)(2n(a+n)-(a-2)(2a-1)))",
            ),
            (-1, "(a-1)(2g+2n-1)(2g+2n+3)poch(h+n-3/2,2)/((a+2n-3)poch(a+2n-1,3))"),
            (-2, "(b+2)(2g+2n-3)(2g+2n+3)poch(h+n-3/2,2)/(4poch(a+2n-3,4))"),
        ],
        _ => return None,
    };
    Some(src.iter().map(|&(k, s)| (k, Expr::parse(s).expect("built-in formula parses"))).collect())
}

/// A table whose entries are polynomials in one parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicTable {
    pub var: String,
    pub x: ParamPoly,
    pub l: usize,
    pub rows: Vec<Vec<ParamPoly>>,
}

impl SymbolicTable {
    pub fn r(&self, n: i64, k: i64) -> ParamPoly {
        let l = self.l as i64;
        if n < 0 || k.abs() > l || n + k < 0 {
            return ParamPoly::zero();
        }
        self.rows.get(n as usize).map(|row| row[(k + l) as usize].clone()).unwrap_or_else(ParamPoly::zero)
    }

    /// Symbolic comparison with closed forms in `n` and `var`.
    pub fn compare(&self, formulas: &BTreeMap<i64, Expr>) -> Result<Vec<(i64, i64, bool)>, ExprError> {
        let mut out = Vec::new();
        for n in 0..self.rows.len() as i64 {
            for (&k, f) in formulas {
                if n + k < 0 {
                    continue;
                }
                let e = f.to_poly_with(&bindings([("n", int(n))]))?;
                out.push((n, k, e == self.r(n, k)));
            }
        }
        Ok(out)
    }
}

/// Builds the table at sample values of `var` and reconstructs each entry
/// (and `X` itself) as a polynomial in `var`.
pub fn symbolic_table<M>(
    var: &str,
    node: impl Fn(usize) -> Rational,
    make: M,
    y: &UniPoly,
    n_max: usize,
    max_bound: usize,
) -> Result<SymbolicTable, ReconstructError<RecurrenceError>>
where
    M: Fn(&Rational) -> Result<DeformedFamily, FamilyError> + Sync,
{
    let l = std::sync::OnceLock::new();
    let eval = |v: &Rational| -> Result<Vec<Rational>, RecurrenceError> {
        let df = make(v)?;
        let x = build_x(df.xi(), y);
        let deg = x.degree().unwrap_or(0);
        let _ = l.set(deg);
        let t = RecurrenceTable::build(&df, &x, n_max)?;
        let mut flat: Vec<Rational> = (0..=deg).map(|i| x.coeff(i)).collect();
        flat.extend(t.rows.into_iter().flatten());
        Ok(flat)
    };
    let flat = reconstruct(var, node, eval, 2, max_bound)?;
    let l = *l.get().unwrap();
    let eta = ParamPoly::var("eta");
    let x = flat[..=l].iter().enumerate().fold(ParamPoly::zero(), |acc, (i, c)| &acc + &(c * &eta.pow(i as u32)));
    let rows = flat[l + 1..].chunks(2 * l + 1).map(|c| c.to_vec()).collect();
    Ok(SymbolicTable { var: var.into(), x, l, rows })
}
