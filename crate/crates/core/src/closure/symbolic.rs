//! Closure data with the family parameters symbolic (L in `g`, J in `a, b`).
//!
//! Each sample solves the closure exactly at rational parameters; the
//! coefficients are then reconstructed as polynomials and certified at
//! extra points. J nests the reconstruction: `b` inside, `a` outside.

use super::{degree_bounds, solve_expr, ClosureError};
use crate::families::{build_x, builtin_deformed, Family, FamilyError, MultiIndex, ParamSet};
use crate::sampling::{reconstruct, ReconstructError};
use exactalg::{rat, ParamPoly, Rational, UniPoly};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymbolicError {
    #[error("symbolic mode covers L and J only")]
    Family,
    #[error(transparent)]
    Build(#[from] FamilyError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error("closure solution is not unique at a sample (kernel {0})")]
    Kernel(usize),
    #[error("parameter reconstruction: {0}")]
    Reconstruct(String),
}

/// `R_i(z)` and `R_{−1}(z)` as polynomials in the parameters and `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicClosure {
    pub family: Family,
    pub d: MultiIndex,
    pub k: usize,
    pub r: Vec<ParamPoly>,
    pub r_minus1: ParamPoly,
}

/// Largest interpolation degree tried per parameter.
pub const MAX_BOUND: usize = 24;

pub fn g_node(i: usize) -> Rational {
    rat(29, 10) + rat(3 * i as i64, 7)
}

fn a_node(i: usize) -> Rational {
    rat(37, 10) + rat(5 * i as i64, 11)
}

fn b_node(i: usize) -> Rational {
    rat(1, 3) + rat(2 * i as i64, 9)
}

/// Order and `z`-degree bounds fixed by the multi-index and `Y`.
fn layout(family: Family, d: &MultiIndex, y: &UniPoly) -> (usize, Vec<usize>) {
    let k = 2 * (d.ell() + y.degree().unwrap_or(0) + 1);
    let (mut b, bm) = degree_bounds(family, k);
    b.push(bm);
    (k, b)
}

/// All coefficients of `R_0..R_{K−1}, R_{−1}` at one parameter point, padded
/// to the degree bounds.
fn solve_at(params: &ParamSet, d: &MultiIndex, y: &UniPoly, k: usize, widths: &[usize]) -> Result<Vec<Rational>, SymbolicError> {
    let df = builtin_deformed(params, d)?;
    let x = build_x(df.xi(), y);
    let out = solve_expr(df.h_tilde(), &df.x_operator(&x), k, &degree_bounds(params.family(), k), None)?;
    if out.kernel_dim != 0 {
        return Err(SymbolicError::Kernel(out.kernel_dim));
    }
    let rm = out.data.r_minus1.unwrap_or_else(UniPoly::zero);
    let mut flat = Vec::new();
    for (p, &w) in out.data.r.iter().chain(std::iter::once(&rm)).zip(widths) {
        flat.extend((0..=w).map(|j| p.coeff(j)));
    }
    Ok(flat)
}

fn flatten<E: std::fmt::Display>(e: ReconstructError<E>) -> SymbolicError {
    SymbolicError::Reconstruct(e.to_string())
}

/// Reassembles `Σ_j c_j z^j` per polynomial from the flat component list.
fn assemble(comps: Vec<ParamPoly>, widths: &[usize]) -> Vec<ParamPoly> {
    let z = ParamPoly::var("z");
    let mut it = comps.into_iter();
    widths
        .iter()
        .map(|&w| (0..=w).fold(ParamPoly::zero(), |acc, j| &acc + &(&it.next().unwrap() * &z.pow(j as u32))))
        .collect()
}

/// Solves the closure for a built-in system with `X` from `Ξ` and `Y`.
pub fn solve_symbolic(family: Family, d: &MultiIndex, y: &UniPoly) -> Result<SymbolicClosure, SymbolicError> {
    let (k, widths) = layout(family, d, y);
    let comps = match family {
        Family::L => reconstruct("g", g_node, |g| solve_at(&ParamSet::laguerre(g.clone()), d, y, k, &widths), 2, MAX_BOUND)
            .map_err(flatten)?,
        Family::J => {
            // inner: polynomials in b, stored as padded coefficient lists
            let inner = |a: &Rational| -> Result<Vec<Rational>, SymbolicError> {
                let polys = reconstruct("b", b_node, |b| solve_at(&ParamSet::jacobi_ab(a, b), d, y, k, &widths), 2, MAX_BOUND)
                    .map_err(flatten)?;
                let mut flat = Vec::new();
                for p in polys {
                    let u = p.to_upoly("b").expect("univariate in b");
                    flat.extend((0..=MAX_BOUND).map(|j| u.coeff(j)));
                }
                Ok(flat)
            };
            let outer = reconstruct("a", a_node, inner, 2, MAX_BOUND).map_err(flatten)?;
            let b = ParamPoly::var("b");
            outer
                .chunks(MAX_BOUND + 1)
                .map(|c| c.iter().enumerate().fold(ParamPoly::zero(), |acc, (j, p)| &acc + &(p * &b.pow(j as u32))))
                .collect()
        }
        _ => return Err(SymbolicError::Family),
    };
    let mut polys = assemble(comps, &widths);
    let r_minus1 = polys.pop().unwrap_or_else(ParamPoly::zero);
    Ok(SymbolicClosure { family, d: d.clone(), k, r: polys, r_minus1 })
}

impl SymbolicClosure {
    /// Specialization at one parameter point.
    pub fn at(&self, params: &ParamSet) -> super::ClosureData {
        let b = params.bindings();
        let to_z = |p: &ParamPoly| p.partial_eval(&b).to_upoly("z").unwrap_or_else(|| UniPoly::constant(Rational::zero()));
        super::ClosureData {
            k: self.k,
            r: self.r.iter().map(to_z).collect(),
            r_minus1: Some(to_z(&self.r_minus1)),
            provenance: super::Provenance::Solved,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use exactalg::expr::poly;

    #[test]
    fn classical_laguerre_in_g() {
        let s = solve_symbolic(Family::L, &MultiIndex::empty(), &UniPoly::one()).unwrap();
        assert_eq!(s.k, 2);
        assert_eq!(s.r, vec![poly("16").unwrap(), ParamPoly::zero()]);
        assert_eq!(s.r_minus1, poly("-8(z+2g+1)").unwrap());
    }
}
