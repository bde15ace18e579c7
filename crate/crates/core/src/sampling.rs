//! Reconstruction of parameter dependence from exact values at samples.
//!
//! Quantities are computed exactly at rational parameter points, a
//! polynomial is interpolated with a degree bound, and the bound is doubled
//! until two additional points agree with the interpolant.

use exactalg::{interpolate_upoly, ParamPoly, Rational};
use rayon::prelude::*;

/// Extra samples every interpolant must reproduce.
pub const CHECK_POINTS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReconstructError<E> {
    #[error("sample evaluation failed: {0}")]
    Sample(E),
    #[error("component {index} is not a polynomial of degree ≤ {max_bound}")]
    NotPolynomial { index: usize, max_bound: usize },
    #[error("samples returned vectors of different lengths")]
    Shape,
}

/// Reconstructs each component of `f` as a polynomial in `var`.
///
/// `node(i)` gives the i-th sample point; `f` is evaluated in parallel.
pub fn reconstruct<E, F>(
    var: &str,
    node: impl Fn(usize) -> Rational,
    f: F,
    start_bound: usize,
    max_bound: usize,
) -> Result<Vec<ParamPoly>, ReconstructError<E>>
where
    E: Send,
    F: Fn(&Rational) -> Result<Vec<Rational>, E> + Sync,
{
    let mut xs: Vec<Rational> = Vec::new();
    let mut ys: Vec<Vec<Rational>> = Vec::new();
    let extend = |xs: &mut Vec<Rational>, ys: &mut Vec<Vec<Rational>>, need: usize| -> Result<(), ReconstructError<E>> {
        let fresh: Vec<Rational> = (xs.len()..need).map(&node).collect();
        let vals: Result<Vec<_>, E> = fresh.par_iter().map(&f).collect();
        xs.extend(fresh);
        ys.extend(vals.map_err(ReconstructError::Sample)?);
        Ok(())
    };
    let mut bound = start_bound.max(1);
    extend(&mut xs, &mut ys, bound + 1 + CHECK_POINTS)?;
    let width = ys[0].len();
    if ys.iter().any(|v| v.len() != width) {
        return Err(ReconstructError::Shape);
    }
    let mut out: Vec<Option<ParamPoly>> = vec![None; width];
    loop {
        for (i, slot) in out.iter_mut().enumerate() {
            if slot.is_none() {
                let samples: Vec<(Rational, Rational)> =
                    xs.iter().zip(&ys).map(|(x, y)| (x.clone(), y[i].clone())).collect();
                if let Ok(p) = interpolate_upoly(&samples, bound) {
                    *slot = Some(ParamPoly::from_upoly(&p, var));
                }
            }
        }
        if let Some(index) = out.iter().position(Option::is_none) {
            if bound >= max_bound {
                return Err(ReconstructError::NotPolynomial { index, max_bound });
            }
            bound = (bound * 2).min(max_bound);
            extend(&mut xs, &mut ys, bound + 1 + CHECK_POINTS)?;
            if ys.iter().any(|v| v.len() != width) {
                return Err(ReconstructError::Shape);
            }
        } else {
            return Ok(out.into_iter().map(Option::unwrap).collect());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use exactalg::expr::poly;
    use exactalg::{int, rat};

    #[test]
    fn recovers_polynomials_of_mixed_degree() {
        let r = reconstruct::<(), _>(
            "g",
            |i| rat(i as i64 + 3, 2),
            |g| Ok(vec![g * g * g - int(2), int(7), g.clone()]),
            1,
            16,
        )
        .unwrap();
        assert_eq!(r, vec![poly("g^3-2").unwrap(), poly("7").unwrap(), poly("g").unwrap()]);
    }

    #[test]
    fn rational_functions_are_rejected() {
        let r = reconstruct::<(), _>("g", |i| int(i as i64 + 1), |g| Ok(vec![int(1) / g]), 1, 8);
        assert!(matches!(r, Err(ReconstructError::NotPolynomial { index: 0, max_bound: 8 })));
    }
}
