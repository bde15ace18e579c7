use crate::parampoly::ParamPoly;
use crate::rational::Rational;
use crate::upoly::UniPoly;
use num_traits::Zero;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("need at least {needed} distinct sample points, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("duplicate sample point")]
    DuplicatePoint,
    #[error("extra sample disagrees with the interpolant; degree bound {bound} too small")]
    SampleMismatch { bound: usize },
    #[error("sample grid shape does not match the variable list")]
    BadGrid,
}

/// Newton form through the first `bound + 1` samples; the remaining samples
/// are checked against the result.
pub fn interpolate_upoly(samples: &[(Rational, Rational)], bound: usize) -> Result<UniPoly, InterpError> {
    let need = bound + 1;
    if samples.len() < need {
        return Err(InterpError::TooFewSamples { needed: need, got: samples.len() });
    }
    let distinct: BTreeSet<&Rational> = samples.iter().map(|s| &s.0).collect();
    if distinct.len() != samples.len() {
        return Err(InterpError::DuplicatePoint);
    }
    let xs: Vec<&Rational> = samples[..need].iter().map(|s| &s.0).collect();
    let mut dd: Vec<Rational> = samples[..need].iter().map(|s| s.1.clone()).collect();
    for k in 1..need {
        for i in (k..need).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (xs[i] - xs[i - k]);
        }
    }
    let mut p = UniPoly::constant(dd[need - 1].clone());
    for i in (0..need - 1).rev() {
        let lin = UniPoly::new(vec![-xs[i].clone(), Rational::from_integer(1.into())]);
        p = &(&p * &lin) + &UniPoly::constant(dd[i].clone());
    }
    for (x, y) in &samples[need..] {
        if &p.eval(x) != y {
            return Err(InterpError::SampleMismatch { bound });
        }
    }
    Ok(p)
}

/// Univariate interpolation returning a polynomial in the named variable.
pub fn interpolate_param(
    var: &str,
    samples: &[(Rational, Rational)],
    bound: usize,
) -> Result<ParamPoly, InterpError> {
    interpolate_upoly(samples, bound).map(|p| ParamPoly::from_upoly(&p, var))
}

/// Tensor-grid interpolation in several variables.
///
/// `nodes[k]` are the sample coordinates for `vars[k]`, `bounds[k]` the
/// degree bound in that variable, and `values` the samples in row-major
/// order (last variable fastest). Extra nodes in any direction act as
/// consistency checks.
pub fn interpolate_multi(
    vars: &[&str],
    nodes: &[Vec<Rational>],
    bounds: &[usize],
    values: &[Rational],
) -> Result<ParamPoly, InterpError> {
    if vars.len() != nodes.len() || vars.len() != bounds.len() {
        return Err(InterpError::BadGrid);
    }
    let total: usize = nodes.iter().map(|n| n.len()).product();
    if total != values.len() {
        return Err(InterpError::BadGrid);
    }
    if vars.is_empty() {
        return Ok(ParamPoly::constant(values.first().cloned().unwrap_or_else(Rational::zero)));
    }
    // Interpolate along the first variable for each fixed tail; the
    // coefficients of each power are then interpolated recursively.
    let stride = total / nodes[0].len();
    let mut tails: Vec<ParamPoly> = Vec::with_capacity(stride);
    let mut per_tail: Vec<UniPoly> = Vec::with_capacity(stride);
    for t in 0..stride {
        let samples: Vec<(Rational, Rational)> = nodes[0]
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), values[i * stride + t].clone()))
            .collect();
        per_tail.push(interpolate_upoly(&samples, bounds[0])?);
    }
    for k in 0..=bounds[0] {
        let vals: Vec<Rational> = per_tail.iter().map(|p| p.coeff(k)).collect();
        let c = interpolate_multi(&vars[1..], &nodes[1..], &bounds[1..], &vals)?;
        tails.push(&c * &ParamPoly::var(vars[0]).pow(k as u32));
    }
    Ok(tails.iter().fold(ParamPoly::zero(), |acc, t| &acc + t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::poly;
    use crate::parampoly::bindings;
    use crate::rational::int;

    #[test]
    fn line_through_two_points() {
        let p = interpolate_param("g", &[(int(0), int(2)), (int(1), int(3))], 1).unwrap();
        assert_eq!(p, poly("g+2").unwrap());
    }

    #[test]
    fn constant_collapses() {
        let s: Vec<_> = (0..3).map(|i| (int(i), int(7))).collect();
        assert_eq!(interpolate_param("g", &s, 2).unwrap(), ParamPoly::int(7));
    }

    #[test]
    fn mismatch_detected() {
        let s: Vec<_> = (0..4).map(|i| (int(i), int(i * i * i))).collect();
        assert_eq!(interpolate_param("g", &s, 2), Err(InterpError::SampleMismatch { bound: 2 }));
        assert!(interpolate_param("g", &s, 3).is_ok());
    }

    #[test]
    fn two_variables() {
        let target = poly("3a^2b - b^2 + 1/2a + 5").unwrap();
        let na: Vec<_> = (1..5).map(int).collect();
        let nb: Vec<_> = (2..6).map(int).collect();
        let mut vals = Vec::new();
        for a in &na {
            for b in &nb {
                vals.push(target.eval(&bindings([("a", a.clone()), ("b", b.clone())])).unwrap());
            }
        }
        assert_eq!(interpolate_multi(&["a", "b"], &[na, nb], &[2, 2], &vals).unwrap(), target);
    }
}
