//! Nested commutators `(ad H̃)^i X` and the closure relation
//! `(ad H̃)^K X = Σ_{i<K} (ad H̃)^i X ∘ R_i(H̃) + R_{−1}(H̃)`.

pub mod appendix;
pub mod symbolic;

use crate::families::{Family, ParamSet};
use crate::opalg::{commutator, OpError, Operator, OperatorExpr, PowerCache};
use crate::spectral::{alpha_conjecture, SpectralError};
use exactalg::{solve_linear_exact, Field, Matrix, ParamPoly, RatFunc, Rational, UniPoly};
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClosureError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("no closure relation of order {k} with the given degree bounds")]
    NoSolution { k: usize },
    #[error("operator coefficients exceeded the size guard ({size} > {limit})")]
    CoefficientBlowup { size: usize, limit: usize },
    #[error("K must be even and at least 2, got {0}")]
    BadOrder(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Solved,
    Conjectured,
    Reference,
}

/// `R_0..R_{K−1}` and `R_{−1}`, polynomials in `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureData {
    pub k: usize,
    pub r: Vec<UniPoly>,
    pub r_minus1: Option<UniPoly>,
    pub provenance: Provenance,
}

impl ClosureData {
    pub fn with_r_minus1(mut self, r: UniPoly) -> Self {
        self.r_minus1 = Some(r);
        self
    }

    /// Degrees within the family bounds.
    pub fn respects_bounds(&self, family: Family) -> bool {
        let (b, bm) = degree_bounds(family, self.k);
        let ok = |p: &UniPoly, d: usize| p.degree().map_or(true, |x| x <= d);
        self.r.iter().zip(&b).all(|(p, &d)| ok(p, d)) && self.r_minus1.as_ref().map_or(true, |p| ok(p, bm))
    }
}

/// Degree bounds `(deg R_i for i < K, deg R_{−1})`: `⌊(K−i)/2⌋`, `⌊K/2⌋` for
/// the differential families and `K−i`, `K` for the difference ones.
pub fn degree_bounds(family: Family, k: usize) -> (Vec<usize>, usize) {
    if family.is_continuous() {
        ((0..k).map(|i| (k - i) / 2).collect(), k / 2)
    } else {
        ((0..k).map(|i| k - i).collect(), k)
    }
}

/// Size of an operator: total count of coefficient entries.
fn op_size<O: Operator>(o: &O) -> usize {
    o.terms().iter().map(|(_, f)| f.num().coeffs().len() + f.den().coeffs().len()).sum()
}

/// `[(ad H)^0 X, …, (ad H)^K X]` with `(ad H)Y = [H, Y]`.
pub fn ad_powers<O: Operator>(h: &O, x: &O, k: usize, guard: Option<usize>) -> Result<Vec<O>, ClosureError> {
    let mut out = vec![x.clone()];
    for _ in 0..k {
        let next = commutator(h, out.last().unwrap())?;
        if let Some(limit) = guard {
            let size = op_size(&next);
            if size > limit {
                return Err(ClosureError::CoefficientBlowup { size, limit });
            }
        }
        out.push(next);
    }
    Ok(out)
}

fn lcm<F: Field>(a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
    let g = a.gcd(b);
    (a * &b.div_exact(&g).expect("gcd divides")).monic()
}

/// Linear equations over `Q` stating `Σ_u x_u basis_u = target`,
/// coefficient by coefficient.
fn equations<O: Operator>(basis: &[O], target: &O) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let mut by_key: BTreeMap<i64, Vec<(Option<usize>, &RatFunc<O::F>)>> = BTreeMap::new();
    for (u, b) in basis.iter().enumerate() {
        for (key, f) in b.terms() {
            by_key.entry(key).or_default().push((Some(u), f));
        }
    }
    for (key, f) in target.terms() {
        by_key.entry(key).or_default().push((None, f));
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for entries in by_key.values() {
        let den = entries.iter().fold(UniPoly::<O::F>::one(), |acc, (_, f)| lcm(&acc, f.den()));
        let scaled: Vec<(Option<usize>, UniPoly<O::F>)> =
            entries.iter().map(|(u, f)| (*u, f.num() * &den.div_exact(f.den()).expect("lcm divides"))).collect();
        let deg = scaled.iter().filter_map(|(_, p)| p.degree()).max().unwrap_or(0);
        let parts = O::F::one().rational_parts().len();
        for power in 0..=deg {
            for part in 0..parts {
                let mut row = vec![Rational::zero(); basis.len()];
                let mut b = Rational::zero();
                for (u, p) in &scaled {
                    let c = p.coeff(power).rational_parts()[part].clone();
                    match u {
                        Some(u) => row[*u] += c,
                        None => b += c,
                    }
                }
                if row.iter().any(|x| !x.is_zero()) || !b.is_zero() {
                    rows.push(row);
                    rhs.push(b);
                }
            }
        }
    }
    let mut pairs: Vec<(Vec<Rational>, Rational)> = rows.into_iter().zip(rhs).collect();
    pairs.sort();
    pairs.dedup();
    pairs.into_iter().unzip()
}

/// Solved closure data together with the dimension of the solution space.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub data: ClosureData,
    pub kernel_dim: usize,
    /// With a nontrivial kernel: whether the conjectured `R_i` admit a solution.
    pub conjectured_consistent: Option<bool>,
}

struct Unknown {
    i: Option<usize>,
    j: usize,
}

fn basis_ops<O: Operator>(
    ads: &[O],
    cache: &mut PowerCache<O>,
    bounds: &(Vec<usize>, usize),
) -> Result<(Vec<O>, Vec<Unknown>), ClosureError> {
    let mut ops = Vec::new();
    let mut unknowns = Vec::new();
    for (i, &b) in bounds.0.iter().enumerate() {
        for j in 0..=b {
            ops.push(ads[i].compose(cache.get(j)?)?);
            unknowns.push(Unknown { i: Some(i), j });
        }
    }
    for j in 0..=bounds.1 {
        ops.push(cache.get(j)?.clone());
        unknowns.push(Unknown { i: None, j });
    }
    Ok((ops, unknowns))
}

fn assemble(k: usize, unknowns: &[Unknown], x: &[Rational]) -> ClosureData {
    let mut r = vec![Vec::new(); k];
    let mut rm = Vec::new();
    for (u, v) in unknowns.iter().zip(x) {
        let slot = match u.i {
            Some(i) => &mut r[i],
            None => &mut rm,
        };
        if slot.len() <= u.j {
            slot.resize(u.j + 1, Rational::zero());
        }
        slot[u.j] = v.clone();
    }
    ClosureData {
        k,
        r: r.into_iter().map(UniPoly::new).collect(),
        r_minus1: Some(UniPoly::new(rm)),
        provenance: Provenance::Solved,
    }
}

/// Solves for all `R_i` and `R_{−1}` within `bounds`. With a nontrivial
/// kernel the particular solution is reported and, if `conjectured` is
/// given, re-solved with those `R_i` held fixed.
pub fn solve_closure<O: Operator>(
    ads: &[O],
    h: &O,
    bounds: &(Vec<usize>, usize),
    conjectured: Option<&[UniPoly]>,
) -> Result<SolveOutcome, ClosureError> {
    let k = ads.len() - 1;
    let mut cache = PowerCache::new(h.clone());
    let (ops, unknowns) = basis_ops(ads, &mut cache, bounds)?;
    let (rows, rhs) = equations(&ops, &ads[k]);
    if rows.is_empty() {
        return Ok(SolveOutcome { data: assemble(k, &unknowns, &vec![Rational::zero(); unknowns.len()]), kernel_dim: unknowns.len(), conjectured_consistent: None });
    }
    let sol = solve_linear_exact(&Matrix::from_rows(rows.clone()), &rhs);
    let Some(x) = sol.solution.clone() else {
        return Err(ClosureError::NoSolution { k });
    };
    let kernel_dim = sol.kernel.len();
    if kernel_dim == 0 {
        return Ok(SolveOutcome { data: assemble(k, &unknowns, &x), kernel_dim, conjectured_consistent: None });
    }
    let Some(conj) = conjectured else {
        return Ok(SolveOutcome { data: assemble(k, &unknowns, &x), kernel_dim, conjectured_consistent: None });
    };
    // move the known R_i columns to the right-hand side
    let fixed: Vec<Option<Rational>> = unknowns.iter().map(|u| u.i.map(|i| conj[i].coeff(u.j))).collect();
    let free: Vec<usize> = (0..unknowns.len()).filter(|&c| fixed[c].is_none()).collect();
    let mut rows2 = Vec::with_capacity(rows.len());
    let mut rhs2 = Vec::with_capacity(rows.len());
    for (row, b) in rows.iter().zip(&rhs) {
        let mut b = b.clone();
        for (c, f) in fixed.iter().enumerate() {
            if let Some(v) = f {
                b -= &row[c] * v;
            }
        }
        rows2.push(free.iter().map(|&c| row[c].clone()).collect());
        rhs2.push(b);
    }
    let sol2 = solve_linear_exact(&Matrix::from_rows(rows2), &rhs2);
    match sol2.solution {
        Some(y) => {
            let mut full: Vec<Rational> = fixed.iter().map(|f| f.clone().unwrap_or_else(Rational::zero)).collect();
            for (c, v) in free.iter().zip(y) {
                full[*c] = v;
            }
            Ok(SolveOutcome { data: assemble(k, &unknowns, &full), kernel_dim, conjectured_consistent: Some(true) })
        }
        None => Ok(SolveOutcome { data: assemble(k, &unknowns, &x), kernel_dim, conjectured_consistent: Some(false) }),
    }
}

/// `(ad H)^K X − Σ (ad H)^i X ∘ R_i(H) − R_{−1}(H)`; zero iff the relation holds.
pub fn closure_defect<O: Operator>(ads: &[O], h: &O, cd: &ClosureData) -> Result<O, ClosureError> {
    let k = cd.k;
    let mut cache = PowerCache::new(h.clone());
    let mut acc = ads[k].clone();
    for i in 0..k {
        acc = acc.sub(&ads[i].compose(&cache.poly_of(&cd.r[i])?)?)?;
    }
    if let Some(rm) = &cd.r_minus1 {
        acc = acc.sub(&cache.poly_of(rm)?)?;
    }
    Ok(acc)
}

/// Exact operator-equality verdict for the closure relation.
pub fn verify_closure_identity<O: Operator>(h: &O, x: &O, cd: &ClosureData) -> Result<bool, ClosureError> {
    let ads = ad_powers(h, x, cd.k, None)?;
    Ok(closure_defect(&ads, h, cd)?.is_zero())
}

macro_rules! dispatch {
    ($h:expr, $x:expr, |$hh:ident, $xx:ident| $body:expr) => {
        match ($h, $x) {
            (OperatorExpr::Diff($hh), OperatorExpr::Diff($xx)) => $body,
            (OperatorExpr::Wilson($hh), OperatorExpr::Wilson($xx)) => $body,
            (OperatorExpr::AskeyWilson($hh), OperatorExpr::AskeyWilson($xx)) => $body,
            _ => Err(ClosureError::Op(OpError::AlgebraMismatch)),
        }
    };
}

/// [`verify_closure_identity`] on tagged operators.
pub fn verify_expr(h: &OperatorExpr, x: &OperatorExpr, cd: &ClosureData) -> Result<bool, ClosureError> {
    dispatch!(h, x, |hh, xx| verify_closure_identity(hh, xx, cd))
}

/// Builds `(ad H)^i X` and solves, on tagged operators.
pub fn solve_expr(
    h: &OperatorExpr,
    x: &OperatorExpr,
    k: usize,
    bounds: &(Vec<usize>, usize),
    conjectured: Option<&[UniPoly]>,
) -> Result<SolveOutcome, ClosureError> {
    if k < 2 || k % 2 == 1 {
        return Err(ClosureError::BadOrder(k));
    }
    dispatch!(h, x, |hh, xx| {
        let ads = ad_powers(hh, xx, k, None)?;
        solve_closure(&ads, hh, bounds, conjectured)
    })
}

/// `R_i` from the conjectured eigenvalues at numeric parameters.
pub fn conjectured_r(params: &ParamSet, l: usize) -> Result<ClosureData, ClosureError> {
    let set = alpha_conjecture(params.family(), l, &params.bindings())?;
    let r = set
        .r_polys()
        .into_iter()
        .map(|p| p.to_upoly("z").expect("R_i depends on z only once parameters are bound"))
        .collect();
    Ok(ClosureData { k: 2 * l, r, r_minus1: None, provenance: Provenance::Conjectured })
}

/// `R_i` with the family parameters symbolic (L, J, W).
pub fn conjectured_r_symbolic(family: Family, l: usize) -> Result<Vec<ParamPoly>, ClosureError> {
    Ok(alpha_conjecture(family, l, &Default::default())?.r_polys())
}

/// Spectral consequence: `β^K = Σ R_i(E_n) β^i` for `β = E_{n+k} − E_n`.
pub fn spectral_identity(params: &ParamSet, cd: &ClosureData, n: i64, k: i64) -> bool {
    let en = crate::families::energy(params, n);
    let beta = crate::families::energy(params, n + k) - &en;
    let rhs = (0..cd.k).fold(Rational::zero(), |acc, i| acc + cd.r[i].eval(&en) * beta.pow(i as i32));
    beta.pow(cd.k as i32) == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_x, builtin_deformed, classical, MultiIndex};
    use exactalg::{int, rat};

    fn setup(g: Rational, d: &str, y: &UniPoly) -> (OperatorExpr, OperatorExpr, ParamSet) {
        let p = ParamSet::laguerre(g);
        let df = if d.is_empty() { classical(&p).unwrap() } else { builtin_deformed(&p, &MultiIndex::parse(d).unwrap()).unwrap() };
        let x = build_x(df.xi(), y);
        (df.h_tilde().clone(), df.x_operator(&x), p)
    }

    #[test]
    fn classical_laguerre_order_two() {
        let g = rat(7, 3);
        let (h, x, _) = setup(g.clone(), "", &UniPoly::one());
        let out = solve_expr(&h, &x, 2, &degree_bounds(Family::L, 2), None).unwrap();
        assert_eq!(out.kernel_dim, 0);
        assert_eq!(out.data.r, vec![UniPoly::constant(int(16)), UniPoly::zero()]);
        // −8(z + 2g + 1)
        assert_eq!(out.data.r_minus1, Some(UniPoly::new(vec![int(-8) * (int(2) * &g + int(1)), int(-8)])));
    }

    #[test]
    fn laguerre_type_one_order_four() {
        let g = rat(7, 3);
        let (h, x, p) = setup(g.clone(), "1I", &UniPoly::one());
        let out = solve_expr(&h, &x, 4, &degree_bounds(Family::L, 4), None).unwrap();
        let r: Vec<UniPoly> = [-1024, 0, 80, 0].iter().map(|&c| UniPoly::constant(int(c))).collect();
        assert_eq!(out.data.r, r);
        let expect = UniPoly::new(vec![
            int(128) * (int(2) * &g + int(1)) * (int(6) * &g + int(13)),
            int(128) * (int(10) * &g + int(11)),
            int(192),
        ]);
        assert_eq!(out.data.r_minus1.as_ref(), Some(&expect));
        assert_eq!(conjectured_r(&p, 2).unwrap().r, r);
        assert!(verify_expr(&h, &x, &out.data).unwrap());
        let mut bad = out.data.clone();
        bad.r[2] = UniPoly::constant(int(81));
        assert!(!verify_expr(&h, &x, &bad).unwrap());
        for n in 0..6 {
            for k in [-2, -1, 1, 2] {
                if n + k >= 0 {
                    assert!(spectral_identity(&p, &out.data, n, k));
                }
            }
        }
    }

    #[test]
    fn bounds() {
        assert_eq!(degree_bounds(Family::L, 4), (vec![2, 1, 1, 0], 2));
        assert_eq!(degree_bounds(Family::W, 2), (vec![2, 1], 2));
    }
}
