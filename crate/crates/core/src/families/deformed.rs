use super::classical::{classical_coefficients, classical_h_tilde, classical_poly, jacobi, laguerre};
use super::energy::{energy, h_ratio, virtual_energy};
use super::params::{Family, MultiIndex, ParamError, ParamSet, VType};
use crate::opalg::{DiffOp, OpError, OperatorExpr};
use exactalg::{int, rat, solve_linear_exact, Field, Matrix, RatFunc, Rational, UniPoly};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("eigen-equation fails at n = {n}")]
    EigenValidationFailed { n: usize },
    #[error("deg P({n}) = {got:?}, expected {expected}")]
    DegreeMismatch { n: usize, expected: usize, got: Option<usize> },
    #[error("conjugation and ansatz routes give different operators")]
    RouteDisagreement,
    #[error("ansatz for the Hamiltonian is not uniquely determined")]
    AnsatzUnderdetermined,
    #[error("plugin schema: {0}")]
    Schema(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// How `P_{D,n}` is produced.
#[derive(Clone, Debug, PartialEq)]
pub enum PRule {
    /// The undeformed polynomials.
    Classical,
    /// `P_{D,n} = A ∂P_n + B P_n` over the undeformed `P_n`.
    Combination { a: UniPoly, b: UniPoly },
    /// `P_{D,0}, P_{D,1}, …` listed; higher `n` unavailable.
    Explicit(Vec<UniPoly>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Builtin,
    Plugin(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Conjugation,
    Ansatz,
}

/// Eigen-equations are checked for `n ≤ VALIDATE_N` on construction.
pub const VALIDATE_N: usize = 5;

/// One deformed system at fixed numeric parameters.
#[derive(Clone, Debug)]
pub struct DeformedFamily {
    params: ParamSet,
    d: MultiIndex,
    xi: UniPoly,
    rule: PRule,
    h_tilde: OperatorExpr,
    source: Source,
}

impl DeformedFamily {
    /// Validates degrees and eigen-equations before returning.
    pub fn from_parts(
        params: ParamSet,
        d: MultiIndex,
        xi: UniPoly,
        rule: PRule,
        h_tilde: OperatorExpr,
        source: Source,
    ) -> Result<Self, FamilyError> {
        let f = DeformedFamily { params, d, xi, rule, h_tilde, source };
        f.validate(VALIDATE_N)?;
        Ok(f)
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn multi_index(&self) -> &MultiIndex {
        &self.d
    }

    pub fn xi(&self) -> &UniPoly {
        &self.xi
    }

    pub fn rule(&self) -> &PRule {
        &self.rule
    }

    pub fn h_tilde(&self) -> &OperatorExpr {
        &self.h_tilde
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn ell(&self) -> usize {
        self.d.ell()
    }

    pub fn energy(&self, n: i64) -> Rational {
        energy(&self.params, n)
    }

    pub fn virtual_energy(&self, t: VType, v: u32) -> Rational {
        virtual_energy(&self.params, t, v)
    }

    pub fn h_ratio(&self, n: i64, l: i64) -> Rational {
        h_ratio(&self.params, &self.d, n, l)
    }

    /// Largest `n` for which `P_{D,n}` is available.
    pub fn n_max(&self) -> Option<usize> {
        match &self.rule {
            PRule::Explicit(v) => Some(v.len().saturating_sub(1)),
            _ => None,
        }
    }

    /// `P_{D,n}`; zero for negative `n`, `None` past an explicit list.
    pub fn p(&self, n: i64) -> Option<UniPoly> {
        if n < 0 {
            return Some(UniPoly::zero());
        }
        let n = n as usize;
        match &self.rule {
            PRule::Classical => Some(classical_poly(&self.params, n)),
            PRule::Combination { a, b } => {
                let pn = classical_poly(&self.params, n);
                Some(&(a * &pn.derivative()) + &(b * &pn))
            }
            PRule::Explicit(v) => v.get(n).cloned(),
        }
    }

    /// `X` as a multiplication operator in the algebra of `H̃`.
    pub fn x_operator(&self, x: &UniPoly) -> OperatorExpr {
        self.h_tilde.mul_eta_poly(x)
    }

    pub fn validate(&self, up_to: usize) -> Result<(), FamilyError> {
        let top = self.n_max().map_or(up_to, |m| m.min(up_to));
        for n in 0..=top {
            let pn = self.p(n as i64).unwrap();
            let expected = self.ell() + n;
            if pn.degree() != Some(expected) {
                return Err(FamilyError::DegreeMismatch { n, expected, got: pn.degree() });
            }
            let image = self.h_tilde.apply_poly(&pn).map_err(|_| FamilyError::EigenValidationFailed { n })?;
            if image != pn.scale(&self.energy(n as i64)) {
                return Err(FamilyError::EigenValidationFailed { n });
            }
        }
        Ok(())
    }
}

/// The undeformed system (`D = {}`), L or J.
pub fn classical(params: &ParamSet) -> Result<DeformedFamily, FamilyError> {
    if !params.family().is_continuous() {
        return Err(FamilyError::Unsupported(format!("built-in {} system", params.family())));
    }
    DeformedFamily::from_parts(
        params.clone(),
        MultiIndex::empty(),
        UniPoly::one(),
        PRule::Classical,
        OperatorExpr::Diff(classical_h_tilde(params)),
        Source::Builtin,
    )
}

/// Single-step deformation data `(Ξ, A, B)` with `P_{D,n} = A∂P_n + B P_n`.
pub fn single_step_rule(p: &ParamSet, d: u32, t: VType) -> (UniPoly, UniPoly, UniPoly) {
    let half = rat(1, 2);
    let d = d as usize;
    let eta = UniPoly::x();
    let one_plus = UniPoly::new(vec![int(1), int(1)]);
    let one_minus = UniPoly::new(vec![int(1), int(-1)]);
    match (p.family(), t) {
        (Family::L, VType::I) => {
            let xi = laguerre(d, &(p.get("g") - half)).scale_arg(&int(-1));
            let b = (&xi + &xi.derivative()).scale(&int(-1));
            (xi.clone(), xi, b)
        }
        (Family::L, VType::II) => {
            let xi = laguerre(d, &(half - p.get("g")));
            let a = (&eta * &xi).scale(&int(2));
            let b = &xi.scale(&(int(2) * p.get("g") - int(1))) - &(&eta * &xi.derivative()).scale(&int(2));
            (xi, a, b)
        }
        (Family::J, VType::I) => {
            let xi = jacobi(d, &(p.get("g") - &half), &(&half - p.get("h")));
            let a = (&one_plus * &xi).scale(&half);
            let inner = &xi.scale(&(int(1) - int(2) * p.get("h"))) + &(&one_plus * &xi.derivative()).scale(&int(2));
            (xi, a, inner.scale(&rat(-1, 4)))
        }
        (Family::J, VType::II) => {
            let xi = jacobi(d, &(&half - p.get("g")), &(p.get("h") - &half));
            let a = (&one_minus * &xi).scale(&half);
            let inner = &xi.scale(&(int(2) * p.get("g") - int(1))) + &(&one_minus * &xi.derivative()).scale(&int(2));
            (xi, a, inner.scale(&rat(-1, 4)))
        }
        (f, _) => panic!("no single-step rule for {f}"),
    }
}

/// Built-in deformations: `D = {}`, `{1^I}`, `{1^II}` for L and J.
pub fn builtin_deformed(params: &ParamSet, d: &MultiIndex) -> Result<DeformedFamily, FamilyError> {
    if d.is_empty() {
        return classical(params);
    }
    if !params.family().is_continuous() || d.m() != 1 || d.entries()[0].0 != 1 {
        return Err(FamilyError::Unsupported(format!("built-in {} {d}", params.family())));
    }
    let (xi, a, b) = single_step_rule(params, 1, d.entries()[0].1);
    let rule = PRule::Combination { a, b };
    let ansatz = ansatz_h_tilde(params, &xi, &rule_polys(params, &rule, 3))?;
    if d.entries()[0].1 == VType::I {
        let conj = conjugation_h_tilde(params, d)?;
        if conj != ansatz {
            return Err(FamilyError::RouteDisagreement);
        }
    }
    DeformedFamily::from_parts(params.clone(), d.clone(), xi, rule, OperatorExpr::Diff(ansatz), Source::Builtin)
}

pub(crate) fn rule_polys(params: &ParamSet, rule: &PRule, count: usize) -> Vec<UniPoly> {
    (0..count)
        .map(|n| match rule {
            PRule::Classical => classical_poly(params, n),
            PRule::Combination { a, b } => {
                let pn = classical_poly(params, n);
                &(a * &pn.derivative()) + &(b * &pn)
            }
            PRule::Explicit(v) => v[n].clone(),
        })
        .collect()
}

/// `H̃ = −4(c₂∂² + (N₁/Ξ)∂ + N₀/Ξ)` with `deg N₁ ≤ deg Ξ + 1`, `deg N₀ ≤ deg Ξ`,
/// fixed by the eigen-equations of the supplied `P_{D,0}, P_{D,1}, …`.
pub fn ansatz_h_tilde(params: &ParamSet, xi: &UniPoly, ps: &[UniPoly]) -> Result<DiffOp, FamilyError> {
    let (c2, _) = classical_coefficients(params);
    let d = xi.degree().ok_or(FamilyError::AnsatzUnderdetermined)?;
    let n1 = d + 2;
    let unknowns = n1 + d + 1;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for (n, p) in ps.iter().enumerate() {
        let dp = p.derivative();
        // −4(N₁P' + N₀P) = E_n Ξ P + 4c₂ΞP''
        let target = &(xi * p).scale(&energy(params, n as i64)) + &(&(&c2 * xi) * &p.nth_derivative(2)).scale(&int(4));
        let cols: Vec<UniPoly> = (0..n1)
            .map(|i| &UniPoly::monomial(int(-4), i) * &dp)
            .chain((0..=d).map(|i| &UniPoly::monomial(int(-4), i) * p))
            .collect();
        let deg = cols.iter().filter_map(|c| c.degree()).chain(target.degree()).max().unwrap_or(0);
        for k in 0..=deg {
            rows.push(cols.iter().map(|c| c.coeff(k)).collect());
            rhs.push(target.coeff(k));
        }
    }
    let sol = solve_linear_exact(&Matrix::from_rows(rows), &rhs);
    if !sol.is_unique() {
        return Err(FamilyError::AnsatzUnderdetermined);
    }
    let x = sol.solution.unwrap();
    let big_n1 = UniPoly::new(x[..n1].to_vec());
    let big_n0 = UniPoly::new(x[n1..unknowns].to_vec());
    Ok(DiffOp::new(vec![
        RatFunc::new(big_n0.scale(&int(-4)), xi.clone()),
        RatFunc::new(big_n1.scale(&int(-4)), xi.clone()),
        RatFunc::from_poly(c2.scale(&int(-4))),
    ]))
}

fn rf(n: UniPoly, d: UniPoly) -> RatFunc {
    RatFunc::new(n, d)
}

fn lin(c0: Rational, c1: Rational) -> UniPoly {
    UniPoly::new(vec![c0, c1])
}

/// `H̃ = Ψ⁻¹∘(−d²/dx² + U)∘Ψ` rewritten in η, from the ground-state
/// prefactor Ψ and the potential U of the built-in systems.
///
/// With `Ψ'/Ψ = η'·w(η)` the operator is
/// `−η'²∂² − (η'' + 2η'²w)∂ + U − η''w − η'²w_η − η'²w²`.
pub fn conjugation_h_tilde(params: &ParamSet, d: &MultiIndex) -> Result<DiffOp, FamilyError> {
    let one = || int(1);
    let half = rat(1, 2);
    let key = d.key();
    let (eta_sq, eta_dd, w, u) = match (params.family(), key.as_str()) {
        (Family::L, k @ ("" | "1I")) => {
            // η = x², η'² = 4η, η'' = 2
            let g = params.get("g");
            let eta = UniPoly::x();
            let eta_sq = eta.scale(&int(4));
            let eta_dd = UniPoly::constant(int(2));
            if k.is_empty() {
                // Ψ = e^{−x²/2} x^g, U = x² + g(g−1)/x² − 2g − 1
                let w = &RatFunc::constant(-half.clone()) + &rf(UniPoly::constant(&g / int(2)), eta.clone());
                let u = &(&RatFunc::from_poly(lin(-(int(2) * &g + one()), one()))
                    + &rf(UniPoly::constant(&g * (&g - one())), eta.clone()))
                    + &RatFunc::zero();
                (eta_sq, eta_dd, w, u)
            } else {
                // Ψ = e^{−x²/2} x^{g+1}/Ξ(x²), Ξ = η + g + ½
                let xi = lin(&g + &half, one());
                let w = &(&RatFunc::constant(-half.clone()) + &rf(UniPoly::constant((&g + one()) / int(2)), eta.clone()))
                    - &rf(UniPoly::one(), xi.clone());
                let u = &(&(&RatFunc::from_poly(lin(-(int(2) * &g + int(3)), one()))
                    + &rf(UniPoly::constant(&g * (&g + one())), eta.clone()))
                    + &rf(UniPoly::constant(int(4)), xi.clone()))
                    - &rf(UniPoly::constant(int(4) * (int(2) * &g + one())), &xi * &xi);
                (eta_sq, eta_dd, w, u)
            }
        }
        (Family::J, k @ ("" | "1I")) => {
            // η = cos 2x, η'² = 4(1−η²), η'' = −4η
            let (g, h, a, b) = (params.get("g"), params.get("h"), params.get("a"), params.get("b"));
            let eta_sq = UniPoly::new(vec![int(4), int(0), int(-4)]);
            let eta_dd = UniPoly::monomial(int(-4), 1);
            let one_minus = lin(one(), int(-1));
            let one_plus = lin(one(), one());
            if k.is_empty() {
                // Ψ = sin^g cos^h
                let w = &rf(UniPoly::constant(-&g / int(2)), one_minus.clone())
                    + &rf(UniPoly::constant(&h / int(2)), one_plus.clone());
                let u = &(&rf(UniPoly::constant(int(2) * &g * (&g - one())), one_minus)
                    + &rf(UniPoly::constant(int(2) * &h * (&h - one())), one_plus))
                    - &RatFunc::constant(&a * &a);
                (eta_sq, eta_dd, w, u)
            } else {
                // Ψ = sin^{g+1} cos^{h−1}/Ξ(cos 2x), Ξ ∝ a−1+(b+2)η
                let den = lin(&a - one(), &b + int(2));
                let w = &(&rf(UniPoly::constant(-(&g + one()) / int(2)), one_minus.clone())
                    + &rf(UniPoly::constant((&h - one()) / int(2)), one_plus.clone()))
                    - &rf(UniPoly::constant(&b + int(2)), den.clone());
                let u = &(&(&(&rf(UniPoly::constant(int(2) * &g * (&g + one())), one_minus)
                    + &rf(UniPoly::constant(int(2) * (&h - one()) * (&h - int(2))), one_plus))
                    - &RatFunc::constant(&a * &a))
                    + &rf(UniPoly::constant(int(8) * (&a - one())), den.clone()))
                    - &rf(UniPoly::constant(int(8) * (int(2) * &g + one()) * (int(2) * &h - int(3))), &den * &den);
                (eta_sq, eta_dd, w, u)
            }
        }
        (f, _) => return Err(FamilyError::Unsupported(format!("conjugation route for {f} {d}"))),
    };
    let eta_sq = RatFunc::from_poly(eta_sq);
    let eta_dd = RatFunc::from_poly(eta_dd);
    let two = int(2);
    let c2 = -&eta_sq;
    let c1 = -&(&eta_dd + &(&eta_sq * &w).scale(&two));
    let c0 = &(&(&u - &(&eta_dd * &w)) - &(&eta_sq * &w.derivative())) - &(&eta_sq * &(&w * &w));
    Ok(DiffOp::new(vec![c0, c1, c2]))
}

/// Builds `H̃` by the requested route.
pub fn build_h_tilde(params: &ParamSet, d: &MultiIndex, route: Route) -> Result<DiffOp, FamilyError> {
    match route {
        Route::Conjugation => {
            let h = conjugation_h_tilde(params, d)?;
            let fam = builtin_deformed(params, d)?;
            let op = OperatorExpr::Diff(h.clone());
            for n in 0..=VALIDATE_N {
                let pn = fam.p(n as i64).unwrap();
                if op.apply_poly(&pn).ok() != Some(pn.scale(&fam.energy(n as i64))) {
                    return Err(FamilyError::EigenValidationFailed { n });
                }
            }
            Ok(h)
        }
        Route::Ansatz => match builtin_deformed(params, d)?.h_tilde {
            OperatorExpr::Diff(h) => Ok(h),
            _ => unreachable!("built-in systems are differential"),
        },
    }
}

/// `X(η) = ∫₀^η Ξ(y) Y(y) dy`.
pub fn build_x(xi: &UniPoly, y: &UniPoly) -> UniPoly {
    (xi * y).integral()
}

impl DeformedFamily {
    /// Leading coefficient of `P_{D,n}`.
    pub fn leading(&self, n: i64) -> Option<Rational> {
        self.p(n).and_then(|p| p.leading().cloned())
    }
}

/// Rational check that a polynomial is a nonzero multiple of another.
pub fn proportionality(p: &UniPoly, target: &UniPoly) -> Option<Rational> {
    if target.is_zero() {
        return p.is_zero().then(Rational::zero);
    }
    let c = p.coeff(target.degree().unwrap()).fdiv(target.leading().unwrap());
    (p == &target.scale(&c)).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use exactalg::upoly::poly_i;

    #[test]
    fn laguerre_type_one_data() {
        let g = rat(7, 3);
        let p = ParamSet::laguerre(g.clone());
        let d = MultiIndex::parse("1I").unwrap();
        let f = builtin_deformed(&p, &d).unwrap();
        assert_eq!(f.xi(), &lin(&g + rat(1, 2), int(1)));
        assert_eq!(f.p(0).unwrap(), lin(-(&g + rat(3, 2)), int(-1)));
        assert_eq!(build_x(f.xi(), &UniPoly::one()), UniPoly::new(vec![int(0), &g + rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn laguerre_type_two_x_min() {
        let g = rat(7, 3);
        let f = builtin_deformed(&ParamSet::laguerre(g.clone()), &MultiIndex::parse("1II").unwrap()).unwrap();
        // −½η(η+2g−3)
        let expect = UniPoly::new(vec![int(0), -(int(2) * &g - int(3)) / int(2), rat(-1, 2)]);
        assert_eq!(build_x(f.xi(), &UniPoly::one()), expect);
    }

    #[test]
    fn jacobi_type_one_matches_printed_form() {
        for p in ParamSet::default_samples(Family::J) {
            let f = builtin_deformed(&p, &MultiIndex::parse("1I").unwrap()).unwrap();
            let (a, b, h) = (p.get("a"), p.get("b"), p.get("h"));
            let quad = &poly_i(&[1, 1]) * &lin(&a - int(1), &b + int(2));
            let lin2 = lin(&a + int(1), &b + int(2));
            for n in 0..6 {
                let pn = classical_poly(&p, n);
                let expect = &(&quad * &pn.derivative()).scale(&rat(1, 4))
                    - &(&lin2 * &pn).scale(&((rat(3, 2) - &h) / int(4)));
                assert_eq!(f.p(n as i64).unwrap(), expect);
            }
            // X_min = ¼η((b+2)η + 2(a−1))
            let x = build_x(f.xi(), &UniPoly::one());
            assert_eq!(x, UniPoly::new(vec![int(0), (&a - int(1)) / int(2), (&b + int(2)) / int(4)]));
        }
    }

    #[test]
    fn routes_agree_for_classical_and_type_one() {
        for fam in [Family::L, Family::J] {
            for p in ParamSet::default_samples(fam) {
                for key in ["", "1I"] {
                    let d = MultiIndex::parse(key).unwrap();
                    let a = build_h_tilde(&p, &d, Route::Ansatz).unwrap();
                    let c = build_h_tilde(&p, &d, Route::Conjugation).unwrap();
                    assert_eq!(a, c, "{p} {d}");
                }
            }
        }
    }

    #[test]
    fn classical_forms_from_ansatz() {
        let g = rat(5, 2);
        let p = ParamSet::laguerre(g.clone());
        let ps: Vec<UniPoly> = (0..3).map(|n| classical_poly(&p, n)).collect();
        let h = ansatz_h_tilde(&p, &UniPoly::one(), &ps).unwrap();
        assert_eq!(h, classical_h_tilde(&p));
    }

    #[test]
    fn type_two_systems_validate() {
        for fam in [Family::L, Family::J] {
            for p in ParamSet::default_samples(fam) {
                let f = builtin_deformed(&p, &MultiIndex::parse("1II").unwrap()).unwrap();
                f.validate(8).unwrap();
            }
        }
    }

    #[test]
    fn wrong_degree_is_rejected() {
        let p = ParamSet::laguerre(int(2));
        let f = classical(&p).unwrap();
        let bad = DeformedFamily::from_parts(
            p,
            MultiIndex::parse("1I").unwrap(),
            lin(rat(5, 2), int(1)),
            PRule::Classical,
            f.h_tilde().clone(),
            Source::Builtin,
        );
        assert!(matches!(bad, Err(FamilyError::DegreeMismatch { n: 0, .. })));
    }
}
