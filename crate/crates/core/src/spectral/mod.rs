//! The companion matrix of the closure relation, its diagonalization in
//! closed form, and the conjectured eigenvalues `α_j(z)`.

mod quad;

pub use quad::{sign_of, QuadExt};

use crate::families::{energy, Family, ParamSet};
use exactalg::rational::powi;
use exactalg::{int, rat, Bindings, Expr, Matrix, ParamPoly, Rational};
use num_traits::{One, Zero};
use serde::Serialize;
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectralError {
    #[error("eigenvalues must be distinct and nonzero")]
    DegenerateSpectrum,
    #[error("parameter {0} must be bound")]
    Unbound(String),
    #[error("√ of the discriminant at E_{n} is not {expected}")]
    SqrtMismatch { n: i64, expected: String },
}

/// `K×K` matrix with ones below the diagonal and `R_0..R_{K−1}` in the last column.
pub fn companion(r: &[Rational]) -> Matrix {
    let k = r.len();
    let mut m = Matrix::zeros(k, k);
    for i in 0..k {
        if i + 1 < k {
            m[(i + 1, i)] = Rational::one();
        }
        m[(i, k - 1)] = r[i].clone();
    }
    m
}

/// `R_i = (−1)^{i+1} e_{K−i}(α)`, i.e. `Π(x−α_j) = x^K − Σ R_i x^i`.
pub fn r_from_alphas(alphas: &[Rational]) -> Vec<Rational> {
    // coefficients of Π(x − α_j), ascending
    let mut c = vec![Rational::one()];
    for a in alphas {
        let mut next = vec![Rational::zero(); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * a;
        }
        c = next;
    }
    c.truncate(alphas.len());
    c.into_iter().map(|x| -x).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralChecks {
    /// `A p_j = α_j p_j` for every `j`.
    pub eigenvectors: bool,
    /// `P · P⁻¹ = 1`.
    pub inverse: bool,
    /// `Σ_j α_j⁻¹ (P⁻¹)_{j1} = R_0⁻¹`.
    pub r0_sum: bool,
    /// `|P| = Π_{i<j} (α_i − α_j)`.
    pub determinant: bool,
}

impl SpectralChecks {
    pub fn all(&self) -> bool {
        self.eigenvectors && self.inverse && self.r0_sum && self.determinant
    }
}

/// Closed-form diagonalization of the companion matrix at numeric `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    pub alphas: Vec<Rational>,
    pub r: Vec<Rational>,
    /// `p[i][j]`, zero-based.
    pub p: Vec<Vec<Rational>>,
    /// `p_inv[j][i] = (P⁻¹)_{ji}`, zero-based.
    pub p_inv: Vec<Vec<Rational>>,
    pub checks: SpectralChecks,
}

impl SpectralData {
    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    /// `p_{ij}` with one-based indices.
    pub fn p_at(&self, i: usize, j: usize) -> &Rational {
        &self.p[i - 1][j - 1]
    }

    /// `(P⁻¹)_{j1}` with one-based `j`.
    pub fn p_inv_first(&self, j: usize) -> &Rational {
        &self.p_inv[j - 1][0]
    }

    /// `R^{[n]} = A^n e_1` through the eigen-decomposition.
    pub fn r_vector_power(&self, n: u32) -> Vec<Rational> {
        let k = self.k();
        (0..k)
            .map(|i| {
                (0..k).fold(Rational::zero(), |acc, j| {
                    acc + &self.p[i][j] * self.alphas[j].pow(n as i32) * &self.p_inv[j][0]
                })
            })
            .collect()
    }

    /// Iterates `R^{[n+1]} = A R^{[n]}` from `e_1` and compares with the
    /// eigen-decomposition for `n ≤ n_max`; also `R^{[K]} = R`.
    pub fn check_recursion(&self, n_max: u32) -> bool {
        let a = companion(&self.r);
        let k = self.k();
        let mut v = vec![Rational::zero(); k];
        v[0] = Rational::one();
        for n in 0..=n_max {
            if v != self.r_vector_power(n) {
                return false;
            }
            if n as usize == k && v != self.r {
                return false;
            }
            v = a.mul_vec(&v);
        }
        true
    }
}

pub fn eigen_closed_form(alphas: &[Rational]) -> Result<SpectralData, SpectralError> {
    let k = alphas.len();
    let distinct = (0..k).all(|i| (i + 1..k).all(|j| alphas[i] != alphas[j]));
    if k == 0 || !distinct || alphas.iter().any(Zero::is_zero) {
        return Err(SpectralError::DegenerateSpectrum);
    }
    let r = r_from_alphas(alphas);
    // p_{ij} = α_j^{K−i} − Σ_{m=1}^{K−i} R_{K−m} α_j^{K−i−m}
    let p: Vec<Vec<Rational>> = (1..=k)
        .map(|i| {
            alphas
                .iter()
                .map(|a| {
                    let mut v = a.pow((k - i) as i32);
                    for m in 1..=k - i {
                        v -= &r[k - m] * a.pow((k - i - m) as i32);
                    }
                    v
                })
                .collect()
        })
        .collect();
    // (P⁻¹)_{ji} = α_j^{i−1} / Π_{m≠j} (α_j − α_m)
    let p_inv: Vec<Vec<Rational>> = (0..k)
        .map(|j| {
            let den = (0..k).filter(|&m| m != j).fold(Rational::one(), |acc, m| acc * (&alphas[j] - &alphas[m]));
            (0..k).map(|i| alphas[j].pow(i as i32) / &den).collect()
        })
        .collect();

    let a = companion(&r);
    let pm = Matrix::from_rows(p.clone());
    let eigenvectors = (0..k).all(|j| {
        let col: Vec<Rational> = (0..k).map(|i| p[i][j].clone()).collect();
        a.mul_vec(&col) == col.iter().map(|x| x * &alphas[j]).collect::<Vec<_>>()
    });
    let inverse = pm.mul(&Matrix::from_rows(p_inv.clone())) == Matrix::identity(k);
    let sum = (0..k).fold(Rational::zero(), |acc, j| acc + &p_inv[j][0] / &alphas[j]);
    let r0_sum = sum == r[0].recip();
    let vdm = (0..k).fold(Rational::one(), |acc, i| (i + 1..k).fold(acc, |acc, j| acc * (&alphas[i] - &alphas[j])));
    let determinant = pm.determinant() == vdm;
    Ok(SpectralData { alphas: alphas.to_vec(), r, p, p_inv, checks: SpectralChecks { eigenvectors, inverse, r0_sum, determinant } })
}

/// The conjectured eigenvalues as `u(z) + v(z)·s`, `s² = disc`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSet {
    pub family: Family,
    pub l: usize,
    pub disc: ParamPoly,
    pub alphas: Vec<QuadExt>,
}

fn p(s: &str) -> ParamPoly {
    exactalg::expr::poly(s).expect("built-in polynomial")
}

fn bound(b: &Bindings, name: &str) -> Result<Rational, SpectralError> {
    b.get(name).cloned().ok_or_else(|| SpectralError::Unbound(name.into()))
}

/// `α_1..α_{2L}` in `z`. Symbols of `b` are substituted; L, J and W may
/// leave `a` or `b1` symbolic, AW needs `q`, `r = √q` and `b4` bound.
pub fn alpha_conjecture(family: Family, l: usize, b: &Bindings) -> Result<AlphaSet, SpectralError> {
    let mut alphas = Vec::with_capacity(2 * l);
    let disc = match family {
        Family::L => ParamPoly::zero(),
        Family::J => p("z+a^2"),
        Family::W => p("4z+(b1-1)^2"),
        Family::AW => {
            let (q, b4) = (bound(b, "q")?, bound(b, "b4")?);
            let w = &p("z") + &ParamPoly::constant(int(1) + &b4 / &q);
            &(&w * &w) - &ParamPoly::constant(int(4) * &b4 / &q)
        }
    };
    // creation side m = L..1, then annihilation side m = 1..L with the conjugate root
    let pair = |m: i64| -> Result<QuadExt, SpectralError> {
        let mm = int(m);
        Ok(match family {
            Family::L => QuadExt::rational(ParamPoly::constant(int(4 * m))),
            Family::J => QuadExt::new(ParamPoly::constant(int(4 * m * m)), ParamPoly::constant(int(4 * m))),
            Family::W => QuadExt::new(ParamPoly::constant(&mm * &mm), ParamPoly::constant(mm)),
            Family::AW => {
                let (q, r, b4) = (bound(b, "q")?, bound(b, "r")?, bound(b, "b4")?);
                let w = &p("z") + &ParamPoly::constant(int(1) + &b4 / &q);
                let d = powi(&r, -m) - powi(&r, m);
                QuadExt::new(w.scale(&(&d * &d / int(2))), ParamPoly::constant((powi(&q, -m) - powi(&q, m)) / int(2)))
            }
        })
    };
    for j in 1..=l as i64 {
        alphas.push(pair(l as i64 + 1 - j)?);
    }
    for j in l as i64 + 1..=2 * l as i64 {
        let c = pair(j - l as i64)?;
        alphas.push(match family {
            Family::L => QuadExt::rational(-&c.u),
            _ => c.conj(),
        });
    }
    let alphas = alphas.into_iter().map(|a| a.partial_eval(b)).collect();
    Ok(AlphaSet { family, l, disc: disc.partial_eval(b), alphas })
}

impl AlphaSet {
    pub fn k(&self) -> usize {
        2 * self.l
    }

    /// `R_0..R_{K−1}` as polynomials in `z`, pairing `α_j` with `α_{2L+1−j}`.
    pub fn r_polys(&self) -> Vec<ParamPoly> {
        let mut c = vec![ParamPoly::one()];
        for (s, n) in self.pair_sums_products() {
            // multiply by x² − s x + n
            let mut next = vec![ParamPoly::zero(); c.len() + 2];
            for (i, ci) in c.iter().enumerate() {
                next[i + 2] = &next[i + 2] + ci;
                next[i + 1] = &next[i + 1] - &(ci * &s);
                next[i] = &next[i] + &(ci * &n);
            }
            c = next;
        }
        c.truncate(self.k());
        c.into_iter().map(|x| -&x).collect()
    }

    /// `(α_j + α_{2L+1−j}, α_j α_{2L+1−j})` for `j = 1..L`.
    pub fn pair_sums_products(&self) -> Vec<(ParamPoly, ParamPoly)> {
        (0..self.l)
            .map(|j| {
                let a = &self.alphas[j];
                let b = &self.alphas[self.k() - 1 - j];
                let s = a.add(b);
                let prod = a.mul(b, &self.disc);
                (s.u, prod.u)
            })
            .collect()
    }

    /// The pairs really are conjugate: sums and products carry no `s`.
    pub fn pairs_are_polynomial(&self) -> bool {
        (0..self.l).all(|j| {
            let a = &self.alphas[j];
            let b = &self.alphas[self.k() - 1 - j];
            a.add(b).v.is_zero() && a.mul(b, &self.disc).v.is_zero()
        })
    }
}

/// Closed forms of `α_j + α_{2L+1−j}` and `α_j α_{2L+1−j}` for pair index
/// `m = L+1−j`, as printed for each family.
pub fn printed_pair_forms(family: Family, m: i64, b: &Bindings) -> Result<(ParamPoly, ParamPoly), SpectralError> {
    let mm = int(m);
    let mut bb = b.clone();
    bb.insert("m".into(), mm.clone());
    let e = |s: &str| Expr::parse(s).expect("built-in form").to_poly_with(&bb).expect("polynomial form");
    Ok(match family {
        Family::L => (ParamPoly::zero(), ParamPoly::constant(int(-16) * &mm * &mm)),
        Family::J => (e("8m^2"), e("16m^2(m^2-z-a^2)")),
        Family::W => (e("2m^2"), e("m^2(m^2-4z-(b1-1)^2)")),
        Family::AW => {
            let (q, r, b4) = (bound(b, "q")?, bound(b, "r")?, bound(b, "b4")?);
            let w = &p("z") + &ParamPoly::constant(int(1) + &b4 / &q);
            let minus = powi(&r, -m) - powi(&r, m);
            let plus = powi(&r, -m) + powi(&r, m);
            let a = &minus * &minus;
            let sum = w.scale(&a);
            let prod = (&ParamPoly::constant(&plus * &plus * &b4 / &q) - &(&w * &w)).scale(&a);
            (sum, prod)
        }
    })
}

/// `√disc` at `z = E_n`, where it is rational.
pub fn sqrt_at_energy(params: &ParamSet, n: i64) -> Result<Rational, SpectralError> {
    let nn = int(n);
    let s = match params.family() {
        Family::L => Rational::zero(),
        Family::J => int(2) * &nn + params.get("a"),
        Family::W => int(2) * &nn + params.get("b1") - int(1),
        Family::AW => {
            let q = params.get("q");
            powi(&q, -n) - params.get("b4") * powi(&q, n - 1)
        }
    };
    Ok(s)
}

/// `α_j(E_n)` at numeric parameters; also checks that the stated square
/// root is the non-negative root of the discriminant.
pub fn alpha_values(params: &ParamSet, l: usize, n: i64) -> Result<Vec<Rational>, SpectralError> {
    let b = params.bindings();
    let set = alpha_conjecture(params.family(), l, &b)?;
    let mut bz = b.clone();
    bz.insert("z".into(), energy(params, n));
    let s = sqrt_at_energy(params, n)?;
    let disc = set.disc.eval(&bz).map_err(|_| SpectralError::Unbound("z".into()))?;
    if &s * &s != disc || s < Rational::zero() {
        return Err(SpectralError::SqrtMismatch { n, expected: exactalg::format_rational(&s) });
    }
    Ok(set.alphas.iter().map(|a| a.eval_with(&bz, &s).expect("all symbols bound")).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpacingEntry {
    pub n: i64,
    pub j: usize,
    pub pass: bool,
}

/// `α_j(E_n) = E_{n+L+1−j} − E_n` (`j ≤ L`) and `E_{n−(j−L)} − E_n` (`j > L`).
pub fn check_spacing(params: &ParamSet, l: usize, n_range: std::ops::RangeInclusive<i64>) -> Result<Vec<SpacingEntry>, SpectralError> {
    let mut out = Vec::new();
    for n in n_range {
        let al = alpha_values(params, l, n)?;
        let en = energy(params, n);
        for (idx, a) in al.iter().enumerate() {
            let j = idx + 1;
            let target = if j <= l { n + (l + 1 - j) as i64 } else { n - (j - l) as i64 };
            out.push(SpacingEntry { n, j, pass: a == &(energy(params, target) - &en) });
        }
    }
    Ok(out)
}

/// Default `z ≥ 0` grid for ordering checks.
pub fn z_grid() -> Vec<Rational> {
    [(0, 1), (1, 3), (1, 2), (1, 1), (2, 1), (3, 1), (5, 1), (8, 1), (13, 1), (21, 1), (50, 1), (100, 1)]
        .iter()
        .map(|&(a, b)| rat(a, b))
        .collect()
}

/// `α_1(z) > … > α_{2L}(z)`, decided exactly with `s = +√disc(z)`.
pub fn strictly_ordered_at(set: &AlphaSet, b: &Bindings, z: &Rational) -> Option<bool> {
    let mut bz = b.clone();
    bz.insert("z".into(), z.clone());
    let disc = set.disc.eval(&bz).ok()?;
    if disc < Rational::zero() {
        return Some(false);
    }
    let mut ok = true;
    for w in set.alphas.windows(2) {
        let diff = QuadExt::new(&w[0].u - &w[1].u, &w[0].v - &w[1].v);
        ok &= diff.sign(&bz, &disc)? == Ordering::Greater;
    }
    Some(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use exactalg::bindings;

    #[test]
    fn two_by_two_by_hand() {
        let sd = eigen_closed_form(&[int(2), int(-3)]).unwrap();
        assert_eq!(sd.r, vec![int(6), int(-1)]);
        assert_eq!(sd.p, vec![vec![int(3), int(-2)], vec![int(1), int(1)]]);
        assert_eq!(sd.p_inv[0][0], rat(1, 5));
        assert_eq!(sd.p_inv[1][0], rat(-1, 5));
        assert!(sd.checks.all());
        assert!(sd.check_recursion(6));
    }

    #[test]
    fn degenerate() {
        assert_eq!(eigen_closed_form(&[int(1), int(0)]), Err(SpectralError::DegenerateSpectrum));
        assert_eq!(eigen_closed_form(&[int(1), int(1)]), Err(SpectralError::DegenerateSpectrum));
    }

    #[test]
    fn jacobi_pairs_symbolic() {
        let set = alpha_conjecture(Family::J, 2, &Bindings::new()).unwrap();
        assert!(set.pairs_are_polynomial());
        let r = set.r_polys();
        assert_eq!(r[3], p("40"));
        assert_eq!(r[2], p("80(z+a^2-33/5)"));
        assert_eq!(r[1], p("-1024(z+a^2-5/2)"));
        assert_eq!(r[0], p("-1024(z+a^2-1)(z+a^2-4)"));
    }

    #[test]
    fn wilson_pair_l1() {
        let set = alpha_conjecture(Family::W, 1, &Bindings::new()).unwrap();
        let (s, prod) = set.pair_sums_products().remove(0);
        assert_eq!(s, p("2"));
        assert_eq!(prod, p("1-4z-(b1-1)^2"));
        let b = bindings([("b1", int(9))]);
        assert_eq!(printed_pair_forms(Family::W, 1, &b).unwrap(), (s, prod.partial_eval(&b)));
    }

    #[test]
    fn jacobi_values_at_energy() {
        let p = ParamSet::jacobi(int(2), int(3));
        let a = alpha_values(&p, 2, 3).unwrap();
        assert_eq!(a[1], int(48));
        assert_eq!(a[1], energy(&p, 4) - energy(&p, 3));
    }
}
