//! Externally supplied family data (JSON).
//!
//! A plugin fixes numeric parameters, the multi-index, `Ξ_D` and a rule for
//! `P_{D,n}`. For L/J the Hamiltonian is rebuilt from the eigen-equations;
//! W/AW plugins carry it explicitly as `Σ_s f_s(v) T_s` together with `X`.
//! Energies always come from the built-in formulas.

use super::deformed::{ansatz_h_tilde, rule_polys, DeformedFamily, FamilyError, PRule, Source};
use super::params::{Family, MultiIndex, ParamSet, VType};
use crate::opalg::{OperatorExpr, ShiftKind, ShiftOp};
use exactalg::rational::serde_vec;
use exactalg::{format_rational, parse_rational, Field, Gaussian, RatFunc, Rational, UniPoly};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PluginFile {
    pub family: String,
    pub parameters: BTreeMap<String, String>,
    #[serde(rename = "D")]
    pub d: Vec<PluginIndex>,
    #[serde(with = "serde_vec")]
    pub xi: Vec<Rational>,
    #[serde(rename = "P")]
    pub p: PluginP,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<PluginHamiltonian>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_vec")]
    pub x: Option<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PluginIndex {
    pub d: u32,
    #[serde(rename = "type")]
    pub t: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum PluginP {
    Explicit(Vec<PolyCoeffs>),
    ClassicalCombination {
        #[serde(with = "serde_vec")]
        a: Vec<Rational>,
        #[serde(with = "serde_vec")]
        b: Vec<Rational>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyCoeffs(#[serde(with = "serde_vec")] pub Vec<Rational>);

/// `Σ_s (num_s/den_s)(v) T_s`; Wilson coefficients are `"re,im"` strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PluginHamiltonian {
    pub kind: String,
    pub terms: Vec<ShiftTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftTerm {
    pub shift: i64,
    pub num: Vec<String>,
    pub den: Vec<String>,
}

mod opt_vec {
    use exactalg::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|v| v.iter().map(format_rational).collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
        let v = Option::<Vec<String>>::deserialize(d)?;
        v.map(|v| v.iter().map(|s| parse_rational(s).map_err(D::Error::custom)).collect()).transpose()
    }
}

/// A validated plugin system plus the `X` it supplies (W/AW).
#[derive(Clone, Debug)]
pub struct Plugin {
    pub family: DeformedFamily,
    pub x: Option<UniPoly>,
}

fn schema(msg: impl Into<String>) -> FamilyError {
    FamilyError::Schema(msg.into())
}

/// How many listed polynomials feed the Hamiltonian ansatz.
const ANSATZ_POLYS: usize = 6;

pub fn load_family_plugin(path: &Path) -> Result<Plugin, FamilyError> {
    let text = std::fs::read_to_string(path).map_err(|e| schema(format!("{}: {e}", path.display())))?;
    parse_plugin(&text, &path.display().to_string())
}

pub fn parse_plugin(text: &str, origin: &str) -> Result<Plugin, FamilyError> {
    let file: PluginFile = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    build_plugin(&file, origin)
}

pub fn build_plugin(file: &PluginFile, origin: &str) -> Result<Plugin, FamilyError> {
    let family: Family = file.family.parse()?;
    let mut values = BTreeMap::new();
    for (k, v) in &file.parameters {
        values.insert(k.clone(), parse_rational(v).map_err(|e| schema(format!("parameter {k}: {e}")))?);
    }
    let params = ParamSet::new(family, &values)?;
    let entries = file
        .d
        .iter()
        .map(|e| match e.t.as_str() {
            "I" => Ok((e.d, VType::I)),
            "II" => Ok((e.d, VType::II)),
            t => Err(schema(format!("virtual-state type {t:?}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let d = MultiIndex::new(entries).map_err(|e| schema(e.to_string()))?;
    let xi = UniPoly::new(file.xi.clone());
    if xi.degree() != Some(d.ell()) {
        return Err(schema(format!("deg Ξ = {:?}, expected {}", xi.degree(), d.ell())));
    }
    let rule = match &file.p {
        PluginP::Explicit(ps) => PRule::Explicit(ps.iter().map(|c| UniPoly::new(c.0.clone())).collect()),
        PluginP::ClassicalCombination { a, b } => {
            if !family.is_continuous() {
                return Err(schema("classical-combination needs L or J"));
            }
            PRule::Combination { a: UniPoly::new(a.clone()), b: UniPoly::new(b.clone()) }
        }
    };
    if let PRule::Explicit(ps) = &rule {
        if let Some((n, p)) = ps.iter().enumerate().find(|(n, p)| p.degree() != Some(d.ell() + n)) {
            return Err(FamilyError::DegreeMismatch { n, expected: d.ell() + n, got: p.degree() });
        }
    }
    let (h_tilde, x) = if family.is_continuous() {
        if file.hamiltonian.is_some() || file.x.is_some() {
            return Err(schema("L/J plugins derive the Hamiltonian and X; drop those fields"));
        }
        let count = match &rule {
            PRule::Explicit(ps) => ps.len().min(ANSATZ_POLYS),
            _ => ANSATZ_POLYS,
        };
        let polys = rule_polys(&params, &rule, count);
        if let Some((n, p)) = polys.iter().enumerate().find(|(n, p)| p.degree() != Some(d.ell() + n)) {
            return Err(FamilyError::DegreeMismatch { n, expected: d.ell() + n, got: p.degree() });
        }
        (OperatorExpr::Diff(ansatz_h_tilde(&params, &xi, &polys)?), None)
    } else {
        let ham = file.hamiltonian.as_ref().ok_or_else(|| schema("W/AW plugins need a hamiltonian"))?;
        let x = file.x.as_ref().ok_or_else(|| schema("W/AW plugins need x"))?;
        (shift_hamiltonian(family, &params, ham)?, Some(UniPoly::new(x.clone())))
    };
    let family = DeformedFamily::from_parts(params, d, xi, rule, h_tilde, Source::Plugin(origin.to_string()))?;
    Ok(Plugin { family, x })
}

fn parse_coeffs<F: Field>(v: &[String], parse: impl Fn(&str) -> Result<F, String>) -> Result<UniPoly<F>, FamilyError> {
    Ok(UniPoly::new(v.iter().map(|s| parse(s).map_err(schema)).collect::<Result<Vec<_>, _>>()?))
}

fn shift_terms<F: Field>(
    ham: &PluginHamiltonian,
    parse: impl Fn(&str) -> Result<F, String> + Copy,
) -> Result<Vec<(i64, RatFunc<F>)>, FamilyError> {
    ham.terms
        .iter()
        .map(|t| {
            let den = parse_coeffs(&t.den, parse)?;
            if den.is_zero() {
                return Err(schema("zero denominator"));
            }
            Ok((t.shift, RatFunc::new(parse_coeffs(&t.num, parse)?, den)))
        })
        .collect()
}

fn shift_hamiltonian(family: Family, params: &ParamSet, ham: &PluginHamiltonian) -> Result<OperatorExpr, FamilyError> {
    match (family, ham.kind.as_str()) {
        (Family::W, "wilson") => {
            let kind = ShiftKind::Additive { step: Gaussian::new(Rational::from_integer(0.into()), Rational::from_integer((-1).into())) };
            Ok(OperatorExpr::Wilson(ShiftOp::new(kind, shift_terms(ham, Gaussian::parse)?)))
        }
        (Family::AW, "askey-wilson") => {
            let kind = ShiftKind::Multiplicative { q: params.get("q") };
            Ok(OperatorExpr::AskeyWilson(ShiftOp::new(kind, shift_terms(ham, parse_rational)?)))
        }
        (f, k) => Err(schema(format!("hamiltonian kind {k:?} for family {f}"))),
    }
}

/// Re-encodes an L/J system with a listed or combination rule.
pub fn encode_plugin(df: &DeformedFamily) -> Result<PluginFile, FamilyError> {
    if !df.family().is_continuous() {
        return Err(FamilyError::Unsupported("encoding W/AW systems".into()));
    }
    let coeffs = |p: &UniPoly| p.coeffs().to_vec();
    let p = match df.rule() {
        PRule::Combination { a, b } => PluginP::ClassicalCombination { a: coeffs(a), b: coeffs(b) },
        PRule::Explicit(ps) => PluginP::Explicit(ps.iter().map(|p| PolyCoeffs(coeffs(p))).collect()),
        PRule::Classical => PluginP::ClassicalCombination { a: vec![], b: vec![Rational::from_integer(1.into())] },
    };
    Ok(PluginFile {
        family: df.family().name().to_string(),
        parameters: df.params().primary().iter().map(|(k, v)| (k.clone(), format_rational(v))).collect(),
        d: df.multi_index().entries().iter().map(|(d, t)| PluginIndex { d: *d, t: t.to_string() }).collect(),
        xi: coeffs(df.xi()),
        p,
        hamiltonian: None,
        x: None,
    })
}
