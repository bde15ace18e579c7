//! Stored `R_{−1}(z)` reference rows and the comparison against solved data.
//!
//! Each row keeps the printed factored form as an expression string and the
//! expanded form as a polynomial record; `R_{−1} = scale · expanded`. The file
//! is pinned by a SHA-256 digest.

use super::ClosureData;
use crate::families::{Family, MultiIndex, ParamSet};
use exactalg::{format_rational, Bindings, Expr, ExprError, ParamPoly, Rational, UniPoly};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TABLE_JSON: &str = include_str!("../../data/appendix_b.json");
pub const TABLE_SHA256: &str = include_str!("../../data/appendix_b.json.sha256");

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AppendixError {
    #[error("no stored row for {family} {d}")]
    TableMissing { family: Family, d: String },
    #[error("reference table checksum mismatch")]
    Checksum,
    #[error("reference table: {0}")]
    Format(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("solved data lacks R_-1")]
    MissingRMinus1,
}

/// Whether core can regenerate a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    /// Built-in systems.
    Builtin,
    /// Needs plugin data for `Ξ_D`, `P_{D,n}` (or the W/AW Hamiltonian).
    Plugin,
    /// Stored and self-checked only.
    ReferenceOnly,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corrected {
    pub printed: String,
    #[serde(rename = "R_minus1")]
    pub r_minus1: ParamPoly,
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    pub family: String,
    #[serde(rename = "D")]
    pub d: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub status: RowStatus,
    pub printed: String,
    #[serde(default)]
    pub scale: Option<String>,
    #[serde(rename = "R_minus1")]
    pub r_minus1: ParamPoly,
    #[serde(default)]
    pub corrected: Option<Corrected>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    format: u32,
    entries: Vec<TableRow>,
}

#[derive(Clone, Debug)]
pub struct ReferenceTable {
    rows: Vec<TableRow>,
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl ReferenceTable {
    /// The shipped table, checksum verified.
    pub fn load() -> Result<Self, AppendixError> {
        if sha256_hex(TABLE_JSON) != TABLE_SHA256.trim() {
            return Err(AppendixError::Checksum);
        }
        Self::parse(TABLE_JSON)
    }

    pub fn parse(text: &str) -> Result<Self, AppendixError> {
        let f: TableFile = serde_json::from_str(text).map_err(|e| AppendixError::Format(e.to_string()))?;
        if f.format != 1 {
            return Err(AppendixError::Format(format!("format {}", f.format)));
        }
        for r in &f.entries {
            r.family.parse::<Family>().map_err(|e| AppendixError::Format(e.to_string()))?;
            MultiIndex::parse(&r.d).map_err(|e| AppendixError::Format(e.to_string()))?;
        }
        Ok(ReferenceTable { rows: f.entries })
    }

    pub fn rows(&self) -> &[TableRow] {
        &self.rows
    }

    pub fn find(&self, family: Family, d: &MultiIndex) -> Result<&TableRow, AppendixError> {
        self.rows
            .iter()
            .find(|r| r.family_kind() == family && r.multi_index() == *d)
            .ok_or_else(|| AppendixError::TableMissing { family, d: d.key() })
    }
}

impl TableRow {
    pub fn family_kind(&self) -> Family {
        self.family.parse().expect("validated on load")
    }

    pub fn multi_index(&self) -> MultiIndex {
        MultiIndex::parse(&self.d).expect("validated on load")
    }

    fn scale_at(&self, b: &Bindings) -> Result<Rational, AppendixError> {
        match &self.scale {
            Some(s) => Ok(Expr::parse(s)?.eval(b)?),
            None => Ok(Rational::from_integer(1.into())),
        }
    }

    /// Printed form evaluated with every symbol, including `z`, bound.
    pub fn printed_at(&self, b: &Bindings) -> Result<Rational, AppendixError> {
        Ok(Expr::parse(&self.printed)?.eval(b)?)
    }

    /// `scale · expanded` evaluated with every symbol bound.
    pub fn expanded_at(&self, b: &Bindings) -> Result<Rational, AppendixError> {
        let v = self.r_minus1.eval(b).map_err(|e| AppendixError::Format(e.to_string()))?;
        Ok(self.scale_at(b)? * v)
    }

    /// `R_{−1}` as a polynomial in `z` at the given parameters.
    pub fn at_params(&self, b: &Bindings) -> Result<UniPoly, AppendixError> {
        poly_in_z(&self.r_minus1, b).map(|p| p.scale(&self.scale_at(b).unwrap_or_else(|_| Rational::from_integer(1.into()))))
    }

    /// Factored and expanded forms agree at every point.
    pub fn transcription_check(&self, points: &[Bindings]) -> Result<bool, AppendixError> {
        for b in points {
            if self.printed_at(b)? != self.expanded_at(b)? {
                return Ok(false);
            }
            if let Some(c) = &self.corrected {
                let v = c.r_minus1.eval(b).map_err(|e| AppendixError::Format(e.to_string()))?;
                if Expr::parse(&c.printed)?.eval(b)? != self.scale_at(b)? * v {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn poly_in_z(p: &ParamPoly, b: &Bindings) -> Result<UniPoly, AppendixError> {
    let mut b = b.clone();
    b.remove("z");
    p.partial_eval(&b).to_upoly("z").ok_or_else(|| AppendixError::Format("row has unbound parameters".into()))
}

/// Three parameter points (with `z`) for the transcription self-check.
pub fn check_points(family: Family) -> Vec<Bindings> {
    let zs = [exactalg::rat(3, 7), exactalg::rat(-5, 2), exactalg::rat(11, 3)];
    ParamSet::default_samples(family)
        .into_iter()
        .cycle()
        .take(3)
        .zip(zs)
        .map(|(p, z)| {
            let mut b = p.bindings();
            b.insert("z".into(), z);
            b
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AppendixComparison {
    pub family: String,
    #[serde(rename = "D")]
    pub d: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub parameters: Bindings2,
    pub expected: Vec<String>,
    pub actual: Vec<String>,
    pub matches: bool,
    /// Set when the stored row carries a corrected variant.
    pub matches_corrected: Option<bool>,
}

/// Parameter echo with exact strings.
pub type Bindings2 = std::collections::BTreeMap<String, String>;

fn strings(p: &UniPoly) -> Vec<String> {
    p.coeffs().iter().map(format_rational).collect()
}

/// Coefficient-wise comparison of solved `R_{−1}` at one parameter point.
pub fn compare_appendix_b(
    table: &ReferenceTable,
    params: &ParamSet,
    d: &MultiIndex,
    solved: &ClosureData,
) -> Result<AppendixComparison, AppendixError> {
    let row = table.find(params.family(), d)?;
    let got = solved.r_minus1.as_ref().ok_or(AppendixError::MissingRMinus1)?;
    let b = params.bindings();
    let expected = row.at_params(&b)?;
    let matches_corrected = match &row.corrected {
        Some(c) => Some(&poly_in_z(&c.r_minus1, &b)?.scale(&row.scale_at(&b)?) == got),
        None => None,
    };
    Ok(AppendixComparison {
        family: row.family.clone(),
        d: row.d.clone(),
        k: row.k,
        parameters: params.primary().iter().map(|(k, v)| (k.clone(), format_rational(v))).collect(),
        expected: strings(&expected),
        actual: strings(got),
        matches: &expected == got,
        matches_corrected,
    })
}

/// Exact comparison of a reconstructed `R_{−1}` (polynomial in the family
/// parameters and `z`) with an unscaled row.
pub fn compare_symbolic(row: &TableRow, reconstructed: &ParamPoly) -> bool {
    row.scale.is_none() && &row.r_minus1 == reconstructed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_and_self_check() {
        let t = ReferenceTable::load().unwrap();
        assert_eq!(t.rows().len(), 27);
        for r in t.rows() {
            assert!(r.transcription_check(&check_points(r.family_kind())).unwrap(), "{} {}", r.family, r.d);
        }
        assert!(ReferenceTable::parse(&TABLE_JSON.replace("\"format\": 1", "\"format\": 2")).is_err());
    }

    #[test]
    fn missing_rows() {
        let t = ReferenceTable::load().unwrap();
        let e = t.find(Family::L, &MultiIndex::parse("4I").unwrap()).unwrap_err();
        assert!(matches!(e, AppendixError::TableMissing { .. }));
    }
}
