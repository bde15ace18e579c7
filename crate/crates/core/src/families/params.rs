use exactalg::rational::{powi, sqrt_exact};
use exactalg::{format_rational, int, rat, Bindings, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    L,
    J,
    W,
    AW,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::L, Family::J, Family::W, Family::AW];

    pub fn name(self) -> &'static str {
        match self {
            Family::L => "Laguerre",
            Family::J => "Jacobi",
            Family::W => "Wilson",
            Family::AW => "Askey-Wilson",
        }
    }

    /// Differential (ordinary QM) vs difference (discrete QM) family.
    pub fn is_continuous(self) -> bool {
        matches!(self, Family::L | Family::J)
    }

    pub fn primary_names(self) -> &'static [&'static str] {
        match self {
            Family::L => &["g"],
            Family::J => &["g", "h"],
            Family::W => &["a1", "a2", "a3", "a4"],
            Family::AW => &["a1", "a2", "a3", "a4", "q"],
        }
    }

    pub fn energy_formula(self) -> &'static str {
        match self {
            Family::L => "4n",
            Family::J => "4n(n+g+h)",
            Family::W => "n(n+b1-1)",
            Family::AW => "(q^-n-1)(1-b4 q^(n-1))",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::L => "L",
            Family::J => "J",
            Family::W => "W",
            Family::AW => "AW",
        })
    }
}

impl FromStr for Family {
    type Err = ParamError;
    fn from_str(s: &str) -> Result<Self, ParamError> {
        match s.trim() {
            "L" | "Laguerre" => Ok(Family::L),
            "J" | "Jacobi" => Ok(Family::J),
            "W" | "Wilson" => Ok(Family::W),
            "AW" | "Askey-Wilson" => Ok(Family::AW),
            other => Err(ParamError::UnknownFamily(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("missing parameter `{0}`")]
    Missing(String),
    #[error("unexpected parameter `{0}`")]
    Unexpected(String),
    #[error("parameters outside the admissible range: {0}")]
    OutOfRange(String),
}

/// Virtual-state type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VType {
    I,
    II,
}

impl fmt::Display for VType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VType::I => "I",
            VType::II => "II",
        })
    }
}

/// Exact parameter values of one family instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSet {
    family: Family,
    values: BTreeMap<String, Rational>,
}

impl ParamSet {
    pub fn new(family: Family, values: &Bindings) -> Result<Self, ParamError> {
        for k in values.keys() {
            if !family.primary_names().contains(&k.as_str()) {
                return Err(ParamError::Unexpected(k.clone()));
            }
        }
        let mut m = BTreeMap::new();
        for &n in family.primary_names() {
            let v = values.get(n).ok_or_else(|| ParamError::Missing(n.to_string()))?;
            m.insert(n.to_string(), v.clone());
        }
        let p = ParamSet { family, values: m };
        if family == Family::AW {
            let q = p.values["q"].clone();
            if sqrt_exact(&q).is_none() || q <= Rational::zero() || q >= Rational::one() {
                return Err(ParamError::OutOfRange("q must be a rational square in (0,1)".into()));
            }
        }
        Ok(p)
    }

    pub fn laguerre(g: Rational) -> Self {
        ParamSet { family: Family::L, values: [("g".to_string(), g)].into() }
    }

    pub fn jacobi(g: Rational, h: Rational) -> Self {
        ParamSet { family: Family::J, values: [("g".to_string(), g), ("h".to_string(), h)].into() }
    }

    /// From `a = g+h`, `b = g−h`.
    pub fn jacobi_ab(a: &Rational, b: &Rational) -> Self {
        let two = int(2);
        Self::jacobi((a + b) / &two, (a - b) / two)
    }

    pub fn wilson(a: [Rational; 4]) -> Self {
        let values = a.into_iter().enumerate().map(|(i, v)| (format!("a{}", i + 1), v)).collect();
        ParamSet { family: Family::W, values }
    }

    /// Panics unless `q` is a rational square in (0,1).
    pub fn askey_wilson(a: [Rational; 4], q: Rational) -> Self {
        let mut values: Bindings = a.into_iter().enumerate().map(|(i, v)| (format!("a{}", i + 1), v)).collect();
        values.insert("q".into(), q);
        Self::new(Family::AW, &values).expect("invalid Askey-Wilson parameters")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn primary(&self) -> &BTreeMap<String, Rational> {
        &self.values
    }

    /// Primary or derived symbol. Panics on an unknown name.
    pub fn get(&self, name: &str) -> Rational {
        self.bindings().get(name).cloned().unwrap_or_else(|| panic!("no parameter `{name}` for {}", self.family))
    }

    fn a(&self) -> [Rational; 4] {
        [self.values["a1"].clone(), self.values["a2"].clone(), self.values["a3"].clone(), self.values["a4"].clone()]
    }

    /// All primary and derived symbols: J adds a, b; W/AW add s1=σ₁, s2=σ₂,
    /// t1=σ′₁, t2=σ′₂ and b1..b4; AW also r=√q.
    pub fn bindings(&self) -> Bindings {
        let mut b = self.values.clone();
        match self.family {
            Family::L => {}
            Family::J => {
                let (g, h) = (&self.values["g"], &self.values["h"]);
                b.insert("a".into(), g + h);
                b.insert("b".into(), g - h);
            }
            Family::W | Family::AW => {
                let a = self.a();
                b.insert("s1".into(), &a[0] + &a[1]);
                b.insert("s2".into(), &a[0] * &a[1]);
                b.insert("t1".into(), &a[2] + &a[3]);
                b.insert("t2".into(), &a[2] * &a[3]);
                let mut e = [Rational::one(), Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero()];
                for x in &a {
                    for k in (1..5).rev() {
                        e[k] = &e[k] + &e[k - 1] * x;
                    }
                }
                for (k, v) in e.into_iter().enumerate().skip(1) {
                    b.insert(format!("b{k}"), v);
                }
                if self.family == Family::AW {
                    b.insert("r".into(), sqrt_exact(&self.values["q"]).expect("q is a square"));
                }
            }
        }
        b
    }

    /// Range conditions under which the ordering of the spectrum holds for
    /// closure order K = 2L.
    pub fn validate(&self, l: usize) -> Result<(), ParamError> {
        let two_l = int(2 * l as i64);
        match self.family {
            Family::L => {
                if self.get("g") <= Rational::zero() {
                    return Err(ParamError::OutOfRange("g must be positive".into()));
                }
            }
            Family::J => {
                if self.get("a") <= &two_l - int(1) {
                    return Err(ParamError::OutOfRange(format!("a must exceed {}", 2 * l - 1)));
                }
            }
            Family::W => {
                if self.get("b1") <= two_l {
                    return Err(ParamError::OutOfRange(format!("b1 must exceed {}", 2 * l)));
                }
            }
            Family::AW => {
                let bound = powi(&self.get("q"), 2 * l as i64);
                if self.get("b4") >= bound {
                    return Err(ParamError::OutOfRange(format!("b4 must be below q^{}", 2 * l)));
                }
            }
        }
        Ok(())
    }

    /// Every virtual energy used by `d` must lie strictly below `E_0 = 0`.
    pub fn validate_virtual(&self, d: &MultiIndex) -> Result<(), ParamError> {
        for &(v, t) in d.entries() {
            if super::energy::virtual_energy(self, t, v) >= Rational::zero() {
                return Err(ParamError::OutOfRange(format!("virtual energy of {v}{t} must be negative")));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.values.iter().map(|(k, v)| format!("{k}={}", format_rational(v))).collect();
        parts.join(",")
    }

    /// Built-in sample points used when no parameters are given.
    pub fn default_samples(family: Family) -> Vec<ParamSet> {
        match family {
            Family::L => [int(2), rat(7, 3), int(3), rat(7, 2)].into_iter().map(ParamSet::laguerre).collect(),
            Family::J => [(int(2), int(3)), (rat(5, 2), int(4)), (int(3), rat(7, 2)), (rat(11, 2), rat(9, 2))]
                .into_iter()
                .map(|(g, h)| ParamSet::jacobi(g, h))
                .collect(),
            Family::W => vec![
                ParamSet::wilson([rat(3, 2), rat(7, 3), rat(11, 4), rat(13, 5)]),
                ParamSet::wilson([rat(5, 2), rat(9, 4), int(3), rat(17, 6)]),
            ],
            Family::AW => vec![
                ParamSet::askey_wilson([rat(1, 20), rat(1, 30), rat(1, 40), rat(3, 70)], rat(1, 4)),
                ParamSet::askey_wilson([rat(1, 10), rat(1, 12), rat(1, 14), rat(2, 31)], rat(4, 9)),
            ],
        }
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.family, self.label())
    }
}

/// Multi-index `D = {d_1^{t_1}, …}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    entries: Vec<(u32, VType)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid multi-index `{0}`")]
pub struct MultiIndexError(pub String);

impl MultiIndex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Entries are kept sorted (type I first, then by degree).
    pub fn new(mut entries: Vec<(u32, VType)>) -> Result<Self, MultiIndexError> {
        entries.sort_by_key(|&(d, t)| (t, d));
        let bad = entries.iter().any(|&(d, _)| d == 0) || entries.windows(2).any(|w| w[0] == w[1]);
        if bad {
            return Err(MultiIndexError(format!("{entries:?}")));
        }
        Ok(MultiIndex { entries })
    }

    /// Accepts `""`, `"{}"`, `"1I"`, `"1I,2I"`, `"{1^I,2^II}"`.
    pub fn parse(s: &str) -> Result<Self, MultiIndexError> {
        let t = s.trim().trim_start_matches('{').trim_end_matches('}');
        if t.trim().is_empty() {
            return Ok(Self::empty());
        }
        let mut entries = Vec::new();
        for item in t.split(',') {
            let item = item.trim().replace('^', "");
            let split = item.find(|c: char| !c.is_ascii_digit()).ok_or_else(|| MultiIndexError(s.into()))?;
            let d: u32 = item[..split].parse().map_err(|_| MultiIndexError(s.into()))?;
            let ty = match &item[split..] {
                "I" => VType::I,
                "II" => VType::II,
                _ => return Err(MultiIndexError(s.into())),
            };
            entries.push((d, ty));
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[(u32, VType)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn count(&self, t: VType) -> usize {
        self.entries.iter().filter(|e| e.1 == t).count()
    }

    /// ℓ_D = Σd_j − M(M−1)/2 + 2·M_I·M_II.
    pub fn ell(&self) -> usize {
        let m = self.m();
        let sum: usize = self.entries.iter().map(|e| e.0 as usize).sum();
        sum + 2 * self.count(VType::I) * self.count(VType::II) - m * m.saturating_sub(1) / 2
    }

    pub fn max_degree(&self) -> u32 {
        self.entries.iter().map(|e| e.0).max().unwrap_or(0)
    }

    /// Compact key such as `1I,2I` (empty string for the classical case).
    pub fn key(&self) -> String {
        let parts: Vec<String> = self.entries.iter().map(|(d, t)| format!("{d}{t}")).collect();
        parts.join(",")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(d, t)| format!("{d}^{t}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_parsing_and_ell() {
        let d = MultiIndex::parse("{1^I,2^I}").unwrap();
        assert_eq!(d, MultiIndex::parse("2I, 1I").unwrap());
        assert_eq!(d.ell(), 2);
        assert_eq!(MultiIndex::parse("1I,1II").unwrap().ell(), 3);
        assert_eq!(MultiIndex::parse("1I,2I,3I").unwrap().ell(), 3);
        assert_eq!(MultiIndex::parse("{}").unwrap().ell(), 0);
        assert!(MultiIndex::parse("1I,1I").is_err());
        assert!(MultiIndex::parse("0I").is_err());
        assert_eq!(d.key(), "1I,2I");
    }

    #[test]
    fn derived_symbols() {
        let w = ParamSet::wilson([int(1), int(2), int(3), int(4)]);
        let b = w.bindings();
        assert_eq!(b["b1"], int(10));
        assert_eq!(b["b2"], int(35));
        assert_eq!(b["b3"], int(50));
        assert_eq!(b["b4"], int(24));
        assert_eq!(b["s2"], int(2));
        assert_eq!(b["t1"], int(7));
        let j = ParamSet::jacobi_ab(&int(5), &int(1));
        assert_eq!((j.get("g"), j.get("h")), (int(3), int(2)));
    }

    #[test]
    fn askey_wilson_requires_square_q() {
        let mut v: Bindings = (1..=4).map(|i| (format!("a{i}"), rat(1, i + 2))).collect();
        v.insert("q".into(), rat(1, 2));
        assert!(ParamSet::new(Family::AW, &v).is_err());
        v.insert("q".into(), rat(1, 4));
        assert_eq!(ParamSet::new(Family::AW, &v).unwrap().get("r"), rat(1, 2));
    }

    #[test]
    fn defaults_are_admissible() {
        for f in Family::ALL {
            for p in ParamSet::default_samples(f) {
                p.validate(if f == Family::J { 2 } else { 4 }).unwrap();
            }
        }
    }
}
