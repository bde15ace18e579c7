use crate::rational::{format_rational, parse_rational, Rational};
use crate::upoly::UniPoly;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Variable bindings for evaluation and substitution.
pub type Bindings = BTreeMap<String, Rational>;

/// Sparse multivariate polynomial with rational coefficients over named
/// variables. Variables are kept sorted and only those that actually occur
/// are listed, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ParamPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("no binding for variable {0}")]
    Unbound(String),
}

impl ParamPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        ParamPoly { vars: Vec::new(), terms }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Rational::from_integer(n.into()))
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(Rational::one(), &[(name, 1)])
    }

    /// `c · Π name^e`
    pub fn monomial(c: Rational, powers: &[(&str, u32)]) -> Self {
        let mut p = Self::constant(c);
        for &(name, e) in powers {
            let mut t = BTreeMap::new();
            t.insert(vec![e], Rational::one());
            let v = ParamPoly { vars: vec![name.to_string()], terms: t }.canonical();
            p = &p * &v;
        }
        p
    }

    /// Builds from raw parts, sorting variables and dropping zero terms.
    pub fn from_terms(vars: Vec<String>, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&i, &j| vars[i].cmp(&vars[j]));
        let sorted_vars: Vec<String> = order.iter().map(|&i| vars[i].clone()).collect();
        let mut map: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length mismatch");
            let key: Vec<u32> = order.iter().map(|&i| e[i]).collect();
            let entry = map.entry(key).or_insert_with(Rational::zero);
            *entry += c;
        }
        // Merge duplicate variable names by summing exponents.
        let mut merged_vars: Vec<String> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, v) in sorted_vars.iter().enumerate() {
            if merged_vars.last() == Some(v) {
                groups.last_mut().unwrap().push(i);
            } else {
                merged_vars.push(v.clone());
                groups.push(vec![i]);
            }
        }
        let mut out: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (e, c) in map {
            let key: Vec<u32> = groups.iter().map(|g| g.iter().map(|&i| e[i]).sum()).collect();
            *out.entry(key).or_insert_with(Rational::zero) += c;
        }
        ParamPoly { vars: merged_vars, terms: out }.canonical()
    }

    pub fn from_upoly(p: &UniPoly, var: &str) -> Self {
        Self::from_terms(
            vec![var.to_string()],
            p.coeffs().iter().enumerate().map(|(k, c)| (vec![k as u32], c.clone())),
        )
    }

    /// Drops zero terms and variables that no longer occur.
    fn canonical(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        let used: Vec<bool> = (0..self.vars.len())
            .map(|i| self.terms.keys().any(|e| e[i] > 0))
            .collect();
        if used.iter().all(|&u| u) {
            return self;
        }
        let vars = self.vars.iter().zip(&used).filter(|(_, &u)| u).map(|(v, _)| v.clone()).collect();
        let terms = self
            .terms
            .into_iter()
            .map(|(e, c)| (e.iter().zip(&used).filter(|(_, &u)| u).map(|(x, _)| *x).collect(), c))
            .collect();
        ParamPoly { vars, terms }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn degree_in(&self, name: &str) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        Some(match self.var_index(name) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        })
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Re-expresses `self` over a superset of its variables.
    fn lift(&self, vars: &[String]) -> BTreeMap<Vec<u32>, Rational> {
        let idx: Vec<usize> = self.vars.iter().map(|v| vars.iter().position(|w| w == v).unwrap()).collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut k = vec![0u32; vars.len()];
                for (j, &i) in idx.iter().enumerate() {
                    k[i] = e[j];
                }
                (k, c.clone())
            })
            .collect()
    }

    fn union_vars(&self, o: &Self) -> Vec<String> {
        let mut v: Vec<String> = self.vars.iter().chain(&o.vars).cloned().collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ParamPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, b: &Bindings) -> Result<Rational, EvalError> {
        let mut vals = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            vals.push(b.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?);
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in vals.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow((*x).clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Binds the listed variables, leaving the others symbolic.
    pub fn partial_eval(&self, b: &Bindings) -> Self {
        let mut out = self.clone();
        for (name, val) in b {
            if out.var_index(name).is_some() {
                out = out.subst(name, &ParamPoly::constant(val.clone()));
            }
        }
        out
    }

    /// Replaces `name` by the polynomial `p`.
    pub fn subst(&self, name: &str, p: &ParamPoly) -> Self {
        let Some(i) = self.var_index(name) else {
            return self.clone();
        };
        let rest: Vec<String> = self.vars.iter().filter(|v| *v != name).cloned().collect();
        let mut by_power: BTreeMap<u32, Vec<(Vec<u32>, Rational)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut k = e.clone();
            let pw = k.remove(i);
            by_power.entry(pw).or_default().push((k, c.clone()));
        }
        let mut acc = ParamPoly::zero();
        let mut cur = ParamPoly::one();
        let mut cur_pow = 0u32;
        for (pw, ts) in by_power {
            while cur_pow < pw {
                cur = &cur * p;
                cur_pow += 1;
            }
            let coef = ParamPoly::from_terms(rest.clone(), ts);
            acc = &acc + &(&coef * &cur);
        }
        acc
    }

    /// Coefficients of successive powers of `name`, each free of `name`.
    pub fn coeffs_in(&self, name: &str) -> Vec<ParamPoly> {
        let Some(i) = self.var_index(name) else {
            return if self.is_zero() { Vec::new() } else { vec![self.clone()] };
        };
        let rest: Vec<String> = self.vars.iter().filter(|v| *v != name).cloned().collect();
        let d = self.degree_in(name).unwrap_or(0) as usize;
        let mut buckets: Vec<Vec<(Vec<u32>, Rational)>> = vec![Vec::new(); d + 1];
        for (e, c) in &self.terms {
            let mut k = e.clone();
            let pw = k.remove(i);
            buckets[pw as usize].push((k, c.clone()));
        }
        buckets.into_iter().map(|ts| ParamPoly::from_terms(rest.clone(), ts)).collect()
    }

    /// Univariate view in `name`; `None` if another variable occurs.
    pub fn to_upoly(&self, name: &str) -> Option<UniPoly> {
        if self.vars.iter().any(|v| v != name) {
            return None;
        }
        let cs = self.coeffs_in(name);
        Some(UniPoly::new(cs.iter().map(|c| c.constant_value().unwrap()).collect()))
    }

    pub fn derivative(&self, name: &str) -> Self {
        let Some(i) = self.var_index(name) else {
            return Self::zero();
        };
        let terms = self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
            let mut k = e.clone();
            k[i] -= 1;
            (k, c * Rational::from_integer(e[i].into()))
        });
        Self::from_terms(self.vars.clone(), terms)
    }

    pub fn to_record(&self) -> PolyRecord {
        PolyRecord {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRecord { exponents: e.clone(), coefficient: format_rational(c) })
                .collect(),
        }
    }

    pub fn from_record(r: &PolyRecord) -> Result<Self, String> {
        let mut terms = Vec::with_capacity(r.terms.len());
        for t in &r.terms {
            if t.exponents.len() != r.vars.len() {
                return Err(format!(
                    "term has {} exponents but {} variables",
                    t.exponents.len(),
                    r.vars.len()
                ));
            }
            terms.push((t.exponents.clone(), parse_rational(&t.coefficient)?));
        }
        Ok(Self::from_terms(r.vars.clone(), terms))
    }
}

/// Serialized form: variable list plus `{exponents, coefficient}` records.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub vars: Vec<String>,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<u32>,
    pub coefficient: String,
}

impl Serialize for ParamPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParamPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PolyRecord::deserialize(d)?;
        ParamPoly::from_record(&r).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        // Highest total degree first.
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (i, (e, c)) in ts.into_iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mono: Vec<String> = self
                .vars
                .iter()
                .zip(e)
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| if k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            if mono.is_empty() {
                f.write_str(&format_rational(&mag))?;
            } else if mag.is_one() {
                f.write_str(&mono.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, o: &ParamPoly) -> ParamPoly {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let vars = self.union_vars(o);
        let mut t = self.lift(&vars);
        for (e, c) in o.lift(&vars) {
            *t.entry(e).or_insert_with(Rational::zero) += c;
        }
        ParamPoly { vars, terms: t }.canonical()
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Sub for &ParamPoly {
    type Output = ParamPoly;
    fn sub(self, o: &ParamPoly) -> ParamPoly {
        self + &(-o)
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, o: &ParamPoly) -> ParamPoly {
        if self.is_zero() || o.is_zero() {
            return ParamPoly::zero();
        }
        let vars = self.union_vars(o);
        let a = self.lift(&vars);
        let b = o.lift(&vars);
        let mut t: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *t.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        ParamPoly { vars, terms: t }.canonical()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ParamPoly {
            type Output = ParamPoly;
            fn $m(self, o: ParamPoly) -> ParamPoly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Builds a binding map from `(name, value)` pairs.
pub fn bindings<'a>(pairs: impl IntoIterator<Item = (&'a str, Rational)>) -> Bindings {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
