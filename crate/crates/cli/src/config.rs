use clap::{Args, Parser, Subcommand, ValueEnum};
use closurelab::families::{load_family_plugin, Family, MultiIndex, ParamSet, Plugin};
use exactalg::{parse_rational, Bindings, Expr, UniPoly};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "closurelab", version, about = "Exact checks of closure relations, recurrences and ladder operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Solve and verify the closure relation.
    VerifyClosure(CommonArgs),
    /// Multi-term recurrence tables and their symmetries.
    Recurrence(CommonArgs),
    /// Companion-matrix diagonalization and the conjectured spectrum.
    Spectrum(CommonArgs),
    /// Ladder operators and the Heisenberg series.
    Heisenberg(CommonArgs),
    /// Regenerate and diff the stored `R_{-1}` rows.
    AppendixB(CommonArgs),
    /// Load, validate and solve plugin systems.
    PluginValidate(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyClosure(_) => "verify-closure",
            Command::Recurrence(_) => "recurrence",
            Command::Spectrum(_) => "spectrum",
            Command::Heisenberg(_) => "heisenberg",
            Command::AppendixB(_) => "appendix-b",
            Command::PluginValidate(_) => "plugin-validate",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::VerifyClosure(a)
            | Command::Recurrence(a)
            | Command::Spectrum(a)
            | Command::Heisenberg(a)
            | Command::AppendixB(a)
            | Command::PluginValidate(a) => a,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Symbolic for built-in L/J without `--params`, sampled otherwise.
    Auto,
    Symbolic,
    Sampled,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// L, J, W or AW.
    #[arg(long)]
    pub family: Option<String>,
    /// Multi-index, e.g. `1I,2I`; empty for the undeformed system.
    #[arg(long = "D")]
    pub d: Option<String>,
    /// `Y(η)`, e.g. `1`, `eta`, `2*eta^2-1/3`.
    #[arg(long = "Y", default_value = "1")]
    pub y: String,
    /// Parameter bindings `k=v` (comma separated or repeated).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub params: Vec<String>,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    /// Plugin file (repeatable for appendix-b and plugin-validate).
    #[arg(long)]
    pub plugin: Vec<PathBuf>,
    /// Closure order override.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Number of random spectra (spectrum).
    #[arg(long, default_value_t = 50)]
    pub random: usize,
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print the JSON report instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    pub family: Family,
    pub family_given: bool,
    pub d: MultiIndex,
    pub d_given: bool,
    pub y: UniPoly,
    pub y_text: String,
    /// Explicit bindings; `None` means built-in samples or symbolic.
    pub params: Option<ParamSet>,
    pub n_max: usize,
    pub symbolic: bool,
    pub plugins: Vec<(PathBuf, Plugin)>,
    /// Plugins that failed to load (plugin-validate only).
    pub plugin_errors: Vec<(PathBuf, String)>,
    pub k: Option<usize>,
    pub random: usize,
    pub seed: u64,
    pub report: Option<PathBuf>,
    pub json: bool,
}

/// Echo of the configuration in reports.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub family: String,
    #[serde(rename = "D")]
    pub d: String,
    #[serde(rename = "Y")]
    pub y: String,
    pub parameters: String,
    pub n_max: usize,
    pub mode: &'static str,
    pub plugins: Vec<String>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub seed: u64,
}

pub fn parse_y(s: &str) -> Result<UniPoly, ConfigError> {
    let p = Expr::parse(s).and_then(|e| e.to_poly()).map_err(|e| invalid(format!("--Y: {e}")))?;
    p.to_upoly("eta").ok_or_else(|| invalid("--Y must be a polynomial in eta with rational coefficients"))
}

pub fn parse_params(family: Family, items: &[String]) -> Result<ParamSet, ConfigError> {
    let mut b = Bindings::new();
    for item in items {
        let (k, v) = item.split_once('=').ok_or_else(|| invalid(format!("--params entry {item:?} is not k=v")))?;
        let v = parse_rational(v.trim()).map_err(|e| invalid(format!("--params {k}: {e}")))?;
        b.insert(k.trim().to_string(), v);
    }
    if family == Family::J && b.contains_key("a") && b.contains_key("b") && b.len() == 2 {
        return Ok(ParamSet::jacobi_ab(&b["a"], &b["b"]));
    }
    ParamSet::new(family, &b).map_err(|e| invalid(format!("--params: {e}")))
}

/// Half the natural closure order: `ℓ_D + deg Y + 1`.
pub fn natural_l(d: &MultiIndex, y: &UniPoly) -> usize {
    d.ell() + y.degree().unwrap_or(0) + 1
}

pub fn seed_from_env() -> Result<u64, ConfigError> {
    match std::env::var("CLOSURELAB_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| invalid(format!("CLOSURELAB_SEED={s:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

impl RunConfig {
    pub fn from_command(cmd: &Command) -> Result<Self, ConfigError> {
        let a = cmd.args();
        let mut plugins = Vec::new();
        let mut plugin_errors = Vec::new();
        for p in &a.plugin {
            match (load_family_plugin(p), cmd) {
                (Ok(pl), _) => plugins.push((p.clone(), pl)),
                // plugin-validate reports load failures as failed checks
                (Err(e), Command::PluginValidate(_)) => plugin_errors.push((p.clone(), e.to_string())),
                (Err(e), _) => return Err(invalid(format!("{}: {e}", p.display()))),
            }
        }
        if matches!(cmd, Command::PluginValidate(_)) && a.plugin.is_empty() {
            return Err(invalid("plugin-validate needs at least one --plugin"));
        }
        let single = matches!(cmd, Command::VerifyClosure(_) | Command::Recurrence(_) | Command::Spectrum(_) | Command::Heisenberg(_));
        if single && plugins.len() > 1 {
            return Err(invalid("this subcommand takes at most one --plugin"));
        }
        let from_plugin = single && plugins.len() == 1;
        let family: Family = match (&a.family, from_plugin) {
            (Some(f), _) => f.parse().map_err(|e| invalid(format!("--family: {e}")))?,
            (None, true) => plugins[0].1.family.family(),
            (None, false) => Family::L,
        };
        let d = match (&a.d, from_plugin) {
            (Some(s), _) => MultiIndex::parse(s).map_err(|e| invalid(format!("--D: {e}")))?,
            (None, true) => plugins[0].1.family.multi_index().clone(),
            (None, false) => MultiIndex::empty(),
        };
        if from_plugin {
            let df = &plugins[0].1.family;
            if df.family() != family || df.multi_index() != &d {
                return Err(invalid(format!("plugin describes {} {}, not {family} {d}", df.family(), df.multi_index().key())));
            }
            if !a.params.is_empty() {
                return Err(invalid("parameters come from the plugin; drop --params"));
            }
        }
        let y = parse_y(&a.y)?;
        if y.is_zero() {
            return Err(invalid("--Y must be nonzero"));
        }
        let params = if a.params.is_empty() { None } else { Some(parse_params(family, &a.params)?) };
        let l = natural_l(&d, &y);
        if let Some(p) = &params {
            p.validate(l).map_err(|e| invalid(e.to_string()))?;
            if family.is_continuous() {
                p.validate_virtual(&d).map_err(|e| invalid(e.to_string()))?;
            }
        }
        if let Some(k) = a.k {
            if k < 2 || k % 2 == 1 {
                return Err(invalid("--K must be even and at least 2"));
            }
        }
        let builtin_lj = family.is_continuous() && params.is_none() && (a.plugin.is_empty() || matches!(cmd, Command::AppendixB(_)));
        let symbolic = match a.mode {
            Mode::Auto => builtin_lj && a.k.is_none(),
            Mode::Sampled => false,
            Mode::Symbolic => {
                if !builtin_lj {
                    return Err(invalid("symbolic mode needs a built-in L or J system without --params or --plugin"));
                }
                if a.k.is_some() {
                    return Err(invalid("--K is not available in symbolic mode"));
                }
                true
            }
        };
        Ok(RunConfig {
            command: cmd.name().to_string(),
            family,
            family_given: a.family.is_some(),
            d,
            d_given: a.d.is_some(),
            y,
            y_text: a.y.clone(),
            params,
            n_max: a.n_max,
            symbolic,
            plugins,
            plugin_errors,
            k: a.k,
            random: a.random,
            seed: seed_from_env()?,
            report: a.report.clone(),
            json: a.json,
        })
    }

    pub fn l(&self) -> usize {
        natural_l(&self.d, &self.y)
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(2 * self.l())
    }

    /// Parameter points: the explicit set, or the built-in samples admissible
    /// for this closure order.
    pub fn samples(&self) -> Vec<ParamSet> {
        match &self.params {
            Some(p) => vec![p.clone()],
            None => ParamSet::default_samples(self.family)
                .into_iter()
                .filter(|p| p.validate(self.l()).is_ok() && (!self.family.is_continuous() || p.validate_virtual(&self.d).is_ok()))
                .collect(),
        }
    }

    fn multi_system(&self) -> bool {
        self.command == "appendix-b" || self.command == "plugin-validate"
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            family: if self.multi_system() && !self.family_given { "all".into() } else { self.family.name().into() },
            d: if self.multi_system() && !self.d_given { "all".into() } else { self.d.key() },
            y: self.y.to_string_in("eta"),
            parameters: match (&self.params, self.symbolic) {
                (Some(p), _) => p.label(),
                (None, true) => "symbolic".into(),
                (None, false) if self.plugins.len() == 1 && self.command != "appendix-b" => self.plugins[0].1.family.params().label(),
                (None, false) if self.command == "plugin-validate" => "from plugins".into(),
                (None, false) => "built-in samples".into(),
            },
            n_max: self.n_max,
            mode: if self.symbolic { "symbolic" } else { "sampled" },
            plugins: self.plugins.iter().map(|(p, _)| p.display().to_string()).collect(),
            k: self.k,
            seed: self.seed,
        }
    }
}
