use crate::config::{Command, ConfigError, RunConfig};
use crate::report::{Check, Report, Status};
use closurelab::closure::appendix::{check_points, compare_appendix_b, compare_symbolic, ReferenceTable, RowStatus, TableRow};
use closurelab::closure::symbolic::{g_node, solve_symbolic, SymbolicClosure, MAX_BOUND};
use closurelab::closure::{conjectured_r, conjectured_r_symbolic, degree_bounds, solve_expr, spectral_identity, verify_expr, SolveOutcome};
use closurelab::families::{build_x, builtin_deformed, DeformedFamily, Family, FamilyError, MultiIndex, ParamSet};
use closurelab::heisenberg::HeisenbergContext;
use closurelab::sampling::ReconstructError;
use closurelab::recurrence::{check_h_symmetry, check_leading, closed_form_compare, five_term_formulas, symbolic_table, RecurrenceTable};
use closurelab::spectral::{alpha_conjecture, alpha_values, check_spacing, eigen_closed_form, printed_pair_forms, r_from_alphas, strictly_ordered_at, z_grid};
use exactalg::{format_rational, int, Rational, UniPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const PLUGIN_REQUIRED: &str = "operator-level: plugin required";

/// Validates the configuration, runs the command and assembles the report.
pub fn run(cmd: &Command) -> Result<Report, ConfigError> {
    let cfg = RunConfig::from_command(cmd)?;
    let checks = match cmd {
        Command::VerifyClosure(_) => verify_closure(&cfg),
        Command::Recurrence(_) => recurrence(&cfg),
        Command::Spectrum(_) => spectrum(&cfg),
        Command::Heisenberg(_) => heisenberg(&cfg),
        Command::AppendixB(_) => appendix_b(&cfg),
        Command::PluginValidate(_) => plugin_validate(&cfg),
    };
    Ok(Report::new(&cfg.command, cfg.echo(), checks))
}

/// A concrete system with its `X`.
struct Instance {
    df: DeformedFamily,
    x: UniPoly,
    subject: String,
}

impl Instance {
    fn new(df: DeformedFamily, x: UniPoly) -> Self {
        let subject = subject(&df);
        Instance { df, x, subject }
    }

    fn l(&self) -> usize {
        self.x.degree().unwrap_or(0)
    }
}

fn d_label(d: &MultiIndex) -> String {
    if d.is_empty() {
        "{}".into()
    } else {
        d.key()
    }
}

fn subject(df: &DeformedFamily) -> String {
    format!("{} D={} {}", df.family(), d_label(df.multi_index()), df.params().label())
}

fn plain_subject(cfg: &RunConfig, p: &ParamSet) -> String {
    format!("{} D={} {}", cfg.family, d_label(&cfg.d), p.label())
}

fn symbolic_subject(cfg: &RunConfig) -> String {
    format!("{} D={} symbolic", cfg.family, d_label(&cfg.d))
}

/// Operator-level systems for the run, plus skip/fail records for the ones
/// that cannot be built.
fn instances(cfg: &RunConfig, id: &str) -> (Vec<Instance>, Vec<Check>) {
    if let Some((_, pl)) = cfg.plugins.first() {
        let df = pl.family.clone();
        let x = pl.x.clone().unwrap_or_else(|| build_x(df.xi(), &cfg.y));
        return (vec![Instance::new(df, x)], vec![]);
    }
    let subj = format!("{} D={}", cfg.family, d_label(&cfg.d));
    if !cfg.family.is_continuous() {
        return (vec![], vec![Check::skip(id, "operator-level system", &subj, PLUGIN_REQUIRED)]);
    }
    let samples = cfg.samples();
    if samples.is_empty() {
        return (vec![], vec![Check::skip(id, "operator-level system", &subj, "no built-in sample is admissible for this order; pass --params")]);
    }
    let mut out = Vec::new();
    let mut notes = Vec::new();
    for p in samples {
        match builtin_deformed(&p, &cfg.d) {
            Ok(df) => {
                let x = build_x(df.xi(), &cfg.y);
                out.push(Instance::new(df, x));
            }
            Err(FamilyError::Unsupported(_)) => {
                return (vec![], vec![Check::skip(id, "operator-level system", &subj, PLUGIN_REQUIRED)]);
            }
            Err(e) => notes.push(Check::error(id, "operator-level system", &plain_subject(cfg, &p), e)),
        }
    }
    (out, notes)
}

fn join_polys(ps: &[UniPoly]) -> String {
    ps.iter().map(|p| p.to_string_in("z")).collect::<Vec<_>>().join("; ")
}

fn solve(inst: &Instance, k: usize) -> Result<SolveOutcome, String> {
    solve_expr(inst.df.h_tilde(), &inst.df.x_operator(&inst.x), k, &degree_bounds(inst.df.family(), k), None).map_err(|e| e.to_string())
}

fn solved_check(inst: &Instance, k: usize, out: &SolveOutcome) -> Check {
    Check::new("closure.solve", "closure relation solved exactly", &inst.subject, Status::Pass)
        .with("K", k)
        .with("kernel_dim", out.kernel_dim)
        .with("X", inst.x.to_string_in("eta"))
        .with("R", join_polys(&out.data.r))
        .with("R_minus1", out.data.r_minus1.as_ref().map(|p| p.to_string_in("z")).unwrap_or_default())
}

/// Spectral consequence over `n ≤ n_max`, `0 < |k| ≤ L`.
fn spectral_identity_all(p: &ParamSet, data: &closurelab::closure::ClosureData, l: usize, n_max: usize) -> (bool, usize) {
    let mut count = 0;
    let mut ok = true;
    for n in 0..=n_max as i64 {
        for k in -(l as i64)..=l as i64 {
            if k != 0 && n + k >= 0 {
                count += 1;
                ok &= spectral_identity(p, data, n, k);
            }
        }
    }
    (ok, count)
}

fn row_for<'t>(table: &'t ReferenceTable, family: Family, d: &MultiIndex, k: usize) -> Option<&'t TableRow> {
    table.find(family, d).ok().filter(|r| r.k == k)
}

fn reference_check(table: &Result<ReferenceTable, String>, inst: &Instance, k: usize, data: &closurelab::closure::ClosureData) -> Check {
    const ID: &str = "closure.reference-row";
    const ANCHOR: &str = "solved R_-1 against the stored reference row";
    let table = match table {
        Ok(t) => t,
        Err(e) => return Check::error(ID, ANCHOR, &inst.subject, e),
    };
    if row_for(table, inst.df.family(), inst.df.multi_index(), k).is_none() {
        return Check::skip(ID, ANCHOR, &inst.subject, "no stored row for this system and order");
    }
    match compare_appendix_b(table, inst.df.params(), inst.df.multi_index(), data) {
        Ok(c) => {
            let pass = c.matches || c.matches_corrected == Some(true);
            let mut ch = Check::new(ID, ANCHOR, &inst.subject, Status::from_bool(pass))
                .with("expected", c.expected.join(", "))
                .with("actual", c.actual.join(", "))
                .with("printed_match", c.matches);
            if let Some(m) = c.matches_corrected {
                ch = ch.with("corrected_match", m);
            }
            ch
        }
        Err(e) => Check::error(ID, ANCHOR, &inst.subject, e),
    }
}

fn load_table() -> Result<ReferenceTable, String> {
    ReferenceTable::load().map_err(|e| e.to_string())
}

fn closure_checks(cfg: &RunConfig, inst: &Instance, table: &Result<ReferenceTable, String>) -> Vec<Check> {
    let l = inst.l();
    let k = cfg.k.unwrap_or(2 * l);
    let out = match solve(inst, k) {
        Ok(o) => o,
        Err(e) => return vec![Check::error("closure.solve", "closure relation solved exactly", &inst.subject, e).with("K", k)],
    };
    let p = inst.df.params();
    let mut checks = vec![solved_check(inst, k, &out)];
    let identity = verify_expr(inst.df.h_tilde(), &inst.df.x_operator(&inst.x), &out.data);
    checks.push(match identity {
        Ok(ok) => Check::new("closure.identity", "operator identity, coefficient-wise", &inst.subject, Status::from_bool(ok)),
        Err(e) => Check::error("closure.identity", "operator identity, coefficient-wise", &inst.subject, e),
    });
    checks.push(Check::new(
        "closure.degree-bounds",
        "degrees of R_i and R_-1 within the family bounds",
        &inst.subject,
        Status::from_bool(out.data.respects_bounds(inst.df.family())),
    ));
    if k == 2 * l {
        checks.push(match conjectured_r(p, l) {
            Ok(c) => Check::new("closure.conjectured", "R_i from the conjectured eigenvalues", &inst.subject, Status::from_bool(c.r == out.data.r))
                .with("conjectured", join_polys(&c.r)),
            Err(e) => Check::error("closure.conjectured", "R_i from the conjectured eigenvalues", &inst.subject, e),
        });
        let (ok, count) = spectral_identity_all(p, &out.data, l, cfg.n_max);
        checks.push(
            Check::new("closure.spectral-identity", "beta^K = sum R_i(E_n) beta^i for energy gaps", &inst.subject, Status::from_bool(ok))
                .with("cases", count),
        );
    } else {
        checks.push(Check::skip("closure.conjectured", "R_i from the conjectured eigenvalues", &inst.subject, "K differs from 2L"));
    }
    checks.push(reference_check(table, inst, k, &out.data));
    checks
}

fn spectral_level(cfg: &RunConfig) -> Vec<Check> {
    let l = cfg.l();
    let samples = cfg.samples();
    if samples.is_empty() {
        return vec![Check::skip("closure.spectral-level", "spectral consequence of the conjectured R_i", &symbolic_subject(cfg), "no admissible sample; pass --params")];
    }
    samples
        .iter()
        .map(|p| {
            let subj = plain_subject(cfg, p);
            match conjectured_r(p, l) {
                Ok(c) => {
                    let (ok, count) = spectral_identity_all(p, &c, l, cfg.n_max);
                    Check::new("closure.spectral-level", "spectral consequence of the conjectured R_i", &subj, Status::from_bool(ok))
                        .with("K", 2 * l)
                        .with("R", join_polys(&c.r))
                        .with("cases", count)
                }
                Err(e) => Check::error("closure.spectral-level", "spectral consequence of the conjectured R_i", &subj, e),
            }
        })
        .collect()
}

fn symbolic_closure_checks(cfg: &RunConfig, s: &SymbolicClosure, table: &Result<ReferenceTable, String>) -> Vec<Check> {
    let subj = symbolic_subject(cfg);
    let l = s.k / 2;
    let mut checks = vec![Check::new("closure.solve", "closure relation solved, parameters symbolic", &subj, Status::Pass)
        .with("K", s.k)
        .with("R", s.r.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
        .with("R_minus1", &s.r_minus1)];
    checks.push(match conjectured_r_symbolic(cfg.family, l) {
        Ok(c) => Check::new("closure.conjectured", "R_i from the conjectured eigenvalues", &subj, Status::from_bool(c == s.r)),
        Err(e) => Check::error("closure.conjectured", "R_i from the conjectured eigenvalues", &subj, e),
    });
    const ID: &str = "closure.reference-row";
    const ANCHOR: &str = "solved R_-1 against the stored reference row";
    checks.push(match table {
        Err(e) => Check::error(ID, ANCHOR, &subj, e),
        Ok(t) => match row_for(t, cfg.family, &cfg.d, s.k) {
            None => Check::skip(ID, ANCHOR, &subj, "no stored row for this system and order"),
            Some(row) => {
                let printed = compare_symbolic(row, &s.r_minus1);
                let corrected = row.corrected.as_ref().map(|c| c.r_minus1 == s.r_minus1);
                let mut ch = Check::new(ID, ANCHOR, &subj, Status::from_bool(printed || corrected == Some(true)))
                    .with("expected", &row.r_minus1)
                    .with("printed_match", printed);
                if let Some(c) = corrected {
                    ch = ch.with("corrected_match", c);
                }
                ch
            }
        },
    });
    for p in ParamSet::default_samples(cfg.family) {
        let subj = plain_subject(cfg, &p);
        let check = builtin_deformed(&p, &cfg.d).map_err(|e| e.to_string()).and_then(|df| {
            let x = build_x(df.xi(), &cfg.y);
            let data = s.at(&p);
            let ok = verify_expr(df.h_tilde(), &df.x_operator(&x), &data).map_err(|e| e.to_string())?;
            Ok(ok && data.respects_bounds(cfg.family))
        });
        checks.push(match check {
            Ok(ok) => Check::new("closure.identity", "operator identity of the specialization, coefficient-wise", &subj, Status::from_bool(ok)),
            Err(e) => Check::error("closure.identity", "operator identity of the specialization, coefficient-wise", &subj, e),
        });
    }
    checks
}

pub fn verify_closure(cfg: &RunConfig) -> Vec<Check> {
    let table = load_table();
    if cfg.symbolic {
        return match solve_symbolic(cfg.family, &cfg.d, &cfg.y) {
            Ok(s) => symbolic_closure_checks(cfg, &s, &table),
            Err(closurelab::closure::symbolic::SymbolicError::Build(FamilyError::Unsupported(_))) => {
                let mut v = vec![Check::skip("closure.solve", "operator-level system", &symbolic_subject(cfg), PLUGIN_REQUIRED)];
                v.extend(spectral_level(cfg));
                v
            }
            Err(e) => vec![Check::error("closure.solve", "closure relation solved, parameters symbolic", &symbolic_subject(cfg), e)],
        };
    }
    let (insts, mut checks) = instances(cfg, "closure.solve");
    if insts.is_empty() && cfg.plugins.is_empty() {
        checks.extend(spectral_level(cfg));
        return checks;
    }
    let per: Vec<Vec<Check>> = insts.par_iter().map(|i| closure_checks(cfg, i, &table)).collect();
    checks.extend(per.into_iter().flatten());
    checks
}

fn entries_check(id: &str, anchor: &str, subject: &str, entries: &[closurelab::recurrence::CheckEntry]) -> Check {
    let bad: Vec<String> = entries.iter().filter(|e| !e.pass).map(|e| format!("(n={},k={}): {} vs {}", e.n, e.k, e.actual, e.expected)).collect();
    let mut c = Check::new(id, anchor, subject, Status::from_bool(bad.is_empty())).with("entries", entries.len());
    if !bad.is_empty() {
        c = c.with("mismatches", bad.join("; "));
    }
    c
}

fn is_single_type_one(d: &MultiIndex) -> bool {
    d.entries() == [(1, closurelab::families::VType::I)]
}

fn recurrence_checks(cfg: &RunConfig, inst: &Instance) -> Vec<Check> {
    let t = match RecurrenceTable::build(&inst.df, &inst.x, cfg.n_max) {
        Ok(t) => t,
        Err(e) => return vec![Check::error("recurrence.table", "X P_n expanded in the eigenbasis, zero remainder", &inst.subject, e)],
    };
    let l = t.l as i64;
    let mut table = Check::new("recurrence.table", "X P_n expanded in the eigenbasis, zero remainder", &inst.subject, Status::Pass)
        .with("X", inst.x.to_string_in("eta"));
    for n in 0..=t.n_max() as i64 {
        let row: Vec<String> = (-l..=l).map(|k| format_rational(&t.r(n, k))).collect();
        table = table.with(&format!("r[{n:02}]"), row.join(", "));
    }
    let mut checks = vec![table];
    checks.push(entries_check("recurrence.h-symmetry", "r_{n,-l} = (h_n/h_{n-l}) r_{n-l,l}", &inst.subject, &check_h_symmetry(&inst.df, &t)));
    checks.push(entries_check("recurrence.leading", "r_{n,L} from leading coefficients", &inst.subject, &check_leading(&inst.df, &t)));
    if is_single_type_one(inst.df.multi_index()) && cfg.y == UniPoly::one() {
        if let Some(f) = five_term_formulas(inst.df.family()) {
            checks.push(match closed_form_compare(&t, &inst.df.params().bindings(), &f) {
                Ok(e) => entries_check("recurrence.closed-form", "five-term closed forms", &inst.subject, &e),
                Err(e) => Check::error("recurrence.closed-form", "five-term closed forms", &inst.subject, e),
            });
        }
    }
    checks
}

pub fn recurrence(cfg: &RunConfig) -> Vec<Check> {
    let (insts, mut checks) = instances(cfg, "recurrence.table");
    if cfg.symbolic && cfg.family == Family::L && !insts.is_empty() {
        let subj = symbolic_subject(cfg);
        let d = cfg.d.clone();
        let st = symbolic_table("g", g_node, |g| builtin_deformed(&ParamSet::laguerre(g.clone()), &d), &cfg.y, cfg.n_max, MAX_BOUND);
        match st {
            Ok(st) => {
                let mut c = Check::new("recurrence.symbolic-table", "table reconstructed in g", &subj, Status::Pass).with("X", &st.x);
                for (n, row) in st.rows.iter().enumerate() {
                    c = c.with(&format!("r[{n:02}]"), row.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
                }
                checks.push(c);
                if is_single_type_one(&cfg.d) && cfg.y == UniPoly::one() {
                    let f = five_term_formulas(Family::L).expect("L formulas");
                    checks.push(match st.compare(&f) {
                        Ok(v) => {
                            let ok = v.iter().all(|e| e.2);
                            Check::new("recurrence.closed-form-symbolic", "five-term closed forms, symbolic in g", &subj, Status::from_bool(ok)).with("entries", v.len())
                        }
                        Err(e) => Check::error("recurrence.closed-form-symbolic", "five-term closed forms, symbolic in g", &subj, e),
                    });
                }
            }
            Err(ReconstructError::NotPolynomial { .. }) => checks.push(Check::skip(
                "recurrence.symbolic-table",
                "table reconstructed in g",
                &subj,
                "entries are rational, not polynomial, in g; sampled tables only",
            )),
            Err(e) => checks.push(Check::error("recurrence.symbolic-table", "table reconstructed in g", &subj, e)),
        }
    }
    let per: Vec<Vec<Check>> = insts.par_iter().map(|i| recurrence_checks(cfg, i)).collect();
    checks.extend(per.into_iter().flatten());
    checks
}

fn spectrum_checks(cfg: &RunConfig, p: &ParamSet, l: usize, subj: &str) -> Vec<Check> {
    let family = p.family();
    let b = p.bindings();
    let set = match alpha_conjecture(family, l, &b) {
        Ok(s) => s,
        Err(e) => return vec![Check::error("spectrum.conjecture", "conjectured eigenvalues", subj, e)],
    };
    let mut checks = Vec::new();
    let sums = set.pair_sums_products();
    let printed_ok = (0..l).all(|j| printed_pair_forms(family, (l - j) as i64, &b).map_or(false, |f| f == sums[j]));
    checks.push(Check::new(
        "spectrum.pairing",
        "alpha_j + alpha_{2L+1-j} and alpha_j alpha_{2L+1-j} polynomial in z and equal to the closed forms",
        subj,
        Status::from_bool(set.pairs_are_polynomial() && printed_ok),
    ));
    let mut grid: Vec<Rational> = z_grid();
    grid.extend((0..=cfg.n_max as i64).map(|n| closurelab::families::energy(p, n)));
    let ordered = grid.iter().all(|z| strictly_ordered_at(&set, &b, z) == Some(true));
    checks.push(Check::new("spectrum.ordering", "alpha_1 > ... > alpha_2L on the z grid and at E_n", subj, Status::from_bool(ordered)).with("points", grid.len()));
    checks.push(match check_spacing(p, l, 0..=cfg.n_max as i64) {
        Ok(v) => Check::new("spectrum.spacing", "alpha_j(E_n) equals an energy gap", subj, Status::from_bool(v.iter().all(|e| e.pass))).with("entries", v.len()),
        Err(e) => Check::error("spectrum.spacing", "alpha_j(E_n) equals an energy gap", subj, e),
    });
    let r_polys = set.r_polys();
    let mut ok = true;
    for n in 0..=cfg.n_max as i64 {
        let res = alpha_values(p, l, n).and_then(|a| {
            let sd = eigen_closed_form(&a)?;
            let mut bz = b.clone();
            bz.insert("z".into(), closurelab::families::energy(p, n));
            let r_ok = r_polys.iter().map(|q| q.eval(&bz).ok()).collect::<Option<Vec<_>>>() == Some(r_from_alphas(&a));
            Ok(sd.checks.all() && sd.check_recursion(2 * l as u32 + 3) && r_ok)
        });
        ok &= res.unwrap_or(false);
    }
    checks.push(Check::new(
        "spectrum.companion",
        "companion matrix diagonalized in closed form at every E_n",
        subj,
        Status::from_bool(ok),
    ));
    checks
}

/// Distinct nonzero rationals `p/q`, `|p| ≤ 20`, `q ≤ 9`.
pub fn random_spectrum(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(k);
    while out.len() < k {
        let num: i64 = rng.gen_range(-20..=20);
        let den: i64 = rng.gen_range(1..=9);
        let v = Rational::new(num.into(), den.into());
        if num != 0 && !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

pub fn spectrum(cfg: &RunConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    let (l, samples): (usize, Vec<ParamSet>) = match cfg.plugins.first() {
        Some((_, pl)) => {
            let x = pl.x.clone().unwrap_or_else(|| build_x(pl.family.xi(), &cfg.y));
            (x.degree().unwrap_or(1), vec![pl.family.params().clone()])
        }
        None => (cfg.l(), cfg.samples()),
    };
    if cfg.symbolic {
        let subj = symbolic_subject(cfg);
        checks.push(match alpha_conjecture(cfg.family, l, &Default::default()) {
            Ok(set) => {
                let ok = set.pairs_are_polynomial();
                Check::new("spectrum.pairing-symbolic", "conjugate pairs polynomial in z, parameters symbolic", &subj, Status::from_bool(ok))
                    .with("R", set.r_polys().iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
            }
            Err(e) => Check::error("spectrum.pairing-symbolic", "conjugate pairs polynomial in z, parameters symbolic", &subj, e),
        });
    }
    if samples.is_empty() {
        checks.push(Check::skip("spectrum.pairing", "conjectured eigenvalues", &symbolic_subject(cfg), "no admissible sample; pass --params"));
    }
    let per: Vec<Vec<Check>> = samples
        .par_iter()
        .map(|p| {
            let subj = plain_subject(cfg, p);
            let mut v = spectrum_checks(cfg, p, l, &subj);
            if let Ok(df) = builtin_deformed(p, &cfg.d) {
                let inst = Instance::new(df.clone(), build_x(df.xi(), &cfg.y));
                let c = solve(&inst, 2 * l).and_then(|out| conjectured_r(p, l).map(|c| c.r == out.data.r).map_err(|e| e.to_string()));
                v.push(match c {
                    Ok(ok) => Check::new("spectrum.conjecture-vs-solved", "conjectured R_i equal the solved R_i", &subj, Status::from_bool(ok)),
                    Err(e) => Check::error("spectrum.conjecture-vs-solved", "conjectured R_i equal the solved R_i", &subj, e),
                });
            }
            v
        })
        .collect();
    checks.extend(per.into_iter().flatten());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ok = true;
    let mut first_bad = None;
    for i in 0..cfg.random {
        let k = 1 + i % 8;
        let a = random_spectrum(&mut rng, k);
        let pass = eigen_closed_form(&a).map_or(false, |sd| sd.checks.all() && sd.check_recursion(k as u32 + 3));
        if !pass && first_bad.is_none() {
            first_bad = Some(a.iter().map(format_rational).collect::<Vec<_>>().join(", "));
        }
        ok &= pass;
    }
    let mut c = Check::new("spectrum.random", "closed-form diagonalization of random companion matrices", "random", Status::from_bool(ok))
        .with("count", cfg.random)
        .with("seed", cfg.seed);
    if let Some(b) = first_bad {
        c = c.with("first_failure", b);
    }
    checks.push(c);
    checks
}

fn heisenberg_checks(cfg: &RunConfig, inst: &Instance) -> Vec<Check> {
    let l = inst.l();
    let k = 2 * l;
    let out = match solve(inst, k) {
        Ok(o) => o,
        Err(e) => return vec![Check::error("heisenberg.setup", "closure data for the ladder operators", &inst.subject, e)],
    };
    let ctx = match HeisenbergContext::new(&inst.df, &inst.x, out.data, 2) {
        Ok(c) => c,
        Err(e) => return vec![Check::error("heisenberg.setup", "closure data for the ladder operators", &inst.subject, e)],
    };
    let n_top = match inst.df.n_max() {
        Some(m) => cfg.n_max.min(m.saturating_sub(l + 1)),
        None => cfg.n_max,
    };
    let table = match RecurrenceTable::build(&inst.df, &inst.x, n_top + 1) {
        Ok(t) => t,
        Err(e) => return vec![Check::error("heisenberg.setup", "recurrence table for the expected coefficients", &inst.subject, e)],
    };
    let mut checks = Vec::new();
    for n in 0..=n_top as i64 {
        let subj = format!("{} n={n}", inst.subject);
        let mut c = Check::new("heisenberg.ladder", "a^(j) P_n proportional to P_(n+shift) with coefficient r_(n,shift)", &subj, Status::Pass);
        let mut ok = true;
        for j in 1..=k {
            match ctx.ladder_apply(j, n, Some(&table)) {
                Ok(a) => {
                    ok &= a.pass;
                    c = c.with(&format!("a{j}"), format!("shift {} coefficient {}", a.shift, a.coefficient));
                }
                Err(e) => {
                    ok = false;
                    c = c.with(&format!("a{j}"), e);
                }
            }
        }
        c.status = Status::from_bool(ok);
        checks.push(c);
        checks.push(Check::new("heisenberg.r0", "-R_-1(E_n)/R_0(E_n) = r_(n,0)", &subj, Status::from_bool(ctx.r0_relation(&table, n))));
        let eig = (1..=k).all(|j| ctx.commutation_check(j, n) == Ok((true, true)));
        checks.push(Check::new("heisenberg.eigen-shift", "H a^(j) P_n = (E_n + alpha_j) a^(j) P_n with the expected sign", &subj, Status::from_bool(eig)));
        let series = (0..=k + 2).all(|m| ctx.series_check(n, m) == Ok(true));
        checks.push(Check::new("heisenberg.series", "t-power series of the Heisenberg operator, orders 0..K+2", &subj, Status::from_bool(series)));
        checks.push(match ctx.round_trip(&table, n) {
            Ok((eq, pos)) => Check::new("heisenberg.round-trip", "a^(L+1) a^(L) P_n = r_(n,1) r_(n+1,-1) P_n, positive", &subj, Status::from_bool(eq && pos)),
            Err(e) => Check::error("heisenberg.round-trip", "a^(L+1) a^(L) P_n = r_(n,1) r_(n+1,-1) P_n, positive", &subj, e),
        });
    }
    checks
}

pub fn heisenberg(cfg: &RunConfig) -> Vec<Check> {
    let (insts, mut checks) = instances(cfg, "heisenberg.setup");
    let per: Vec<Vec<Check>> = insts.par_iter().map(|i| heisenberg_checks(cfg, i)).collect();
    checks.extend(per.into_iter().flatten());
    checks
}

fn y_for_order(d: &MultiIndex, k: usize) -> Option<UniPoly> {
    let deg = (k / 2).checked_sub(d.ell() + 1)?;
    Some(UniPoly::monomial(int(1), deg))
}

fn row_subject(row: &TableRow) -> String {
    format!("{} D={} K={}", row.family, if row.d.is_empty() { "{}" } else { &row.d }, row.k)
}

fn appendix_row_checks(cfg: &RunConfig, table: &ReferenceTable, row: &TableRow) -> Vec<Check> {
    let subj = row_subject(row);
    let family = row.family_kind();
    let d = row.multi_index();
    let mut checks = vec![match row.transcription_check(&check_points(family)) {
        Ok(ok) => Check::new("appendix-b.transcription", "factored and expanded forms agree at three rational points", &subj, Status::from_bool(ok)),
        Err(e) => Check::error("appendix-b.transcription", "factored and expanded forms agree at three rational points", &subj, e),
    }];
    const ID: &str = "appendix-b.regenerate";
    const ANCHOR: &str = "regenerated R_-1 against the stored row";
    let Some(y) = y_for_order(&d, row.k) else {
        checks.push(Check::error(ID, ANCHOR, &subj, "order below 2(l_D+1)"));
        return checks;
    };
    match row.status {
        RowStatus::ReferenceOnly => checks.push(Check::skip(ID, ANCHOR, &subj, "reference only: needs external virtual-state data")),
        RowStatus::Builtin if cfg.symbolic => {
            checks.push(match solve_symbolic(family, &d, &y) {
                Ok(s) => {
                    let printed = compare_symbolic(row, &s.r_minus1);
                    let corrected = row.corrected.as_ref().map(|c| c.r_minus1 == s.r_minus1);
                    let mut c = Check::new(ID, ANCHOR, &format!("{subj} symbolic"), Status::from_bool(printed || corrected == Some(true)))
                        .with("actual", &s.r_minus1)
                        .with("printed_match", printed);
                    if let Some(m) = corrected {
                        c = c.with("corrected_match", m);
                    }
                    c
                }
                Err(e) => Check::error(ID, ANCHOR, &subj, e),
            });
        }
        RowStatus::Builtin => {
            let samples = match &cfg.params {
                Some(p) if p.family() == family => vec![p.clone()],
                _ => ParamSet::default_samples(family),
            };
            for p in samples {
                let res = builtin_deformed(&p, &d).map_err(|e| e.to_string()).and_then(|df| {
                    let inst = Instance::new(df.clone(), build_x(df.xi(), &y));
                    let out = solve(&inst, row.k)?;
                    compare_appendix_b(table, &p, &d, &out.data).map_err(|e| e.to_string())
                });
                let s = format!("{subj} {}", p.label());
                checks.push(match res {
                    Ok(c) => Check::new(ID, ANCHOR, &s, Status::from_bool(c.matches || c.matches_corrected == Some(true)))
                        .with("actual", c.actual.join(", "))
                        .with("printed_match", c.matches),
                    Err(e) => Check::error(ID, ANCHOR, &s, e),
                });
            }
        }
        RowStatus::Plugin => {
            let matching: Vec<_> = cfg
                .plugins
                .iter()
                .filter(|(_, pl)| pl.family.family() == family && pl.family.multi_index() == &d)
                .filter(|(_, pl)| pl.x.as_ref().map_or(true, |x| x.degree() == Some(row.k / 2)))
                .collect();
            if matching.is_empty() {
                checks.push(Check::skip(ID, ANCHOR, &subj, "plugin required"));
            }
            for (path, pl) in matching {
                let df = pl.family.clone();
                let x = pl.x.clone().unwrap_or_else(|| build_x(df.xi(), &y));
                let inst = Instance::new(df, x);
                let s = format!("{subj} {}", inst.df.params().label());
                let res = solve(&inst, row.k).and_then(|out| {
                    compare_appendix_b(table, inst.df.params(), &d, &out.data).map(|c| (c, out.kernel_dim)).map_err(|e| e.to_string())
                });
                checks.push(match res {
                    Ok((c, kernel)) => {
                        let mut ch = Check::new(ID, ANCHOR, &s, Status::from_bool(c.matches || c.matches_corrected == Some(true)))
                            .with("plugin", path.display())
                            .with("kernel_dim", kernel)
                            .with("expected", c.expected.join(", "))
                            .with("actual", c.actual.join(", "))
                            .with("printed_match", c.matches);
                        if let Some(m) = c.matches_corrected {
                            ch = ch.with("corrected_match", m);
                        }
                        ch
                    }
                    Err(e) => Check::error(ID, ANCHOR, &s, e).with("plugin", path.display()),
                });
            }
        }
    }
    checks
}

pub fn appendix_b(cfg: &RunConfig) -> Vec<Check> {
    let table = match ReferenceTable::load() {
        Ok(t) => t,
        Err(e) => return vec![Check::error("appendix-b.checksum", "stored table matches its SHA-256 digest", "table", e)],
    };
    let mut checks = vec![Check::new("appendix-b.checksum", "stored table matches its SHA-256 digest", "table", Status::Pass).with("rows", table.rows().len())];
    let rows: Vec<&TableRow> = table
        .rows()
        .iter()
        .filter(|r| !cfg.family_given || r.family_kind() == cfg.family)
        .filter(|r| !cfg.d_given || r.multi_index() == cfg.d)
        .collect();
    let per: Vec<Vec<Check>> = rows.par_iter().map(|r| appendix_row_checks(cfg, &table, r)).collect();
    checks.extend(per.into_iter().flatten());
    checks
}

pub fn plugin_validate(cfg: &RunConfig) -> Vec<Check> {
    let table = load_table();
    let mut checks: Vec<Check> = cfg
        .plugin_errors
        .iter()
        .map(|(p, e)| Check::error("plugin.load", "plugin parses and passes schema checks", &p.display().to_string(), e))
        .collect();
    let per: Vec<Vec<Check>> = cfg
        .plugins
        .par_iter()
        .map(|(path, pl)| {
            let df = pl.family.clone();
            let x = pl.x.clone().unwrap_or_else(|| build_x(df.xi(), &cfg.y));
            let inst = Instance::new(df, x);
            let mut v = vec![Check::new("plugin.load", "plugin parses and passes schema checks", &inst.subject, Status::Pass)
                .with("path", path.display())
                .with("xi", inst.df.xi().to_string_in("eta"))];
            v.push(match inst.df.validate(cfg.n_max) {
                Ok(()) => Check::new("plugin.eigen", "H P_n = E_n P_n for every listed P_n", &inst.subject, Status::Pass),
                Err(e) => Check::error("plugin.eigen", "H P_n = E_n P_n for every listed P_n", &inst.subject, e),
            });
            v.extend(closure_checks(cfg, &inst, &table));
            v
        })
        .collect();
    checks.extend(per.into_iter().flatten());
    checks
}
