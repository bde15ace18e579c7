//! End-to-end acceptance checks, one line per criterion. Runs without the
//! libtest harness so the summary is always printed.

use closurelab::closure::appendix::{check_points, compare_appendix_b, compare_symbolic, ReferenceTable, RowStatus};
use closurelab::closure::symbolic::{g_node, solve_symbolic};
use closurelab::closure::{conjectured_r, degree_bounds, solve_expr, spectral_identity, verify_expr, ClosureData};
use closurelab::families::{build_x, builtin_deformed, energy, load_family_plugin, DeformedFamily, Family, MultiIndex, ParamSet};
use closurelab::heisenberg::HeisenbergContext;
use closurelab::recurrence::{check_h_symmetry, closed_form_compare, five_term_formulas, symbolic_table, RecurrenceTable};
use closurelab::spectral::{alpha_conjecture, alpha_values, check_spacing, eigen_closed_form, printed_pair_forms, r_from_alphas, SpectralData};
use exactalg::expr::poly;
use exactalg::{Bindings, ParamPoly, Rational, UniPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::time::Instant;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn p(s: &str) -> ParamPoly {
    poly(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn d(s: &str) -> MultiIndex {
    MultiIndex::parse(s).unwrap()
}

fn eta_pow(k: usize) -> UniPoly {
    UniPoly::monomial(exactalg::int(1), k)
}

fn ell(y: &UniPoly, d: &MultiIndex) -> usize {
    d.ell() + y.degree().unwrap_or(0) + 1
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn solve(df: &DeformedFamily, x: &UniPoly, k: usize) -> Result<ClosureData, String> {
    let out = solve_expr(df.h_tilde(), &df.x_operator(x), k, &degree_bounds(df.family(), k), None).map_err(|e| e.to_string())?;
    if out.kernel_dim != 0 {
        return Err(format!("kernel dimension {}", out.kernel_dim));
    }
    Ok(out.data)
}

fn admissible(family: Family, l: usize) -> Vec<ParamSet> {
    ParamSet::default_samples(family).into_iter().filter(|p| p.validate(l).is_ok()).collect()
}

/// Built-in systems: L and J with `D ∈ {{}, 1I, 1II}` and `Y = η^m`.
fn builtin_systems(max_y: usize) -> Vec<(DeformedFamily, UniPoly)> {
    let mut out = Vec::new();
    for family in [Family::L, Family::J] {
        for ds in ["", "1I", "1II"] {
            for m in 0..=max_y {
                let (dd, y) = (d(ds), eta_pow(m));
                for params in admissible(family, ell(&y, &dd)).into_iter().filter(|p| p.validate_virtual(&dd).is_ok()) {
                    let df = builtin_deformed(&params, &dd).unwrap();
                    let x = build_x(df.xi(), &y);
                    out.push((df, x));
                }
            }
        }
    }
    out
}

fn laguerre_r(values: &[&str]) -> Vec<ParamPoly> {
    values.iter().map(|s| p(s)).collect()
}

fn symbolic_laguerre(ds: &str, y: UniPoly, r: &[&str], r_minus1: &str) -> Outcome {
    let s = solve_symbolic(Family::L, &d(ds), &y).map_err(|e| e.to_string())?;
    ensure!(s.r == laguerre_r(r), "D={ds}: R = {:?}", s.r.iter().map(ToString::to_string).collect::<Vec<_>>());
    ensure!(s.r_minus1 == p(r_minus1), "D={ds}: R_-1 = {}", s.r_minus1);
    // the reconstruction is exact: verify the operator identity off the nodes
    for g in [exactalg::rat(13, 5), exactalg::rat(41, 3)] {
        let params = ParamSet::laguerre(g);
        let df = builtin_deformed(&params, &d(ds)).unwrap();
        let x = build_x(df.xi(), &y);
        ensure!(verify_expr(df.h_tilde(), &df.x_operator(&x), &s.at(&params)) == Ok(true), "identity fails at {}", params.label());
    }
    Ok(format!("K={}", s.k))
}

fn criterion_1() -> Outcome {
    symbolic_laguerre("1I", UniPoly::one(), &["-1024", "0", "80", "0"], "64(3z^2+2(10g+11)z+2(2g+1)(6g+13))")
}

fn criterion_2() -> Outcome {
    let a = symbolic_laguerre(
        "1I",
        eta_pow(1),
        &["147456", "0", "-12544", "0", "224", "0"],
        "-1536(10z^3+3(26g+33)z^2+2(84g^2+240g+139)z+2(2g+1)(2g+5)(10g+27))",
    )?;
    let b = symbolic_laguerre(
        "1I",
        eta_pow(2),
        &["-37748736", "0", "3358720", "0", "-69888", "0", "480", "0"],
        "24576(105z^4+20(50g+67)z^3+60(52g^2+152g+107)z^2+32(6g+5)(18g^2+77g+94)z+8(2g+1)(2g+5)(2g+7)(14g+45))",
    )?;
    Ok(format!("Y=eta {a}, Y=eta^2 {b}"))
}

fn criterion_3() -> Outcome {
    symbolic_laguerre("1II", UniPoly::one(), &["-1024", "0", "80", "0"], "-64(3z^2+2(10g-9)z+2(2g-3)(6g+1))")
}

fn criterion_4() -> Outcome {
    let table = ReferenceTable::load().map_err(|e| e.to_string())?;
    let r_expected: Vec<ParamPoly> = ["-1024(z+a^2-1)(z+a^2-4)", "-1024(z+a^2-5/2)", "80(z+a^2-33/5)", "40"].iter().map(|s| p(s)).collect();
    let one = solve_symbolic(Family::J, &d("1I"), &UniPoly::one()).map_err(|e| e.to_string())?;
    let two = solve_symbolic(Family::J, &d("1II"), &UniPoly::one()).map_err(|e| e.to_string())?;
    ensure!(one.r == r_expected, "1I: R = {:?}", one.r.iter().map(ToString::to_string).collect::<Vec<_>>());
    ensure!(two.r == r_expected, "1II: R = {:?}", two.r.iter().map(ToString::to_string).collect::<Vec<_>>());
    let row = table.find(Family::J, &d("1I")).map_err(|e| e.to_string())?;
    ensure!(compare_symbolic(row, &one.r_minus1), "1I: R_-1 differs from the stored row: {}", one.r_minus1);
    let image = row.r_minus1.subst("b", &p("-b"));
    ensure!(two.r_minus1 == image, "1II: R_-1 is not the b -> -b image: {}", two.r_minus1);
    let row2 = table.find(Family::J, &d("1II")).map_err(|e| e.to_string())?;
    ensure!(compare_symbolic(row2, &two.r_minus1), "1II: R_-1 differs from the stored row");
    // the worked example states the same R_-1 in a second factorization
    let worked = p("128(b+2)(z^2-((b+2)^2+3a^2-10a+1)z+2(a-1)(a-2)((b+2)^2-2a^2-a-3))");
    Ok(format!("R_-1 equals the stored rows; second printed form {}", if worked == one.r_minus1 { "agrees" } else { "differs" }))
}

fn criterion_5() -> Outcome {
    let st = symbolic_table("g", g_node, |g| builtin_deformed(&ParamSet::laguerre(g.clone()), &d("1I")), &UniPoly::one(), 8, 24)
        .map_err(|e| e.to_string())?;
    ensure!(st.x == p("eta(eta+2g+1)/2"), "X_min = {}", st.x);
    let cmp = st.compare(&five_term_formulas(Family::L).unwrap()).map_err(|e| e.to_string())?;
    let bad: Vec<_> = cmp.iter().filter(|e| !e.2).collect();
    ensure!(bad.is_empty(), "L entries differ: {bad:?}");
    let formulas = five_term_formulas(Family::J).unwrap();
    let mut j_entries = 0;
    for params in ParamSet::default_samples(Family::J).into_iter().take(3) {
        let df = builtin_deformed(&params, &d("1I")).unwrap();
        let x = build_x(df.xi(), &UniPoly::one());
        let t = RecurrenceTable::build(&df, &x, 5).map_err(|e| e.to_string())?;
        let cmp = closed_form_compare(&t, &params.bindings(), &formulas).map_err(|e| e.to_string())?;
        let bad: Vec<_> = cmp.iter().filter(|e| !e.pass).collect();
        ensure!(bad.is_empty(), "J at {}: {bad:?}", params.label());
        j_entries += cmp.len();
    }
    Ok(format!("L {} entries symbolic in g, J {j_entries} entries at 3 samples", cmp.len()))
}

fn plugin_systems(names: &[&str]) -> Vec<(DeformedFamily, UniPoly, usize)> {
    names
        .iter()
        .map(|n| {
            let pl = load_family_plugin(&fixture(n)).unwrap();
            let x = pl.x.clone().unwrap_or_else(|| build_x(pl.family.xi(), &UniPoly::one()));
            let top = pl.family.n_max().unwrap_or(8);
            (pl.family, x, top)
        })
        .collect()
}

const LJ_PLUGINS: [&str; 16] = [
    "L_2I.json",
    "L_2II.json",
    "L_1I_2I.json",
    "L_1II_2II.json",
    "L_3I.json",
    "L_3II.json",
    "L_1I_3I.json",
    "L_1II_3II.json",
    "L_1I_2I_3I.json",
    "L_1II_2II_3II.json",
    "L_1I_1II.json",
    "J_2I.json",
    "J_2II.json",
    "J_1I_2I.json",
    "J_1II_2II.json",
    "J_1I_2I_alt.json",
];

fn criterion_6() -> Outcome {
    let mut systems: Vec<(DeformedFamily, UniPoly, usize)> = builtin_systems(2).into_iter().map(|(df, x)| (df, x, 8)).collect();
    systems.extend(plugin_systems(&LJ_PLUGINS).into_iter().map(|(df, x, top)| {
        let l = x.degree().unwrap();
        (df, x, top.saturating_sub(l))
    }));
    let mut entries = 0;
    for (df, x, top) in &systems {
        let t = RecurrenceTable::build(df, x, *top).map_err(|e| format!("{} {}: {e}", df.family(), df.multi_index().key()))?;
        let v = check_h_symmetry(df, &t);
        ensure!(v.iter().all(|e| e.pass), "{} {} {}: {:?}", df.family(), df.multi_index().key(), df.params().label(), v.iter().find(|e| !e.pass));
        entries += v.len();
    }
    Ok(format!("{} systems, {entries} entries", systems.len()))
}

fn spectral_suite(sd: &SpectralData) -> bool {
    sd.checks.all() && sd.check_recursion(sd.k() as u32 + 3)
}

fn criterion_7() -> Outcome {
    let mut instances = 0;
    let mut points = 0;
    for (df, x) in builtin_systems(1) {
        let l = x.degree().unwrap();
        let cd = solve(&df, &x, 2 * l)?;
        for n in 0..=8 {
            let a = alpha_values(df.params(), l, n).map_err(|e| e.to_string())?;
            let sd = eigen_closed_form(&a).map_err(|e| e.to_string())?;
            let en = energy(df.params(), n);
            let r: Vec<Rational> = cd.r.iter().map(|q| q.eval(&en)).collect();
            ensure!(r_from_alphas(&a) == r && sd.r == r, "{} {} n={n}: R_i(E_n) mismatch", df.family(), df.params().label());
            ensure!(spectral_suite(&sd), "{} {} n={n}: suite fails", df.family(), df.params().label());
            points += 1;
        }
        instances += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for i in 0..50 {
        let k = 1 + i % 8;
        let mut a: Vec<Rational> = Vec::new();
        while a.len() < k {
            let v = Rational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=9).into());
            if v != Rational::from_integer(0.into()) && !a.contains(&v) {
                a.push(v);
            }
        }
        let sd = eigen_closed_form(&a).map_err(|e| e.to_string())?;
        ensure!(spectral_suite(&sd), "random spectrum {a:?}");
    }
    Ok(format!("{instances} solved instances at {points} energies, 50 random spectra"))
}

fn criterion_8() -> Outcome {
    let mut compared = 0;
    for l in 1..=4usize {
        for family in [Family::L, Family::J, Family::W, Family::AW] {
            // symbolic in the parameters where the closed forms allow it
            let symbolic = family != Family::AW;
            let binding_sets: Vec<Bindings> =
                if symbolic { vec![Bindings::new()] } else { admissible(family, l).iter().map(ParamSet::bindings).collect() };
            for b in &binding_sets {
                let set = alpha_conjecture(family, l, b).map_err(|e| e.to_string())?;
                ensure!(set.pairs_are_polynomial(), "{family} L={l}: square roots survive pairing");
                let sums = set.pair_sums_products();
                for j in 0..l {
                    let printed = printed_pair_forms(family, (l - j) as i64, b).map_err(|e| e.to_string())?;
                    ensure!(printed == sums[j], "{family} L={l} j={}: pair forms differ", j + 1);
                }
            }
            for params in admissible(family, l) {
                let cd = conjectured_r(&params, l).map_err(|e| e.to_string())?;
                // derived R_i: every energy gap within reach is a root
                for n in 0..=8 {
                    for k in -(l as i64)..=l as i64 {
                        if k != 0 && n + k >= 0 {
                            ensure!(spectral_identity(&params, &cd, n, k), "{family} L={l} {}: gap n={n} k={k}", params.label());
                        }
                    }
                }
                compared += 1;
            }
        }
        // solved R_i for every built-in system of this order
        for family in [Family::L, Family::J] {
            for (ds, m) in [("", l - 1), ("1I", l.wrapping_sub(2)), ("1II", l.wrapping_sub(2))] {
                if m > 3 {
                    continue;
                }
                let (dd, y) = (d(ds), eta_pow(m));
                let Some(params) = admissible(family, l).into_iter().next() else { continue };
                let df = builtin_deformed(&params, &dd).unwrap();
                let cd = solve(&df, &build_x(df.xi(), &y), 2 * l)?;
                ensure!(cd.r == conjectured_r(&params, l).unwrap().r, "{family} D={ds} L={l}: solved R_i differ");
                compared += 1;
            }
        }
    }
    for (df, x, _) in plugin_systems(&["W_classical.json", "AW_classical.json", "L_2I.json", "J_2I.json"]) {
        let l = x.degree().unwrap();
        let cd = solve(&df, &x, 2 * l)?;
        ensure!(cd.r == conjectured_r(df.params(), l).unwrap().r, "{} {}: solved R_i differ", df.family(), df.multi_index().key());
        compared += 1;
    }
    Ok(format!("{compared} comparisons, pairing identities for L=1..4"))
}

fn criterion_9() -> Outcome {
    let mut entries = 0;
    for family in [Family::L, Family::J, Family::W, Family::AW] {
        for l in 1..=4usize {
            let samples = admissible(family, l);
            ensure!(!samples.is_empty(), "{family} L={l}: no admissible sample");
            for params in samples {
                let v = check_spacing(&params, l, 0..=8).map_err(|e| format!("{family} {}: {e}", params.label()))?;
                ensure!(v.iter().all(|e| e.pass), "{family} L={l} {}: {:?}", params.label(), v.iter().find(|e| !e.pass));
                entries += v.len();
            }
        }
    }
    Ok(format!("{entries} entries"))
}

fn criterion_10() -> Outcome {
    let mut count = 0;
    for (df, x) in builtin_systems(1) {
        let l = x.degree().unwrap();
        let k = 2 * l;
        let cd = solve(&df, &x, k)?;
        let ctx = HeisenbergContext::new(&df, &x, cd, 2).map_err(|e| e.to_string())?;
        let t = RecurrenceTable::build(&df, &x, 7).map_err(|e| e.to_string())?;
        let tag = format!("{} {} {}", df.family(), df.multi_index().key(), df.params().label());
        for n in 0..=6i64 {
            for j in 1..=k {
                let a = ctx.ladder_apply(j, n, Some(&t)).map_err(|e| format!("{tag} j={j} n={n}: {e}"))?;
                ensure!(a.pass, "{tag} j={j} n={n}: coefficient {} vs {:?}", a.coefficient, a.expected);
                ensure!(ctx.commutation_check(j, n) == Ok((true, true)), "{tag} j={j} n={n}: eigenvalue shift");
            }
            ensure!(ctx.r0_relation(&t, n), "{tag} n={n}: -R_-1/R_0 at E_n");
            for m in 0..=k + 2 {
                ensure!(ctx.series_check(n, m) == Ok(true), "{tag} n={n} m={m}: series");
            }
            ensure!(ctx.round_trip(&t, n) == Ok((true, true)), "{tag} n={n}: round trip");
            count += 1;
        }
    }
    Ok(format!("{count} (system, n) pairs"))
}

fn criterion_11() -> Outcome {
    let table = ReferenceTable::load().map_err(|e| e.to_string())?;
    for row in table.rows() {
        ensure!(row.transcription_check(&check_points(row.family_kind())) == Ok(true), "{} {}: transcription", row.family, row.d);
    }
    let reference_only = table.rows().iter().filter(|r| r.status == RowStatus::ReferenceOnly).count();
    // plugin-gated regeneration: all K=6 rows, the classical W/AW rows and one K=8 row
    let names = [
        "L_2I.json",
        "L_2II.json",
        "L_1I_2I.json",
        "L_1II_2II.json",
        "J_2I.json",
        "J_2II.json",
        "J_1I_2I.json",
        "J_1I_2I_alt.json",
        "J_1II_2II.json",
        "W_classical.json",
        "AW_classical.json",
        "L_3I.json",
    ];
    let mut corrected = 0;
    for (df, x, _) in plugin_systems(&names) {
        let row = table.find(df.family(), df.multi_index()).map_err(|e| e.to_string())?;
        let cd = solve(&df, &x, row.k)?;
        let c = compare_appendix_b(&table, df.params(), df.multi_index(), &cd).map_err(|e| e.to_string())?;
        ensure!(c.matches || c.matches_corrected == Some(true), "{} {}: {:?} vs {:?}", c.family, c.d, c.actual, c.expected);
        if !c.matches {
            corrected += 1;
        }
    }
    Ok(format!(
        "{} rows self-checked, {} regenerated via plugins ({corrected} against the corrected z^1 term), {reference_only} reference-only",
        table.rows().len(),
        names.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("L {1I} Y=1 closure symbolic in g", criterion_1),
        ("L {1I} Y=eta, eta^2 closure symbolic in g", criterion_2),
        ("L {1II} Y=1 closure symbolic in g", criterion_3),
        ("J {1I}/{1II} closure symbolic in a, b", criterion_4),
        ("five-term recurrence closed forms", criterion_5),
        ("normalization symmetry of recurrence rows", criterion_6),
        ("companion matrix diagonalization suite", criterion_7),
        ("conjectured eigenvalues reproduce R_i", criterion_8),
        ("eigenvalues at E_n are energy gaps", criterion_9),
        ("ladder operators and Heisenberg series", criterion_10),
        ("reference rows: self-check and plugin path", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
