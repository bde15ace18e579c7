use closurelab::closure::{conjectured_r, degree_bounds, solve_expr, spectral_identity};
use closurelab::families::{build_x, builtin_deformed, energy, virtual_energy, Family, MultiIndex, ParamSet, VType};
use closurelab::heisenberg::HeisenbergContext;
use closurelab::opalg::{commutator, DiffOp, Operator, ShiftKind, ShiftOp};
use closurelab::recurrence::{check_h_symmetry, check_leading, RecurrenceTable};
use closurelab::spectral::{alpha_conjecture, companion, eigen_closed_form, r_from_alphas};
use exactalg::rational::powi;
use exactalg::{int, rat, Gaussian, RatFunc, Rational, UniPoly};
use num_traits::Zero;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(p, q)| rat(p, q))
}

fn positive_rational(lo: i64, hi: i64) -> impl Strategy<Value = Rational> {
    (lo..=hi, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn upoly(max_len: usize) -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(small_rational(), 0..=max_len).prop_map(UniPoly::new)
}

/// Polynomial numerator over `1` or a linear factor `v − c`.
fn ratfunc() -> impl Strategy<Value = RatFunc<Rational>> {
    (upoly(3), prop::option::of(small_rational())).prop_map(|(n, c)| match c {
        Some(c) => RatFunc::new(n, UniPoly::new(vec![-c, int(1)])),
        None => RatFunc::from_poly(n),
    })
}

fn diff_op() -> impl Strategy<Value = DiffOp> {
    prop::collection::vec(ratfunc(), 1..=3).prop_map(DiffOp::new)
}

fn gaussian_ratfunc() -> impl Strategy<Value = RatFunc<Gaussian>> {
    (prop::collection::vec((small_rational(), small_rational()), 0..=3)).prop_map(|cs| {
        RatFunc::from_poly(UniPoly::new(cs.into_iter().map(|(a, b)| Gaussian::new(a, b)).collect()))
    })
}

fn wilson_op() -> impl Strategy<Value = ShiftOp<Gaussian>> {
    prop::collection::vec((-1i64..=1, gaussian_ratfunc()), 1..=3)
        .prop_map(|ts| ShiftOp::new(ShiftKind::Additive { step: Gaussian::new(int(0), int(-1)) }, ts))
}

fn aw_op() -> impl Strategy<Value = ShiftOp<Rational>> {
    prop::collection::vec((-1i64..=1, ratfunc()), 1..=3).prop_map(|ts| ShiftOp::new(ShiftKind::Multiplicative { q: rat(1, 4) }, ts))
}

fn jacobi_identity<O: Operator>(a: &O, b: &O, c: &O) -> bool {
    let t1 = commutator(a, &commutator(b, c).unwrap()).unwrap();
    let t2 = commutator(b, &commutator(c, a).unwrap()).unwrap();
    let t3 = commutator(c, &commutator(a, b).unwrap()).unwrap();
    t1.add(&t2).unwrap().add(&t3).unwrap().is_zero()
}

fn associative<O: Operator + PartialEq>(a: &O, b: &O, c: &O) -> bool {
    a.compose(b).unwrap().compose(c).unwrap() == a.compose(&b.compose(c).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differential_operators_form_a_lie_algebra(a in diff_op(), b in diff_op(), c in diff_op()) {
        prop_assert!(jacobi_identity(&a, &b, &c));
        prop_assert!(associative(&a, &b, &c));
    }

    #[test]
    fn differential_action_respects_composition(a in diff_op(), b in diff_op(), f in ratfunc()) {
        prop_assert_eq!(a.compose(&b).unwrap().apply(&f), a.apply(&b.apply(&f)));
    }

    #[test]
    fn additive_shifts_form_a_lie_algebra(a in wilson_op(), b in wilson_op(), c in wilson_op()) {
        prop_assert!(jacobi_identity(&a, &b, &c));
        prop_assert!(associative(&a, &b, &c));
    }

    #[test]
    fn multiplicative_shifts_compose(a in aw_op(), b in aw_op(), c in aw_op(), f in ratfunc()) {
        prop_assert!(jacobi_identity(&a, &b, &c));
        prop_assert!(associative(&a, &b, &c));
        prop_assert_eq!(a.compose(&b).unwrap().apply(&f), a.apply(&b.apply(&f)));
    }

    #[test]
    fn shifts_invert_and_multiplications_commute(s in -3i64..=3, f in ratfunc(), g in ratfunc()) {
        let kind = ShiftKind::Multiplicative { q: rat(4, 9) };
        let t = ShiftOp::shift(kind.clone(), s).compose(&ShiftOp::shift(kind.clone(), -s)).unwrap();
        prop_assert_eq!(t, ShiftOp::shift(kind.clone(), 0));
        let mf = ShiftOp::new(kind.clone(), [(0, f)]);
        let mg = ShiftOp::new(kind, [(0, g)]);
        prop_assert!(commutator(&mf, &mg).unwrap().is_zero());
    }

    #[test]
    fn energies_start_at_zero_and_increase(g in positive_rational(1, 30), h in positive_rational(1, 30)) {
        for p in [ParamSet::laguerre(g.clone()), ParamSet::jacobi(g, h)] {
            prop_assert!(energy(&p, 0).is_zero());
            for n in 0..8 {
                prop_assert!(energy(&p, n) < energy(&p, n + 1));
            }
            for v in 1..=3u32 {
                let half = int(v as i64) + rat(1, 2);
                let (gi, hi) = (p.get("g"), if p.family() == Family::J { p.get("h") } else { half.clone() + int(1) });
                if hi > half {
                    prop_assert!(virtual_energy(&p, VType::I, v) < Rational::zero());
                }
                if gi > half && hi > int(0) {
                    prop_assert!(virtual_energy(&p, VType::II, v) < Rational::zero());
                }
            }
        }
    }

    #[test]
    fn wilson_and_askey_wilson_roots_are_rational(n in 0i64..12, b1 in small_rational(), k in 2i64..7, b4 in small_rational()) {
        let nn = int(n);
        let w = int(4) * (&nn * (&nn + &b1 - int(1))) + powi(&(&b1 - int(1)), 2);
        prop_assert_eq!(w, powi(&(int(2) * &nn + &b1 - int(1)), 2));
        // AW: E_n = (q^-n − 1)(1 − b4 q^(n−1))
        let q = powi(&rat(1, k), 2);
        let en = (powi(&q, -n) - int(1)) * (int(1) - &b4 * powi(&q, n - 1));
        let lhs = powi(&(&en + int(1) + &b4 / &q), 2) - int(4) * &b4 / &q;
        prop_assert_eq!(lhs, powi(&(powi(&q, -n) - &b4 * powi(&q, n - 1)), 2));
    }

    #[test]
    fn companion_diagonalization(alphas in prop::collection::btree_set((-20i64..=20, 1i64..=9).prop_map(|(p, q)| rat(p, q)), 1..=6)) {
        let a: Vec<Rational> = alphas.into_iter().filter(|x| !x.is_zero()).collect();
        prop_assume!(!a.is_empty());
        let sd = eigen_closed_form(&a).unwrap();
        prop_assert!(sd.checks.all());
        prop_assert!(sd.check_recursion(a.len() as u32 + 3));
        // characteristic polynomial of the companion matrix
        let m = companion(&r_from_alphas(&a));
        for x in &a {
            let mut shifted = m.clone();
            for i in 0..a.len() {
                shifted[(i, i)] -= x;
            }
            prop_assert!(shifted.determinant().is_zero());
        }
        prop_assert!(sd.p[a.len() - 1].iter().all(|v| v == &int(1)));
        let prod = a.iter().fold(int(1), |acc, x| acc * x);
        prop_assert_eq!(m.determinant(), prod);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn laguerre_recurrence_invariants(g in positive_rational(1, 40), which in 0usize..3, m in 0usize..2) {
        let d = MultiIndex::parse(["", "1I", "1II"][which]).unwrap();
        let p = ParamSet::laguerre(g);
        prop_assume!(p.validate(d.ell() + m + 1).is_ok() && p.validate_virtual(&d).is_ok());
        let df = builtin_deformed(&p, &d).unwrap();
        let x = build_x(df.xi(), &UniPoly::monomial(int(1), m));
        let t = RecurrenceTable::build(&df, &x, 6).unwrap();
        prop_assert!(check_h_symmetry(&df, &t).iter().all(|e| e.pass));
        prop_assert!(check_leading(&df, &t).iter().all(|e| e.pass));
        let l = t.l as i64;
        for n in 0..=6i64 {
            for k in -l..0 {
                if n + k < 0 {
                    prop_assert!(t.rows[n as usize][(k + l) as usize].is_zero());
                }
            }
        }
    }

    #[test]
    fn closure_matches_conjecture(g in positive_rational(1, 40), h in positive_rational(1, 40), jac in any::<bool>(), which in 0usize..3) {
        let d = MultiIndex::parse(["", "1I", "1II"][which]).unwrap();
        let p = if jac { ParamSet::jacobi(g, h) } else { ParamSet::laguerre(g) };
        let l = d.ell() + 1;
        prop_assume!(p.validate(l).is_ok() && p.validate_virtual(&d).is_ok());
        let df = builtin_deformed(&p, &d).unwrap();
        let x = build_x(df.xi(), &UniPoly::one());
        let k = 2 * l;
        let out = solve_expr(df.h_tilde(), &df.x_operator(&x), k, &degree_bounds(p.family(), k), None).unwrap();
        prop_assert_eq!(out.kernel_dim, 0);
        prop_assert!(out.data.respects_bounds(p.family()));
        prop_assert_eq!(&out.data.r, &conjectured_r(&p, l).unwrap().r);
        if p.family() == Family::L {
            prop_assert!(out.data.r.iter().skip(1).step_by(2).all(UniPoly::is_zero));
        }
        for n in 0..=6 {
            for kk in -(l as i64)..=l as i64 {
                if kk != 0 && n + kk >= 0 {
                    prop_assert!(spectral_identity(&p, &out.data, n, kk));
                }
            }
        }
        let ctx = HeisenbergContext::new(&df, &x, out.data, 0).unwrap();
        let t = RecurrenceTable::build(&df, &x, 4).unwrap();
        for n in 0..=3 {
            prop_assert!(ctx.r0_relation(&t, n));
            prop_assert_eq!(ctx.round_trip(&t, n).unwrap(), (true, true));
            for j in 1..=k {
                prop_assert!(ctx.ladder_apply(j, n, Some(&t)).unwrap().pass);
            }
        }
    }

    #[test]
    fn conjugate_pairs_are_polynomial(l in 1usize..=4) {
        for family in [Family::L, Family::J, Family::W] {
            prop_assert!(alpha_conjecture(family, l, &Default::default()).unwrap().pairs_are_polynomial());
        }
    }
}

