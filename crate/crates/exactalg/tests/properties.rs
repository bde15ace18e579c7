use exactalg::{
    interpolate_param, interpolate_upoly, solve_linear_exact, Field, Gaussian, Matrix, ParamPoly, RatFunc, Rational,
    UniPoly,
};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

fn upoly(max_len: usize) -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(rational(), 0..max_len).prop_map(UniPoly::new)
}

fn gaussian() -> impl Strategy<Value = Gaussian> {
    (rational(), rational()).prop_map(|(a, b)| Gaussian::new(a, b))
}

proptest! {
    #[test]
    fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        prop_assert_eq!(&a - &a, Rational::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * a.recip(), Rational::one());
        }
    }

    #[test]
    fn gaussian_field_axioms(a in gaussian(), b in gaussian(), c in gaussian()) {
        prop_assert_eq!(a.fmul(&b.fadd(&c)), a.fmul(&b).fadd(&a.fmul(&c)));
        prop_assert_eq!(a.fmul(&b).fmul(&c), a.fmul(&b.fmul(&c)));
        if !a.is_zero() {
            prop_assert_eq!(a.fdiv(&a), Gaussian::one());
        }
    }

    #[test]
    fn ratfunc_normalization_preserves_values(n in upoly(5), d in upoly(4), x in rational()) {
        prop_assume!(!d.is_zero());
        let f = RatFunc::new(n.clone(), d.clone());
        let dv = d.eval(&x);
        prop_assume!(!dv.is_zero());
        prop_assert_eq!(f.eval(&x), Some(n.eval(&x) / dv));
    }

    #[test]
    fn interpolation_round_trip(p in upoly(6), extra in 0usize..3) {
        let bound = 5;
        let samples: Vec<_> = (0..(bound + 1 + extra) as i64)
            .map(|i| {
                let x = Rational::new((3 * i - 7).into(), 2.into());
                let y = p.eval(&x);
                (x, y)
            })
            .collect();
        prop_assert_eq!(interpolate_upoly(&samples, bound).unwrap(), p.clone());
        prop_assert_eq!(interpolate_param("g", &samples, bound).unwrap(), ParamPoly::from_upoly(&p, "g"));
    }

    #[test]
    fn solver_invariants(
        rows in prop::collection::vec(prop::collection::vec(rational(), 4), 1..6),
        x in prop::collection::vec(rational(), 4),
        consistent in any::<bool>(),
        bump in nonzero_rational(),
    ) {
        let m = Matrix::from_rows(rows);
        let mut rhs = m.mul_vec(&x);
        if !consistent {
            rhs[0] += bump;
        }
        let s = solve_linear_exact(&m, &rhs);
        if let Some(sol) = &s.solution {
            prop_assert_eq!(m.mul_vec(sol), rhs.clone());
        } else {
            prop_assert!(!consistent);
        }
        if consistent {
            prop_assert!(s.solution.is_some());
        }
        prop_assert_eq!(s.kernel.len(), 4 - s.rank);
        for k in &s.kernel {
            prop_assert!(m.mul_vec(k).iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn polynomial_division(a in upoly(7), b in upoly(4)) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.div_rem(&b);
        prop_assert_eq!(&(&q * &b) + &r, a);
        prop_assert!(r.is_zero() || r.degree() < b.degree());
    }
}
