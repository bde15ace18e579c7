use super::params::{Family, MultiIndex, ParamSet, VType};
use exactalg::rational::powi;
use exactalg::{int, rat, Rational};
use num_traits::One;

/// `E_n`; negative `n` is allowed for spacing formulas.
pub fn energy(p: &ParamSet, n: i64) -> Rational {
    let nn = int(n);
    match p.family() {
        Family::L => int(4 * n),
        Family::J => int(4) * &nn * (&nn + p.get("g") + p.get("h")),
        Family::W => &nn * (&nn + p.get("b1") - int(1)),
        Family::AW => {
            let q = p.get("q");
            (powi(&q, -n) - int(1)) * (int(1) - p.get("b4") * powi(&q, n - 1))
        }
    }
}

/// Virtual-state energy `Ẽ^t_v`.
pub fn virtual_energy(p: &ParamSet, t: VType, v: u32) -> Rational {
    let vv = int(v as i64);
    let half = rat(1, 2);
    match (p.family(), t) {
        (Family::L, VType::I) => int(-4) * (p.get("g") + &vv + half),
        (Family::L, VType::II) => int(-4) * (p.get("g") - &vv - half),
        (Family::J, VType::I) => int(-4) * (p.get("g") + &vv + &half) * (p.get("h") - &vv - &half),
        (Family::J, VType::II) => int(-4) * (p.get("g") - &vv - &half) * (p.get("h") + &vv + &half),
        (Family::W, VType::I) => -(p.get("s1") - &vv - int(1)) * (p.get("t1") + &vv),
        (Family::W, VType::II) => -(p.get("t1") - &vv - int(1)) * (p.get("s1") + &vv),
        (Family::AW, t) => {
            let q = p.get("q");
            let (x, y) = match t {
                VType::I => (p.get("s2"), p.get("t2")),
                VType::II => (p.get("t2"), p.get("s2")),
            };
            let v = v as i64;
            -(int(1) - x * powi(&q, -v - 1)) * (int(1) - y * powi(&q, v))
        }
    }
}

/// `h_n/h_{n−1}` of the undeformed system, for `n ≥ 1`.
pub fn classical_h_step(p: &ParamSet, n: i64) -> Rational {
    assert!(n >= 1, "h-ratio step needs n ≥ 1");
    let nn = int(n);
    let half = rat(1, 2);
    match p.family() {
        Family::L => (&nn + p.get("g") - half) / &nn,
        Family::J => {
            let a = p.get("a");
            (&nn + p.get("g") - &half) * (&nn + p.get("h") - &half) * (int(2) * &nn - int(2) + &a)
                / (&nn * (int(2) * &nn + &a) * (&nn - int(1) + &a))
        }
        Family::W => {
            let b1 = p.get("b1");
            let a: Vec<Rational> = (1..=4).map(|i| p.get(&format!("a{i}"))).collect();
            let mut prod = Rational::one();
            for i in 0..4 {
                for j in i + 1..4 {
                    prod *= &nn - int(1) + &a[i] + &a[j];
                }
            }
            &nn * (int(2) * &nn + &b1 - int(3)) * prod / ((&nn + &b1 - int(2)) * (int(2) * &nn + &b1 - int(1)))
        }
        Family::AW => {
            let q = p.get("q");
            let b4 = p.get("b4");
            let a: Vec<Rational> = (1..=4).map(|i| p.get(&format!("a{i}"))).collect();
            let mut prod = Rational::one();
            for i in 0..4 {
                for j in i + 1..4 {
                    prod *= int(1) - &a[i] * &a[j] * powi(&q, n - 1);
                }
            }
            (int(1) - powi(&q, n)) * prod * (int(1) - &b4 * powi(&q, 2 * n - 3))
                / ((int(1) - &b4 * powi(&q, n - 2)) * (int(1) - &b4 * powi(&q, 2 * n - 1)))
        }
    }
}

/// `h_{D,n}/h_{D,n−l}` for `1 ≤ l ≤ n`.
pub fn h_ratio(p: &ParamSet, d: &MultiIndex, n: i64, l: i64) -> Rational {
    assert!(l >= 0 && l <= n, "h-ratio needs 0 ≤ l ≤ n");
    let mut r = Rational::one();
    for k in 0..l {
        r *= classical_h_step(p, n - k);
    }
    let (en, em) = (energy(p, n), energy(p, n - l));
    for &(dj, t) in d.entries() {
        let ev = virtual_energy(p, t, dj);
        r *= (&en - &ev) / (&em - &ev);
    }
    r
}
