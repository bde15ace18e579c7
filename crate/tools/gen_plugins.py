#!/usr/bin/env python3
"""Generate family plugin fixtures.

Multi-step Laguerre/Jacobi data come from Wronskians (in eta) of the
virtual-state polynomial parts; classical Wilson/Askey-Wilson data carry the
shift-operator Hamiltonian explicitly.

    python3 tools/gen_plugins.py crates/core/tests/fixtures [L|J|J2|W|AW]
"""
import json
import sys
from pathlib import Path

import sympy as sp

eta, v = sp.symbols("eta v")
HALF = sp.Rational(1, 2)
N_EXPLICIT = 12


def rat(c):
    c = sp.Rational(c)
    return f"{c.p}" if c.q == 1 else f"{c.p}/{c.q}"


def coeffs(expr, var=eta):
    p = sp.Poly(sp.expand(expr), var)
    return [rat(c) for c in reversed(p.all_coeffs())]


def gauss_coeffs(expr, var):
    p = sp.Poly(sp.expand(expr), var)
    out = []
    for c in reversed(p.all_coeffs()):
        re, im = sp.re(c), sp.im(c)
        out.append(f"{rat(re)},{rat(im)}")
    return out


def qp(x, q, k):
    out = sp.Integer(1)
    for j in range(k):
        out *= 1 - x * q**j
    return out


def wronskian(fs):
    m = len(fs)
    return sp.Matrix(m, m, lambda i, j: sp.diff(fs[j], eta, i)).det()


def polynomial_part(expr, factors):
    """Drop the non-polynomial prefactors and clear leftover powers of the
    listed linear factors."""
    e = sp.cancel(sp.powsimp(sp.expand(sp.simplify(expr)), force=True))
    num, den = sp.fraction(sp.factor(e))
    for f in factors:
        while sp.degree(den, eta) > 0 and sp.rem(den, f, eta) == 0:
            den = sp.quo(den, f, eta)
    assert sp.degree(den, eta) <= 0, den
    return sp.expand(num / den)


def laguerre_data(g, D):
    lag = lambda n, al, x: sp.expand(sp.assoc_laguerre(n, al, x))
    mi = sum(1 for _, t in D if t == "I")
    mii = len(D) - mi

    def u(d, t):
        if t == "I":
            return sp.exp(eta) * lag(d, g - HALF, -eta)
        return eta ** (HALF - g) * lag(d, HALF - g, eta)

    pre = sp.exp(-mi * eta) * eta ** (-mii * (HALF - g))
    us = [u(d, t) for d, t in D]
    xi = polynomial_part(wronskian(us) * pre, [eta])
    ps = [polynomial_part(wronskian(us + [lag(n, g - HALF, eta)]) * pre, [eta]) for n in range(N_EXPLICIT + 1)]
    return xi, ps


def jacobi_data(g, h, D):
    jac = lambda n, al, be: sp.expand(sp.jacobi(n, al, be, eta))
    mi = sum(1 for _, t in D if t == "I")
    mii = len(D) - mi

    def u(d, t):
        if t == "I":
            return (1 + eta) ** (HALF - h) * jac(d, g - HALF, HALF - h)
        return (1 - eta) ** (HALF - g) * jac(d, HALF - g, h - HALF)

    pre = (1 + eta) ** (-mi * (HALF - h)) * (1 - eta) ** (-mii * (HALF - g))
    us = [u(d, t) for d, t in D]
    fs = [1 + eta, 1 - eta]
    xi = polynomial_part(wronskian(us) * pre, fs)
    ps = [polynomial_part(wronskian(us + [jac(n, g - HALF, h - HALF)]) * pre, fs) for n in range(N_EXPLICIT + 1)]
    return xi, ps


def wilson_data(a):
    """Wilson polynomials in eta = v^2 and H = V(T_1 - 1) + V*(T_-1 - 1),
    T_s: v -> v - s i."""
    b1 = sum(a)
    ps = []
    for n in range(N_EXPLICIT + 1):
        tot = 0
        for k in range(n + 1):
            num = sp.rf(-n, k) * sp.rf(n + b1 - 1, k)
            prod = 1
            for j in range(k):
                prod *= (a[0] + j) ** 2 + eta
            den = sp.rf(a[0] + a[1], k) * sp.rf(a[0] + a[2], k) * sp.rf(a[0] + a[3], k) * sp.factorial(k)
            tot += num / den * prod
        ps.append(sp.expand(tot))
    V = sp.Mul(*[aj + sp.I * v for aj in a]) / (2 * sp.I * v * (2 * sp.I * v + 1))
    Vs = sp.Mul(*[aj - sp.I * v for aj in a]) / (-2 * sp.I * v * (-2 * sp.I * v + 1))
    # eigen-check in sympy before emitting
    for n in range(4):
        p = ps[n].subs(eta, v**2)
        hp = V * (p.subs(v, v - sp.I) - p) + Vs * (p.subs(v, v + sp.I) - p)
        assert sp.simplify(hp - n * (n + b1 - 1) * p) == 0, n
    terms = []
    for s, f in ((1, V), (-1, Vs), (0, -(V + Vs))):
        num, den = sp.fraction(sp.cancel(sp.together(f)))
        terms.append({"shift": s, "num": gauss_coeffs(num, v), "den": gauss_coeffs(den, v)})
    return ps, {"kind": "wilson", "terms": terms}


def askey_wilson_data(a, q):
    """Askey-Wilson polynomials in eta = (v + 1/v)/2 and
    H = V(v)(T_1 - 1) + V(1/v)(T_-1 - 1), T_s: v -> q^s v."""
    b4 = a[0] * a[1] * a[2] * a[3]
    ps = []
    z = v
    for n in range(N_EXPLICIT + 1):
        tot = 0
        for k in range(n + 1):
            num = qp(q ** (-n), q, k) * qp(b4 * q ** (n - 1), q, k)
            prod = 1
            for j in range(k):
                prod *= 1 - 2 * a[0] * q**j * eta + a[0] ** 2 * q ** (2 * j)
            den = qp(a[0] * a[1], q, k) * qp(a[0] * a[2], q, k) * qp(a[0] * a[3], q, k) * qp(q, q, k)
            tot += num / den * q**k * prod
        ps.append(sp.expand(tot))
    V = sp.Mul(*[1 - aj * z for aj in a]) / ((1 - z**2) * (1 - q * z**2))
    Vi = V.subs(z, 1 / z)
    for n in range(4):
        p = ps[n].subs(eta, (z + 1 / z) / 2)
        hp = V * (p.subs(z, q * z) - p) + Vi * (p.subs(z, z / q) - p)
        e = (q ** (-n) - 1) * (1 - b4 * q ** (n - 1))
        assert sp.simplify(hp - e * p) == 0, n
    terms = []
    for s, f in ((1, V), (-1, Vi), (0, -(V + Vi))):
        num, den = sp.fraction(sp.cancel(sp.together(f)))
        terms.append({"shift": s, "num": coeffs(num, v), "den": coeffs(den, v)})
    return ps, {"kind": "askey-wilson", "terms": terms}


def entry(family, params, D, xi, ps, hamiltonian=None, x=None):
    out = {
        "family": family,
        "parameters": {k: rat(val) for k, val in params.items()},
        "D": [{"d": d, "type": t} for d, t in D],
        "xi": coeffs(xi),
        "P": {"explicit": [coeffs(p) for p in ps]},
    }
    if hamiltonian is not None:
        out["hamiltonian"] = hamiltonian
    if x is not None:
        out["x"] = coeffs(x)
    return out


def main(outdir, only=None):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    g = sp.Rational(17, 3)
    want = lambda fam: only is None or only == fam
    lag_rows = [] if not want("L") else ["2I", "2II", "1I,2I", "1II,2II", "3I", "3II", "1I,3I", "1II,3II", "1I,2I,3I", "1II,2II,3II", "1I,1II"]
    for key in lag_rows:
        D = [(int(s[:-2]), "II") if s.endswith("II") else (int(s[:-1]), "I") for s in key.split(",")]
        xi, ps = laguerre_data(g, D)
        name = "L_" + key.replace(",", "_") + ".json"
        (out / name).write_text(json.dumps(entry("L", {"g": g}, D, xi, ps), indent=1) + "\n")
    gj, hj = sp.Rational(11, 2), sp.Rational(13, 3)
    for key in ["2I", "2II", "1I,2I", "1II,2II"] if want("J") else []:
        D = [(int(s[:-2]), "II") if s.endswith("II") else (int(s[:-1]), "I") for s in key.split(",")]
        xi, ps = jacobi_data(gj, hj, D)
        name = "J_" + key.replace(",", "_") + ".json"
        (out / name).write_text(json.dumps(entry("J", {"g": gj, "h": hj}, D, xi, ps), indent=1) + "\n")
    if only == "J2":
        # second sample for the row whose printed form needs an independent check
        D = [(1, "I"), (2, "I")]
        g2, h2 = sp.Rational(23, 4), sp.Rational(9, 2)
        xi, ps = jacobi_data(g2, h2, D)
        (out / "J_1I_2I_alt.json").write_text(json.dumps(entry("J", {"g": g2, "h": h2}, D, xi, ps), indent=1) + "\n")
    if want("W"):
        aw = [sp.Rational(1, 2), sp.Rational(2, 3), sp.Rational(3, 4), sp.Rational(5, 4)]
        ps, ham = wilson_data(aw)
        params = {f"a{i + 1}": aw[i] for i in range(4)}
        (out / "W_classical.json").write_text(json.dumps(entry("W", params, [], 1, ps, ham, eta), indent=1) + "\n")
    if want("AW"):
        aa = [sp.Rational(1, 2), sp.Rational(1, 3), sp.Rational(-1, 4), sp.Rational(2, 5)]
        q = sp.Rational(1, 4)
        ps, ham = askey_wilson_data(aa, q)
        params = {f"a{i + 1}": aa[i] for i in range(4)}
        params["q"] = q
        (out / "AW_classical.json").write_text(json.dumps(entry("AW", params, [], 1, ps, ham, eta), indent=1) + "\n")

if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/fixtures", sys.argv[2] if len(sys.argv) > 2 else None)
