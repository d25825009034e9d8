"""Independent symbolic oracle for the analytic SIM expansions.

Derives h0, h1, h2 by order-by-order matching of the invariance equation
and checks them against the hand-coded closed forms used by the library.
Also checks that the one-iteration CSP closed forms are roots of the
generic CSP condition f + eps * (df/dx)^-1 (df/dy) g = 0.

Run: python3 tests/oracles/closed_forms.py
"""
import sympy as sp

eps = sp.Symbol("eps", positive=True)


def ie_expand(f, g, x, ys, h0_guess=None, order=2):
    """Solve f(h) - eps * grad h . g(h) = 0 order by order for h = sum eps^k h_k."""
    hs = []
    h0 = sp.solve(sp.Eq(f.subs(eps, 0), 0), x)
    assert len(h0) == 1, h0
    hs.append(sp.simplify(h0[0]))
    for k in range(1, order + 1):
        hk = sp.Symbol("hk")
        h = sum(eps**i * hs[i] for i in range(k)) + eps**k * hk
        grad = [sp.diff(sum(eps**i * hs[i] for i in range(k)), yv) for yv in ys]
        res = f.subs(x, h) - eps * sum(gi * gr for gi, gr in zip([gg.subs(x, h) for gg in g], grad))
        coeff = sp.series(res, eps, 0, k + 1).removeO().coeff(eps, k)
        sol = sp.solve(sp.Eq(coeff, 0), hk)
        assert len(sol) == 1
        hs.append(sp.simplify(sol[0]))
    return hs


def check_zero(expr, name):
    d = sp.simplify(sp.together(expr))
    assert d == 0, f"{name}: residual {d}"
    print(f"ok  {name}")


# --- Michaelis-Menten -------------------------------------------------------
k, s, x, y = sp.symbols("kappa sigma x y", positive=True)
f = y - (k + y) / (k + 1) * x
g = (-(k + 1) * y + (k - s + y) * x) / s
h0, h1, h2 = ie_expand(f, [g], x, [y])
check_zero(h0 - (k + 1) * y / (k + y), "mm h0")
check_zero(h1 - k * (k + 1) ** 3 * y / (k + y) ** 4, "mm h1")
check_zero(h2 + k * (k + 1) ** 5 * y * (k**2 + 3 * s * y + k * (y - 2 * s)) / (s * (k + y) ** 7), "mm h2")
csp_mm = (s * (k + y) ** 2 + eps * (k + 1) ** 2 * (k - s + 2 * y)
          - sp.sqrt((eps * (k + 1) ** 2 * (k - s) + s * (k + y) ** 2) ** 2
                    + 4 * eps * (k + 1) ** 2 * s**2 * y * (k + y))) / (2 * eps * (k + 1) * (k - s + y))
csp_mm_stable = 2 * (k + 1) * y * (s * (k + y) + eps * (k + 1) ** 2) / (
    s * (k + y) ** 2 + eps * (k + 1) ** 2 * (k - s + 2 * y)
    + sp.sqrt((eps * (k + 1) ** 2 * (k - s) + s * (k + y) ** 2) ** 2 + 4 * eps * (k + 1) ** 2 * s**2 * y * (k + y)))
cond_mm = f + eps * (sp.diff(f, y) / sp.diff(f, x)) * g
vals = {k: 10, s: 100, y: sp.Rational(1, 2), eps: sp.Rational(1, 100)}
print("mm csp condition at closed form:", sp.N(cond_mm.subs(x, csp_mm).subs(vals), 30))
print("mm csp raw - stable:", sp.N((csp_mm - csp_mm_stable).subs(vals), 30))
print("mm csp1(y=0.5, eps=1e-2) =", sp.N(csp_mm_stable.subs(vals), 20))


def taylor_ratio(expr, h0, h1, vals, e):
    """(expr - h0 - e h1) / e^2 evaluated at high precision."""
    v = dict(vals)
    v[eps] = e
    return sp.N(((expr - h0 - eps * h1) / eps**2).subs(v), 30)


for e in [sp.Rational(1, 10**3), sp.Rational(1, 10**4), sp.Rational(1, 10**5)]:
    print("mm csp taylor ratio", e, taylor_ratio(csp_mm_stable, h0, h1, vals, e))

# --- TMDD -------------------------------------------------------------------
k1, k2, k3, k4, z = sp.symbols("k1 k2 k3 k4 z", positive=True)
f = -x * y + k1 * z + 1 - eps * k2 * x
g1 = k3 * (-x * y + k1 * z) - k4 * y
g2 = k2 * (x * y - k1 * z) - z
h0, h1, h2 = ie_expand(f, [g1, g2], x, [y, z])
check_zero(h0 - (1 + k1 * z) / y, "tmdd h0")
h1_printed = -(k3 * (1 + k1) * z + y * (k2 + k1 * k2 + k4 + k1 * z * (-1 + k2 + k4))) / y**3
h2_printed = (k3**2 * (k1 * z + 1) * (k1 * z + 4)
            + y**2 * ((k2 + k4) * (k2 + 2 * k4) + k1 * k2 * (3 * k2 + 4 * k4 - 1)
                      + k1 * (k2 + k4 - 1) * (k2 + 2 * k4 - 1) * z + k1**2 * k2 * (k2 + (k2 + k4 - 1) * z))
            + k3 * y * (6 * k4 + k1 * z * (7 * k4 + k1 * (-1 + k4) * z - 4)
                        + k2 * (4 + k1 * (5 + z * (5 + k1 * (2 + z)))))) / y**5
print("tmdd h1 derived:", sp.factor(h1))
print("tmdd h2 derived - printed:", sp.simplify(h2 - h2_printed))
print("tmdd h1 derived - printed:", sp.simplify(h1 - h1_printed))
h1_fixed = -(k3 * (1 + k1 * z) + y * (k2 + k1 * k2 + k4 + k1 * z * (-1 + k2 + k4))) / y**3
check_zero(h1 - h1_fixed, "tmdd h1 (k3(1+k1 z) form)")
tmdd_h0, tmdd_h1, tmdd_h2 = h0, h1_fixed, h2_printed

Q = (y + eps * k2) ** 2 + eps * (y * (k1 * k2 + k4) - k1 * k3 * z)
U = 4 * eps * k3 * y * (eps * k2 + y + k1 * z * (eps * (1 + k2 + k1 * k2) + y)) / Q**2
csp_tmdd = -Q / (2 * eps * k3 * y) * (1 - sp.sqrt(1 + U))
cond_tmdd = f + eps * (sp.diff(f, y) * g1 + sp.diff(f, z) * g2) / sp.diff(f, x)
tv = {k1: sp.Rational(1, 10**3) / sp.Rational(89, 10**4), k2: sp.Rational(89, 10**4) / sp.Rational(3, 10**3),
      k3: sp.Rational(11, 1), k4: sp.Rational(15, 10**4) / sp.Rational(3, 10**3),
      y: 1, z: 2, eps: sp.Rational(1, 100)}
print("tmdd csp condition at closed form:", sp.N(cond_tmdd.subs(x, csp_tmdd).subs(tv), 30))
for e in [sp.Rational(1, 10**3), sp.Rational(1, 10**4), sp.Rational(1, 10**5)]:
    print("tmdd csp taylor ratio (fixed h1)", e, taylor_ratio(csp_tmdd, tmdd_h0, tmdd_h1, tv, e))

# --- Sel'kov 3D ---------------------------------------------------------------
a, b, kk = sp.symbols("a b k", positive=True)
f = y**2 * z - kk * x * y
g1 = a * z + y**2 * z - y + eps * x
g2 = -a * z - y**2 * z + b
h0, h1, h2 = ie_expand(f, [g1, g2], x, [y, z])
check_zero(h0 - y * z / kk, "selkov h0")
check_zero(h1 - ((z - b) / kk**2 + z * (a + y**2) * (y - z) / (kk**2 * y)), "selkov h1")
h2_printed = (b * y * (-y * (1 + a + y**2) + 2 * (a + y**2) * z)
            + z * (a * y * (y + 2 * y**3 + z - 6 * y**2 * z) + a**2 * (y**2 - 2 * y * z - z**2)
                   + y**3 * (-2 * z + y * (3 + y**2 - 4 * y * z + z**2)))) / (kk**3 * y**3)
print("selkov h2 derived - printed:", sp.simplify(h2 - h2_printed))
P = y * z / kk + (y - z * (a + y**2)) / (2 * eps) + kk * y**2 / (2 * eps**2)
V = 4 * eps**2 * kk * y * (eps * b * y + z * (2 * eps * z * (a + y**2) - y * (kk * y + eps * (2 + a + y**2)))) / (
    kk * y * (kk * y + eps) + eps * z * (2 * eps * y - kk * (a + y**2))) ** 2
csp_sel = P * (1 - sp.sqrt(1 + V))
cond_sel = f + eps * (sp.diff(f, y) * g1 + sp.diff(f, z) * g2) / sp.diff(f, x)
sv = {a: sp.Rational(1, 10), b: sp.Rational(6, 10), kk: 1, y: sp.Rational(7, 10), z: sp.Rational(14, 10), eps: sp.Rational(1, 100)}
print("selkov csp condition at closed form:", sp.N(cond_sel.subs(x, csp_sel).subs(sv), 30))
for e in [sp.Rational(1, 10**3), sp.Rational(1, 10**4), sp.Rational(1, 10**5)]:
    print("selkov csp taylor ratio", e, taylor_ratio(csp_sel, h0, h1, sv, e))
