"""Laurent expansions at simple poles via the lam -> t/lam symmetry.

P-III' is invariant under replacing lam(t) by t/lam(t) while swapping chi0
and chi_inf.  A root expansion of the swapped equation therefore maps to a
simple-pole expansion of the original one with residue sgn*t0; the free
parameter of a pole family is kept as the swapped-problem cubic coefficient
lam3, with the regular part's slope d1 derived from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _poly
from .equation import DomainError, EquationParams, RootAnchor
from .series import DtSeries, assemble_lambda, run_scheme


@dataclass(frozen=True)
class LaurentExpansion:
    """Simple-pole local model: residue/dt + sum_k d_k dt^k at t0 != 0."""

    t0: float
    residue: float
    regular_coeffs: tuple
    valid_order: int

    def __post_init__(self):
        object.__setattr__(self, "regular_coeffs", tuple(float(c) for c in self.regular_coeffs))
        if self.t0 == 0:
            raise ValueError("pole location t0 must be nonzero")
        if len(self.regular_coeffs) < self.valid_order + 1:
            raise ValueError("regular_coeffs must reach valid_order")

    def trusted(self) -> list:
        return list(self.regular_coeffs[: self.valid_order + 1])

    def eval(self, dt: float) -> float:
        if dt == 0:
            raise DomainError("dt = 0 is the pole itself")
        return self.residue / dt + _poly.peval(self.trusted(), dt)

    def eval_derivative(self, dt: float, order: int = 1) -> float:
        if dt == 0:
            raise DomainError("dt = 0 is the pole itself")
        c = self.trusted()
        for _ in range(order):
            c = _poly.pder(c)
        sign = -1 if order % 2 else 1
        return sign * math.factorial(order) * self.residue / dt ** (order + 1) + _poly.peval(c, dt)


def series_reciprocal_times_t(lam_root: DtSeries) -> LaurentExpansion:
    """Exact truncated (t0 + dt)/lam_root for a simple-root series.

    Writes lam_root = dt*u with u(0) = +-1, inverts u as a truncated series
    and multiplies by t0 + dt; the simple-root validity V yields regular
    part validity V - 2.
    """
    c = lam_root.trusted()
    if len(c) < 2 or c[0] != 0.0 or abs(c[1]) != 1.0:
        raise DomainError("not a simple-root series: need c0 = 0 and |c1| = 1")
    if lam_root.valid_order < 2:
        raise DomainError("need validity >= 2 to form the regular part")
    t0 = lam_root.anchor.t0
    n = lam_root.valid_order - 1
    u = c[1:]
    inv_u = _poly.precip(u, n)
    e = _poly.padd(_poly.pscale(inv_u, t0), _poly.pshift(inv_u, 1))
    return LaurentExpansion(t0, e[0], _poly.ptrim(e[1:], n - 1), n - 1)


def root_to_pole(a: RootAnchor, p: EquationParams, order: int) -> LaurentExpansion:
    """Pole expansion of the (chi0, chi_inf) equation from the swapped-parameter
    root expansion anchored at ``a`` (a.lam3 is the swapped-problem value)."""
    if order < 0:
        raise ValueError("order must be >= 0")
    lam3, _ = run_scheme(a, p.swapped(), max(order - 1, 0))
    lam_root = assemble_lambda(a, lam3, p.swapped())
    le = series_reciprocal_times_t(lam_root)
    return LaurentExpansion(le.t0, le.residue, _poly.ptrim(le.trusted(), order), min(le.valid_order, order))


def pole_to_root_series(le: LaurentExpansion, a: RootAnchor) -> DtSeries:
    """Inverse map: (t0 + dt)/laurent as a simple-root series (involution)."""
    v = [le.residue] + le.trusted()
    n = le.valid_order + 1
    inv_v = _poly.precip(v, n)
    e = _poly.padd(_poly.pscale(inv_v, le.t0), _poly.pshift(inv_v, 1))
    return DtSeries(a, _poly.pshift(_poly.ptrim(e, n), 1), n + 1)


def pole_b5_reference(a: RootAnchor, p: EquationParams) -> LaurentExpansion:
    """Hand-transcribed closed-form pole expansion through dt^4 (the
    independent oracle for ``root_to_pole``); a.lam3 is the swapped-problem
    cubic coefficient."""
    sg, t0, L = a.s, a.t0, a.lam3
    chi0, chinf = p.chi0, p.chi_inf
    d0 = (sg + chinf) / 2
    d1 = -(sg * (1 - chinf**2) / (4 * t0) + t0 * L)
    d2 = ((sg - chinf) * (1 - chinf**2) / (2 * t0) + chi0 + (2 - 3 * sg * chinf) * t0 * L) / (4 * t0)
    d3 = -(
        sg
        + (3 - 2 * sg * chinf) / (2 * t0) * chi0
        + 5 * (sg * (1 + chinf**2) - 2 * chinf) * (1 - chinf**2) / (8 * t0**2)
        + (1 - 5 * (3 * sg - 2 * chinf) * chinf / 2) * L
        - 7 * sg * t0**2 * L**2
    ) / (10 * t0)
    d4 = (
        7 * sg / 9
        + 5 * (1 - chinf**2) * (sg * (1 + 3 * chinf**2) - (3 + chinf**2) * chinf) / (8 * t0**2)
        + (47 + 45 * chinf**2 - 88 * sg * chinf) * chi0 / (36 * t0)
        - ((2 - 15 * chinf**2) + 5 * sg * (7 + 5 * chinf**2) * chinf / 4 + 5 * sg * t0 * chi0) * L
        - 3 * (7 * sg - 5 * chinf) * t0**2 * L**2
    ) / (20 * t0**2)
    return LaurentExpansion(t0, sg * t0, (d0, d1, d2, d3, d4), 4)


# ---------------------------------------------------------------------------
# residual order at a pole


def _laurent_residual_coeffs(le: LaurentExpansion, p: EquationParams, work_order: int):
    """Coefficients of dt^4 * (lam'' - RHS) for a truncated pole expansion,
    plus a parallel magnitude scale (sum of term magnitudes per order) that
    tells genuine leading coefficients apart from rounding dust left by
    orders cancelling identically."""
    W = work_order + 3
    f = _poly.ptrim([le.residue] + le.trusted(), W)  # lam = f(dt)/dt
    fd = _poly.pder(f)
    g = _poly.padd(_poly.pshift(fd, 1), _poly.pscale(f, -1.0))  # lam' = g/dt^2
    gd = _poly.pder(g)
    h = _poly.padd(_poly.pshift(gd, 1), _poly.pscale(g, -2.0))  # lam'' = h/dt^3
    inv_f = _poly.precip(f, W)
    inv_t = _poly.pinv_t(le.t0, W)
    inv_t2 = _poly.pmul(inv_t, inv_t, cap=W)
    f2 = _poly.pmul(f, f, cap=W)
    f3 = _poly.pmul(f2, f, cap=W)
    # each term is dt^4 times the corresponding piece of lam'' - RHS
    terms = [
        _poly.pshift(_poly.ptrim(h, W - 1), 1),
        _poly.pscale(_poly.pshift(_poly.pmul(_poly.pmul(g, g, cap=W), inv_f, cap=W - 1), 1), -1.0),
        _poly.pshift(_poly.pmul(g, inv_t, cap=W - 2), 2),
        _poly.pscale(_poly.pshift(_poly.pmul(f2, inv_t2, cap=W - 2), 2), p.chi_inf),
        _poly.pscale(_poly.pshift(_poly.pmul(f3, inv_t2, cap=W - 1), 1), -1.0),
        _poly.pscale(_poly.pshift(inv_t, 4), -p.chi0),
        _poly.pshift(inv_f, 5),
    ]
    r4 = [0.0] * (W + 1)
    scale4 = [0.0] * (W + 1)
    for t in terms:
        for k, c in enumerate(_poly.ptrim(t, W)):
            r4[k] += c
            scale4[k] += abs(c)
    return r4, scale4


_DUST_RTOL = 1e-8


def pole_residual_order(le: LaurentExpansion, p: EquationParams, dt_grid) -> float:
    """Log-log slope of the equation residual of a truncated pole expansion.

    The residual is expanded as a Laurent series; orders that cancel
    identically leave only rounding dust, detected against a magnitude
    scale, and evaluation starts from the first genuine order."""
    grid = [float(x) for x in dt_grid]
    if len(grid) < 4 or any(x == 0 for x in grid):
        raise DomainError("degenerate grid: need >= 4 nonzero dt values")
    W = max(40, 3 * (le.valid_order + 3))
    r4, scale4 = _laurent_residual_coeffs(le, p, W)
    m = None
    for k, (rk, sk) in enumerate(zip(r4, scale4)):
        if abs(rk) > _DUST_RTOL * max(1.0, sk):
            m = k
            break
    if m is None:
        raise DomainError("residual vanishes to working precision")
    tail = r4[m:]
    xs, ys = [], []
    for dt in grid:
        val = _poly.peval(tail, dt) * dt ** (m - 4)
        if val != 0.0:
            xs.append(math.log(abs(dt)))
            ys.append(math.log(abs(val)))
    n = len(xs)
    xbar, ybar = sum(xs) / n, sum(ys) / n
    num = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    den = sum((x - xbar) ** 2 for x in xs)
    return num / den
