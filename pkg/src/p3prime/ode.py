"""Independent numerical integration of P-III' with root crossing.

The scalar right-hand side is 0/0-indeterminate at roots of lam, so blind
stepping across them is not trusted.  Instead, when |lam| falls below a
switching threshold the integrator stops, fits the local root expansion
(root location, slope switch, cubic coefficient) to the numerical data,
steps across the root analytically with that series, and resumes on the far
side.  The excluded zone is evaluated from the fitted series, so the
composite solution is smooth through every root and every root comes with a
crossing record.

Poles are not crossed: when |lam| exceeds a cap the integration stops on
that side and leaves a pole marker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, least_squares

from .equation import DomainError, EquationParams, RootAnchor, SignSwitch, rhs_scalar, third_derivative
from .series import DtSeries, assemble_lambda, run_scheme, series_eval, series_eval_derivative

_EPS_SWITCH_REL = 1e-4  # |lam| < this * |t| triggers the crossing protocol
# resume distance past the root: data at |dt| = eps cannot carry the cubic
# coefficient (sensitivity ~ err/(3*dt^2) would scramble it), so the far-side
# relaunch happens where the fitted series is still machine-accurate but the
# cubic term is numerically alive
_EPS_RESUME_REL = 1e-2
_POLE_CAP = 1e6
_FIT_ORDER = 5  # cubic-factor validity used by the crossing fit


class IntegrationError(RuntimeError):
    """The integrator failed; the message carries the location."""


@dataclass(frozen=True)
class RootInfo:
    """A detected root: location, slope switch, and (once extracted) the
    cubic coefficient lam'''(t0)/6 identifying the local solution family."""

    t0: float
    sgn: int
    lam3: float | None = None


@dataclass(frozen=True)
class CrossingRecord:
    """Local series model used to step across one root."""

    t0: float
    sgn: int
    lam3: float
    zone: tuple  # (lo, hi) excluded from numerical data
    series: DtSeries  # assembled lam expansion anchored at t0


@dataclass
class DenseSolution:
    """Piecewise dense P-III' solution: solver segments plus crossing zones."""

    params: EquationParams
    rel_tol: float
    abs_tol: float
    segments: list = field(default_factory=list)  # (lo, hi, scipy OdeSolution)
    crossings: list = field(default_factory=list)
    pole_markers: list = field(default_factory=list)  # (t, side) where |lam| hit the cap

    @property
    def t_min(self) -> float:
        return min(lo for lo, _, _ in self.segments)

    @property
    def t_max(self) -> float:
        return max(hi for _, hi, _ in self.segments)

    def covers(self, t: float) -> bool:
        if any(lo <= t <= hi for lo, hi, _ in self.segments):
            return True
        return any(c.zone[0] <= t <= c.zone[1] for c in self.crossings)

    def _locate(self, t: float):
        for c in self.crossings:
            if c.zone[0] <= t <= c.zone[1]:
                return c
        best = None
        for lo, hi, seg in self.segments:
            if lo <= t <= hi:
                return seg
            gap = min(abs(t - lo), abs(t - hi))
            if best is None or gap < best[0]:
                best = (gap, seg)
        if best is not None and best[0] < 1e-9 * max(1.0, abs(t)):
            return best[1]
        raise DomainError(f"t={t} outside the computed span")

    def state(self, t: float) -> tuple[float, float]:
        """(lam, lam') at t."""
        obj = self._locate(t)
        if isinstance(obj, CrossingRecord):
            dt = t - obj.t0
            return (
                series_eval(obj.series, dt),
                series_eval_derivative(obj.series, dt),
            )
        y = obj(t)
        return float(y[0]), float(y[1])

    def lam(self, t: float) -> float:
        return self.state(t)[0]

    def lam_dot(self, t: float) -> float:
        return self.state(t)[1]

    def mesh_nodes(self) -> np.ndarray:
        """Accepted-step abscissae of all segments, sorted."""
        ts = np.concatenate([seg.ts for _, _, seg in self.segments])
        return np.unique(ts)


def _fit_crossing(p, sgn, pts):
    """Fit (t0, lam3) of the local root expansion to (t, lam, lam') samples."""
    t_s, lam_s, lamdot_s = pts[0]
    t0_guess = t_s - lam_s / lamdot_s
    lam3_guess = 0.0
    if len(pts) > 1:
        t_w, lam_w, lamdot_w = pts[1]
        if lam_w != 0:
            try:
                lam3_guess = third_derivative(t_w, lam_w, lamdot_w, p) / 6
            except DomainError:
                lam3_guess = 0.0

    def residuals(x):
        t0, L = x
        if t0 == 0:
            return [1e6] * (2 * len(pts))
        a = RootAnchor(t0, SignSwitch(sgn), L)
        lam3s, _ = run_scheme(a, p, _FIT_ORDER)
        lam = assemble_lambda(a, lam3s, p)
        out = []
        for t, lv, ld in pts:
            out.append(series_eval(lam, t - t0) - lv)
            out.append(series_eval_derivative(lam, t - t0) - ld)
        return out

    res = least_squares(
        residuals, [t0_guess, lam3_guess], xtol=1e-15, ftol=1e-15, gtol=1e-15, method="lm"
    )
    return float(res.x[0]), float(res.x[1])


def _crossing_from_stop(p, inner, t_s, t_prev_cov) -> CrossingRecord:
    """Build the crossing record from the near-side stop point t_s; the fit
    also uses a window point further back in the already covered interval so
    the cubic coefficient is conditioned on O(0.05*t0) data, not O(eps)."""
    lam_s, lamdot_s = inner(t_s)
    sgn = 1 if lamdot_s > 0 else -1
    t0_est = t_s - lam_s / lamdot_s
    pts = [(t_s, lam_s, lamdot_s)]
    toward_covered = math.copysign(1.0, t_prev_cov - t_s) if t_prev_cov != t_s else 0.0
    if toward_covered != 0.0:
        t_w = t0_est + toward_covered * 0.05 * abs(t0_est)
        lo, hi = min(t_prev_cov, t_s), max(t_prev_cov, t_s)
        t_w = min(max(t_w, lo), hi)
        if abs(t_w - t_s) > 10 * _EPS_SWITCH_REL * abs(t0_est):
            lam_w, lamdot_w = inner(t_w)
            pts.append((t_w, lam_w, lamdot_w))
    t0_fit, lam3_fit = _fit_crossing(p, sgn, pts)
    a = RootAnchor(t0_fit, SignSwitch(sgn), lam3_fit)
    lam3s, _ = run_scheme(a, p, _FIT_ORDER)
    series = assemble_lambda(a, lam3s, p)
    return CrossingRecord(t0_fit, sgn, lam3_fit, (0.0, 0.0), series)


def integrate(
    p: EquationParams,
    t_init: float,
    lam0: float,
    lamdot0: float,
    span: tuple,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
) -> DenseSolution:
    """Adaptive RK 5(4) integration of P-III' over ``span`` from Cauchy data
    at ``t_init``, with dense output, series-based root crossing and a pole
    cap; integrates in both directions from t_init."""
    lo, hi = min(span), max(span)
    if not (lo <= t_init <= hi):
        raise DomainError("t_init must lie inside span")
    if lo <= 0.0 <= hi:
        raise DomainError("span must not contain t = 0")
    if lam0 == 0:
        raise DomainError("initial lambda must be nonzero (launch off the root)")

    sol = DenseSolution(params=p, rel_tol=rel_tol, abs_tol=abs_tol)

    def rhs(t, y):
        lam, lamdot = y
        return (lamdot, rhs_scalar(t, lam, lamdot, p))

    def ev_zero(t, y):
        return y[0]

    ev_zero.terminal = True

    def ev_near(t, y):
        return abs(y[0]) - _EPS_SWITCH_REL * abs(t)

    ev_near.terminal = True
    ev_near.direction = -1

    def ev_pole(t, y):
        return abs(y[0]) - _POLE_CAP

    ev_pole.terminal = True
    ev_pole.direction = 1

    def sweep(t_start, y_start, t_end):
        t_cur, y_cur = t_start, list(y_start)
        direction = 1.0 if t_end > t_start else -1.0
        while (t_end - t_cur) * direction > 0:
            res = solve_ivp(
                rhs,
                (t_cur, t_end),
                y_cur,
                method="RK45",
                rtol=rel_tol,
                atol=abs_tol,
                dense_output=True,
                events=[ev_zero, ev_near, ev_pole],
            )
            if res.status == -1:
                raise IntegrationError(f"integration failed near t={res.t[-1]}: {res.message}")
            seg = res.sol
            seg.ts = res.t
            seg_lo, seg_hi = min(t_cur, res.t[-1]), max(t_cur, res.t[-1])

            if res.status == 0:  # reached t_end
                sol.segments.append((seg_lo, seg_hi, seg))
                return
            hit_zero = len(res.t_events[0]) > 0
            hit_near = len(res.t_events[1]) > 0
            hit_pole = len(res.t_events[2]) > 0
            if hit_pole:
                t_e = float(res.t_events[2][0])
                sol.segments.append((min(t_cur, t_e), max(t_cur, t_e), seg))
                sol.pole_markers.append((t_e, "right" if direction > 0 else "left"))
                return
            t_e = float((res.t_events[0][0] if hit_zero else res.t_events[1][0]))
            # near-side point with |lam| equal to the switching threshold
            if hit_zero and not hit_near:
                g = lambda t: abs(seg(t)[0]) - _EPS_SWITCH_REL * abs(t)
                t_back = t_cur
                for tm in reversed([t for t in res.t if (t_e - t) * direction > 0]):
                    if g(tm) > 0:
                        t_back = tm
                        break
                t_s = brentq(g, t_back, t_e, xtol=1e-15 * max(1.0, abs(t_e)))
            else:
                t_s = t_e
            seg_lo, seg_hi = min(t_cur, t_s), max(t_cur, t_s)
            sol.segments.append((seg_lo, seg_hi, seg))

            inner = lambda t: (float(seg(t)[0]), float(seg(t)[1]))
            crossing = _crossing_from_stop(p, inner, t_s, t_cur)
            z = _EPS_RESUME_REL * abs(crossing.t0)
            t_r = crossing.t0 + direction * z
            zone = (min(t_s, t_r), max(t_s, t_r))
            sol.crossings.append(
                CrossingRecord(crossing.t0, crossing.sgn, crossing.lam3, zone, crossing.series)
            )
            if (t_end - t_r) * direction <= 0:
                return
            dt_r = t_r - crossing.t0
            y_cur = [
                series_eval(crossing.series, dt_r),
                series_eval_derivative(crossing.series, dt_r),
            ]
            t_cur = t_r

    if hi > t_init:
        sweep(t_init, (lam0, lamdot0), hi)
    if lo < t_init:
        sweep(t_init, (lam0, lamdot0), lo)
    sol.segments.sort(key=lambda s: s[0])
    sol.crossings.sort(key=lambda c: c.t0)
    return sol


def integrate_hamiltonian(
    p: EquationParams,
    s: SignSwitch,
    t_init: float,
    lam0: float,
    mu0: float,
    span: tuple,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
):
    """Plain dense integration of the coupled Hamilton system (lam, mu) for
    one fixed sign switch; no root crossing (mu is regular at matching-sign
    roots).  Returns the scipy result object with dense output."""
    from .equation import hamilton_rhs, PhasePoint

    def rhs(t, y):
        return hamilton_rhs(PhasePoint(t, y[0], y[1]), p, s)

    res = solve_ivp(
        rhs, span, [lam0, mu0], method="RK45", rtol=rel_tol, atol=abs_tol, dense_output=True
    )
    if res.status != 0:
        raise IntegrationError(f"Hamiltonian integration failed near t={res.t[-1]}: {res.message}")
    return res


def root_slope(sol: DenseSolution, t0: float) -> float:
    """lam'(t0) measured from the numerical data just outside the excluded
    zone (Richardson-extrapolated central average), not from the fitted
    series; used to validate unit slope at roots."""
    d = 4 * _EPS_RESUME_REL * abs(t0)
    s1 = 0.5 * (sol.lam_dot(t0 + d) + sol.lam_dot(t0 - d))
    s2 = 0.5 * (sol.lam_dot(t0 + d / 2) + sol.lam_dot(t0 - d / 2))
    return (4 * s2 - s1) / 3


def find_roots(sol: DenseSolution) -> list[RootInfo]:
    """All roots of lam in the computed span, from the crossing records plus
    a sign-change scan of the accepted mesh (bisection-refined; the scan is
    a safety net and is normally empty)."""
    roots = [RootInfo(c.t0, c.sgn) for c in sol.crossings]
    ts = sol.mesh_nodes()
    vals = np.array([sol.lam(t) for t in ts])
    for i in range(len(ts) - 1):
        if vals[i] == 0.0 or vals[i] * vals[i + 1] >= 0:
            continue
        lo, hi = ts[i], ts[i + 1]
        if any(c.zone[0] <= 0.5 * (lo + hi) <= c.zone[1] for c in sol.crossings):
            continue
        r = brentq(sol.lam, lo, hi, xtol=1e-14 * max(1.0, abs(hi)))
        if all(abs(r - q.t0) > 1e-8 * max(1.0, abs(r)) for q in roots):
            roots.append(RootInfo(float(r), 1 if sol.lam_dot(r) > 0 else -1))
    return sorted(roots, key=lambda r: r.t0)


def lam3_at_root(sol: DenseSolution, root: RootInfo, p: EquationParams) -> float:
    """Cubic coefficient lam'''(t0)/6 extracted from the numerical solution.

    The third derivative is evaluated through its closed form at accepted
    mesh nodes inside a symmetric window around the root, nodes with |lam|
    below an exclusion threshold are dropped (the formula is indeterminate
    at the root itself), a degree-4 polynomial is least-squares fitted and
    read off at the root.
    """
    t0 = root.t0
    w = 0.1 * abs(t0)
    excl = 1e-3 * max(1.0, abs(t0))
    nodes = [t for t in sol.mesh_nodes() if abs(t - t0) <= w and sol.covers(t)]
    kept = []
    for t in nodes:
        lam, lamdot = sol.state(t)
        if abs(lam) > excl:
            kept.append((t, lam, lamdot))
    # spread up to 41 nodes across the window; clustering next to the root
    # would expose the formula's 0/0 conditioning instead of averaging it out
    if len(kept) > 41:
        idx = np.unique(np.linspace(0, len(kept) - 1, 41).astype(int))
        kept = [kept[i] for i in idx]
    if len(kept) < 10:
        raise DomainError(f"only {len(kept)} usable nodes in the window around t0={t0}")
    x = np.array([t - t0 for t, _, _ in kept])
    y = np.array([third_derivative(t, lam, lamdot, p) for t, lam, lamdot in kept])
    coeffs = np.polynomial.polynomial.polyfit(x, y, 4)
    return float(coeffs[0]) / 6


def residual_scan(sol: DenseSolution, grid, fd_step: float) -> list[tuple[float, float]]:
    """Central-finite-difference lam'' minus the scalar right-hand side at
    each grid point, using interpolated values."""
    out = []
    for t in grid:
        lam, lamdot = sol.state(t)
        if lam == 0:
            raise DomainError(f"grid point t={t} sits on a root")
        lp = sol.lam(t + fd_step)
        lm = sol.lam(t - fd_step)
        fd2 = (lp - 2 * lam + lm) / fd_step**2
        out.append((float(t), fd2 - rhs_scalar(t, lam, lamdot, sol.params)))
    return out


def compare_series(sol: DenseSolution, lam_series: DtSeries, window: tuple, n: int = 1000) -> float:
    """Max |series - interpolant| over a dense grid in the window."""
    t0 = lam_series.anchor.t0
    lo, hi = min(window), max(window)
    grid = np.linspace(lo, hi, n)
    dev = 0.0
    for t in grid:
        dev = max(dev, abs(series_eval(lam_series, t - t0) - sol.lam(float(t))))
    return dev


def symmetry_check(sol: DenseSolution, p: EquationParams, grid) -> float:
    """Integrate the parameter-swapped equation from t/lam initial data and
    return max |t/lam(t) - lam_swapped(t)| over the grid."""
    grid = [float(t) for t in grid]
    for t in grid:
        if abs(sol.lam(t)) < 1e-6 * max(1.0, abs(t)):
            raise DomainError(f"grid point t={t} too close to a zero of lambda")
    t_a = grid[len(grid) // 2]
    lam_a, lamdot_a = sol.state(t_a)
    g0 = t_a / lam_a
    g0dot = (lam_a - t_a * lamdot_a) / lam_a**2
    swapped = integrate(
        p.swapped(), t_a, g0, g0dot, (min(grid), max(grid)), sol.rel_tol, sol.abs_tol
    )
    dev = 0.0
    for t in grid:
        dev = max(dev, abs(t / sol.lam(t) - swapped.lam(t)))
    return dev
