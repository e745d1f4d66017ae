"""Truncated power series in dt = t - t0 and the iterative integral scheme.

A solution vanishing at t0 is written as

    lam(t) = dt*sgn + dt^2*(sgn - chi0)/(2*t0) + dt^3 * L(t)

and the scheme constructs the cubic-factor series L (called ``lam3`` here,
its value at t0 is lam'''(t0)/6) together with the momentum series mu, by
alternating two integral-transform updates whose kernels are polynomial in
eta = sigma*dt.  Each series carries a validity order: the highest dt power
whose coefficient is trusted.  One update gains one order for mu per step as
long as the lam input is at most three orders behind, and one order for lam
per step as long as the mu input is not behind; four steps of each per round
therefore gain four orders, which is the staggering used by ``run_scheme``.

Series coefficients are IEEE doubles throughout; the closed-form degree-5
reference ``lam6_reference`` provides the independent oracle for the scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _poly
from .equation import DomainError, EquationParams, RootAnchor


class AnchorMismatchError(ValueError):
    """Two series built on different anchors were combined."""


@dataclass(frozen=True)
class DtSeries:
    """Truncated power series in dt = t - t0 with a tracked validity order.

    ``coeffs`` holds c0..cD; coefficients with index above ``valid_order``
    exist but are not trusted and every consumer in this module ignores them.
    """

    anchor: RootAnchor
    coeffs: tuple
    valid_order: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if self.valid_order < 0:
            raise ValueError("valid_order must be >= 0")
        if len(self.coeffs) < self.valid_order + 1:
            raise ValueError("coeffs must reach at least valid_order")

    def trusted(self) -> list:
        return list(self.coeffs[: self.valid_order + 1])

    def truncated(self, v: int) -> "DtSeries":
        if v > self.valid_order:
            raise ValueError("cannot extend validity by truncation")
        return DtSeries(self.anchor, self.coeffs[: v + 1], v)


@dataclass(frozen=True)
class SigmaDtPoly:
    """Bivariate polynomial in (sigma, dt): sparse map (sigma_pow, dt_pow) -> coeff."""

    terms: dict

    def __post_init__(self):
        object.__setattr__(
            self, "terms", {k: float(v) for k, v in self.terms.items() if v != 0.0}
        )

    def sigma_degree(self) -> int:
        return max((m for m, _ in self.terms), default=0)

    def dt_degree(self) -> int:
        return max((k for _, k in self.terms), default=0)

    def __add__(self, other: "SigmaDtPoly") -> "SigmaDtPoly":
        out = dict(self.terms)
        for key, v in other.terms.items():
            out[key] = out.get(key, 0.0) + v
        return SigmaDtPoly(out)

    def scaled(self, c: float) -> "SigmaDtPoly":
        return SigmaDtPoly({k: c * v for k, v in self.terms.items()})

    def sigma_shifted(self, m: int) -> "SigmaDtPoly":
        return SigmaDtPoly({(ms + m, k): v for (ms, k), v in self.terms.items()})

    def eval(self, sigma: float, dt: float) -> float:
        return sum(v * sigma**m * dt**k for (m, k), v in self.terms.items())


def _require_same_anchor(lam: DtSeries, mu: DtSeries) -> None:
    if lam.anchor != mu.anchor:
        raise AnchorMismatchError("lambda and mu series anchored at different roots")


def series_eval(s: DtSeries, dt: float) -> float:
    """Horner evaluation of the trusted coefficients 0..valid_order."""
    return _poly.peval(s.trusted(), dt)


def series_eval_derivative(s: DtSeries, dt: float, order: int = 1) -> float:
    """Evaluate an exact derivative of the trusted part of the series."""
    c = s.trusted()
    for _ in range(order):
        c = _poly.pder(c)
    return _poly.peval(c, dt)


def mu_at_root(a: RootAnchor, p: EquationParams) -> float:
    """Momentum value forced at the root: (1 + sgn(1-chi0^2)/(2 t0) + 3 t0 lam3)/2."""
    return 0.5 * (1 + a.s * (1 - p.chi0**2) / (2 * a.t0) + 3 * a.t0 * a.lam3)


def init_pair(a: RootAnchor, p: EquationParams) -> tuple[DtSeries, DtSeries]:
    """Starting data of the iteration: the explicit degree-5 lam polynomial
    and degree-1 mu polynomial produced by one pass of the refined updates on
    identically-zero input.  Both carry validity order 0; the higher terms
    are retained but untrusted.
    """
    sg, t0, L = a.s, a.t0, a.lam3
    chi0, chinf = p.chi0, p.chi_inf
    c = chinf + sg * chi0 - 1
    A = sg * (chi0**2 - 1) / (2 * t0) - 3 * t0 * L
    mu_c = [mu_at_root(a, p), -c / (2 * t0)]
    # lam1 in powers of the normalized deviation (t - t0)/t0, then rescaled
    q = [
        L,
        -chinf / (4 * t0),
        sg * (1 - (sg * chi0 * (chi0 - sg) / t0 - 3 * t0 * L) * A) / 10 + c * sg * chi0 / (10 * t0),
        -c * ((chi0 - sg) ** 2 / (4 * t0) + (chi0**2 - 1) / (3 * t0) - 2 * sg * t0 * L) / 6
        + (chi0 - sg) * (A**2 - 1) / 36,
        c * (chi0 - sg) * A / 28 - c**2 * sg / 28,
        c**2 * (chi0 - sg) / 80,
    ]
    lam_c = [q[k] / t0**k for k in range(6)]
    return DtSeries(a, lam_c, 0), DtSeries(a, mu_c, 0)


def _tau_subst(coeffs) -> list:
    """Series at the shifted argument tau = t0 + sigma*dt: c_k dt^k -> c_k eta^k.

    Returned as an eta-polynomial; callers reinterpret index k as the pair
    (sigma^k, dt^k).
    """
    return list(coeffs)


def _eta_poly_to_sigma_dt(eta_coeffs, extra_sigma: int = 0) -> SigmaDtPoly:
    return SigmaDtPoly({(k + extra_sigma, k): c for k, c in enumerate(eta_coeffs)})


def _kernel_mu_eta(lam_c, mu_c, a: RootAnchor, p: EquationParams) -> list:
    """mu-update kernel as an eta-polynomial:
    mu(tau) * (sgn*chi0 + 2*eta*(1 - mu(tau))*(sgn - eta*(chi0-sgn)/(2t0) + eta^2*lam(tau)))."""
    sg, t0, chi0 = a.s, a.t0, p.chi0
    lam_t, mu_t = _tau_subst(lam_c), _tau_subst(mu_c)
    inner = _poly.padd(
        _poly.padd([sg], _poly.pshift([-(chi0 - sg) / (2 * t0)], 1)), _poly.pshift(lam_t, 2)
    )
    one_minus_mu = _poly.padd([1.0], _poly.pscale(mu_t, -1.0))
    tail = _poly.pshift(_poly.pscale(_poly.pmul(one_minus_mu, inner), 2.0), 1)
    return _poly.pmul(mu_t, _poly.padd([sg * chi0], tail))


def _kernel_lambda_eta(lam_c, mu_c, a: RootAnchor, p: EquationParams) -> list:
    """lam-update kernel as an eta-polynomial."""
    sg, t0, chi0 = a.s, a.t0, p.chi0
    k0 = (chi0 - sg) / (2 * t0)
    lam_t, mu_t = _tau_subst(lam_c), _tau_subst(mu_c)
    two_mu_m1 = _poly.padd(_poly.pscale(mu_t, 2.0), [-1.0])
    head = _poly.padd([sg * (chi0**2 - 1) / (2 * t0) - 1], _poly.pscale(mu_t, 2.0))
    mid = _poly.pshift(
        _poly.pscale(
            _poly.padd(
                _poly.pscale(lam_t, chi0 - 2 * sg),
                _poly.pscale(two_mu_m1, (chi0 - sg) / t0),
            ),
            -sg,
        ),
        1,
    )
    sq = _poly.padd([k0], _poly.pscale(_poly.pshift(lam_t, 1), -1.0))
    tail = _poly.pshift(
        _poly.pmul(two_mu_m1, _poly.padd(_poly.pscale(lam_t, 2 * sg), _poly.pmul(sq, sq))), 2
    )
    return _poly.padd(_poly.padd(head, mid), tail)


def _kernel_xi_eta(lam_c, mu_c, a: RootAnchor, p: EquationParams) -> list:
    """Kernel of the root-ratio function xi as an eta-polynomial."""
    sg, t0, chi0 = a.s, a.t0, p.chi0
    k0 = (chi0 - sg) / (2 * t0)
    lam_t, mu_t = _tau_subst(lam_c), _tau_subst(mu_c)
    two_mu_m1 = _poly.padd(_poly.pscale(mu_t, 2.0), [-1.0])
    head = _poly.padd(
        _poly.padd([sg * 3 * (chi0 - sg)], _poly.pscale(mu_t, -8 * sg * chi0)),
        _poly.pscale(lam_t, -3 * sg * (chi0 - 2 * sg) * t0),
    )
    sq = _poly.padd([k0], _poly.pscale(_poly.pshift(lam_t, 1), -1.0))
    mid = _poly.pshift(
        _poly.pscale(
            _poly.pmul(two_mu_m1, _poly.padd(_poly.pscale(lam_t, 2 * sg), _poly.pmul(sq, sq))),
            3 * t0,
        ),
        1,
    )
    inner = _poly.padd(
        _poly.padd([sg], _poly.pshift([-(chi0 - sg) / (2 * t0)], 1)), _poly.pshift(lam_t, 2)
    )
    mu_mu_m1 = _poly.pmul(_poly.padd(mu_t, [-1.0]), mu_t)
    tail = _poly.pshift(_poly.pscale(_poly.pmul(mu_mu_m1, inner), 4.0), 1)
    return _poly.padd(_poly.padd(head, mid), tail)


def kernel_omega_lambda(lam: DtSeries, mu: DtSeries, a: RootAnchor, p: EquationParams) -> SigmaDtPoly:
    """Kernel of the lam update, expanded in (sigma, dt)."""
    _require_same_anchor(lam, mu)
    return _eta_poly_to_sigma_dt(_kernel_lambda_eta(lam.trusted(), mu.trusted(), a, p))


def kernel_omega_mu(lam: DtSeries, mu: DtSeries, a: RootAnchor, p: EquationParams) -> SigmaDtPoly:
    """Kernel of the mu update, expanded in (sigma, dt)."""
    _require_same_anchor(lam, mu)
    return _eta_poly_to_sigma_dt(_kernel_mu_eta(lam.trusted(), mu.trusted(), a, p))


def kernel_omega_xi(lam: DtSeries, mu: DtSeries, a: RootAnchor, p: EquationParams) -> SigmaDtPoly:
    """Kernel of the xi integral, expanded in (sigma, dt)."""
    _require_same_anchor(lam, mu)
    return _eta_poly_to_sigma_dt(_kernel_xi_eta(lam.trusted(), mu.trusted(), a, p))


def kernel_omega_lambda_hat(lam: DtSeries, mu: DtSeries, a: RootAnchor, p: EquationParams) -> SigmaDtPoly:
    """Kernel of the refined lam update: 2*Omega_mu + sigma^3*Omega_xi."""
    _require_same_anchor(lam, mu)
    return kernel_omega_mu(lam, mu, a, p).scaled(2.0) + kernel_omega_xi(lam, mu, a, p).sigma_shifted(3)


def sigma_average(q: SigmaDtPoly, extra_sigma_power: int = 0) -> list:
    """Exact integral over sigma in (0,1) of sigma**p * q, as dt coefficients.

    Each (sigma^m, dt^k) term contributes coeff/(m + p + 1) to dt^k.
    """
    if extra_sigma_power < 0:
        raise ValueError("extra_sigma_power must be >= 0")
    n = q.dt_degree()
    out = [0.0] * (n + 1)
    for (m, k), v in q.terms.items():
        out[k] += v / (m + extra_sigma_power + 1)
    return out


def _step_mu_raw(lam_c, mu_c, a: RootAnchor, p: EquationParams) -> list:
    sg, t0 = a.s, a.t0
    om = [c / (k + 1) for k, c in enumerate(_kernel_mu_eta(lam_c, mu_c, a, p))]
    inner = _poly.padd(
        _poly.padd([-0.5 * (p.chi_inf + sg * p.chi0 - 1)], _poly.pscale(mu_c, -1.0)), om
    )
    return _poly.padd([mu_at_root(a, p)], _poly.pshift(_poly.pscale(inner, 1 / t0), 1))


def _step_lambda_raw(lam_c, mu_c, a: RootAnchor, p: EquationParams) -> list:
    t0 = a.t0
    om = [c / (k + 3) for k, c in enumerate(_kernel_lambda_eta(lam_c, mu_c, a, p))]
    return _poly.padd(
        _poly.pshift(_poly.pscale(lam_c, -1 / t0), 1), _poly.pscale(om, 1 / t0)
    )


def step_mu(lam_in: DtSeries, mu_in: DtSeries, a: RootAnchor, p: EquationParams) -> DtSeries:
    """One mu update; output validity min(order(mu_in)+1, order(lam_in)+4)."""
    _require_same_anchor(lam_in, mu_in)
    v = min(mu_in.valid_order + 1, lam_in.valid_order + 4)
    out = _step_mu_raw(lam_in.trusted(), mu_in.trusted(), a, p)
    return DtSeries(a, _poly.ptrim(out, v), v)


def step_lambda(lam_in: DtSeries, mu_in: DtSeries, a: RootAnchor, p: EquationParams) -> DtSeries:
    """One lam update; output validity min(order(lam_in)+1, order(mu_in))."""
    _require_same_anchor(lam_in, mu_in)
    v = min(lam_in.valid_order + 1, mu_in.valid_order)
    out = _step_lambda_raw(lam_in.trusted(), mu_in.trusted(), a, p)
    return DtSeries(a, _poly.ptrim(out, v), v)


def step_lambda_refined(lam_in: DtSeries, mu_in: DtSeries, a: RootAnchor, p: EquationParams) -> DtSeries:
    """Refined lam update whose structure pins the value at the root exactly."""
    _require_same_anchor(lam_in, mu_in)
    sg, t0 = a.s, a.t0
    v = min(lam_in.valid_order + 1, mu_in.valid_order)
    mu_k = _kernel_mu_eta(lam_in.trusted(), mu_in.trusted(), a, p)
    xi_k = _kernel_xi_eta(lam_in.trusted(), mu_in.trusted(), a, p)
    om = _poly.padd(
        [2 * c / (k + 1) for k, c in enumerate(mu_k)],
        [c / (k + 4) for k, c in enumerate(xi_k)],
    )
    inner = _poly.padd(
        _poly.padd([(p.chi_inf + sg * p.chi0 - 1) / (4 * t0)], lam_in.trusted()),
        _poly.pscale(om, -1 / (3 * t0)),
    )
    out = _poly.padd([a.lam3], _poly.pshift(_poly.pscale(inner, -1 / t0), 1))
    return DtSeries(a, _poly.ptrim(out, v), v)


def xi_series(lam: DtSeries, mu: DtSeries, a: RootAnchor, p: EquationParams) -> DtSeries:
    """The regular ratio xi(t): divided difference of the root constraint.

    xi = -(1/t0)*((chi_inf + sgn*chi0 - 1)/4 + 2*mu - 3*t0*lam)
         - (1/t0) * integral_0^1 sigma^3 * Omega_xi dsigma.
    """
    _require_same_anchor(lam, mu)
    sg, t0 = a.s, a.t0
    v = min(lam.valid_order, mu.valid_order)
    xi_k = _kernel_xi_eta(lam.trusted(), mu.trusted(), a, p)
    om = [c / (k + 4) for k, c in enumerate(xi_k)]
    out = _poly.pscale(
        _poly.padd(
            _poly.padd(
                _poly.padd([(p.chi_inf + sg * p.chi0 - 1) / 4], _poly.pscale(mu.trusted(), 2.0)),
                _poly.pscale(lam.trusted(), -3 * t0),
            ),
            om,
        ),
        -1 / t0,
    )
    return DtSeries(a, _poly.ptrim(out, v), v)


def run_scheme(a: RootAnchor, p: EquationParams, target_order: int) -> tuple[DtSeries, DtSeries]:
    """Iterate macro-rounds of four mu steps then four lam steps until the
    cubic-factor series is valid to ``target_order``; returns both series
    truncated to that validity.  Deterministic; each round gains 4 orders.
    """
    if target_order < 0:
        raise ValueError("target_order must be >= 0")
    lam, mu = init_pair(a, p)
    lam, mu = lam.truncated(0), mu.truncated(0)
    while lam.valid_order < target_order:
        mus = [mu]
        for _ in range(4):
            mus.append(step_mu(lam, mus[-1], a, p))
        lams = [lam]
        for i in range(4):
            lams.append(step_lambda(lams[-1], mus[i + 1], a, p))
        lam, mu = lams[4], mus[4]
    return lam.truncated(target_order), mu.truncated(target_order)


def assemble_lambda(a: RootAnchor, lam3: DtSeries, p: EquationParams) -> DtSeries:
    """Full root expansion: dt*sgn + dt^2*(sgn-chi0)/(2 t0) + dt^3 * lam3."""
    if lam3.anchor != a:
        raise AnchorMismatchError("cubic-factor series anchored elsewhere")
    c = [0.0, float(a.s), (a.s - p.chi0) / (2 * a.t0)] + lam3.trusted()
    return DtSeries(a, c, lam3.valid_order + 3)


def lam6_reference(a: RootAnchor, p: EquationParams) -> DtSeries:
    """Closed-form degree-5 cubic-factor polynomial; the independent oracle
    for ``run_scheme`` (hand-transcribed, not produced by the iteration)."""
    sg, t0, L = a.s, a.t0, a.lam3
    chi0, chinf = p.chi0, p.chi_inf
    c0 = L
    c1 = -(chinf + (sg * chi0 + 2) * t0 * L) / (4 * t0**2)
    c2 = sg * (2 + 3 * chinf * (chi0 + sg) / t0 + (5 * chi0 + 7 * sg) * L + 6 * t0**2 * L**2) / (
        20 * t0**2
    )
    c3 = -(
        chinf * ((chi0 + sg) * (9 * chi0 + 46 * sg) / t0 + 90 * sg * t0 * L)
        + 2 * (18 * chi0 + 7 * sg)
        + 9 * sg * (9 * chi0 + 11 * sg) * L
        + 18 * (chi0 + 9 * sg) * t0**2 * L**2
    ) / (360 * t0**3)
    c4 = (
        90 * sg * t0 * chinf**2
        + chinf * ((chi0 + sg) * (91 * chi0 + 284 * sg) + 18 * (18 * chi0 + 53 * sg) * t0**2 * L)
        + 2 * (97 * chi0 + sg * (45 * chi0**2 + 53)) * t0
        + 36 * (11 * t0**2 + 14 * sg * chi0 + 16) * t0 * L
        + 18 * (14 * chi0 + 73 * sg) * t0**3 * L**2
        + 108 * t0**5 * L**3
    ) / (2520 * t0**5)
    c5 = -(
        18 * (33 * chi0 + 65 * sg) * t0 * chinf**2
        + chinf
        * (
            (chi0 + sg) * (830 * chi0 + 2047 * sg)
            + 756 * t0**2
            + 36 * sg * (9 * chi0**2 + 140 * sg * chi0 + 257) * t0**2 * L
            + 2268 * t0**4 * L**2
        )
        + 2 * (45 * chi0**3 + 423 * sg * chi0**2 + 761 * chi0 + 388 * sg) * t0
        + 36 * (100 * sg * chi0 + 110 + 27 * (3 * sg * chi0 + 4) * t0**2) * t0 * L
        + 18 * (157 * chi0 + 620 * sg) * t0**3 * L**2
        + 108 * (sg * chi0 + 20) * t0**5 * L**3
    ) / (20160 * t0**6)
    return DtSeries(a, [c0, c1, c2, c3, c4, c5], 5)


# ---------------------------------------------------------------------------
# residual order measurement


def _residual_series(lam_coeffs, t0: float, p: EquationParams, work_order: int):
    """Power-series coefficients of lam'' - RHS for a polynomial lam with a
    simple root (c0 = 0, c1 = +-1) at t0, plus a per-order magnitude scale
    (sum of term magnitudes) used to tell genuine coefficients apart from
    the rounding dust left by orders that cancel identically.

    The two 1/lam terms are combined into (lam'^2 - 1)/lam before dividing,
    so the series is regular; the constant of lam'^2 - 1 is exactly zero in
    floating point because c1 is exactly +-1.
    """
    W = work_order
    lam = _poly.ptrim(lam_coeffs, W + 2)
    if lam[0] != 0.0 or abs(lam[1]) != 1.0:
        raise DomainError("residual series needs a simple-root expansion (c0=0, |c1|=1)")
    lam_d = _poly.ptrim(_poly.pder(lam), W + 1)
    lam_dd = _poly.ptrim(_poly.pder(lam_d), W)
    inv_t = _poly.pinv_t(t0, W)
    u = _poly.ptrim(lam[1:], W)  # lam = dt * u, u(0) = +-1
    inv_u = _poly.precip(u, W)
    q = _poly.padd(_poly.pmul(lam_d, lam_d, cap=W + 1), [-1.0])  # lam'^2 - 1, q[0] == 0
    inv_t2 = _poly.pmul(inv_t, inv_t, cap=W)
    lam2 = _poly.pmul(lam, lam, cap=W)
    lam_cubed = _poly.pmul(lam2, lam, cap=W)
    terms = [
        lam_dd,
        _poly.pscale(_poly.pmul(q[1:], inv_u, cap=W), -1.0),  # -(lam'^2 - 1)/lam
        _poly.pmul(lam_d, inv_t, cap=W),
        _poly.pscale(_poly.pmul(lam2, inv_t2, cap=W), p.chi_inf),
        _poly.pscale(_poly.pmul(lam_cubed, inv_t2, cap=W), -1.0),
        _poly.pscale(inv_t, -p.chi0),
    ]
    r = [0.0] * (W + 1)
    scale = [0.0] * (W + 1)
    for t in terms:
        for k, c in enumerate(_poly.ptrim(t, W)):
            r[k] += c
            scale[k] += abs(c)
    return r, scale


_DUST_RTOL = 1e-8


def residual_order(lam_series: DtSeries, p: EquationParams, dt_grid) -> float:
    """Log-log slope of the equation residual of an assembled root expansion.

    The residual lam'' - RHS is expanded as a power series (derivatives by
    exact series differentiation, the 1/lam terms by truncated reciprocal).
    Leading coefficients that vanish identically in exact arithmetic show up
    as rounding dust; a coefficient counts as genuine only above a
    magnitude-scale threshold, and evaluation starts from the first genuine
    order so the slope is measurable at small dt.  Returns the least-squares
    slope of log|r| against log|dt|.
    """
    grid = [float(x) for x in dt_grid]
    if len(grid) < 4 or any(x == 0 for x in grid):
        raise DomainError("degenerate grid: need >= 4 nonzero dt values")
    mags = sorted(abs(x) for x in grid)
    if mags[-1] / mags[0] < 99.0:
        raise DomainError("degenerate grid: must span at least two decades")
    t0 = lam_series.anchor.t0
    W = max(48, 3 * (lam_series.valid_order + 2))
    r, scale = _residual_series(lam_series.trusted(), t0, p, W)
    m = None
    for k, (rk, sk) in enumerate(zip(r, scale)):
        if abs(rk) > _DUST_RTOL * max(1.0, sk):
            m = k
            break
    if m is None:
        raise DomainError("residual vanishes to working precision on this series")
    tail = r[m:]
    xs, ys = [], []
    for dt in grid:
        val = _poly.peval(tail, dt) * dt**m
        if val != 0.0:
            xs.append(math.log(abs(dt)))
            ys.append(math.log(abs(val)))
    n = len(xs)
    xbar, ybar = sum(xs) / n, sum(ys) / n
    num = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    den = sum((x - xbar) ** 2 for x in xs)
    return num / den
