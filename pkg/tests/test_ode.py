"""Numerical verifier: integration, root crossing, scans, symmetry."""

import numpy as np
import pytest

from p3prime import DomainError, EquationParams, RootAnchor, SignSwitch, mu_from_lambda
from p3prime.ode import (
    compare_series,
    find_roots,
    integrate,
    integrate_hamiltonian,
    lam3_at_root,
    residual_scan,
    root_slope,
    symmetry_check,
)
from p3prime.series import assemble_lambda, run_scheme, series_eval, series_eval_derivative

P = EquationParams(-0.811597, -0.0550042)
KNOWN_ROOTS = (0.0159082, 0.0427774, 0.0901638, 0.242530, 0.511115, 1.38175)


def anchored_solution(a, p, span, order=5, launch=0.01, **kw):
    lam = assemble_lambda(a, run_scheme(a, p, order)[0], p)
    dt = launch * abs(a.t0)
    return (
        integrate(p, a.t0 + dt, series_eval(lam, dt), series_eval_derivative(lam, dt), span, **kw),
        lam,
    )


def test_input_validation():
    with pytest.raises(DomainError):
        integrate(P, 1.0, 1.0, 0.0, (-1.0, 2.0))  # span contains 0
    with pytest.raises(DomainError):
        integrate(P, 1.0, 0.0, 1.0, (0.5, 2.0))  # launch on a root
    with pytest.raises(DomainError):
        integrate(P, 0.1, 1.0, 0.0, (0.5, 2.0))  # t_init outside span


def test_appendix_roots_match(appendix_solution, appendix_roots):
    roots = appendix_roots
    assert len(roots) == 6
    for r, ref in zip(roots, KNOWN_ROOTS):
        assert abs(r.t0 - ref) <= 1e-3
    assert [r.sgn for r in roots[-2:]] == [1, -1]
    assert appendix_solution.pole_markers == []


def test_roots_are_simple_with_unit_slope(appendix_solution, appendix_roots):
    for r in appendix_roots:
        slope = root_slope(appendix_solution, r.t0)
        assert abs(abs(slope) - 1.0) <= 1e-3
        assert np.sign(slope) == r.sgn
        # sign change across the root
        d = 5e-4 * abs(r.t0)
        assert appendix_solution.lam(r.t0 - d) * appendix_solution.lam(r.t0 + d) < 0


def test_root_values_are_tiny_after_refinement(appendix_solution, appendix_roots):
    for r in appendix_roots:
        assert abs(appendix_solution.lam(r.t0)) <= 1e-12


def test_lam3_extraction_at_both_families(appendix_solution, appendix_roots):
    l1 = lam3_at_root(appendix_solution, appendix_roots[4], P)
    l2 = lam3_at_root(appendix_solution, appendix_roots[5], P)
    assert abs(l1 + 9.01149) / 9.01149 <= 0.01
    assert abs(l2 - 1.24246) / 1.24246 <= 0.01


def test_lam3_recovered_from_series_launched_solution():
    a = RootAnchor(0.7, SignSwitch(1), 2.0)
    p = EquationParams(0.5, -0.4)
    sol, _ = anchored_solution(a, p, (0.45, 1.05), order=6)
    roots = find_roots(sol)
    ours = min(roots, key=lambda r: abs(r.t0 - a.t0))
    got = lam3_at_root(sol, ours, p)
    assert abs(got - a.lam3) / abs(a.lam3) <= 1e-3


def test_integration_stays_on_series():
    a = RootAnchor(0.511115, SignSwitch(1), -9.01149)
    sol, lam = anchored_solution(a, P, (0.45, 0.6))
    for dt in np.linspace(-0.05 * a.t0, 0.05 * a.t0, 21):
        t = a.t0 + dt
        assert abs(sol.lam(float(t)) - series_eval(lam, float(t) - a.t0)) <= 1e-6


def test_forward_backward_reversibility():
    t0, y = 0.7, (0.9, 0.4)
    fwd = integrate(P, t0, y[0], y[1], (t0, 1.25))
    lam_end, lamdot_end = fwd.state(1.25)
    back = integrate(P, 1.25, lam_end, lamdot_end, (t0, 1.25))
    assert abs(back.lam(t0) - y[0]) <= 10 * fwd.rel_tol * max(1.0, abs(y[0]))


def test_crossing_consistency_of_local_coefficients(appendix_solution, appendix_roots):
    # refit the slope and curvature from numerical data outside the zone
    sol = appendix_solution
    for r in appendix_roots[-2:]:
        ds = np.linspace(-0.06 * abs(r.t0), 0.06 * abs(r.t0), 49)
        ds = ds[np.abs(ds) > 0.022 * abs(r.t0)]  # outside the crossing zone
        vals = np.array([sol.lam_dot(r.t0 + d) for d in ds])
        coeffs = np.polynomial.polynomial.polyfit(ds, vals, 6)
        c1, c2 = coeffs[0], coeffs[1] / 2
        assert abs(c1 - r.sgn) <= 1e-6
        assert abs(c2 - (r.sgn - P.chi0) / (2 * r.t0)) <= 1e-6


def test_find_roots_empty_on_rootless_window():
    sol = integrate(P, 0.8, *_state(0.8), (0.6, 1.3))
    assert find_roots(sol) == []


def _state(t):
    from p3prime.acceptance import reference_solution

    return reference_solution().state(t)


def test_residual_scan_small_away_from_roots(appendix_solution, appendix_roots):
    grid = [
        t
        for t in np.linspace(0.3, 1.3, 201)
        if all(abs(t - r.t0) > 0.05 for r in appendix_roots)
    ]
    rows = residual_scan(appendix_solution, grid, fd_step=5e-4)
    assert max(abs(r) for _, r in rows) <= 1e-4


def test_residual_scan_improves_with_tolerance():
    # with the finite-difference step fixed small, interpolation error
    # dominates and a 10x tighter tolerance must shrink the residual >= 5x
    args = (0.7, 0.9, 0.4, (0.6, 1.3))
    loose = integrate(P, *args[:3], args[3], rel_tol=1e-8, abs_tol=1e-10)
    tight = integrate(P, *args[:3], args[3], rel_tol=1e-9, abs_tol=1e-11)
    grid = np.linspace(0.65, 1.25, 101)
    r_loose = max(abs(r) for _, r in residual_scan(loose, grid, fd_step=5e-4))
    r_tight = max(abs(r) for _, r in residual_scan(tight, grid, fd_step=5e-4))
    assert r_loose >= 5 * r_tight


def test_residual_scan_on_series_matches_slope_seven():
    a = RootAnchor(0.511115, SignSwitch(1), -9.01149)
    lam = assemble_lambda(a, run_scheme(a, P, 5)[0], P)
    dts = a.t0 * np.logspace(np.log10(0.05), np.log10(0.3), 9)
    h = 1e-4
    res = []
    for dt in dts:
        t = a.t0 + dt
        fd2 = (
            series_eval(lam, dt + h) - 2 * series_eval(lam, dt) + series_eval(lam, dt - h)
        ) / h**2
        from p3prime.equation import rhs_scalar

        res.append(abs(fd2 - rhs_scalar(t, series_eval(lam, dt), series_eval_derivative(lam, dt), P)))
    slope = np.polyfit(np.log(dts), np.log(res), 1)[0]
    assert slope == pytest.approx(7.0, abs=0.5)


def test_compare_series_same_anchor_tight():
    a = RootAnchor(0.511115, SignSwitch(1), -9.01149)
    sol, lam = anchored_solution(a, P, (0.45, 0.6))
    dev = compare_series(sol, lam, (a.t0 - 0.01, a.t0 + 0.01))
    assert dev <= 1e-8


def test_compare_series_overlap_windows(appendix_solution):
    a1 = RootAnchor(0.511115, SignSwitch(1), -9.01149)
    s1 = assemble_lambda(a1, run_scheme(a1, P, 5)[0], P)
    assert compare_series(appendix_solution, s1, (a1.t0, 0.85)) <= 1e-2
    a2 = RootAnchor(1.38175, SignSwitch(-1), 1.24246)
    s2 = assemble_lambda(a2, run_scheme(a2, P, 5)[0], P)
    assert compare_series(appendix_solution, s2, (0.7, a2.t0)) <= 1e-2


def test_momentum_dichotomy_near_root(appendix_solution, appendix_roots):
    sol = appendix_solution
    r = appendix_roots[4]
    lam3 = lam3_at_root(sol, r, P)
    mu0 = (1 + r.sgn * (1 - P.chi0**2) / (2 * r.t0) + 3 * r.t0 * lam3) / 2
    dts = np.logspace(-4, -3, 9)
    good, bad = [], []
    for dt in dts:
        lam, lamdot = sol.state(r.t0 + dt)
        good.append(mu_from_lambda(r.t0 + dt, lam, lamdot, SignSwitch(r.sgn), P))
        bad.append(mu_from_lambda(r.t0 + dt, lam, lamdot, SignSwitch(-r.sgn), P) * dt**2)
    assert max(abs(m) for m in good) <= 10 * abs(mu0)
    assert (max(bad) - min(bad)) / abs(np.mean(bad)) <= 0.05
    assert abs(np.mean(bad)) > 1e-6


def test_hamiltonian_integration_matches_scalar(appendix_solution):
    sol = appendix_solution
    t_a, t_b = 0.6, 1.3
    sgn = SignSwitch(-1)  # slope of the next root to the right
    lam_a, lamdot_a = sol.state(t_a)
    mu_a = mu_from_lambda(t_a, lam_a, lamdot_a, sgn, P)
    ham = integrate_hamiltonian(P, sgn, t_a, lam_a, mu_a, (t_a, t_b))
    dev = max(abs(float(ham.sol(t)[0]) - sol.lam(float(t))) for t in np.linspace(t_a, t_b, 61))
    assert dev <= 1e-6


def test_symmetry_check_appendix(appendix_solution):
    dev = symmetry_check(appendix_solution, P, np.linspace(0.62, 1.28, 23))
    assert dev <= 1e-6


def test_symmetry_self_map_when_parameters_equal():
    p = EquationParams(0.6, 0.6)
    sol = integrate(p, 1.0, 1.4, 0.2, (0.8, 1.3))
    dev = symmetry_check(sol, p, np.linspace(0.85, 1.25, 15))
    assert dev <= 1e-6


def test_symmetry_rejects_grid_on_zero(appendix_solution, appendix_roots):
    with pytest.raises(DomainError):
        symmetry_check(appendix_solution, P, [appendix_roots[4].t0])


def test_pole_marker_on_blowup():
    # heading into a pole stops at the cap and records the side
    from p3prime.poles import root_to_pole

    a = RootAnchor(0.7, SignSwitch(1), 1.5)
    le = root_to_pole(a, P, 6)
    dt0 = -0.05 * a.t0
    sol = integrate(P, a.t0 + dt0, le.eval(dt0), le.eval_derivative(dt0), (0.55, 0.75))
    assert len(sol.pole_markers) == 1
    t_p, side = sol.pole_markers[0]
    assert side == "right"
    assert abs(t_p - a.t0) < 0.01 * a.t0


def test_third_derivative_curve_readback(appendix_solution):
    # build the third-derivative curve the same way the reproduction
    # pipeline does, then read it back at the launch abscissa
    sol = appendix_solution
    t_c = 0.833651
    grid = np.array([t for t in np.linspace(0.5, 1.2, 701) if abs(sol.lam(float(t))) > 1e-3])
    from p3prime.equation import third_derivative

    curve = np.array([third_derivative(float(t), *sol.state(float(t)), P) for t in grid])
    read = float(np.interp(t_c, grid, curve))
    direct = third_derivative(t_c, *sol.state(t_c), P)
    assert read == pytest.approx(direct, rel=1e-3)
