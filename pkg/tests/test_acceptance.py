"""One PASS/FAIL line per acceptance criterion, each with its pinned tolerance."""

import math

import numpy as np
import pytest

from higgsrg.bounds import (
    asymptotic_upper,
    comparison_coefficients,
    comparison_solution,
    compute_bounds,
)
from higgsrg.inputs import InputSet
from higgsrg.predictor import predict, run_pipeline
from higgsrg.relations import STANDARD_CONTENT, critical_point, critical_scale
from higgsrg.rgflow import CouplingState, IntegratorOptions, gauge_analytic, integrate
from higgsrg.scenarios import gravity_estimate, gut_scale

DIRECT = InputSet.default("direct")
EWFIT = InputSet.default("ewfit")
MODES = {"direct": DIRECT, "ewfit": EWFIT}


def test_criterion_1_critical_scale(acceptance_line):
    tc, dtc, _, _ = critical_point(DIRECT)
    ok_tc = abs(tc - 19.32253988) <= 1e-3
    ok_dtc = abs(dtc / 0.1217255988 - 1) <= 0.20
    acceptance_line(1, ok_tc and ok_dtc, f"t_c = {tc:.8f} (target 19.32253988 ± 1e-3), half-width {dtc:.6f} (target 0.1217256 ± 20%)")
    assert ok_tc and ok_dtc


def test_criterion_2_critical_energy(acceptance_line):
    Ec = critical_point(DIRECT)[2]
    ok = abs(Ec / 2.247e10 - 1) <= 0.005
    acceptance_line(2, ok, f"E_c = {Ec:.6e} GeV (target 2.247e10 ± 0.5%)")
    assert ok


@pytest.mark.parametrize("mode, target", [("direct", 0.6822142710), ("ewfit", 0.6747733575)])
def test_criterion_3_top_yukawa(acceptance_line, mode, target):
    gt0 = MODES[mode].gt0
    ok = abs(gt0 - target) <= 1e-9
    acceptance_line(3, ok, f"{mode}: gt(0) = {gt0:.10f} (target {target:.10f} ± 1e-9, off by {gt0 - target:.2e})")
    assert ok


@pytest.mark.parametrize("mode, target, err", [("direct", 0.0661110, 0.0054824), ("ewfit", 0.0647427, 0.0159511)])
def test_criterion_4_quartic(acceptance_line, mode, target, err):
    lam = predict(MODES[mode]).lambda0
    ok = abs(lam - target) <= err
    acceptance_line(4, ok, f"{mode}: lambda(0) = {lam:.7f} (target {target} ± {err})")
    assert ok


@pytest.mark.parametrize("mode, target, err", [("direct", 185.6990, 7.6789), ("ewfit", 183.7671, 21.4054)])
def test_criterion_5_higgs_mass(acceptance_line, mode, target, err):
    rep = predict(MODES[mode])
    ok_c = abs(rep.mH_GeV - target) <= 1.0
    ok_e = abs(rep.mH_err_GeV / err - 1) <= 0.20
    acceptance_line(
        5, ok_c and ok_e,
        f"{mode}: mH = {rep.mH_GeV:.4f} ± {rep.mH_err_GeV:.4f} GeV (target {target} ± 1, error {err} ± 20%)",
    )
    assert ok_c and ok_e


@pytest.mark.parametrize(
    "mode, lower, upper, lam_as",
    [("direct", 130.952, 492.232373, 0.463874798), ("ewfit", 113.142, 490.081276, 0.459830097)],
)
def test_criterion_6_bounds(acceptance_line, mode, lower, upper, lam_as):
    rep = compute_bounds(MODES[mode])
    ok_lo = abs(rep.mH_lower_GeV - lower) <= 1.0
    ok_hi = abs(rep.mH_upper_GeV / upper - 1) <= 0.01
    ok_as = abs(rep.lambda_as0 / lam_as - 1) <= 0.02
    acceptance_line(
        6, ok_lo and ok_hi and ok_as,
        f"{mode}: lower {rep.mH_lower_GeV:.3f} (target {lower} ± 1) {'ok' if ok_lo else 'MISS'}, "
        f"upper {rep.mH_upper_GeV:.3f} (target {upper} ± 1%) {'ok' if ok_hi else 'MISS'}, "
        f"lambda_as(0) {rep.lambda_as0:.6f} (target {lam_as} ± 2%) {'ok' if ok_as else 'MISS'}",
    )
    assert ok_lo and ok_hi and ok_as


def test_criterion_7_historical(acceptance_line):
    inp = InputSet.historical()
    rep = predict(inp)
    ok_m = abs(rep.mH_GeV - 188.0) <= 2.0
    ok_e = abs(rep.Ec_GeV / 0.96e10 - 1) <= 0.05
    acceptance_line(
        7, ok_m and ok_e,
        f"mH = {rep.mH_GeV:.3f} ± {rep.mH_err_GeV:.3f} GeV (target 188 ± 2), E_c = {rep.Ec_GeV:.4e} (target 0.96e10 ± 5%)",
    )
    assert ok_m and ok_e


def _rk4_ratio():
    start = CouplingState(0.0, *DIRECT.gauge, DIRECT.gt0, 0.0)
    errs = []
    for h in (0.1, 0.05):
        tr = integrate(start, 25.0, IntegratorOptions(step_size=h), active={"gauge"})
        closed = gauge_analytic(tr.t, *DIRECT.inverse_squares)
        errs.append(max(np.max(np.abs(tr.y[:, i] - closed[i])) for i in range(3)))
    return errs[0] / errs[1]


def _property_checks():
    A = DIRECT.inverse_squares
    tc = critical_scale(*A)
    start = CouplingState(0.0, *DIRECT.gauge, DIRECT.gt0, 0.0)
    out = {}

    out["rk4 ratio in [14, 18]"] = 14 <= _rk4_ratio() <= 18

    tr = integrate(start, tc)
    closed = gauge_analytic(tr.t, *A)
    out["gauge agreement < 1e-9"] = max(np.max(np.abs(tr.y[:, i] - closed[i])) for i in range(3)) < 1e-9

    c = comparison_coefficients(DIRECT).coefficients
    h = 1e-4
    res = 0.0
    for kappa in (0.1, 1.0, 5.0):
        f = lambda t: comparison_solution(t, tc, kappa, c)
        for t in np.linspace(0.0, tc, 9):
            d = (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)
            res = max(res, abs(d - c.rhs(f(t))))
    out["comparison residual < 1e-8"] = res < 1e-8

    up = integrate(start, tc, active={"gauge", "top"}).final
    dom = True
    for kappa in (0.1, 1.0, 5.0):
        back = integrate(CouplingState(tc, up.g1, up.g2, up.g3, up.gt, kappa), 0.0)
        dom &= bool(np.min(comparison_solution(back.t, tc, kappa, c) - back.y[:, 4]) > -1e-12)
    dom &= asymptotic_upper(0.0, tc, c) >= comparison_solution(0.0, tc, 5.0, c)
    out["domination kappa in {0.1, 1, 5}"] = dom

    k = np.linspace(0.0, 10.0, 21)
    batch = run_pipeline(np.tile(DIRECT.gauge, (len(k), 1)), DIRECT.mT.value, DIRECT.mW.value, tc, lambda_tc=k)
    out["lambda(0) monotone in lambda(t_c)"] = bool(np.all(np.diff(batch.lambda0) > 0))

    s = CouplingState(0.0, *DIRECT.gauge, DIRECT.gt0, 0.066)
    back = integrate(integrate(s, tc).final, 0.0).final
    out["round trip < 1e-8"] = float(np.max(np.abs(back.as_array() - s.as_array()))) < 1e-8

    nu = STANDARD_CONTENT.with_right_handed_neutrino(0)
    out["neutrino invariance < 1e-12"] = abs(critical_scale(*A, nu) - tc) < 1e-12
    return out


def test_criterion_8_properties(acceptance_line):
    checks = _property_checks()
    failed = [name for name, ok in checks.items() if not ok]
    acceptance_line(8, not failed, f"{len(checks) - len(failed)}/{len(checks)} properties hold" + (f", failing: {failed}" if failed else ""))
    assert not failed


def test_criterion_9_gut_scale(acceptance_line):
    res = gut_scale(InputSet.historical())
    E = res.computed["E_GeV"]
    ok = 1.1e17 / 2 <= E <= 2 * 1.1e17
    acceptance_line(9, ok, f"g2 = g3 at E = {E:.4e} GeV (target 1.1e17 within a factor 2)")
    assert ok


def test_criterion_10_gravity(acceptance_line):
    rep = predict(DIRECT)
    res = gravity_estimate(rep.mH_GeV, rep.lambda0)
    r = res.computed["r_M_GeV2"]
    quartic = gravity_estimate(2 * rep.mH_GeV, rep.lambda0).computed["r_M_GeV2"] / r
    inverse = gravity_estimate(rep.mH_GeV, 4 * rep.lambda0).computed["r_M_GeV2"] / r
    ok = math.isclose(quartic, 16.0, rel_tol=1e-14) and math.isclose(inverse, 0.25, rel_tol=1e-14)
    acceptance_line(
        10, ok,
        f"r_M = {res.computed['r_M_cm2']:.4e} cm^-2, |r_M sigma| = {res.computed['r_M_sigma']:.3e}, "
        f"ratio to reference curvature {res.computed['ratio_to_reference']:.3e} (reported); "
        f"scaling x{quartic:.15g} for 2 mH, x{inverse:.15g} for 4 lambda",
    )
    assert ok
