"""Lower and upper Higgs-mass bounds when lambda(t_c) is left free.

The lower bound takes lambda(t_c) = 0.  The upper bound replaces the quartic
beta function by a quadratic majorant with constant coefficients, whose
Riccati solution is a shifted coth; its limit for an infinite initial value
bounds every solution from above.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError
from .inputs import InputSet
from .predictor import DEFAULT_CONVENTIONS, Conventions, envelope_runs, mass_from_lambda, run_pipeline
from .relations import critical_point
from .rgflow import GAUGE, GAUGE_NAMES, K16, TOP, CouplingState, gauge_analytic, integrate

L1 = 6.0 / math.pi**2


class Side(str, enum.Enum):
    OVER = "over"
    UNDER = "under"


def envelope_couplings(t, inputs: InputSet, side: Side | str):
    """Analytic gauge couplings with ``A_i`` shifted by ``-dA_i`` (over) or ``+dA_i`` (under)."""
    sgn = -1.0 if Side(side) is Side.OVER else 1.0
    A = [a + sgn * d for a, d in zip(inputs.inverse_squares, inputs.inverse_square_errors)]
    return gauge_analytic(t, *A)


@dataclass(frozen=True)
class ComparisonCoefficients:
    """Majorant ``d lambda/dt = time_scale * (l1 lambda^2 + l2 lambda + l3)``."""

    l1: float
    l2: float
    l3: float
    time_scale: float = 1.0

    def __post_init__(self):
        if self.l1 != L1:
            raise DomainError(f"l1 must equal 6/pi^2, got {self.l1!r}")
        if not self.time_scale > 0:
            raise DomainError("time_scale must be positive")
        if not self.beta < 0:
            raise DomainError(f"comparison solution needs beta < 0, got beta = {self.beta:.6g}")

    @property
    def alpha(self) -> float:
        return self.l2 / (2.0 * self.l1)

    @property
    def beta(self) -> float:
        return -(self.l2**2) / (4.0 * self.l1**2) + self.l3 / self.l1

    def rhs(self, lam):
        return self.time_scale * (self.l1 * lam * lam + self.l2 * lam + self.l3)


def arcoth(x: float) -> float:
    if not abs(x) > 1.0:
        raise DomainError(f"arcoth argument must satisfy |x| > 1, got {x!r}")
    return 0.5 * math.log((x + 1.0) / (x - 1.0))


def _coth(u):
    return 1.0 / np.tanh(u)


def comparison_solution(t, t_c: float, kappa: float, c: ComparisonCoefficients):
    """Closed-form solution of the majorant with ``lambda(t_c) = kappa``."""
    s = math.sqrt(abs(c.beta))
    u0 = arcoth((kappa + c.alpha) / s)
    u = c.time_scale * c.l1 * c.beta * (np.asarray(t, dtype=np.float64) - t_c) / s + u0
    out = s * _coth(u) - c.alpha
    return float(out) if np.ndim(out) == 0 else out


def asymptotic_upper(t, t_c: float, c: ComparisonCoefficients):
    """``kappa -> infinity`` limit of :func:`comparison_solution`; defined for ``t < t_c``."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(~(t < t_c)):
        raise DomainError(f"asymptotic comparison solution has a pole at t = t_c = {t_c:.6g}")
    s = math.sqrt(abs(c.beta))
    out = s * _coth(c.time_scale * c.l1 * c.beta * (t - t_c) / s) - c.alpha
    return float(out) if out.ndim == 0 else out


class CothRate(str, enum.Enum):
    # inv-pi2: coth argument runs at 1/pi^2 per unit t (the default, matching
    # the reference bound values); l1: runs at l1 = 6/pi^2 as the majorant ODE implies.
    INV_PI2 = "inv-pi2"
    L1 = "l1"

    @property
    def time_scale(self) -> float:
        return 1.0 / 6.0 if self is CothRate.INV_PI2 else 1.0


@dataclass(frozen=True)
class ComparisonSetup:
    coefficients: ComparisonCoefficients
    tc: float
    T: float  # t_c + dt_c, where the envelope extremes are read off
    gt_over0: float
    gt_under_T: float


def comparison_coefficients(
    inputs: InputSet,
    rate: CothRate | str = CothRate.INV_PI2,
    conventions: Conventions = DEFAULT_CONVENTIONS,
) -> ComparisonSetup:
    """Constant majorant coefficients built from the extremal coupling envelopes.

    The lower top-Yukawa curve starts at ``gt0 - dgt`` and runs against the
    over-envelope gauge couplings; the upper one starts at ``gt0 + dgt``, which
    is also its maximum on [0, T].
    """
    tc, dtc, _, _ = critical_point(inputs, conventions.content)
    T = tc + dtc
    ob0 = envelope_couplings(0.0, inputs, Side.OVER)
    obT = envelope_couplings(T, inputs, Side.OVER)
    gt0, dgt = inputs.gt0, inputs.gt0_error
    gt_over0 = gt0 + dgt
    start = CouplingState(0.0, *ob0, gt0 - dgt, 0.0)
    gt_under_T = integrate(start, T, conventions.options, active={GAUGE, TOP}).final.gt

    l2 = (24.0 * gt_over0**2 - 9.0 * obT[1] ** 2 - 3.0 * ob0[0] ** 2) / K16
    l3 = (
        -6.0 * gt_under_T**4
        + (9.0 / 32.0) * ob0[1] ** 4
        + (3.0 / 32.0) * obT[0] ** 4
        + (3.0 / 16.0) * ob0[1] ** 2 * obT[0] ** 2
    ) / K16
    coeffs = ComparisonCoefficients(L1, l2, l3, CothRate(rate).time_scale)
    return ComparisonSetup(coeffs, tc, T, gt_over0, gt_under_T)


class LowerMethod(str, enum.Enum):
    CORNERS = "corners"  # minimum over the input-error corners
    CENTRAL = "central"  # central inputs only


def lower_bound(
    inputs: InputSet,
    conventions: Conventions = DEFAULT_CONVENTIONS,
    method: LowerMethod | str = LowerMethod.CORNERS,
) -> float:
    """Higgs mass for ``lambda(t_c) = 0``.

    By default the smallest value over the same 2^6 input corners used for
    the envelope error, so that it brackets the inputs like the upper bound.
    """
    if LowerMethod(method) is LowerMethod.CENTRAL:
        tc = critical_point(inputs, conventions.content)[0]
        batch = run_pipeline(
            np.array([inputs.gauge]), inputs.mT.value, inputs.mW.value, tc, conventions, lambda_tc=0.0
        )
        return float(batch.mH[0])
    _, batch, _ = envelope_runs(inputs, conventions, lambda_tc=0.0)
    return float(np.min(batch.mH))


def upper_bound(
    inputs: InputSet,
    rate: CothRate | str = CothRate.INV_PI2,
    conventions: Conventions = DEFAULT_CONVENTIONS,
) -> tuple[float, float]:
    """``(mH_upper, lambda_as(0))``; the mass uses the largest mW and smallest g2(0)."""
    setup = comparison_coefficients(inputs, rate, conventions)
    lam_as0 = asymptotic_upper(0.0, setup.tc, setup.coefficients)
    g2_under0 = envelope_couplings(0.0, inputs, Side.UNDER)[1]
    mH = mass_from_lambda(lam_as0, g2_under0, inputs.mW.hi, conventions.mh_coefficient)
    return mH, lam_as0


@dataclass(frozen=True)
class BoundsReport:
    mH_lower_GeV: float
    mH_upper_GeV: float
    lambda_as0: float
    top_mode: str
    coth_rate: str = CothRate.INV_PI2.value

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BoundsReport":
        return cls(**d)


def compute_bounds(
    inputs: InputSet,
    rate: CothRate | str = CothRate.INV_PI2,
    conventions: Conventions = DEFAULT_CONVENTIONS,
    lower_method: LowerMethod | str = LowerMethod.CORNERS,
) -> BoundsReport:
    lo = lower_bound(inputs, conventions, lower_method)
    hi, lam = upper_bound(inputs, rate, conventions)
    return BoundsReport(lo, hi, lam, inputs.top_mode.value, CothRate(rate).value)


__all__ = [
    "GAUGE_NAMES",
    "L1",
    "Side",
    "envelope_couplings",
    "ComparisonCoefficients",
    "arcoth",
    "comparison_solution",
    "asymptotic_upper",
    "CothRate",
    "comparison_coefficients",
    "LowerMethod",
    "lower_bound",
    "upper_bound",
    "BoundsReport",
    "compute_bounds",
]
