"""Tree-level parameter relations, hypercharge traces and the critical scale.

The three gauge-coupling relations tie ``1/g_i^2`` to two commutant
parameters ``(A, trX)``.  Because ``1/g_i^2(t)`` is affine in ``t`` under
one-loop running, the scale at which all three admit a common solution is the
root of a single affine equation.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InputError, NumericalFailure
from .inputs import InputSet
from .rgflow import GAUGE, GAUGE_SLOPES, TOP, CouplingState, gauge_analytic, integrate


def _frac(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**9)
    return Fraction(x)


@dataclass(frozen=True)
class HyperchargeContent:
    """Hypercharges of one fermion generation plus the generation count.

    ``ynuR = None`` means there is no right-handed neutrino.
    """

    yqL: Fraction = Fraction(1, 6)
    ydR: Fraction = Fraction(-1, 3)
    yuR: Fraction = Fraction(2, 3)
    ylL: Fraction = Fraction(-1, 2)
    yeR: Fraction = Fraction(-1)
    ynuR: Fraction | None = None
    N: int = 3

    def __post_init__(self):
        for name in ("yqL", "ydR", "yuR", "ylL", "yeR"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.ynuR is not None:
            object.__setattr__(self, "ynuR", _frac(self.ynuR))
        if not isinstance(self.N, int) or isinstance(self.N, bool) or self.N < 1:
            raise InputError(f"generation count N must be a positive integer, got {self.N!r}")
        self.check()

    @property
    def higgs_hypercharge(self) -> Fraction:
        return self.ylL - self.yeR

    def check(self) -> None:
        """Raise :class:`InputError` naming the first violated hypercharge equality."""
        yh = self.higgs_hypercharge
        legs = [
            ("yqL - ydR", self.yqL - self.ydR),
            ("yuR - yqL", self.yuR - self.yqL),
        ]
        if self.ynuR is not None:
            legs.append(("ynuR - ylL", self.ynuR - self.ylL))
        for label, v in legs:
            if v != yh:
                raise InputError(
                    f"hypercharge relation violated: ylL - yeR = {yh} but {label} = {v}"
                )

    def with_right_handed_neutrino(self, ynuR=Fraction(0)) -> "HyperchargeContent":
        return HyperchargeContent(
            self.yqL, self.ydR, self.yuR, self.ylL, self.yeR, _frac(ynuR), self.N
        )


STANDARD_CONTENT = HyperchargeContent()


def hypercharge_sums(rep: HyperchargeContent) -> tuple[Fraction, Fraction]:
    """Quadratic hypercharge traces ``(yq, yl)``."""
    rep.check()
    yq = 2 * rep.yqL**2 + rep.ydR**2 + rep.yuR**2
    yl = 2 * rep.ylL**2 + rep.yeR**2
    if rep.ynuR is not None:
        yl += rep.ynuR**2
    return yq, yl


def relation_weights(rep: HyperchargeContent) -> tuple[float, float, float]:
    # Eliminating (A, trX) leaves u1 - 2 yl u2 - (3/2)(yq - yl) u3 = 0, u_i = 1/g_i^2.
    yq, yl = hypercharge_sums(rep)
    return (1.0, float(-2 * yl), float(-Fraction(3, 2) * (yq - yl)))


def critical_scale(A1: float, A2: float, A3: float, rep: HyperchargeContent = STANDARD_CONTENT) -> float:
    """Scale ``t_c`` at which the three gauge relations share one ``(A, trX)``."""
    if not (A1 > 0 and A2 > 0 and A3 > 0):
        raise InputError("inverse squared couplings A_i must be positive")
    w = relation_weights(rep)
    offset = sum(wi * Ai for wi, Ai in zip(w, (A1, A2, A3)))
    slope = sum(wi * si for wi, si in zip(w, GAUGE_SLOPES))
    if slope == 0.0:
        raise NumericalFailure("gauge relations are never simultaneously consistent", stage="critical-scale")
    return -offset / slope


def critical_scale_many(A, rep: HyperchargeContent = STANDARD_CONTENT):
    """Vectorized :func:`critical_scale` over rows of ``A`` (shape (n, 3)); no validation."""
    w = relation_weights(rep)
    slope = sum(wi * si for wi, si in zip(w, GAUGE_SLOPES))
    return -(np.asarray(A, dtype=np.float64) @ np.array(w)) / slope


def critical_scale_closed_form(A1: float, A2: float, A3: float) -> float:
    """Standard-content shortcut ``t_c = (8 pi^2/21)(3A1 - 9A2 + 4A3)``."""
    return (8.0 * math.pi**2 / 21.0) * (3.0 * A1 - 9.0 * A2 + 4.0 * A3)


def critical_scale_error(dA, rep: HyperchargeContent = STANDARD_CONTENT) -> float:
    """Worst-case linear half-width of ``t_c`` from the errors ``dA_i`` on ``A_i``."""
    w = relation_weights(rep)
    slope = sum(wi * si for wi, si in zip(w, GAUGE_SLOPES))
    return sum(abs(wi / slope) * d for wi, d in zip(w, dA))


def tc_to_energy(t_c: float, E0: float) -> float:
    if not E0 > 0:
        raise InputError("reference energy must be positive")
    return E0 * math.exp(t_c)


def critical_point(inputs: InputSet, rep: HyperchargeContent = STANDARD_CONTENT):
    """``(t_c, dt_c, E_c, dE_c)`` for an input set; ``dE_c = E_c * dt_c`` to first order."""
    tc = critical_scale(*inputs.inverse_squares, rep)
    dtc = critical_scale_error(inputs.inverse_square_errors, rep)
    Ec = tc_to_energy(tc, inputs.mZ.value)
    return tc, dtc, Ec, Ec * dtc


class UnphysicalCommutantWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class CommutantSolution:
    A: float
    trX: float
    residual: float
    lambda_ymh: float
    # Secondary relations in the top-quark approximation; reported, not used downstream.
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def physical(self) -> bool:
        return self.trX > 0 and self.A > 0


def solve_commutant(
    t_c: float,
    inputs: InputSet,
    rep: HyperchargeContent = STANDARD_CONTENT,
    gt_tc: float | None = None,
) -> CommutantSolution:
    """Solve the g2/g3 relations for ``(A, trX)`` at ``t_c`` and report the g1 defect.

    ``gt_tc`` defaults to a gauge + top run from the reference scale.
    """
    g1, g2, g3 = gauge_analytic(t_c, *inputs.inverse_squares)
    N = rep.N
    yq, yl = (float(v) for v in hypercharge_sums(rep))
    trX = 4.0 * N * g3**2 / g2**2 - 3.0 * N
    denom = 4.0 * N + trX
    A = denom / (4.0 * N * g3**2)
    residual = abs(1.0 / g1**2 - 2.0 * A * (3.0 * N * yq + yl * trX) / denom)

    if gt_tc is None:
        start = CouplingState(0.0, *inputs.gauge, inputs.gt0, 0.0)
        gt_tc = integrate(start, t_c, active={GAUGE, TOP}).final.gt
    lambda_ymh = math.sqrt(9.0 / 8.0) * gt_tc / g3

    diag = {}
    if gt_tc > 0:
        B = denom / (6.0 * gt_tc**2)
        lh_mu_chain = 2.0 * math.sqrt(2.0) / 3.0
        lh_mu_direct = 2.0 * math.sqrt(2.0 / 3.0)
        diag = {
            "B": B,
            "C": 1.5 * B,
            "lambda_tree": 1.5 * B * 3.0 * gt_tc**4 / denom,
            "mu2_lP2": 1.0 / (6.0 * math.pi * B),
            "lH_mu_from_chain": lh_mu_chain,
            "lH_mu_direct": lh_mu_direct,
            "lH_mu_mismatch": lh_mu_direct / lh_mu_chain,
        }
    if not trX > 0:
        warnings.warn(
            f"unphysical commutant at t = {t_c:.6g}: trX = {trX:.6g} <= 0",
            UnphysicalCommutantWarning,
            stacklevel=2,
        )
    return CommutantSolution(A, trX, residual, lambda_ymh, diag)


class BoundaryConvention(str, enum.Enum):
    QUADRATIC = "gt2"  # lambda(t_c) = (3/4) gt^2
    LINEAR = "gt"  # lambda(t_c) = (3/4) gt


def lambda_boundary(gt_tc: float, convention: BoundaryConvention | str = BoundaryConvention.QUADRATIC) -> float:
    if gt_tc < 0:
        raise InputError("gt(t_c) must be non-negative")
    if BoundaryConvention(convention) is BoundaryConvention.QUADRATIC:
        return 0.75 * gt_tc * gt_tc
    return 0.75 * gt_tc


def higgs_length_scale(mu: float) -> float:
    """``l_H = 2 sqrt(2/3) / mu`` in inverse units of ``mu``."""
    if not mu > 0:
        raise InputError("mu must be positive")
    return 2.0 * math.sqrt(2.0 / 3.0) / mu
