"""Numeric checks of alternative boundary relations and of the gravity correction."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

from .errors import InputError, NumericalFailure
from .inputs import GEV_TO_INV_CM, PLANCK_MASS_GEV, InputSet
from .relations import STANDARD_CONTENT, HyperchargeContent, critical_scale
from .rgflow import GAUGE, GAUGE_SLOPES, TOP, CouplingState, integrate

CCM_RATIO = 1.5
GUT_REFERENCE_GEV = 1.1e17
# Reference curvature and |r_M sigma| for the predicted Higgs parameters.
GRAVITY_REFERENCE_CM2 = -1e-13 / (2.0 * math.pi)
GRAVITY_PRODUCT_REFERENCE = 1e-40


class Verdict(str, enum.Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"


class Criterion(str, enum.Enum):
    RELATIVE = "relative"  # |computed/reference - 1| <= threshold
    FACTOR = "factor"  # computed/reference in [1/threshold, threshold]


def judge(computed: float, reference: float, threshold: float, criterion: Criterion | str) -> Verdict:
    if reference == 0 or not math.isfinite(computed):
        return Verdict.INCONSISTENT
    r = computed / reference
    if Criterion(criterion) is Criterion.RELATIVE:
        ok = abs(r - 1.0) <= threshold
    else:
        ok = 1.0 / threshold <= r <= threshold
    return Verdict.CONSISTENT if ok else Verdict.INCONSISTENT


@dataclass(frozen=True)
class ScenarioResult:
    """``verdict`` is derived from ``computed[key]``, ``reference[key]``, threshold and criterion."""

    name: str
    key: str
    computed: dict
    reference: dict
    threshold: float
    criterion: Criterion
    verdict: Verdict = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "criterion", Criterion(self.criterion))
        object.__setattr__(
            self,
            "verdict",
            judge(self.computed[self.key], self.reference[self.key], self.threshold, self.criterion),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["criterion"] = self.criterion.value
        d["verdict"] = self.verdict.value
        return d


def ccm_ratio(
    inputs: InputSet, rep: HyperchargeContent = STANDARD_CONTENT, threshold: float = 0.05
) -> ScenarioResult:
    """``g3^2/gt^2`` at the critical scale against the value 3/2."""
    tc = critical_scale(*inputs.inverse_squares, rep)
    start = CouplingState(0.0, *inputs.gauge, inputs.gt0, 0.0)
    s = integrate(start, tc, active={GAUGE, TOP}).final
    ratio = s.g3**2 / s.gt**2
    return ScenarioResult(
        "ccm-ratio",
        "ratio",
        {"ratio": ratio, "deviation": ratio / CCM_RATIO - 1.0, "tc": tc, "g3": s.g3, "gt": s.gt},
        {"ratio": CCM_RATIO},
        threshold,
        Criterion.RELATIVE,
    )


def gut_scale(inputs: InputSet, factor: float = 2.0) -> ScenarioResult:
    """Scale where ``g2 = g3`` from the exact affine solve, plus the g1-leg defect there.

    The g1 leg of ``g3^2 = g2^2 = (5/3) g1^2`` is reported as
    ``(3/5)/g1^2 - 1/g2^2`` and is not used to fix the scale.
    """
    A1, A2, A3 = inputs.inverse_squares
    c1, c2, c3 = GAUGE_SLOPES
    if c3 == c2:
        raise NumericalFailure("degenerate slopes: g2 and g3 run in parallel", stage="gut-scale")
    t = (A2 - A3) / (c3 - c2)
    u1, u2, u3 = A1 + c1 * t, A2 + c2 * t, A3 + c3 * t
    E = inputs.mZ.value * math.exp(t)
    return ScenarioResult(
        "gut-scale",
        "E_GeV",
        {"t": t, "E_GeV": E, "inv_g2_sq": u2, "inv_g3_sq": u3, "g1_leg_residual": 0.6 * u1 - u2},
        {"E_GeV": GUT_REFERENCE_GEV},
        factor,
        Criterion.FACTOR,
    )


def gravity_estimate(
    mH: float,
    lambda0: float,
    mP: float = PLANCK_MASS_GEV,
    sigma_cm2: float | None = 1e-26,
    factor: float = 10.0,
) -> ScenarioResult:
    """Scalar curvature ``r_M = -(pi/2)(mH/mP)^2 mH^2/lambda`` in GeV^2 and cm^-2.

    ``|r_M sigma|`` is added when a cross-section is given.  The verdict
    compares the curvature with the reference value within ``factor``.
    """
    if not mH > 0 or not mP > 0:
        raise InputError("mH and mP must be positive")
    if lambda0 == 0:
        raise NumericalFailure("lambda = 0: curvature estimate diverges", stage="gravity")
    r_gev2 = -(math.pi / 2.0) * (mH / mP) ** 2 * mH**2 / lambda0
    r_cm2 = r_gev2 * GEV_TO_INV_CM**2
    computed = {"r_M_GeV2": r_gev2, "r_M_cm2": r_cm2}
    reference = {"r_M_cm2": GRAVITY_REFERENCE_CM2, "r_M_sigma": GRAVITY_PRODUCT_REFERENCE}
    if sigma_cm2 is not None:
        if not sigma_cm2 > 0:
            raise InputError("sigma must be positive")
        computed["sigma_cm2"] = sigma_cm2
        computed["r_M_sigma"] = abs(r_cm2 * sigma_cm2)
    computed["ratio_to_reference"] = r_cm2 / GRAVITY_REFERENCE_CM2
    return ScenarioResult("gravity", "r_M_cm2", computed, reference, factor, Criterion.FACTOR)
