"""Higgs-mass pipeline: run up to the critical scale, impose the quartic boundary
value there, run back down and convert lambda(0) into a mass.

Every pipeline evaluation goes through :func:`run_pipeline`, which works on a
batch of rows so that central values, the corner envelope and Monte-Carlo
samples share one integration path.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .errors import DomainError, InputError, NumericalFailure
from .inputs import InputSet
from .relations import (
    STANDARD_CONTENT,
    BoundaryConvention,
    HyperchargeContent,
    critical_point,
    critical_scale_many,
)
from .rgflow import ALL_ACTIVE, GAUGE, GAUGE_SLOPES, MAX_SPAN, TOP, IntegratorOptions, integrate_many

MH_COEFFICIENTS = (16, 32)


def mass_from_lambda(lambda_0: float, g2_0: float, mW: float, coefficient: float = 32) -> float:
    """``mH = mW sqrt(coefficient * lambda_0) / g2_0``."""
    if coefficient not in MH_COEFFICIENTS:
        raise InputError(f"mass coefficient must be one of {MH_COEFFICIENTS}, got {coefficient!r}")
    if not g2_0 > 0 or not mW > 0:
        raise InputError("g2(0) and mW must be positive")
    if lambda_0 < 0:
        raise NumericalFailure(f"negative quartic at the reference scale: lambda(0) = {lambda_0:.6g}", stage="mass")
    return mW * math.sqrt(coefficient * lambda_0) / g2_0


@dataclass(frozen=True)
class Conventions:
    boundary: BoundaryConvention = BoundaryConvention.QUADRATIC
    mh_coefficient: int = 32
    content: HyperchargeContent = STANDARD_CONTENT
    step_size: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "boundary", BoundaryConvention(self.boundary))
        if self.mh_coefficient not in MH_COEFFICIENTS:
            raise InputError(f"mh_coefficient must be one of {MH_COEFFICIENTS}")

    @property
    def options(self) -> IntegratorOptions:
        return IntegratorOptions(step_size=self.step_size)


DEFAULT_CONVENTIONS = Conventions()


class ErrorMethod(str, enum.Enum):
    ENVELOPE = "envelope"
    MONTECARLO = "montecarlo"


@dataclass(frozen=True)
class PipelineBatch:
    gt0: np.ndarray
    gt_tc: np.ndarray
    lambda_tc: np.ndarray
    lambda0: np.ndarray
    mH: np.ndarray  # NaN where the row failed
    failed: np.ndarray  # bool
    reason: list = field(default_factory=list)


def _tag(exc: Exception, stage: str) -> Exception:
    if isinstance(exc, DomainError):
        return DomainError(f"[{stage}] {exc}", coupling=exc.coupling)
    if isinstance(exc, NumericalFailure) and exc.stage is None:
        return NumericalFailure(str(exc), last_t=exc.last_t, stage=stage)
    return exc


def _pole_free(g, t1) -> np.ndarray:
    ok = np.ones(len(t1), dtype=bool)
    for i, c in enumerate(GAUGE_SLOPES):
        A = 1.0 / g[:, i] ** 2
        ok &= (A > 0) & (A + c * t1 > 0)
    return ok


def run_pipeline(
    g0,
    mT,
    mW,
    tc,
    conventions: Conventions = DEFAULT_CONVENTIONS,
    lambda_tc=None,
    strict: bool = True,
) -> PipelineBatch:
    """Evaluate the two-stage pipeline row by row.

    ``g0`` has shape (n, 3); ``mT``, ``mW`` and ``tc`` broadcast to (n,).
    ``lambda_tc`` overrides the boundary relation when given.  With
    ``strict`` any failing row raises; otherwise failures are flagged.
    """
    g0 = np.atleast_2d(np.asarray(g0, dtype=np.float64))
    n = g0.shape[0]
    mT = np.broadcast_to(np.asarray(mT, dtype=np.float64), (n,))
    mW = np.broadcast_to(np.asarray(mW, dtype=np.float64), (n,))
    tc = np.broadcast_to(np.asarray(tc, dtype=np.float64), (n,))
    opts = conventions.options

    positive = np.all(g0 > 0, axis=1) & (mT > 0) & (mW > 0)
    if strict and not positive.all():
        raise InputError("couplings and masses must be positive")
    in_range = np.abs(tc) <= MAX_SPAN
    if strict and not in_range.all():
        raise InputError(f"critical scale must be finite with |t_c| <= {MAX_SPAN:g}")
    positive &= in_range
    safe = positive & _pole_free(np.where(positive[:, None], g0, 1.0), np.where(positive, tc, 0.0))
    if strict and not safe.all():
        try:
            integrate_many(np.column_stack([g0, np.zeros((n, 2))]), 0.0, tc, opts, active={GAUGE})
        except DomainError as exc:
            raise _tag(exc, "forward") from None

    gt0 = np.where(positive, 0.5 * (mT / np.where(positive, mW, 1.0)) * g0[:, 1], np.nan)
    Y = np.column_stack([g0, gt0, np.zeros(n)])
    Y[~safe] = [1.0, 1.0, 1.0, 0.0, 0.0]  # placeholder rows, discarded below
    t1 = np.where(safe, tc, 0.0)

    Yc, st1, last1 = integrate_many(Y, 0.0, t1, opts, active={GAUGE, TOP}, check_poles=False)
    gt_tc = Yc[:, 3].copy()
    if lambda_tc is None:
        gt_ok = np.where(gt_tc >= 0, gt_tc, 0.0)
        lam_tc = 0.75 * gt_ok * gt_ok if conventions.boundary is BoundaryConvention.QUADRATIC else 0.75 * gt_ok
    else:
        lam_tc = np.broadcast_to(np.asarray(lambda_tc, dtype=np.float64), (n,)).copy()
    Yc[:, 4] = lam_tc

    Y0, st2, last2 = integrate_many(Yc, t1, 0.0, opts, active=ALL_ACTIVE, check_poles=False)
    lam0 = Y0[:, 4]

    failed = ~safe | (st1 != 0) | (st2 != 0) | ~np.isfinite(lam0) | (lam0 < 0)
    reason = []
    for r in np.flatnonzero(failed):
        if not positive[r]:
            msg = "non-positive input" if in_range[r] else "critical scale out of range"
            reason.append((int(r), "inputs", msg))
        elif not safe[r]:
            reason.append((int(r), "forward", "gauge pole before t_c"))
        elif st1[r]:
            reason.append((int(r), "forward", f"blow-up after t = {last1[r]:.6g}"))
        elif st2[r]:
            reason.append((int(r), "backward", f"blow-up after t = {last2[r]:.6g}"))
        else:
            reason.append((int(r), "mass", f"lambda(0) = {lam0[r]:.6g}"))

    if strict and failed.any():
        r, stage, msg = reason[0]
        last = last1[r] if stage == "forward" else last2[r]
        raise NumericalFailure(msg, last_t=float(last), stage=stage)

    with np.errstate(invalid="ignore"):
        mH = mW * np.sqrt(conventions.mh_coefficient * lam0) / g0[:, 1]
    mH = np.where(failed, np.nan, mH)
    return PipelineBatch(gt0, gt_tc, lam_tc, lam0, mH, failed, reason)


@dataclass(frozen=True)
class PredictionReport:
    tc: float
    tc_err: float
    Ec_GeV: float
    Ec_err_GeV: float
    gt0: float
    gt_tc: float
    lambda0: float
    lambda0_err: float
    mH_GeV: float
    mH_err_GeV: float
    convention: str
    error_method: str
    mh_coefficient: int = 32

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PredictionReport":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


# --- error propagation ------------------------------------------------------

_CORNER_NAMES = ("g1", "g2", "g3", "mT", "mW", "tc")


@dataclass(frozen=True)
class SpreadResult:
    mH_spread: float
    lambda0_spread: float
    mH_min: float
    mH_max: float
    runs: int


def envelope_runs(
    inputs: InputSet,
    conventions: Conventions = DEFAULT_CONVENTIONS,
    lambda_tc=None,
) -> tuple[np.ndarray, PipelineBatch, list]:
    """Pipeline over all 2^6 sign corners of (g1, g2, g3, mT, mW, t_c).

    ``t_c`` is shifted by its own propagated half-width, independently of the
    gauge-coupling corner.
    """
    tc, dtc, _, _ = critical_point(inputs, conventions.content)
    centers = np.array([*inputs.gauge, inputs.mT.value, inputs.mW.value, tc])
    widths = np.array([*inputs.gauge_errors, inputs.mT.abs_error, inputs.mW.abs_error, dtc])
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=6)))
    P = centers + signs * widths
    labels = [
        " ".join(f"{n}{'+' if s > 0 else '-'}" for n, s in zip(_CORNER_NAMES, row)) for row in signs
    ]
    batch = run_pipeline(P[:, :3], P[:, 3], P[:, 4], P[:, 5], conventions, lambda_tc, strict=False)
    if batch.failed.any():
        r, stage, msg = batch.reason[0]
        raise NumericalFailure(f"corner ({labels[r]}) failed: {msg}", stage=f"envelope/{stage}")
    return P, batch, labels


def envelope_spread(inputs: InputSet, conventions: Conventions = DEFAULT_CONVENTIONS, lambda_tc=None) -> SpreadResult:
    _, batch, _ = envelope_runs(inputs, conventions, lambda_tc)
    return SpreadResult(
        float(np.max(batch.mH) - np.min(batch.mH)),
        float(np.max(batch.lambda0) - np.min(batch.lambda0)),
        float(np.min(batch.mH)),
        float(np.max(batch.mH)),
        len(batch.mH),
    )


def propagate_envelope(inputs: InputSet, conventions: Conventions = DEFAULT_CONVENTIONS) -> float:
    """Worst-case mass error: the full max - min spread of mH over the corners."""
    return envelope_spread(inputs, conventions).mH_spread


def _sample_std(x: np.ndarray) -> float:
    # Shifting by the first sample keeps identical samples at exactly zero.
    return float(np.std(x - x[0], ddof=1))


def montecarlo_samples(
    inputs: InputSet,
    conventions: Conventions = DEFAULT_CONVENTIONS,
    n_samples: int = 10000,
    seed: int = 0,
    max_failure_fraction: float = 0.01,
):
    if n_samples < 100:
        raise InputError("n_samples must be at least 100")
    rng = np.random.default_rng(seed)
    means = np.array([*inputs.gauge, inputs.mT.value, inputs.mW.value])
    sig = np.array([*inputs.gauge_errors, inputs.mT.abs_error, inputs.mW.abs_error])
    S = means + sig * rng.standard_normal((n_samples, 5))

    ok = np.all(S > 0, axis=1)
    with np.errstate(divide="ignore"):
        tc = critical_scale_many(1.0 / S[:, :3] ** 2, conventions.content)
    tc = np.where(ok, tc, np.nan)
    batch = run_pipeline(S[:, :3], S[:, 3], S[:, 4], tc, conventions, strict=False)
    n_fail = int(batch.failed.sum())
    if n_fail > max_failure_fraction * n_samples:
        census: dict[str, int] = {}
        for _, stage, _ in batch.reason:
            census[stage] = census.get(stage, 0) + 1
        raise NumericalFailure(
            f"{n_fail}/{n_samples} samples failed (by stage: {census})", stage="montecarlo"
        )
    good = ~batch.failed
    return S[good], batch.mH[good], batch.lambda0[good]


def propagate_montecarlo(
    inputs: InputSet,
    conventions: Conventions = DEFAULT_CONVENTIONS,
    n_samples: int = 10000,
    seed: int = 0,
) -> float:
    """Sample standard deviation of mH with Gaussian inputs; deterministic given ``seed``."""
    _, mH, _ = montecarlo_samples(inputs, conventions, n_samples, seed)
    return _sample_std(mH)


def predict(
    inputs: InputSet,
    conventions: Conventions = DEFAULT_CONVENTIONS,
    error_method: ErrorMethod | str = ErrorMethod.ENVELOPE,
    n_samples: int = 10000,
    seed: int = 0,
) -> PredictionReport:
    method = ErrorMethod(error_method)
    try:
        tc, dtc, Ec, dEc = critical_point(inputs, conventions.content)
    except NumericalFailure as exc:
        raise _tag(exc, "critical-scale") from None
    central = run_pipeline(
        np.array([inputs.gauge]), inputs.mT.value, inputs.mW.value, tc, conventions
    )
    lam0 = float(central.lambda0[0])
    mH = mass_from_lambda(lam0, inputs.g2.value, inputs.mW.value, conventions.mh_coefficient)

    if method is ErrorMethod.ENVELOPE:
        spread = envelope_spread(inputs, conventions)
        dmH, dlam = spread.mH_spread, spread.lambda0_spread
    else:
        _, mHs, lams = montecarlo_samples(inputs, conventions, n_samples, seed)
        dmH, dlam = _sample_std(mHs), _sample_std(lams)

    return PredictionReport(
        tc=tc,
        tc_err=dtc,
        Ec_GeV=Ec,
        Ec_err_GeV=dEc,
        gt0=float(central.gt0[0]),
        gt_tc=float(central.gt_tc[0]),
        lambda0=lam0,
        lambda0_err=dlam,
        mH_GeV=mH,
        mH_err_GeV=dmH,
        convention=conventions.boundary.value,
        error_method=method.value,
        mh_coefficient=conventions.mh_coefficient,
    )
