"""Experimental inputs, physical constants and the line-oriented config format.

All gauge couplings are given at the reference scale ``E0 = mZ``; the RG
scale parameter is ``t = ln(E / mZ)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import InputError

# External constants (not taken from the measurement tables below).
PLANCK_MASS_GEV = 1.2209e19
HBARC_GEV_CM = 1.9733e-14
GEV_TO_INV_CM = 5.0677e13


@dataclass(frozen=True)
class ExperimentalValue:
    """Measured quantity with a symmetric absolute error."""

    value: float
    abs_error: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise InputError(f"value must be finite, got {self.value!r}")
        if not math.isfinite(self.abs_error) or self.abs_error < 0:
            raise InputError(f"abs_error must be finite and >= 0, got {self.abs_error!r}")

    @property
    def lo(self) -> float:
        return self.value - self.abs_error

    @property
    def hi(self) -> float:
        return self.value + self.abs_error

    def __str__(self):
        return f"{self.value:g} ± {self.abs_error:g}"


class TopMode(str, enum.Enum):
    DIRECT = "direct"  # direct observation of top events
    EWFIT = "ewfit"  # Standard Model electroweak fit
    CUSTOM = "custom"


TOP_MASS = {
    TopMode.DIRECT: ExperimentalValue(174.2, 3.3),
    TopMode.EWFIT: ExperimentalValue(172.3, 10.2),
}

DEFAULT_G1 = ExperimentalValue(0.34537, 0.00003)
DEFAULT_G2 = ExperimentalValue(0.62976, 0.00020)
DEFAULT_G3 = ExperimentalValue(1.22132, 0.00290)
DEFAULT_MZ = ExperimentalValue(91.1876, 0.0021)
DEFAULT_MW = ExperimentalValue(80.403, 0.029)

_QUANTITIES = ("g1", "g2", "g3", "mZ", "mW", "mT")


@dataclass(frozen=True)
class InputSet:
    g1: ExperimentalValue = DEFAULT_G1
    g2: ExperimentalValue = DEFAULT_G2
    g3: ExperimentalValue = DEFAULT_G3
    mZ: ExperimentalValue = DEFAULT_MZ
    mW: ExperimentalValue = DEFAULT_MW
    mT: ExperimentalValue = TOP_MASS[TopMode.DIRECT]
    top_mode: TopMode = TopMode.DIRECT
    # Config keys that replaced a default; informational only.
    overridden: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        for name in _QUANTITIES:
            v = getattr(self, name)
            if not isinstance(v, ExperimentalValue):
                raise InputError(f"{name} must be an ExperimentalValue")
            if v.value <= 0:
                raise InputError(f"{name} must be positive, got {v.value!r}")
        mode = TopMode(self.top_mode)
        object.__setattr__(self, "top_mode", mode)
        if mode is not TopMode.CUSTOM and self.mT != TOP_MASS[mode]:
            raise InputError(
                f"mT = {self.mT} conflicts with top_mode = {mode.value}; use top_mode = custom"
            )

    @classmethod
    def default(cls, top_mode: TopMode | str = TopMode.DIRECT) -> "InputSet":
        mode = TopMode(top_mode)
        if mode is TopMode.CUSTOM:
            raise InputError("custom top mode requires an explicit top mass")
        return cls(mT=TOP_MASS[mode], top_mode=mode)

    @classmethod
    def historical(cls) -> "InputSet":
        """Older inputs (mT = 175 ± 6 GeV era) used for the comparison runs.

        That data set carries no errors for the gauge couplings, so they
        are taken as exact.
        """
        return cls(
            g1=ExperimentalValue(0.3575),
            g2=ExperimentalValue(0.6507),
            g3=ExperimentalValue(1.218),
            mZ=ExperimentalValue(91.187),
            mW=ExperimentalValue(80.33, 0.15),
            mT=ExperimentalValue(175.0, 6.0),
            top_mode=TopMode.CUSTOM,
        )

    def with_top_mass(self, value: float, error: float | None = None) -> "InputSet":
        err = self.mT.abs_error if error is None else error
        return replace(self, mT=ExperimentalValue(value, err), top_mode=TopMode.CUSTOM)

    def with_top_mode(self, mode: TopMode | str) -> "InputSet":
        mode = TopMode(mode)
        if mode is TopMode.CUSTOM:
            return replace(self, top_mode=mode)
        return replace(self, mT=TOP_MASS[mode], top_mode=mode)

    def without_errors(self) -> "InputSet":
        kw = {n: ExperimentalValue(getattr(self, n).value) for n in _QUANTITIES}
        return replace(self, top_mode=TopMode.CUSTOM, **kw)

    @property
    def gauge(self) -> tuple[float, float, float]:
        return (self.g1.value, self.g2.value, self.g3.value)

    @property
    def gauge_errors(self) -> tuple[float, float, float]:
        return (self.g1.abs_error, self.g2.abs_error, self.g3.abs_error)

    @property
    def inverse_squares(self) -> tuple[float, float, float]:
        """``A_i = 1/g_i(0)^2``."""
        return tuple(1.0 / (g * g) for g in self.gauge)

    @property
    def inverse_square_errors(self) -> tuple[float, float, float]:
        """First-order errors ``dA_i = 2 dg_i / g_i^3``."""
        return tuple(2.0 * dg / g**3 for g, dg in zip(self.gauge, self.gauge_errors))

    @property
    def gt0(self) -> float:
        return gt_initial(self.mT.value, self.mW.value, self.g2.value)

    @property
    def gt0_error(self) -> float:
        """Linear propagation of the mT, mW and g2 errors into ``gt(0)``."""
        return self.gt0 * (
            self.mT.abs_error / self.mT.value
            + self.mW.abs_error / self.mW.value
            + self.g2.abs_error / self.g2.value
        )


def couplings_from_empirical(alpha: float, sin2_thetaW: float, alphaS: float):
    """Gauge couplings from the fine-structure constant, mixing angle and alpha_S.

    ``g1 = e / cos(theta_W)``, ``g2 = e / sin(theta_W)``, ``g3 = sqrt(4 pi alpha_S)``
    with ``e^2 = 4 pi alpha``.
    """
    if not 0.0 < sin2_thetaW < 1.0:
        raise InputError(f"sin^2(theta_W) must lie in (0, 1), got {sin2_thetaW!r}")
    if not alpha > 0 or not alphaS > 0:
        raise InputError("alpha and alpha_S must be positive")
    e2 = 4.0 * math.pi * alpha
    g1 = math.sqrt(e2 / (1.0 - sin2_thetaW))
    g2 = math.sqrt(e2) / math.sqrt(sin2_thetaW)
    g3 = math.sqrt(4.0 * math.pi * alphaS)
    return g1, g2, g3


def gt_initial(mT: float, mW: float, g2_0: float) -> float:
    """Top Yukawa coupling at the reference scale from ``gt/g2 = mT/(2 mW)``."""
    if mT <= 0 or mW <= 0 or g2_0 <= 0:
        raise InputError("mT, mW and g2 must be positive")
    return 0.5 * (mT / mW) * g2_0


# --- config document -------------------------------------------------------

_CONFIG_KEYS = tuple(k for q in _QUANTITIES for k in (q, f"{q}_err")) + ("top_mode",)


def load_config(text: str) -> InputSet:
    """Parse a ``key = value`` document into an :class:`InputSet`.

    Missing keys keep their defaults.  When ``top_mode`` is absent, giving
    ``mT`` or ``mT_err`` switches the mode to ``custom``.
    """
    values: dict[str, float | str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in _CONFIG_KEYS:
            raise InputError(f"unknown key {key!r}", line=lineno)
        if key in values:
            raise InputError(f"duplicate key {key!r}", line=lineno)
        if not val:
            raise InputError(f"missing value for {key!r}", line=lineno)
        if key == "top_mode":
            try:
                values[key] = TopMode(val.lower()).value
            except ValueError:
                raise InputError(
                    f"top_mode must be one of direct, ewfit, custom; got {val!r}", line=lineno
                ) from None
            continue
        try:
            num = float(val)
        except ValueError:
            raise InputError(f"{key} is not a number: {val!r}", line=lineno) from None
        if not math.isfinite(num):
            raise InputError(f"{key} must be finite", line=lineno)
        if key.endswith("_err") and num < 0:
            raise InputError(f"{key} must be >= 0", line=lineno)
        if not key.endswith("_err") and num <= 0:
            raise InputError(f"{key} must be positive", line=lineno)
        values[key] = num

    if "top_mode" in values:
        mode = TopMode(values["top_mode"])
    elif "mT" in values or "mT_err" in values:
        mode = TopMode.CUSTOM
    else:
        mode = TopMode.DIRECT

    base = InputSet() if mode is TopMode.CUSTOM else InputSet.default(mode)
    kw = {}
    for q in _QUANTITIES:
        cur = getattr(base, q)
        if q in values or f"{q}_err" in values:
            kw[q] = ExperimentalValue(
                float(values.get(q, cur.value)), float(values.get(f"{q}_err", cur.abs_error))
            )
    try:
        return replace(base, top_mode=mode, overridden=frozenset(values), **kw)
    except InputError as exc:
        raise InputError(f"inconsistent config: {exc}") from None


def load_config_file(path: str | Path) -> InputSet:
    return load_config(Path(path).read_text())


def dump_config(inputs: InputSet) -> str:
    """Serialize every field; ``load_config(dump_config(x)) == x`` exactly."""
    lines = []
    for f in fields(InputSet):
        if f.name in _QUANTITIES:
            v = getattr(inputs, f.name)
            lines.append(f"{f.name} = {v.value!r}")
            lines.append(f"{f.name}_err = {v.abs_error!r}")
    lines.append(f"top_mode = {inputs.top_mode.value}")
    return "\n".join(lines) + "\n"
