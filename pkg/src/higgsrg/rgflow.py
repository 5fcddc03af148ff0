"""One-loop beta functions and a fixed-step RK4 engine for (g1, g2, g3, gt, lambda).

Beta functions are in the MS-bar scheme and the top-quark mass approximation.
The state vector layout used throughout is ``[g1, g2, g3, gt, lambda]``.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError, InputError, NumericalFailure

PI2 = math.pi**2
K16 = 16.0 * PI2

# d(1/g_i^2)/dt for the analytic gauge running.
GAUGE_SLOPES = (-41.0 / (48.0 * PI2), 19.0 / (48.0 * PI2), 7.0 / (8.0 * PI2))
GAUGE_NAMES = ("g1", "g2", "g3")

COMPONENTS = ("g1", "g2", "g3", "gt", "lambda")
GAUGE, TOP, LAMBDA = "gauge", "top", "lambda"
ALL_ACTIVE = frozenset({GAUGE, TOP, LAMBDA})

BLOWUP_THRESHOLD = 1e6
MAX_STEP = 0.1
# Longest allowed run in t; ln(M_Planck/m_Z) is about 40.
MAX_SPAN = 1000.0


@dataclass(frozen=True)
class CouplingState:
    t: float
    g1: float
    g2: float
    g3: float
    gt: float
    lam: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.t, *self.couplings)):
            raise InputError(f"non-finite coupling state {self!r}")

    @property
    def couplings(self) -> tuple[float, float, float, float, float]:
        return (self.g1, self.g2, self.g3, self.gt, self.lam)

    def as_array(self) -> np.ndarray:
        return np.array(self.couplings, dtype=np.float64)

    @classmethod
    def from_array(cls, t: float, y) -> "CouplingState":
        return cls(float(t), *(float(v) for v in y))


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class IntegratorOptions:
    step_size: float = 1e-3
    method: str = "rk4"
    # Smallest admissible 1/g^2 of an active gauge coupling on the interval.
    pole_guard_margin: float = 1e-3

    def __post_init__(self):
        if not (0.0 < self.step_size <= MAX_STEP):
            raise InputError(f"step_size must lie in (0, {MAX_STEP}], got {self.step_size!r}")
        if self.method != "rk4":
            raise InputError(f"unsupported method {self.method!r}; only 'rk4' is available")
        if not self.pole_guard_margin > 0:
            raise InputError("pole_guard_margin must be positive")


DEFAULT_OPTIONS = IntegratorOptions()


# --- beta functions ---------------------------------------------------------


def beta_gauge(state: CouplingState) -> tuple[float, float, float]:
    g1, g2, g3 = state.g1, state.g2, state.g3
    return (
        41.0 * g1**3 / (96.0 * PI2),
        -19.0 * g2**3 / (96.0 * PI2),
        -7.0 * g3**3 / (16.0 * PI2),
    )


def beta_top(state: CouplingState) -> float:
    g1, g2, g3, gt = state.g1, state.g2, state.g3, state.gt
    return (9.0 * gt**3 - (8.0 * g3**2 + 2.25 * g2**2 + (17.0 / 12.0) * g1**2) * gt) / K16


def beta_lambda(state: CouplingState) -> float:
    g1, g2, gt, lam = state.g1, state.g2, state.gt, state.lam
    return (
        96.0 * lam**2
        + (24.0 * gt**2 - 9.0 * g2**2 - 3.0 * g1**2) * lam
        - 6.0 * gt**4
        + (9.0 / 32.0) * g2**4
        + (3.0 / 32.0) * g1**4
        + (3.0 / 16.0) * g1**2 * g2**2
    ) / K16


def gauge_analytic(t, A1: float, A2: float, A3: float):
    """Closed-form one-loop gauge couplings ``g_i(t) = (A_i + c_i t)^(-1/2)``.

    Works elementwise on array ``t``.  Raises :class:`DomainError` naming the
    first coupling whose radicand is not positive.
    """
    t = np.asarray(t, dtype=np.float64)
    out = []
    for name, A, c in zip(GAUGE_NAMES, (A1, A2, A3), GAUGE_SLOPES):
        rad = A + c * t
        if np.any(~(rad > 0)):
            what = "Landau pole" if c < 0 else "non-positive radicand"
            raise DomainError(f"{name}: {what} reached (1/g^2 = {np.min(rad):.6g})", coupling=name)
        g = 1.0 / np.sqrt(rad)
        out.append(float(g) if g.ndim == 0 else g)
    return tuple(out)


# --- RK4 kernel -------------------------------------------------------------


@njit(cache=True, inline="always")
def _rhs(g1, g2, g3, gt, lam, sign, mg, mt, ml):
    g1s = g1 * g1
    g2s = g2 * g2
    g3s = g3 * g3
    gts = gt * gt
    d1 = mg * sign * (41.0 * g1s * g1 / (96.0 * PI2))
    d2 = mg * sign * (-19.0 * g2s * g2 / (96.0 * PI2))
    d3 = mg * sign * (-7.0 * g3s * g3 / (16.0 * PI2))
    d4 = mt * sign * ((9.0 * gts * gt - (8.0 * g3s + 2.25 * g2s + (17.0 / 12.0) * g1s) * gt) / K16)
    d5 = ml * sign * (
        (
            96.0 * lam * lam
            + (24.0 * gts - 9.0 * g2s - 3.0 * g1s) * lam
            - 6.0 * gts * gts
            + (9.0 / 32.0) * g2s * g2s
            + (3.0 / 32.0) * g1s * g1s
            + (3.0 / 16.0) * g1s * g2s
        )
        / K16
    )
    return d1, d2, d3, d4, d5


@njit(cache=True, inline="always")
def _rk4(a, b, c, d, e, hk, sign, mg, mt, ml):
    hh = 0.5 * hk
    k10, k11, k12, k13, k14 = _rhs(a, b, c, d, e, sign, mg, mt, ml)
    k20, k21, k22, k23, k24 = _rhs(
        a + hh * k10, b + hh * k11, c + hh * k12, d + hh * k13, e + hh * k14, sign, mg, mt, ml
    )
    k30, k31, k32, k33, k34 = _rhs(
        a + hh * k20, b + hh * k21, c + hh * k22, d + hh * k23, e + hh * k24, sign, mg, mt, ml
    )
    k40, k41, k42, k43, k44 = _rhs(
        a + hk * k30, b + hk * k31, c + hk * k32, d + hk * k33, e + hk * k34, sign, mg, mt, ml
    )
    h6 = hk / 6.0
    return (
        a + h6 * (k10 + 2.0 * k20 + 2.0 * k30 + k40),
        b + h6 * (k11 + 2.0 * k21 + 2.0 * k31 + k41),
        c + h6 * (k12 + 2.0 * k22 + 2.0 * k32 + k42),
        d + h6 * (k13 + 2.0 * k23 + 2.0 * k33 + k43),
        e + h6 * (k14 + 2.0 * k24 + 2.0 * k34 + k44),
    )


@njit(cache=True, inline="always")
def _bounded(a, b, c, d, e, threshold):
    # NaN fails every comparison, so it is caught here too.
    return (
        abs(a) <= threshold
        and abs(b) <= threshold
        and abs(c) <= threshold
        and abs(d) <= threshold
        and abs(e) <= threshold
    )


@njit(cache=True)
def _n_steps(s0, s1, h):
    span = s1 - s0
    if span <= 0.0:
        return 0
    n_full = int(math.floor(span / h))
    if span - n_full * h > 1e-12 * max(1.0, span):
        return n_full + 1
    return max(n_full, 1)


@njit(cache=True, inline="always")
def _step_length(k, n, s0, s1, h):
    if k < n - 1:
        return (s0 + (k + 1) * h) - (s0 + k * h)
    if k == n - 1:
        return s1 - (s0 + k * h)
    return 0.0


@njit(cache=True)
def _integrate_row(y, t0, t1, h, mask, threshold, ts, ys):
    """Advance ``y`` from t0 to t1 recording every sample.

    Backward runs integrate ``s = -t`` with the negated field.  Returns
    ``(status, last_good_t)``; status 0 ok, 1 blow-up.
    """
    mg, mt, ml = mask[0], mask[3], mask[4]
    sign = 1.0 if t1 >= t0 else -1.0
    s0 = sign * t0
    s1 = sign * t1
    n = _n_steps(s0, s1, h)
    a, b, c, d, e = y[0], y[1], y[2], y[3], y[4]
    ts[0] = t0
    for i in range(5):
        ys[0, i] = y[i]
    last = t0
    for k in range(n):
        hk = _step_length(k, n, s0, s1, h)
        a, b, c, d, e = _rk4(a, b, c, d, e, hk, sign, mg, mt, ml)
        if not _bounded(a, b, c, d, e, threshold):
            return 1, last
        last = t1 if k == n - 1 else sign * (s0 + (k + 1) * h)
        ts[k + 1] = last
        ys[k + 1, 0] = a
        ys[k + 1, 1] = b
        ys[k + 1, 2] = c
        ys[k + 1, 3] = d
        ys[k + 1, 4] = e
    return 0, last


@njit(cache=True)
def _integrate_batch(Y, t0, t1, h, mask, threshold, status, last_t):
    """Endpoint-only integration of many rows.

    Rows advance in lock step with the row loop innermost so it vectorizes;
    per-row arithmetic is identical to :func:`_integrate_row`.
    """
    mg, mt, ml = mask[0], mask[3], mask[4]
    m = Y.shape[0]
    sign = np.empty(m)
    s0 = np.empty(m)
    s1 = np.empty(m)
    nst = np.empty(m, np.int64)
    n_max = 0
    for r in range(m):
        sign[r] = 1.0 if t1[r] >= t0[r] else -1.0
        s0[r] = sign[r] * t0[r]
        s1[r] = sign[r] * t1[r]
        nst[r] = _n_steps(s0[r], s1[r], h)
        n_max = max(n_max, nst[r])
        status[r] = 0
        last_t[r] = t0[r]
    a = Y[:, 0].copy()
    b = Y[:, 1].copy()
    c = Y[:, 2].copy()
    d = Y[:, 3].copy()
    e = Y[:, 4].copy()
    hk = np.empty(m)
    for k in range(n_max):
        for r in range(m):
            hk[r] = _step_length(k, nst[r], s0[r], s1[r], h) if status[r] == 0 else 0.0
        for r in range(m):
            a[r], b[r], c[r], d[r], e[r] = _rk4(a[r], b[r], c[r], d[r], e[r], hk[r], sign[r], mg, mt, ml)
        for r in range(m):
            if status[r] == 0 and k < nst[r]:
                if _bounded(a[r], b[r], c[r], d[r], e[r], threshold):
                    last_t[r] = t1[r] if k == nst[r] - 1 else sign[r] * (s0[r] + (k + 1) * h)
                else:
                    status[r] = 1
    for r in range(m):
        Y[r, 0] = a[r]
        Y[r, 1] = b[r]
        Y[r, 2] = c[r]
        Y[r, 3] = d[r]
        Y[r, 4] = e[r]


# --- public integration API -------------------------------------------------


def _mask(active) -> np.ndarray:
    active = frozenset(active)
    unknown = active - ALL_ACTIVE
    if unknown:
        raise InputError(f"unknown active components {sorted(unknown)}")
    return np.array(
        [GAUGE in active] * 3 + [TOP in active, LAMBDA in active], dtype=np.float64
    )


def _check_pole_guard(Y0, t0, t1, margin: float, mask) -> None:
    if not mask[0]:
        return
    for i, (name, c) in enumerate(zip(GAUGE_NAMES, GAUGE_SLOPES)):
        g = Y0[:, i]
        with np.errstate(divide="ignore"):
            A = 1.0 / (g * g)
        # 1/g^2 is affine in t, so its minimum sits at an endpoint.
        rad = A + c * (t1 - t0)
        bad = np.isfinite(A) & ~(np.minimum(A, rad) >= margin)
        if np.any(bad):
            r = int(np.argmax(bad))
            pole = t0[r] + (margin - A[r]) / c
            raise DomainError(
                f"{name} leaves the perturbative domain near t = {pole:.6g} "
                f"(requested interval [{t0[r]:.6g}, {t1[r]:.6g}])",
                coupling=name,
            )


@dataclass(frozen=True)
class FlowTrajectory:
    t: np.ndarray  # shape (m,)
    y: np.ndarray  # shape (m, 5)
    step_size: float
    direction: Direction

    def __len__(self):
        return len(self.t)

    @property
    def samples(self) -> list[CouplingState]:
        return [CouplingState.from_array(t, y) for t, y in zip(self.t, self.y)]

    @property
    def initial(self) -> CouplingState:
        return CouplingState.from_array(self.t[0], self.y[0])

    @property
    def final(self) -> CouplingState:
        return CouplingState.from_array(self.t[-1], self.y[-1])

    def to_csv(self, mZ: float, stride: int = 1) -> str:
        """CSV with header ``t,E_GeV,g1,g2,g3,gt,lambda``; the last sample is always kept."""
        if stride < 1:
            raise InputError("stride must be >= 1")
        idx = list(range(0, len(self.t), stride))
        if idx[-1] != len(self.t) - 1:
            idx.append(len(self.t) - 1)
        buf = io.StringIO()
        buf.write("t,E_GeV,g1,g2,g3,gt,lambda\n")
        for i in idx:
            t = self.t[i]
            row = [t, mZ * math.exp(t), *self.y[i]]
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue()


def integrate(
    initial: CouplingState,
    t_target: float,
    opts: IntegratorOptions | None = None,
    active=ALL_ACTIVE,
) -> FlowTrajectory:
    """Integrate from ``initial.t`` to ``t_target`` with classical fixed-step RK4.

    Inactive components are held frozen.  The final sample sits exactly at
    ``t_target``; the last step is shortened where needed.
    """
    opts = opts or DEFAULT_OPTIONS
    if not math.isfinite(t_target):
        raise InputError("t_target must be finite")
    mask = _mask(active)
    y = initial.as_array()
    t0 = float(initial.t)
    if abs(t_target - t0) > MAX_SPAN:
        raise InputError(f"integration span {abs(t_target - t0):.6g} exceeds {MAX_SPAN:g}")
    _check_pole_guard(y[None, :], np.array([t0]), np.array([t_target]), opts.pole_guard_margin, mask)

    h = opts.step_size
    sign = 1.0 if t_target >= t0 else -1.0
    n = int(_n_steps(sign * t0, sign * t_target, h))
    ts = np.empty(n + 1)
    ys = np.empty((n + 1, 5))
    status, last = _integrate_row(y, t0, float(t_target), h, mask, BLOWUP_THRESHOLD, ts, ys)
    if status:
        raise NumericalFailure(f"coupling blow-up after t = {last:.6g}", last_t=float(last))
    direction = Direction.FORWARD if sign > 0 else Direction.BACKWARD
    return FlowTrajectory(ts, ys, h, direction)


def integrate_many(
    Y0,
    t0,
    t1,
    opts: IntegratorOptions | None = None,
    active=ALL_ACTIVE,
    check_poles: bool = True,
):
    """Integrate many independent rows to their own targets; only endpoints are kept.

    Returns ``(Y1, status, last_t)``.  Rows that blow up keep ``status == 1``
    and are not raised here so callers can take a failure census.
    """
    opts = opts or DEFAULT_OPTIONS
    Y = np.array(Y0, dtype=np.float64, copy=True)
    if Y.ndim != 2 or Y.shape[1] != 5:
        raise InputError("Y0 must have shape (n, 5)")
    n = Y.shape[0]
    t0 = np.broadcast_to(np.asarray(t0, dtype=np.float64), (n,)).copy()
    t1 = np.broadcast_to(np.asarray(t1, dtype=np.float64), (n,)).copy()
    if np.any(~(np.abs(t1 - t0) <= MAX_SPAN)):
        raise InputError(f"integration span must be finite and at most {MAX_SPAN:g}")
    mask = _mask(active)
    if check_poles:
        _check_pole_guard(Y, t0, t1, opts.pole_guard_margin, mask)
    status = np.zeros(n, dtype=np.int64)
    last_t = np.empty(n)
    _integrate_batch(Y, t0, t1, opts.step_size, mask, BLOWUP_THRESHOLD, status, last_t)
    return Y, status, last_t
