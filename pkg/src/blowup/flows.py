"""Scalar flows u' = B(u) on the half-line, and a numeric escape-time probe.

Three flows with closed forms serve as ground truth:

``sq``        B(x) = x^2        blows up from every x > 0 at time 1/x
``logistic``  B(x) = x(x-1)     global on [0, 1]; blows up from x > 1
``negsq``     B(x) = -x^2       global everywhere on the half-line

Escape times are ``float`` or ``None``; ``None`` means the trajectory never
escapes (it exists for all time).  IEEE infinities never enter arithmetic.

:func:`estimate_escape_time` integrates an arbitrary field numerically
(adaptive classical Runge-Kutta with step doubling) and reports either the
time the trajectory crossed a large cap, or survival to the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .expr import EvalDomainError

__all__ = [
    "ClosedFormFlow",
    "SQ",
    "LOGISTIC",
    "NEGSQ",
    "CLOSED_FORM_FLOWS",
    "BLEW_UP",
    "SURVIVED",
    "EscapeEstimate",
    "IntegrationError",
    "estimate_escape_time",
    "sample_eigenfunction",
]


class ClosedFormFlow:
    """A flow with an analytic solution map and escape-time function.

    ``apply(t, x)`` is the solution at time t starting from x; it raises
    ``ValueError`` when t reaches or passes the escape time.
    ``escape_time(x)`` returns a float, or ``None`` when the trajectory
    from x exists for all positive time.
    """

    def __init__(self, flow_id, field_text, field, apply_fn, escape_fn):
        self.flow_id = flow_id
        self.field_text = field_text
        self.field = field
        self._apply = apply_fn
        self._escape = escape_fn

    def apply(self, t: float, x: float) -> float:
        if t < 0.0:
            raise ValueError(f"time must be nonnegative, got {t!r}")
        m = self._escape(x)
        if m is not None and t >= m:
            raise ValueError(
                f"flow {self.flow_id!r} from x={x!r} escapes at time {m!r}; "
                f"cannot evaluate at t={t!r}"
            )
        return self._apply(t, x)

    def escape_time(self, x: float):
        if x < 0.0:
            raise ValueError(f"state must lie on the half-line, got {x!r}")
        return self._escape(x)

    def __repr__(self):
        return f"ClosedFormFlow({self.flow_id!r})"


# --- sq: u' = u^2, u(t) = x / (1 - t x), escapes at 1/x ---------------------

def _sq_apply(t, x):
    return x / (1.0 - t * x)


def _sq_escape(x):
    if x == 0.0:
        return None
    return 1.0 / x


# --- logistic: u' = u(u-1), u(t) = x / (x + e^t (1-x)) ----------------------
#
# States in [0, 1] flow toward 0 and live forever.  States above 1 grow and
# escape at ln(x / (x-1)), where the denominator x + e^t (1-x) hits zero.

def _logistic_apply(t, x):
    return x / (x + math.exp(t) * (1.0 - x))


def _logistic_escape(x):
    if x <= 1.0:
        return None
    return math.log(x / (x - 1.0))


# --- negsq: u' = -u^2, u(t) = x / (1 + t x), never escapes ------------------

def _negsq_apply(t, x):
    return x / (1.0 + t * x)


def _negsq_escape(x):
    return None


SQ = ClosedFormFlow("sq", "x^2", lambda x: x * x, _sq_apply, _sq_escape)
LOGISTIC = ClosedFormFlow(
    "logistic", "x*(x-1)", lambda x: x * (x - 1.0), _logistic_apply, _logistic_escape
)
NEGSQ = ClosedFormFlow("negsq", "-x^2", lambda x: -(x * x), _negsq_apply, _negsq_escape)

CLOSED_FORM_FLOWS = {"sq": SQ, "logistic": LOGISTIC, "negsq": NEGSQ}


def sample_eigenfunction(escape_fn, rate, xs):
    """exp(-rate * escape_time(x)) nodewise, with 0 where the time is infinite.

    ``escape_fn`` maps x to a float escape time or ``None``; the ``None``
    branch is the limit of the exponential, so no infinity is ever formed.
    Returns a list of floats matching ``xs``.
    """
    out = []
    for x in xs:
        m = escape_fn(x)
        out.append(0.0 if m is None else math.exp(-rate * m))
    return out


# --------------------------------------------------------------------------
# numeric escape-time estimation
# --------------------------------------------------------------------------

BLEW_UP = "blew-up"
SURVIVED = "survived"


class IntegrationError(RuntimeError):
    """The integrator could not resolve the trajectory to the requested accuracy."""


@dataclass
class EscapeEstimate:
    """Outcome of a numeric trajectory probe.

    status      BLEW_UP or SURVIVED
    time        estimated escape time (BLEW_UP) or the horizon (SURVIVED)
    final_state trajectory value when the probe stopped
    steps       number of accepted integrator steps
    """

    status: str
    time: float
    final_state: float
    steps: int

    @property
    def escaped(self) -> bool:
        return self.status == BLEW_UP


def _rk4_step(field, u, h):
    k1 = field(u)
    k2 = field(u + 0.5 * h * k1)
    k3 = field(u + 0.5 * h * k2)
    k4 = field(u + h * k3)
    return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def estimate_escape_time(
    field,
    x0: float,
    horizon: float = 10.0,
    cap: float = 1e8,
    h0: float = 1e-3,
    tol: float = 1e-10,
) -> EscapeEstimate:
    """Integrate u' = field(u) from x0 and watch for escape past ``cap``.

    Steps are classical fourth-order Runge-Kutta, adapted by step doubling:
    each step is taken once at h and twice at h/2, the discrepancy scaled by
    1 + |state| is the error estimate, and h is halved or (on very clean
    steps) doubled accordingly.  A trial step that leaves the field's domain
    or goes non-finite is treated as too big and retried at half the step,
    unless the state is still moderate, in which case the field itself is
    broken and the error propagates.

    On crossing ``cap`` the crossing time is located by linear interpolation
    within the final step.  If the step size collapses to the floor while
    the state's own timescale |u| / |field(u)| has shrunk below 1e-8 of the
    horizon, the remaining time to blow-up is negligible at the reporting
    precision and the current time is returned as the escape time;
    otherwise :class:`IntegrationError` is raised.
    """
    if horizon <= 0.0:
        raise ValueError(f"horizon must be positive, got {horizon!r}")
    if cap <= abs(x0):
        raise ValueError(f"cap {cap!r} must exceed the starting state {x0!r}")

    t = 0.0
    u = float(x0)
    h = min(h0, horizon)
    h_floor = 1e-14 * horizon
    steps = 0

    while t < horizon:
        h = min(h, horizon - t)
        try:
            full = _rk4_step(field, u, h)
            half = _rk4_step(field, _rk4_step(field, u, 0.5 * h), 0.5 * h)
            ok = math.isfinite(full) and math.isfinite(half)
        except EvalDomainError:
            if abs(u) < 1e6:
                raise  # the field is genuinely undefined near the trajectory
            ok = False
            half = full = 0.0

        if ok:
            err = abs(half - full) / (1.0 + abs(half))
            if err <= tol:
                u_new = half
                t_new = t + h
                steps += 1
                if abs(u_new) >= cap:
                    # locate the cap crossing inside this step
                    frac = (cap - abs(u)) / (abs(u_new) - abs(u))
                    return EscapeEstimate(BLEW_UP, t + frac * h, u_new, steps)
                t, u = t_new, u_new
                if err < tol / 64.0:
                    h *= 2.0
                continue

        h *= 0.5
        if h < h_floor:
            speed = abs(field(u))
            if speed > 0.0 and abs(u) / speed <= 1e-8 * horizon:
                # remaining time to blow-up is below reporting precision
                return EscapeEstimate(BLEW_UP, t, u, steps)
            raise IntegrationError(
                f"step size underflow at t={t!r}, state={u!r}: "
                f"trajectory stiff but not provably escaping"
            )

    return EscapeEstimate(SURVIVED, horizon, u, steps)
