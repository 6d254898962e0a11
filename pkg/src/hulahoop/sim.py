"""Numerical integration of the hoop equation and what we read off it.

Integration is fixed-step RK4 (see ``_kernels``). On top of trajectories
this module detects rotational capture, locates the first loss of contact,
scores analytic approximations against simulation and runs parameter
sweeps that map where co- and counter-rotation are possible.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from . import exact, model, perturb
from ._kernels import rk4_hoop
from .errors import BranchMismatch, HulaHoopError, InvalidParameter, NonFinite, TooShort
from .model import Params, State

DEFAULT_STEP = 1e-3
DEFAULT_WINDOW = 20 * math.pi
CAPTURE_STD_TOL = 0.02
RHO_TOL = 0.05
EVENT_TOL = 1e-8


@dataclass(frozen=True)
class Trajectory:
    tau: np.ndarray
    phi: np.ndarray
    phi_dot: np.ndarray
    margin: np.ndarray
    step: float
    stride: int
    params: Params

    @property
    def samples(self) -> np.ndarray:
        """(n, 4) array of tau, phi, phi_dot, margin rows."""
        return np.column_stack([self.tau, self.phi, self.phi_dot, self.margin])

    @property
    def spacing(self) -> float:
        return self.stride * self.step

    def __len__(self):
        return len(self.tau)

    def state_at(self, tau: float) -> State:
        """State at an arbitrary time, integrated from the preceding sample."""
        if not self.tau[0] <= tau <= self.tau[-1]:
            raise ValueError(f"tau={tau!r} outside the trajectory span")
        i = min(int((tau - self.tau[0]) / self.spacing), len(self.tau) - 1)
        while i > 0 and self.tau[i] > tau:
            i -= 1
        start = State(float(self.phi[i]), float(self.phi_dot[i]))
        return propagate(self.params, start, float(self.tau[i]), tau, self.step)


def _n_steps(span, step):
    return max(1, math.ceil(span / step - 1e-9))


def integrate(
    p: Params,
    s0: State,
    tau_end: float,
    step: float = DEFAULT_STEP,
    stride: int = 1,
    tau0: float = 0.0,
) -> Trajectory:
    """Integrate from ``tau0`` until at least ``tau_end``.

    The step count is rounded up to a multiple of ``stride`` so the final
    state is always sampled. Contact loss does not stop the run.
    """
    if not step > 0:
        raise InvalidParameter("step", "must be positive")
    if not tau_end > tau0:
        raise InvalidParameter("tau_end", "must exceed the start time")
    if stride < 1:
        raise InvalidParameter("stride", "must be at least 1")
    n_out = math.ceil(_n_steps(tau_end - tau0, step) / stride)
    n_steps = n_out * stride
    phi = np.empty(n_out + 1)
    phi_dot = np.empty(n_out + 1)
    written = rk4_hoop(
        float(s0.phi), float(s0.phi_dot), float(tau0), float(step), n_steps, stride,
        p.gamma, p.alpha, p.beta, phi, phi_dot,
    )
    tau = tau0 + np.arange(n_out + 1) * (stride * step)
    if written < n_out + 1:
        raise NonFinite(
            f"state left the finite range after tau={tau[written - 1]!r}",
            last_good_tau=float(tau[written - 1]),
        )
    margin = model.contact_margin(tau, State(phi, phi_dot), p)
    return Trajectory(tau, phi, phi_dot, margin, step, stride, p)


def propagate(p: Params, s: State, tau0: float, tau1: float, step: float = DEFAULT_STEP) -> State:
    """Advance a state from ``tau0`` to ``tau1`` with equal substeps <= ``step``."""
    if tau1 == tau0:
        return s
    n = _n_steps(tau1 - tau0, step)
    h = (tau1 - tau0) / n
    phi = np.empty(2)
    phi_dot = np.empty(2)
    rk4_hoop(float(s.phi), float(s.phi_dot), tau0, h, n, n, p.gamma, p.alpha, p.beta, phi, phi_dot)
    return State(float(phi[1]), float(phi_dot[1]))


@dataclass(frozen=True)
class CaptureReport:
    rho_hat: float
    psi_hat: float
    converged: bool
    contact_lost_at: Optional[float]
    transient_discarded: float

    @property
    def rho(self) -> int:
        """Rounded rotation rate; meaningful only when converged."""
        return int(round(self.rho_hat))

    def to_dict(self):
        return {
            "rho_hat": self.rho_hat,
            "psi_hat": self.psi_hat,
            "converged": self.converged,
            "contact_lost_at": self.contact_lost_at,
            "transient_discarded": self.transient_discarded,
        }


def _window_samples(t: Trajectory, window: float) -> int:
    k = int(round(window / t.spacing))
    if k < 1 or 2 * k >= len(t):
        raise TooShort(
            f"trajectory spans {t.tau[-1] - t.tau[0]!r}, needs more than twice the window {window!r}"
        )
    return k


def circular_mean(angles) -> float:
    return float(np.angle(np.mean(np.exp(1j * np.asarray(angles)))))


def wrap(angle):
    """Reduce to (-pi, pi]."""
    return -np.remainder(-np.asarray(angle) + math.pi, 2 * math.pi) + math.pi


def detect_capture(t: Trajectory, window: float = DEFAULT_WINDOW) -> CaptureReport:
    """Measure the mean rotation rate and locked phase over the final window.

    Convergence means the rounded rate is -1, 0 or +1 and ``phi - rho*tau``
    is flat up to its 2-tau vibration, which is removed by least squares.
    """
    k = _window_samples(t, window)
    tau = t.tau[-k - 1:]
    phi = t.phi[-k - 1:]
    rho_hat = float((phi[-1] - phi[0]) / (tau[-1] - tau[0]))
    rho = round(rho_hat)
    offset = phi - rho * tau

    design = np.column_stack([np.ones_like(tau), np.sin(2 * tau), np.cos(2 * tau)])
    coef, *_ = np.linalg.lstsq(design, offset, rcond=None)
    spread = float(np.std(offset - design @ coef))

    converged = (
        abs(rho_hat - rho) < RHO_TOL and rho in (-1, 0, 1) and spread < CAPTURE_STD_TOL
    )
    return CaptureReport(
        rho_hat=rho_hat,
        psi_hat=circular_mean(offset),
        converged=bool(converged),
        contact_lost_at=first_contact_loss(t),
        transient_discarded=float(tau[0] - t.tau[0]),
    )


def first_contact_loss(t: Trajectory) -> Optional[float]:
    """Earliest time at which the contact margin reaches zero, or None."""
    lost = np.flatnonzero(t.margin <= 0)
    if lost.size == 0:
        return None
    k = int(lost[0])
    if k == 0:
        return float(t.tau[0])
    p = t.params
    lo, hi = float(t.tau[k - 1]), float(t.tau[k])
    start = State(float(t.phi[k - 1]), float(t.phi_dot[k - 1]))
    while hi - lo > EVENT_TOL:
        mid = 0.5 * (lo + hi)
        s = propagate(p, start, float(t.tau[k - 1]), mid, t.step)
        if model.contact_margin(mid, s, p) <= 0:
            hi = mid
        else:
            lo = mid
    return hi


Branch = Union[exact.ExactBranch, perturb.FirstOrderSolution, perturb.SmallAmpSolution]


def analytic_state(branch: Branch, tau) -> State:
    if isinstance(branch, exact.ExactBranch):
        tau = np.asarray(tau, dtype=float)
        return State(branch.phase(tau), np.ones_like(tau))
    if isinstance(branch, perturb.FirstOrderSolution):
        return perturb.eval_first_order(tau, branch)
    if isinstance(branch, perturb.SmallAmpSolution):
        return perturb.eval_small_amp(tau, branch)
    raise TypeError(f"unsupported branch descriptor {type(branch).__name__}")


def analytic_residual(branch: Branch, tau, p: Params):
    """Equation-of-motion residual of an analytic solution."""
    if isinstance(branch, exact.ExactBranch):
        # phi'' vanishes on a uniform rotation
        return -model.rhs(tau, analytic_state(branch, tau), p)
    if isinstance(branch, perturb.FirstOrderSolution):
        return perturb.first_order_residual(tau, branch)
    return perturb.small_amp_residual(tau, branch)


@dataclass(frozen=True)
class Comparison:
    max_abs_phase_error: float
    rms_phase_error: float
    residual_max: float

    def to_dict(self):
        return {
            "max_abs_phase_error": self.max_abs_phase_error,
            "rms_phase_error": self.rms_phase_error,
            "residual_max": self.residual_max,
        }


def default_transient(t: Trajectory) -> float:
    return max(0.5 * (t.tau[-1] - t.tau[0]), 100.0)


def compare_to_analytic(
    t: Trajectory,
    branch: Branch,
    transient: Optional[float] = None,
    window: float = DEFAULT_WINDOW,
) -> Comparison:
    """Phase error of an analytic rotation against a simulated one.

    Errors are taken modulo 2 pi, since the simulation may settle on any
    sheet of the phase family. Only the post-transient tail is scored.
    """
    report = detect_capture(t, window)
    if not report.converged or report.rho != branch.rho:
        raise BranchMismatch(
            f"simulation settled at rho_hat={report.rho_hat:.6f} "
            f"(converged={report.converged}), branch rotates with rho={branch.rho}"
        )
    if transient is None:
        transient = default_transient(t)
    tail = t.tau >= t.tau[0] + transient
    if not tail.any():
        raise TooShort(f"nothing left after discarding a transient of {transient!r}")
    tau = t.tau[tail]
    err = wrap(t.phi[tail] - analytic_state(branch, tau).phi)
    resid = analytic_residual(branch, tau, t.params)
    return Comparison(
        max_abs_phase_error=float(np.max(np.abs(err))),
        rms_phase_error=float(np.sqrt(np.mean(err**2))),
        residual_max=float(np.max(np.abs(resid))),
    )


# ---------------------------------------------------------------- sweeps


class Regime(str, Enum):
    CW = "CW"
    CCW = "CCW"
    BOTH = "Both"
    NONE = "None"
    CONTACT_LOSS = "ContactLoss"


SWEEP_AXES = ("gamma", "alpha", "beta", "eps", "mu")


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in SWEEP_AXES:
            raise InvalidParameter("axis", f"unknown parameter {self.name!r}; choose from {SWEEP_AXES}")
        if not all(math.isfinite(v) for v in self.values):
            raise InvalidParameter("axis", f"non-finite value on axis {self.name!r}")

    @classmethod
    def linspace(cls, name: str, start: float, stop: float, count: int) -> "Axis":
        if count < 1:
            raise InvalidParameter("axis", "count must be at least 1")
        return cls(name, tuple(float(v) for v in np.linspace(start, stop, count)))

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``name:start:stop:count``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise InvalidParameter("axis", f"expected name:start:stop:count, got {text!r}")
        name, start, stop, count = parts
        try:
            return cls.linspace(name, float(start), float(stop), int(count))
        except ValueError as exc:
            if isinstance(exc, InvalidParameter):
                raise
            raise InvalidParameter("axis", f"bad number in {text!r}") from exc


def with_value(p: Params, name: str, value: float) -> Params:
    if name == "gamma":
        return replace(p, gamma=value)
    if name == "alpha":
        return replace(p, alpha=value)
    if name == "beta":
        return replace(p, beta=value)
    if name == "eps":
        return Params.from_rotating(p.gamma, value, p.mu)
    if name == "mu":
        return Params.from_rotating(p.gamma, p.eps, value)
    raise InvalidParameter("axis", f"unknown parameter {name!r}")


@dataclass(frozen=True)
class SweepProtocol:
    """How each sweep cell is simulated and judged."""

    tau_end: float = 1500.0
    step: float = DEFAULT_STEP
    stride: int = 10
    window: float = DEFAULT_WINDOW
    workers: int = 1


def seed_states(p: Params) -> tuple[State, State]:
    """Initial states near the co- and counter-rotating analytic branches."""
    try:
        cw = State(perturb.small_amp_solution(1, p.gamma, p.eps, p.mu).phi0, 1.0)
    except (HulaHoopError, ValueError):
        cw = State(-math.pi / 2, 1.0)
    try:
        ccw = State(perturb.small_amp_solution(-1, p.gamma, p.eps, p.mu).phi0, -1.0)
    except (HulaHoopError, ValueError):
        ccw = State(math.pi / 2, -1.0)
    return cw, ccw


@dataclass(frozen=True)
class CellResult:
    verdict: Regime
    psi_cw: float = math.nan
    psi_ccw: float = math.nan
    contact_loss_tau: Optional[float] = None
    error: Optional[str] = None


def _holds_contact(t: Trajectory, window: float) -> bool:
    k = _window_samples(t, window)
    return bool(np.all(t.margin[-k - 1:] > 0))


def classify_cell(p: Params, protocol: SweepProtocol = SweepProtocol()) -> CellResult:
    """Run both seeded simulations for one parameter point and judge them."""
    try:
        outcomes = []
        for seed in seed_states(p):
            t = integrate(p, seed, protocol.tau_end, protocol.step, protocol.stride)
            report = detect_capture(t, protocol.window)
            rho = report.rho if report.converged else 0
            outcomes.append((rho, _holds_contact(t, protocol.window), report))
    except (HulaHoopError, ValueError) as exc:
        return CellResult(Regime.NONE, error=f"{type(exc).__name__}: {exc}")

    (cw_rho, cw_keep, cw_rep), (ccw_rho, ccw_keep, ccw_rep) = outcomes
    losses = [r.contact_lost_at for _, _, r in outcomes if r.contact_lost_at is not None]
    held = {rho for rho, keep, _ in outcomes if keep and rho != 0}

    if cw_rho == 1 and cw_keep and ccw_rho == -1 and ccw_keep:
        verdict = Regime.BOTH
    elif 1 in held:
        verdict = Regime.CW
    elif -1 in held:
        verdict = Regime.CCW
    elif any(rho != 0 for rho, _, _ in outcomes):
        verdict = Regime.CONTACT_LOSS
    else:
        verdict = Regime.NONE
    return CellResult(
        verdict=verdict,
        psi_cw=cw_rep.psi_hat if cw_rho == 1 else math.nan,
        psi_ccw=ccw_rep.psi_hat if ccw_rho == -1 else math.nan,
        contact_loss_tau=min(losses) if losses else None,
    )


@dataclass(frozen=True)
class RegimeMap:
    axis1: Axis
    axis2: Optional[Axis]
    cells: tuple  # row-major: cells[i][j] for axis1[i], axis2[j]

    @property
    def shape(self):
        return (len(self.axis1.values), len(self.axis2.values) if self.axis2 else 1)

    @property
    def verdicts(self):
        return [[c.verdict for c in row] for row in self.cells]

    def rows(self):
        """Flat records in cell-index order."""
        second = self.axis2.values if self.axis2 else (math.nan,)
        for i, v1 in enumerate(self.axis1.values):
            for j, v2 in enumerate(second):
                yield v1, v2, self.cells[i][j]


def _cell_task(args):
    p, protocol = args
    return classify_cell(p, protocol)


def sweep(
    base: Params,
    axis1: Axis,
    axis2: Optional[Axis] = None,
    protocol: SweepProtocol = SweepProtocol(),
) -> RegimeMap:
    """Classify every grid point; cell order never depends on scheduling."""
    names = {axis1.name, axis2.name if axis2 else axis1.name}
    if names & {"eps", "mu"} and names & {"alpha", "beta"}:
        raise InvalidParameter("axis", "do not mix alpha/beta axes with eps/mu axes")
    second: Sequence = axis2.values if axis2 else (None,)
    n_cells = len(axis1.values) * len(second)
    if n_cells > 10_000:
        raise InvalidParameter("axis", f"{n_cells} cells exceeds the limit of 10000")

    tasks = []
    for v1 in axis1.values:
        for v2 in second:
            p = with_value(base, axis1.name, v1)
            if axis2 is not None:
                p = with_value(p, axis2.name, v2)
            tasks.append((p, protocol))

    if protocol.workers > 1:
        with ProcessPoolExecutor(max_workers=protocol.workers) as pool:
            flat = list(pool.map(_cell_task, tasks))
    else:
        flat = [_cell_task(t) for t in tasks]

    width = len(second)
    cells = tuple(tuple(flat[i * width:(i + 1) * width]) for i in range(len(axis1.values)))
    return RegimeMap(axis1, axis2, cells)
