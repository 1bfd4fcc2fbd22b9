"""Fixed-step numerical integration and reduction accuracy measurement.

Classical fourth-order Runge-Kutta with a fixed step: deterministic and
reproducible, which the acceptance tolerances rely on.  Exact rational
initial values are converted to binary64 on entry; exactness is only needed
by the lumping checks, never here.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .driftexpr import Abs, Const, Var
from .errors import DivisionByZero, GridMismatch, NonFiniteState
from .partition import Partition
from .poly import Polynomial
from .system import OdeSystem


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray   # strictly increasing, seconds
    states: np.ndarray  # sample x variable
    names: tuple

    def __post_init__(self):
        if self.states.shape != (len(self.times), len(self.names)):
            raise ValueError("states must be (samples, variables)")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def column(self, name: str) -> np.ndarray:
        return self.states[:, self.names.index(name)]


def _compile_polynomial(drift: Polynomial):
    terms = [(float(m.coeff), m.exps) for m in drift.terms]

    def f(x):
        total = 0.0
        for c, exps in terms:
            t = c
            for v, e in exps:
                t *= x[v] ** e
            total += t
        return total

    return f


def _compile_expr(e):
    if isinstance(e, Const):
        c = float(e.value)
        return lambda x: c
    if isinstance(e, Var):
        i = e.index
        return lambda x: x[i]
    if isinstance(e, Abs):
        f = _compile_expr(e.arg)
        return lambda x: abs(f(x))
    fa = _compile_expr(e.lhs)
    fb = _compile_expr(e.rhs)
    return {
        "add": lambda x: fa(x) + fb(x),
        "sub": lambda x: fa(x) - fb(x),
        "mul": lambda x: fa(x) * fb(x),
        "div": lambda x: fa(x) / fb(x),
        "min": lambda x: min(fa(x), fb(x)),
        "max": lambda x: max(fa(x), fb(x)),
    }[e.op]


def _compile_system(system: OdeSystem):
    if system.is_polynomial:
        parts = [_compile_polynomial(d) for d in system.drifts]
    else:
        parts = [_compile_expr(d) for d in system.drifts]

    def f(x):
        return np.array([g(x) for g in parts])

    return f


def integrate(system: OdeSystem, t_end: float, dt: float,
              sample_every: int = 1) -> Trajectory:
    """RK4 from the system's initial values; rows recorded every
    ``sample_every`` steps, first row at t = 0."""
    if t_end <= 0 or dt <= 0:
        raise ValueError("t_end and dt must be positive")
    if sample_every < 1:
        raise ValueError("sample_every must be a positive integer")
    f = _compile_system(system)
    x = np.array([float(v) for v in system.init])
    steps = max(1, round(t_end / dt))
    times = [0.0]
    rows = [x.copy()]
    half = dt / 2.0
    sixth = dt / 6.0
    for k in range(1, steps + 1):
        t = k * dt
        try:
            with np.errstate(divide="raise", invalid="ignore", over="ignore"):
                k1 = f(x)
                k2 = f(x + half * k1)
                k3 = f(x + half * k2)
                k4 = f(x + dt * k3)
                x = x + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        except (ZeroDivisionError, FloatingPointError):
            raise DivisionByZero(f"t = {t}") from None
        except OverflowError:
            raise NonFiniteState(t) from None
        if not np.all(np.isfinite(x)):
            raise NonFiniteState(t)
        if k % sample_every == 0:
            times.append(t)
            rows.append(x.copy())
    return Trajectory(np.array(times), np.vstack(rows), tuple(system.names))


def compare_reduction(orig: Trajectory, red: Trajectory, part: Partition,
                      mode: str) -> float:
    """Largest absolute mismatch between a reduced trajectory and the
    aggregation of the original one.

    fde: each reduced column must equal its block's sum of original columns.
    bde: each reduced (representative) column must equal every original
    member column of its block.
    """
    if mode not in ("fde", "bde"):
        raise ValueError(f"unknown mode {mode!r}")
    if len(orig.times) != len(red.times) or not np.array_equal(orig.times, red.times):
        raise GridMismatch("trajectories use different time grids")
    if part.size != len(orig.names):
        raise GridMismatch("partition does not cover the original variables")
    if part.block_count != len(red.names):
        raise GridMismatch("reduced trajectory width does not match the partition")
    worst = 0.0
    for b, block in enumerate(part.blocks):
        if mode == "fde":
            aggregate = orig.states[:, list(block)].sum(axis=1)
            worst = max(worst, float(np.max(np.abs(red.states[:, b] - aggregate))))
        else:
            for v in block:
                diff = np.abs(red.states[:, b] - orig.states[:, v])
                worst = max(worst, float(np.max(diff)))
    return worst


def write_csv(trajectory: Trajectory, sink) -> None:
    """Write ``time,<name1>,...`` rows with 9 significant digits."""
    if hasattr(sink, "write"):
        _write_csv_stream(trajectory, sink)
    else:
        with open(sink, "w", encoding="utf-8", newline="") as handle:
            _write_csv_stream(trajectory, handle)


def _write_csv_stream(trajectory: Trajectory, out) -> None:
    out.write("time," + ",".join(trajectory.names) + "\n")
    for t, row in zip(trajectory.times, trajectory.states):
        out.write(f"{t:.9g}," + ",".join(f"{v:.9g}" for v in row) + "\n")


def read_csv(source) -> Trajectory:
    """Inverse of :func:`write_csv` (round-trips within formatting precision)."""
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        with open(source, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    header = lines[0].split(",")
    if header[0] != "time":
        raise ValueError("first column must be 'time'")
    names = tuple(header[1:])
    data = np.array([[float(cell) for cell in line.split(",")]
                     for line in lines[1:] if line])
    return Trajectory(data[:, 0], data[:, 1:], names)
