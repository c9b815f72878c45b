"""Time-domain simulation of the closed-loop systems.

Deterministic fixed-step RK4 integration of dx/dt = Ax for random
initial conditions (expected output energy route to the H2 norm), and
Euler-Maruyama integration of dx = Ax dt + B dW (steady-state output
variance route). Randomness comes from counter-based Philox streams
keyed on (seed, sample index), so serial and parallel evaluation orders
produce identical results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import (
    IndexOutOfRange,
    NonFiniteState,
    StepTooLarge,
    TruncationNotConverged,
)
from .systems import StateSpaceModel

TAIL_THRESHOLD = 1e-8  # terminal ||x||^2 relative to initial, per sample mean
T_MAX_CONSTANTS = 50.0  # default horizon cap in slowest time constants
WARMUP_FRACTION = 0.2


def spectral_radius_bound(a: np.ndarray) -> float:
    """Row-sum (infinity-norm) upper bound on the spectral radius."""
    return float(np.abs(a).sum(axis=1).max())


def max_stable_dt(model: StateSpaceModel) -> float:
    return 0.5 / spectral_radius_bound(model.a)


def default_dt(model: StateSpaceModel) -> float:
    return 0.1 / spectral_radius_bound(model.a)


def slowest_time_constant(model: StateSpaceModel) -> float:
    """Reciprocal of the slowest decay rate of A."""
    rate = float(np.min(-np.linalg.eigvals(model.a).real))
    return 1.0 / rate


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based RNG stream for one (seed, sample index) pair."""
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | index))


@dataclass(frozen=True)
class Trajectory:
    """Recorded states of one deterministic run on a uniform time grid."""

    times: np.ndarray
    states: np.ndarray  # (len(times), dim)
    kind: str
    seed: int
    dt: float
    state_labels: tuple[str, ...]


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo estimate of an H2-type quantity with its standard error."""

    mean: float
    stderr: float
    samples: int
    mode: str
    seed: int
    T: float
    dt: float
    converged: bool

    def to_json(self) -> str:
        return json.dumps({
            "mean": self.mean, "stderr": self.stderr, "samples": self.samples,
            "mode": self.mode, "seed": self.seed, "T": self.T, "dt": self.dt,
            "converged": self.converged,
        }, indent=2, sort_keys=True)


def _check_dt(model: StateSpaceModel, dt: float) -> None:
    if not dt > 0:
        raise StepTooLarge(f"dt must be positive, got {dt}")
    cap = max_stable_dt(model)
    if dt > cap * (1 + 1e-12):
        raise StepTooLarge(f"dt={dt} exceeds stability bound {cap}")


def _rk4_step(a: np.ndarray, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = a @ x
    k2 = a @ (x + 0.5 * dt * k1)
    k3 = a @ (x + 0.5 * dt * k2)
    k4 = a @ (x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate(model: StateSpaceModel, x0, T: float, dt: float | None = None,
             record_every: int = 1, seed: int = 0) -> Trajectory:
    """Integrate dx/dt = Ax from x0 over [0, T] with fixed-step RK4.

    Every ``record_every``-th step is recorded; the Trajectory's dt is the
    recording interval. Deterministic: identical arguments give identical
    output.
    """
    if dt is None:
        dt = default_dt(model)
    _check_dt(model, dt)
    if T < dt:
        raise StepTooLarge(f"horizon T={T} shorter than one step dt={dt}")
    x = np.asarray(x0, dtype=float).copy()
    steps = int(round(T / dt))
    recorded = [x.copy()]
    for step in range(1, steps + 1):
        x = _rk4_step(model.a, x, dt)
        if step % record_every == 0:
            recorded.append(x.copy())
    states = np.array(recorded)
    if not np.isfinite(states).all():
        raise NonFiniteState("trajectory overflowed to non-finite values")
    rec_dt = dt * record_every
    times = rec_dt * np.arange(len(recorded))
    return Trajectory(times, states, model.kind, seed, rec_dt,
                      model.state_labels)


def sample_initial(model: StateSpaceModel, seed: int, index: int = 0,
                   mode: str = "bb_star") -> np.ndarray:
    """Random initial state for one Monte Carlo sample.

    bb_star: x0 = B xi with xi standard normal, so cov(x0) = B B^T.
    paper_fig2: unit normal voltages, integrators started at zero.
    """
    rng = stream(seed, index)
    if mode == "bb_star":
        return model.b @ rng.standard_normal(model.b.shape[1])
    if mode == "paper_fig2":
        x0 = np.zeros(model.dim)
        volt = model.voltage_indices()
        x0[volt] = rng.standard_normal(len(volt))
        return x0
    raise ValueError(f"unknown initial-condition mode {mode!r}")


def _sample_matrix(model: StateSpaceModel, seed: int, samples: int,
                   mode: str) -> np.ndarray:
    cols = [sample_initial(model, seed, index, mode) for index in range(samples)]
    return np.column_stack(cols)


def monte_carlo_h2(model: StateSpaceModel, samples: int,
                   T: float | None = None, dt: float | None = None,
                   seed: int = 0, mode: str = "bb_star",
                   t_max: float | None = None,
                   strict: bool = False) -> McEstimate:
    """Estimate the expected output energy integral over random initial
    conditions.

    Integrates all samples simultaneously, accumulating the trapezoidal
    integral of y^T y per sample. States advance by the exact one-step
    propagator expm(A h); the step starts at ``dt`` and doubles once the
    modes it was resolving have died out (h never exceeds a tenth of the
    slowest time constant), which keeps stiff systems tractable without
    biasing the integral. The horizon extends until the mean squared
    state has decayed below a small fraction of its initial value or
    ``t_max`` (default 50 slowest time constants) is hit; hitting the cap
    flags the estimate as unconverged (and raises when strict).
    """
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    if dt is None:
        dt = default_dt(model)
    _check_dt(model, dt)
    tau = slowest_time_constant(model)
    if t_max is None:
        t_max = T_MAX_CONSTANTS * tau
        if T is not None:
            t_max = max(t_max, 2.0 * T)
    if T is None:
        T = 10.0 * tau

    x = _sample_matrix(model, seed, samples, mode)
    initial_ms = float(np.mean(np.sum(x * x, axis=0)))
    integral = np.zeros(samples)
    y = model.h @ x
    w_prev = np.sum(y * y, axis=0)
    t = 0.0
    h = dt
    h_cap = max(dt, tau / 10.0)
    prop = expm(model.a * h)
    converged = initial_ms == 0.0
    target = min(T, t_max)
    while not converged and t < t_max:
        while t < target:
            # a mode with rate >= 1/h has decayed by e^-100 once t >= 100 h,
            # so doubling the step no longer costs trapezoid accuracy
            if t >= 100.0 * h and 2.0 * h <= h_cap:
                h *= 2.0
                prop = expm(model.a * h)
            x = prop @ x
            y = model.h @ x
            w = np.sum(y * y, axis=0)
            integral += 0.5 * h * (w_prev + w)
            w_prev = w
            t += h
        if not np.isfinite(x).all():
            raise NonFiniteState("Monte Carlo state overflowed")
        tail = float(np.mean(np.sum(x * x, axis=0)))
        if tail < TAIL_THRESHOLD * initial_ms:
            converged = True
        else:
            target = min(t + 10.0 * tau, t_max)  # extend and keep going
            if target <= t:
                break
    if strict and not converged:
        raise TruncationNotConverged(
            f"tail still above threshold at t_max={t_max}")
    mean = float(np.mean(integral))
    stderr = float(np.std(integral, ddof=1) / np.sqrt(samples))
    return McEstimate(mean, stderr, samples, "initial_condition",
                      seed, t, dt, converged)


def white_noise_variance(model: StateSpaceModel, T: float,
                         dt: float | None = None, seed: int = 0,
                         batches: int = 10) -> McEstimate:
    """Steady-state output variance under white-noise input.

    Euler-Maruyama on dx = Ax dt + B dW; the first fifth of the run is
    discarded as warmup and the remainder is time-averaged, with the
    standard error taken across contiguous batches.
    """
    if dt is None:
        dt = default_dt(model)
    _check_dt(model, dt)
    steps = int(round(T / dt))
    if steps < 10 * batches:
        raise StepTooLarge(f"horizon T={T} too short for {batches} batches")
    rng = stream(seed)
    x = np.zeros(model.dim)
    sqrt_dt = np.sqrt(dt)
    warmup = int(WARMUP_FRACTION * steps)
    kept = np.empty(steps - warmup)
    m = model.b.shape[1]
    for step in range(steps):
        noise = model.b @ rng.standard_normal(m)
        x = x + dt * (model.a @ x) + sqrt_dt * noise
        if step >= warmup:
            y = model.h @ x
            kept[step - warmup] = float(y @ y)
    if not np.isfinite(kept).all():
        raise NonFiniteState("white-noise trajectory overflowed")
    batch_means = kept[: (kept.size // batches) * batches].reshape(
        batches, -1).mean(axis=1)
    mean = float(kept.mean())
    stderr = float(np.std(batch_means, ddof=1) / np.sqrt(batches))
    return McEstimate(mean, stderr, batches, "white_noise", seed, T, dt, True)


def export_trajectory(traj: Trajectory, node_subset) -> str:
    """CSV of selected bus voltages over time, full float precision."""
    label_to_col = {lbl: k for k, lbl in enumerate(traj.state_labels)}
    cols = []
    for node in node_subset:
        key = f"V{node}"
        if key not in label_to_col:
            raise IndexOutOfRange(f"no voltage state for bus {node}")
        cols.append(label_to_col[key])
    header = ",".join(["t"] + [f"V_{node}" for node in node_subset])
    lines = [header]
    for row, t in enumerate(traj.times):
        values = [repr(float(t))]
        values += [repr(float(traj.states[row, col])) for col in cols]
        lines.append(",".join(values))
    return "\n".join(lines) + "\n"
