"""Seeded trajectory engine for gauge-drift experiments.

A trajectory starts from a physical basis state and repeats one step:
optional Hamiltonian evolution, the coherent drift, then one of the
mitigation modes (nothing, a random gauge transformation sampled fairly or
via generator words, or an ancilla-controlled transformation that is
measured, Zeno style). Every stream of randomness derives deterministically
from (seed, trajectory index), so ensembles are reproducible and can be
reduced in a fixed order regardless of threading.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .drift import DriftSpec, random_drift, random_hermitian_generator, z2_rotation_drift
from .groups import WordSampler, sample_word
from .lattice import (
    LatticeModel,
    apply_permutation,
    build_projector,
    gauge_permutation,
    physical_basis,
    unphysical_weight,
)
from .linalg import expm_i_hermitian

__all__ = [
    "MODES",
    "STEP_PHASES",
    "ExperimentConfig",
    "TrajectoryRecord",
    "EnsembleStats",
    "GrowthFit",
    "GrowthFitError",
    "ZenoResult",
    "ZeroNormBranchError",
    "zeno_step",
    "run_trajectory",
    "run_ensemble",
    "fit_growth",
]

MODES = ("none", "haar", "word", "zeno")
STEP_PHASES = ("hamiltonian", "drift", "gauge")

# Below this generator norm the drift is applied by direct series summation
# on the state vector (machine precision, much cheaper than a dense expm).
_SERIES_NORM_LIMIT = 0.5


class GrowthFitError(ValueError):
    """Raised when a growth fit has too few usable points."""


class ZeroNormBranchError(RuntimeError):
    """A measurement selected a branch of (numerically) zero norm."""


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Full description of a seeded experiment."""

    model: LatticeModel
    drift: DriftSpec
    steps: int
    trajectories: int
    mode: str
    master_seed: int
    word_generators: tuple[int, ...] | None = None
    word_length: int | None = None
    hamiltonian: np.ndarray | None = None
    delta: float = 1.0
    initial_state_index: int = 0
    forced_transform: tuple[int, ...] | None = None
    step_order: tuple[str, ...] = STEP_PHASES

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.trajectories < 1:
            raise ValueError(f"trajectories must be >= 1, got {self.trajectories}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if sorted(self.step_order) != sorted(STEP_PHASES):
            raise ValueError(f"step_order must permute {STEP_PHASES}, got {self.step_order}")
        if self.drift.kind == "z2_rotation":
            if self.model.group.order != 2 or self.model.dim != 4:
                raise ValueError("z2_rotation drift is defined only on the Z2 two-link model")
        if self.mode == "word":
            if self.word_generators is None or self.word_length is None:
                raise ValueError("word mode needs word_generators and word_length")
            # validates generator indices and that they generate the group
            WordSampler(self.model.group, tuple(self.word_generators), self.word_length)
        if self.forced_transform is not None:
            if self.mode == "none":
                raise ValueError("forced_transform has no effect in mode 'none'")
            t = tuple(int(x) for x in self.forced_transform)
            if len(t) != self.model.num_sites:
                raise ValueError(
                    f"forced_transform must assign one element to each of "
                    f"{self.model.num_sites} sites"
                )
            if any(not 0 <= g < self.model.group.order for g in t):
                raise ValueError("forced_transform contains an invalid element index")
            object.__setattr__(self, "forced_transform", t)
        if self.hamiltonian is not None:
            h = np.asarray(self.hamiltonian, dtype=complex)
            if h.shape != (self.model.dim, self.model.dim):
                raise ValueError(
                    f"hamiltonian shape {h.shape} does not match model dimension {self.model.dim}"
                )
            object.__setattr__(self, "hamiltonian", h)
        if self.initial_state_index < 0:
            raise ValueError("initial_state_index must be >= 0")


@dataclass(eq=False)
class TrajectoryRecord:
    """Per-step observables of one trajectory.

    After the first failed Zeno measurement the gauge-invariant content of
    the state is gone, so survival and weight are recorded as NaN from that
    step onward and drop out of ensemble averages.
    """

    survival: np.ndarray
    unphysical_weight: np.ndarray
    zeno_failures: int
    failed_step: int | None
    final_state: np.ndarray


@dataclass(eq=False)
class EnsembleStats:
    """Per-step ensemble mean and standard error plus the Zeno failure rate."""

    steps: np.ndarray
    mean_survival: np.ndarray
    se_survival: np.ndarray
    mean_unphys_weight: np.ndarray
    se_unphys_weight: np.ndarray
    zeno_fail_rate: np.ndarray
    trajectories: int
    mode: str


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares slope of log(quantity) against log(step)."""

    slope: float
    intercept: float
    window_steps: tuple[int, int]
    residual: float
    n_points: int


@dataclass(frozen=True, eq=False)
class ZenoResult:
    state: np.ndarray
    passed: bool
    fail_probability: float


def zeno_step(
    model: LatticeModel, state: np.ndarray, transform, rng: np.random.Generator
) -> ZenoResult:
    """Measure an ancilla-controlled gauge transformation in the X basis.

    The ancilla starts in (|0> + |1>)/sqrt(2); after the controlled phi(t)
    the |+> outcome projects the system with (I + phi(t))/2 (pass) and the
    |-> outcome with (I - phi(t))/2 (fail, gauge-invariant information is
    destroyed). Outcomes follow the Born rule using one uniform draw.
    """
    perm = gauge_permutation(model, transform)
    transformed = apply_permutation(perm, state)
    branch_pass = 0.5 * (state + transformed)
    branch_fail = 0.5 * (state - transformed)
    p_pass = float(np.linalg.norm(branch_pass) ** 2)
    p_fail = float(np.linalg.norm(branch_fail) ** 2)
    passed = bool(rng.random() < p_pass)
    branch = branch_pass if passed else branch_fail
    nrm = np.linalg.norm(branch)
    if nrm**2 < 1e-28:
        raise ZeroNormBranchError(
            f"measurement selected a zero-norm branch (pass={passed}, p={p_pass if passed else p_fail:.3e})"
        )
    return ZenoResult(state=branch / nrm, passed=passed, fail_probability=p_fail)


class _Workspace:
    """Precomputed operators shared read-only by all trajectories of a config."""

    def __init__(self, cfg: ExperimentConfig):
        self.model = cfg.model
        self.projector = build_projector(cfg.model)
        basis = physical_basis(self.projector)
        if cfg.initial_state_index >= len(basis):
            raise ValueError(
                f"initial_state_index {cfg.initial_state_index} out of range, "
                f"physical dimension is {len(basis)}"
            )
        self.psi0 = basis[cfg.initial_state_index]
        self.ham_step = (
            expm_i_hermitian(cfg.hamiltonian * cfg.delta, -1)
            if cfg.hamiltonian is not None
            else None
        )
        self.forced_perm = (
            gauge_permutation(cfg.model, cfg.forced_transform)
            if cfg.forced_transform is not None and cfg.mode in ("haar", "word")
            else None
        )
        self.word_sampler = (
            WordSampler(cfg.model.group, tuple(cfg.word_generators), cfg.word_length)
            if cfg.mode == "word"
            else None
        )
        drift = cfg.drift
        if drift.kind == "z2_rotation":
            self.fixed_drift = z2_rotation_drift(drift.epsilon)
        elif drift.resample == "never":
            self.fixed_drift = random_drift(cfg.model, self.projector, drift.amplitude, drift.seed)
        else:
            self.fixed_drift = None


def _apply_series_exp(generator: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """psi <- exp(-i * generator) psi by direct series summation.

    Valid whenever the generator norm is well below 1 (terms decrease
    monotonically, so truncation at the 1e-16 tail is machine precision).
    """
    out = psi.astype(complex, copy=True)
    term = psi
    for k in range(1, 64):
        term = (generator @ term) * (-1j / k)
        out += term
        if np.linalg.norm(term) < 1e-16:
            return out
    raise RuntimeError("drift series did not converge; generator norm too large")


def _apply_drift(ws: _Workspace, cfg: ExperimentConfig, drift_rng, psi: np.ndarray) -> np.ndarray:
    if ws.fixed_drift is not None:
        return ws.fixed_drift @ psi
    gen = random_hermitian_generator(ws.projector, cfg.drift.amplitude, drift_rng)
    if np.linalg.norm(gen) <= _SERIES_NORM_LIMIT:
        return _apply_series_exp(gen, psi)
    return expm_i_hermitian(gen, -1) @ psi


def _trajectory_rngs(cfg: ExperimentConfig, index: int):
    """Per-trajectory streams: gauge/measurement from the master seed, drift
    redraws from the drift seed, both split by trajectory index."""
    gauge_rng = np.random.default_rng(np.random.SeedSequence(cfg.master_seed, spawn_key=(index,)))
    drift_rng = None
    if cfg.drift.kind == "random_hermitian" and cfg.drift.resample != "never":
        drift_rng = np.random.default_rng(np.random.SeedSequence(cfg.drift.seed, spawn_key=(index,)))
    return gauge_rng, drift_rng


def run_trajectory(
    cfg: ExperimentConfig, trajectory_index: int, _workspace: _Workspace | None = None
) -> TrajectoryRecord:
    """Evolve one seeded trajectory and record per-step observables."""
    if not 0 <= trajectory_index < cfg.trajectories:
        raise ValueError(
            f"trajectory_index {trajectory_index} out of range for {cfg.trajectories} trajectories"
        )
    ws = _workspace if _workspace is not None else _Workspace(cfg)
    rng, drift_rng = _trajectory_rngs(cfg, trajectory_index)

    ws_fixed = ws.fixed_drift
    if ws_fixed is None and cfg.drift.resample == "per-trajectory":
        ws_fixed = random_drift(cfg.model, ws.projector, cfg.drift.amplitude, drift_rng)

    model = cfg.model
    order = model.group.order
    psi = ws.psi0.copy()
    survival = np.empty(cfg.steps)
    weight = np.empty(cfg.steps)
    failures = 0
    failed_step: int | None = None

    for step in range(1, cfg.steps + 1):
        for phase in cfg.step_order:
            if phase == "hamiltonian":
                if ws.ham_step is not None:
                    psi = ws.ham_step @ psi
            elif phase == "drift":
                if ws_fixed is not None:
                    psi = ws_fixed @ psi
                else:
                    psi = _apply_drift(ws, cfg, drift_rng, psi)
            elif phase == "gauge" and cfg.mode != "none":
                if cfg.mode in ("haar", "word"):
                    if ws.forced_perm is not None:
                        perm = ws.forced_perm
                    elif cfg.mode == "haar":
                        perm = gauge_permutation(model, rng.integers(order, size=model.num_sites))
                    else:
                        t = [sample_word(ws.word_sampler, rng) for _ in range(model.num_sites)]
                        perm = gauge_permutation(model, t)
                    psi = apply_permutation(perm, psi)
                else:  # zeno
                    t = (
                        cfg.forced_transform
                        if cfg.forced_transform is not None
                        else rng.integers(order, size=model.num_sites)
                    )
                    result = zeno_step(model, psi, t, rng)
                    psi = result.state
                    if not result.passed:
                        failures += 1
                        if failed_step is None:
                            failed_step = step
        amp = np.vdot(ws.psi0, psi)
        survival[step - 1] = min(max(float(amp.real**2 + amp.imag**2), 0.0), 1.0)
        weight[step - 1] = unphysical_weight(ws.projector, psi)

    if failed_step is not None:
        survival[failed_step - 1 :] = np.nan
        weight[failed_step - 1 :] = np.nan
    return TrajectoryRecord(
        survival=survival,
        unphysical_weight=weight,
        zeno_failures=failures,
        failed_step=failed_step,
        final_state=psi,
    )


def _mean_and_se(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column means and standard errors ignoring NaN entries (SE 0 below 2 samples)."""
    finite = np.isfinite(values)
    count = finite.sum(axis=0)
    safe = np.where(finite, values, 0.0)
    mean = np.divide(
        safe.sum(axis=0), count, out=np.full(values.shape[1], np.nan), where=count > 0
    )
    dev2 = np.where(finite, (safe - mean) ** 2, 0.0)
    var = np.divide(
        dev2.sum(axis=0), count - 1, out=np.zeros(values.shape[1]), where=count > 1
    )
    se = np.sqrt(np.divide(var, count, out=np.zeros(values.shape[1]), where=count > 0))
    se[count == 0] = np.nan
    return mean, se


def run_ensemble(cfg: ExperimentConfig, threads: int = 1) -> EnsembleStats:
    """Run all trajectories and reduce them, in index order, to ensemble stats.

    Trajectories are independent; with threads > 1 they run concurrently but
    the reduction order (and therefore every output byte) is unchanged.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    ws = _Workspace(cfg)
    indices = range(cfg.trajectories)
    if threads == 1:
        records = [run_trajectory(cfg, i, _workspace=ws) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda i: run_trajectory(cfg, i, _workspace=ws), indices))

    surv = np.vstack([r.survival for r in records])
    wght = np.vstack([r.unphysical_weight for r in records])
    mean_s, se_s = _mean_and_se(surv)
    mean_w, se_w = _mean_and_se(wght)
    steps = np.arange(1, cfg.steps + 1)
    fail_at = np.array(
        [r.failed_step if r.failed_step is not None else cfg.steps + 1 for r in records]
    )
    fail_rate = (fail_at[:, None] <= steps[None, :]).mean(axis=0)
    return EnsembleStats(
        steps=steps,
        mean_survival=mean_s,
        se_survival=se_s,
        mean_unphys_weight=mean_w,
        se_unphys_weight=se_w,
        zeno_fail_rate=fail_rate,
        trajectories=cfg.trajectories,
        mode=cfg.mode,
    )


_FIT_QUANTITIES = ("unphysical_weight",)
_FIT_NOISE_FLOOR = 1e-11  # 10x machine noise; points below are never used


def fit_growth(
    stats: EnsembleStats,
    quantity: str = "unphysical_weight",
    window: tuple[float, float] = (1e-10, 0.1),
    min_points: int = 10,
) -> GrowthFit:
    """Log-log growth exponent of an ensemble-mean quantity.

    Only steps whose mean lies inside the window (the small-amplitude regime)
    enter the fit; fewer than min_points usable steps is an error.
    """
    if quantity not in _FIT_QUANTITIES:
        raise ValueError(f"quantity must be one of {_FIT_QUANTITIES}, got {quantity!r}")
    values = stats.mean_unphys_weight
    lo, hi = window
    usable = (
        np.isfinite(values)
        & (values >= max(lo, _FIT_NOISE_FLOOR))
        & (values <= hi)
    )
    n_points = int(usable.sum())
    if n_points < min_points:
        raise GrowthFitError(
            f"only {n_points} usable points in window [{lo:g}, {hi:g}], need {min_points}"
        )
    x = np.log(stats.steps[usable].astype(float))
    y = np.log(values[usable])
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((slope * x + intercept - y) ** 2)))
    used = stats.steps[usable]
    return GrowthFit(
        slope=float(slope),
        intercept=float(intercept),
        window_steps=(int(used[0]), int(used[-1])),
        residual=residual,
        n_points=n_points,
    )
