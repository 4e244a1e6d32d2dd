"""Discrete phase-configuration search: blind line search, greedy descent, quantization, brute force.

Configurations are integer ndarrays of shape (n_rows, n_cols) holding codebook
indices, row-major consistent with the element ordering in `geometry`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .link import Scenario, element_weights, phase_error_realization, uniform_states
from .ris import PhaseCodebook, UnitState


@dataclass
class TraceStep:
    """One feedback measurement: candidate index, whether it was kept, measured power."""

    step: int
    accepted: bool
    power: float


@dataclass
class SearchTrace:
    """Measurement log of a feedback search; step 0 is the initial configuration."""

    steps: list[TraceStep] = field(default_factory=list)

    def record(self, accepted: bool, power: float) -> None:
        self.steps.append(TraceStep(len(self.steps), accepted, power))

    def accepted_powers(self) -> list[float]:
        """Powers of the kept configurations, in order; non-decreasing by construction."""
        return [s.power for s in self.steps if s.accepted]

    @property
    def best_power(self) -> float:
        return self.accepted_powers()[-1]

    @property
    def n_queries(self) -> int:
        return len(self.steps)


class FeedbackChannel:
    """Measured received power for candidate configurations.

    Wraps a noiseless power oracle, adds Gaussian measurement noise with the
    given variance (readings floored at zero), and counts queries.  The
    standalone rng keeps noisy runs reproducible per seed.
    """

    def __init__(self, oracle: Callable[[np.ndarray], float],
                 noise_variance: float = 0.0, seed=0):
        if noise_variance < 0:
            raise ValueError("noise_variance must be >= 0")
        self._oracle = oracle
        self.noise_variance = float(noise_variance)
        self._rng = np.random.default_rng(seed)
        self.queries = 0

    def measure(self, configuration) -> float:
        self.queries += 1
        p = float(self._oracle(configuration))
        if self.noise_variance > 0.0:
            p = max(0.0, p + float(self._rng.normal(0.0, math.sqrt(self.noise_variance))))
        return p


def power_oracle(scenario: Scenario,
                 states: Sequence[UnitState] | None = None) -> Callable[[np.ndarray], float]:
    """Noiseless map phase-index grid -> received power (W), precomputed for speed.

    Folds the scenario's per-unit jitter realization into the weights, so the
    searches optimize what the hardware would actually radiate.
    """
    if states is None:
        states = uniform_states(scenario)
    w = element_weights(scenario, states) * np.exp(1j * np.asarray(phase_error_realization(scenario)))
    table = np.exp(1j * scenario.codebook.phases())
    prefactor = scenario.tx_power / (16.0 * math.pi ** 2)
    n = scenario.layout.n_units

    def oracle(configuration) -> float:
        idx = np.asarray(configuration, dtype=int).reshape(-1)
        if idx.size != n:
            raise ValueError(f"configuration has {idx.size} entries for {n} units")
        return prefactor * float(np.abs(np.sum(w * table[idx]))) ** 2

    return oracle


def uniform_configuration(layout, phase_index: int = 0) -> np.ndarray:
    return np.full((layout.n_rows, layout.n_cols), phase_index, dtype=int)


def _default_feedback(scenario: Scenario, feedback, seed=0) -> FeedbackChannel:
    if feedback is not None:
        return feedback
    return FeedbackChannel(power_oracle(scenario), scenario.noise_variance, seed)


def blind_rowcol_search(scenario: Scenario, initial=None,
                        feedback: FeedbackChannel | None = None,
                        passes: int = 4) -> tuple[np.ndarray, SearchTrace]:
    """Blind line-by-line search over whole columns, then whole rows.

    Each pass advances every column and then every row by one codebook step
    (+90 deg at 2 bits) and keeps the shift iff the measured power does not
    drop below the running best.  Only power readings steer the search — no
    channel knowledge.  Query count is always 1 + passes * (n_cols + n_rows).
    """
    if passes < 1:
        raise ValueError("passes must be >= 1")
    k = scenario.codebook.size
    config = (uniform_configuration(scenario.layout) if initial is None
              else np.array(initial, dtype=int))
    if config.shape != (scenario.layout.n_rows, scenario.layout.n_cols):
        raise ValueError("initial configuration does not match the layout")
    feedback = _default_feedback(scenario, feedback)
    trace = SearchTrace()
    best = feedback.measure(config)
    trace.record(True, best)
    for _ in range(passes):
        for col in range(scenario.layout.n_cols):
            cand = config.copy()
            cand[:, col] = (cand[:, col] + 1) % k
            p = feedback.measure(cand)
            if p >= best:
                config, best = cand, p
                trace.record(True, p)
            else:
                trace.record(False, p)
        for row in range(scenario.layout.n_rows):
            cand = config.copy()
            cand[row, :] = (cand[row, :] + 1) % k
            p = feedback.measure(cand)
            if p >= best:
                config, best = cand, p
                trace.record(True, p)
            else:
                trace.record(False, p)
    return config, trace


def greedy_element_search(scenario: Scenario, initial=None,
                          feedback: FeedbackChannel | None = None,
                          max_rounds: int = 8) -> tuple[np.ndarray, SearchTrace]:
    """Cyclic per-element descent: each unit in turn tries every codebook index.

    A candidate is kept only on strict improvement, so the result is stable
    under any single-element change; rounds repeat until one makes no change
    or max_rounds is hit.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    k = scenario.codebook.size
    config = (uniform_configuration(scenario.layout) if initial is None
              else np.array(initial, dtype=int))
    if config.shape != (scenario.layout.n_rows, scenario.layout.n_cols):
        raise ValueError("initial configuration does not match the layout")
    feedback = _default_feedback(scenario, feedback)
    trace = SearchTrace()
    best = feedback.measure(config)
    trace.record(True, best)
    for _ in range(max_rounds):
        changed = False
        for row in range(scenario.layout.n_rows):
            for col in range(scenario.layout.n_cols):
                for idx in range(k):
                    if idx == config[row, col]:
                        continue
                    cand = config.copy()
                    cand[row, col] = idx
                    p = feedback.measure(cand)
                    if p > best:
                        config, best = cand, p
                        trace.record(True, p)
                        changed = True
                    else:
                        trace.record(False, p)
        if not changed:
            break
    return config, trace


def wrap_to_pi(x):
    """Wrap angles to (-pi, pi]."""
    return -np.mod(-np.asarray(x, dtype=float) + math.pi, 2.0 * math.pi) + math.pi


def nearest_quantize(phases, codebook: PhaseCodebook) -> np.ndarray:
    """Each phase to the circularly nearest codebook index; exact ties go to the lower index."""
    ph = np.asarray(phases, dtype=float)
    dist = np.abs(wrap_to_pi(ph[..., None] - codebook.phases()))
    # tolerance-padded argmin so float noise at midpoints still breaks low
    dmin = dist.min(axis=-1, keepdims=True)
    return np.argmax(dist <= dmin + 1e-12, axis=-1).astype(int)


def brute_force_optimum(scenario: Scenario,
                        states: Sequence[UnitState] | None = None) -> tuple[np.ndarray, float]:
    """Exhaustive search over all codebook configurations.

    Refuses above 20 search bits (bits * n_units).  Strict `>` keeps the
    lexicographically smallest of tied optima.
    """
    n = scenario.layout.n_units
    if scenario.codebook.bits * n > 20:
        raise ValueError(
            f"{scenario.codebook.bits * n} search bits exceed the 20-bit brute-force cap"
        )
    oracle = power_oracle(scenario, states)
    best_cfg = None
    best_p = -1.0
    for flat in itertools.product(range(scenario.codebook.size), repeat=n):
        p = oracle(np.array(flat, dtype=int))
        if p > best_p:
            best_cfg, best_p = flat, p
    cfg = np.array(best_cfg, dtype=int).reshape(scenario.layout.n_rows, scenario.layout.n_cols)
    return cfg, best_p
