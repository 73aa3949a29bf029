"""Optimal per-letter state estimators and their expected distortion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .prob_core import Alphabet, LabeledJoint, ZERO_TOL

OBSERVABLE = ("X", "Y1", "Y2")


@dataclass(frozen=True)
class DistortionMetric:
    """Bounded per-letter distortion ``table[s, s_hat]``."""

    state_alphabet: Alphabet
    reconstruction_alphabet: Alphabet
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        shape = (len(self.state_alphabet), len(self.reconstruction_alphabet))
        if t.shape != shape:
            raise ValueError(f"distortion table shape {t.shape} != {shape}")
        if not np.all(np.isfinite(t)) or np.any(t < 0):
            raise ValueError("distortion entries must be finite and nonnegative")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "table", t)


def hamming(alphabet: Alphabet) -> DistortionMetric:
    """Hamming distortion with reconstruction alphabet equal to ``alphabet``."""
    n = len(alphabet)
    return DistortionMetric(alphabet, Alphabet(alphabet.name + "_hat", alphabet.symbols),
                            1.0 - np.eye(n))


@dataclass(frozen=True)
class Estimator:
    """Deterministic map from an observation tuple to a reconstruction symbol.

    ``table`` holds reconstruction indices and has one axis per observation.
    """

    observation_names: tuple
    observation_alphabets: tuple
    reconstruction_alphabet: Alphabet
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=int)
        if t.shape != tuple(len(a) for a in self.observation_alphabets):
            raise ValueError("estimator table does not cover its observation domain")
        if t.size and (t.min() < 0 or t.max() >= len(self.reconstruction_alphabet)):
            raise ValueError("estimator table holds invalid reconstruction indices")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "observation_names", tuple(self.observation_names))
        object.__setattr__(self, "observation_alphabets", tuple(self.observation_alphabets))
        object.__setattr__(self, "table", t)

    def __call__(self, *symbols):
        idx = tuple(a.index(s) for a, s in zip(self.observation_alphabets, symbols))
        return self.reconstruction_alphabet.symbols[int(self.table[idx])]

    @classmethod
    def from_rule(cls, observation_alphabets: Sequence[Alphabet], reconstruction: Alphabet,
                  rule) -> "Estimator":
        """Tabulate ``rule(*observation_symbols) -> reconstruction symbol``."""
        alphabets = tuple(observation_alphabets)
        shape = tuple(len(a) for a in alphabets)
        table = np.zeros(shape, dtype=int)
        for idx in np.ndindex(*shape):
            syms = [a.symbols[i] for a, i in zip(alphabets, idx)]
            table[idx] = reconstruction.index(rule(*syms))
        return cls(tuple(a.name for a in alphabets), alphabets, reconstruction, table)


def _state_name(which_state) -> str:
    if which_state not in (1, 2):
        raise ValueError(f"which_state must be 1 or 2, got {which_state!r}")
    return f"S{which_state}"


def _check_metric(joint: LabeledJoint, state: str, metric: DistortionMetric) -> None:
    if joint.axis(state).symbols != metric.state_alphabet.symbols:
        raise ValueError(f"metric state alphabet does not match {state}")


def optimal_estimator(joint: LabeledJoint, which_state: int, metric: DistortionMetric,
                      observation_vars: Sequence[str] = OBSERVABLE) -> Estimator:
    """Posterior-weighted argmin of the distortion, one cell at a time.

    Ties go to the lowest reconstruction index; observation cells of zero
    probability map to index 0, which does not affect the expected distortion.
    """
    state = _state_name(which_state)
    obs = [n for n in OBSERVABLE if n in set(observation_vars)]
    if set(observation_vars) - set(OBSERVABLE):
        raise ValueError(f"observations must be drawn from {OBSERVABLE}")
    _check_metric(joint, state, metric)
    p = joint.marginal_array(obs + [state])           # [obs..., s]
    # unnormalized posterior risk; the positive factor P(obs) does not move the argmin
    risk = np.tensordot(p, metric.table, axes=([p.ndim - 1], [0]))
    mass = p.sum(axis=-1)
    # round risks so that exact ties are not split by floating-point noise
    scale = max(float(np.max(np.abs(risk))), 1.0)
    table = np.argmin(np.round(risk / scale, 13), axis=-1)
    table = np.where(mass > ZERO_TOL, table, 0)
    return Estimator(tuple(obs), tuple(joint.axis(n) for n in obs),
                     metric.reconstruction_alphabet, table)


def expected_distortion(joint: LabeledJoint, estimator: Estimator, metric: DistortionMetric,
                        which_state: int) -> float:
    """E[d(Sj, Est(obs))] under ``joint``."""
    state = _state_name(which_state)
    _check_metric(joint, state, metric)
    if estimator.reconstruction_alphabet.symbols != metric.reconstruction_alphabet.symbols:
        raise ValueError("estimator and metric reconstruction alphabets differ")
    for name, alph in zip(estimator.observation_names, estimator.observation_alphabets):
        if joint.axis(name).symbols != alph.symbols:
            raise ValueError(f"estimator alphabet for {name} does not match the joint")
    p = joint.marginal_array(list(estimator.observation_names) + [state])
    cost = metric.table[:, estimator.table]           # [s, obs...]
    cost = np.moveaxis(cost, 0, -1)
    return float(np.sum(p * cost))


def all_deterministic_estimators(joint: LabeledJoint, metric: DistortionMetric,
                                 observation_vars: Sequence[str]):
    """Yield every deterministic estimator on the given observations (small domains only)."""
    obs = [n for n in OBSERVABLE if n in set(observation_vars)]
    alphabets = tuple(joint.axis(n) for n in obs)
    shape = tuple(len(a) for a in alphabets)
    cells = int(np.prod(shape, dtype=int))
    n_rec = len(metric.reconstruction_alphabet)
    if n_rec ** cells > 2_000_000:
        raise ValueError("too many estimators to enumerate")
    for flat in np.ndindex(*([n_rec] * cells)):
        yield Estimator(tuple(obs), alphabets, metric.reconstruction_alphabet,
                        np.array(flat, dtype=int).reshape(shape))
