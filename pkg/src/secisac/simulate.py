"""Monte-Carlo checks of per-letter distortions and plug-in information.

Only the single-letter quantities are simulated. Leakage of the secret
message needs an actual code, which this package does not construct.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel_model import IsacChannel, _check_px
from .estimation import DistortionMetric, Estimator
from .prob_core import LabeledJoint, mutual_information

#: recorded in every result so runs can be reproduced elsewhere
GENERATOR_ID = "numpy.random.PCG64 via SeedSequence(seed).spawn(repetitions)"


@dataclass(frozen=True)
class SimConfig:
    n: int
    seed: int
    px: tuple
    repetitions: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "px", tuple(float(v) for v in self.px))


@dataclass(frozen=True)
class SimResult:
    d1: float
    d2: float
    se1: float
    se2: float
    n_total: int
    seed: int
    generator: str = GENERATOR_ID


def _streams(config: SimConfig) -> list:
    seeds = np.random.SeedSequence(config.seed).spawn(config.repetitions)
    return [np.random.Generator(np.random.PCG64(s)) for s in seeds]


def _categorical(rng: np.random.Generator, cdf_rows: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Draw one index per sample from the row ``rows[i]`` of a cumulative table."""
    u = rng.random(len(rows))
    cdf = cdf_rows[rows]
    idx = (u[:, None] >= cdf).sum(axis=1)
    return np.minimum(idx, cdf_rows.shape[1] - 1)


def sample_letters(channel: IsacChannel, px, n: int, rng: np.random.Generator) -> dict:
    """i.i.d. draws of (S1, S2, X, Y1, Y2) as symbol indices."""
    px = _check_px(channel, px)
    ns1, ns2, nx, ny1, ny2 = channel.w.shape
    state_cdf = np.cumsum(channel.prior.reshape(1, -1), axis=1)
    states = _categorical(rng, state_cdf, np.zeros(n, dtype=int))
    s1, s2 = np.divmod(states, ns2)
    x = _categorical(rng, np.cumsum(px.reshape(1, -1), axis=1), np.zeros(n, dtype=int))
    kernel_cdf = np.cumsum(channel.w.reshape(ns1 * ns2 * nx, ny1 * ny2), axis=1)
    out = _categorical(rng, kernel_cdf, (s1 * ns2 + s2) * nx + x)
    y1, y2 = np.divmod(out, ny2)
    return {"S1": s1, "S2": s2, "X": x, "Y1": y1, "Y2": y2}


def _distortion_samples(letters: dict, estimator: Estimator, metric: DistortionMetric,
                        which: int) -> np.ndarray:
    obs = tuple(letters[name] for name in estimator.observation_names)
    s_hat = estimator.table[obs]
    return metric.table[letters[f"S{which}"], s_hat]


def simulate_distortion(channel: IsacChannel, estimators: Sequence[Estimator],
                        metrics: Sequence[DistortionMetric], config: SimConfig) -> SimResult:
    """Empirical per-letter distortions of the two state estimators.

    Standard errors are those of the mean over all ``n * repetitions``
    letters. Results are bit-identical for identical configs.
    """
    for which, est in ((1, estimators[0]), (2, estimators[1])):
        for name, alph in zip(est.observation_names, est.observation_alphabets):
            if getattr(channel, name.lower()).symbols != alph.symbols:
                raise ValueError(f"estimator {which} alphabet for {name} does not match")

    def run(rng):
        letters = sample_letters(channel, config.px, config.n, rng)
        sums = []
        for which in (1, 2):
            d = _distortion_samples(letters, estimators[which - 1], metrics[which - 1], which)
            sums.append((float(d.sum()), float(np.square(d).sum())))
        return sums

    streams = _streams(config)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(run, streams))
    else:
        parts = [run(r) for r in streams]
    total = config.n * config.repetitions
    means, ses = [], []
    for which in (0, 1):
        s = sum(p[which][0] for p in parts)
        s2 = sum(p[which][1] for p in parts)
        mean = s / total
        var = max(s2 / total - mean * mean, 0.0)
        means.append(mean)
        ses.append(float(np.sqrt(var / total)))
    return SimResult(means[0], means[1], ses[0], ses[1], total, config.seed)


def plugin_mutual_information(channel: IsacChannel, px, config: SimConfig, base=2) -> float:
    """Plug-in estimate of I(X; Y1 | S1) from empirical counts.

    A consistency check against the analytic value, not an estimator with
    finite-sample guarantees.
    """
    counts = np.zeros((len(channel.x), len(channel.s1), len(channel.y1)))
    for rng in _streams(config):
        letters = sample_letters(channel, px, config.n, rng)
        np.add.at(counts, (letters["X"], letters["S1"], letters["Y1"]), 1.0)
    joint = LabeledJoint((channel.x, channel.s1, channel.y1), counts / counts.sum(), tol=1e-9)
    return mutual_information(joint, "X", "Y1", "S1", base)
