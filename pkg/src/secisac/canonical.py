"""Closed forms for the binary multiplicative-Bernoulli examples.

Two channels share the state prior

    P(S1,S2) = (0,0): 1-q, (1,0): q(1-alpha), (1,1): q*alpha, (0,1): 0

* the noiseless channel Y1 = S1*X, Y2 = S2*X;
* the BEC-BSC channel where S1*X passes a BEC(gamma) (erasure symbol
  ``"e"``) and S2*X passes a BSC(beta).

The more-capable threshold uses base-2 binary entropy, which is the only
base in which Hb(1/2) = 1 as the threshold form requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel_model import IsacChannel, bernoulli_px
from .estimation import Estimator, hamming
from .prob_core import Alphabet, _check_prob, _log_scale, binary_entropy, binary_entropy_array, star
from .regions import RegionPoint

ERASURE = "e"
BIT = (0, 1)


class LemmaPremiseError(ValueError):
    """Parameters outside the range where a closed form was derived."""


@dataclass(frozen=True)
class BernoulliParams:
    q: float
    alpha: float
    gamma: float = field(default=None)
    beta: float = field(default=None)
    p: float = field(default=None)

    def __post_init__(self):
        _check_prob(self.q, "q")
        _check_prob(self.alpha, "alpha")
        for name in ("gamma", "beta"):
            v = getattr(self, name)
            if v is not None and not (0.0 < v < 1.0):
                raise ValueError(f"{name} must lie in (0, 1), got {v!r}")
        if self.p is not None:
            _check_prob(self.p, "p")


def state_prior(q: float, alpha: float) -> np.ndarray:
    """``prior[s1, s2]`` with S2 = 1 only when S1 = 1."""
    _check_prob(q, "q")
    _check_prob(alpha, "alpha")
    return np.array([[1.0 - q, 0.0],
                     [q * (1.0 - alpha), q * alpha]])


def _binary(name):
    return Alphabet(name, BIT)


def bernoulli_noiseless_channel(q: float, alpha: float) -> IsacChannel:
    """Y1 = S1 * X and Y2 = S2 * X."""
    w = np.zeros((2, 2, 2, 2, 2))
    for s1 in BIT:
        for s2 in BIT:
            for x in BIT:
                w[s1, s2, x, s1 * x, s2 * x] = 1.0
    return IsacChannel(_binary("X"), _binary("Y1"), _binary("Y2"), _binary("S1"),
                       _binary("S2"), state_prior(q, alpha), w)


def bec_bsc_channel(q: float, alpha: float, gamma: float, beta: float) -> IsacChannel:
    """S1*X through BEC(gamma) to Y1, S2*X through BSC(beta) to Y2, independently."""
    BernoulliParams(q, alpha, gamma, beta)
    y1 = Alphabet("Y1", (0, 1, ERASURE))
    bec = np.array([[1 - gamma, 0.0, gamma],
                    [0.0, 1 - gamma, gamma]])
    bsc = np.array([[1 - beta, beta],
                    [beta, 1 - beta]])
    w = np.zeros((2, 2, 2, 3, 2))
    for s1 in BIT:
        for s2 in BIT:
            for x in BIT:
                w[s1, s2, x] = np.outer(bec[s1 * x], bsc[s2 * x])
    return IsacChannel(_binary("X"), y1, _binary("Y2"), _binary("S1"), _binary("S2"),
                       state_prior(q, alpha), w)


# ---------------------------------------------------------------------------
# noiseless example


@dataclass(frozen=True)
class ClosedFormPoint:
    r: float
    d1: float
    d2: float
    degenerate: bool = False

    def as_region_point(self, provenance: str, **params) -> RegionPoint:
        notes = ("q*alpha = 1: the Hb ratio term is taken as 0",) if self.degenerate else ()
        return RegionPoint(None, self.r, self.d1, self.d2, provenance, params, notes)


def lemma1_point(q: float, alpha: float, p: float, base=2) -> ClosedFormPoint:
    """Max secret rate and min distortions of the noiseless channel at X ~ Bern(p).

    At q*alpha = 1 the ratio q(1-alpha)/(1-q*alpha) is 0/0; the term is then
    multiplied by zero and taken as 0, and the result is flagged.
    """
    BernoulliParams(q, alpha, p=p)
    qa = q * alpha
    hp = binary_entropy(p, base)
    degenerate = qa >= 1.0
    ratio_term = 0.0 if degenerate else p * (1 - qa) * binary_entropy(q * (1 - alpha) / (1 - qa), base)
    secrecy = q * (1 - alpha) * hp + ratio_term
    r = min(secrecy, q * hp)
    d1 = (1 - p) * min(q, 1 - q)
    d2 = (1 - p) * min(qa, 1 - qa)
    return ClosedFormPoint(r, d1, d2, degenerate)


def lemma1_estimators(q: float, alpha: float) -> tuple:
    """Est_j(1, y) = y and Est_j(0, y) = 1{P(Sj=1) > 1/2}, on (X, Yj)."""
    out = []
    for j, prob_one in ((1, q), (2, q * alpha)):
        guess = int(prob_one > 0.5)
        rule = (lambda x, y, g=guess: y if x == 1 else g)
        out.append(Estimator.from_rule((_binary("X"), _binary(f"Y{j}")), _binary(f"S{j}_hat"), rule))
    return tuple(out)


def lemma1_curve(q: float, alpha: float, resolution: int = 1001, base=2) -> list:
    """Region points over a uniform p grid (p = P(X=1))."""
    out = []
    for p in np.linspace(0.0, 1.0, resolution):
        pt = lemma1_point(q, alpha, float(p), base)
        out.append(pt.as_region_point("lemma1", px=(1.0 - float(p), float(p))))
    return out


# ---------------------------------------------------------------------------
# BEC-BSC example


def lemma2_threshold(alpha: float, beta: float) -> float:
    """Largest erasure probability for which the BEC-BSC channel is more-capable."""
    _check_prob(alpha, "alpha")
    return 1.0 - alpha * (1.0 - binary_entropy(beta, 2))


def is_more_capable_closed_form(gamma: float, alpha: float, beta: float) -> bool:
    return gamma <= lemma2_threshold(alpha, beta)


def D_of_p(q: float, alpha: float, gamma: float, beta: float, p, base=2):
    """I(X;Y1|S1) - I(X;Y2|S2) on the BEC-BSC channel; accepts scalar or array p."""
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr < 0) | (p_arr > 1)):
        raise ValueError("p must lie in [0, 1]")
    conv = p_arr * (1 - beta) + (1 - p_arr) * beta
    hb_beta = binary_entropy(beta, base)
    d = q * (binary_entropy_array(p_arr, base) * (1 - gamma)
             + alpha * (hb_beta - binary_entropy_array(conv, base)))
    return float(d) if np.ndim(p) == 0 else d


def D_prime_of_p(q: float, alpha: float, gamma: float, beta: float, p: float, base=2) -> float:
    """Derivative of :func:`D_of_p` in p; diverges at p in {0, 1}."""
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ValueError("the derivative is only finite for p in (0, 1)")
    conv = star(p, beta)
    scale = _log_scale(base)
    return q * (math.log((1 - p) / p) * (1 - gamma)
                - alpha * math.log((1 - conv) / conv) * (1 - 2 * beta)) / scale


def _reflect_beta(beta: float) -> float:
    return 1.0 - beta if beta > 0.5 else beta


def lemma3_d2(q: float, alpha: float, beta: float, p: float) -> float:
    """The three-branch D2 expression as stated for the BEC-BSC inner bound."""
    beta = _reflect_beta(beta)
    qa = q * alpha
    if qa <= beta:
        branch = qa
    elif qa <= 1 - beta:
        branch = star(star(qa, beta), qa)
    else:
        branch = 1 - qa
    return (1 - p) * min(qa, 1 - qa) + p * branch


def lemma3_d2_exact(q: float, alpha: float, beta: float, p: float) -> float:
    """Expected distortion of the (X, Y2) threshold estimator on the BEC-BSC channel.

    Differs from :func:`lemma3_d2` only when beta < q*alpha <= 1-beta: there
    the estimator follows Y2, errs exactly when the BSC flips, and the X = 1
    term is beta.
    """
    beta = _reflect_beta(beta)
    qa = q * alpha
    if qa <= beta:
        branch = qa
    elif qa <= 1 - beta:
        branch = beta
    else:
        branch = 1 - qa
    return (1 - p) * min(qa, 1 - qa) + p * branch


def lemma3_point(q: float, alpha: float, gamma: float, beta: float, p: float,
                 base=2) -> ClosedFormPoint:
    """Achievable (R, D1, D2) on a more-capable BEC-BSC channel at X ~ Bern(p).

    ``beta > 1/2`` is reflected to ``1 - beta``. The rate omits the
    H(Y1|S2,X) term, so it is a weakened inner bound.
    """
    BernoulliParams(q, alpha, gamma, beta, p)
    beta = _reflect_beta(beta)
    if not is_more_capable_closed_form(gamma, alpha, beta):
        raise LemmaPremiseError(
            f"gamma={gamma} exceeds the more-capable threshold {lemma2_threshold(alpha, beta):.6g}")
    r = max(D_of_p(q, alpha, gamma, beta, p, base), 0.0)
    d1 = (1 - p + p * gamma) * min(q, 1 - q)
    return ClosedFormPoint(r, d1, lemma3_d2(q, alpha, beta, p))


def lemma3_estimators(q: float, alpha: float, gamma: float, beta: float) -> tuple:
    """The threshold estimators Est_1(x, y1) and Est_2(x, y2) used for the BEC-BSC bound."""
    BernoulliParams(q, alpha, gamma, beta)
    qa = q * alpha
    prior_guess_1 = int(q > 0.5)
    prior_guess_2 = int(qa > 0.5)

    def est1(x, y1):
        if y1 == ERASURE or x == 0:
            return prior_guess_1
        return y1

    def est2(x, y2):
        if x == 0:
            return prior_guess_2
        return int(qa > beta) if y2 == 1 else int(qa > 1 - beta)

    y1 = Alphabet("Y1", (0, 1, ERASURE))
    e1 = Estimator.from_rule((_binary("X"), y1), _binary("S1_hat"), est1)
    e2 = Estimator.from_rule((_binary("X"), _binary("Y2")), _binary("S2_hat"), est2)
    return e1, e2


def lemma3_curve(q: float, alpha: float, gamma: float, beta: float, resolution: int = 1001,
                 base=2) -> list:
    out = []
    for p in np.linspace(0.0, 1.0, resolution):
        pt = lemma3_point(q, alpha, gamma, beta, float(p), base)
        out.append(pt.as_region_point("lemma3", px=(1.0 - float(p), float(p))))
    return out


def hamming_metrics(channel: IsacChannel) -> tuple:
    return hamming(channel.s1), hamming(channel.s2)


# ---------------------------------------------------------------------------
# joint design versus separation on the noiseless channel


@dataclass(frozen=True)
class Figure2Data:
    """Joint-region boundary, separation baseline and their comparison.

    ``matched`` holds, for every separation point, the joint-region point
    with identical (D1, D2); on this channel both distortions scale with
    1 - p, so such a point always exists.
    """

    joint: list
    separation: list
    matched: list
    dominated_fraction: float
    best_gap: float
    best_gap_lambda: float


def figure2_data(q: float, alpha: float, resolution: int = 1001, num_lambda: int = 101,
                 base=2, tol: float = 1e-12) -> Figure2Data:
    from .regions import pareto_filter, separation_baseline

    grid = lemma1_curve(q, alpha, resolution, base)
    # ties in the maximum rate go to the largest p, which has the lowest distortions
    rates = np.array([pt.r for pt in grid])
    i_max = int(np.flatnonzero(rates >= rates.max() - tol)[-1])
    top, bottom = grid[i_max], grid[-1]
    separation = separation_baseline(top, bottom, num_lambda)
    p_top = top.parameters["px"][1]
    matched, gaps = [], []
    for s in separation:
        lam = s.parameters["lambda"]
        p = 1.0 - lam * (1.0 - p_top)
        pt = lemma1_point(q, alpha, p, base).as_region_point("lemma1", px=(1.0 - p, p))
        matched.append(pt)
        gaps.append(pt.r - s.r)
    gaps = np.array(gaps)
    dominated = gaps > tol
    j = int(np.argmax(gaps))
    return Figure2Data(pareto_filter(grid), separation, matched, float(dominated.mean()),
                       float(gaps[j]), float(separation[j].parameters["lambda"]))


__all__ = [
    "BernoulliParams", "ClosedFormPoint", "LemmaPremiseError", "ERASURE",
    "bernoulli_noiseless_channel", "bec_bsc_channel", "state_prior",
    "lemma1_point", "lemma1_estimators", "lemma1_curve",
    "lemma2_threshold", "is_more_capable_closed_form", "D_of_p", "D_prime_of_p",
    "lemma3_d2", "lemma3_d2_exact", "lemma3_point", "lemma3_estimators", "lemma3_curve",
    "bernoulli_px", "hamming_metrics", "Figure2Data", "figure2_data",
]
