"""Secrecy-distortion bounds, parameter sweeps and the separation baseline.

Each evaluator returns the maximal rates and minimal distortions for one
(channel, input/auxiliary) choice. The region itself is the union over
choices of the downward closure in rate and upward closure in distortion.
"""

from __future__ import annotations

import itertools
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from . import channel_model as cm
from .channel_model import AuxChain, IsacChannel, assemble_joint
from .estimation import DistortionMetric, expected_distortion, hamming, optimal_estimator
from .prob_core import (LabeledJoint, conditional_entropy as H, mutual_information as I,
                        positive_part)

PROVENANCES = ("inner-PS", "outer-PS", "theorem1", "theorem2", "inner-full", "outer-full",
               "theorem3", "theorem4", "lemma1", "lemma3", "separation")

#: bound selector -> provenance tag
BOUNDS = {
    "inner-ps": "inner-PS",
    "outer-ps": "outer-PS",
    "theorem1": "theorem1",
    "theorem2": "theorem2",
    "inner-full": "inner-full",
    "outer-full": "outer-full",
    "theorem3": "theorem3",
    "theorem4": "theorem4",
}
PARTIAL_BOUNDS = ("inner-ps", "outer-ps", "theorem1", "theorem2")
AUX_BOUNDS = ("inner-ps", "outer-ps", "theorem1", "theorem2", "inner-full")

PARETO_TOL = 1e-12


class SweepTooLarge(ValueError):
    """A sweep grid exceeds the configured evaluation cap."""

    def __init__(self, evaluations: int, cap: int, seconds: float):
        self.evaluations = evaluations
        self.cap = cap
        self.seconds = seconds
        super().__init__(f"sweep needs {evaluations} evaluations (cap {cap}); "
                         f"estimated {seconds:.0f} s")


@dataclass(frozen=True)
class RegionPoint:
    """One corner (R1, R2, D1, D2) or (R, D1, D2) of a region.

    For full-secrecy regions ``r1`` is None and ``r`` is the secret rate;
    for partial secrecy ``r`` holds R2.
    """

    r1: Optional[float]
    r: float
    d1: float
    d2: float
    provenance: str
    parameters: Mapping = field(default_factory=dict, compare=False)
    warnings: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        for v in (self.r1, self.r, self.d1, self.d2):
            if v is not None and v < -1e-12:
                raise ValueError(f"negative rate or distortion in {self}")

    @property
    def rates(self) -> tuple:
        return (self.r,) if self.r1 is None else (self.r1, self.r)


@dataclass(frozen=True)
class Distortions:
    d1: float
    d2: float


def _metrics(channel: IsacChannel, metrics) -> tuple:
    if metrics is None:
        return hamming(channel.s1), hamming(channel.s2)
    m1, m2 = metrics
    return m1, m2


def min_distortions(joint: LabeledJoint, metrics: Sequence[DistortionMetric],
                    observation_vars=("X", "Y1", "Y2")) -> Distortions:
    d = []
    for j, metric in ((1, metrics[0]), (2, metrics[1])):
        est = optimal_estimator(joint, j, metric, observation_vars)
        d.append(expected_distortion(joint, est, metric, j))
    return Distortions(*d)


# ---------------------------------------------------------------------------
# bound evaluators


@dataclass(frozen=True)
class PartialSecrecyBound:
    """Rate terms of a partial-secrecy bound for fixed auxiliaries.

    ``r2_first`` is the channel-dependent first argument of the R2 minimum
    and ``i_v`` is I(V;Y1|S1); R2 is then capped by ``r2(r1)``.
    """

    r1_max: float
    r2_first: float
    i_v: float
    d1: float
    d2: float

    def r2(self, r1: float) -> float:
        if r1 < 0 or r1 > self.r1_max + 1e-12:
            raise ValueError(f"R1={r1} outside [0, {self.r1_max}]")
        return max(min(self.r2_first, self.i_v - r1), 0.0)


@dataclass(frozen=True)
class FullSecrecyBound:
    r_max: float
    d1: float
    d2: float


def partial_secrecy_inner(channel: IsacChannel, aux: AuxChain, metrics=None, base=2,
                          enforce_caps: bool = True) -> PartialSecrecyBound:
    """Superposition inner bound with public auxiliary U and secret auxiliary V."""
    if enforce_caps:
        aux.check_caps(cm.card_v_partial(channel), cm.card_u_partial(channel))
    j = assemble_joint(channel, aux)
    r1 = I(j, "U", "Y1", "S1", base)
    wiretap = I(j, "V", "Y1", ["S1", "U"], base) - I(j, "V", "Y2", ["S2", "U"], base)
    r2_prime = positive_part(wiretap) + H(j, "Y1", ["Y2", "S2", "V"], base)
    d = min_distortions(j, _metrics(channel, metrics))
    return PartialSecrecyBound(r1, r2_prime, I(j, "V", "Y1", "S1", base), d.d1, d.d2)


def partial_secrecy_outer(channel: IsacChannel, aux: AuxChain, metrics=None, base=2,
                          enforce_caps: bool = True) -> PartialSecrecyBound:
    """Converse bound; only V enters the rate expressions."""
    if enforce_caps:
        aux.check_caps(cm.card_v_outer(channel))
    j = assemble_joint(channel, aux)
    i_v = I(j, "V", "Y1", "S1", base)
    first = H(j, ["Y1", "S1"], ["Y2", "S2"], base) - H(j, "S1", ["Y1", "Y2", "S2", "V"], base)
    d = min_distortions(j, _metrics(channel, metrics))
    return PartialSecrecyBound(i_v, max(first, 0.0), i_v, d.d1, d.d2)


def _precondition(check, channel, label) -> tuple:
    verdict = check(channel)
    if verdict.holds:
        return ()
    msg = f"channel is not {label} (max violation {verdict.max_violation:.3g})"
    warnings.warn(msg, stacklevel=3)
    return (msg,)


def _aux_params(aux: AuxChain) -> dict:
    return {"px": tuple(float(v) for v in aux.px),
            "pv_given_x": aux.pv_given_x.table.tolist(),
            "pu_given_v": aux.pu_given_v.table.tolist()}


def theorem1_point(channel: IsacChannel, aux: AuxChain, r1: float = 0.0, metrics=None,
                   base=2, warn: bool = True) -> RegionPoint:
    """Exact partial-secrecy region point for physically-degraded channels."""
    notes = _precondition(cm.check_physically_degraded, channel, "physically-degraded") if warn else ()
    b = partial_secrecy_outer(channel, aux, metrics, base)
    return RegionPoint(r1, b.r2(r1), b.d1, b.d2, "theorem1",
                       {**_aux_params(aux), "r1": r1}, notes)


def _theorem2_bound(channel, aux, metrics, base) -> PartialSecrecyBound:
    aux.check_caps(cm.card_v_reverse(channel))
    j = assemble_joint(channel, aux)
    i_v = I(j, "V", "Y1", "S1", base)
    d = min_distortions(j, _metrics(channel, metrics))
    return PartialSecrecyBound(i_v, H(j, "Y1", ["Y2", "S2"], base), i_v, d.d1, d.d2)


def theorem2_point(channel: IsacChannel, aux: AuxChain, r1: float = 0.0, metrics=None,
                   base=2, warn: bool = True) -> RegionPoint:
    """Exact partial-secrecy region point for reversely-degraded channels."""
    notes = _precondition(cm.check_reversely_degraded, channel, "reversely-degraded") if warn else ()
    b = _theorem2_bound(channel, aux, metrics, base)
    return RegionPoint(r1, b.r2(r1), b.d1, b.d2, "theorem2",
                       {**_aux_params(aux), "r1": r1}, notes)


def full_secrecy_inner(channel: IsacChannel, aux: AuxChain, metrics=None, base=2,
                       enforce_caps: bool = True) -> FullSecrecyBound:
    """Full-secrecy inner bound: min{[I(V;Y1|S1)-I(V;Y2|S2)]+ + H(Y1|Y2,S2,V), I(V;Y1|S1)}."""
    if enforce_caps:
        aux.check_caps(cm.card_v_outer(channel))
    j = assemble_joint(channel, aux)
    i1 = I(j, "V", "Y1", "S1", base)
    i2 = I(j, "V", "Y2", "S2", base)
    r_dd = positive_part(i1 - i2) + H(j, "Y1", ["Y2", "S2", "V"], base)
    d = min_distortions(j, _metrics(channel, metrics))
    return FullSecrecyBound(min(r_dd, i1), d.d1, d.d2)


def full_secrecy_outer(channel: IsacChannel, px, metrics=None, base=2) -> FullSecrecyBound:
    """Full-secrecy converse over the input distribution alone."""
    j = channel.joint(px)
    first = H(j, ["Y1", "S1"], ["Y2", "S2"], base) - H(j, "S1", ["Y1", "Y2", "S2", "X"], base)
    r = min(max(first, 0.0), I(j, "X", "Y1", "S1", base))
    d = min_distortions(j, _metrics(channel, metrics))
    return FullSecrecyBound(r, d.d1, d.d2)


def _px_params(px) -> dict:
    return {"px": tuple(float(v) for v in px)}


def theorem3_point(channel: IsacChannel, px, metrics=None, base=2,
                   warn: bool = True) -> RegionPoint:
    """Exact full-secrecy region point for physically-degraded channels."""
    notes = _precondition(cm.check_physically_degraded, channel, "physically-degraded") if warn else ()
    b = full_secrecy_outer(channel, px, metrics, base)
    return RegionPoint(None, b.r_max, b.d1, b.d2, "theorem3", _px_params(px), notes)


def theorem4_point(channel: IsacChannel, px, metrics=None, base=2,
                   warn: bool = True) -> RegionPoint:
    """Exact full-secrecy region point for reversely-degraded channels."""
    notes = _precondition(cm.check_reversely_degraded, channel, "reversely-degraded") if warn else ()
    j = channel.joint(px)
    r = min(H(j, "Y1", ["Y2", "S2"], base), I(j, "X", "Y1", "S1", base))
    d = min_distortions(j, _metrics(channel, metrics))
    return RegionPoint(None, r, d.d1, d.d2, "theorem4", _px_params(px), notes)


# ---------------------------------------------------------------------------
# Pareto filtering and sweeps


def _objective(point: RegionPoint) -> np.ndarray:
    """Vector to be maximized: rates, then negated distortions."""
    return np.array([*point.rates, -point.d1, -point.d2])


def dominates(a: RegionPoint, b: RegionPoint, tol: float = PARETO_TOL) -> bool:
    """``a`` is at least as good as ``b`` everywhere and strictly better somewhere."""
    va, vb = _objective(a), _objective(b)
    return bool(np.all(va >= vb - tol) and np.any(va > vb + tol))


def pareto_filter(points: Sequence[RegionPoint], tol: float = PARETO_TOL) -> list:
    """Points not dominated by any other; duplicates keep their first occurrence.

    The output keeps the input order, so the result does not depend on how a
    parallel sweep scheduled its evaluations.
    """
    if not points:
        return []
    obj = np.array([_objective(p) for p in points])
    keep = []
    for i, v in enumerate(obj):
        ge = np.all(obj >= v - tol, axis=1)
        gt = np.any(obj > v + tol, axis=1)
        dominated = np.any(ge & gt)
        duplicate = np.any(np.all(np.abs(obj[:i] - v) <= tol, axis=1)) if i else False
        if not dominated and not duplicate:
            keep.append(points[i])
    return keep


@dataclass(frozen=True)
class SweepSpec:
    """Grid description for :func:`sweep_region`.

    ``kernel_resolution=None`` fixes V = X (and U constant or U = V per
    ``u_mode``); otherwise every row of P(V|X), and of P(U|V) for the
    inner partial-secrecy bound, ranges over a simplex lattice.
    """

    bound: str
    px_resolution: int = 1001
    kernel_resolution: Optional[int] = None
    r1_resolution: int = 11
    base: float = 2
    card_v: Optional[int] = None
    card_u: Optional[int] = None
    pareto: bool = True
    max_evaluations: int = 2_000_000
    threads: int = 1

    def __post_init__(self):
        if self.bound not in BOUNDS:
            raise ValueError(f"unknown bound {self.bound!r}; choose from {sorted(BOUNDS)}")
        if self.px_resolution < 2 or (self.kernel_resolution is not None and self.kernel_resolution < 2):
            raise ValueError("resolutions must be at least 2")
        if self.bound in PARTIAL_BOUNDS and self.r1_resolution < 2:
            raise ValueError("r1_resolution must be at least 2")


def _v_cap(channel, bound) -> Optional[int]:
    return {"inner-ps": cm.card_v_partial(channel), "outer-ps": cm.card_v_outer(channel),
            "theorem1": cm.card_v_outer(channel), "inner-full": cm.card_v_outer(channel),
            "theorem2": cm.card_v_reverse(channel)}.get(bound)


def _kernel_grid(n_from: int, n_to: int, resolution: int) -> list:
    rows = cm.simplex_grid(n_to, resolution)
    return [np.array(c) for c in itertools.product(rows, repeat=n_from)]


def _sweep_plan(channel: IsacChannel, spec: SweepSpec):
    pxs = cm.simplex_grid(len(channel.x), spec.px_resolution)
    nx = len(channel.x)
    if spec.bound not in AUX_BOUNDS:
        return pxs, [None], [None]
    cap = _v_cap(channel, spec.bound)
    nv = spec.card_v or nx
    if nv > cap:
        raise ValueError(f"card_v={nv} exceeds the cap {cap} for {spec.bound}")
    if spec.kernel_resolution is None:
        if spec.card_v not in (None, nx):
            raise ValueError("card_v needs kernel_resolution unless V = X")
        v_kernels = [None]
    else:
        v_kernels = _kernel_grid(nx, nv, spec.kernel_resolution)
    u_kernels = [None]
    if spec.bound == "inner-ps":
        nu = spec.card_u or 1
        if nu > cm.card_u_partial(channel):
            raise ValueError(f"card_u={nu} exceeds the cap {cm.card_u_partial(channel)}")
        if nu > 1:
            if spec.kernel_resolution is None:
                u_kernels = ["copy"] if nu == nv else None
                if u_kernels is None:
                    raise ValueError("card_u > 1 needs kernel_resolution unless U = V")
            else:
                u_kernels = _kernel_grid(nv, nu, spec.kernel_resolution)
    return pxs, v_kernels, u_kernels


#: rough per-evaluation cost used in the resource-guard estimate
_SECONDS_PER_EVAL = 4e-4


def estimate_evaluations(channel: IsacChannel, spec: SweepSpec) -> int:
    pxs, vk, uk = _sweep_plan(channel, spec)
    return len(pxs) * len(vk) * len(uk)


def sweep_region(channel: IsacChannel, spec: SweepSpec, metrics=None) -> list:
    """Evaluate the selected bound over the grid and return region points.

    Partial-secrecy bounds are sampled along R1 at ``r1_resolution`` points
    of [0, r1_max] per parameter setting. With ``spec.pareto`` the result is
    Pareto-filtered; either way the order matches the grid order.
    """
    pxs, v_kernels, u_kernels = _sweep_plan(channel, spec)
    n = len(pxs) * len(v_kernels) * len(u_kernels)
    if n > spec.max_evaluations:
        raise SweepTooLarge(n, spec.max_evaluations, n * _SECONDS_PER_EVAL)
    precond = ()
    if spec.bound in ("theorem1", "theorem3"):
        precond = _precondition(cm.check_physically_degraded, channel, "physically-degraded")
    elif spec.bound in ("theorem2", "theorem4"):
        precond = _precondition(cm.check_reversely_degraded, channel, "reversely-degraded")

    tasks = [(px, vk, uk) for px in pxs for vk in v_kernels for uk in u_kernels]

    def evaluate(task):
        return _evaluate(channel, spec, metrics, precond, *task)

    if spec.threads > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            groups = list(pool.map(evaluate, tasks))
    else:
        groups = [evaluate(t) for t in tasks]
    points = [p for g in groups for p in g]
    return pareto_filter(points) if spec.pareto else points


def _evaluate(channel, spec, metrics, precond, px, vk, uk) -> list:
    base = spec.base
    tag = BOUNDS[spec.bound]
    if spec.bound in ("outer-full", "theorem3"):
        b = full_secrecy_outer(channel, px, metrics, base)
        return [RegionPoint(None, b.r_max, b.d1, b.d2, tag, _px_params(px), precond)]
    if spec.bound == "theorem4":
        p = theorem4_point(channel, px, metrics, base, warn=False)
        return [replace(p, warnings=precond)]
    nv = None if vk is None else vk.shape[1]
    aux = AuxChain.build(channel.x, px, vk, uk, v_size=nv)
    params = _aux_params(aux)
    if spec.bound == "inner-full":
        b = full_secrecy_inner(channel, aux, metrics, base)
        return [RegionPoint(None, b.r_max, b.d1, b.d2, tag, params, precond)]
    if spec.bound == "inner-ps":
        b = partial_secrecy_inner(channel, aux, metrics, base)
    elif spec.bound == "theorem2":
        b = _theorem2_bound(channel, aux, metrics, base)
    else:
        b = partial_secrecy_outer(channel, aux, metrics, base)
    out = []
    # a zero R1 range collapses to the single point R1 = 0
    for r1 in np.unique(np.linspace(0.0, b.r1_max, spec.r1_resolution)):
        r1 = float(r1)
        out.append(RegionPoint(r1, b.r2(r1), b.d1, b.d2, tag, {**params, "r1": r1}, precond))
    return out


# ---------------------------------------------------------------------------
# separation baseline


def separation_baseline(max_rate_point: RegionPoint, min_distortion_point: RegionPoint,
                        num_lambda: int = 101) -> list:
    """Time sharing lam * max-rate point + (1 - lam) * min-distortion point.

    Rates and distortions are interpolated linearly on a uniform lam grid;
    lam = 0 reproduces the minimum-distortion point and lam = 1 the
    maximum-rate point.
    """
    if num_lambda < 2:
        raise ValueError("num_lambda must be at least 2")
    a, b = max_rate_point, min_distortion_point
    if (a.r1 is None) != (b.r1 is None):
        raise ValueError("points come from different kinds of region")
    out = []
    for lam in np.linspace(0.0, 1.0, num_lambda):
        lam = float(lam)

        def mix(u, v):
            if lam == 1.0:
                return u
            if lam == 0.0:
                return v
            return lam * u + (1.0 - lam) * v

        r1 = None if a.r1 is None else mix(a.r1, b.r1)
        out.append(RegionPoint(r1, mix(a.r, b.r), mix(a.d1, b.d1), mix(a.d2, b.d2),
                               "separation", {"lambda": lam}))
    return out
