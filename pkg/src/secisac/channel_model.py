"""State-dependent ISAC channels, auxiliary chains and channel orderings."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .prob_core import (Alphabet, Kernel, LabeledJoint, ZERO_TOL, _log_scale, _plogp)

STATE_AXES = ("S1", "S2")
OUTPUT_AXES = ("Y1", "Y2")
JOINT_AXES = ("U", "V", "X", "S1", "S2", "Y1", "Y2")


class IsacChannel:
    """State prior P(S1,S2) together with a kernel P(Y1,Y2 | S1,S2,X).

    Axis names are fixed: ``X``, ``Y1``, ``Y2``, ``S1``, ``S2``.
    """

    __slots__ = ("x", "y1", "y2", "s1", "s2", "state_prior", "kernel")

    def __init__(self, x: Alphabet, y1: Alphabet, y2: Alphabet, s1: Alphabet, s2: Alphabet,
                 state_prior, kernel, tol: float = 1e-12):
        x, y1, y2 = x.renamed("X"), y1.renamed("Y1"), y2.renamed("Y2")
        s1, s2 = s1.renamed("S1"), s2.renamed("S2")
        if isinstance(state_prior, LabeledJoint):
            if state_prior.names != STATE_AXES:
                raise ValueError(f"state prior axes must be {STATE_AXES}")
            if state_prior.axes != (s1, s2):
                raise ValueError("state prior alphabets do not match S1, S2")
        else:
            state_prior = LabeledJoint((s1, s2), state_prior, tol=tol)
        if isinstance(kernel, Kernel):
            if kernel.from_axes != (s1, s2, x) or kernel.to_axes != (y1, y2):
                raise ValueError("kernel alphabets do not match (S1,S2,X) -> (Y1,Y2)")
        else:
            kernel = Kernel((s1, s2, x), (y1, y2), kernel, tol=tol)
        self.x, self.y1, self.y2, self.s1, self.s2 = x, y1, y2, s1, s2
        self.state_prior = state_prior
        self.kernel = kernel

    def __eq__(self, other):
        if not isinstance(other, IsacChannel):
            return NotImplemented
        return self.state_prior == other.state_prior and self.kernel == other.kernel

    __hash__ = None

    def __repr__(self):
        sizes = ", ".join(f"|{a.name}|={len(a)}" for a in (self.x, self.y1, self.y2, self.s1, self.s2))
        return f"IsacChannel({sizes})"

    @property
    def prior(self) -> np.ndarray:
        return self.state_prior.mass

    @property
    def w(self) -> np.ndarray:
        """Kernel array indexed ``[s1, s2, x, y1, y2]``."""
        return self.kernel.table

    def swapped(self) -> "IsacChannel":
        """Channel with the roles of (Y1,S1) and (Y2,S2) exchanged."""
        prior = self.prior.T
        w = np.transpose(self.w, (1, 0, 2, 4, 3))
        return IsacChannel(self.x, self.y2, self.y1, self.s2, self.s1, prior, w)

    def joint(self, px) -> LabeledJoint:
        """Joint over (X, S1, S2, Y1, Y2) for input pmf ``px``."""
        px = _check_px(self, px)
        mass = np.einsum("x,ab,abxcd->xabcd", px, self.prior, self.w)
        return LabeledJoint((self.x, self.s1, self.s2, self.y1, self.y2), mass, tol=1e-9)


def _check_px(channel: IsacChannel, px) -> np.ndarray:
    px = np.asarray(px, dtype=float)
    if px.shape != (len(channel.x),):
        raise ValueError(f"input pmf must have length {len(channel.x)}")
    if np.any(px < 0) or abs(px.sum() - 1.0) > 1e-9:
        raise ValueError(f"invalid input pmf {px}")
    return px


def bernoulli_px(p: float) -> np.ndarray:
    return np.array([1.0 - p, p])


# ---------------------------------------------------------------------------
# auxiliary chains


def cardinality_core(channel: IsacChannel) -> int:
    """min{|X|, |Y1||S1|, |Y2||S2|}, the common term of all auxiliary caps."""
    return min(len(channel.x), len(channel.y1) * len(channel.s1), len(channel.y2) * len(channel.s2))


def card_u_partial(channel) -> int:
    return cardinality_core(channel) + 2


def card_v_partial(channel) -> int:
    m = cardinality_core(channel)
    return (m + 2) * (m + 1)


def card_v_outer(channel) -> int:
    return cardinality_core(channel) + 1


def card_v_reverse(channel) -> int:
    return cardinality_core(channel)


@dataclass(frozen=True)
class AuxChain:
    """Input pmf P(X) with auxiliaries U - V - X.

    U is generated from V only, so the Markov structure holds by construction.
    """

    px: np.ndarray
    pv_given_x: Kernel
    pu_given_v: Kernel

    def __post_init__(self):
        px = np.asarray(self.px, dtype=float)
        if px.ndim != 1 or np.any(px < 0) or abs(px.sum() - 1.0) > 1e-9:
            raise ValueError(f"invalid input pmf {self.px}")
        px.setflags(write=False)
        object.__setattr__(self, "px", px)
        if [a.name for a in self.pv_given_x.from_axes] != ["X"] or \
                [a.name for a in self.pv_given_x.to_axes] != ["V"]:
            raise ValueError("pv_given_x must be a kernel X -> V")
        if self.pu_given_v.from_axes != self.pv_given_x.to_axes or \
                [a.name for a in self.pu_given_v.to_axes] != ["U"]:
            raise ValueError("pu_given_v must be a kernel V -> U")
        if len(self.pv_given_x.from_axes[0]) != len(px):
            raise ValueError("input pmf length does not match the X alphabet")

    @property
    def x_alphabet(self) -> Alphabet:
        return self.pv_given_x.from_axes[0]

    @property
    def v_alphabet(self) -> Alphabet:
        return self.pv_given_x.to_axes[0]

    @property
    def u_alphabet(self) -> Alphabet:
        return self.pu_given_v.to_axes[0]

    @classmethod
    def build(cls, x_alphabet: Alphabet, px, pv_given_x=None, pu_given_v=None,
              v_size: Optional[int] = None, u_size: Optional[int] = None) -> "AuxChain":
        """Assemble a chain from arrays.

        ``pv_given_x=None`` means V = X; ``pu_given_v=None`` means constant U.
        Passing the string ``"copy"`` for ``pu_given_v`` makes U = V.
        """
        x = x_alphabet.renamed("X")
        if pv_given_x is None:
            v = Alphabet("V", x.symbols)
            pv = np.eye(len(x))
        else:
            pv = np.asarray(pv_given_x, dtype=float)
            v = Alphabet("V", range(v_size or pv.shape[1]))
        if isinstance(pu_given_v, str):
            if pu_given_v != "copy":
                raise ValueError("pu_given_v must be an array, None, or 'copy'")
            u = Alphabet("U", v.symbols)
            pu = np.eye(len(v))
        elif pu_given_v is None:
            u = Alphabet("U", (0,))
            pu = np.ones((len(v), 1))
        else:
            pu = np.asarray(pu_given_v, dtype=float)
            u = Alphabet("U", range(u_size or pu.shape[1]))
        return cls(px, Kernel([x], [v], pv, tol=1e-9), Kernel([v], [u], pu, tol=1e-9))

    @classmethod
    def direct(cls, channel: IsacChannel, px, u: str = "const") -> "AuxChain":
        """V = X with constant U (``u="const"``) or U = V (``u="copy"``)."""
        return cls.build(channel.x, px, None, "copy" if u == "copy" else None)

    def check_caps(self, max_v: Optional[int] = None, max_u: Optional[int] = None) -> None:
        if max_v is not None and len(self.v_alphabet) > max_v:
            raise ValueError(f"|V|={len(self.v_alphabet)} exceeds the cap {max_v}")
        if max_u is not None and len(self.u_alphabet) > max_u:
            raise ValueError(f"|U|={len(self.u_alphabet)} exceeds the cap {max_u}")


def assemble_joint(channel: IsacChannel, aux: AuxChain) -> LabeledJoint:
    """Joint over (U, V, X, S1, S2, Y1, Y2) = P_U|V P_V|X P_X P_S1S2 P_Y1Y2|S1S2X."""
    if aux.x_alphabet.symbols != channel.x.symbols:
        raise ValueError("auxiliary chain X alphabet does not match the channel")
    mass = np.einsum("vu,xv,x,ab,abxcd->uvxabcd", aux.pu_given_v.table, aux.pv_given_x.table,
                     aux.px, channel.prior, channel.w)
    axes = (aux.u_alphabet, aux.v_alphabet, channel.x, channel.s1, channel.s2,
            channel.y1, channel.y2)
    return LabeledJoint(axes, mass, tol=1e-9)


# ---------------------------------------------------------------------------
# input grids


def simplex_grid(k: int, resolution: int) -> np.ndarray:
    """All pmfs on k symbols with entries in multiples of 1/(resolution-1).

    For k=2 the rows are (1-p, p) with p ascending.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    n = resolution - 1
    if k == 1:
        return np.ones((1, 1))
    if k == 2:
        p = np.linspace(0.0, 1.0, resolution)
        return np.stack([1.0 - p, p], axis=1)
    rows = []
    for bars in itertools.combinations(range(n + k - 1), k - 1):
        edges = (-1,) + bars + (n + k - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(k)])
    return np.array(rows[::-1], dtype=float) / n


def simplex_grid_size(k: int, resolution: int) -> int:
    return math.comb(resolution - 1 + k - 1, k - 1)


def degradedness_probes(k: int) -> np.ndarray:
    """Vertex inputs, the uniform input and 9 interior mixtures per symbol."""
    probes = [row for row in np.eye(k)]
    uniform = np.full(k, 1.0 / k)
    probes.append(uniform)
    if k > 1:
        for i in range(k):
            for t in np.arange(1, 10) / 10.0:
                probes.append(t * np.eye(k)[i] + (1 - t) * uniform)
    return np.array(probes)


# ---------------------------------------------------------------------------
# orderings


@dataclass(frozen=True)
class DegradednessVerdict:
    holds: bool
    max_violation: float
    worst_px: np.ndarray
    n_probes: int
    tol: float

    def __bool__(self):
        return self.holds


def _ci_violation(joint_mass: np.ndarray) -> float:
    """max |P(z|x,c) - P(z|c)| for a table indexed [x, c, z] over cells P(x,c) > 0."""
    pxc = joint_mass.sum(axis=2)
    pcz = joint_mass.sum(axis=0)
    pc = pcz.sum(axis=1)
    worst = 0.0
    for ix, ic in zip(*np.nonzero(pxc > ZERO_TOL)):
        cond_x = joint_mass[ix, ic] / pxc[ix, ic]
        cond = pcz[ic] / pc[ic]
        worst = max(worst, float(np.max(np.abs(cond_x - cond))))
    return worst


def check_physically_degraded(channel: IsacChannel, tol: float = 1e-9,
                              probes: Optional[np.ndarray] = None) -> DegradednessVerdict:
    """Test (Y2,S2) independent of X given (S1,Y1) on every probe input.

    A necessary-condition numeric test of the factorization
    P_S1 P_Y1|S1X P_Y2S2|S1Y1 over the probed inputs; since the factorization
    does not depend on the input, any strictly positive probe decides it.
    """
    if probes is None:
        probes = degradedness_probes(len(channel.x))
    worst, worst_px = -1.0, probes[0]
    for px in probes:
        m = np.einsum("x,ab,abxcd->xacbd", px, channel.prior, channel.w)
        k = len(channel.x)
        c = len(channel.s1) * len(channel.y1)
        z = len(channel.s2) * len(channel.y2)
        v = _ci_violation(m.reshape(k, c, z))
        if v > worst:
            worst, worst_px = v, px
    return DegradednessVerdict(worst <= tol, worst, np.array(worst_px), len(probes), tol)


def check_reversely_degraded(channel: IsacChannel, tol: float = 1e-9,
                             probes: Optional[np.ndarray] = None) -> DegradednessVerdict:
    """Mirror of :func:`check_physically_degraded` with the receivers swapped."""
    return check_physically_degraded(channel.swapped(), tol=tol, probes=probes)


def conditional_mi_batch(channel: IsacChannel, px_batch: np.ndarray, receiver: int,
                         base=2) -> np.ndarray:
    """I(X; Yj | Sj) for each row of ``px_batch``."""
    px_batch = np.atleast_2d(np.asarray(px_batch, dtype=float))
    if receiver == 1:
        ps = channel.prior.sum(axis=1)
        # P(s, x, y) / P(s) with the other receiver summed out
        wsy = np.einsum("ab,abxcd->axc", channel.prior, channel.w)
    elif receiver == 2:
        ps = channel.prior.sum(axis=0)
        wsy = np.einsum("ab,abxcd->bxd", channel.prior, channel.w)
    else:
        raise ValueError("receiver must be 1 or 2")
    total = np.zeros(len(px_batch))
    for s in np.nonzero(ps > ZERO_TOL)[0]:
        w = wsy[s] / ps[s]                              # P(y | s, x)
        py = px_batch @ w                               # P(y | s)
        h_y = _plogp(py).sum(axis=1)
        h_y_given_x = px_batch @ _plogp(w).sum(axis=1)
        total += ps[s] * (h_y - h_y_given_x)
    return total / _log_scale(base)


@dataclass(frozen=True)
class MoreCapableVerdict:
    holds: bool
    margin: float
    argmin_px: np.ndarray
    n_grid: int
    resolution: int
    tol: float

    def __bool__(self):
        return self.holds


DEFAULT_BINARY_RESOLUTION = 1001
DEFAULT_SIMPLEX_RESOLUTION = 200


def check_more_capable(channel: IsacChannel, grid_resolution: Optional[int] = None,
                       tol: float = 1e-9, base=2) -> MoreCapableVerdict:
    """Grid-certify I(X;Y1|S1) >= I(X;Y2|S2) over input pmfs.

    The grid is the full simplex lattice (vertices included) at the given
    resolution per dimension, so the verdict is sound up to grid resolution.
    Ties in the minimum go to the lowest grid index.
    """
    k = len(channel.x)
    if grid_resolution is None:
        grid_resolution = DEFAULT_BINARY_RESOLUTION if k == 2 else DEFAULT_SIMPLEX_RESOLUTION
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be at least 2")
    grid = simplex_grid(k, grid_resolution)
    delta = (conditional_mi_batch(channel, grid, 1, base)
             - conditional_mi_batch(channel, grid, 2, base))
    i = int(np.argmin(delta))
    margin = float(delta[i])
    return MoreCapableVerdict(margin >= -tol, margin, grid[i].copy(), len(grid),
                              grid_resolution, tol)


# ---------------------------------------------------------------------------
# factory helpers used by tests and the channel-file parser


def channel_from_arrays(prior, w, x_symbols=None, y1_symbols=None, y2_symbols=None,
                        s1_symbols=None, s2_symbols=None) -> IsacChannel:
    """Build a channel from ``prior[s1, s2]`` and ``w[s1, s2, x, y1, y2]``."""
    w = np.asarray(w, dtype=float)
    ns1, ns2, nx, ny1, ny2 = w.shape

    def alpha(name, syms, n):
        return Alphabet(name, syms if syms is not None else range(n))

    return IsacChannel(alpha("X", x_symbols, nx), alpha("Y1", y1_symbols, ny1),
                       alpha("Y2", y2_symbols, ny2), alpha("S1", s1_symbols, ns1),
                       alpha("S2", s2_symbols, ns2), prior, w)


def random_pmf(rng: np.random.Generator, shape: Sequence[int], sparsity: float = 0.0) -> np.ndarray:
    """Random pmfs along the last axis; ``sparsity`` zeroes entries at random."""
    a = rng.dirichlet(np.ones(shape[-1]), size=tuple(shape[:-1]))
    if sparsity > 0:
        mask = rng.random(a.shape) < sparsity
        mask[..., 0] = False
        a = np.where(mask, 0.0, a)
        a /= a.sum(axis=-1, keepdims=True)
    return a


def random_channel(rng: np.random.Generator, max_size: int = 3) -> IsacChannel:
    """Unstructured random channel with all alphabets of size 2..max_size."""
    sizes = rng.integers(2, max_size + 1, size=5)
    nx, ny1, ny2, ns1, ns2 = (int(s) for s in sizes)
    prior = random_pmf(rng, (ns1 * ns2,)).reshape(ns1, ns2)
    w = random_pmf(rng, (ns1, ns2, nx, ny1 * ny2)).reshape(ns1, ns2, nx, ny1, ny2)
    return channel_from_arrays(prior, w)


def random_degraded_channel(rng: np.random.Generator, max_size: int = 3,
                            sparsity: float = 0.0) -> IsacChannel:
    """Physically-degraded channel by explicit factorization sampling.

    P(s1) P(s2|s1) P(y1|s1,x) P(y2|s1,s2,y1): the eavesdropper sees the
    legitimate output through a further channel, and the state prior does not
    depend on the input.
    """
    nx, ny1, ny2, ns1, ns2 = (int(s) for s in rng.integers(2, max_size + 1, size=5))
    ps1 = random_pmf(rng, (ns1,), sparsity)
    ps2_s1 = random_pmf(rng, (ns1, ns2), sparsity)
    py1 = random_pmf(rng, (ns1, nx, ny1), sparsity)
    py2 = random_pmf(rng, (ns1, ns2, ny1, ny2), sparsity)
    prior = ps1[:, None] * ps2_s1
    w = np.einsum("axc,abcd->abxcd", py1, py2)
    return channel_from_arrays(prior, w)
