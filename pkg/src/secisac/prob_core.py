"""Finite-alphabet probability calculus.

Joint tables carry named axes so that every entropy and mutual information
term can be written by variable name, e.g.
``mutual_information(joint, {"V"}, {"Y1"}, {"S1"})`` for I(V;Y1|S1).

All logarithms are taken in nats internally and converted on return.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

#: probabilities below this are treated as exact zeros before taking logs
ZERO_TOL = 1e-15
#: accepted deviation of a table sum from one at construction
NORM_TOL = 1e-12
#: tables closer to one than this are stored without renormalization,
#: which keeps export/re-parse round trips bit-exact
_RENORM_SLACK = 1e-14


class ZeroMassError(ValueError):
    """Raised when conditioning on an event of probability zero."""


class _ZeroMass:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ZERO_MASS"

    def __bool__(self):
        return False


#: sentinel returned by :func:`condition` for zero-mass events when requested
ZERO_MASS = _ZeroMass()


@dataclass(frozen=True)
class Alphabet:
    """A named, ordered finite symbol set."""

    name: str
    symbols: tuple

    def __init__(self, name: str, symbols: Iterable[Hashable]):
        symbols = tuple(symbols)
        if not symbols:
            raise ValueError(f"alphabet {name!r} is empty")
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"alphabet {name!r} has repeated symbols")
        object.__setattr__(self, "name", str(name))
        object.__setattr__(self, "symbols", symbols)

    def __len__(self):
        return len(self.symbols)

    def index(self, symbol) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise ValueError(f"{symbol!r} is not a symbol of {self.name}") from None

    def renamed(self, name: str) -> "Alphabet":
        return Alphabet(name, self.symbols)


def _check_pmf_array(mass: np.ndarray, tol: float, what: str) -> np.ndarray:
    mass = np.asarray(mass, dtype=float)
    if not np.all(np.isfinite(mass)):
        raise ValueError(f"{what} has non-finite entries")
    if np.any(mass < 0):
        raise ValueError(f"{what} has negative entries")
    return mass


class LabeledJoint:
    """Normalized probability table over a product of named alphabets.

    ``mass[i0, i1, ...]`` is the probability of ``(axes[0].symbols[i0], ...)``.
    Instances are treated as immutable; the stored array is read-only.
    """

    __slots__ = ("axes", "mass", "_pos")

    def __init__(self, axes: Sequence[Alphabet], mass, tol: float = NORM_TOL):
        axes = tuple(axes)
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise ValueError(f"axis names must be unique, got {names}")
        mass = _check_pmf_array(mass, tol, "joint table")
        shape = tuple(len(a) for a in axes)
        if mass.shape != shape:
            raise ValueError(f"table shape {mass.shape} does not match axes {shape}")
        total = float(mass.sum())
        if abs(total - 1.0) > tol:
            raise ValueError(f"joint table sums to {total!r}, not 1")
        if abs(total - 1.0) > _RENORM_SLACK:
            mass = mass / total
        else:
            mass = mass.copy()
        mass.setflags(write=False)
        self.axes = axes
        self.mass = mass
        self._pos = {n: i for i, n in enumerate(names)}

    @property
    def names(self) -> tuple:
        return tuple(a.name for a in self.axes)

    def axis(self, name: str) -> Alphabet:
        return self.axes[self._positions([name])[0]]

    def _positions(self, names: Iterable[str]) -> list:
        out = []
        for n in names:
            if n not in self._pos:
                raise ValueError(f"unknown axis {n!r}; joint has {self.names}")
            out.append(self._pos[n])
        return out

    def marginal_array(self, names: Sequence[str]) -> np.ndarray:
        """Marginal table with axes in the order given by ``names``."""
        names = list(names)
        pos = self._positions(names)
        if len(set(pos)) != len(pos):
            raise ValueError("repeated axis name")
        drop = tuple(i for i in range(len(self.axes)) if i not in pos)
        m = self.mass.sum(axis=drop) if drop else self.mass
        kept = sorted(pos)
        return np.transpose(m, [kept.index(p) for p in pos])

    def __repr__(self):
        return f"LabeledJoint({', '.join(f'{a.name}[{len(a)}]' for a in self.axes)})"

    def __eq__(self, other):
        if not isinstance(other, LabeledJoint):
            return NotImplemented
        return self.axes == other.axes and np.array_equal(self.mass, other.mass)

    __hash__ = None


class Kernel:
    """Conditional distribution P(to_axes | from_axes).

    ``table`` has shape ``from_shape + to_shape`` and every row (fixing the
    conditioning tuple) sums to one.
    """

    __slots__ = ("from_axes", "to_axes", "table")

    def __init__(self, from_axes: Sequence[Alphabet], to_axes: Sequence[Alphabet], table,
                 tol: float = NORM_TOL):
        from_axes, to_axes = tuple(from_axes), tuple(to_axes)
        names = [a.name for a in from_axes + to_axes]
        if len(set(names)) != len(names):
            raise ValueError(f"kernel axis names must be unique, got {names}")
        table = _check_pmf_array(table, tol, "kernel table")
        fshape = tuple(len(a) for a in from_axes)
        tshape = tuple(len(a) for a in to_axes)
        if table.shape != fshape + tshape:
            raise ValueError(f"kernel shape {table.shape} does not match {fshape + tshape}")
        rows = table.reshape(int(np.prod(fshape, dtype=int)), -1)
        sums = rows.sum(axis=1)
        bad = np.abs(sums - 1.0) > tol
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ValueError(f"kernel row {np.unravel_index(i, fshape)} sums to {sums[i]!r}")
        if np.any(np.abs(sums - 1.0) > _RENORM_SLACK):
            rows = rows / sums[:, None]
        table = rows.reshape(fshape + tshape).copy()
        table.setflags(write=False)
        self.from_axes = from_axes
        self.to_axes = to_axes
        self.table = table

    @classmethod
    def deterministic(cls, from_axes, to_axes, fn) -> "Kernel":
        """Kernel putting all mass on ``fn(*from_symbols)`` (a tuple of to-symbols)."""
        from_axes, to_axes = tuple(from_axes), tuple(to_axes)
        fshape = tuple(len(a) for a in from_axes)
        table = np.zeros(fshape + tuple(len(a) for a in to_axes))
        for idx in np.ndindex(*fshape):
            syms = [a.symbols[i] for a, i in zip(from_axes, idx)]
            out = fn(*syms)
            if not isinstance(out, tuple):
                out = (out,)
            table[idx + tuple(a.index(s) for a, s in zip(to_axes, out))] = 1.0
        return cls(from_axes, to_axes, table)

    def __eq__(self, other):
        if not isinstance(other, Kernel):
            return NotImplemented
        return (self.from_axes == other.from_axes and self.to_axes == other.to_axes
                and np.array_equal(self.table, other.table))

    __hash__ = None

    def __repr__(self):
        f = ",".join(a.name for a in self.from_axes)
        t = ",".join(a.name for a in self.to_axes)
        return f"Kernel({t}|{f})"


# ---------------------------------------------------------------------------
# scalar helpers


def _log_scale(base) -> float:
    if base == 2 or base == 2.0:
        return math.log(2.0)
    if base == math.e or base == "e":
        return 1.0
    raise ValueError(f"log base must be 2 or e, got {base!r}")


def _check_prob(x, what="probability") -> float:
    x = float(x)
    if not (0.0 <= x <= 1.0) or math.isnan(x):
        raise ValueError(f"{what} must lie in [0, 1], got {x!r}")
    return x


def binary_entropy(x: float, base=2) -> float:
    """Hb(x) = -x log x - (1-x) log(1-x)."""
    x = _check_prob(x)
    h = 0.0
    for t in (x, 1.0 - x):
        if t > ZERO_TOL:
            h -= t * math.log(t)
    return h / _log_scale(base)


def binary_entropy_array(x: np.ndarray, base=2) -> np.ndarray:
    """Vectorized :func:`binary_entropy` (no range checks)."""
    x = np.asarray(x, dtype=float)
    return (_plogp(x) + _plogp(1.0 - x)) / _log_scale(base)


def star(p: float, beta: float) -> float:
    """Binary convolution p*beta = p(1-beta) + (1-p)beta."""
    p, beta = _check_prob(p), _check_prob(beta)
    return p * (1.0 - beta) + (1.0 - p) * beta


def positive_part(a: float) -> float:
    return a if a > 0.0 else 0.0


def _plogp(p: np.ndarray) -> np.ndarray:
    """Elementwise -p ln p with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    nz = p > ZERO_TOL
    out[nz] = -p[nz] * np.log(p[nz])
    return out


def pmf_entropy(pmf, base=2) -> float:
    """Entropy of a plain probability vector or table."""
    return float(_plogp(pmf).sum()) / _log_scale(base)


# ---------------------------------------------------------------------------
# information measures on labeled joints


def _as_names(vars) -> list:
    if isinstance(vars, str):
        return [vars]
    return list(vars)


def _entropy_nats(joint: LabeledJoint, names: list) -> float:
    if not names:
        return 0.0
    return float(_plogp(joint.marginal_array(names)).sum())


def entropy(joint: LabeledJoint, vars, base=2) -> float:
    """H(vars) under ``joint``."""
    return _entropy_nats(joint, _as_names(vars)) / _log_scale(base)


def conditional_entropy(joint: LabeledJoint, target_vars, given_vars=(), base=2) -> float:
    """H(target | given) = H(target, given) - H(given)."""
    t, g = _as_names(target_vars), _as_names(given_vars)
    if set(t) & set(g):
        raise ValueError(f"target {t} and conditioning {g} overlap")
    h = _entropy_nats(joint, t + g) - _entropy_nats(joint, g)
    return max(h, 0.0) / _log_scale(base)


def mutual_information(joint: LabeledJoint, a_vars, b_vars, given_vars=(), base=2,
                       clamp_tol: float = 1e-12) -> float:
    """I(A; B | G).

    Slightly negative round-off (above ``-clamp_tol`` in nats) is clamped to
    zero; anything more negative indicates a bug and raises.
    """
    a, b, g = _as_names(a_vars), _as_names(b_vars), _as_names(given_vars)
    if set(a) & set(b) or set(a) & set(g) or set(b) & set(g):
        raise ValueError("variable sets must be pairwise disjoint")
    i = (_entropy_nats(joint, a + g) + _entropy_nats(joint, b + g)
         - _entropy_nats(joint, a + b + g) - _entropy_nats(joint, g))
    if i < 0.0:
        if i < -clamp_tol:
            raise ArithmeticError(f"negative mutual information {i!r}")
        i = 0.0
    return i / _log_scale(base)


def marginalize(joint: LabeledJoint, keep_vars) -> LabeledJoint:
    """Marginal joint over ``keep_vars`` (in the order given)."""
    names = _as_names(keep_vars)
    axes = [joint.axis(n) for n in names]
    return LabeledJoint(axes, joint.marginal_array(names))


def condition(joint: LabeledJoint, given: Mapping[str, Hashable], zero_mass: str = "raise"):
    """Conditional joint of the remaining axes given ``{axis: symbol}``.

    For a zero-probability event this raises :class:`ZeroMassError`, or
    returns :data:`ZERO_MASS` when ``zero_mass="sentinel"``.
    """
    if zero_mass not in ("raise", "sentinel"):
        raise ValueError("zero_mass must be 'raise' or 'sentinel'")
    pos = joint._positions(given)
    index = [slice(None)] * len(joint.axes)
    for p, (name, sym) in zip(pos, given.items()):
        index[p] = joint.axes[p].index(sym)
    sub = joint.mass[tuple(index)]
    total = float(sub.sum())
    if total <= ZERO_TOL:
        if zero_mass == "sentinel":
            return ZERO_MASS
        raise ZeroMassError(f"conditioning event {dict(given)} has zero probability")
    rest = [a for i, a in enumerate(joint.axes) if i not in pos]
    return LabeledJoint(rest, sub / total)


def product_joint(*parts: LabeledJoint) -> LabeledJoint:
    """Joint of independent components."""
    axes = []
    mass = np.ones(())
    for part in parts:
        axes.extend(part.axes)
        mass = np.multiply.outer(mass, part.mass)
    return LabeledJoint(axes, mass)
