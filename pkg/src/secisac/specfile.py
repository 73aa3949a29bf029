"""JSON channel description files.

Layout::

    {
      "alphabets": {"X": [0, 1], "Y1": [0, 1, "e"], "Y2": [0, 1],
                    "S1": [0, 1], "S2": [0, 1]},
      "state_prior": {"axes": ["S1", "S2"], "p": [0.35, 0.0, 0.5135, 0.1365]},
      "kernel": {"axes": ["Y1", "Y2"],
                 "rows": [{"given": [0, 0, 0], "p": [...]}, ...]},
      "distortion": {"S1": {"reconstruction": [0, 1], "table": [[0, 1], [1, 0]]}}
    }

``state_prior.p`` is the flattened table in the declared axis order (last
axis fastest). Each kernel row is keyed by its ``(s1, s2, x)`` tuple and
lists P(y1, y2 | s1, s2, x) flattened with Y2 fastest. ``distortion`` is
optional; missing entries default to Hamming.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel_model import IsacChannel
from .estimation import DistortionMetric, hamming
from .prob_core import Alphabet

FILE_TOL = 1e-9
_TOP_KEYS = {"alphabets", "state_prior", "kernel", "distortion", "comment"}
_NAMES = ("X", "Y1", "Y2", "S1", "S2")


class SpecError(ValueError):
    """Malformed channel file; ``where`` locates the problem."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


@dataclass(frozen=True)
class ChannelSpec:
    channel: IsacChannel
    metrics: tuple


def _keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise SpecError("expected an object", where)
    unknown = set(obj) - set(allowed)
    if unknown:
        raise SpecError(f"unknown keys {sorted(unknown)}", where)
    missing = set(required) - set(obj)
    if missing:
        raise SpecError(f"missing keys {sorted(missing)}", where)


def _probs(values, n, where) -> np.ndarray:
    if not isinstance(values, list) or len(values) != n:
        raise SpecError(f"expected a list of {n} probabilities", where)
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError):
        raise SpecError("probabilities must be numbers", where) from None
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise SpecError("probabilities must be finite and nonnegative", where)
    if abs(arr.sum() - 1.0) > FILE_TOL:
        raise SpecError(f"probabilities sum to {arr.sum()!r}", where)
    return arr


def from_dict(doc: dict) -> ChannelSpec:
    _keys(doc, _TOP_KEYS, ("alphabets", "state_prior", "kernel"), "document")
    _keys(doc["alphabets"], _NAMES, _NAMES, "alphabets")
    alph = {}
    for name in _NAMES:
        syms = doc["alphabets"][name]
        if not isinstance(syms, list) or not syms:
            raise SpecError("expected a non-empty symbol list", f"alphabets.{name}")
        try:
            alph[name] = Alphabet(name, syms)
        except (ValueError, TypeError) as exc:
            raise SpecError(str(exc), f"alphabets.{name}") from None

    sp = doc["state_prior"]
    _keys(sp, ("axes", "p"), ("axes", "p"), "state_prior")
    if sp["axes"] not in (["S1", "S2"], ["S2", "S1"]):
        raise SpecError("axes must be a permutation of S1, S2", "state_prior.axes")
    a0, a1 = (alph[n] for n in sp["axes"])
    prior = _probs(sp["p"], len(a0) * len(a1), "state_prior.p").reshape(len(a0), len(a1))
    if sp["axes"] == ["S2", "S1"]:
        prior = prior.T

    kn = doc["kernel"]
    _keys(kn, ("axes", "rows"), ("rows",), "kernel")
    axes = kn.get("axes", ["Y1", "Y2"])
    if axes not in (["Y1", "Y2"], ["Y2", "Y1"]):
        raise SpecError("axes must be a permutation of Y1, Y2", "kernel.axes")
    s1, s2, x, y1, y2 = alph["S1"], alph["S2"], alph["X"], alph["Y1"], alph["Y2"]
    o0, o1 = (alph[n] for n in axes)
    w = np.full((len(s1), len(s2), len(x), len(y1), len(y2)), np.nan)
    rows = kn["rows"]
    if not isinstance(rows, list):
        raise SpecError("expected a list of rows", "kernel.rows")
    for i, row in enumerate(rows):
        where = f"kernel.rows[{i}]"
        _keys(row, ("given", "p"), ("given", "p"), where)
        given = row["given"]
        if not isinstance(given, list) or len(given) != 3:
            raise SpecError("given must be [s1, s2, x]", where)
        try:
            idx = (s1.index(given[0]), s2.index(given[1]), x.index(given[2]))
        except ValueError as exc:
            raise SpecError(str(exc), where) from None
        if not np.isnan(w[idx]).all():
            raise SpecError(f"duplicate row for {given}", where)
        pmf = _probs(row["p"], len(o0) * len(o1), where + ".p").reshape(len(o0), len(o1))
        w[idx] = pmf.T if axes == ["Y2", "Y1"] else pmf
    missing = np.argwhere(np.isnan(w[..., 0, 0]))
    if len(missing):
        a, b, c = missing[0]
        raise SpecError(f"no row for (s1, s2, x) = ({s1.symbols[a]!r}, {s2.symbols[b]!r}, "
                        f"{x.symbols[c]!r})", "kernel.rows")
    channel = IsacChannel(x, y1, y2, s1, s2, prior, w, tol=FILE_TOL)

    metrics = [hamming(channel.s1), hamming(channel.s2)]
    dist = doc.get("distortion", {})
    _keys(dist, ("S1", "S2"), (), "distortion")
    for j, name in ((0, "S1"), (1, "S2")):
        if name not in dist:
            continue
        where = f"distortion.{name}"
        entry = dist[name]
        _keys(entry, ("reconstruction", "table"), ("table",), where)
        state = channel.s1 if j == 0 else channel.s2
        recon = Alphabet(name + "_hat", entry.get("reconstruction", list(state.symbols)))
        try:
            metrics[j] = DistortionMetric(state, recon, np.array(entry["table"], dtype=float))
        except (ValueError, TypeError) as exc:
            raise SpecError(str(exc), where) from None
    return ChannelSpec(channel, tuple(metrics))


def loads(text: str) -> ChannelSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return from_dict(doc)


def load(path) -> ChannelSpec:
    return loads(Path(path).read_text(encoding="utf-8"))


def to_dict(channel: IsacChannel, metrics=None) -> dict:
    """Serialize a channel (and non-Hamming metrics) to the file layout."""
    doc = {
        "alphabets": {n: list(getattr(channel, n.lower()).symbols) for n in _NAMES},
        "state_prior": {"axes": ["S1", "S2"], "p": channel.prior.ravel().tolist()},
        "kernel": {"axes": ["Y1", "Y2"], "rows": []},
    }
    for idx in np.ndindex(*channel.w.shape[:3]):
        given = [channel.s1.symbols[idx[0]], channel.s2.symbols[idx[1]], channel.x.symbols[idx[2]]]
        doc["kernel"]["rows"].append({"given": given, "p": channel.w[idx].ravel().tolist()})
    if metrics is not None:
        dist = {}
        for name, m in zip(("S1", "S2"), metrics):
            h = hamming(m.state_alphabet)
            if (m.reconstruction_alphabet.symbols != h.reconstruction_alphabet.symbols
                    or not np.array_equal(m.table, h.table)):
                dist[name] = {"reconstruction": list(m.reconstruction_alphabet.symbols),
                              "table": m.table.tolist()}
        if dist:
            doc["distortion"] = dist
    return doc


def dumps(channel: IsacChannel, metrics=None) -> str:
    return json.dumps(to_dict(channel, metrics), indent=1) + "\n"
