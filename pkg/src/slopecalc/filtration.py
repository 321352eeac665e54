"""Hodge-side data: weight multisets and explicit flags of rational subspaces.

A descending filtration with finite support is stored either as its integer
weight multiset or as a flag: pairs (index, basis) with strictly increasing
indices, meaning Fil^j is the ambient space below the first listed index,
span(basis of the last entry with index <= j) in between, and zero above the
last listed index.  Weight i then has multiplicity dim Fil^i - dim Fil^{i+1}.

Flags are canonicalized to a dense presentation (one entry per index across
the jump window), so two presentations of the same filtration compare equal.

Weight-only data suffices for slope bookkeeping; subobject tests need a flag
and reject weights-only input with `FlagRequiredError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .rational import (
    FlagRequiredError,
    InputError,
    RatMatrix,
    coordinates,
    rat,
    rat_str,
    rref_rows,
    span_intersect,
    span_leq,
)

KIND_WEIGHTS = "weights"
KIND_FLAG = "flag"


def _full_basis(n: int) -> tuple:
    return tuple(tuple(Fraction(i == j) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class HodgeData:
    """Weight multiset or full flag presentation of a Hodge filtration."""

    kind: str
    rank: int
    weights: tuple  # sorted tuple of ints (always derivable)
    flag: Optional[tuple] = None  # dense canonical ((index, basis-rows), ...)

    def __post_init__(self):
        if self.kind not in (KIND_WEIGHTS, KIND_FLAG):
            raise InputError(f"unknown HodgeData kind {self.kind!r}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_weights(cls, weights: Sequence[int]) -> "HodgeData":
        ws = []
        for w in weights:
            if isinstance(w, bool) or not isinstance(w, int):
                raise InputError(f"Hodge weights must be integers, got {w!r}")
            ws.append(w)
        return cls(KIND_WEIGHTS, len(ws), tuple(sorted(ws)), None)

    @classmethod
    def from_flag(cls, entries, rank: Optional[int] = None) -> "HodgeData":
        """Build from (index, basis) pairs; see the module docstring for semantics."""
        norm = []
        ncols = rank
        for idx, basis in entries:
            if isinstance(idx, bool) or not isinstance(idx, int):
                raise InputError("flag indices must be integers")
            rows = [tuple(rat(x) for x in row) for row in basis]
            for row in rows:
                if ncols is None:
                    ncols = len(row)
                elif len(row) != ncols:
                    raise InputError("flag basis rows have inconsistent length")
            norm.append((idx, rows))
        if ncols is None:
            raise InputError("flag rank cannot be inferred; pass rank explicitly")
        if ncols == 0:
            return cls(KIND_FLAG, 0, (), ())
        norm.sort(key=lambda t: t[0])
        for (i1, _), (i2, _) in zip(norm, norm[1:]):
            if i1 == i2:
                raise InputError(f"duplicate flag index {i1}")
        raw = [(idx, rref_rows(rows, ncols)) for idx, rows in norm]
        if not raw:
            raise InputError("a flag on a nonzero space needs at least one entry")
        prev = _full_basis(ncols)
        for _, basis in raw:
            if not span_leq(basis, prev):
                raise InputError("flag subspaces must be nested")
            prev = basis

        def fil(j):
            if j < raw[0][0]:
                return _full_basis(ncols)
            if j > raw[-1][0]:
                return ()
            cur = _full_basis(ncols)
            for idx, basis in raw:
                if idx <= j:
                    cur = basis
                else:
                    break
            return cur

        first, last = raw[0][0], raw[-1][0]
        j1 = last
        while j1 >= first and not fil(j1):
            j1 -= 1
        j0 = next((j for j in range(first, last + 1) if len(fil(j)) < ncols), j1)
        j0 = min(j0, j1)
        if j1 < first:
            # the whole filtration dies at `first`: everything sits at weight first-1
            flag = ((first - 1, _full_basis(ncols)),)
        else:
            flag = tuple((j, fil(j)) for j in range(j0, j1 + 1))
        weights = tuple(sorted(_flag_weights(flag, ncols)))
        return cls(KIND_FLAG, ncols, weights, flag)

    # -- flag access ---------------------------------------------------------

    def require_flag(self, what: str = "this operation"):
        if self.kind != KIND_FLAG:
            raise FlagRequiredError(f"{what} requires flag-form Hodge data, got weights only")

    def subspace_at(self, j: int) -> tuple:
        """Canonical basis of Fil^j (flag form only)."""
        self.require_flag("subspace_at")
        if self.rank == 0 or not self.flag:
            return ()
        if j < self.flag[0][0]:
            return _full_basis(self.rank)
        if j > self.flag[-1][0]:
            return ()
        return self.flag[j - self.flag[0][0]][1]

    def support(self) -> tuple[int, int]:
        """(lo, hi) with Fil^lo ambient and Fil^hi zero."""
        if self.kind == KIND_FLAG:
            if not self.flag:
                return (0, 0)
            return (self.flag[0][0] - 1, self.flag[-1][0] + 1)
        if not self.weights:
            return (0, 0)
        return (min(self.weights), max(self.weights) + 1)

    # -- serialization -------------------------------------------------------

    def to_obj(self):
        if self.kind == KIND_WEIGHTS:
            return {"weights": list(self.weights)}
        return {
            "flag": [
                {"index": idx, "basis": [[rat_str(x) for x in row] for row in basis]}
                for idx, basis in self.flag
            ],
            "rank": self.rank,
        }

    @classmethod
    def from_obj(cls, obj) -> "HodgeData":
        if not isinstance(obj, dict):
            raise InputError("HodgeData JSON must be an object")
        if "weights" in obj:
            return cls.from_weights(obj["weights"])
        if "flag" in obj:
            entries = []
            for e in obj["flag"]:
                try:
                    entries.append((e["index"], e["basis"]))
                except (TypeError, KeyError) as exc:
                    raise InputError("flag entries need 'index' and 'basis'") from exc
            return cls.from_flag(entries, rank=obj.get("rank"))
        raise InputError("HodgeData JSON needs 'weights' or 'flag'")


def _flag_weights(flag, rank: int) -> list[int]:
    """Recover the weight multiset from jump dimensions of a dense flag."""
    dims = [(None, rank)]  # virtual Fil^{-infinity} = ambient
    for idx, basis in flag:
        dims.append((idx, len(basis)))
    weights = []
    for (_, d1), (i2, d2) in zip(dims, dims[1:]):
        if d2 > d1:
            raise InputError("flag subspaces must be descending")
        weights.extend([i2 - 1] * (d1 - d2))
    if flag:
        weights.extend([flag[-1][0]] * len(flag[-1][1]))
    return weights


def t_h(h: HodgeData) -> int:
    """Multiplicity-weighted weight sum: sum of i * dim gr^i."""
    return sum(h.weights)


def dual_hodge(h: HodgeData) -> HodgeData:
    """Dual filtration: level i of the dual is the annihilator of Fil^{1-i}.

    The index shift makes the jump bookkeeping come out right: weight w of h
    becomes weight -w of the dual, so t_h negates and double duals return the
    original.  (This is the convention under which weak admissibility is
    stable under duality.)
    """
    if h.kind == KIND_WEIGHTS:
        return HodgeData.from_weights([-w for w in h.weights])
    if h.rank == 0:
        return h
    lo, hi = h.support()
    entries = [(j, _annihilator(h.subspace_at(1 - j), h.rank)) for j in range(1 - hi, 2 - lo)]
    return _flag_from_chain(entries, h.rank)


def _annihilator(basis, n: int) -> tuple:
    if not basis:
        return _full_basis(n)
    return RatMatrix(list(basis)).nullspace()


def _flag_from_chain(entries, rank: int) -> HodgeData:
    """Flag-form HodgeData from a dense descending chain (j, basis).

    The chain must start at the ambient space and end at zero.
    """
    if rank == 0:
        return HodgeData(KIND_FLAG, 0, (), ())
    jumps = []
    prev_dim = rank
    last_nonzero = None
    for j, basis in entries:
        if len(basis) < prev_dim:
            jumps.append((j, basis))
            prev_dim = len(basis)
        if basis:
            last_nonzero = (j, basis)
    if last_nonzero is not None and jumps and jumps[-1][0] < last_nonzero[0]:
        jumps.append(last_nonzero)
    if last_nonzero is None:
        jumps = [(entries[0][0], _full_basis(rank))] if entries else []
        if not jumps:
            raise InputError("empty chain")
    return HodgeData.from_flag(jumps, rank=rank)


def shift(h: HodgeData, r: int) -> HodgeData:
    """Shift every weight / jump index up by r."""
    if isinstance(r, bool) or not isinstance(r, int):
        raise InputError("shift amount must be an integer")
    if h.kind == KIND_WEIGHTS:
        return HodgeData.from_weights([w + r for w in h.weights])
    if h.rank == 0:
        return h
    return HodgeData.from_flag([(idx + r, basis) for idx, basis in h.flag], rank=h.rank)


def induced_on_subspace(h: HodgeData, subspace: Sequence) -> HodgeData:
    """Filtration Fil^i intersect W, rewritten on W, with recomputed jumps.

    Requires flag form; the subspace is given by independent row vectors of
    the ambient space.  The result is flag-form of rank dim(W).
    """
    h.require_flag("induced_on_subspace")
    w_basis = rref_rows([tuple(rat(x) for x in row) for row in subspace], h.rank)
    k = len(w_basis)
    if k == 0:
        return HodgeData(KIND_FLAG, 0, (), ())
    lo, hi = h.support()
    chain = []
    for j in range(lo, hi + 1):
        inter = span_intersect(h.subspace_at(j), w_basis, h.rank)
        chain.append((j, _in_coordinates(inter, w_basis)))
    return _flag_from_chain(chain, k)


def _in_coordinates(vectors, basis) -> tuple:
    """Rewrite vectors of span(basis) in basis coordinates."""
    out = []
    for v in vectors:
        c = coordinates(basis, v)
        if c is None:
            raise InputError("vector not in subspace")
        out.append(c)
    return rref_rows(out, len(basis))
