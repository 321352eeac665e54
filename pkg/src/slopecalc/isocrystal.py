"""Frobenius modules over a p-adic base with residue field F_p.

A module is an invertible rational matrix phi together with a nilpotent
operator N obeying the twisted commutation rule N.phi = p.phi.N.  Slopes are
always read off the characteristic polynomial of phi through the Newton
polygon, never from eigenvectors, so everything stays exact and rational.

The normal form produced by `from_slopes` realizes the slope a/h (lowest
terms) as the companion block of x^h - p^a: basis e_1, ..., e_h with
phi(e_1) = e_2, ..., phi(e_h) = p^a e_1, and N = 0.  Blocks are ordered by
ascending slope.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .rational import (
    InputError,
    RatMatrix,
    charpoly,
    check_prime,
    newton_polygon,
    rat,
    rat_str,
    valuation,
)


@dataclass(frozen=True)
class SlopeMultiset:
    """Sorted multiset of rational slopes with positive multiplicities."""

    entries: tuple  # ((slope: Fraction, multiplicity: int), ...), slope ascending

    def __init__(self, entries):
        merged: dict[Fraction, int] = {}
        for s, m in entries:
            s = rat(s)
            m = int(m)
            if m <= 0:
                raise InputError("slope multiplicities must be positive")
            merged[s] = merged.get(s, 0) + m
        object.__setattr__(
            self, "entries", tuple(sorted(merged.items(), key=lambda t: t[0]))
        )

    @property
    def total(self) -> int:
        return sum(m for _, m in self.entries)

    def __iter__(self):
        return iter(self.entries)

    def union(self, other: "SlopeMultiset") -> "SlopeMultiset":
        return SlopeMultiset(tuple(self.entries) + tuple(other.entries))

    def to_obj(self):
        return [[rat_str(s), m] for s, m in self.entries]


FORM_MATRIX = "matrix"
FORM_DM_NORMAL = "dm-normal"


@dataclass(frozen=True)
class PhiModule:
    """A (phi, N)-module: prime p, invertible phi, nilpotent N.

    Construction checks shapes and invertibility of phi; the commutation rule
    and nilpotency of N are checked by `check_phi_n`, which reports a boolean
    so near-miss pairs can be examined rather than rejected.
    """

    p: int
    phi: RatMatrix
    nilpotent: RatMatrix
    form: str = FORM_MATRIX

    def __post_init__(self):
        check_prime(self.p)
        if not isinstance(self.phi, RatMatrix) or not isinstance(self.nilpotent, RatMatrix):
            raise InputError("phi and N must be RatMatrix instances")
        if not self.phi.is_square() or not self.nilpotent.is_square():
            raise InputError("phi and N must be square")
        if self.phi.rows != self.nilpotent.rows:
            raise InputError("phi and N must have equal size")
        if self.form not in (FORM_MATRIX, FORM_DM_NORMAL):
            raise InputError(f"unknown form {self.form!r}")
        if self.phi.rows > 0 and self.phi.det() == 0:
            raise InputError("phi must be invertible")

    @property
    def rank(self) -> int:
        return self.phi.rows

    @classmethod
    def from_matrices(cls, p, phi, nilpotent=None, form=FORM_MATRIX) -> "PhiModule":
        phi = phi if isinstance(phi, RatMatrix) else RatMatrix(phi)
        if nilpotent is None:
            nilpotent = RatMatrix.zeros(phi.rows, phi.rows)
        elif not isinstance(nilpotent, RatMatrix):
            nilpotent = RatMatrix(nilpotent)
        return cls(p, phi, nilpotent, form)

    @classmethod
    def zero(cls, p) -> "PhiModule":
        return cls(p, RatMatrix([]), RatMatrix([]), FORM_DM_NORMAL)

    def to_obj(self):
        return {
            "p": self.p,
            "phi": self.phi.to_strings(),
            "N": self.nilpotent.to_strings(),
            "form": self.form,
        }

    @classmethod
    def from_obj(cls, obj) -> "PhiModule":
        if not isinstance(obj, dict):
            raise InputError("PhiModule JSON must be an object")
        try:
            p = obj["p"]
            phi = obj["phi"]
        except KeyError as exc:
            raise InputError(f"PhiModule JSON missing key {exc}") from exc
        n = obj.get("N")
        form = obj.get("form", FORM_MATRIX)
        return cls.from_matrices(p, RatMatrix(phi), RatMatrix(n) if n is not None else None, form)


def check_phi_n(m: PhiModule) -> bool:
    """True iff N.phi = p.phi.N exactly, N is nilpotent, and phi is invertible."""
    phi, n = m.phi, m.nilpotent
    if phi.rows != n.rows:
        raise InputError("phi and N must have equal size")
    if m.rank == 0:
        return True
    if phi.det() == 0:
        return False
    if n @ phi != (phi @ n).scale(m.p):
        return False
    power = n
    for _ in range(m.rank - 1):
        if power.is_zero():
            break
        power = power @ n
    return power.is_zero()


def newton_slopes(m: PhiModule) -> SlopeMultiset:
    """Slope multiset of phi: root valuations of its characteristic polynomial.

    Basis-independent, since the characteristic polynomial is.
    """
    coeffs = charpoly(m.phi)
    if m.rank == 0:
        return SlopeMultiset(())
    return SlopeMultiset(newton_polygon(coeffs, m.p))


def t_n(m: PhiModule) -> Fraction:
    """v_p(det phi); equals the multiplicity-weighted sum of Newton slopes."""
    if m.rank == 0:
        return Fraction(0)
    return Fraction(valuation(m.phi.det(), m.p))


def _dm_block(num: int, den: int, p: int) -> RatMatrix:
    """Companion block of x^den - p^num (slope num/den in lowest terms)."""
    rows = [[Fraction(0)] * den for _ in range(den)]
    for i in range(1, den):
        rows[i][i - 1] = Fraction(1)
    rows[0][den - 1] = Fraction(p) ** num
    return RatMatrix(rows)


def from_slopes(slopes: SlopeMultiset, p: int) -> PhiModule:
    """Slope normal form: one companion block of size h per h-fold slice of a/h.

    Each slope a/h (lowest terms) must appear with multiplicity divisible by
    h; every h-sized slice contributes one block and N = 0.
    """
    check_prime(p)
    if not isinstance(slopes, SlopeMultiset):
        slopes = SlopeMultiset(slopes)
    blocks = []
    for s, mult in slopes:
        num, den = s.numerator, s.denominator
        if den > mult:
            raise InputError(
                f"slope {rat_str(s)} has denominator {den} exceeding its multiplicity {mult}"
            )
        if mult % den != 0:
            raise InputError(
                f"multiplicity {mult} of slope {rat_str(s)} is not divisible by {den}"
            )
        blocks.extend([_dm_block(num, den, p)] * (mult // den))
    total = sum(b.rows for b in blocks)
    rows = [[Fraction(0)] * total for _ in range(total)]
    at = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.rows):
                rows[at + i][at + j] = b.entries[i][j]
        at += b.rows
    return PhiModule(p, RatMatrix(rows), RatMatrix.zeros(total, total), FORM_DM_NORMAL)


def dm_blocks(m: PhiModule) -> list[tuple[Fraction, int, int]]:
    """Block layout (slope, offset, size) of a module in slope normal form."""
    out = []
    at = 0
    for s, mult in newton_slopes(m):
        den = s.denominator
        for _ in range(mult // den):
            out.append((s, at, den))
            at += den
    return out


def is_dm_normal(m: PhiModule) -> bool:
    """True iff phi equals the canonical slope-normal-form matrix byte for byte."""
    if m.rank == 0:
        return True
    try:
        canon = from_slopes(newton_slopes(m), m.p)
    except InputError:
        return False
    return m.phi == canon.phi


def tensor(a: PhiModule, b: PhiModule) -> PhiModule:
    """Tensor product: Kronecker phi's, Leibniz rule for N."""
    if a.p != b.p:
        raise InputError("tensor requires modules over the same prime")
    phi = a.phi.kron(b.phi)
    n = a.nilpotent.kron(RatMatrix.identity(b.rank)) + RatMatrix.identity(a.rank).kron(
        b.nilpotent
    )
    return PhiModule(a.p, phi, n, FORM_MATRIX)


def dual(a: PhiModule) -> PhiModule:
    """Dual module: phi becomes transpose-inverse, N becomes minus transpose."""
    if a.rank == 0:
        return a
    return PhiModule(
        a.p, a.phi.inverse().transpose(), -a.nilpotent.transpose(), FORM_MATRIX
    )


def det(a: PhiModule) -> PhiModule:
    """Top exterior power: rank one, phi acts by det(phi), N by the zero trace."""
    if a.rank == 0:
        return a
    return PhiModule(
        a.p, RatMatrix([[a.phi.det()]]), RatMatrix.zeros(1, 1), FORM_MATRIX
    )
