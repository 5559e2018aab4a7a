"""Universal-envelope actions of the current/Virasoro pair on a highest
weight vector, using only the displayed brackets

    [J_m, J_n] = -m delta_{m+n},
    [L_m, J_n] = -m(m+1)/2 delta_{m+n} - n J_{m+n},
    [L_m, L_n] = (m-n) L_{m+n} + (c/12) m(m^2-1) delta_{m+n},  c = 2,

and J_n v = j delta_{n,0} v, L_n v = h delta_{n,0} v for n >= 0.  This layer
lets the two displayed forms of the degenerate vector at charge 1/2 be
compared before any expansion into ghost modes.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..errors import TruncationError
from .expr import CURRENT, VIRASORO, Mode, mode

_RANK = {CURRENT: 0, VIRASORO: 1}

Word = Tuple[Mode, ...]

CENTRAL_CHARGE = Fraction(2)


class JLVector:
    """Exact vector J_{a_1}..J_{a_p} L_{b_1}..L_{b_q} |j, h> in PBW form."""

    __slots__ = ("j", "h", "terms")

    def __init__(self, j, h, terms: Optional[Dict[Word, Fraction]] = None):
        self.j = Fraction(j)
        self.h = Fraction(h)
        merged: Dict[Word, Fraction] = {}
        for w, c in (terms or {}).items():
            if c == 0:
                continue
            merged[w] = merged.get(w, Fraction(0)) + c
        self.terms = {w: c for w, c in merged.items() if c != 0}

    @classmethod
    def highest_weight(cls, j, h) -> "JLVector":
        return cls(j, h, {(): Fraction(1)})

    def _like(self, terms: Dict[Word, Fraction]) -> "JLVector":
        return JLVector(self.j, self.h, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "JLVector") -> "JLVector":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, Fraction(0)) + c
        return self._like(out)

    def __sub__(self, other: "JLVector") -> "JLVector":
        return self + other.scale(-1)

    def scale(self, factor) -> "JLVector":
        f = Fraction(factor)
        return self._like({w: f * c for w, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, JLVector):
            return NotImplemented
        return (self.j, self.h, self.terms) == (other.j, other.h, other.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "JLVector[0]"
        bits = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            body = "*".join(f"{f}[{n}]" for f, n in w) or "1"
            bits.append(f"({self.terms[w]})*{body}|{self.j},{self.h}>")
        return "JLVector[" + " + ".join(bits) + "]"

    def max_depth(self) -> int:
        return max((abs(n) for w in self.terms for _f, n in w), default=0)


def _bracket(x: Mode, y: Mode) -> List[Tuple[Fraction, Optional[Mode]]]:
    """[x, y] as a list of (coefficient, mode-or-identity)."""
    (fx, m), (fy, n) = x, y
    out: List[Tuple[Fraction, Optional[Mode]]] = []
    if fx == CURRENT and fy == CURRENT:
        if m + n == 0:
            out.append((Fraction(-m), None))
    elif fx == VIRASORO and fy == CURRENT:
        if m + n == 0:
            out.append((Fraction(-m * (m + 1), 2), None))
        out.append((Fraction(-n), mode(CURRENT, m + n)))
    elif fx == CURRENT and fy == VIRASORO:
        for c, md in _bracket(y, x):
            out.append((-c, md))
    else:  # Virasoro pair, central charge 2
        out.append((Fraction(m - n), mode(VIRASORO, m + n)))
        if m + n == 0:
            out.append((CENTRAL_CHARGE * m * (m * m - 1) / 12, None))
    return [(c, md) for c, md in out if c != 0]


def _canonical_before(x: Mode, head: Mode) -> bool:
    return (_RANK[x[0]], x[1]) <= (_RANK[head[0]], head[1])


def apply_mode(x: Mode, vec: JLVector) -> JLVector:
    """Exact action of J_n or L_n, reducing to PBW canonical form."""
    out = vec._like({})
    for word, coeff in vec.terms.items():
        out = out + _mode_times_word(x, word, vec).scale(coeff)
    return out


def _mode_times_word(x: Mode, word: Word, proto: JLVector) -> JLVector:
    fam, n = x
    if not word:
        if n > 0:
            return proto._like({})
        if n == 0:
            eigen = proto.j if fam == CURRENT else proto.h
            return proto._like({(): eigen})
        return proto._like({(x,): Fraction(1)})
    head, rest = word[0], word[1:]
    if n < 0 and _canonical_before(x, head):
        return proto._like({(x,) + word: Fraction(1)})
    inner = _mode_times_word(x, rest, proto)
    total = apply_mode(head, inner)
    for coeff, md in _bracket(x, head):
        if md is None:
            total = total + proto._like({rest: coeff})
        else:
            total = total + _mode_times_word(md, rest, proto).scale(coeff)
    return total


def apply_current(vec: JLVector, n: int) -> JLVector:
    return apply_mode(mode(CURRENT, n), vec)


def apply_virasoro(vec: JLVector, n: int) -> JLVector:
    return apply_mode(mode(VIRASORO, n), vec)


def apply_current_squared(vec: JLVector, n: int) -> JLVector:
    """(JJ)_n = sum_a :J_a J_{n-a}:, larger index acting first."""
    w = vec.max_depth() + abs(n) + 4
    total = vec._like({})
    for a in range(-w, w + 1):
        lo, hi = min(a, n - a), max(a, n - a)
        piece = apply_mode(mode(CURRENT, lo), apply_mode(mode(CURRENT, hi), vec))
        if a in (-w, w) and not piece.is_zero():
            raise TruncationError("JJ window boundary term non-zero")
        total = total + piece
    return total


def apply_singlet(vec: JLVector, n: int) -> JLVector:
    """Ls_n = L_n + (1/2)(JJ)_n - ((n+1)/2) J_n."""
    out = apply_virasoro(vec, n)
    out = out + apply_current_squared(vec, n).scale(Fraction(1, 2))
    out = out + apply_current(vec, n).scale(Fraction(-(n + 1), 2))
    return out
