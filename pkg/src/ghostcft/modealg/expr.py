"""Operator-level expressions in the ghost mode algebra.

Words are tuples of modes applied right-to-left (the rightmost factor acts
first).  The two generating families are b (weight-1 ghost) and g (weight-0
ghost) with the single non-trivial bracket [b_m, g_n] = -delta_{m+n} 1.

Normal ordering puts annihilation modes (b_n with n >= 0, g_n with n >= 1)
to the right of creation modes.  The zero modes split as: b_0 annihilation,
g_0 creation, which is the convention that makes the charge zero mode act as
g_0 b_0 on relaxed vectors and so reproduces the charge eigenvalues of the
ghost primaries.  Composite symbols J/L/Ls may appear in words; they are
opaque here and expand only when acting on states.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple

BETA = "b"
GAMMA = "g"
GAMMA_INV = "ginv"  # only inside the localized algebra
CURRENT = "J"
VIRASORO = "L"
SINGLET = "Ls"

_GHOST_FAMILIES = (BETA, GAMMA)
_COMPOSITE_FAMILIES = (CURRENT, VIRASORO, SINGLET)

Mode = Tuple[str, int]
Word = Tuple[Mode, ...]


def mode(family: str, n: int) -> Mode:
    return (family, int(n))


def is_annihilator(m: Mode) -> bool:
    fam, n = m
    if fam == BETA:
        return n >= 0
    if fam == GAMMA:
        return n >= 1
    raise ValueError(f"normal ordering undefined for family {fam!r}")


def bracket_ghost(x: Mode, y: Mode):
    """[x, y] for ghost modes; returns a scalar multiple of the identity."""
    (fx, nx), (fy, ny) = x, y
    if fx == BETA and fy == GAMMA and nx + ny == 0:
        return Fraction(-1)
    if fx == GAMMA and fy == BETA and nx + ny == 0:
        return Fraction(1)
    return Fraction(0)


_FAMILY_ORDER = {BETA: 0, GAMMA: 1}


def _creator_key(m: Mode):
    # creation modes sorted by family then descending index
    return (_FAMILY_ORDER[m[0]], -m[1])


def _annihilator_key(m: Mode):
    return (_FAMILY_ORDER[m[0]], m[1])


class ModeExpr:
    """Finite linear combination of words with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Word, Fraction]] = None):
        self.terms: Dict[Word, Fraction] = {}
        for word, coeff in (terms or {}).items():
            if coeff == 0:
                continue
            self.terms[word] = self.terms.get(word, Fraction(0)) + coeff
        self.terms = {w: c for w, c in self.terms.items() if c != 0}

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls) -> "ModeExpr":
        return cls({})

    @classmethod
    def one(cls, coeff=Fraction(1)) -> "ModeExpr":
        return cls({(): Fraction(coeff)})

    @classmethod
    def of(cls, *modes: Mode, coeff=Fraction(1)) -> "ModeExpr":
        return cls({tuple(modes): Fraction(coeff)})

    @classmethod
    def beta(cls, n: int) -> "ModeExpr":
        return cls.of(mode(BETA, n))

    @classmethod
    def gamma(cls, n: int) -> "ModeExpr":
        return cls.of(mode(GAMMA, n))

    @classmethod
    def current(cls, n: int) -> "ModeExpr":
        return cls.of(mode(CURRENT, n))

    @classmethod
    def virasoro(cls, n: int) -> "ModeExpr":
        return cls.of(mode(VIRASORO, n))

    @classmethod
    def singlet(cls, n: int) -> "ModeExpr":
        return cls.of(mode(SINGLET, n))

    # -- algebra ---------------------------------------------------------
    def __add__(self, other: "ModeExpr") -> "ModeExpr":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, Fraction(0)) + c
        return ModeExpr(out)

    def __sub__(self, other: "ModeExpr") -> "ModeExpr":
        return self + other.scale(-1)

    def scale(self, factor) -> "ModeExpr":
        f = Fraction(factor)
        return ModeExpr({w: f * c for w, c in self.terms.items()})

    def __mul__(self, other: "ModeExpr") -> "ModeExpr":
        out: Dict[Word, Fraction] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                key = w1 + w2
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return ModeExpr(out)

    def is_zero(self) -> bool:
        return not self.terms

    def is_pure_ghost(self) -> bool:
        return all(m[0] in _GHOST_FAMILIES for w in self.terms for m in w)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModeExpr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- serialization ---------------------------------------------------
    def to_text(self) -> str:
        if not self.terms:
            return "0"
        def word_key(w: Word):
            return (len(w), tuple((m[0], m[1]) for m in w))
        bits = []
        for w in sorted(self.terms, key=word_key):
            c = self.terms[w]
            body = "*".join(f"{m[0]}[{m[1]}]" for m in w) if w else "1"
            bits.append(f"({c})*{body}")
        return " + ".join(bits)

    def __repr__(self) -> str:
        return f"ModeExpr[{self.to_text()}]"

    @classmethod
    def from_text(cls, text: str) -> "ModeExpr":
        text = text.strip()
        if text == "0":
            return cls.zero()
        terms: Dict[Word, Fraction] = {}
        for piece in text.split(" + "):
            m = re.fullmatch(r"\((?P<c>[^)]*)\)\*(?P<body>.*)", piece.strip())
            if not m:
                raise ValueError(f"cannot parse term {piece!r}")
            coeff = Fraction(m.group("c"))
            body = m.group("body")
            if body == "1":
                word: Word = ()
            else:
                modes = []
                for tok in body.split("*"):
                    mm = re.fullmatch(r"(?P<fam>[A-Za-z]+)\[(?P<n>-?\d+)\]", tok)
                    if not mm:
                        raise ValueError(f"cannot parse mode {tok!r}")
                    modes.append(mode(mm.group("fam"), int(mm.group("n"))))
                word = tuple(modes)
            terms[word] = terms.get(word, Fraction(0)) + coeff
        return cls(terms)


def normal_order(expr: ModeExpr) -> ModeExpr:
    """Normal order a pure-ghost expression (idempotent, linear)."""
    if not expr.is_pure_ghost():
        raise ValueError("normal ordering is defined for pure b/g words only")
    out: Dict[Word, Fraction] = {}
    work = list(expr.terms.items())
    while work:
        word, coeff = work.pop()
        if coeff == 0:
            continue
        swap_at = None
        for i in range(len(word) - 1):
            if is_annihilator(word[i]) and not is_annihilator(word[i + 1]):
                swap_at = i
                break
        if swap_at is None:
            canon = _canonical_sorted(word)
            out[canon] = out.get(canon, Fraction(0)) + coeff
            continue
        i = swap_at
        x, y = word[i], word[i + 1]
        swapped = word[:i] + (y, x) + word[i + 2 :]
        work.append((swapped, coeff))
        delta = bracket_ghost(x, y)
        if delta != 0:
            contracted = word[:i] + word[i + 2 :]
            work.append((contracted, coeff * delta))
    return ModeExpr(out)


def _canonical_sorted(word: Word) -> Word:
    """Sort the creator and annihilator segments (members commute)."""
    creators = sorted((m for m in word if not is_annihilator(m)), key=_creator_key)
    annih = sorted((m for m in word if is_annihilator(m)), key=_annihilator_key)
    return tuple(creators) + tuple(annih)


def commutator(x: ModeExpr, y: ModeExpr) -> ModeExpr:
    """normal_order(xy - yx) for pure-ghost expressions.

    Commutators involving the composite families are exercised at the state
    level (see modealg.checks), where the bilinear expansions are finite.
    """
    return normal_order(x * y - y * x)


def spectral_flow_map(expr: ModeExpr, ell: int) -> ModeExpr:
    """The flow automorphism: b_n -> b_{n-ell}, g_n -> g_{n+ell},
    J_n -> J_n + ell delta_{n,0}, L_n -> L_n - ell J_n - ell(ell-1)/2 delta_{n,0}."""
    result = ModeExpr.zero()
    for word, coeff in expr.terms.items():
        factor = ModeExpr.one(coeff)
        for fam, n in word:
            if fam == BETA:
                piece = ModeExpr.beta(n - ell)
            elif fam == GAMMA:
                piece = ModeExpr.gamma(n + ell)
            elif fam == CURRENT:
                piece = ModeExpr.current(n)
                if n == 0:
                    piece = piece + ModeExpr.one(Fraction(ell))
            elif fam == VIRASORO:
                piece = ModeExpr.virasoro(n) + ModeExpr.current(n).scale(-ell)
                if n == 0:
                    piece = piece + ModeExpr.one(Fraction(-ell * (ell - 1), 2))
            else:
                raise ValueError(f"spectral flow of {fam!r} modes is not defined")
            factor = factor * piece
        result = result + factor
    return result
