"""Exact actions of mode expressions and composite modes on ghost states.

A ghost primary phi_j^ell is annihilated by b_{n-ell} and g_{n+ell} for
n >= 1, while b_{-ell} phi_j^ell = j phi_{j+1}^ell and
g_{ell} phi_j^ell = phi_{j-1}^ell.  States are exact rational combinations
of creation-mode monomials on charge-shifted primaries.

Composite modes expand as the bilinears

    J_n = sum_a :b_a g_{n-a}:,    L_n = sum_c c :b_{n-c} g_c:,
    Ls_n = L_n + (1/2) sum_a :J_a J_{n-a}: - (n+1)/2 J_n,

where only finitely many summands act non-trivially on a given state.  The
summation window is derived from the deepest creator in the state and the
boundary terms are asserted to vanish, so the truncation is exact.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from ..errors import TruncationError
from .expr import BETA, CURRENT, GAMMA, SINGLET, VIRASORO, Mode, ModeExpr, Word, mode

Monomial = Tuple[Mode, ...]  # sorted creation modes
StateKey = Tuple[Monomial, int]  # (creators, charge shift)


def _sort_monomial(modes: Iterable[Mode]) -> Monomial:
    return tuple(sorted(modes, key=lambda m: (m[0], -m[1])))


class GhostState:
    """Exact vector in (a spectral flow of) a relaxed module.

    base charge j (exact rational), flow ell; terms map (creators, k) to the
    coefficient of creators * phi_{j+k}^ell.  truncation_level caps the mode
    indices a composite action may touch; None means automatic (exact).
    """

    __slots__ = ("j", "ell", "terms", "truncation_level")

    def __init__(self, j, ell: int = 0, terms: Optional[Dict[StateKey, Fraction]] = None,
                 truncation_level: Optional[int] = None):
        self.j = Fraction(j)
        self.ell = int(ell)
        self.truncation_level = truncation_level
        merged: Dict[StateKey, Fraction] = {}
        for key, coeff in (terms or {}).items():
            if coeff == 0:
                continue
            merged[key] = merged.get(key, Fraction(0)) + coeff
        self.terms = {k: v for k, v in merged.items() if v != 0}

    @classmethod
    def primary(cls, j, ell: int = 0, truncation_level: Optional[int] = None) -> "GhostState":
        return cls(j, ell, {((), 0): Fraction(1)}, truncation_level)

    def _like(self, terms: Dict[StateKey, Fraction]) -> "GhostState":
        return GhostState(self.j, self.ell, terms, self.truncation_level)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "GhostState") -> "GhostState":
        assert (self.j, self.ell) == (other.j, other.ell), "incompatible base"
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + c
        return self._like(out)

    def __sub__(self, other: "GhostState") -> "GhostState":
        return self + other.scale(-1)

    def scale(self, factor) -> "GhostState":
        f = Fraction(factor)
        return self._like({k: f * c for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GhostState):
            return NotImplemented
        return (self.j, self.ell, self.terms) == (other.j, other.ell, other.terms)

    def __hash__(self):
        return hash((self.j, self.ell, frozenset(self.terms.items())))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (mono, k) in sorted(self.terms, key=lambda key: (len(key[0]), key[0], key[1])):
            c = self.terms[(mono, k)]
            body = "*".join(f"{m[0]}[{m[1]}]" for m in mono)
            head = f"{body}*" if body else ""
            bits.append(f"({c})*{head}phi[{self.j}+{k}]^{self.ell}")
        return " + ".join(bits)

    def __repr__(self) -> str:
        return f"GhostState[{self.to_text()}]"

    # -- depth bookkeeping ------------------------------------------------
    def max_depth(self) -> int:
        depth = 0
        for (mono, _k) in self.terms:
            for (_fam, n) in mono:
                depth = max(depth, abs(n))
        return depth

    def _check_cap(self, needed: int) -> None:
        if self.truncation_level is not None and needed > self.truncation_level:
            raise TruncationError(
                f"action needs modes up to |n| = {needed}, beyond the "
                f"truncation level {self.truncation_level}"
            )


def _apply_ghost_mode(state: GhostState, m: Mode) -> GhostState:
    """Apply a single b/g mode exactly."""
    fam, n = m
    j, ell = state.j, state.ell
    out: Dict[StateKey, Fraction] = {}

    def add(key: StateKey, val: Fraction):
        if val != 0:
            out[key] = out.get(key, Fraction(0)) + val

    for (mono, shift), coeff in state.terms.items():
        if fam == BETA:
            # contractions with gamma creators: [b_n, g_x] = -delta_{n+x}
            for idx, (mf, mx) in enumerate(mono):
                if mf == GAMMA and mx == -n:
                    reduced = mono[:idx] + mono[idx + 1 :]
                    add((reduced, shift), -coeff)
            if n <= -ell - 1:
                add((_sort_monomial(mono + (m,)), shift), coeff)
            elif n == -ell:
                add((mono, shift + 1), coeff * (j + shift))
            # n >= 1 - ell: annihilates the primary
        elif fam == GAMMA:
            # contractions with beta creators: [g_n, b_x] = +delta_{n+x}
            for idx, (mf, mx) in enumerate(mono):
                if mf == BETA and mx == -n:
                    reduced = mono[:idx] + mono[idx + 1 :]
                    add((reduced, shift), coeff)
            if n <= ell - 1:
                add((_sort_monomial(mono + (m,)), shift), coeff)
            elif n == ell:
                add((mono, shift - 1), coeff)
            # n >= ell + 1: annihilates the primary
        else:
            raise ValueError(f"not a ghost mode: {m}")
    return state._like(out)


def apply_word(state: GhostState, word: Word) -> GhostState:
    """Apply a word of modes, rightmost first; composites expand."""
    current = state
    for m in reversed(word):
        fam, n = m
        if fam in (BETA, GAMMA):
            current = _apply_ghost_mode(current, m)
        elif fam == CURRENT:
            current = act_current(current, n)
        elif fam == VIRASORO:
            current = act_virasoro(current, n)
        elif fam == SINGLET:
            current = act_singlet(current, n)
        else:
            raise ValueError(f"cannot act with mode family {fam!r}")
    return current


def act(expr: ModeExpr, state: GhostState) -> GhostState:
    total = state._like({})
    for word, coeff in expr.terms.items():
        total = total + apply_word(state, word).scale(coeff)
    return total


def _bilinear_apply(state: GhostState, b_idx: int, g_idx: int) -> GhostState:
    """:b_{b_idx} g_{g_idx}: applied to state (annihilator acts first)."""
    b_ann = b_idx >= 0
    g_ann = g_idx >= 1
    bm, gm = mode(BETA, b_idx), mode(GAMMA, g_idx)
    if b_ann and not g_ann:
        return _apply_ghost_mode(_apply_ghost_mode(state, bm), gm)
    # in every other case apply g first (both-annihilator and both-creator
    # pairs commute, so the choice there is immaterial)
    return _apply_ghost_mode(_apply_ghost_mode(state, gm), bm)


def _window(state: GhostState, n: int) -> int:
    w = state.max_depth() + abs(n) + abs(state.ell) + 4
    state._check_cap(w)
    return w


def act_current(state: GhostState, n: int) -> GhostState:
    """J_n = sum_a :b_a g_{n-a}: acting exactly."""
    w = _window(state, n)
    total = state._like({})
    for a in range(-w, w + 1):
        piece = _bilinear_apply(state, a, n - a)
        if a in (-w, w) and not piece.is_zero():
            raise TruncationError("J window boundary term non-zero; widen cap")
        total = total + piece
    return total


def act_virasoro(state: GhostState, n: int) -> GhostState:
    """L_n = sum_c c :b_{n-c} g_c: acting exactly."""
    w = _window(state, n)
    total = state._like({})
    for c in range(-w, w + 1):
        if c == 0:
            continue
        piece = _bilinear_apply(state, n - c, c).scale(c)
        if abs(c) == w and not piece.is_zero():
            raise TruncationError("L window boundary term non-zero; widen cap")
        total = total + piece
    return total


def act_current_squared(state: GhostState, n: int) -> GhostState:
    """(JJ)_n = sum_a :J_a J_{n-a}:, the larger index acting first."""
    w = _window(state, n) + 2
    total = state._like({})
    for a in range(-w, w + 1):
        lo, hi = min(a, n - a), max(a, n - a)
        piece = act_current(act_current(state, hi), lo)
        if a in (-w, w) and not piece.is_zero():
            raise TruncationError("JJ window boundary term non-zero; widen cap")
        total = total + piece
        if a == n - a:
            continue
    return total


def act_singlet(state: GhostState, n: int) -> GhostState:
    """Ls_n = L_n + (1/2)(JJ)_n - ((n+1)/2) J_n."""
    out = act_virasoro(state, n)
    out = out + act_current_squared(state, n).scale(Fraction(1, 2))
    out = out + act_current(state, n).scale(Fraction(-(n + 1), 2))
    return out


def act_flowed(state: GhostState, m: Mode, ell: int) -> GhostState:
    """Action on the flow image sigma^ell(v): A_n sigma^ell v =
    sigma^ell(sigma^{-ell}(A_n) v)."""
    from .expr import spectral_flow_map

    expr = spectral_flow_map(ModeExpr.of(m), -ell)
    return act(expr, state)


def creation_modes(ell: int, max_level: int, include_zero_grade: bool = True) -> List[Mode]:
    """Creation modes for phi^ell with |L0 grade| = |index| <= max_level."""
    out: List[Mode] = []
    for n in range(-ell - 1, -ell - 1 - max_level, -1):
        if abs(n) <= max_level + abs(ell):
            out.append(mode(BETA, n))
    g_top = ell - 1 if include_zero_grade else min(ell - 1, -1)
    for n in range(g_top, g_top - max_level, -1):
        if abs(n) <= max_level + abs(ell):
            out.append(mode(GAMMA, n))
    return out


def basis_states(j, ell: int, max_level: int, max_factors: int = 3) -> List[GhostState]:
    """Creation monomials on phi_j^ell with total |index| <= max_level and at
    most max_factors factors; deterministic order."""
    gens = creation_modes(ell, max_level)
    seen = set()
    states: List[GhostState] = []

    def rec(start: int, chosen: Tuple[Mode, ...], weight: int):
        key = _sort_monomial(chosen)
        if key not in seen:
            seen.add(key)
            states.append(GhostState(j, ell, {(key, 0): Fraction(1)}))
        if len(chosen) >= max_factors:
            return
        for idx in range(start, len(gens)):
            m = gens[idx]
            new_weight = weight + abs(m[1])
            if new_weight > max_level:
                continue
            rec(idx, chosen + (m,), new_weight)

    rec(0, (), 0)
    return states
