"""Conformal-block evaluators on the cross-ratio line.

Two closely related containers:

* PowerSum -- an exact finite sum  sum_i c_i eta^{p_i} (1-eta)^{q_i} with
  rational (or numeric) coefficients and exponents.  Closed under d/deta and
  under multiplication by eta^a (1-eta)^b, which is what the charge-shift
  recursion needs to run in exact rational arithmetic.

* BlockSum -- a sum of prefactor*payload terms where each payload is one of
  {1, 2F1(a,b;c;eta), 3F2(...; -eta/(1-eta)), B(a,b;eta)}.  The same closure
  properties hold (payload derivatives shift parameters), so the recursion
  and the second-order BPZ operator evaluate analytically, with no finite
  differencing.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional, Tuple

from . import specfun
from .errors import ParamError
from .scalars import Scalar, all_exact, as_fraction, cpow, is_exact, to_complex

_ZERO_TOL = 0.0  # exact zero removal only; numeric terms keep tiny coefficients


class PowerSum:
    """Canonical sum of c * eta^p (1-eta)^q terms keyed by (p, q)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict] = None):
        merged: dict = {}
        for key, coeff in (terms or {}).items():
            if key in merged:
                merged[key] = merged[key] + coeff
            else:
                merged[key] = coeff
        self.terms = {k: v for k, v in merged.items() if v != 0}

    @classmethod
    def single(cls, coeff: Scalar, p: Scalar, q: Scalar = 0) -> "PowerSum":
        return cls({(p, q): coeff})

    @classmethod
    def zero(cls) -> "PowerSum":
        return cls({})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "PowerSum") -> "PowerSum":
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            out[key] = out.get(key, 0) + coeff
        return PowerSum(out)

    def __sub__(self, other: "PowerSum") -> "PowerSum":
        return self + other.scale(-1)

    def scale(self, factor: Scalar) -> "PowerSum":
        return PowerSum({k: factor * v for k, v in self.terms.items()})

    def mul_power(self, dp: Scalar, dq: Scalar = 0) -> "PowerSum":
        return PowerSum({(p + dp, q + dq): c for (p, q), c in self.terms.items()})

    def deriv(self) -> "PowerSum":
        out: dict = {}
        for (p, q), c in self.terms.items():
            for key, val in (((p - 1, q), c * p), ((p, q - 1), -c * q)):
                if val != 0:
                    out[key] = out.get(key, 0) + val
        return PowerSum(out)

    def eval(self, eta: Scalar) -> Scalar:
        if is_exact(eta):
            one_minus = Fraction(1) - as_fraction(eta)
        else:
            one_minus = 1 - to_complex(eta)
        total: Scalar = 0
        for (p, q), c in self.terms.items():
            total = total + c * cpow(eta, p) * cpow(one_minus, q)
        return total

    def eta_polynomial(self, base_p: Scalar, base_q: Scalar):
        """Coefficients [a0, a1, ...] with self = eta^base_p (1-eta)^base_q
        * sum_k a_k eta^k; requires every term to match that shape."""
        coeffs: dict = {}
        for (p, q), c in self.terms.items():
            if q != base_q:
                raise ValueError("terms do not share the (1-eta) exponent")
            k = p - base_p
            kf = as_fraction(k) if is_exact(k) else k
            if not (is_exact(k) and as_fraction(k).denominator == 1 and kf >= 0):
                raise ValueError("term exponent is not base_p + integer")
            coeffs[int(kf)] = c
        deg = max(coeffs) if coeffs else 0
        return [coeffs.get(k, Fraction(0)) for k in range(deg + 1)]

    def is_exact(self) -> bool:
        return all(
            all_exact(p, q, c) for (p, q), c in self.terms.items()
        )

    def canonical(self) -> "PowerSum":
        """Unique normal form for exact sums.

        The monomials eta^p (1-eta)^q are overcomplete across integer
        exponent shifts.  Within each class (p mod 1, q mod 1) every term is
        first brought to the class-minimal q by expanding surplus (1-eta)
        powers; any remaining polynomial factor of (1-eta) is then divided
        back out, leaving the unique representative whose eta-polynomial
        does not vanish at eta = 1."""
        if not self.is_exact():
            raise ValueError("canonical form is defined for exact sums")
        groups: dict = {}
        for (p, q), c in self.terms.items():
            pf, qf = as_fraction(p), as_fraction(q)
            key = (pf % 1, qf % 1)
            groups.setdefault(key, []).append((pf, qf, as_fraction(c)))
        out: dict = {}
        for (_pk, _qk), entries in groups.items():
            q_min = min(q for _p, q, _c in entries)
            flat: dict = {}
            for p, q, c in entries:
                m = int(q - q_min)
                binom = Fraction(1)
                for i in range(m + 1):
                    flat[p + i] = flat.get(p + i, Fraction(0)) + c * binom * (-1) ** i
                    binom = binom * (m - i) / (i + 1)
            flat = {p: c for p, c in flat.items() if c != 0}
            if not flat:
                continue
            # extract the eta-polynomial relative to the minimal power and
            # divide out every (1-eta) factor
            p0 = min(flat)
            deg = int(max(flat) - p0)
            coeffs = [flat.get(p0 + k, Fraction(0)) for k in range(deg + 1)]
            while len(coeffs) > 1 and sum(coeffs) == 0:
                acc = Fraction(0)
                quotient = []
                for c in coeffs[:-1]:
                    acc += c
                    quotient.append(acc)
                coeffs = quotient
                q_min += 1
            for k, c in enumerate(coeffs):
                if c != 0:
                    key = (p0 + k, q_min)
                    out[key] = out.get(key, Fraction(0)) + c
        return PowerSum(out)

    def equals(self, other: "PowerSum") -> bool:
        """Structural equality modulo the integer-shift redundancy."""
        return self.canonical().terms == other.canonical().terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (p, q), c in sorted(self.terms.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
            bits.append(f"({c})*e^({p})*(1-e)^({q})")
        return " + ".join(bits)

    def __repr__(self) -> str:
        return f"PowerSum[{self.to_text()}]"

    def to_blocksum(self) -> "BlockSum":
        return BlockSum(
            [BlockTerm(c, p, q, "pow", ()) for (p, q), c in self.terms.items()]
        )


@dataclass(frozen=True)
class BlockTerm:
    """coeff * eta^p (1-eta)^q * payload(eta).

    kind: 'pow' (payload 1), '2f1' (params (a,b,c), argument eta),
    '3f2w' (params (a1,a2,a3,b1,b2), argument -eta/(1-eta)),
    'incbeta' (params (a,b), argument eta).
    """

    coeff: Scalar
    p: Scalar
    q: Scalar
    kind: str
    params: Tuple[Scalar, ...]

    def payload_value(self, eta: Scalar, degenerate: str = "strict") -> Scalar:
        if self.kind == "pow":
            return 1
        if self.kind == "2f1":
            a, b, c = self.params
            return specfun.hyp2f1(a, b, c, eta, degenerate=degenerate)
        if self.kind == "3f2w":
            w = -to_complex(eta) / (1 - to_complex(eta))
            return specfun.hyp3f2(*self.params, w)
        if self.kind == "incbeta":
            a, b = self.params
            return specfun.beta_incomplete(a, b, eta)
        raise ParamError(f"unknown payload kind {self.kind!r}")

    def value(self, eta: Scalar, degenerate: str = "strict") -> Scalar:
        pref = self.coeff * cpow(eta, self.p) * cpow(1 - to_complex(eta), self.q)
        return pref * self.payload_value(eta, degenerate)


class BlockSum:
    """Finite sum of BlockTerm's, closed under d/deta and prefactor shifts."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[BlockTerm] = ()):
        self.terms = [t for t in terms if t.coeff != 0]

    @classmethod
    def constant(cls, value: Scalar) -> "BlockSum":
        return cls([BlockTerm(value, 0, 0, "pow", ())])

    @classmethod
    def power(cls, coeff: Scalar, p: Scalar, q: Scalar = 0) -> "BlockSum":
        return cls([BlockTerm(coeff, p, q, "pow", ())])

    @classmethod
    def hyp2f1(cls, coeff: Scalar, p: Scalar, q: Scalar, a, b, c) -> "BlockSum":
        return cls([BlockTerm(coeff, p, q, "2f1", (a, b, c))])

    @classmethod
    def hyp3f2w(cls, coeff: Scalar, p: Scalar, q: Scalar, uppers, lowers) -> "BlockSum":
        return cls([BlockTerm(coeff, p, q, "3f2w", (*uppers, *lowers))])

    @classmethod
    def incomplete_beta(cls, coeff: Scalar, p: Scalar, q: Scalar, a, b) -> "BlockSum":
        return cls([BlockTerm(coeff, p, q, "incbeta", (a, b))])

    def __add__(self, other: "BlockSum") -> "BlockSum":
        return BlockSum([*self.terms, *other.terms])

    def __sub__(self, other: "BlockSum") -> "BlockSum":
        return self + other.scale(-1)

    def scale(self, factor: Scalar) -> "BlockSum":
        return BlockSum([replace(t, coeff=factor * t.coeff) for t in self.terms])

    def mul_power(self, dp: Scalar, dq: Scalar = 0) -> "BlockSum":
        return BlockSum([replace(t, p=t.p + dp, q=t.q + dq) for t in self.terms])

    def deriv(self) -> "BlockSum":
        out = []
        for t in self.terms:
            if t.p != 0:
                out.append(replace(t, coeff=t.coeff * t.p, p=t.p - 1))
            if t.q != 0:
                out.append(replace(t, coeff=-t.coeff * t.q, q=t.q - 1))
            if t.kind == "pow":
                continue
            if t.kind == "2f1":
                a, b, c = t.params
                out.append(
                    BlockTerm(
                        t.coeff * a * b / c, t.p, t.q, "2f1", (a + 1, b + 1, c + 1)
                    )
                )
            elif t.kind == "3f2w":
                a1, a2, a3, b1, b2 = t.params
                pref = t.coeff * a1 * a2 * a3 / (b1 * b2)
                # d/deta 3F2(w(eta)) = 3F2'(w) * w'(eta), w' = -1/(1-eta)^2
                out.append(
                    BlockTerm(
                        -pref,
                        t.p,
                        t.q - 2,
                        "3f2w",
                        (a1 + 1, a2 + 1, a3 + 1, b1 + 1, b2 + 1),
                    )
                )
            elif t.kind == "incbeta":
                a, b = t.params
                out.append(BlockTerm(t.coeff, t.p + a - 1, t.q + b - 1, "pow", ()))
        return BlockSum(out)

    def value(self, eta: Scalar, degenerate: str = "strict") -> complex:
        return sum((to_complex(t.value(eta, degenerate)) for t in self.terms), 0j)

    def exact_value_terminating(self, eta: Scalar):
        """Exact evaluation when every payload terminates and inputs are exact."""
        total = Fraction(0)
        for t in self.terms:
            pref = t.coeff * cpow(eta, t.p) * cpow(Fraction(1) - as_fraction(eta), t.q)
            total = total + pref * t.payload_value(eta)
        return total

    def is_exact(self) -> bool:
        return all(
            all_exact(t.coeff, t.p, t.q, *t.params) for t in self.terms
        )

    def try_powersum(self) -> Optional[PowerSum]:
        if any(t.kind != "pow" for t in self.terms):
            return None
        out: dict = {}
        for t in self.terms:
            key = (t.p, t.q)
            out[key] = out.get(key, 0) + t.coeff
        return PowerSum(out)

    def __repr__(self) -> str:
        return f"BlockSum<{len(self.terms)} terms>"


def as_blocksum(block) -> BlockSum:
    if isinstance(block, BlockSum):
        return block
    if isinstance(block, PowerSum):
        return block.to_blocksum()
    raise TypeError(f"not a block: {block!r}")


def exact_series(block, order: int, base_p=None) -> Tuple[Fraction, list]:
    """Expand an exact block around eta=0 as eta^p0 * sum_k a_k eta^k.

    Every exponent and parameter must be rational; 2F1 payloads expand with
    exact Pochhammer coefficients; (1-eta)^q uses the generalized binomial
    series.  Returns (p0, [a_0 ... a_order]).
    """
    bs = as_blocksum(block)
    prefs = []
    for t in bs.terms:
        if t.kind not in ("pow", "2f1"):
            raise ValueError(f"exact series not supported for payload {t.kind}")
        prefs.append(as_fraction(t.p))
    if not prefs:
        return Fraction(0), [Fraction(0)] * (order + 1)
    p0 = min(prefs) if base_p is None else as_fraction(base_p)
    coeffs = [Fraction(0)] * (order + 1)
    for t in bs.terms:
        shift = as_fraction(t.p) - p0
        if shift.denominator != 1 or shift < 0:
            raise ValueError("term exponents differ by non-integers")
        shift_i = int(shift)
        qf = as_fraction(t.q)
        cf = as_fraction(t.coeff)
        # (1-eta)^q coefficients
        binom = [Fraction(1)]
        for m in range(1, order + 1):
            binom.append(binom[-1] * (qf - m + 1) / m * -1)
        if t.kind == "pow":
            payload = [Fraction(1)] + [Fraction(0)] * order
        else:
            a, b, c = map(as_fraction, t.params)
            payload = [Fraction(1)]
            term = Fraction(1)
            for n in range(order):
                if c + n == 0:
                    raise ValueError("2F1 series pole in exact expansion")
                term = term * (a + n) * (b + n) / ((c + n) * (n + 1))
                payload.append(term)
        for k in range(shift_i, order + 1):
            acc = Fraction(0)
            for m in range(k - shift_i + 1):
                acc += binom[m] * payload[k - shift_i - m]
            coeffs[k] += cf * acc
    return p0, coeffs
