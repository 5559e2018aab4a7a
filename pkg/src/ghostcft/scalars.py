"""Scalar helpers: exact rationals alongside complex floats.

Every evaluator in the package accepts int/Fraction (exact) or float/complex
(numeric) scalars.  Powers of complex quantities always use the principal
branch, exp(p*Log w), so that monodromy bookkeeping is consistent across
modules.  A branch cut crossed on the negative real axis can be steered with
a signed-zero imaginary part.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Union

Scalar = Union[int, Fraction, float, complex]

_EXACT_TYPES = (int, Fraction)


def is_exact(x: Scalar) -> bool:
    return isinstance(x, _EXACT_TYPES)


def all_exact(*xs: Scalar) -> bool:
    return all(is_exact(x) for x in xs)


def as_fraction(x: Scalar) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def to_complex(x: Scalar) -> complex:
    if isinstance(x, Fraction):
        return complex(x.numerator / x.denominator)
    return complex(x)


def is_zero(x: Scalar, tol: float = 0.0) -> bool:
    if is_exact(x):
        return x == 0
    return abs(to_complex(x)) <= tol


def is_nonpositive_integer(z: Scalar, tol: float = 1e-12) -> bool:
    """True when z is (numerically) a real integer <= 0."""
    if is_exact(z):
        f = as_fraction(z)
        return f.denominator == 1 and f <= 0
    zc = to_complex(z)
    if abs(zc.imag) > tol:
        return False
    r = zc.real
    return r <= tol and abs(r - round(r)) <= tol


def nonpositive_integer_value(z: Scalar, tol: float = 1e-12) -> int:
    """The integer n <= 0 that z equals; caller checks is_nonpositive_integer."""
    if is_exact(z):
        return int(as_fraction(z))
    return int(round(to_complex(z).real))


def integer_difference(x: Scalar, y: Scalar, tol: float = 1e-12):
    """Return x - y as an int when it is an integer, else None."""
    if is_exact(x) and is_exact(y):
        d = as_fraction(x) - as_fraction(y)
        return int(d) if d.denominator == 1 else None
    d = to_complex(x) - to_complex(y)
    if abs(d.imag) > tol:
        return None
    n = round(d.real)
    return n if abs(d.real - n) <= tol else None


def is_integer(z: Scalar, tol: float = 1e-12) -> bool:
    return integer_difference(z, 0, tol) is not None


def is_half_odd_integer(z: Scalar, tol: float = 1e-12) -> bool:
    """True when z is in Z + 1/2."""
    return integer_difference(z, Fraction(1, 2), tol) is not None


def cpow(w: Scalar, p: Scalar) -> Scalar:
    """w**p on the principal branch; exact when both are exact and p integral."""
    if is_exact(p):
        pf = as_fraction(p)
        if pf.denominator == 1 and is_exact(w):
            n = int(pf)
            wf = as_fraction(w)
            if n >= 0:
                return wf**n
            if wf == 0:
                raise ZeroDivisionError("0 ** negative power")
            return Fraction(1) / wf**(-n)
    wc = to_complex(w)
    pc = to_complex(p)
    if wc == 0:
        if pc.real > 0:
            return 0j
        if pc == 0:
            return 1 + 0j
        raise ZeroDivisionError("0 ** nonpositive power")
    return cmath.exp(pc * cmath.log(wc))


def parse_charge(text: str) -> Scalar:
    """Parse a charge given as an exact fraction ('3/4', '-2') or decimal."""
    text = text.strip()
    try:
        return Fraction(text) if ("/" in text or "." not in text) else float(text)
    except ValueError:
        return float(text)


def close(a: Scalar, b: Scalar, rel: float = 1e-10, abs_tol: float = 1e-12) -> bool:
    ac, bc = to_complex(a), to_complex(b)
    return abs(ac - bc) <= max(abs_tol, rel * max(abs(ac), abs(bc)))


def binomial_general(x: Scalar, k: int) -> Scalar:
    """Generalized binomial coefficient C(x, k) = x(x-1)...(x-k+1)/k!."""
    if k < 0:
        raise ValueError("k must be non-negative")
    num: Scalar = Fraction(1) if is_exact(x) else 1.0
    for t in range(k):
        num = num * (x - t)
    return num / (Fraction(math.factorial(k)) if is_exact(x) else math.factorial(k))
