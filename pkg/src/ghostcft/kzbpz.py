"""Residual engines for the Ward, charge-shift (KZ), algebraic-KZ and
second-order (BPZ) constraints, the 3-point constant recursions, and the
charge-shift recursion algorithm in exact and numeric modes.

The recursion operates in the specialized frame (oo, 1, eta, 0), where the
w-space identity collapses to

    G_{j3+1, j4-1}(eta) = -(eta^(l+1)/j3) [ (eta-1) G'
        + (h4l + j1 + (l-1) j2 + (l-1) j3 / eta) G ]
        - (j2/j3) eta^(l+1) G_comp(eta),

with h4l = j4 l - l(l+1)/2.  The j1-shift companion of the w-space identity
scales out at the infinite insertion; the j2-shift companion enters through
the last term and, by the algebraic-KZ identification of the specialized
shifted correlators, defaults to the input block itself (for flow 1 that
identification is the displayed equality of shifted correlators; it is what
reproduces every higher-flow closed form).
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

from .blocks import BlockSum, PowerSum, as_blocksum
from .correlators import (
    WardForm,
    specialized_prefactor_exponents,
    standard_frame_data,
    three_point_exponents,
    unspecialize_block,
    ward_exponents,
)
from .errors import ChargeError, DivisionByZeroCharge, MissingCompanion
from .scalars import Scalar, all_exact, as_fraction, cpow, is_exact, to_complex

HALF = Fraction(1, 2)

# Deterministic cross-ratio samples used by every residual sweep.
DEFAULT_ETA_POINTS: Tuple[complex, ...] = (
    0.13 + 0j,
    0.27 + 0.11j,
    0.5 + 0j,
    0.62 - 0.2j,
    0.81 + 0j,
)

DEFAULT_SEED = 42


def sample_insertions(n: int, count: int = 5, seed: int = DEFAULT_SEED,
                      spread: float = 4.0, min_sep: float = 0.35) -> List[List[float]]:
    """Seeded, well-separated real insertion points w_1 > ... > w_n."""
    rng = random.Random(seed)
    out: List[List[float]] = []
    while len(out) < count:
        ws = sorted((rng.uniform(-spread, spread) for _ in range(n)), reverse=True)
        if all(ws[i] - ws[i + 1] >= min_sep for i in range(n - 1)):
            out.append(ws)
    return out


@dataclass
class ResidualReport:
    """Sampled residuals of one operator identity."""

    operator: str
    max_abs: float
    samples: List[dict] = field(default_factory=list)
    tolerance: Optional[float] = None

    @property
    def passes(self) -> Optional[bool]:
        if self.tolerance is None:
            return None
        return self.max_abs <= self.tolerance

    def to_json(self) -> str:
        return json.dumps(
            {
                "operator": self.operator,
                "tolerance": self.tolerance,
                "max_residual": self.max_abs,
                "pass": self.passes,
                "samples": self.samples,
            },
            default=str,
        )


def _scaled(residual: complex, *magnitudes: complex) -> float:
    scale = max(1.0, *(abs(m) for m in magnitudes)) if magnitudes else 1.0
    return abs(residual) / scale


class NumericDerivatives:
    """value/d/d2 adapter for plain callables via Richardson central
    differences (step 1e-5)."""

    def __init__(self, fn: Callable[..., complex], n: int, h: float = 1e-5):
        self.fn = fn
        self.n = n
        self.h = h

    def value(self, ws) -> complex:
        return self.fn(*ws)

    def _shift(self, ws, i, delta):
        out = list(ws)
        out[i] = out[i] + delta
        return out

    def d(self, i: int, ws) -> complex:
        h = self.h

        def central(step):
            up = self.fn(*self._shift(ws, i, step))
            dn = self.fn(*self._shift(ws, i, -step))
            return (up - dn) / (2 * step)

        d1, d2 = central(h), central(h / 2)
        return (4 * d2 - d1) / 3

    def d2(self, i: int, ws) -> complex:
        h = self.h * 10

        def second(step):
            up = self.fn(*self._shift(ws, i, step))
            dn = self.fn(*self._shift(ws, i, -step))
            return (up - 2 * self.fn(*ws) + dn) / step**2

        s1, s2 = second(h), second(h / 2)
        return (4 * s2 - s1) / 3


def _as_form(F, n: int):
    if hasattr(F, "value") and hasattr(F, "d"):
        return F
    return NumericDerivatives(F, n)


# ----------------------------------------------------------------------
# Ward residuals
# ----------------------------------------------------------------------


def ward_residuals(F, charges, weights, points=None, tolerance: float = 1e-9):
    """Residuals of the four zero-mode identities on sampled insertions.

    The scaling and special-conformal identities carry the h - q/2 shift of
    the asymmetric conformal structure."""
    n = len(charges)
    form = _as_form(F, n)
    points = points if points is not None else sample_insertions(n)
    qs = [to_complex(q) for q in charges]
    hs = [to_complex(h) for h in weights]
    shifted = [hs[i] - qs[i] / 2 for i in range(n)]
    reports = {
        name: ResidualReport(name, 0.0, tolerance=tolerance)
        for name in ("J0", "L-1", "L0", "L1")
    }
    for ws in points:
        wsc = [to_complex(w) for w in ws]
        val = form.value(wsc)
        ders = [form.d(i, wsc) for i in range(n)]
        res = {
            "J0": sum(qs) * val,
            "L-1": sum(ders),
            "L0": sum(wsc[i] * ders[i] for i in range(n)) + sum(shifted) * val,
            "L1": sum(
                wsc[i] ** 2 * ders[i] + 2 * shifted[i] * wsc[i] * val
                for i in range(n)
            ),
        }
        for name, r in res.items():
            rep = reports[name]
            scaled = _scaled(r, val, *(ders if name != "J0" else ()))
            rep.samples.append({"ws": [str(w) for w in ws], "residual": scaled})
            rep.max_abs = max(rep.max_abs, scaled)
    return reports


def ward_max_residual(F, charges, weights, points=None) -> float:
    reports = ward_residuals(F, charges, weights, points)
    return max(rep.max_abs for rep in reports.values())


# ----------------------------------------------------------------------
# correlator families (closed forms with their constant chains)
# ----------------------------------------------------------------------


class TwoPointFamily:
    """<phi_{j1} phi_{j2}^1> = B w12^{j1}; the shift relation keeps B."""

    ell = 1

    def __init__(self, constant: Scalar = 1):
        self.constant = constant

    def base(self, charges) -> WardForm:
        j1, j2 = charges
        q = [j1, j2 - 1]
        h = [0, j2 - 1]
        return WardForm(q, h, BlockSum.constant(self.constant))

    def companion(self, i: int, charges) -> WardForm:
        j1, j2 = charges
        assert i == 1
        return self.base((j1 + 1, j2 - 1))


class ThreePointFamily:
    """The flow-1/2 3-point forms with the displayed constant recursions."""

    def __init__(self, ell: int, constant: Scalar = 1):
        if ell not in (1, 2):
            raise ChargeError("non-vanishing 3-point functions need ell in {1,2}")
        self.ell = ell
        self.constant = constant

    def _form(self, j1, j2, j3, constant) -> WardForm:
        ell = self.ell
        q = [j1, j2, j3 - ell]
        one = Fraction(1) if all_exact(j1, j2, j3) else 1.0
        h = [0 * one, 0 * one, j3 * ell - Fraction(ell * (ell + 1), 2) * one]
        return WardForm(q, h, BlockSum.constant(constant))

    def base(self, charges) -> WardForm:
        j1, j2, j3 = charges
        return self._form(j1, j2, j3, self.constant)

    def shifted_constant(self, i: int, charges) -> Scalar:
        j1, j2, j3 = charges
        if self.ell == 1:
            return self.constant
        if i == 1:
            return (j3 - 1) * self.constant / j1
        return -(j3 - 1) * self.constant / j2

    def companion(self, i: int, charges) -> WardForm:
        j1, j2, j3 = charges
        c = self.shifted_constant(i, charges)
        if i == 1:
            return self._form(j1 + 1, j2, j3 - 1, c)
        if i == 2:
            return self._form(j1, j2 + 1, j3 - 1, c)
        raise MissingCompanion(f"no shift index {i} for N=3")


class FourPointL1Family:
    """The flow-1 4-point solution eta^{j3} with charge-independent constant."""

    ell = 1

    def __init__(self, constant: Scalar = 1):
        self.constant = constant

    def _block(self, j3) -> PowerSum:
        return PowerSum.single(self.constant, j3, 0)

    def specialized(self, charges) -> PowerSum:
        return self._block(charges[2])

    def base(self, charges) -> WardForm:
        j1, j2, j3, j4 = charges
        return unspecialize_block(self._block(j3), j1, j2, j3, j4, 1)

    def companion(self, i: int, charges) -> WardForm:
        j1, j2, j3, j4 = charges
        shifts = {1: (j1 + 1, j2, j3), 2: (j1, j2 + 1, j3), 3: (j1, j2, j3 + 1)}
        if i not in shifts:
            raise MissingCompanion(f"no shift index {i} for N=4")
        a, b, c = shifts[i]
        return unspecialize_block(self._block(c), a, b, c, j4 - 1, 1)


def kz_residual_m2(family, charges, points=None, tolerance: float = 1e-10,
                   label: str = "kz-m2") -> ResidualReport:
    """Residual of the charge-shift identity

        [d_N + (l-1) sum_i j_i / w_iN] F = -sum_i (j_i / w_iN^{l+1}) F_i,

    with the companions F_i supplied by the family (MissingCompanion when it
    cannot produce one)."""
    ell = family.ell
    n = len(charges)
    base = family.base(charges)
    companions = {i: family.companion(i, charges) for i in range(1, n)}
    points = points if points is not None else sample_insertions(n)
    report = ResidualReport(label, 0.0, tolerance=tolerance)
    for ws in points:
        wsc = [to_complex(w) for w in ws]
        lhs = base.d(n - 1, wsc)
        val = base.value(wsc)
        for i in range(1, n):
            lhs += (ell - 1) * to_complex(charges[i - 1]) / (
                wsc[i - 1] - wsc[n - 1]
            ) * val
        rhs = 0j
        for i in range(1, n):
            rhs -= (
                to_complex(charges[i - 1])
                / (wsc[i - 1] - wsc[n - 1]) ** (ell + 1)
                * companions[i].value(wsc)
            )
        scaled = _scaled(lhs - rhs, lhs, rhs, val)
        report.samples.append({"ws": [str(w) for w in ws], "residual": scaled})
        report.max_abs = max(report.max_abs, scaled)
    return report


def kz_residual_m1_l1(family, charges, points=None, tolerance: float = 1e-10
                      ) -> ResidualReport:
    """Residual of the flow-1 first-order identities
    d_i F = j_i / w_iN^2 * F_i for i = 1..N-1 (w-space)."""
    if family.ell != 1:
        raise ChargeError("the i-th-field first-order identity is flow-1 only")
    n = len(charges)
    base = family.base(charges)
    points = points if points is not None else sample_insertions(n)
    report = ResidualReport("kz-m1", 0.0, tolerance=tolerance)
    for ws in points:
        wsc = [to_complex(w) for w in ws]
        for i in range(1, n):
            lhs = base.d(i - 1, wsc)
            comp = family.companion(i, charges)
            rhs = (
                to_complex(charges[i - 1])
                / (wsc[i - 1] - wsc[n - 1]) ** 2
                * comp.value(wsc)
            )
            scaled = _scaled(lhs - rhs, lhs, rhs)
            report.samples.append(
                {"ws": [str(w) for w in ws], "i": i, "residual": scaled}
            )
            report.max_abs = max(report.max_abs, scaled)
    return report


# ----------------------------------------------------------------------
# specialized flow-1 identities on blocks G(eta)
# ----------------------------------------------------------------------


def _eval(block, eta) -> complex:
    return as_blocksum(block).value(eta) if not isinstance(block, PowerSum) else complex(
        block.eval(eta)
    )


def _deriv_eval(block, eta) -> complex:
    if isinstance(block, PowerSum):
        return complex(block.deriv().eval(eta))
    return as_blocksum(block).deriv().value(eta)


def kz_specialized_m1_residual(block, block_shifted, j3, etas=DEFAULT_ETA_POINTS,
                               tolerance: float = 1e-10) -> ResidualReport:
    """d_eta G_{j3,j4} = (j3/eta^2) G_{j3+1,j4-1} in the frame (oo,1,eta,0)."""
    report = ResidualReport("kz-m1-specialized", 0.0, tolerance=tolerance)
    for eta in etas:
        lhs = _deriv_eval(block, eta)
        rhs = to_complex(j3) / to_complex(eta) ** 2 * _eval(block_shifted, eta)
        scaled = _scaled(lhs - rhs, lhs, rhs)
        report.samples.append({"eta": str(eta), "residual": scaled})
        report.max_abs = max(report.max_abs, scaled)
    return report


def kz_specialized_j0_residual(block, block_shifted, etas=DEFAULT_ETA_POINTS,
                               tolerance: float = 1e-12) -> ResidualReport:
    """G_{j3,j4} = (1/eta) G_{j3+1,j4-1}: the algebraic identity at flow 1."""
    report = ResidualReport("kz-j0-specialized", 0.0, tolerance=tolerance)
    for eta in etas:
        lhs = _eval(block, eta)
        rhs = _eval(block_shifted, eta) / to_complex(eta)
        scaled = _scaled(lhs - rhs, lhs, rhs)
        report.samples.append({"eta": str(eta), "residual": scaled})
        report.max_abs = max(report.max_abs, scaled)
    return report


def kz_decoupled_residual(block, j3, etas=DEFAULT_ETA_POINTS,
                          tolerance: float = 1e-12) -> ResidualReport:
    """d_eta G = (j3/eta) G: the first-order identity after eliminating the
    shifted block with the algebraic identity."""
    report = ResidualReport("kz-l1-decoupled", 0.0, tolerance=tolerance)
    for eta in etas:
        lhs = _deriv_eval(block, eta)
        rhs = to_complex(j3) / to_complex(eta) * _eval(block, eta)
        scaled = _scaled(lhs - rhs, lhs, rhs)
        report.samples.append({"eta": str(eta), "residual": scaled})
        report.max_abs = max(report.max_abs, scaled)
    return report


def kz_fourpoint_constant_relations(charges) -> bool:
    """The flow-1 4-point constants are invariant under every
    (j_i + 1, j_4 - 1) shift: exact identity of the specialized family."""
    j1, j2, j3, j4 = map(as_fraction, charges)
    fam = FourPointL1Family()
    base = fam.specialized((j1, j2, j3, j4))
    same_12 = [
        fam.specialized((j1 + 1, j2, j3, j4 - 1)),
        fam.specialized((j1, j2 + 1, j3, j4 - 1)),
    ]
    if any(s != base for s in same_12):
        return False
    shifted3 = fam.specialized((j1, j2, j3 + 1, j4 - 1))
    return shifted3 == base.mul_power(1, 0)


# ----------------------------------------------------------------------
# BPZ residuals
# ----------------------------------------------------------------------


def bpz_apply(F, i: int, charges, weights, ws) -> complex:
    """[d_i^2 + sum_k q_k/w_ik d_i - (1/2) sum_k (d_k / w_ik + h_k / w_ik^2)] F."""
    n = len(charges)
    form = _as_form(F, n)
    wsc = [to_complex(w) for w in ws]
    out = form.d2(i, wsc)
    val = form.value(wsc)
    di = form.d(i, wsc)
    for k in range(n):
        if k == i:
            continue
        wik = wsc[i] - wsc[k]
        out += to_complex(charges[k]) / wik * di
        out -= 0.5 * (form.d(k, wsc) / wik + to_complex(weights[k]) * val / wik**2)
    return out


def bpz_residual(F, i: int, charges, weights, points=None, rhs=None,
                 tolerance: float = 1e-8, label: str = "bpz") -> ResidualReport:
    """Residual of the second-order constraint at the charge-1/2 insertion i
    (0-based); rhs, when given, is the explicit right side (ws -> value)."""
    q_i = charges[i]
    if not (abs(to_complex(q_i) - 0.5) <= 1e-12):
        raise ChargeError(f"the probe insertion must carry charge 1/2, got {q_i}")
    n = len(charges)
    points = points if points is not None else sample_insertions(n)
    report = ResidualReport(label, 0.0, tolerance=tolerance)
    form = _as_form(F, n)
    for ws in points:
        wsc = [to_complex(w) for w in ws]
        lhs = bpz_apply(F, i, charges, weights, wsc)
        want = rhs(wsc) if rhs is not None else 0j
        scaled = _scaled(lhs - want, form.value(wsc), want)
        report.samples.append({"ws": [str(w) for w in ws], "residual": scaled})
        report.max_abs = max(report.max_abs, scaled)
    return report


def threept_bpz_rhs(j2, ell: int, constant: Scalar = 1):
    """The explicit right side of the 3-point second-order constraint with
    the probe at the first insertion; vanishes for ell in {1, 2}."""
    j2c = to_complex(j2)

    def rhs(ws) -> complex:
        w12 = ws[0] - ws[1]
        w13 = ws[0] - ws[2]
        w23 = ws[1] - ws[2]
        pref = (
            (ell - 1)
            * (ell - 2)
            * (j2c - ell / 2.0)
            * (j2c - (ell - 1) / 2.0)
            * to_complex(constant)
        )
        return (
            pref
            * cpow(w12, -j2c * (ell - 1) + (ell**2 - 2 * ell - 3) / 2.0)
            * cpow(w13, j2c * (ell - 1) - (ell**2 - 2 * ell + 4) / 2.0)
            * cpow(w23, j2c * ell - (ell**2 - 2 * ell - 3) / 2.0)
        )

    return rhs


# ----------------------------------------------------------------------
# 3-point constraint verdicts
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ThreePtVerdict:
    kind: str  # "relations-hold" or "must-vanish"
    violating_monomial: Optional[Tuple[int, int]] = None


def threept_constraint_check(j1, j2, j3, ell: int) -> ThreePtVerdict:
    """Expand the polynomial identity behind the 3-point charge-shift
    constraint.  For flows 1 and 2 the displayed constant recursions solve
    it exactly; for ell >= 3 an unmatched cross monomial w13^a w23^b forces
    every constant to vanish."""
    j1f, j2f, j3f = map(as_fraction, (j1, j2, j3))
    if j1f + j2f + j3f != ell:
        raise ChargeError("charges must satisfy j1 + j2 + j3 = ell")
    fam_a = j1f + j2f * (ell - 1) + (j3f - Fraction(ell + 1, 2)) * ell
    fam_b = j1f * (ell - 1) + j2f + (j3f - Fraction(ell + 1, 2)) * ell
    # LHS = C (w13 - w23)^{ell-1} (fam_a w13 + fam_b w23): coefficients of
    # w13^{ell-a} w23^{a}
    coeffs = {}
    binom = 1
    for t in range(ell):  # (w13 - w23)^(ell-1) term t
        c = Fraction(binom) * (-1) ** t
        coeffs[(ell - t, t)] = coeffs.get((ell - t, t), Fraction(0)) + c * fam_a
        coeffs[(ell - t - 1, t + 1)] = (
            coeffs.get((ell - t - 1, t + 1), Fraction(0)) + c * fam_b
        )
        binom = binom * (ell - 1 - t) // (t + 1)
    cross = {
        key: val for key, val in coeffs.items() if key[0] >= 1 and key[1] >= 1 and val != 0
    }
    if ell <= 2:
        if cross:
            return ThreePtVerdict("must-vanish", sorted(cross)[0])
        # pure monomials fix the companion constants:
        #   -j2 C(j1, j2+1, j3-1) = coeffs[(ell, 0)] C
        #   -j1 C(j1+1, j2, j3-1) = coeffs[(0, ell)] C
        return ThreePtVerdict("relations-hold")
    return ThreePtVerdict("must-vanish", sorted(cross)[0])


def threept_shifted_constants(j1, j2, j3, ell: int, constant: Scalar = 1):
    """(C(j1+1, j2, j3-1), C(j1, j2+1, j3-1)) read off the pure monomials."""
    j1f, j2f, j3f = map(as_fraction, (j1, j2, j3))
    fam = ThreePointFamily(ell, constant)
    return (
        fam.shifted_constant(1, (j1f, j2f, j3f)),
        fam.shifted_constant(2, (j1f, j2f, j3f)),
    )


# ----------------------------------------------------------------------
# the charge-shift recursion
# ----------------------------------------------------------------------

AUTO = "auto"

Block = Union[PowerSum, BlockSum]


def recursion_step(block: Block, charges, ell: int, companion=AUTO) -> Block:
    """One step of the specialized charge-shift algorithm:
    (j1, j2, j3, j4) -> (j1, j2, j3+1, j4-1).

    companion: the specialized correlator at (j1, j2+1, j3, j4-1).  The
    default AUTO uses the algebraic-KZ identification companion == block;
    passing None insists on an explicit block and raises MissingCompanion.
    """
    j1, j2, j3, j4 = charges
    exact = all_exact(j1, j2, j3, j4) and block.is_exact()
    if (is_exact(j3) and j3 == 0) or (not is_exact(j3) and to_complex(j3) == 0):
        raise DivisionByZeroCharge("the shifted charge j3 must be non-zero")
    if companion is None:
        raise MissingCompanion(
            "no companion supplied; pass companion=AUTO for the algebraic-KZ "
            "identification or an explicit block"
        )
    comp = block if companion is AUTO else companion
    if exact:
        j1, j2, j3, j4 = map(as_fraction, (j1, j2, j3, j4))
        h4l = j4 * ell - Fraction(ell * (ell + 1), 2)
        inv_j3 = Fraction(1) / j3
    else:
        j1, j2, j3, j4 = map(to_complex, (j1, j2, j3, j4))
        h4l = j4 * ell - ell * (ell + 1) / 2.0
        inv_j3 = 1.0 / j3
    a_coeff = h4l + j1 + (ell - 1) * j2
    b_coeff = (ell - 1) * j3

    d = block.deriv()
    t = d.mul_power(1) - d  # (eta - 1) G'
    t = t + block.scale(a_coeff)
    if b_coeff != 0:
        t = t + block.scale(b_coeff).mul_power(-1)
    t = t.mul_power(ell + 1).scale(-inv_j3)
    t = t - comp.scale(j2 * inv_j3).mul_power(ell + 1)
    return t


def recursion_iterate(block: Block, charges, ell: int, k: int) -> Block:
    """k-fold composition, charges marching (j3 + t, j4 - t)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    j1, j2, j3, j4 = charges
    current = block
    one = Fraction(1) if all_exact(j1, j2, j3, j4) else 1
    for t in range(k):
        current = recursion_step(current, (j1, j2, j3 + t * one, j4 - t * one), ell)
    return current
