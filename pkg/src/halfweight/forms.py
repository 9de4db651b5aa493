"""Constructors for the named forms of level 1 and 4.

theta, F_2, the level-1 Eisenstein series E_k, the two weight-k character
Eisenstein series for the character mod 4, and the Eisenstein element H of
the plus-space (obtained by projection and rescaling rather than from
tabulated coefficients).

Coefficient conventions
-----------------------
* ``eis_level1``: a_0 = -B_k/(2k), a_n = sigma_{k-1}(n); pass
  ``normalized=True`` to rescale so a_0 = 1.
* ``eis_char`` with slot ``"1,chi"``: a_n = sum_{d|n} chi(d) d^{k-1} and
  a_0 = -B_k^chi/(2k); slot ``"chi,1"``: a_n = sum_{d|n} chi(n/d) d^{k-1}
  and a_0 = 0.  These are the two weight-k level-4 Eisenstein series with
  character; the pairing of sum and constant term is the one under which
  both series pass the Cohen-basis membership test.
* ``cohen_eisenstein``: a_0 = zeta(1-2k) = -B_{2k}/(2k).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import InvalidWeight
from .numth import bernoulli, chi4, gen_bernoulli_chi4, sigma1_odd_table, sigma_table
from .rings import RATIONALS, ExactRational
from .series import QExpansion, linear_combination, ps_reduce


@dataclass(frozen=True)
class HalfWeight:
    """The weight k + 1/2, stored through its integer part k >= 0."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise InvalidWeight("the integer part of a half weight must be >= 0")

    @property
    def as_fraction(self):
        return Fraction(2 * self.k + 1, 2)

    @classmethod
    def parse(cls, text):
        """Parse the literal CLI syntax ``<odd>/2``, e.g. ``13/2``."""
        parts = text.split("/")
        if len(parts) != 2 or parts[1] != "2":
            raise InvalidWeight(f"weight must look like '13/2', got {text!r}")
        num = int(parts[0])
        if num % 2 == 0 or num < 1:
            raise InvalidWeight(f"weight numerator must be odd and positive: {text!r}")
        return cls((num - 1) // 2)

    def __str__(self):
        return f"{2 * self.k + 1}/2"


@dataclass(frozen=True)
class LabeledForm:
    """A q-expansion with its weight and a provenance label."""

    series: QExpansion
    weight: object  # Fraction for half-integral weights, int for integral
    label: str


def theta(prec, ring=RATIONALS):
    """The standard theta series: a_n = 1 at n=0, 2 at positive squares."""
    if prec < 1:
        raise ValueError("precision must be >= 1")
    coeffs = [0] * prec
    coeffs[0] = ring.one
    two = ring.embed(2)
    for i in range(1, isqrt(prec - 1) + 1):
        coeffs[i * i] = two
    return QExpansion(ring, coeffs, raw=True)


def f2(prec, ring=RATIONALS):
    """The weight-2 level-4 Eisenstein series: a_n = sigma_1(n) for odd n."""
    if prec < 1:
        raise ValueError("precision must be >= 1")
    tab = sigma1_odd_table(prec)
    if isinstance(ring, ExactRational):
        return QExpansion(ring, tab, raw=True)
    M = ring.modulus
    return QExpansion(ring, [v % M for v in tab], raw=True)


def eis_level1(k, prec, ring=RATIONALS, normalized=False):
    """Level-1 Eisenstein series of even weight k >= 4.

    a_0 = -B_k/(2k) and a_n = sigma_{k-1}(n); with ``normalized`` the
    series is rescaled so a_0 = 1.
    """
    if k < 4 or k % 2:
        raise InvalidWeight(f"level-1 Eisenstein weight must be even and >= 4, got {k}")
    if prec < 1:
        raise ValueError("precision must be >= 1")
    a0 = -bernoulli(k) / (2 * k)
    coeffs = sigma_table(k - 1, prec)
    if normalized:
        scale = 1 / a0
        if scale.denominator == 1:
            scale = scale.numerator
        coeffs = [scale * v if v else 0 for v in coeffs]
        coeffs[0] = scale * a0  # exactly 1
    else:
        coeffs[0] = a0
    out = QExpansion(RATIONALS, coeffs, raw=True)
    if isinstance(ring, ExactRational):
        return out
    return ps_reduce(out, ring)


SLOT_ONE_CHI = "1,chi"
SLOT_CHI_ONE = "chi,1"


def eis_char(k, slot, prec, ring=RATIONALS):
    """Weight-k level-4 Eisenstein series attached to the character mod 4.

    Only odd k matches the parity of the odd character; even k raises
    InvalidWeight.  See the module docstring for the two slots.
    """
    if k < 1 or k % 2 == 0:
        raise InvalidWeight(f"character Eisenstein weight must be odd, got {k}")
    if slot not in (SLOT_ONE_CHI, SLOT_CHI_ONE):
        raise ValueError(f"slot must be {SLOT_ONE_CHI!r} or {SLOT_CHI_ONE!r}")
    if prec < 1:
        raise ValueError("precision must be >= 1")
    coeffs = [0] * prec
    if slot == SLOT_ONE_CHI:
        # a_n = sum_{d|n} chi(d) d^{k-1}; only odd d contribute
        for d in range(1, prec, 2):
            pw = d ** (k - 1)
            if d % 4 == 3:
                pw = -pw
            for m in range(d, prec, d):
                coeffs[m] += pw
        coeffs[0] = -gen_bernoulli_chi4(k) / (2 * k)
    else:
        # a_n = sum_{d|n} chi(n/d) d^{k-1}; only odd cofactors j = n/d
        for d in range(1, prec):
            pw = d ** (k - 1)
            top = (prec - 1) // d
            for j in range(1, top + 1, 2):
                if j % 4 == 1:
                    coeffs[d * j] += pw
                else:
                    coeffs[d * j] -= pw
    out = QExpansion(RATIONALS, coeffs, raw=True)
    if isinstance(ring, ExactRational):
        return out
    return ps_reduce(out, ring)


def zeta_negative_odd(k):
    """zeta(1 - 2k) for a positive integer k, via -B_{2k}/(2k)."""
    return -bernoulli(2 * k) / (2 * k)


def cohen_eisenstein(k, prec, ring=RATIONALS):
    """The Eisenstein element H of the plus-space of weight k + 1/2.

    Only k in {2, 3, 5}, where the plus-space is one-dimensional, is
    consumed by the basis constructions.  The series is realized as the
    projection of the Cohen standard basis to the plus-space, rescaled so
    that a_0 = zeta(1 - 2k); the combination vector is rational,
    precision-independent and cached, so any precision and ring reuse it.
    """
    if k not in (2, 3, 5):
        raise InvalidWeight(f"H is only provided for k in {{2, 3, 5}}, got {k}")
    from . import bases  # deferred: bases builds on this module

    vec = bases.cohen_plus_line(k)
    monomials = bases.cohen_basis(HalfWeight(k), prec, ring)
    combo = [ring.embed(c) for c in vec]
    return linear_combination(combo, [lf.series for lf in monomials.forms])
