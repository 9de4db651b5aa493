"""Exact coefficient rings: rationals, prime fields, and fixed-precision p-adics.

Every ring works on *raw* canonical values:

* ``ExactRational`` -- ``int`` or ``fractions.Fraction`` (``gmpy2.mpz`` also
  welcome); fractions are always reduced with positive denominator, so
  equality of values is equality of representations.
* ``PrimeField(p)`` / ``FixedPadic(p, m)`` -- the least nonnegative residue
  as an ``int``.

``RingElem`` is a thin wrapper pairing a raw value with its ring; arithmetic
on mismatched rings raises :class:`~halfweight.errors.RingMismatch`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational

import gmpy2

from .errors import (
    NonInvertibleDenominator,
    NonInvertibleElement,
    RingMismatch,
)


class CoeffRing:
    """Descriptor of a coefficient domain with exact raw-value arithmetic."""

    kind = "abstract"

    # -- raw-value kernel -------------------------------------------------
    def embed(self, x):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def is_unit(self, a):
        raise NotImplementedError

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def is_field(self):
        return False

    # -- textual element encoding -----------------------------------------
    def encode(self, a):
        """Canonical text form: ``num/den`` (den > 0) or plain decimal."""
        return str(a)

    def decode(self, s):
        if "/" in s:
            num, den = s.split("/")
            return self.embed(Fraction(int(num), int(den)))
        return self.embed(int(s))

    def descriptor(self):
        """The ``--ring`` flag syntax for this ring."""
        raise NotImplementedError

    def __repr__(self):
        return self.descriptor()


class ExactRational(CoeffRing):
    """The field of rational numbers with exact ``Fraction``/``int`` values."""

    kind = "ExactRational"

    def embed(self, x):
        if isinstance(x, Rational):
            # ints (and mpz) stay as they are; Fractions are already reduced
            return x
        raise TypeError(f"cannot embed {type(x).__name__} into {self!r}")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise NonInvertibleElement("0 is not invertible")
        return Fraction(a.denominator, a.numerator)

    def is_unit(self, a):
        return a != 0

    def is_field(self):
        return True

    def descriptor(self):
        return "q"

    def __eq__(self, other):
        return isinstance(other, ExactRational)

    def __hash__(self):
        return hash("q")


def _check_odd_prime(p):
    if p == 2:
        raise ValueError("p = 2 is not supported (theta has 2-adic denominators)")
    if p < 3 or not gmpy2.is_prime(p):
        raise ValueError(f"{p} is not an odd prime")


class _Modular(CoeffRing):
    """Shared arithmetic for residue rings Z/M with M = p or p^m."""

    def __init__(self, modulus, p):
        self.modulus = modulus
        self.p = p

    def embed(self, x):
        if isinstance(x, Rational):
            den = x.denominator
            if den == 1:
                return int(x.numerator) % self.modulus
            if den % self.p == 0:
                raise NonInvertibleDenominator(
                    f"denominator {den} is divisible by p = {self.p}"
                )
            return int(x.numerator) * pow(den, -1, self.modulus) % self.modulus
        raise TypeError(f"cannot embed {type(x).__name__} into {self!r}")

    def add(self, a, b):
        return (a + b) % self.modulus

    def sub(self, a, b):
        return (a - b) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def neg(self, a):
        return -a % self.modulus

    def inv(self, a):
        if not self.is_unit(a):
            raise NonInvertibleElement(f"{a} is not a unit modulo {self.modulus}")
        return pow(a, -1, self.modulus)

    def is_unit(self, a):
        return a % self.p != 0

    def __eq__(self, other):
        return type(other) is type(self) and other.modulus == self.modulus

    def __hash__(self):
        return hash((type(self).__name__, self.modulus))


class PrimeField(_Modular):
    """The finite field Z/p for an odd prime p."""

    kind = "PrimeField"

    def __init__(self, p):
        _check_odd_prime(p)
        super().__init__(p, p)

    def is_field(self):
        return True

    def descriptor(self):
        return f"fp:{self.p}"


class FixedPadic(_Modular):
    """Arithmetic mod p^m on residue representatives in [0, p^m).

    Plain fixed-precision arithmetic: there is no valuation tracking, and
    elements divisible by p are not invertible.
    """

    kind = "FixedPadic"

    def __init__(self, p, m):
        _check_odd_prime(p)
        if m < 1:
            raise ValueError("precision exponent m must be >= 1")
        super().__init__(p**m, p)
        self.m = m

    def descriptor(self):
        return f"padic:{self.p}:{self.m}"


#: Shared instance of the rational field.
RATIONALS = ExactRational()


def parse_ring(text):
    """Parse a ``--ring`` descriptor: ``q``, ``fp:<p>`` or ``padic:<p>:<m>``."""
    if text == "q":
        return RATIONALS
    parts = text.split(":")
    if parts[0] == "fp" and len(parts) == 2:
        return PrimeField(int(parts[1]))
    if parts[0] == "padic" and len(parts) == 3:
        return FixedPadic(int(parts[1]), int(parts[2]))
    raise ValueError(f"unrecognized ring descriptor {text!r}")


@dataclass(frozen=True)
class RingElem:
    """A canonical ring element: a raw value tagged with its ring."""

    ring: CoeffRing
    value: object

    def _coerce(self, other):
        if isinstance(other, RingElem):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring!r} vs {other.ring!r}")
            return other.value
        return self.ring.embed(other)

    def __add__(self, other):
        return RingElem(self.ring, self.ring.add(self.value, self._coerce(other)))

    def __sub__(self, other):
        return RingElem(self.ring, self.ring.sub(self.value, self._coerce(other)))

    def __mul__(self, other):
        return RingElem(self.ring, self.ring.mul(self.value, self._coerce(other)))

    def __neg__(self):
        return RingElem(self.ring, self.ring.neg(self.value))

    def inverse(self):
        return RingElem(self.ring, self.ring.inv(self.value))

    def is_unit(self):
        return self.ring.is_unit(self.value)

    def __str__(self):
        return self.ring.encode(self.value)


def ring_embed(ring, x):
    """Canonical image of a rational in ``ring`` (reduced / least residue)."""
    if isinstance(x, RingElem):
        x = x.value
    return RingElem(ring, ring.embed(x))


def _pair(a, b):
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring!r} vs {b.ring!r}")
    return a.ring


def ring_add(a, b):
    ring = _pair(a, b)
    return RingElem(ring, ring.add(a.value, b.value))


def ring_mul(a, b):
    ring = _pair(a, b)
    return RingElem(ring, ring.mul(a.value, b.value))


def ring_neg(a):
    return RingElem(a.ring, a.ring.neg(a.value))


def ring_inv(a):
    return RingElem(a.ring, a.ring.inv(a.value))
