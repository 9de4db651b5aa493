"""Truncated q-expansion arithmetic.

A :class:`QExpansion` holds the coefficients a_0 .. a_{D-1} of a series in
q over one of the coefficient rings.  Multiplication is the cost center of
every basis computation, so :func:`ps_mul` dispatches between three exact
strategies:

* schoolbook / pairwise convolution for short or genuinely sparse inputs,
* packed-integer (Kronecker substitution) multiplication otherwise: the
  coefficient lists are packed into two huge integers with enough bits per
  slot, multiplied once by GMP (which is subquadratic, FFT-based for large
  operands), and unpacked.  Over the rationals, denominators are cleared
  with a single common scaling per operand first, so the packed multiply
  works on integer polynomials.

All strategies return bit-identical results.  The dispatch thresholds are
machine-dependent tuning knobs collected in :data:`config` and can be set
via environment variables (see README).
"""

from __future__ import annotations

import os
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from numbers import Rational

import gmpy2

from .errors import (
    NonInvertibleDenominator,
    NonInvertibleLeadingCoefficient,
    RingMismatch,
)
from .rings import RATIONALS, CoeffRing, ExactRational, RingElem


@dataclass
class SeriesConfig:
    """Dispatch thresholds for :func:`ps_mul` (machine-dependent tuning).

    kronecker_min: output length at or above which the packed-integer
        path is used for dense operands (default 64).
    sparse_density: an operand whose nonzero density is below this counts
        as sparse (default 0.05).
    sparse_pairs_factor: the pairwise path is taken when the number of
        nonzero coefficient pairs is at most this multiple of the output
        length (default 8).
    threads: worker count for parallel basis assembly (default 1; series
        multiplication itself is always sequential and deterministic).
    """

    kronecker_min: int = 64
    sparse_density: float = 0.05
    sparse_pairs_factor: int = 8
    threads: int = 1


def _config_from_env():
    cfg = SeriesConfig()
    env = os.environ
    if "HALFWEIGHT_KRONECKER_MIN" in env:
        cfg.kronecker_min = int(env["HALFWEIGHT_KRONECKER_MIN"])
    if "HALFWEIGHT_SPARSE_DENSITY" in env:
        cfg.sparse_density = float(env["HALFWEIGHT_SPARSE_DENSITY"])
    if "HALFWEIGHT_SPARSE_PAIRS" in env:
        cfg.sparse_pairs_factor = int(env["HALFWEIGHT_SPARSE_PAIRS"])
    if "HALFWEIGHT_THREADS" in env:
        cfg.threads = int(env["HALFWEIGHT_THREADS"])
    return cfg


#: Global tuning knobs; mutate fields or replace wholesale before computing.
config = _config_from_env()


class MultCounter:
    """Tally of full series x series multiplications in an active scope."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0


_counter_lock = threading.Lock()
_active_counters = []


@contextmanager
def count_multiplications():
    """Scope within which every ps_mul call increments the yielded counter."""
    counter = MultCounter()
    with _counter_lock:
        _active_counters.append(counter)
    try:
        yield counter
    finally:
        with _counter_lock:
            _active_counters.remove(counter)


def _tick():
    if _active_counters:
        with _counter_lock:
            for counter in _active_counters:
                counter.count += 1


class QExpansion:
    """A truncated q-expansion: ring, precision D, coefficients a_0..a_{D-1}.

    Instances are immutable after construction; do not mutate ``coeffs``.
    Raw coefficient values follow the ring conventions of
    :mod:`halfweight.rings`.
    """

    __slots__ = ("ring", "prec", "coeffs", "_nonzeros")

    def __init__(self, ring, coeffs, raw=False):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("a series needs precision >= 1")
        if not raw:
            coeffs = [ring.embed(c) for c in coeffs]
        self.ring = ring
        self.prec = len(coeffs)
        self.coeffs = coeffs
        self._nonzeros = None

    # -- inspection --------------------------------------------------------
    @property
    def nonzeros(self):
        """Sparsity hint: number of nonzero coefficients (cached)."""
        if self._nonzeros is None:
            self._nonzeros = self.prec - self.coeffs.count(0)
        return self._nonzeros

    def coeff(self, n):
        return self.coeffs[n]

    def elem(self, n):
        return RingElem(self.ring, self.coeffs[n])

    def prefix(self, n):
        return self.coeffs[:n]

    def truncate(self, prec):
        if prec >= self.prec:
            return self
        return QExpansion(self.ring, self.coeffs[:prec], raw=True)

    def is_zero(self):
        return self.nonzeros == 0

    def __eq__(self, other):
        return (
            isinstance(other, QExpansion)
            and self.ring == other.ring
            and self.prec == other.prec
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        shown = ", ".join(self.ring.encode(c) for c in self.coeffs[:6])
        tail = ", ..." if self.prec > 6 else ""
        return f"QExpansion({self.ring!r}, D={self.prec}, [{shown}{tail}])"

    # -- operator sugar ------------------------------------------------------
    def __add__(self, other):
        return ps_add(self, other)

    def __sub__(self, other):
        return ps_sub(self, other)

    def __mul__(self, other):
        return ps_mul(self, other)

    def __pow__(self, e):
        return ps_pow(self, e)

    def __neg__(self):
        return ps_scale(self, -1)


def qexp_zero(ring, prec):
    return QExpansion(ring, [0] * prec, raw=True)


def qexp_one(ring, prec):
    coeffs = [0] * prec
    coeffs[0] = ring.one
    return QExpansion(ring, coeffs, raw=True)


def _same_ring(f, g):
    if f.ring != g.ring:
        raise RingMismatch(f"{f.ring!r} vs {g.ring!r}")
    return f.ring


def ps_add(f, g):
    """Coefficientwise sum at the minimum of the two precisions."""
    ring = _same_ring(f, g)
    out = min(f.prec, g.prec)
    fa, gb = f.coeffs, g.coeffs
    if isinstance(ring, ExactRational):
        coeffs = [fa[i] + gb[i] for i in range(out)]
    else:
        M = ring.modulus
        coeffs = [(fa[i] + gb[i]) % M for i in range(out)]
    return QExpansion(ring, coeffs, raw=True)


def ps_sub(f, g):
    ring = _same_ring(f, g)
    out = min(f.prec, g.prec)
    fa, gb = f.coeffs, g.coeffs
    if isinstance(ring, ExactRational):
        coeffs = [fa[i] - gb[i] for i in range(out)]
    else:
        M = ring.modulus
        coeffs = [(fa[i] - gb[i]) % M for i in range(out)]
    return QExpansion(ring, coeffs, raw=True)


def ps_scale(f, c):
    """Scalar multiple c*f (not a series multiplication; not counted)."""
    ring = f.ring
    c = ring.embed(c)
    if isinstance(ring, ExactRational):
        coeffs = [c * v if v else 0 for v in f.coeffs]
    else:
        M = ring.modulus
        coeffs = [(c * v) % M if v else 0 for v in f.coeffs]
    return QExpansion(ring, coeffs, raw=True)


# -- multiplication engines ------------------------------------------------


def _mul_pairs(fa, gb, out, ring):
    """Exact convolution over nonzero coefficient pairs (also the schoolbook)."""
    acc = [0] * out
    for i, a in enumerate(fa):
        if not a:
            continue
        lim = out - i
        for j in range(lim):
            b = gb[j]
            if b:
                acc[i + j] += a * b
    if not isinstance(ring, ExactRational):
        M = ring.modulus
        acc = [v % M for v in acc]
    return acc


def _clear_denominators(vals):
    """Scale a rational coefficient list to integers; returns (ints, scale)."""
    dens = {v.denominator for v in vals}
    if dens == {1}:
        return [v.numerator for v in vals], 1
    scale = lcm(*dens)
    return [v.numerator * (scale // v.denominator) for v in vals], scale


def _pack_signed(ints, slot):
    """Pack signed integers into an mpz, one slot of `slot` bits each."""
    if min(ints) >= 0:
        return gmpy2.pack(ints, slot)
    pos = [v if v > 0 else 0 for v in ints]
    neg = [-v if v < 0 else 0 for v in ints]
    return gmpy2.pack(pos, slot) - gmpy2.pack(neg, slot)


def _mul_kronecker_int(na, nb, out, nonneg):
    """Convolution of integer lists via one big-integer multiplication.

    Slot width is sized so every convolution coefficient fits a slot; for
    signed inputs a half-slot offset is added to each digit before
    unpacking, which keeps the base-2^slot digits carry-free.
    """
    A = max(max(na), -min(na))
    B = max(max(nb), -min(nb))
    if A == 0 or B == 0:
        return [0] * out
    bound = min(len(na), len(nb)) * A * B
    slot = bound.bit_length() + 2
    X = _pack_signed(na, slot)
    Y = _pack_signed(nb, slot)
    Z = X * Y
    # plain ints on the way out: gmpy2 integers must not leak into
    # coefficient lists (mixed mpz/Fraction arithmetic is not reliable)
    if nonneg:
        digits = gmpy2.unpack(gmpy2.mpz(Z), slot)
        out_digits = [int(d) for d in digits[:out]]
        if len(out_digits) < out:
            out_digits += [0] * (out - len(out_digits))
        return out_digits
    nslots = len(na) + len(nb)
    half = 1 << (slot - 1)
    offset = ((gmpy2.mpz(1) << (slot * nslots)) - 1) // ((1 << slot) - 1) * half
    digits = gmpy2.unpack(Z + offset, slot)
    return [int(d) - half for d in digits[:out]]


def _mul_kronecker(fa, gb, out, ring):
    if isinstance(ring, ExactRational):
        na, sa = _clear_denominators(fa)
        nb, sb = _clear_denominators(gb)
        nonneg = min(na) >= 0 and min(nb) >= 0
        cn = _mul_kronecker_int(na, nb, out, nonneg)
        scale = sa * sb
        if scale == 1:
            return cn
        return [Fraction(c, scale) for c in cn]
    M = ring.modulus
    cn = _mul_kronecker_int(fa, gb, out, True)
    return [int(c) % M for c in cn]


def ps_mul(f, g):
    """Product truncated to the minimum operand precision.

    Counts once on every active :class:`MultCounter`.  Uses the pairwise
    path when the inputs are short or sparse enough, and the packed-integer
    path otherwise.
    """
    ring = _same_ring(f, g)
    _tick()
    out = min(f.prec, g.prec)
    fa = f.coeffs if f.prec == out else f.coeffs[:out]
    gb = g.coeffs if g.prec == out else g.coeffs[:out]

    if out < config.kronecker_min:
        coeffs = _mul_pairs(fa, gb, out, ring)
    else:
        nzf, nzg = f.nonzeros, g.nonzeros
        sparse = (
            min(nzf, nzg) < config.sparse_density * out
            and nzf * nzg <= config.sparse_pairs_factor * out
        )
        if sparse:
            coeffs = _mul_pairs(fa, gb, out, ring)
        else:
            coeffs = _mul_kronecker(fa, gb, out, ring)
    return QExpansion(ring, coeffs, raw=True)


def ps_inv(f):
    """Multiplicative inverse by precision-doubling Newton iteration."""
    ring = f.ring
    a0 = f.coeffs[0]
    if not ring.is_unit(a0):
        raise NonInvertibleLeadingCoefficient(
            f"constant term {ring.encode(a0)} is not a unit"
        )
    D = f.prec
    g_coeffs = [ring.inv(a0)]
    m = 1
    while m < D:
        m = min(2 * m, D)
        # g <- g*(2 - f*g) mod q^m, with g zero-padded to length m
        g = QExpansion(ring, g_coeffs + [0] * (m - len(g_coeffs)), raw=True)
        fg = ps_mul(f.truncate(m), g)
        e_coeffs = [ring.neg(c) for c in fg.coeffs]
        e_coeffs[0] = ring.add(e_coeffs[0], ring.embed(2))
        g_coeffs = ps_mul(g, QExpansion(ring, e_coeffs, raw=True)).coeffs
    return QExpansion(ring, g_coeffs, raw=True)


def ps_derive(f):
    """Apply q d/dq: the coefficient of q^n becomes n*a_n."""
    ring = f.ring
    if isinstance(ring, ExactRational):
        coeffs = [n * c if c else 0 for n, c in enumerate(f.coeffs)]
    else:
        M = ring.modulus
        coeffs = [(n * c) % M if c else 0 for n, c in enumerate(f.coeffs)]
    return QExpansion(ring, coeffs, raw=True)


def ps_vshift(f, m):
    """Substitute q -> q^m; output precision grows to m * prec."""
    if m < 1:
        raise ValueError("shift factor must be >= 1")
    if m == 1:
        return f
    coeffs = [0] * (m * f.prec)
    for n, c in enumerate(f.coeffs):
        if c:
            coeffs[m * n] = c
    return QExpansion(f.ring, coeffs, raw=True)


def ps_pow(f, e):
    """f**e truncated to prec(f), by left-to-right binary powering."""
    if e < 0:
        raise ValueError("exponent must be >= 0")
    if e == 0:
        return qexp_one(f.ring, f.prec)
    if e == 1:
        return f
    acc = f
    for bit in bin(e)[3:]:
        acc = ps_mul(acc, acc)
        if bit == "1":
            acc = ps_mul(acc, f)
    return acc


def ps_reduce(f, ring):
    """Coefficientwise embedding of a rational series into a modular ring."""
    if not isinstance(f.ring, ExactRational):
        raise RingMismatch("ps_reduce expects a series over the rationals")
    coeffs = []
    for n, c in enumerate(f.coeffs):
        try:
            coeffs.append(ring.embed(c))
        except NonInvertibleDenominator as exc:
            raise NonInvertibleDenominator(
                f"coefficient at index {n} cannot be reduced: {exc}", index=n
            ) from None
    return QExpansion(ring, coeffs, raw=True)


def linear_combination(vector, series_list):
    """Exact sum_i vector[i] * series_list[i] at the common precision."""
    if not series_list:
        raise ValueError("empty combination")
    ring = series_list[0].ring
    out = min(s.prec for s in series_list)
    acc = [0] * out
    for c, s in zip(vector, series_list):
        c = ring.embed(c)
        if not c:
            continue
        sc = s.coeffs
        for i in range(out):
            v = sc[i]
            if v:
                acc[i] += c * v
    if not isinstance(ring, ExactRational):
        M = ring.modulus
        acc = [v % M for v in acc]
    return QExpansion(ring, acc, raw=True)
