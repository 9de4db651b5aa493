"""Hecke operators T_{p^2} on half-integral weight spaces.

The coefficient formula (Shimura/Kohnen normalization)

    b_n = a(p^2 n) + ((-1)^k n | p) p^{k-1} a(n) + p^{2k-1} a(n / p^2)

drives both the operator and eigenform extraction.  For p = 2 the symbol
is the Kronecker symbol (. | 2), which is the right extension on the
plus-space; the acceptance checks against sigma_{11}(p) and the
discriminant-form coefficients pin this normalization down.

Eigenforms follow the low-precision pattern: the matrix of T_{p^2} in a
given basis is solved for at a precision just above the independence
threshold, and the resulting rational combination vectors apply unchanged
to arbitrarily long expansions of the same basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .bases import FormBasis, la_precision
from .errors import NotStable, PrecisionTooLow, UnsupportedRing
from .forms import LabeledForm
from .linalg import EigenSplit, ExactMatrix, eigen_split, solve
from .numth import kronecker2, legendre
from .rings import ExactRational
from .series import QExpansion, linear_combination


def _symbol(a, p):
    """((a | p)) extended to p = 2 via the Kronecker symbol."""
    if p == 2:
        return kronecker2(a)
    return legendre(a, p)


def hecke_tp2(f, k, p, out_prec):
    """Apply T_{p^2} to a weight-(k + 1/2) q-expansion.

    Requires prec(f) >= p^2 * out_prec so every a(p^2 n) is available.
    """
    k = k.k if hasattr(k, "k") else int(k)
    if out_prec < 1:
        raise ValueError("output precision must be >= 1")
    if f.prec < p * p * out_prec:
        raise PrecisionTooLow(
            f"T_{{{p}^2}} at output precision {out_prec} needs "
            f"{p * p * out_prec} input coefficients, got {f.prec}"
        )
    if not gmpy2.is_prime(p):
        raise ValueError(f"{p} is not prime")
    ring = f.ring
    sign = -1 if k % 2 else 1
    p2 = p * p
    pk1 = p ** (k - 1) if k >= 1 else Fraction(1, p)
    p2k1 = p ** (2 * k - 1) if 2 * k >= 1 else Fraction(1, p)
    embed = ring.embed
    period = 8 if p == 2 else p
    sym_cache = {}
    for r in range(period):
        s = _symbol(sign * r, p)
        sym_cache[r] = embed(s * pk1) if s else 0
    w2 = embed(p2k1)
    a = f.coeffs
    out = []
    for n in range(out_prec):
        v = a[p2 * n]
        s = sym_cache[n % period]
        an = a[n]
        if s and an:
            v = v + s * an
        if n % p2 == 0:
            t = a[n // p2]
            if t:
                v = v + w2 * t
        out.append(v)
    if not isinstance(ring, ExactRational):
        M = ring.modulus
        out = [v % M for v in out]
    return QExpansion(ring, out, raw=True)


@dataclass
class EigenData:
    """Decomposition of a space under T_{p^2}.

    eigenvalues: list of (rational eigenvalue, multiplicity, combination
        vectors over the basis).  unsplit: characteristic factors without
        rational roots, as (ascending coefficients, multiplicity).
    """

    space: FormBasis
    p: int
    matrix: ExactMatrix
    eigenvalues: list
    unsplit: list

    def eigenforms(self, prec=None):
        """High-precision expansions of the rational eigenforms."""
        prec = self.space.prec if prec is None else prec
        series = [s.truncate(prec) for s in self.space.series_list()]
        out = []
        for lam, mult, vectors in self.eigenvalues:
            for v in vectors:
                combo = linear_combination(v, series)
                out.append((lam, v, LabeledForm(combo, self.space.weight, f"eig({lam})")))
        return out


def hecke_matrix(space, p, low_prec=None):
    """Matrix of T_{p^2} in the given basis, solved at low precision.

    Row i holds the coordinates of T(f_i), so eigen combinations act from
    the left.  Raises NotStable when some image is not in the span.
    """
    k = space.half_k
    low = la_precision(k) if low_prec is None else low_prec
    if low < la_precision(k):
        raise PrecisionTooLow(
            f"Hecke matrices at weight {space.weight} need precision >= "
            f"{la_precision(k)}, got {low}"
        )
    if space.prec < p * p * low:
        raise PrecisionTooLow(
            f"basis precision {space.prec} < p^2 * low_prec = {p * p * low}"
        )
    A = space.coefficient_matrix(low)
    rows = []
    for lf in space.forms:
        image = hecke_tp2(lf.series, k, p, low)
        x = solve(A, image.coeffs)
        if x is None:
            raise NotStable(
                f"T_{{{p}^2}} image of {lf.label} is outside the span at "
                f"precision {low}"
            )
        rows.append(x)
    return ExactMatrix(space.ring, rows, raw=True)


def eigenforms(space, p, low_prec=None, high_prec=None):
    """Rational eigen decomposition of a basis under T_{p^2}.

    The combination vectors come from linear algebra at ``low_prec`` and
    stay valid at any precision, so high-precision eigenform expansions
    cost no further Hecke applications.
    """
    if not isinstance(space.ring, ExactRational):
        raise UnsupportedRing("eigenform extraction runs over the rationals")
    M = hecke_matrix(space, p, low_prec)
    split = eigen_split(M)
    data = EigenData(
        space=space,
        p=p,
        matrix=M,
        eigenvalues=split.eigenvalues,
        unsplit=split.unsplit,
    )
    if high_prec is not None and high_prec > space.prec:
        raise PrecisionTooLow(
            f"requested eigenform precision {high_prec} exceeds the basis "
            f"precision {space.prec}"
        )
    return data
