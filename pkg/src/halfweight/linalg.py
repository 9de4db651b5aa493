"""Exact dense linear algebra over the coefficient rings.

Kernels follow the row-per-form convention: ``kernel(M)`` returns a basis
of the *left* kernel {v : vM = 0}, in reduced echelon form with each basis
vector scaled so its first nonzero entry is 1.

Over the rationals the forward elimination is fraction-free (Bareiss),
which keeps intermediate entries at determinant size instead of letting
fractions blow up; the cheap reduction to canonical form happens on the
small echelon result.  Prime fields use ordinary Gauss-Jordan.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import gmpy2

from .errors import UnsupportedRing
from .rings import RATIONALS, CoeffRing, ExactRational, PrimeField


class ExactMatrix:
    """A rectangular matrix of raw ring values."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring, entries, raw=False):
        entries = [list(row) for row in entries]
        if entries:
            width = len(entries[0])
            if any(len(row) != width for row in entries):
                raise ValueError("ragged rows")
        else:
            width = 0
        if not raw:
            entries = [[ring.embed(v) for v in row] for row in entries]
        self.ring = ring
        self.rows = len(entries)
        self.cols = width
        self.entries = entries

    def entry(self, i, j):
        return self.entries[i][j]

    def transpose(self):
        out = [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        return ExactMatrix(self.ring, out, raw=True)

    def stack(self, other):
        if other.ring != self.ring or other.cols != self.cols:
            raise ValueError("incompatible stack")
        return ExactMatrix(self.ring, self.entries + other.entries, raw=True)

    def __repr__(self):
        return f"ExactMatrix({self.ring!r}, {self.rows}x{self.cols})"


def _require_field(ring):
    if not ring.is_field():
        raise UnsupportedRing(f"{ring!r} is not a field")


def _echelon_rational(entries):
    """Fraction-free row echelon form of a rational matrix.

    Rows are first scaled to integers (row scaling does not change the row
    space or the right kernel), then reduced by one-step Bareiss updates.
    Returns (integer echelon rows, pivot column indices).
    """
    work = []
    for row in entries:
        dens = {v.denominator for v in row}
        scale = lcm(*dens) if dens != {1} else 1
        # plain ints only: stray gmpy2 integers break Fraction interop later
        work.append([int(v.numerator) * int(scale // v.denominator) for v in row])
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    pivots = []
    r = 0
    prev = 1
    for c in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if work[i][c]), None)
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        p = work[r][c]
        for i in range(r + 1, nrows):
            q = work[i][c]
            row_i, row_r = work[i], work[r]
            for j in range(c, ncols):
                row_i[j] = (p * row_i[j] - q * row_r[j]) // prev
        prev = p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return work[:r], pivots


def _echelon_primefield(entries, p):
    """Reduced row echelon form over GF(p); returns (rows, pivots)."""
    work = [list(row) for row in entries]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if work[i][c] % p), None)
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        inv = pow(work[r][c], -1, p)
        work[r] = [v * inv % p for v in work[r]]
        for i in range(nrows):
            if i != r and work[i][c]:
                q = work[i][c]
                work[i] = [(a - q * b) % p for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return work[:r], pivots


def _rref_rational(rows):
    """Full Gauss-Jordan over Fractions; for small matrices only."""
    work = [[Fraction(v) for v in row] for row in rows]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if work[i][c]), None)
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        inv = 1 / work[r][c]
        work[r] = [v * inv for v in work[r]]
        for i in range(nrows):
            if i != r and work[i][c]:
                q = work[i][c]
                work[i] = [a - q * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return work[:r], pivots


def rank(M):
    """Row rank by exact elimination (fields only)."""
    _require_field(M.ring)
    if M.rows == 0 or M.cols == 0:
        return 0
    if isinstance(M.ring, ExactRational):
        _, pivots = _echelon_rational(M.entries)
    else:
        _, pivots = _echelon_primefield(M.entries, M.ring.p)
    return len(pivots)


def _right_kernel(entries, ring):
    """Basis of {x : entries . x = 0} in reduced echelon form."""
    ncols = len(entries[0]) if entries else 0
    if isinstance(ring, ExactRational):
        ech, pivots = _echelon_rational(entries)
    else:
        ech, pivots = _echelon_primefield(entries, ring.p)
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    vectors = []
    for fc in free_cols:
        x = [Fraction(0)] * ncols if isinstance(ring, ExactRational) else [0] * ncols
        x[fc] = Fraction(1) if isinstance(ring, ExactRational) else 1
        # solve pivot variables bottom-up
        for i in range(len(pivots) - 1, -1, -1):
            pc = pivots[i]
            row = ech[i]
            s = sum(row[j] * x[j] for j in range(pc + 1, ncols) if x[j])
            if isinstance(ring, ExactRational):
                x[pc] = -Fraction(s) / row[pc] if s else Fraction(0)
            else:
                x[pc] = -s * pow(row[pc], -1, ring.p) % ring.p
        vectors.append(x)
    if not vectors:
        return []
    # canonicalize: reduced echelon form of the kernel basis, leading 1s
    if isinstance(ring, ExactRational):
        reduced, _ = _rref_rational(vectors)
    else:
        reduced, _ = _echelon_primefield(vectors, ring.p)
    return [list(v) for v in reduced]


def kernel(M):
    """Basis of the left kernel {v : vM = 0}, reduced, leading entries 1."""
    _require_field(M.ring)
    if M.rows == 0:
        return []
    return _right_kernel(M.transpose().entries, M.ring)


def solve(A, b):
    """Any x with xA = b, or None when the system is inconsistent."""
    _require_field(A.ring)
    ring = A.ring
    if len(b) != A.cols:
        raise ValueError("right-hand side length must equal the column count")
    # xA = b  <=>  A^T x^T = b^T: eliminate the augmented transpose
    aug = [
        [A.entries[i][j] for i in range(A.rows)] + [b[j]] for j in range(A.cols)
    ]
    n_unknowns = A.rows
    if isinstance(ring, ExactRational):
        ech, pivots = _echelon_rational(aug)
    else:
        ech, pivots = _echelon_primefield(aug, ring.p)
    if n_unknowns in pivots:
        return None  # a pivot in the augmented column: inconsistent
    if isinstance(ring, ExactRational):
        x = [Fraction(0)] * n_unknowns
        for i in range(len(pivots) - 1, -1, -1):
            pc = pivots[i]
            row = ech[i]
            s = sum(row[j] * x[j] for j in range(pc + 1, n_unknowns) if x[j])
            x[pc] = Fraction(row[n_unknowns] - s) / row[pc]
    else:
        p = ring.p
        x = [0] * n_unknowns
        for i in range(len(pivots) - 1, -1, -1):
            pc = pivots[i]
            row = ech[i]
            s = sum(row[j] * x[j] for j in range(pc + 1, n_unknowns))
            x[pc] = (row[n_unknowns] - s) * pow(row[pc], -1, p) % p
    return x


# -- characteristic polynomial and eigen decomposition -----------------------


def _poly_normalize(p):
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _poly_normalize(out)


def _poly_divmod(a, b):
    a = [Fraction(v) for v in a]
    db, lb = len(b) - 1, b[-1]
    if len(a) < len(b):
        return [Fraction(0)], a
    quo = [Fraction(0)] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] / lb
        quo[i - db] = c
        if c:
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    return _poly_normalize(quo), _poly_normalize(a)


def _poly_gcd(a, b):
    a, b = list(a), list(b)
    while len(b) > 1 or b[0] != 0:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    lead = a[-1]
    return [v / lead for v in a]


def _poly_derive(p):
    return _poly_normalize([i * p[i] for i in range(1, len(p))] or [Fraction(0)])


def _poly_eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _char_poly(entries):
    """Characteristic polynomial det(xI - T) by the Faddeev-LeVerrier scheme.

    Returns monic coefficients [c_0, ..., c_{n-1}, 1], ascending powers.
    """
    n = len(entries)
    T = [[Fraction(v) for v in row] for row in entries]
    N = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    cs = []
    for i in range(1, n + 1):
        M = [
            [sum(T[a][b] * N[b][c] for b in range(n)) for c in range(n)]
            for a in range(n)
        ]
        ci = sum(M[a][a] for a in range(n)) / i
        cs.append(ci)
        N = [[M[a][c] - (ci if a == c else 0) for c in range(n)] for a in range(n)]
    # p(x) = x^n - c_1 x^{n-1} - ... - c_n
    poly = [Fraction(0)] * (n + 1)
    poly[n] = Fraction(1)
    for i, ci in enumerate(cs, start=1):
        poly[n - i] = -ci
    return poly


def _polymod_mul(a, b, mod, p):
    """Product of two polynomials modulo (mod, p); coefficients ascending."""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _polymod_rem(out, mod, p)


def _polymod_rem(a, mod, p):
    a = list(a)
    dm = len(mod) - 1
    inv = pow(mod[-1], -1, p)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] * inv % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * mod[j]) % p
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _polymod_pow(base, e, mod, p):
    result = [1]
    base = _polymod_rem(base, mod, p)
    while e:
        if e & 1:
            result = _polymod_mul(result, base, mod, p)
        base = _polymod_mul(base, base, mod, p)
        e >>= 1
    return result


def _polymod_gcd(a, b, p):
    a = [v % p for v in a]
    b = [v % p for v in b]
    while len(b) > 1 or b[0]:
        a, b = b, _polymod_rem(a, b, p)
    if a[-1] != 1:
        inv = pow(a[-1], -1, p)
        a = [v * inv % p for v in a]
    return a


def _roots_mod_p(ints, p, rng):
    """All roots in GF(p) of a monic integer polynomial (squarefree or not)."""
    f = [v % p for v in ints]
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    if len(f) <= 1:
        return []  # degenerate reduction; caller picks another prime
    # roots of f = roots of gcd(x^p - x, f), which is squarefree and split
    xp = _polymod_pow([0, 1], p, f, p)
    xp_minus_x = list(xp) + [0] * (2 - len(xp))
    xp_minus_x[1] = (xp_minus_x[1] - 1) % p
    g = _polymod_gcd(xp_minus_x, f, p)
    roots = []
    stack = [g]
    while stack:
        h = stack.pop()
        d = len(h) - 1
        if d == 0:
            continue
        if d == 1:
            roots.append(-h[0] * pow(h[1], -1, p) % p)
            continue
        if h[0] == 0:
            roots.append(0)
            stack.append(_polymod_rem_div(h, p))
            continue
        while True:
            a = rng.randrange(p)
            trial = _polymod_pow([a, 1], (p - 1) // 2, h, p)
            trial = list(trial)
            trial[0] = (trial[0] - 1) % p
            w = _polymod_gcd(trial, h, p)
            if 0 < len(w) - 1 < d:
                q, _ = _intpoly_divmod_modp(h, w, p)
                stack.append(w)
                stack.append(q)
                break
    return roots


def _polymod_rem_div(h, p):
    """Divide a polynomial with zero constant term by x (mod p)."""
    return h[1:]


def _intpoly_divmod_modp(a, b, p):
    a = [v % p for v in a]
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    quo = [0] * max(1, len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % p
        quo[i - db] = c
        if c:
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return quo, a


def _crt(r1, m1, r2, m2):
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return r1 + m1 * t


def _integer_roots_monic(ints):
    """All integer roots of a monic integer polynomial, found via CRT.

    Roots modulo a few word-size primes are combined by the Chinese
    remainder theorem until the modulus exceeds twice the Cauchy root
    bound; every surviving candidate is then checked exactly.
    """
    bound = 1 + max(abs(c) for c in ints[:-1])
    rng = random.Random(0x5EED)
    prime = 1 << 24
    candidates = None
    modulus = 1
    while modulus <= 2 * bound:
        prime = int(gmpy2.next_prime(prime))
        roots = _roots_mod_p(ints, prime, rng)
        if candidates is None:
            candidates = sorted(set(roots))
            modulus = prime
        else:
            merged = {
                _crt(r1, modulus, r2, prime) for r1 in candidates for r2 in roots
            }
            candidates = sorted(merged)
            modulus *= prime
        if not candidates:
            return []
        if len(candidates) > 4096:
            raise ArithmeticError("integer root candidate explosion")
    out = []
    for r in candidates:
        v = r if r <= modulus // 2 else r - modulus
        if abs(v) <= bound and _poly_eval(ints, v) == 0:
            out.append(v)
    return sorted(set(out))


def _rational_roots_squarefree(poly):
    """Rational roots of a squarefree monic rational polynomial.

    Returns (roots, unsplit cofactor).  The polynomial is rescaled to a
    monic integer one via y = lead * x, whose rational roots are integers.
    """
    scale = lcm(*(c.denominator for c in poly))
    ints = [int(c * scale) for c in poly]
    lead = ints[-1]
    n = len(ints) - 1
    # q(y) = lead^{n-1} p(y/lead) is monic with integer coefficients
    monic = [ints[i] * lead ** (n - 1 - i) for i in range(n)] + [1]
    roots = [Fraction(y, lead) for y in _integer_roots_monic(monic)]
    rest = list(poly)
    for r in sorted(roots):
        rest, rem = _poly_divmod(rest, [-r, Fraction(1)])
        assert rem == [0], "claimed root does not divide"
    return sorted(roots), rest


def _squarefree_factors(poly):
    """Yun-style squarefree decomposition: list of (factor, multiplicity)."""
    out = []
    p = list(poly)
    mult = 1
    while len(p) > 1:
        dp = _poly_derive(p)
        g = _poly_gcd(p, dp)
        if len(g) == 1:
            out.append((p, mult))
            break
        flat, _ = _poly_divmod(p, g)
        # factors in flat but not in g occur with exactly this multiplicity
        extra = _poly_gcd(flat, g)
        part, _ = _poly_divmod(flat, extra)
        if len(part) > 1:
            out.append((part, mult))
        p = g
        mult += 1
    return out


@dataclass
class EigenSplit:
    """Exact eigen decomposition data for a rational square matrix.

    eigenvalues: list of (rational eigenvalue, algebraic multiplicity,
        left eigenvector basis with vT = lambda v, reduced echelon form).
    unsplit: nonlinear characteristic factors as (monic coefficient list,
        ascending powers, multiplicity) that were not split further.
    char_poly: the full characteristic polynomial, ascending coefficients.
    """

    eigenvalues: list
    unsplit: list
    char_poly: list


def eigen_split(T):
    """Split the characteristic polynomial of T and return rational eigendata.

    The polynomial is decomposed into squarefree parts first; rational
    roots of each part are split off exactly, the rest is reported with
    its multiplicity but not solved.
    """
    if not isinstance(T.ring, ExactRational):
        raise UnsupportedRing("eigen_split requires a matrix over the rationals")
    if T.rows != T.cols:
        raise ValueError("matrix must be square")
    n = T.rows
    poly = _char_poly(T.entries)
    found = []
    unsplit = []
    for factor, mult in _squarefree_factors(poly):
        roots, rest = _rational_roots_squarefree(factor)
        found.extend((lam, mult) for lam in roots)
        if len(rest) > 1:
            unsplit.append((rest, mult))
    eigenvalues = []
    for lam, mult in sorted(found):
        shifted = [
            [Fraction(T.entries[i][j]) - (lam if i == j else 0) for j in range(n)]
            for i in range(n)
        ]
        vecs = kernel(ExactMatrix(RATIONALS, shifted, raw=True))
        eigenvalues.append((lam, mult, vecs))
    return EigenSplit(eigenvalues=eigenvalues, unsplit=unsplit, char_poly=poly)
