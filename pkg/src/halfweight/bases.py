"""The three bases of M_{k+1/2}(4) / the plus-space, and plus-space extraction.

* Cohen standard basis: the monomials theta^a F2^b spanning the full space.
* Kohnen basis: products E4^x(4z) E6^y(4z) {theta, H} spanning the plus-space.
* Rankin-Cohen basis: differential brackets of Eisenstein series with theta
  (plus-space for even k, full space for odd k).

Plus-space extraction writes the coefficients at forbidden indices
((-1)^k n = 2, 3 mod 4) of each basis form into a matrix and takes its left
kernel; the kernel rows, in reduced echelon form, give the projected basis.
Working precision for every rank/kernel computation is ``la_precision(k)``
(= k + 10, comfortably above the Sturm-type bound (k + 1/2)/2 for this
level), below which PrecisionTooLow is raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil

from .errors import (
    IndependenceFailure,
    InvalidWeight,
    PlusSpaceViolation,
    PrecisionTooLow,
    UnsupportedRing,
)
from .forms import (
    SLOT_CHI_ONE,
    SLOT_ONE_CHI,
    HalfWeight,
    LabeledForm,
    cohen_eisenstein,
    eis_char,
    eis_level1,
    f2,
    theta,
    zeta_negative_odd,
)
from .linalg import ExactMatrix, kernel, rank
from .numth import bernoulli, gen_bernoulli_chi4, half_binomial
from .rings import RATIONALS, ExactRational
from .series import (
    QExpansion,
    linear_combination,
    ps_add,
    ps_derive,
    ps_mul,
    ps_reduce,
    ps_scale,
    ps_vshift,
    qexp_one,
    qexp_zero,
)


def la_precision(k):
    """Coefficients required to certify independence/kernels at weight k+1/2."""
    return k + 10


def dim_full(k):
    """dim M_{k+1/2}(4): the number of monomials theta^a F2^b."""
    k = _int_part(k)
    return k // 2 + 1


def dim_plus(k):
    """dim of the plus-space for k >= 2, equal to dim M_{2k}(1)."""
    k = _int_part(k)
    if k < 2:
        raise InvalidWeight("the plus-space dimension formula needs k >= 2")
    w = 2 * k
    return w // 12 + (0 if w % 12 == 2 else 1)


def _int_part(k):
    return k.k if isinstance(k, HalfWeight) else int(k)


def forbidden_residues(k):
    """Residues r mod 4 with (-1)^k n = 2, 3 mod 4 for n = r."""
    return (2, 3) if _int_part(k) % 2 == 0 else (1, 2)


def is_plus(series, k):
    """True iff a_n = 0 for every n < prec with (-1)^k n = 2, 3 mod 4."""
    bad = forbidden_residues(k)
    coeffs = series.coeffs
    for r in bad:
        for n in range(r, series.prec, 4):
            if coeffs[n]:
                return False
    return True


@dataclass
class FormBasis:
    """A list of forms of common weight, ring, and precision.

    flavor is "full" or "plus"; construction records which builder made it
    ("cohen", "kohnen", "rankin_cohen", or "projected").
    """

    weight: Fraction
    flavor: str
    forms: list
    construction: str

    @property
    def dim(self):
        return len(self.forms)

    @property
    def ring(self):
        return self.forms[0].series.ring

    @property
    def prec(self):
        return self.forms[0].series.prec

    @property
    def half_k(self):
        """Integer part k of a half-integral weight k + 1/2."""
        if self.weight.denominator != 2:
            raise InvalidWeight(f"{self.weight} is not half-integral")
        return (self.weight.numerator - 1) // 2

    def series_list(self):
        return [lf.series for lf in self.forms]

    def coefficient_matrix(self, upto=None):
        upto = self.prec if upto is None else min(upto, self.prec)
        rows = [lf.series.coeffs[:upto] for lf in self.forms]
        return ExactMatrix(self.ring, rows, raw=True)


def _verify_independent(basis, k):
    """Rank check on the first la_precision(k) coefficients.

    Over FixedPadic (not a field) certification happens on the mod-p
    reduction; a full-rank reduction certifies independence over Z/p^m.
    """
    la = la_precision(k)
    if basis.prec < la:
        return
    ring = basis.ring
    if ring.is_field():
        M = basis.coefficient_matrix(la)
    else:
        from .rings import PrimeField

        fp = PrimeField(ring.p)
        rows = [[v % ring.p for v in lf.series.coeffs[:la]] for lf in basis.forms]
        M = ExactMatrix(fp, rows, raw=True)
    if rank(M) != basis.dim:
        raise IndependenceFailure(
            f"{basis.construction} basis of weight {basis.weight} is not "
            f"independent at precision {la}"
        )


# -- Cohen standard basis ----------------------------------------------------


def cohen_monomials(weight, prec, ring=RATIONALS):
    """Monomials theta^a F2^b with a/2 + 2b = weight, ordered by rising b.

    Works for any nonnegative weight in (1/2)Z.  Powers are produced
    incrementally (theta stepping by theta^4, F2 by one factor), so the
    multiplication count stays linear in the weight.
    """
    weight = Fraction(weight.as_fraction if isinstance(weight, HalfWeight) else weight)
    two_w = 2 * weight
    if two_w.denominator != 1 or weight < 0:
        raise InvalidWeight(f"weight must be a nonnegative half-integer, got {weight}")
    a_max = int(two_w)
    pairs = [(a_max - 4 * b, b) for b in range((a_max // 4) + 1)]
    a_min = pairs[-1][0]

    th = theta(prec, ring)
    need_th4 = a_max > a_min
    need_th2 = need_th4 or a_min in (2, 3)
    th2 = ps_mul(th, th) if need_th2 else None
    th4 = ps_mul(th2, th2) if need_th4 else None

    if a_min == 0:
        tha = None
    elif a_min == 1:
        tha = th
    elif a_min == 2:
        tha = th2
    else:  # a_min == 3
        tha = ps_mul(th, th2)

    theta_pows = {}
    a = a_min
    while True:
        theta_pows[a] = tha
        if a == a_max:
            break
        a += 4
        tha = th4 if tha is None else ps_mul(tha, th4)

    forms = []
    f2_pow = None
    f2_base = f2(prec, ring) if len(pairs) > 1 else None
    for a, b in pairs:
        if b == 0:
            series = theta_pows[a] if a else None
            if series is None:
                series = qexp_one(ring, prec)
        else:
            f2_pow = f2_base if b == 1 else ps_mul(f2_pow, f2_base)
            tp = theta_pows[a]
            series = f2_pow if tp is None else ps_mul(tp, f2_pow)
        theta_pows[a] = None  # allow the power table to be reclaimed
        forms.append(LabeledForm(series, weight, f"theta^{a}*F2^{b}"))
    return FormBasis(weight=weight, flavor="full", forms=forms, construction="cohen")


def cohen_basis(k, prec, ring=RATIONALS):
    """The Cohen standard basis of M_{k+1/2}(4)."""
    k = k if isinstance(k, HalfWeight) else HalfWeight(k)
    return cohen_monomials(k, prec, ring)


# -- plus-space projection ---------------------------------------------------


def plus_project(basis, prec=None):
    """Extract the plus-space from a full-flavor basis via a left kernel.

    ``prec`` is the number of leading coefficients whose forbidden entries
    feed the kernel computation (default: la_precision(k)); the projected
    forms keep the full precision of the input basis.
    """
    ring = basis.ring
    if not ring.is_field():
        raise UnsupportedRing("plus-space projection needs a field")
    k = basis.half_k
    la = la_precision(k) if prec is None else prec
    if la < la_precision(k) or la > basis.prec:
        raise PrecisionTooLow(
            f"projection at weight {basis.weight} needs between {la_precision(k)} "
            f"and {basis.prec} coefficients, got {la}"
        )
    bad = forbidden_residues(k)
    idx = [n for n in range(la) if n % 4 in bad]
    rows = [[lf.series.coeffs[n] for n in idx] for lf in basis.forms]
    vectors = kernel(ExactMatrix(ring, rows, raw=True))
    series = basis.series_list()
    forms = [
        LabeledForm(linear_combination(v, series), basis.weight, f"proj{i}")
        for i, v in enumerate(vectors)
    ]
    return FormBasis(
        weight=basis.weight, flavor="plus", forms=forms, construction="projected"
    )


@lru_cache(maxsize=None)
def cohen_plus_line(k):
    """Combination vector over Q expressing H_{k+1/2} in the Cohen monomials.

    Only defined for k in {2, 3, 5}, where the plus-space is a line; the
    vector is normalized so the combination has constant term zeta(1-2k).
    The result is precision-independent, so one low-precision kernel
    computation serves every later expansion.
    """
    if k not in (2, 3, 5):
        raise InvalidWeight(f"one-dimensional plus-space expected, got k={k}")
    la = la_precision(k)
    basis = cohen_basis(HalfWeight(k), la, RATIONALS)
    bad = forbidden_residues(k)
    idx = [n for n in range(la) if n % 4 in bad]
    rows = [[lf.series.coeffs[n] for n in idx] for lf in basis.forms]
    vectors = kernel(ExactMatrix(RATIONALS, rows, raw=True))
    if len(vectors) != 1:
        raise InvalidWeight(f"plus-space at k={k} is not one-dimensional")
    combo = vectors[0]
    g = linear_combination(combo, basis.series_list())
    a0 = g.coeff(0)
    if not a0:
        raise ArithmeticError("plus-space line has vanishing constant term")
    scale = zeta_negative_odd(k) / a0
    return tuple(Fraction(scale * c) for c in combo)


# -- Kohnen basis ------------------------------------------------------------


def _power_table(base, top):
    """[base^0 .. base^top] with one multiplication per step (entry 0 is None)."""
    table = [None] * (top + 1)
    if top >= 1:
        table[1] = base
    for i in range(2, top + 1):
        table[i] = ps_mul(table[i - 1], base)
    return table


def kohnen_basis(k, prec, ring=RATIONALS):
    """The Kohnen basis of the plus-space of weight k + 1/2, for k >= 2.

    Products of E4(4z)/E6(4z) powers with theta or a Cohen-Eisenstein
    series H; the Eisenstein powers only need ceil(prec/4) coefficients
    before the substitution q -> q^4.
    """
    k = _int_part(k)
    if k < 2:
        raise InvalidWeight(f"the Kohnen basis needs k >= 2, got {k}")
    a0 = k % 3
    elements = []
    if k % 2 == 0:
        m = (k - 4 * a0) // 6 - 1
        for a in range(m // 2 + 1) if m >= 0 else []:
            elements.append((a0 + 3 * a + 1, m - 2 * a, "H(5/2)"))
            elements.append((a0 + 3 * a, m - 2 * a + 1, "theta"))
        if k % 4 == 0:
            elements.append((k // 4, 0, "theta"))
        if (k - 2) % 6 == 0:
            elements.append((0, (k - 2) // 6, "H(5/2)"))
    else:
        m = (k - 4 * a0 - 9) // 6
        for a in range(m // 2 + 1) if m >= 0 else []:
            elements.append((a0 + 3 * a + 1, m - 2 * a, "H(11/2)"))
            elements.append((a0 + 3 * a, m - 2 * a + 1, "H(7/2)"))
        if (k - 3) % 4 == 0:
            elements.append(((k - 3) // 4, 0, "H(7/2)"))
        if (k - 5) % 6 == 0:
            elements.append((0, (k - 5) // 6, "H(11/2)"))

    makers = {
        "theta": lambda: theta(prec, ring),
        "H(5/2)": lambda: cohen_eisenstein(2, prec, ring),
        "H(7/2)": lambda: cohen_eisenstein(3, prec, ring),
        "H(11/2)": lambda: cohen_eisenstein(5, prec, ring),
    }
    tails = {name: makers[name]() for name in {t for _, _, t in elements}}

    quarter = ceil(prec / 4)
    max4 = max((x for x, _, _ in elements), default=0)
    max6 = max((y for _, y, _ in elements), default=0)
    e4 = _power_table(eis_level1(4, quarter, ring, normalized=True), max4)
    e6 = _power_table(eis_level1(6, quarter, ring, normalized=True), max6)

    weight = Fraction(2 * k + 1, 2)
    forms = []
    for x, y, tail in elements:
        if x and y:
            low = ps_mul(e4[x], e6[y])
        elif x:
            low = e4[x]
        elif y:
            low = e6[y]
        else:
            low = None
        label_parts = []
        if x:
            label_parts.append(f"E4(4z)^{x}")
        if y:
            label_parts.append(f"E6(4z)^{y}")
        label_parts.append(tail)
        if low is None:
            series = tails[tail]
        else:
            series = ps_mul(ps_vshift(low, 4).truncate(prec), tails[tail])
        forms.append(LabeledForm(series, weight, "*".join(label_parts)))

    basis = FormBasis(weight=weight, flavor="plus", forms=forms, construction="kohnen")
    _verify_independent(basis, k)
    return basis


# -- Rankin-Cohen brackets and basis ------------------------------------------


def _weight_fraction(w):
    if isinstance(w, HalfWeight):
        return w.as_fraction
    return Fraction(w)


def rc_bracket(fseries, kf, gseries, kg, n):
    """The n-th Rankin-Cohen bracket of forms of weights kf and kg.

    sum_{j=0}^{n} (-1)^j C(n+kf-1, j) C(n+kg-1, n-j) f^(n-j) g^(j), where
    derivatives are with respect to q d/dq.  Weights may be half-integral;
    the binomial scalars are then genuinely rational.
    """
    if n < 0:
        raise ValueError("bracket order must be >= 0")
    kf = _weight_fraction(kf)
    kg = _weight_fraction(kg)
    fd = [fseries]
    gd = [gseries]
    for _ in range(n):
        fd.append(ps_derive(fd[-1]))
        gd.append(ps_derive(gd[-1]))
    acc = None
    for j in range(n + 1):
        c = half_binomial(n + kf - 1, j) * half_binomial(n + kg - 1, n - j)
        if j % 2:
            c = -c
        if not c:
            continue
        term = ps_mul(fd[n - j], ps_scale(gd[j], c))
        acc = term if acc is None else ps_add(acc, term)
    if acc is None:
        return qexp_zero(fseries.ring, min(fseries.prec, gseries.prec))
    return acc


def _eis_integral(w, prec, ring):
    """Level-1 Eisenstein series scaled by the denominator of its a_0.

    The result has integer coefficients for every even weight w >= 4
    (unlike the a_0 = 1 normalization, whose coefficients pick up the
    numerator of -B_w/2w as a denominator from weight 12 on).
    """
    a0 = -bernoulli(w) / (2 * w)
    den = a0.denominator
    base = eis_level1(w, prec, RATIONALS)
    scaled = ps_scale(base, den)
    if isinstance(ring, ExactRational):
        return scaled
    return ps_reduce(scaled, ring)


def _eis_char_integral(w, slot, prec, ring):
    """Character Eisenstein series scaled to integer coefficients."""
    base = eis_char(w, slot, prec, RATIONALS)
    if slot == SLOT_ONE_CHI:
        a0 = -gen_bernoulli_chi4(w) / (2 * w)
        base = ps_scale(base, a0.denominator)
    if isinstance(ring, ExactRational):
        return base
    return ps_reduce(base, ring)


def rankin_cohen_basis(k, prec, ring=RATIONALS):
    """The Rankin-Cohen basis: plus-space for even k >= 4, full for odd k >= 3.

    Even k: brackets [E_{k-2n}(4z), theta]_n for n < dim of the plus-space.
    Odd k: brackets of the two character Eisenstein series with theta,
    interleaved over rising n (slot "1,chi" first), the first dim forms.
    Linear independence at working precision is verified and
    IndependenceFailure raised otherwise, since the construction is only
    conditionally a basis.
    """
    k = _int_part(k)
    if prec < la_precision(k):
        raise PrecisionTooLow(
            f"the Rankin-Cohen basis at k={k} needs precision >= {la_precision(k)}"
        )
    weight = Fraction(2 * k + 1, 2)
    th = theta(prec, ring)
    forms = []
    if k % 2 == 0:
        if k < 4:
            raise InvalidWeight(f"even-k Rankin-Cohen basis needs k >= 4, got {k}")
        d = dim_plus(k)
        if k - 2 * (d - 1) < 4:
            raise InvalidWeight(f"bracket weights at k={k} drop below 4")
        quarter = ceil(prec / 4)
        for n in range(d):
            w = k - 2 * n
            E = ps_vshift(_eis_integral(w, quarter, ring), 4).truncate(prec)
            series = rc_bracket(E, w, th, Fraction(1, 2), n)
            forms.append(LabeledForm(series, weight, f"[E{w}(4z),theta]_{n}"))
        flavor = "plus"
    else:
        if k < 3:
            raise InvalidWeight(f"odd-k Rankin-Cohen basis needs k >= 3, got {k}")
        d = dim_full(k)
        specs = []
        n = 0
        while len(specs) < d:
            specs.append((n, SLOT_ONE_CHI))
            if len(specs) < d:
                specs.append((n, SLOT_CHI_ONE))
            n += 1
        if k - 2 * (specs[-1][0]) < 1:
            raise InvalidWeight(f"bracket weights at k={k} drop below 1")
        for n, slot in specs:
            w = k - 2 * n
            E = _eis_char_integral(w, slot, prec, ring)
            series = rc_bracket(E, w, th, Fraction(1, 2), n)
            tag = "1chi" if slot == SLOT_ONE_CHI else "chi1"
            forms.append(LabeledForm(series, weight, f"[E{w}^{tag},theta]_{n}"))
        flavor = "full"

    basis = FormBasis(
        weight=weight, flavor=flavor, forms=forms, construction="rankin_cohen"
    )
    if flavor == "plus":
        for lf in basis.forms:
            if not is_plus(lf.series, k):
                raise PlusSpaceViolation(
                    f"{lf.label} violates the plus-space pattern at weight {weight}"
                )
    if ring.is_field():
        _verify_independent(basis, k)
    else:
        _verify_rc_by_rational_twin(k, basis.dim)
    return basis


def _verify_rc_by_rational_twin(k, expected_dim):
    """Certify Rankin-Cohen independence over Q at the threshold precision."""
    twin = rankin_cohen_basis(k, la_precision(k), RATIONALS)
    if twin.dim != expected_dim:
        raise IndependenceFailure(
            f"rational twin of the Rankin-Cohen basis at k={k} has a different size"
        )


def same_span(basis_a, basis_b, upto=None):
    """True iff the two bases span the same space of q-expansions.

    Checked by the stacked-rank test on the first ``upto`` coefficients
    (default: the independence threshold for the common weight).
    """
    if basis_a.ring != basis_b.ring:
        raise UnsupportedRing("span comparison needs a common ring")
    if upto is None:
        upto = la_precision(basis_a.half_k)
    A = basis_a.coefficient_matrix(upto)
    B = basis_b.coefficient_matrix(upto)
    d = basis_a.dim
    if basis_b.dim != d:
        return False
    return rank(A) == d and rank(B) == d and rank(A.stack(B)) == d
