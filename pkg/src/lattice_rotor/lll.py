"""Lattice basis reduction over exact integers.

A self-contained LLL with the classical integer-only bookkeeping: instead
of rational Gram-Schmidt data it carries the Gram determinants d_i of the
leading subbases and the scaled coefficients lam[i][j] = d_j * mu_{i,j},
all of which stay integers.  Division in the update formulas is exact, so
the reduction is deterministic and immune to floating-point drift, which
matters because two different callers rely on it for completeness
arguments: the rational-relation detector and the lattice-point
enumeration inside the flow search.

Rows are plain lists of Python ints.  The transform matrix returned by
lll_reduce expresses each reduced row as an integer combination of the
input rows; its determinant is +-1.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

Row = List[int]


def _dot(u: Row, v: Row) -> int:
    return sum(a * b for a, b in zip(u, v))


def _nearest_quotient(num: int, den: int) -> int:
    # round num/den to the nearest integer, den > 0; tie direction is
    # irrelevant for size reduction
    return (2 * num + den) // (2 * den)


def _exact_div(num: int, den: int) -> int:
    # every division in the integer LLL bookkeeping is exact by theory;
    # a remainder here means corrupted state, not a rounding question
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError("inexact division in lattice reduction state")
    return q


def lll_reduce(
    rows: Sequence[Sequence[int]],
    delta: Fraction = Fraction(3, 4),
) -> Tuple[List[Row], List[Row]]:
    """Reduce a linearly independent integer basis; return (basis, transform).

    transform[i] holds the coefficients of reduced basis[i] in terms of the
    input rows.  Raises ValueError if the rows are linearly dependent.
    """
    if not rows:
        raise ValueError("empty basis")
    n = len(rows)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged basis")
    if not (0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")
    p, q = delta.numerator, delta.denominator

    b: List[Row] = [list(map(int, r)) for r in rows]
    h: List[Row] = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    # d[i] = Gram determinant of b[0..i-1]; lam[i][j] = d[j+1] * mu_{i,j}
    d: List[int] = [1] * (n + 1)
    lam: List[List[int]] = [[0] * n for _ in range(n)]

    for i in range(n):
        for j in range(i + 1):
            u = _dot(b[i], b[j])
            for k in range(j):
                u = _exact_div(d[k + 1] * u - lam[i][k] * lam[j][k], d[k])
            if j < i:
                lam[i][j] = u
            else:
                if u <= 0:
                    raise ValueError("rows are linearly dependent")
                d[i + 1] = u

    def reduce_row(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l + 1]:
            r = _nearest_quotient(lam[k][l], d[l + 1])
            bk, bl = b[k], b[l]
            for c in range(width):
                bk[c] -= r * bl[c]
            hk, hl = h[k], h[l]
            for c in range(n):
                hk[c] -= r * hl[c]
            for j in range(l):
                lam[k][j] -= r * lam[l][j]
            lam[k][l] -= r * d[l + 1]

    def swap_rows(k: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        h[k], h[k - 1] = h[k - 1], h[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lam_ = lam[k][k - 1]
        new_dk = _exact_div(d[k - 1] * d[k + 1] + lam_ * lam_, d[k])
        for i in range(k + 1, n):
            t = lam[i][k]
            lam[i][k] = _exact_div(d[k + 1] * lam[i][k - 1] - lam_ * t, d[k])
            lam[i][k - 1] = _exact_div(new_dk * t + lam_ * lam[i][k], d[k + 1])
        d[k] = new_dk

    k = 1
    while k < n:
        reduce_row(k, k - 1)
        lam_ = lam[k][k - 1]
        if q * (d[k + 1] * d[k - 1] + lam_ * lam_) < p * d[k] * d[k]:
            swap_rows(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                reduce_row(k, l)
            k += 1

    return b, h


def gram_schmidt_fractions(rows: Sequence[Sequence[int]]):
    """Exact rational GSO of integer rows, for verification and enumeration.

    Returns (ortho_sq, mu) with ortho_sq[i] = |b*_i|^2 as a Fraction and
    mu[i][j] the GSO coefficients.
    """
    n = len(rows)
    basis = [[Fraction(x) for x in r] for r in rows]
    ortho: List[List[Fraction]] = []
    ortho_sq: List[Fraction] = []
    mu: List[List[Fraction]] = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        vec = list(basis[i])
        for j in range(i):
            if ortho_sq[j] == 0:
                raise ValueError("rows are linearly dependent")
            mu[i][j] = sum(a * c for a, c in zip(basis[i], ortho[j])) / ortho_sq[j]
            vec = [a - mu[i][j] * c for a, c in zip(vec, ortho[j])]
        ortho.append(vec)
        ortho_sq.append(sum(a * a for a in vec))
    return ortho_sq, mu


def is_reduced(
    rows: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)
) -> bool:
    """Exact check of the size-reduction and exchange conditions."""
    ortho_sq, mu = gram_schmidt_fractions(rows)
    n = len(rows)
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for i in range(1, n):
        if ortho_sq[i] < (delta - mu[i][i - 1] ** 2) * ortho_sq[i - 1]:
            return False
    return True
