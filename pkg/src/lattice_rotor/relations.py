"""Detection of Gaussian-rational dependencies among complex entries.

Given a vector of complex numbers known to P bits, the detector walks the
entries in index order and keeps a growing basis of entries found to be
independent so far; each new entry is tested for membership in the
Gaussian-rational span of the current basis.  Membership candidates come
from lattice reduction on an integer embedding of the real and imaginary
parts of the sought relation; a candidate is accepted only if

  * its coefficients, in lowest terms, fit inside the height bound, and
  * re-evaluating the relation at twice the working precision leaves a
    residual below 2^(-P/2).

Independence is therefore one-sided: "no relation found up to this height
at this precision" is the only negative statement made.  The solver is
built to tolerate that (an undetected relation can only cause a failed
search later, never a wrong answer), and the documentation repeats it
wherever a caller might be tempted to read more into an empty result.

Entries supplied as exact Gaussian rationals short-circuit all of this:
membership in the span of exact rationals is plain field arithmetic and
residuals are identically zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpc, mpf

from .corelattice import ComplexVector
from .gaussian import GaussianInteger, GaussianRational, lcm_int, parse_coefficient
from .lll import lll_reduce
from .precision import check_precision, residual_tol, working_precision

# margin between the working mantissa and the lattice scale; keeps the
# rounding rattle of the embedded forms well below the relation signal
_SCALE_GUARD_BITS = 16


def recommended_precision(r: int, height_bound: int) -> int:
    """Detection precision advised for r entries at the given height bound."""
    return 2 * r * max(1, int(height_bound).bit_length())


@dataclass(frozen=True)
class RelationDecomposition:
    """Partition of entry indices into an independent basis and dependents.

    coeffs[j] expresses the j-th dependent entry as a Gaussian-rational
    combination of the basis entries (aligned with basis_indices; a row of
    zeros marks an exactly-zero entry).  M is the scaling integer: the
    smallest positive multiple of the coefficient-denominator lcm that
    strictly exceeds the ell-1 over-estimate of the total coefficient
    mass, so M*coeff is always a Gaussian integer and M is certified
    larger than the true absolute sum.
    """

    basis_indices: Tuple[int, ...]
    dependent_indices: Tuple[int, ...]
    coeffs: Tuple[Tuple[GaussianRational, ...], ...]
    M: int
    warnings: Tuple[str, ...] = ()

    @property
    def num_basis(self) -> int:
        return len(self.basis_indices)

    @property
    def num_dependent(self) -> int:
        return len(self.dependent_indices)

    def validate(self) -> None:
        r = self.num_basis + self.num_dependent
        if sorted(self.basis_indices + self.dependent_indices) != list(range(r)):
            raise ValueError("indices do not partition the entry range")
        if len(self.coeffs) != self.num_dependent:
            raise ValueError("one coefficient row per dependent entry required")
        for row in self.coeffs:
            if len(row) != self.num_basis:
                raise ValueError("coefficient row width must match basis size")
            for f in row:
                if self.M % f.den != 0:
                    raise ValueError("M does not clear a coefficient denominator")
        total = _coefficient_mass(self.coeffs)
        if not Fraction(self.M) > total:
            raise ValueError("M must strictly exceed the coefficient mass bound")

    def scaled_coefficients(self) -> Tuple[Tuple[GaussianInteger, ...], ...]:
        """The rows multiplied through by M (all Gaussian integers)."""
        return tuple(
            tuple(f.scaled_by_int(self.M) for f in row) for row in self.coeffs
        )

    def to_json_dict(self) -> dict:
        return {
            "basis_indices": list(self.basis_indices),
            "dependent_indices": list(self.dependent_indices),
            "coeffs": [[f.format() for f in row] for row in self.coeffs],
            "M": self.M,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RelationDecomposition":
        return cls(
            basis_indices=tuple(int(i) for i in data["basis_indices"]),
            dependent_indices=tuple(int(i) for i in data["dependent_indices"]),
            coeffs=tuple(
                tuple(parse_coefficient(s) for s in row) for row in data["coeffs"]
            ),
            M=int(data["M"]),
            warnings=tuple(data.get("warnings", ())),
        )


def _coefficient_mass(coeffs) -> Fraction:
    # exact over-estimate sum(|re| + |im|) >= sum(|f|)
    total = Fraction(0)
    for row in coeffs:
        for f in row:
            total += f.abs_upper_fraction()
    return total


def select_M(coeffs: Sequence[Sequence[GaussianRational]]) -> int:
    """Smallest positive multiple of the denominator lcm that strictly
    exceeds the ell-1 over-estimate of the coefficient absolute sum.

    Comparing against sum(|re|) + sum(|im|) keeps the comparison in exact
    rational arithmetic while still certifying M > sum(|f|).
    """
    base = 1
    for row in coeffs:
        for f in row:
            base = lcm_int(base, f.den)
    total = _coefficient_mass(coeffs)
    multiples = total / base
    k = int(multiples) + 1 if multiples >= 0 else 1
    # int() truncates toward zero; total >= 0 always holds here, and a total
    # landing exactly on a multiple still needs the next one (strict >)
    while not Fraction(base * k) > total:
        k += 1
    return base * k


def detect_relations(
    entries,
    height_bound: int,
    bits: int,
) -> RelationDecomposition:
    """Greedy basis scan over the entries with certified relation rows.

    Accepts a ComplexVector (or sequence of mpc) for numeric detection, or
    a sequence of GaussianRational for the exact path.  height_bound caps
    the numerator and denominator magnitudes of reported coefficients.
    """
    check_precision(bits)
    if not isinstance(height_bound, int) or height_bound < 1:
        raise ValueError(f"height_bound must be an integer >= 1, got {height_bound!r}")

    if not isinstance(entries, ComplexVector) and all(
        isinstance(z, GaussianRational) for z in entries
    ) and len(tuple(entries)) > 0:
        return _detect_exact(tuple(entries))

    vec = entries if isinstance(entries, ComplexVector) else ComplexVector(tuple(entries), bits)
    r = len(vec)
    warnings: List[str] = []
    advised = recommended_precision(r, height_bound)
    if bits < advised:
        warnings.append(
            f"precision {bits} below advised {advised} for r={r}, "
            f"height_bound={height_bound}; detection may miss relations"
        )

    basis_indices: List[int] = []
    dependent_indices: List[int] = []
    rows: List[Tuple[GaussianRational, ...]] = []

    with working_precision(bits):
        values = [mpc(z) for z in vec]

    for idx, z in enumerate(values):
        if z.real == 0 and z.imag == 0:
            dependent_indices.append(idx)
            rows.append(tuple(GaussianRational.zero() for _ in basis_indices))
            continue
        if not basis_indices:
            basis_indices.append(idx)
            continue
        found = _find_relation(
            z, [values[b] for b in basis_indices], height_bound, bits
        )
        if found is None:
            basis_indices.append(idx)
        else:
            dependent_indices.append(idx)
            rows.append(found)

    # earlier dependents have rows shorter than the final basis; pad with zeros
    m = len(basis_indices)
    padded = tuple(
        row + tuple(GaussianRational.zero() for _ in range(m - len(row)))
        for row in rows
    )
    decomposition = RelationDecomposition(
        basis_indices=tuple(basis_indices),
        dependent_indices=tuple(dependent_indices),
        coeffs=padded,
        M=select_M(padded),
        warnings=tuple(warnings),
    )
    decomposition.validate()
    return decomposition


def _find_relation(
    candidate: mpc,
    basis_values: List[mpc],
    height_bound: int,
    bits: int,
) -> Optional[Tuple[GaussianRational, ...]]:
    """One membership test: candidate against the current basis.

    Builds the integer lattice whose short vectors encode Gaussian-integer
    combinations g0*candidate + sum gk*basis_k that nearly vanish, reduces
    it, and screens the reduced rows through the height and residual gates.
    Returns the coefficient row for the first certified candidate, or None.
    """
    q = len(basis_values)
    unknowns = 2 * (q + 1)
    scale_bits = bits - _SCALE_GUARD_BITS

    with working_precision(bits + 8):
        scale = mpf(2) ** scale_bits
        cols: List[Tuple[int, int]] = []
        for z in [candidate] + basis_values:
            x = int(mpmath.nint(scale * z.real))
            y = int(mpmath.nint(scale * z.imag))
            # unknown a (real part of g): contributes (x, y); unknown b
            # (imag part): contributes (-y, x)
            cols.append((x, y))

    lattice_rows: List[List[int]] = []
    for u in range(unknowns):
        pair, is_imag = divmod(u, 2)
        x, y = cols[pair]
        f1, f2 = (-y, x) if is_imag else (x, y)
        lattice_rows.append(
            [1 if c == u else 0 for c in range(unknowns)] + [f1, f2]
        )

    reduced, _ = lll_reduce(lattice_rows)

    tol = residual_tol(bits)
    for row in reduced:
        g = [
            GaussianInteger(row[2 * p], row[2 * p + 1]) for p in range(q + 1)
        ]
        g0 = g[0]
        if g0.is_zero():
            continue
        g0_conj = g0.conjugate()
        g0_norm = g0.norm()
        coeffs = tuple(
            GaussianRational(-(gk * g0_conj), g0_norm) for gk in g[1:]
        )
        if any(f.height() > height_bound for f in coeffs):
            continue
        if _relation_residual(candidate, basis_values, coeffs, 2 * bits) < tol:
            return coeffs
    return None


def _relation_residual(candidate, basis_values, coeffs, bits: int) -> mpf:
    with working_precision(bits):
        acc = mpc(candidate)
        for f, z in zip(coeffs, basis_values):
            acc -= f.to_mpc(bits) * mpc(z)
        return abs(acc)


def _detect_exact(entries: Tuple[GaussianRational, ...]) -> RelationDecomposition:
    # every nonzero exact rational spans the whole field, so the basis is
    # just the first nonzero entry and every later entry divides exactly
    basis_indices: List[int] = []
    dependent_indices: List[int] = []
    rows: List[Tuple[GaussianRational, ...]] = []
    pivot: Optional[GaussianRational] = None
    for idx, z in enumerate(entries):
        if z.is_zero():
            dependent_indices.append(idx)
            rows.append((GaussianRational.zero(),) if pivot is not None else ())
        elif pivot is None:
            pivot = z
            basis_indices.append(idx)
        else:
            dependent_indices.append(idx)
            rows.append((z / pivot,))
    m = len(basis_indices)
    padded = tuple(
        row + tuple(GaussianRational.zero() for _ in range(m - len(row)))
        for row in rows
    )
    decomposition = RelationDecomposition(
        basis_indices=tuple(basis_indices),
        dependent_indices=tuple(dependent_indices),
        coeffs=padded,
        M=select_M(padded),
        warnings=(),
    )
    decomposition.validate()
    return decomposition
