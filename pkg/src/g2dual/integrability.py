"""Twisted differentials, integrability predicates and the H-family solver."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from typing import Optional, Sequence

from .exterior import Form, blade_indices, interior_product, wedge
from .g2 import SpinorPair
from .lie import LieAlgebra, SpanIdeal, ce_differential
from .linsolve import inconsistency_row, kernel_basis, rank, solve_affine

log = logging.getLogger(__name__)


def twisted_differential(g: LieAlgebra, H: Form, sigma: Form) -> Form:
    """``d sigma + H ^ sigma``."""
    if not H.is_homogeneous(3):
        raise ValueError("the twisting form must be a pure 3-form")
    if H.dim != g.dim or sigma.dim != g.dim:
        raise ValueError("dimension mismatch")
    return ce_differential(g, sigma) + wedge(H, sigma)


def proportionality(a: Form, b: Form) -> Optional[Fraction]:
    """``lam`` with ``a == lam * b``, or ``None``; requires ``b != 0``."""
    if not b:
        return None
    if not a:
        return Fraction(0)
    if set(a.terms) != set(b.terms):
        return None
    ta, tb = a.terms, b.terms
    mask = next(iter(tb))
    lam = ta[mask] / tb[mask]
    if all(ta[m] == lam * tb[m] for m in tb):
        return lam
    return None


@dataclass(frozen=True)
class IntegrabilityReport:
    d_H_rho: Form
    d_H_rho_hat: Form
    H_closed: bool
    weak_odd: Optional[Fraction] = None
    weak_even: Optional[Fraction] = None

    @property
    def closed(self) -> bool:
        return not self.d_H_rho_hat

    @property
    def coclosed(self) -> bool:
        return not self.d_H_rho

    @property
    def strongly_integrable(self) -> bool:
        return self.closed and self.coclosed


def integrability_report(g: LieAlgebra, H: Form, pair: SpinorPair) -> IntegrabilityReport:
    dH = ce_differential(g, H)
    if dH:
        log.warning("H is not closed (dH = %s); predicates refer to a non-flat twisted operator", dH)
    d_rho = twisted_differential(g, H, pair.rho)
    d_rho_hat = twisted_differential(g, H, pair.rho_hat)
    odd = proportionality(d_rho_hat, pair.rho)
    even = proportionality(d_rho, pair.rho_hat)
    return IntegrabilityReport(
        d_rho,
        d_rho_hat,
        not dH,
        weak_odd=odd if odd else None,
        weak_even=even if even else None,
    )


# constraints on an unknown 3-form H; each maps H to a residual form that
# must vanish and is affine in H


@dataclass(frozen=True)
class HClosed:
    def residual(self, g: LieAlgebra, H: Form) -> Form:
        return ce_differential(g, H)


@dataclass(frozen=True)
class ClosedStructure:
    """``d rho_hat + H ^ rho_hat = 0``."""

    rho_hat: Form

    def residual(self, g: LieAlgebra, H: Form) -> Form:
        return ce_differential(g, self.rho_hat) + wedge(H, self.rho_hat)


@dataclass(frozen=True)
class CoclosedStructure:
    """``d rho + H ^ rho = 0``."""

    rho: Form

    def residual(self, g: LieAlgebra, H: Form) -> Form:
        return ce_differential(g, self.rho) + wedge(H, self.rho)


@dataclass(frozen=True)
class Admissible:
    """``H(x, y, .) = 0`` for fiber vectors ``x, y``."""

    fiber: SpanIdeal

    def residual(self, g: LieAlgebra, H: Form) -> Form:
        out = Form(g.dim)
        for x, y in combinations(self.fiber.generators, 2):
            out = out + interior_product(y, interior_product(x, H))
        return out

    def rows(self, g: LieAlgebra, H: Form) -> list[Form]:
        return [interior_product(y, interior_product(x, H)) for x, y in combinations(self.fiber.generators, 2)]


def three_form_basis(n: int) -> list[Form]:
    """Basis 3-forms in lexicographic blade order."""
    return [Form(n, {(1 << (i - 1)) | (1 << (j - 1)) | (1 << (k - 1)): 1}) for i, j, k in combinations(range(1, n + 1), 3)]


def _residual_parts(c, g: LieAlgebra, H: Form) -> list[Form]:
    if isinstance(c, Admissible):
        return c.rows(g, H)
    return [c.residual(g, H)]


class InfeasibleError(ValueError):
    def __init__(self, message: str, certificate: list[Fraction]):
        super().__init__(message)
        self.certificate = certificate


@dataclass
class AffineSolutionSpace:
    particular: Form
    kernel_basis: list[Form]
    constraints: tuple = ()
    algebra: Optional[LieAlgebra] = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.kernel_basis)

    def contains(self, H: Form) -> bool:
        """Membership by rank: ``H - particular`` lies in the span of the kernel."""
        diff = H - self.particular
        if not diff:
            return True
        vecs = [_coords(k) for k in self.kernel_basis]
        keys = sorted({m for v in vecs for m in v} | set(diff.terms))
        M = [[v.get(m, Fraction(0)) for m in keys] for v in vecs]
        r0 = rank(M) if M else 0
        return rank(M + [[diff.terms.get(m, Fraction(0)) for m in keys]]) == r0

    def satisfies(self, H: Form) -> bool:
        """Direct re-substitution into every constraint."""
        return all(not c.residual(self.algebra, H) for c in self.constraints)

    def member(self, coefficients: Sequence) -> Form:
        out = self.particular
        for t, k in zip(coefficients, self.kernel_basis):
            out = out + k * t
        return out


def _coords(f: Form) -> dict[int, Fraction]:
    return f.terms


def solve_h_space(g: LieAlgebra, constraints: Sequence) -> AffineSolutionSpace:
    """All 3-forms ``H`` satisfying the given affine constraints.

    Unknowns are the coefficients of the 3-form basis in lexicographic order.
    """
    n = g.dim
    unknowns = three_form_basis(n)
    zero = Form(n)
    constant = [p for c in constraints for p in _residual_parts(c, g, zero)]
    columns = []
    for b in unknowns:
        parts = [p for c in constraints for p in _residual_parts(c, g, b)]
        columns.append([p - p0 for p, p0 in zip(parts, constant)])
    # one row per (constraint part, output blade)
    row_keys = sorted({(ci, m) for col in columns for ci, p in enumerate(col) for m in p.terms}
                      | {(ci, m) for ci, p in enumerate(constant) for m in p.terms})
    M = [[col[ci].terms.get(m, Fraction(0)) for col in columns] for ci, m in row_keys]
    rhs = [-constant[ci].terms.get(m, Fraction(0)) for ci, m in row_keys]
    sol = solve_affine(M, rhs, cols=len(unknowns))
    if sol is None:
        cert = inconsistency_row(M, rhs)
        raise InfeasibleError("constraints on H are inconsistent", cert)
    particular, kernel = sol

    def to_form(v):
        out = Form(n)
        for t, b in zip(v, unknowns):
            if t:
                out = out + b * t
        return out

    return AffineSolutionSpace(to_form(particular), [to_form(v) for v in kernel], tuple(constraints), g)


def closed_three_forms(g: LieAlgebra) -> list[Form]:
    return solve_h_space(g, [HClosed()]).kernel_basis


@dataclass(frozen=True)
class ObstructionReport:
    vanishes: bool
    fiber_index: int
    space_dimension: int
    witness: Optional[Form] = None
    witness_cube: Optional[Form] = None
    triple: Optional[tuple[int, int, int]] = None


def cubic_obstruction(g: LieAlgebra, z: int) -> ObstructionReport:
    """Does ``(i_z sigma)^3`` vanish for every closed 3-form ``sigma``?

    The cube is a cubic polynomial in the coordinates of ``sigma`` whose
    coefficients are positive multiples of ``T(B_i, B_j, B_k) =
    i_z B_i ^ i_z B_j ^ i_z B_k`` over ``i <= j <= k``; it vanishes
    identically iff all of these do.
    """
    space = closed_three_forms(g)
    cs = [interior_product(z, b) for b in space]
    pairs: dict[tuple[int, int], Form] = {}
    for i, j, k in combinations_with_replacement(range(len(space)), 3):
        if not (cs[i] and cs[j] and cs[k]):
            continue
        ij = pairs.get((i, j))
        if ij is None:
            ij = pairs[(i, j)] = wedge(cs[i], cs[j])
        if not ij:
            continue
        t = wedge(ij, cs[k])
        if t:
            sigma, cube = _witness(space, cs, (i, j, k))
            return ObstructionReport(False, z, len(space), sigma, cube, (i, j, k))
    return ObstructionReport(True, z, len(space))


def _witness(space, cs, triple):
    idx = sorted(set(triple))
    # a nonzero cubic in <= 3 variables cannot vanish on {0..3}^3
    trials = [(1,) * len(idx)] + [t for t in product(range(4), repeat=len(idx)) if any(t)]
    for t in trials:
        sigma = sum((space[i] * c for i, c in zip(idx, t)), Form(space[0].dim))
        c = sum((cs[i] * v for i, v in zip(idx, t)), Form(cs[0].dim))
        cube = wedge(wedge(c, c), c)
        if cube:
            return sigma, cube
    raise AssertionError("no witness found for a nonzero symmetric trilinear value")
