"""Dual admissible triples, correspondence spaces and spinor transport.

Labelling: the dual algebra reuses the labels of the original one, the new
central generator ``z_k`` taking the slot of the fiber vector ``x_k``.  The
correspondence space keeps the original labels ``1..n`` and appends the dual
fiber directions as ``n+1 .. n+m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence, Union

from .exterior import Form, basis, blade_indices, exp_two_form, interior_product, wedge
from .lie import (
    LieAlgebra,
    LieAlgebraError,
    SpanIdeal,
    basic_decomposition,
    basic_obstruction,
    ce_differential,
    central_extension,
    jacobi_check,
    quotient,
)
from .linsolve import rank


class DualityError(ValueError):
    pass


@dataclass(frozen=True)
class AdmissibleTriple:
    algebra: LieAlgebra
    fiber: SpanIdeal
    H: Form
    H_closed: bool
    fiber_abelian_ideal: bool
    fiber_central: bool
    H_fiber_degenerate: bool

    @property
    def admissible(self) -> bool:
        """Closed H, abelian ideal fiber, H degenerate along the fiber."""
        return self.H_closed and self.fiber_abelian_ideal and self.H_fiber_degenerate

    @property
    def valid(self) -> bool:
        return self.admissible and self.fiber_central

    def failures(self) -> list[str]:
        names = ("H_closed", "fiber_abelian_ideal", "fiber_central", "H_fiber_degenerate")
        return [n for n in names if not getattr(self, n)]


def validate_admissible(g: LieAlgebra, fiber: Union[SpanIdeal, Sequence[int]], H: Form) -> AdmissibleTriple:
    if not isinstance(fiber, SpanIdeal):
        fiber = SpanIdeal(g, tuple(fiber))
    if H.dim != g.dim or not H.is_homogeneous(3):
        raise DualityError("H must be a 3-form on the algebra")
    closed = not ce_differential(g, H)
    abelian_ideal = fiber.is_ideal() and fiber.is_abelian()
    central = fiber.is_central()
    degenerate = True
    if fiber.dim > 1:
        degenerate = all(not interior_product(y, interior_product(x, H)) for x, y in combinations(fiber.generators, 2))
    return AdmissibleTriple(g, fiber, H, closed, abelian_ideal, central, degenerate)


@dataclass(frozen=True)
class DualResult:
    original: AdmissibleTriple
    dual: AdmissibleTriple
    psis: tuple[Form, ...]
    delta: Form
    fiber_map: dict[int, int]
    quotient: LieAlgebra = field(repr=False)
    quotient_index: dict[int, int] = field(repr=False)


def dualize(t: AdmissibleTriple) -> DualResult:
    if not t.admissible:
        raise DualityError(f"triple is not admissible: {', '.join(t.failures())}")
    if not t.fiber_central:
        raise DualityError("dualization needs a central fiber")
    g, gens = t.algebra, t.fiber.generators
    try:
        dec = basic_decomposition(g, t.fiber, t.H)
    except LieAlgebraError as exc:
        raise DualityError(str(exc)) from exc
    n, index = quotient(g, t.fiber)
    psis_n = [psi.relabel(index, n.dim) for psi in dec.fiber_contractions]
    try:
        gdual = central_extension(n, psis_n, positions=gens)
    except LieAlgebraError as exc:
        raise DualityError(str(exc)) from exc
    Hdual = dec.basic_part
    for x in gens:
        dx = g.differential_of_basis(x)
        w = basic_obstruction(g, gens, dx)
        if w is not None:
            raise DualityError(f"d e^{x} is not basic: {w}")
        Hdual = Hdual + wedge(basis(g.dim, x), dx)
    dual = validate_admissible(gdual, SpanIdeal(gdual, gens), Hdual)
    if not dual.valid:
        raise DualityError(f"dual triple fails: {', '.join(dual.failures())}")
    return DualResult(t, dual, dec.fiber_contractions, dec.basic_part, {x: x for x in gens}, n, index)


@dataclass(frozen=True)
class CorrespondenceSpace:
    algebra: LieAlgebra
    base_dim: int
    fiber: tuple[int, ...]
    p_map: dict[int, int]
    p_dual_map: dict[int, int]
    F: Form
    duality: DualResult = field(repr=False)

    @property
    def dual_fiber(self) -> tuple[int, ...]:
        return tuple(self.base_dim + k for k in range(1, len(self.fiber) + 1))

    def pull_back(self, sigma: Form) -> Form:
        return sigma.relabel(self.p_map, self.algebra.dim)

    def pull_back_dual(self, sigma: Form) -> Form:
        return sigma.relabel(self.p_dual_map, self.algebra.dim)

    def push_to_dual(self, sigma: Form) -> Form:
        """Inverse of :meth:`pull_back_dual` on forms without ``k``-directions."""
        inv = {v: k for k, v in self.p_dual_map.items()}
        return sigma.relabel(inv, self.base_dim)

    def fiber_pairing(self) -> list[list]:
        """``F(x_k, z_l)`` for fiber vectors of both sides."""
        return [[interior_product(z, interior_product(x, self.F)).terms.get(0, 0) for z in self.dual_fiber]
                for x in self.fiber]

    def fiber_nondegenerate(self) -> bool:
        return rank(self.fiber_pairing()) == len(self.fiber)


def correspondence(t: AdmissibleTriple, d: DualResult, sign: int = 1) -> CorrespondenceSpace:
    """Fibered product of ``g`` and its dual over the quotient.

    ``F = sign * sum_k z^k ^ e^{x_k}``; ``sign=1`` is the one that makes the
    certificate hold, the other value exists for negative tests.
    """
    if d.original is not t and (d.original.algebra != t.algebra or d.original.H != t.H):
        raise DualityError("dual result was not produced from this triple")
    g = t.algebra
    gens = t.fiber.generators
    N, m = g.dim, len(gens)
    C = N + m
    p_map = {i: i for i in range(1, N + 1)}
    p_dual_map = {i: i for i in range(1, N + 1) if i not in gens}
    for k, x in enumerate(gens, start=1):
        p_dual_map[x] = N + k
    diffs = {i: g.differential_of_basis(i).relabel(p_map, C) for i in range(1, N + 1)}
    for k, psi in enumerate(d.psis, start=1):
        diffs[N + k] = psi.relabel(p_map, C)
    c = LieAlgebra.from_differentials(C, {k: v for k, v in diffs.items() if v})
    if not jacobi_check(c).ok:
        raise DualityError("correspondence space fails the Jacobi identity")
    # p and p_dual must intertwine the differentials
    for alg, mp in ((g, p_map), (d.dual.algebra, p_dual_map)):
        for i in range(1, N + 1):
            lhs = ce_differential(c, basis(N, i).relabel(mp, C))
            if lhs != alg.differential_of_basis(i).relabel(mp, C):
                raise DualityError(f"projection is not a homomorphism on e^{i}")
    F = Form(C)
    for k, x in enumerate(gens, start=1):
        F = F + wedge(basis(C, N + k), basis(C, x)) * sign
    return CorrespondenceSpace(c, N, gens, p_map, p_dual_map, F, d)


@dataclass(frozen=True)
class DualityCertificate:
    lhs: Form
    rhs: Form

    @property
    def residual(self) -> Form:
        return self.lhs - self.rhs

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs


def verify_duality_certificate(cs: CorrespondenceSpace, H: Form, H_dual: Form) -> DualityCertificate:
    """Compare ``p^*H - p_dual^*H_dual`` with ``dF`` on the correspondence space."""
    lhs = cs.pull_back(H) - cs.pull_back_dual(H_dual)
    rhs = ce_differential(cs.algebra, cs.F)
    return DualityCertificate(lhs, rhs)


def transport_spinor(cs: CorrespondenceSpace, sigma: Form) -> Form:
    """``i_{x_m} ... i_{x_1} (e^F ^ p^* sigma)``, read on the dual algebra."""
    if sigma.dim != cs.base_dim:
        raise ValueError("form does not live on the original algebra")
    out = wedge(exp_two_form(cs.F), cs.pull_back(sigma))
    for x in cs.fiber:
        out = interior_product(x, out)
    for x in cs.fiber:
        if interior_product(x, out):
            raise DualityError(f"transported form is not basic along e_{x}")
    return cs.push_to_dual(out)


@dataclass(frozen=True)
class DoubleDualReport:
    algebra_matches: bool
    H_matches: bool
    differing_brackets: dict
    H_difference: Form

    @property
    def passed(self) -> bool:
        return self.algebra_matches and self.H_matches


def double_dual_check(t: AdmissibleTriple) -> DoubleDualReport:
    first = dualize(t)
    second = dualize(first.dual)
    g0, g2 = t.algebra, second.dual.algebra
    keys = set(g0.brackets) | set(g2.brackets)
    differing = {k: (g0.bracket(*k), g2.bracket(*k)) for k in sorted(keys) if g0.bracket(*k) != g2.bracket(*k)}
    diff = second.dual.H - t.H
    return DoubleDualReport(g0 == g2, not diff, differing, diff)


def dual_correspondence(d: DualResult) -> CorrespondenceSpace:
    """Correspondence space for dualizing the dual triple back."""
    return correspondence(d.dual, dualize(d.dual))
