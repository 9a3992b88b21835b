"""Lie algebras given by rational structure constants.

Convention: ``[e_i, e_j] = sum_k c^k_ij e_k`` and ``d alpha(x, y) = -alpha([x, y])``,
so on the dual basis ``d e^k = -sum_{i<j} c^k_ij e^{ij}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional, Sequence

from .exterior import Form, basis, blade_indices, interior_product, wedge
from .linsolve import RationalMatrix, inverse, kernel_basis

Bracket = dict[int, Fraction]


class LieAlgebraError(ValueError):
    pass


class LieAlgebra:
    """A finite-dimensional Lie algebra on the basis ``e_1 .. e_n``.

    ``brackets`` maps ``(i, j)`` with ``i < j`` to ``{k: c^k_ij}``.  Pairs
    given as ``(j, i)`` are folded in with a sign.  The Jacobi identity is
    not enforced; see :attr:`is_lie` and :func:`jacobi_check`.
    """

    def __init__(self, dim: int, brackets: Optional[Mapping[tuple[int, int], Mapping[int, object]]] = None,
                 name: Optional[str] = None):
        self.dim = dim
        self.name = name
        table: dict[tuple[int, int], Bracket] = {}
        for (i, j), vec in (brackets or {}).items():
            for idx in (i, j, *vec):
                if not 1 <= idx <= dim:
                    raise LieAlgebraError(f"index {idx} out of range 1..{dim}")
            if i == j:
                if any(Fraction(c) for c in vec.values()):
                    raise LieAlgebraError(f"[e{i}, e{i}] must vanish")
                continue
            sign = 1 if i < j else -1
            key = (min(i, j), max(i, j))
            slot = table.setdefault(key, {})
            for k, c in vec.items():
                v = slot.get(k, 0) + sign * Fraction(c)
                if v:
                    slot[k] = v
                else:
                    slot.pop(k, None)
        self._brackets = {k: v for k, v in table.items() if v}
        self._d_cache: dict[int, Form] = {}
        self._jacobi: Optional[JacobiReport] = None

    @classmethod
    def from_differentials(cls, dim: int, differentials: Mapping[int, Form], name: Optional[str] = None) -> LieAlgebra:
        """Build from ``{k: d e^k}``; missing entries mean ``d e^k = 0``."""
        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        for k, f in differentials.items():
            if f.dim != dim:
                raise LieAlgebraError(f"d e{k} lives in dimension {f.dim}, expected {dim}")
            if not f.is_homogeneous(2):
                raise LieAlgebraError(f"d e{k} must be a 2-form")
            for mask, c in f.items():
                i, j = blade_indices(mask)
                table.setdefault((i, j), {})[k] = -c
        return cls(dim, table, name=name)

    @classmethod
    def abelian(cls, dim: int) -> LieAlgebra:
        return cls(dim)

    # structure

    @property
    def brackets(self) -> dict[tuple[int, int], Bracket]:
        return {k: dict(v) for k, v in sorted(self._brackets.items())}

    def bracket(self, i: int, j: int) -> Bracket:
        if i == j:
            return {}
        if i < j:
            return dict(self._brackets.get((i, j), {}))
        return {k: -c for k, c in self._brackets.get((j, i), {}).items()}

    def structure_constant(self, i: int, j: int, k: int) -> Fraction:
        return self.bracket(i, j).get(k, Fraction(0))

    def bracket_vectors(self, u: Sequence, v: Sequence) -> list[Fraction]:
        """Bracket of two coordinate vectors (length ``dim``)."""
        out = [Fraction(0)] * self.dim
        for (i, j), vec in self._brackets.items():
            coef = Fraction(u[i - 1]) * v[j - 1] - Fraction(u[j - 1]) * v[i - 1]
            if coef:
                for k, c in vec.items():
                    out[k - 1] += coef * c
        return out

    def differential_of_basis(self, k: int) -> Form:
        out = {}
        for (i, j), vec in self._brackets.items():
            c = vec.get(k)
            if c:
                out[(1 << (i - 1)) | (1 << (j - 1))] = -c
        return Form(self.dim, out)

    def differentials(self) -> dict[int, Form]:
        return {k: self.differential_of_basis(k) for k in range(1, self.dim + 1)}

    def d(self, a: Form) -> Form:
        return ce_differential(self, a)

    @property
    def is_lie(self) -> bool:
        return jacobi_check(self).ok

    def is_abelian(self) -> bool:
        return not self._brackets

    def ad_traces(self) -> list[Fraction]:
        """``tr ad(e_i)`` for each basis vector; all zero iff unimodular."""
        return [sum((self.structure_constant(i, k, k) for k in range(1, self.dim + 1)), Fraction(0))
                for i in range(1, self.dim + 1)]

    def is_unimodular(self) -> bool:
        return not any(self.ad_traces())

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.dim == other.dim and self._brackets == other._brackets

    def __hash__(self):
        return hash((self.dim, frozenset((k, frozenset(v.items())) for k, v in self._brackets.items())))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<LieAlgebra{label} dim={self.dim} brackets={len(self._brackets)}>"


@dataclass(frozen=True)
class JacobiReport:
    ok: bool
    triple: Optional[tuple[int, int, int]] = None
    residual: Optional[tuple[Fraction, ...]] = None

    def __bool__(self):
        return self.ok


def _unit(n: int, i: int) -> list[Fraction]:
    v = [Fraction(0)] * n
    v[i - 1] = Fraction(1)
    return v


def jacobi_check(g: LieAlgebra) -> JacobiReport:
    """First triple ``i<j<k`` whose Jacobiator is nonzero, if any."""
    if g._jacobi is not None:
        return g._jacobi
    n = g.dim
    units = [None] + [_unit(n, i) for i in range(1, n + 1)]
    report = JacobiReport(True)
    for i, j, k in combinations(range(1, n + 1), 3):
        a = g.bracket_vectors(g.bracket_vectors(units[i], units[j]), units[k])
        b = g.bracket_vectors(g.bracket_vectors(units[j], units[k]), units[i])
        c = g.bracket_vectors(g.bracket_vectors(units[k], units[i]), units[j])
        res = tuple(x + y + z for x, y, z in zip(a, b, c))
        if any(res):
            report = JacobiReport(False, (i, j, k), res)
            break
    g._jacobi = report
    return report


def ce_differential(g: LieAlgebra, a: Form) -> Form:
    """Chevalley-Eilenberg differential, extended as an odd derivation."""
    if a.dim != g.dim:
        raise ValueError(f"dimension mismatch: form in {a.dim}, algebra in {g.dim}")
    out = Form(g.dim)
    for mask, c in a.items():
        out = out + _d_blade(g, mask) * c
    return out


def _d_blade(g: LieAlgebra, mask: int) -> Form:
    cached = g._d_cache.get(mask)
    if cached is not None:
        return cached
    if mask == 0:
        res = Form(g.dim)
    else:
        low = mask & -mask
        first = low.bit_length()
        rest = mask ^ low
        # d(e^i ^ rest) = de^i ^ rest - e^i ^ d(rest)
        rest_form = Form(g.dim, {rest: 1})
        res = wedge(g.differential_of_basis(first), rest_form) - wedge(basis(g.dim, first), _d_blade(g, rest))
    g._d_cache[mask] = res
    return res


# subspaces


@dataclass(frozen=True)
class SpanIdeal:
    """Span of a set of basis vectors of ``algebra``, kept in declared order."""

    algebra: LieAlgebra
    generators: tuple[int, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if len(set(gens)) != len(gens):
            raise LieAlgebraError("repeated fiber generator")
        for i in gens:
            if not 1 <= i <= self.algebra.dim:
                raise LieAlgebraError(f"generator e{i} outside 1..{self.algebra.dim}")

    @property
    def dim(self) -> int:
        return len(self.generators)

    def is_ideal(self) -> bool:
        span = set(self.generators)
        for x in self.generators:
            for j in range(1, self.algebra.dim + 1):
                if any(k not in span for k in self.algebra.bracket(x, j)):
                    return False
        return True

    def is_abelian(self) -> bool:
        return all(not self.algebra.bracket(x, y) for x, y in combinations(self.generators, 2))

    def is_central(self) -> bool:
        return all(not self.algebra.bracket(x, j) for x in self.generators for j in range(1, self.algebra.dim + 1))

    def complement(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.algebra.dim + 1) if i not in self.generators)


def center(g: LieAlgebra) -> list[list[Fraction]]:
    """Basis of the center as coordinate vectors.

    Solves ``sum_i v_i c^k_ij = 0`` for every ``j, k``.
    """
    n = g.dim
    rows = []
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            row = [g.structure_constant(i, j, k) for i in range(1, n + 1)]
            if any(row):
                rows.append(row)
    return kernel_basis(rows, n)


def quotient(g: LieAlgebra, a: SpanIdeal) -> tuple[LieAlgebra, dict[int, int]]:
    """``g / a`` on the complementary basis vectors, relabelled ``1..n-m``.

    Returns the quotient and the map from old to new indices.
    """
    if a.algebra is not g and a.algebra != g:
        raise LieAlgebraError("ideal belongs to a different algebra")
    if not a.is_ideal():
        raise LieAlgebraError(f"span{{{', '.join(f'e{i}' for i in a.generators)}}} is not an ideal")
    keep = a.complement()
    index = {old: new for new, old in enumerate(keep, start=1)}
    table = {}
    for (i, j), vec in g.brackets.items():
        if i in index and j in index:
            proj = {index[k]: c for k, c in vec.items() if k in index}
            if proj:
                table[(index[i], index[j])] = proj
    return LieAlgebra(len(keep), table), index


def central_extension(n: LieAlgebra, psis: Sequence[Form], positions: Optional[Sequence[int]] = None) -> LieAlgebra:
    """Adjoin central generators ``z_k`` with ``d z^k = psis[k]``.

    ``positions`` are the indices the new generators take in the result;
    by default they are appended after ``n``'s basis.  The old basis vectors
    keep their relative order.
    """
    m = len(psis)
    total = n.dim + m
    if positions is None:
        positions = list(range(n.dim + 1, total + 1))
    positions = list(positions)
    if len(positions) != m or len(set(positions)) != m or not all(1 <= p <= total for p in positions):
        raise LieAlgebraError("bad positions for the new generators")
    for k, psi in enumerate(psis):
        if psi.dim != n.dim or not psi.is_homogeneous(2):
            raise LieAlgebraError(f"extension datum {k + 1} must be a 2-form on the base algebra")
        dpsi = ce_differential(n, psi)
        if dpsi:
            raise LieAlgebraError(f"extension datum {k + 1} is not closed: d psi = {dpsi}")
    old = [p for p in range(1, total + 1) if p not in positions]
    index = {i: old[i - 1] for i in range(1, n.dim + 1)}
    diffs = {index[k]: f.relabel(index, total) for k, f in n.differentials().items() if f}
    for p, psi in zip(positions, psis):
        if psi:
            diffs[p] = psi.relabel(index, total)
    return LieAlgebra.from_differentials(total, diffs)


@dataclass(frozen=True)
class BasicDecomposition:
    fiber_part: Form
    basic_part: Form
    fiber_contractions: tuple[Form, ...]


class NotBasicError(LieAlgebraError):
    def __init__(self, message: str, witness: Form):
        super().__init__(f"{message}: {witness}")
        self.witness = witness


class AdmissibilityError(LieAlgebraError):
    pass


def basic_obstruction(g: LieAlgebra, fiber: Sequence[int], beta: Form) -> Optional[Form]:
    """First nonzero ``i_x beta`` or ``i_x d beta`` over fiber vectors, else ``None``."""
    dbeta = ce_differential(g, beta)
    for x in fiber:
        for f in (beta, dbeta):
            w = interior_product(x, f)
            if w:
                return w
    return None


def is_basic(g: LieAlgebra, fiber: Sequence[int], beta: Form) -> bool:
    return basic_obstruction(g, fiber, beta) is None


def basic_decomposition(g: LieAlgebra, a: SpanIdeal, H: Form) -> BasicDecomposition:
    """Split ``H = sum_k e^{x_k} ^ i_{x_k} H + delta`` and certify the pieces are basic."""
    if H.dim != g.dim:
        raise ValueError("dimension mismatch")
    gens = a.generators
    for x, y in combinations(gens, 2):
        w = interior_product(y, interior_product(x, H))
        if w:
            raise AdmissibilityError(f"H(e{x}, e{y}, .) = {w} is nonzero on the fiber")
    psis = tuple(interior_product(x, H) for x in gens)
    fiber_part = Form(g.dim)
    for x, psi in zip(gens, psis):
        fiber_part = fiber_part + wedge(basis(g.dim, x), psi)
    delta = H - fiber_part
    w = basic_obstruction(g, gens, delta)
    if w is not None:
        raise NotBasicError("basic part is not basic", w)
    for k, psi in enumerate(psis):
        w = basic_obstruction(g, gens, psi)
        if w is not None:
            raise NotBasicError(f"contraction with e{gens[k]} is not basic", w)
    return BasicDecomposition(fiber_part, delta, psis)


@dataclass(frozen=True)
class Derivation:
    """Linear map ``D`` with ``D e_i = sum_k matrix[k][i] e_k`` (columns are images)."""

    algebra: LieAlgebra
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = self.algebra.dim
        mat = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        if len(mat) != n or any(len(r) != n for r in mat):
            raise LieAlgebraError(f"derivation matrix must be {n}x{n}")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_images(cls, algebra: LieAlgebra, images: Mapping[int, Mapping[int, object]]) -> Derivation:
        n = algebra.dim
        mat = [[Fraction(0)] * n for _ in range(n)]
        for i, img in images.items():
            for k, c in img.items():
                mat[k - 1][i - 1] = Fraction(c)
        return cls(algebra, tuple(map(tuple, mat)))

    def apply(self, v: Sequence) -> list[Fraction]:
        return [sum((a * Fraction(b) for a, b in zip(row, v)), Fraction(0)) for row in self.matrix]

    def leibniz_defect(self) -> Optional[tuple[int, int, list[Fraction]]]:
        g = self.algebra
        n = g.dim
        for i, j in combinations(range(1, n + 1), 2):
            ei, ej = _unit(n, i), _unit(n, j)
            lhs = self.apply(g.bracket_vectors(ei, ej))
            r1 = g.bracket_vectors(self.apply(ei), ej)
            r2 = g.bracket_vectors(ei, self.apply(ej))
            res = [a - b - c for a, b, c in zip(lhs, r1, r2)]
            if any(res):
                return i, j, res
        return None

    def is_derivation(self) -> bool:
        return self.leibniz_defect() is None


def extension_by_derivation(h: LieAlgebra, D: Derivation) -> LieAlgebra:
    """Append ``e_{n+1}`` with ``[e_{n+1}, v] = D v``."""
    defect = D.leibniz_defect()
    if defect is not None:
        i, j, res = defect
        raise LieAlgebraError(f"not a derivation: Leibniz fails on (e{i}, e{j}) with residual {res}")
    n = h.dim
    table: dict[tuple[int, int], dict[int, Fraction]] = {k: dict(v) for k, v in h.brackets.items()}
    for i in range(1, n + 1):
        img = {k: D.matrix[k - 1][i - 1] for k in range(1, n + 1) if D.matrix[k - 1][i - 1]}
        if img:
            # [e_i, e_{n+1}] = -D e_i
            table[(i, n + 1)] = {k: -c for k, c in img.items()}
    return LieAlgebra(n + 1, table)


def change_of_basis(g: LieAlgebra, P: Sequence[Sequence]) -> LieAlgebra:
    """Rewrite ``g`` in the basis ``e'_i = sum_j P[j][i] e_j``."""
    n = g.dim
    Pm = RationalMatrix(P, n)
    if Pm.rows != n:
        raise LieAlgebraError("change of basis must be square")
    Pinv = inverse(Pm)
    cols = [[Pm.entries[r][c] for r in range(n)] for c in range(n)]
    table = {}
    for i, j in combinations(range(n), 2):
        br = g.bracket_vectors(cols[i], cols[j])
        new = Pinv @ br
        vec = {k + 1: c for k, c in enumerate(new) if c}
        if vec:
            table[(i + 1, j + 1)] = vec
    return LieAlgebra(n, table)
