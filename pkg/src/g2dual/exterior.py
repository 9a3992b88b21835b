"""Exact exterior algebra on R^n with a fixed ordered orthonormal basis.

Blades are stored as bitmasks: bit ``i - 1`` set means the covector ``e^i``
is present.  Coefficients are :class:`fractions.Fraction` throughout.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "MAX_DIM",
    "Form",
    "FormSyntaxError",
    "basis",
    "blade_mask",
    "blade_indices",
    "contract",
    "exp_two_form",
    "hodge_star",
    "interior_product",
    "merge_sign",
    "parse_form",
    "format_form",
    "volume_form",
    "wedge",
]

MAX_DIM = 30

Number = Union[int, Fraction]


def blade_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << (i - 1)
    return mask


def blade_indices(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def merge_sign(a: int, b: int) -> int:
    """Sign of the permutation sorting the concatenation ``(a, b)``.

    Counts pairs with an index of ``a`` above an index of ``b``.  Assumes the
    masks are disjoint.
    """
    swaps = 0
    rest = b
    while rest:
        low = rest & -rest
        swaps += (a & ~((low << 1) - 1)).bit_count()
        rest ^= low
    return -1 if swaps & 1 else 1


def _grade_order(mask: int) -> tuple[int, tuple[int, ...]]:
    return (mask.bit_count(), blade_indices(mask))


class Form:
    """A mixed-degree exterior form with rational coefficients.

    Immutable; equality is exact.  ``a ^ b`` is the wedge product.
    """

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[int, Number] | None = None):
        if not 0 <= dim <= MAX_DIM:
            raise ValueError(f"dimension {dim} outside 0..{MAX_DIM}")
        top = 1 << dim
        clean = {}
        for mask, c in (terms or {}).items():
            if not 0 <= mask < top:
                raise ValueError(f"blade {blade_indices(mask)} exceeds dimension {dim}")
            c = Fraction(c)
            if c:
                clean[mask] = c
        self.dim = dim
        self._terms = clean
        self._hash = None

    # construction helpers

    @classmethod
    def zero(cls, dim: int) -> Form:
        return cls(dim)

    @classmethod
    def scalar(cls, dim: int, value: Number) -> Form:
        return cls(dim, {0: value})

    @classmethod
    def _raw(cls, dim: int, terms: dict[int, Fraction]) -> Form:
        # terms must already be clean
        obj = cls.__new__(cls)
        obj.dim = dim
        obj._terms = terms
        obj._hash = None
        return obj

    # container protocol

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[int, Fraction]]:
        """Terms in canonical order: grade ascending, then lexicographic."""
        for mask in sorted(self._terms, key=_grade_order):
            yield mask, self._terms[mask]

    def coefficient(self, indices: Sequence[int]) -> Fraction:
        """Coefficient of ``e^{indices}``; unsorted indices pick up the permutation sign."""
        f = basis(self.dim, *indices)
        if not f._terms:
            return Fraction(0)
        (mask, sign), = f._terms.items()
        return sign * self._terms.get(mask, Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def grades(self) -> set[int]:
        return {m.bit_count() for m in self._terms}

    def grade_part(self, k: int) -> Form:
        return Form._raw(self.dim, {m: c for m, c in self._terms.items() if m.bit_count() == k})

    def is_homogeneous(self, k: int | None = None) -> bool:
        g = self.grades()
        if k is None:
            return len(g) <= 1
        return g <= {k}

    def is_even(self) -> bool:
        return all(k % 2 == 0 for k in self.grades())

    def is_odd(self) -> bool:
        return all(k % 2 == 1 for k in self.grades())

    def support(self) -> set[int]:
        """Basis indices that occur in some term."""
        out = 0
        for m in self._terms:
            out |= m
        return set(blade_indices(out))

    # arithmetic

    def _check(self, other: Form) -> None:
        if not isinstance(other, Form):
            raise TypeError(f"expected Form, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: Form) -> Form:
        if isinstance(other, (int, Fraction)):
            other = Form.scalar(self.dim, other)
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Form._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> Form:
        return Form._raw(self.dim, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Form) -> Form:
        if isinstance(other, (int, Fraction)):
            other = Form.scalar(self.dim, other)
        return self + (-other)

    def __rsub__(self, other: Number) -> Form:
        return Form.scalar(self.dim, other) - self

    def __mul__(self, k: Number) -> Form:
        if isinstance(k, Form):
            raise TypeError("use ^ (wedge) to multiply two forms")
        k = Fraction(k)
        if not k:
            return Form._raw(self.dim, {})
        return Form._raw(self.dim, {m: c * k for m, c in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, k: Number) -> Form:
        return self * (1 / Fraction(k))

    def __xor__(self, other: Form) -> Form:
        return wedge(self, other)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self == Form.scalar(self.dim, other)
        if not isinstance(other, Form):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Form({self.dim}, {format_form(self)!r})"

    def __str__(self) -> str:
        return format_form(self)

    def relabel(self, mapping: Mapping[int, int], dim: int | None = None) -> Form:
        """Rename basis indices; unmapped indices raise ``KeyError``.

        The result is re-sorted into increasing index order with the
        corresponding permutation sign.
        """
        dim = self.dim if dim is None else dim
        out: dict[int, Fraction] = {}
        for m, c in self._terms.items():
            f = basis(dim, *(mapping[i] for i in blade_indices(m)))
            for mm, s in f._terms.items():
                v = out.get(mm, 0) + s * c
                if v:
                    out[mm] = v
                else:
                    out.pop(mm, None)
        return Form._raw(dim, out)


def basis(dim: int, *indices: int) -> Form:
    """``e^{i1} ^ e^{i2} ^ ...``; repeated indices give zero."""
    for i in indices:
        if not 1 <= i <= dim:
            raise ValueError(f"index {i} out of range 1..{dim}")
    if len(set(indices)) != len(indices):
        return Form(dim)
    inversions = sum(1 for a, b in combinations(indices, 2) if a > b)
    return Form._raw(dim, {blade_mask(indices): Fraction(-1 if inversions & 1 else 1)})


def volume_form(dim: int) -> Form:
    return Form._raw(dim, {(1 << dim) - 1: Fraction(1)})


def wedge(a: Form, b: Form) -> Form:
    a._check(b)
    out: dict[int, Fraction] = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            if ma & mb:
                continue
            m = ma | mb
            v = out.get(m, 0) + merge_sign(ma, mb) * ca * cb
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return Form._raw(a.dim, out)


def interior_product(i: int, a: Form) -> Form:
    """Contraction with the basis vector ``e_i``.

    ``e_i`` in position ``p`` of a blade contributes ``(-1)**(p - 1)``.
    """
    if not 1 <= i <= a.dim:
        raise ValueError(f"index {i} out of range 1..{a.dim}")
    bit = 1 << (i - 1)
    below = bit - 1
    out = {}
    for m, c in a._terms.items():
        if m & bit:
            out[m ^ bit] = -c if (m & below).bit_count() & 1 else c
    return Form._raw(a.dim, out)


def contract(vector: Mapping[int, Number] | Sequence[Number], a: Form) -> Form:
    """Contraction with a rational combination of basis vectors.

    ``vector`` is either ``{index: coefficient}`` or a length-``dim``
    coordinate sequence.
    """
    if not isinstance(vector, Mapping):
        if len(vector) != a.dim:
            raise ValueError("coordinate vector has wrong length")
        vector = {i + 1: v for i, v in enumerate(vector)}
    out = Form(a.dim)
    for i, v in vector.items():
        if v:
            out = out + interior_product(i, a) * v
    return out


def hodge_star(a: Form) -> Form:
    full = (1 << a.dim) - 1
    out = {}
    for m, c in a._terms.items():
        comp = full ^ m
        out[comp] = merge_sign(m, comp) * c
    return Form._raw(a.dim, out)


def exp_two_form(F: Form) -> Form:
    """``sum_k F^k / k!`` for a pure 2-form (the series terminates)."""
    if not F.is_homogeneous(2):
        raise ValueError(f"exp_two_form needs a pure 2-form, got grades {sorted(F.grades())}")
    result = Form.scalar(F.dim, 1)
    power = Form.scalar(F.dim, 1)
    k = 0
    while True:
        power = power ^ F
        k += 1
        if not power:
            return result
        result = result + power / factorial(k)


# text format

class FormSyntaxError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at column {position + 1})"
        super().__init__(message)


_TOKEN = re.compile(
    r"""\s*(?:
        (?P<sign>[+-])
      | (?P<num>\d+(?:/\d+)?)
      | (?P<blade>[ef](?:_?\{[\d,\s]*\}|_?\d+))
      | (?P<star>\*)
    )""",
    re.VERBOSE,
)


def _parse_blade(tok: str, dim: int, pos: int) -> tuple[int, ...]:
    body = tok[1:].lstrip("_")
    if body.startswith("{"):
        parts = [p.strip() for p in body[1:-1].split(",")]
        if any(not p for p in parts):
            raise FormSyntaxError(f"malformed braced blade {tok!r}", pos)
        idx = tuple(int(p) for p in parts)
    else:
        if dim > 9:
            raise FormSyntaxError(
                f"digit shorthand {tok!r} is ambiguous in dimension {dim}; use braces like e{{1,10}}", pos
            )
        idx = tuple(int(ch) for ch in body)
    for i in idx:
        if not 1 <= i <= dim:
            raise FormSyntaxError(f"index {i} out of range 1..{dim} in {tok!r}", pos)
    if len(set(idx)) != len(idx):
        raise FormSyntaxError(f"repeated index in blade {tok!r}", pos)
    return idx


def _tokens(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            return out
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()


def parse_form(text: str, dim: int) -> Form:
    """Parse a form literal such as ``"e127 - 1/2 e{1,3} + 2"``."""
    toks = _tokens(text)
    if not toks:
        raise FormSyntaxError("empty form literal", 0)
    out = Form(dim)
    i = 0
    while i < len(toks):
        sign = 1
        kind, tok, at = toks[i]
        if kind == "sign":
            sign = -1 if tok == "-" else 1
            i += 1
        elif i:
            raise FormSyntaxError("missing operator between terms", at)
        coef = Fraction(1)
        seen = False
        if i < len(toks) and toks[i][0] == "num":
            try:
                coef = Fraction(toks[i][1])
            except ZeroDivisionError:
                raise FormSyntaxError("zero denominator", toks[i][2]) from None
            seen = True
            i += 1
            if i < len(toks) and toks[i][0] == "star":
                i += 1
                if i >= len(toks) or toks[i][0] != "blade":
                    raise FormSyntaxError("'*' must be followed by a blade", toks[i - 1][2])
        idx: tuple[int, ...] = ()
        if i < len(toks) and toks[i][0] == "blade":
            idx = _parse_blade(toks[i][1], dim, toks[i][2])
            seen = True
            i += 1
        if not seen:
            where = toks[i][2] if i < len(toks) else len(text)
            raise FormSyntaxError("expected a coefficient or blade", where)
        if i < len(toks) and toks[i][0] != "sign":
            raise FormSyntaxError("missing operator between terms", toks[i][2])
        out = out + basis(dim, *idx) * (sign * coef)
    return out


def _blade_text(mask: int, dim: int, letter: str) -> str:
    idx = blade_indices(mask)
    if dim > 9:
        return f"{letter}{{{','.join(map(str, idx))}}}"
    return letter + "".join(map(str, idx))


def format_form(a: Form, letter: str = "e") -> str:
    """Canonical text: grade ascending, lexicographic blades, lowest terms."""
    if not a:
        return "0"
    parts = []
    for mask, c in a.items():
        mag = abs(c)
        if mask == 0:
            body = str(mag)
        elif mag == 1:
            body = _blade_text(mask, a.dim, letter)
        else:
            body = f"{mag} {_blade_text(mask, a.dim, letter)}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)
