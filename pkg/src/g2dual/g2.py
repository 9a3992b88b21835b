"""G2 and SU(3) data in adapted bases, and the spinor pairs built from them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exterior import Form, basis, hodge_star, interior_product, parse_form, volume_form, wedge
from .linsolve import determinant, leading_minors

STANDARD_PHI = "e127 + e347 + e567 + e135 - e236 - e146 - e245"


class G2Error(ValueError):
    pass


@dataclass(frozen=True)
class G2Structure:
    phi: Form
    adapted: bool = True

    def __post_init__(self):
        if self.phi.dim != 7 or not self.phi.is_homogeneous(3):
            raise G2Error("a G2 form is a 3-form in dimension 7")

    @property
    def star_phi(self) -> Form:
        return hodge_star(self.phi)


@dataclass(frozen=True)
class SU3Data:
    alpha_index: int
    omega: Form
    psi_plus: Form
    psi_minus: Form

    @property
    def alpha(self) -> Form:
        return basis(self.omega.dim, self.alpha_index)


@dataclass(frozen=True)
class SpinorPair:
    rho: Form
    rho_hat: Form
    s: Fraction = Fraction(0)
    c: Fraction = Fraction(1)

    def __post_init__(self):
        if not self.rho.is_even():
            raise G2Error("rho must have only even degrees")
        if not self.rho_hat.is_odd():
            raise G2Error("rho_hat must have only odd degrees")
        if self.s * self.s + self.c * self.c != 1:
            raise G2Error("angle data must satisfy s^2 + c^2 = 1")

    @property
    def angle(self) -> tuple[Fraction, Fraction]:
        return self.s, self.c


def standard_g2_form() -> G2Structure:
    return G2Structure(parse_form(STANDARD_PHI, 7), adapted=True)


def induced_bilinear(phi: Form) -> list[list[Fraction]]:
    """Matrix ``B`` with ``i_{e_i}phi ^ i_{e_j}phi ^ phi = B_ij vol``."""
    if phi.dim != 7 or not phi.is_homogeneous(3):
        raise G2Error("induced_bilinear needs a 3-form in dimension 7")
    top = (1 << 7) - 1
    contractions = [interior_product(i, phi) for i in range(1, 8)]
    B = []
    for a in contractions:
        row = []
        for b in contractions:
            row.append(wedge(wedge(a, b), phi).terms.get(top, Fraction(0)))
        B.append(row)
    return B


@dataclass(frozen=True)
class BilinearReport:
    matrix: list[list[Fraction]]
    determinant: Fraction
    minors: list[Fraction]

    @property
    def nondegenerate(self) -> bool:
        return self.determinant != 0

    @property
    def positive_definite(self) -> bool:
        return all(m > 0 for m in self.minors)

    @property
    def scalar_multiple(self):
        """``lam`` if the matrix is ``lam * I``, else ``None``."""
        lam = self.matrix[0][0]
        for i, row in enumerate(self.matrix):
            for j, x in enumerate(row):
                if x != (lam if i == j else 0):
                    return None
        return lam


def bilinear_report(phi: Form) -> BilinearReport:
    B = induced_bilinear(phi)
    return BilinearReport(B, determinant(B), leading_minors(B))


def usual_spinors(phi: G2Structure) -> SpinorPair:
    p = phi.phi
    return SpinorPair(1 - hodge_star(p), volume_form(7) - p, Fraction(0), Fraction(1))


def generalized_spinors(phi: G2Structure, alpha_index: int, s, c) -> SpinorPair:
    """Even/odd spinor pair for unit covector ``e^{alpha_index}`` and angle ``(s, c)``."""
    s, c = Fraction(s), Fraction(c)
    if s * s + c * c != 1:
        raise G2Error(f"s^2 + c^2 = {s * s + c * c}, expected 1")
    p = phi.phi
    sp = hodge_star(p)
    a = basis(7, alpha_index)
    rho = c - c * sp + s * hodge_star(a ^ sp) - s * (a ^ p) - s * hodge_star(a)
    rho_hat = s * a - c * p - s * hodge_star(a ^ p) - s * (a ^ sp) + (c / 7) * (p ^ sp)
    return SpinorPair(rho, rho_hat, s, c)


def su3_split(phi: G2Structure, x: int) -> SU3Data:
    """Split along the unit covector ``e^x``: ``phi = e^x ^ omega + psi_plus``.

    ``psi_minus`` is fixed by ``*phi = omega^2 / 2 + psi_minus ^ e^x``, which
    gives ``psi_minus = -i_x(*phi)``.
    """
    p = phi.phi
    a = basis(7, x)
    omega = interior_product(x, p)
    psi_plus = p - (a ^ omega)
    sp = hodge_star(p)
    psi_minus = -interior_product(x, sp)
    for name, f in (("omega", omega), ("psi_plus", psi_plus), ("psi_minus", psi_minus)):
        if interior_product(x, f):
            raise G2Error(f"{name} is not annihilated by e{x}")
    if (a ^ omega) + psi_plus != p:
        raise G2Error("phi is not reconstructed by alpha ^ omega + psi_plus")
    if (omega ^ omega) / 2 + (psi_minus ^ a) != sp:
        raise G2Error(f"*phi is not of the form omega^2/2 + psi_minus ^ e^{x} for this phi")
    return SU3Data(x, omega, psi_plus, psi_minus)
