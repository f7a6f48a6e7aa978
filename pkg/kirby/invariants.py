"""
Invariants
d3 of the surgered contact manifold, delta = c^2 - sigma mod 8, the epsilon
term for all-(-1) presentations, and change vectors between linking data.
"""

from fractions import Fraction
from typing import NamedTuple

from kirby import linalg
from kirby.errors import NotSolvable, NotTorsion, RequiresAllMinus
from kirby.surgery import LinkingData
from kirby.utils import format_rational

DELTA_MODULUS = 8


class ChangeVector(NamedTuple):
    dn: Fraction
    dsigma: Fraction
    dq: Fraction
    dc2: Fraction

    def as_strings(self):
        return [format_rational(v) for v in self]


def c_squared(data: LinkingData) -> Fraction:
    try:
        return linalg.quadratic_value(data.Q, data.r)
    except NotSolvable:
        raise NotTorsion("Q x = r has no rational solution: the first Chern class is not torsion")


def d3_surg(data: LinkingData) -> Fraction:
    """(c^2 - 3 sigma - 2n)/4 + q; zero on the empty diagram."""
    c2 = c_squared(data)
    sigma = linalg.signature(data.Q)
    return (c2 - 3 * sigma - 2 * data.n) / 4 + data.q


def raw_delta(data: LinkingData) -> Fraction:
    return c_squared(data) - linalg.signature(data.Q)


def delta(data: LinkingData) -> Fraction:
    """Representative of c^2 - sigma in [0, 8)."""
    return raw_delta(data) % DELTA_MODULUS


def epsilon(data: LinkingData) -> Fraction:
    """
    -(sigma + n)/2 for presentations with every coefficient -1. Exact: a
    singular Q can leave sigma + n odd, and then epsilon is a half-integer.
    """
    if data.q:
        raise RequiresAllMinus(f"epsilon needs an all-(-1) presentation, found q = {data.q}")
    return Fraction(-(linalg.signature(data.Q) + data.n), 2)


def epsilon_parity(data: LinkingData) -> Fraction:
    """epsilon mod 2; a residue of 1/2 or 3/2 marks a half-integer epsilon."""
    return epsilon(data) % 2


def change_vector(before: LinkingData, after: LinkingData) -> ChangeVector:
    """(n' - n, sigma' - sigma, q' - q, c'^2 - c^2)."""
    return ChangeVector(
        Fraction(after.n - before.n),
        Fraction(linalg.signature(after.Q) - linalg.signature(before.Q)),
        Fraction(after.q - before.q),
        c_squared(after) - c_squared(before),
    )
