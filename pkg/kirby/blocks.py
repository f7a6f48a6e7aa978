"""
Local Block Data
The published local linking blocks (A, a, B) -> (A', a', B') of the standard
moves, and the exact check of the Schur-complement conditions under which a
local replacement leaves d3 unchanged.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from kirby import linalg
from kirby.descriptors import MoveDescriptor, MoveTag
from kirby.errors import HalfIntegerLinking, KirbyError
from kirby.reports import IdentityCheck, SchurReport
from kirby.utils import format_rational, format_vector, get_logger

LOG = get_logger(__name__)

IntMatrix = Tuple[Tuple[int, ...], ...]

# --- Published blocks ---
LANTERN_A: IntMatrix = (
    (-5, 0, 0),
    (0, -2, 1),
    (0, 1, -2),
)
LANTERN_ROT = (-1, 0, 0)
LANTERN_A_PRIME: IntMatrix = (
    (-3, 0, -1, 1),
    (0, -3, 1, -1),
    (-1, 1, -2, 1),
    (1, -1, 1, -2),
)
LANTERN_ROT_PRIME = (1, -1, 0, 0)

# Rows and columns in the grouped order L1 L4 L7 L10 | L2 L5 L8 L11 | L3 L6 L9 L12.
CHAIN_GROUPED_ORDER = (1, 4, 7, 10, 2, 5, 8, 11, 3, 6, 9, 12)
CHAIN_A_GROUPED: IntMatrix = (
    (-2, -1, -1, -1, -1, -1, -1, -1, 0, 0, 0, 0),
    (-1, -2, -1, -1, 0, -1, -1, -1, 0, 0, 0, 0),
    (-1, -1, -2, -1, 0, 0, -1, -1, 0, 0, 0, 0),
    (-1, -1, -1, -2, 0, 0, 0, -1, 0, 0, 0, 0),
    (-1, 0, 0, 0, -2, -1, -1, -1, -1, -1, -1, -1),
    (-1, -1, 0, 0, -1, -2, -1, -1, 0, -1, -1, -1),
    (-1, -1, -1, 0, -1, -1, -2, -1, 0, 0, -1, -1),
    (-1, -1, -1, -1, -1, -1, -1, -2, 0, 0, 0, -1),
    (0, 0, 0, 0, -1, 0, 0, 0, -2, -1, -1, -1),
    (0, 0, 0, 0, -1, -1, 0, 0, -1, -2, -1, -1),
    (0, 0, 0, 0, -1, -1, -1, 0, -1, -1, -2, -1),
    (0, 0, 0, 0, -1, -1, -1, -1, -1, -1, -1, -2),
)
CHAIN_ROT = (0,) * 12
CHAIN_A_PRIME: IntMatrix = ((-3, -2), (-2, -3))
CHAIN_ROT_PRIME = (-1, 1)


def chain_A() -> IntMatrix:
    """The 12x12 chain block with rows in L1..L12 order."""
    position = {label: k for k, label in enumerate(CHAIN_GROUPED_ORDER)}
    order = [position[i] for i in range(1, 13)]
    return tuple(tuple(CHAIN_A_GROUPED[a][b] for b in order) for a in order)


def cancel_block(t: int, first_coeff: int = 1) -> IntMatrix:
    """((t+1, t), (t, t-1)) when the first component carries +1."""
    return ((t + first_coeff, t), (t, t - first_coeff))


# --- External columns ---
def _halve(vector: Sequence[int], label: str) -> Tuple[int, ...]:
    odd = [k for k, v in enumerate(vector) if v % 2]
    if odd:
        raise HalfIntegerLinking(f"{label}: entry {odd[0]} of the half-combination is not an integer")
    return tuple(v // 2 for v in vector)


def _check_lengths(*vectors: Sequence[int]) -> int:
    lengths = {len(v) for v in vectors}
    if len(lengths) > 1:
        raise HalfIntegerLinking(f"external vectors have different lengths {sorted(lengths)}")
    return lengths.pop() if lengths else 0


def lantern_columns(w2l, w2r, w3l, w3r) -> List[Tuple[int, ...]]:
    """Linking columns of L1, L2, L3 with the external components."""
    _check_lengths(w2l, w2r, w3l, w3r)
    col1 = [(b - a) + (d - c) for a, b, c, d in zip(w2l, w2r, w3l, w3r)]
    col2 = [a + b for a, b in zip(w2l, w2r)]
    col3 = [c + d for c, d in zip(w3l, w3r)]
    return [_halve(col1, "L1"), _halve(col2, "L2"), _halve(col3, "L3")]


def lantern_columns_prime(w2l, w2r, w3l, w3r) -> List[Tuple[int, ...]]:
    """Linking columns of L1'..L4' with the external components."""
    _check_lengths(w2l, w2r, w3l, w3r)
    return [
        _halve([a - d for a, d in zip(w2l, w3r)], "L1'"),
        _halve([b - c for b, c in zip(w2r, w3l)], "L2'"),
        _halve([a + c for a, c in zip(w2l, w3l)], "L3'"),
        _halve([b + d for b, d in zip(w2r, w3r)], "L4'"),
    ]


def chain_columns(ell1, ell2, ell3) -> List[Tuple[int, ...]]:
    """Columns for L1..L12: L_i links like ell_{i mod 3}."""
    _check_lengths(ell1, ell2, ell3)
    by_class = {1: tuple(ell1), 2: tuple(ell2), 0: tuple(ell3)}
    return [by_class[i % 3] for i in range(1, 13)]


def chain_columns_prime(ell1, ell2, ell3) -> List[Tuple[int, ...]]:
    _check_lengths(ell1, ell2, ell3)
    both = tuple(a + c for a, c in zip(ell1, ell3))
    return [both, both]


def columns_to_rows(columns: Sequence[Sequence[int]], externals: int) -> List[List[int]]:
    return [[col[e] for col in columns] for e in range(externals)]


# --- Matrix model ---
@dataclass(frozen=True)
class MoveMatrixModel:
    A: IntMatrix
    a: Tuple[int, ...]
    B: Tuple[Tuple[int, ...], ...]
    A_prime: IntMatrix
    a_prime: Tuple[int, ...]
    B_prime: Tuple[Tuple[int, ...], ...]
    dq: int

    @property
    def externals(self) -> int:
        return len(self.B)

    def reversed(self) -> "MoveMatrixModel":
        return MoveMatrixModel(self.A_prime, self.a_prime, self.B_prime, self.A, self.a, self.B, -self.dq)


def _freeze(rows) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in rows)


def cancel_model(t: int, rho: int, ell: Sequence[int], first_coeff: int = 1) -> MoveMatrixModel:
    """Insertion of a cancelling pair: nothing -> the pair block."""
    pair = columns_to_rows([ell, ell], len(ell))
    return MoveMatrixModel((), (), _freeze([[] for _ in ell]), cancel_block(t, first_coeff), (rho, rho),
                           _freeze(pair), 1)


def lantern_model(w2l, w2r, w3l, w3r) -> MoveMatrixModel:
    m = _check_lengths(w2l, w2r, w3l, w3r)
    B = columns_to_rows(lantern_columns(w2l, w2r, w3l, w3r), m)
    B_prime = columns_to_rows(lantern_columns_prime(w2l, w2r, w3l, w3r), m)
    return MoveMatrixModel(LANTERN_A, LANTERN_ROT, _freeze(B), LANTERN_A_PRIME, LANTERN_ROT_PRIME,
                           _freeze(B_prime), 0)


def chain_model(ell1, ell2, ell3) -> MoveMatrixModel:
    m = _check_lengths(ell1, ell2, ell3)
    B = columns_to_rows(chain_columns(ell1, ell2, ell3), m)
    B_prime = columns_to_rows(chain_columns_prime(ell1, ell2, ell3), m)
    return MoveMatrixModel(chain_A(), CHAIN_ROT, _freeze(B), CHAIN_A_PRIME, CHAIN_ROT_PRIME, _freeze(B_prime), 0)


def slide_model(A: Sequence[Sequence[int]], a: Sequence[int], B: Sequence[Sequence[int]], sign: int) -> MoveMatrixModel:
    """Rider 0 slid over 1 inside a local 2x2 block: P = I + sign E_{1,0}."""
    P = [[1, 0], [sign, 1]]
    A_prime = linalg.congruence(A, P)
    a_prime = linalg.mat_vec(linalg.transpose(P), a)
    B_prime = linalg.mat_mul(B, P) if B else []
    return MoveMatrixModel(_freeze(A), tuple(a), _freeze(B), _freeze(A_prime), tuple(int(v) for v in a_prime),
                           _freeze(B_prime), 0)


# --- Schur conditions ---
def _sandwich(B, A_inv) -> List[List[Fraction]]:
    k = len(A_inv)
    return [[sum((B[i][s] * A_inv[s][t] * B[j][t] for s in range(k) for t in range(k)), Fraction(0))
             for j in range(len(B))] for i in range(len(B))]


def _apply(B, A_inv, a) -> List[Fraction]:
    k = len(A_inv)
    return [sum((B[i][s] * A_inv[s][t] * a[t] for s in range(k) for t in range(k)), Fraction(0))
            for i in range(len(B))]


def _form(a, A_inv) -> Fraction:
    k = len(A_inv)
    return sum((a[s] * A_inv[s][t] * a[t] for s in range(k) for t in range(k)), Fraction(0))


def _render_matrix(m) -> str:
    return "(" + ", ".join(format_vector(row) for row in m) + ")"


def schur_checks(model: MoveMatrixModel) -> List[IdentityCheck]:
    """The three identities of the local replacement lemma, both sides exact."""
    A_inv = linalg.inverse(model.A)
    A_prime_inv = linalg.inverse(model.A_prime)
    left = _sandwich(model.B, A_inv)
    right = _sandwich(model.B_prime, A_prime_inv)
    left_a = _apply(model.B, A_inv, model.a)
    right_a = _apply(model.B_prime, A_prime_inv, model.a_prime)
    c2_change = _form(model.a_prime, A_prime_inv) - _form(model.a, A_inv)
    budget = (3 * (linalg.signature(model.A_prime) - linalg.signature(model.A))
              + 2 * (len(model.A_prime) - len(model.A)) - 4 * model.dq)
    return [
        IdentityCheck(name="B A^-1 B^T = B' A'^-1 B'^T", lhs=_render_matrix(left), rhs=_render_matrix(right),
                      holds=left == right),
        IdentityCheck(name="B A^-1 a = B' A'^-1 a'", lhs=format_vector(left_a), rhs=format_vector(right_a),
                      holds=left_a == right_a),
        IdentityCheck(name="a'^T A'^-1 a' - a^T A^-1 a = 3 dsigma + 2 ddim - 4 dq", lhs=format_rational(c2_change),
                      rhs=format_rational(budget), holds=c2_change == budget),
    ]


# --- Random instances ---
def _random_vector(rng, length: int, low: int = -3, high: int = 3) -> Tuple[int, ...]:
    return tuple(int(v) for v in rng.integers(low, high + 1, size=length))


def random_lantern_vectors(rng, externals: int):
    """Four w-vectors whose entries share a parity per external component."""
    parity = _random_vector(rng, externals, 0, 1)
    return tuple(tuple(p + 2 * int(k) for p, k in zip(parity, rng.integers(-2, 3, size=externals)))
                 for _ in range(4))


def random_slide_block(rng):
    while True:
        x, y, z = (int(v) for v in rng.integers(-4, 5, size=3))
        if x * z - y * y != 0:
            break
    a = tuple(int(v) for v in (x % 2 + 2 * rng.integers(-1, 2), z % 2 + 2 * rng.integers(-1, 2)))
    return ((x, y), (y, z)), a


def random_cancel_params(rng):
    t = int(rng.integers(-4, 3))
    rho = int(rng.integers(-2, 3))
    if (t + rho) % 2 == 0:
        rho += 1
    return t, rho


def model_for(m: MoveDescriptor, rng=None, externals: Optional[int] = None) -> MoveMatrixModel:
    """Instantiate a descriptor's local model; missing vectors are drawn from rng."""
    if rng is None:
        rng = np.random.default_rng(0)
    if externals is None:
        externals = int(rng.integers(0, 4))
    tag = m.tag
    if tag in (MoveTag.CANCEL_INSERT, MoveTag.CANCEL_REMOVE):
        t, rho = m.t, m.rho
        if t is None or rho is None:
            t, rho = random_cancel_params(rng)
        ell = m.ell if m.ell is not None else _random_vector(rng, externals)
        first = 1 if m.order == "+-" else -1
        model = cancel_model(t, rho, ell, first)
        model = model if tag == MoveTag.CANCEL_INSERT else model.reversed()
    elif tag == MoveTag.LANTERN:
        vectors = (m.w2l, m.w2r, m.w3l, m.w3r)
        if any(v is None for v in vectors):
            vectors = random_lantern_vectors(rng, externals)
        model = lantern_model(*vectors)
    elif tag == MoveTag.CHAIN:
        vectors = (m.ell1, m.ell2, m.ell3)
        if any(v is None for v in vectors):
            vectors = tuple(_random_vector(rng, externals) for _ in range(3))
        model = chain_model(*vectors)
    else:
        A, a = random_slide_block(rng)
        B = [list(_random_vector(rng, 2)) for _ in range(externals)]
        model = slide_model(A, a, B, m.sign if m.sign is not None else int(rng.choice([-1, 1])))
    return model.reversed() if m.backward else model


def verify_schur_conditions(m: MoveDescriptor, seed: int = 0, samples: int = 1) -> SchurReport:
    """
    Check the three identities on `samples` instantiations of the descriptor's
    local model. A descriptor that fixes every vector is checked once.
    """
    rng = np.random.default_rng(seed)
    fixed = _is_fixed(m)
    runs = 1 if fixed else samples
    passed = 0
    shown: List[IdentityCheck] = []
    failures: List[str] = []
    for k in range(runs):
        try:
            checks = schur_checks(model_for(m, rng))
        except KirbyError as e:
            failures.append(f"sample {k}: {e}")
            continue
        holds = all(c.holds for c in checks)
        # Report the first sample, or the first failing one.
        if not shown or (not holds and all(c.holds for c in shown)):
            shown = checks
        if holds:
            passed += 1
        else:
            failures.append(f"sample {k}: " + "; ".join(c.name for c in checks if not c.holds))
    LOG.debug("schur %s: %d/%d samples pass", m.tag.value, passed, runs)
    return SchurReport(tag=m.tag.value, direction=m.direction, samples=runs, passed=passed, checks=shown,
                       failures=failures)


def _is_fixed(m: MoveDescriptor) -> bool:
    if m.tag in (MoveTag.CANCEL_INSERT, MoveTag.CANCEL_REMOVE):
        return None not in (m.t, m.rho, m.ell)
    if m.tag == MoveTag.LANTERN:
        return None not in (m.w2l, m.w2r, m.w3l, m.w3r)
    if m.tag == MoveTag.CHAIN:
        return None not in (m.ell1, m.ell2, m.ell3)
    return False
