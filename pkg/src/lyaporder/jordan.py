"""Jordan data for a matrix A and the block-Toeplitz form of its bicommutant.

A is always specified *by* its Jordan data (eigenvalues, block sizes and an
optional similarity), never recovered from a raw matrix: numerical Jordan
decomposition is ill-posed.  Over the reals, a non-real eigenvalue a+ib is
listed once with b > 0 and contributes 2x2 rotation-like blocks

    C(a+ib) = [[a, b], [-b, a]],

its conjugate partner being implicit.

A matrix B commutes with everything that commutes with A (i.e. lies in the
bicommutant of A) exactly when, in the Jordan basis, it is block diagonal
with one upper-triangular Toeplitz block per Jordan block and the Toeplitz
coefficients shared across all Jordan blocks of the same eigenvalue.  That
coefficient data is the :class:`BicommElement`; raw matrices can be checked
against the pattern and their coefficients extracted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import block_diag

from .linalg import DEFAULT_TOLERANCES, Tolerances, as_matrix, frob, rank_tol

__all__ = [
    "EigenBlock",
    "JordanSpec",
    "BicommElement",
    "InnerBlock",
    "MembershipResult",
    "MAX_BLOCK_SIZE",
    "inner_blocks",
    "eigenvalue_list",
    "is_lyapunov_regular",
    "build_JA",
    "build_A",
    "validate_bicomm_element",
    "build_bicomm_jordan",
    "build_bicomm_element",
    "check_bicomm_membership",
    "extract_bicomm_coeffs",
]

# Binomial coefficients in the closed-form pipeline stay exactly
# representable in float64 for blocks up to this size.
MAX_BLOCK_SIZE = 30


@dataclass(frozen=True)
class EigenBlock:
    """One distinct eigenvalue with its Jordan block sizes (nonincreasing)."""

    eigenvalue: complex
    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "eigenvalue", complex(self.eigenvalue))
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes:
            raise ValueError("eigenvalue needs at least one Jordan block")
        if any(s < 1 for s in self.sizes):
            raise ValueError(f"block sizes must be positive, got {self.sizes}")
        if any(a < b for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError(f"block sizes must be nonincreasing, got {self.sizes}")
        if self.sizes[0] > MAX_BLOCK_SIZE:
            raise ValueError(f"block sizes above {MAX_BLOCK_SIZE} are not supported")


@dataclass(frozen=True, eq=False)
class JordanSpec:
    """Jordan data defining A = P @ J @ inv(P) over the given field."""

    field: str
    eigens: tuple[EigenBlock, ...]
    similarity: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.field not in ("real", "complex"):
            raise ValueError(f"field must be 'real' or 'complex', got {self.field!r}")
        object.__setattr__(self, "eigens", tuple(self.eigens))
        if not self.eigens:
            raise ValueError("at least one eigenvalue is required")
        values = [e.eigenvalue for e in self.eigens]
        if len(set(values)) != len(values):
            raise ValueError("eigenvalues must be pairwise distinct")
        if self.field == "real":
            for e in self.eigens:
                if e.eigenvalue.imag < 0:
                    raise ValueError(
                        "real field: list each conjugate pair once, with positive imaginary part"
                    )
        if self.similarity is not None:
            p = as_matrix(self.similarity)
            n = self.dim
            if p.shape != (n, n):
                raise ValueError(f"similarity must be {n}x{n}, got {p.shape}")
            if self.field == "real" and np.any(p.imag != 0):
                raise ValueError("real field: similarity matrix must be real")
            if rank_tol(p) != n:
                raise ValueError("similarity matrix is singular within tolerance")
            object.__setattr__(self, "similarity", p)

    @property
    def dim(self) -> int:
        """Total matrix size, counting implicit conjugate blocks twice."""
        n = 0
        for e in self.eigens:
            mult = 2 if self._is_pair(e) else 1
            n += mult * sum(e.sizes)
        return n

    def _is_pair(self, e: EigenBlock) -> bool:
        return self.field == "real" and e.eigenvalue.imag > 0


class InnerBlock(NamedTuple):
    """One Jordan block in the layout of J: position and kind."""

    eigen_index: int
    size: int      # Toeplitz length (number of coefficient slots)
    dim: int       # actual dimension: size, or 2*size for conjugate pairs
    offset: int    # starting row/column in J
    pair: bool     # True for the 2x2-represented complex pairs (real field)


def inner_blocks(spec: JordanSpec) -> list[InnerBlock]:
    """Flat layout of all Jordan blocks of J in order."""
    out = []
    off = 0
    for j, e in enumerate(spec.eigens):
        pair = spec._is_pair(e)
        for s in e.sizes:
            d = 2 * s if pair else s
            out.append(InnerBlock(j, s, d, off, pair))
            off += d
    return out


def eigenvalue_list(spec: JordanSpec) -> list[complex]:
    """All eigenvalues of A, with implicit conjugates included (no multiplicity)."""
    vals = []
    for e in spec.eigens:
        vals.append(e.eigenvalue)
        if spec._is_pair(e):
            vals.append(e.eigenvalue.conjugate())
    return vals


def is_lyapunov_regular(spec: JordanSpec, tol: Tolerances | None = None) -> bool:
    """True when no two eigenvalues satisfy lam_i + conj(lam_j) == 0.

    Equivalent to invertibility of the map X -> X A + A* X.  Comparisons use
    a relative slack of eq_rel on |lam_i| + |lam_j|.
    """
    tol = tol or DEFAULT_TOLERANCES
    vals = eigenvalue_list(spec)
    for a in vals:
        for b in vals:
            if abs(a + b.conjugate()) <= tol.eq_rel * (abs(a) + abs(b)):
                return False
    return True


def _rotation_block(z: complex) -> np.ndarray:
    """2x2 real representation of the complex number z."""
    a, b = z.real, z.imag
    return np.array([[a, b], [-b, a]], dtype=np.complex128)


def _shift(n: int, power: int = 1) -> np.ndarray:
    """The n x n upper shift matrix raised to a power (ones on superdiagonal k)."""
    return np.eye(n, k=power, dtype=np.complex128)


def build_JA(spec: JordanSpec) -> np.ndarray:
    """Assemble the Jordan matrix J from the given Jordan data, in listed order."""
    parts = []
    for blk in inner_blocks(spec):
        lam = spec.eigens[blk.eigen_index].eigenvalue
        if blk.pair:
            j = np.kron(np.eye(blk.size), _rotation_block(lam)) + np.kron(
                _shift(blk.size), np.eye(2)
            )
        else:
            j = lam * np.eye(blk.size, dtype=np.complex128) + _shift(blk.size)
        parts.append(j)
    return block_diag(*parts).astype(np.complex128)


def build_A(spec: JordanSpec) -> np.ndarray:
    """A = P @ J @ inv(P); just J when no similarity is given."""
    j = build_JA(spec)
    p = spec.similarity
    if p is None:
        return j
    return p @ j @ np.linalg.inv(p)


@dataclass(frozen=True)
class BicommElement:
    """Per-eigenvalue Toeplitz coefficients defining an element of the bicommutant.

    coeffs[j][i] multiplies the i-th superdiagonal of every Jordan block of
    eigenvalue j; for conjugate-pair eigenvalues in the real field the complex
    coefficient is realized as its 2x2 rotation block.
    """

    coeffs: tuple[tuple[complex, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", tuple(tuple(complex(c) for c in row) for row in self.coeffs)
        )


def validate_bicomm_element(spec: JordanSpec, elem: BicommElement) -> None:
    """Check the coefficient lists against the Jordan data's shape and field."""
    if len(elem.coeffs) != len(spec.eigens):
        raise ValueError(
            f"expected coefficients for {len(spec.eigens)} eigenvalues, got {len(elem.coeffs)}"
        )
    for j, (e, row) in enumerate(zip(spec.eigens, elem.coeffs)):
        if len(row) != e.sizes[0]:
            raise ValueError(
                f"eigenvalue {j}: expected {e.sizes[0]} coefficients, got {len(row)}"
            )
        if spec.field == "real" and not spec._is_pair(e):
            if any(c.imag != 0 for c in row):
                raise ValueError(f"eigenvalue {j}: real eigenvalue needs real coefficients")


def build_bicomm_jordan(spec: JordanSpec, elem: BicommElement) -> np.ndarray:
    """The bicommutant element in the Jordan basis (block diagonal Toeplitz)."""
    validate_bicomm_element(spec, elem)
    parts = []
    for blk in inner_blocks(spec):
        row = elem.coeffs[blk.eigen_index]
        if blk.pair:
            t = sum(
                np.kron(_shift(blk.size, v), _rotation_block(row[v]))
                for v in range(blk.size)
            )
        else:
            t = sum(row[v] * _shift(blk.size, v) for v in range(blk.size))
        parts.append(np.atleast_2d(t))
    return block_diag(*parts).astype(np.complex128)


def build_bicomm_element(spec: JordanSpec, elem: BicommElement) -> np.ndarray:
    """B = P @ Btilde @ inv(P) for the Toeplitz pattern Btilde."""
    b = build_bicomm_jordan(spec, elem)
    p = spec.similarity
    if p is None:
        return b
    return p @ b @ np.linalg.inv(p)


class MembershipResult(NamedTuple):
    member: bool
    witness: Optional[tuple[int, int]]   # first violating entry of inv(P) B P
    element: Optional[BicommElement]     # extracted coefficients when member


def _read_coeffs(spec: JordanSpec, bt: np.ndarray) -> BicommElement:
    """Read Toeplitz coefficients off the first row of each eigenvalue's largest block."""
    layout = inner_blocks(spec)
    rows: list[tuple[complex, ...]] = []
    for j, e in enumerate(spec.eigens):
        blk = next(b for b in layout if b.eigen_index == j)  # largest block comes first
        off = blk.offset
        if blk.pair:
            row = tuple(
                complex(bt[off, off + 2 * v].real, bt[off, off + 2 * v + 1].real)
                for v in range(blk.size)
            )
        else:
            coeff = bt[off, off : off + blk.size]
            if spec.field == "real":
                row = tuple(complex(c.real, 0.0) for c in coeff)
            else:
                row = tuple(complex(c) for c in coeff)
        rows.append(row)
    return BicommElement(tuple(rows))


def check_bicomm_membership(
    spec: JordanSpec, B, tol: Tolerances | None = None
) -> MembershipResult:
    """Decide whether B lies in the bicommutant of A, with an entry witness.

    Transforms Btilde = inv(P) B P, reads candidate coefficients off the
    leading blocks, rebuilds the implied pattern and compares entrywise; the
    first (row-major) entry violating the pattern beyond eq_rel is returned
    as the witness.  Nonmembership is a result, not an error.
    """
    tol = tol or DEFAULT_TOLERANCES
    b = as_matrix(B)
    n = spec.dim
    if b.shape != (n, n):
        raise ValueError(f"B must be {n}x{n}, got {b.shape}")
    if spec.field == "real" and np.any(b.imag != 0):
        raise ValueError("real field: B must have real entries")
    p = spec.similarity
    bt = b if p is None else np.linalg.solve(p, b @ p)
    candidate = _read_coeffs(spec, bt)
    expected = build_bicomm_jordan(spec, candidate)
    scale = tol.eq_rel * (1.0 + frob(bt))
    diff = np.abs(bt - expected)
    if diff.max(initial=0.0) <= scale:
        return MembershipResult(True, None, candidate)
    bad = np.argwhere(diff > scale)
    witness = tuple(int(x) for x in bad[0])
    return MembershipResult(False, witness, None)


def extract_bicomm_coeffs(
    spec: JordanSpec, B, tol: Tolerances | None = None
) -> BicommElement:
    """Coefficients of a verified bicommutant member; raises on nonmembers."""
    result = check_bicomm_membership(spec, B, tol)
    if not result.member:
        raise ValueError(
            f"matrix is not in the bicommutant: pattern violated at entry {result.witness}"
        )
    return result.element
