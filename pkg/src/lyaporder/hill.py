"""Hill representations of *-linear maps and the witness machinery built on them.

A Hill representation writes a *-linear map as

    L(V) = sum_{k,l} H[k, l] * A_l @ V @ A_k*

for matrices A_1..A_r in F^{n x q} and a Hermitian coefficient matrix H.
Equivalently, with Ahat the r-by-nq matrix whose k-th row is vec(A_k)*,

    matricization = sum_{k,l} H[k, l] * kron(conj(A_k), A_l)
    choi          = Ahat* @ H.T @ Ahat.

The representation is minimal when r equals the rank of the Choi matrix; the
A_k are then a basis of the span of the n x q blocks of the matricization
and the map is completely positive iff H is positive definite.  Non-minimal
representations built from a spanning block selection with pinned expansion
coefficients keep "completely positive iff H PSD" and satisfy
rank(H) == rank(choi) even when H is singular.

Positivity of a map upgrades to complete positivity whenever some vector z
makes Ahat @ kron(z, I_n) have full row rank (or some x does the same for
Ahat @ kron(I_q, x)).  For maps whose block span sits inside a triangular
Toeplitz algebra attached to Jordan data, such witnesses exist in closed
form: an indicator of the first (respectively last) position of every Jordan
block, transported through the similarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .jordan import JordanSpec, inner_blocks
from .linalg import (
    DEFAULT_TOLERANCES,
    Tolerances,
    frob,
    is_psd,
    kron,
    rank_tol,
    vec,
)
from .starmaps import StarLinearMap, choi_matrix, is_star_linear

__all__ = [
    "HillRep",
    "Certificate",
    "ahat_matrix",
    "matricization_blocks",
    "minimal_hill_from_blocks",
    "nonminimal_hill",
    "hill_from_choi",
    "reconstruct_map",
    "cp_via_hill",
    "find_c1_witness",
    "find_c2_witness",
    "positivity_equals_cp_certificate",
]


@dataclass(eq=False)
class HillRep:
    """One Hill representation: factors A_k, coefficient matrix H, block selection."""

    factors: list[np.ndarray]
    hill: np.ndarray
    selection: tuple[tuple[int, int], ...]
    minimal: bool
    out_dim: int
    in_dim: int
    field: str = "complex"

    @property
    def size(self) -> int:
        return len(self.factors)


def ahat_matrix(factors, n: int, q: int) -> np.ndarray:
    """Stack vec(A_k)* as rows; full row rank for any valid representation."""
    if not factors:
        return np.zeros((0, n * q), dtype=np.complex128)
    return np.array([vec(a).conj() for a in factors])


def matricization_blocks(m: StarLinearMap) -> np.ndarray:
    """View the matricization as an (n, q) grid of n x q blocks.

    Returns a 4-D array b with b[i, j] the (i, j) block, i.e.
    b[i, j, k, l] == matrix[i*n + k, j*q + l].
    """
    n, q = m.out_dim, m.in_dim
    return m.matrix.reshape(n, n, q, q).transpose(0, 2, 1, 3)


def _require_star_linear(m: StarLinearMap, tol: Tolerances) -> None:
    if not is_star_linear(m, tol):
        raise ValueError("Hill representations require a *-linear map")


def _greedy_selection(blocks: np.ndarray, n: int, q: int, rank_rel: float):
    """Row-major scan keeping each block that grows the span (Gram-Schmidt guarded)."""
    stacked = blocks.reshape(n * q, n * q)
    svals = np.linalg.svd(stacked, compute_uv=False)
    sigma_max = float(svals[0]) if svals.size else 0.0
    threshold = rank_rel * sigma_max
    selection: list[tuple[int, int]] = []
    ortho: list[np.ndarray] = []
    if sigma_max == 0.0:
        return selection
    for i in range(n):
        for j in range(q):
            v = blocks[i, j].ravel()
            r = v.copy()
            for u in ortho:           # two passes for numerical orthogonality
                r -= (u.conj() @ r) * u
            for u in ortho:
                r -= (u.conj() @ r) * u
            norm = float(np.linalg.norm(r))
            if norm > threshold:
                selection.append((i, j))
                ortho.append(r / norm)
    return selection


def _expansion_coefficients(blocks, selection, n, q, eq_rel):
    """Least-squares expansion of every block over the selected ones, pinned.

    Returns alpha of shape (r, n*q) with column i*q+j holding the expansion of
    block (i, j); the column of each selected position is forced to the
    corresponding unit vector, which is always a valid expansion of itself.
    """
    r = len(selection)
    basis = np.array([blocks[i, j].ravel() for (i, j) in selection]).T  # (nq, r)
    targets = blocks.reshape(n * q, n * q).T                            # (nq, n*q)
    if r == 0:
        if float(np.abs(targets).max(initial=0.0)) > 0.0:
            raise ValueError("empty selection cannot span a nonzero map")
        return np.zeros((0, n * q), dtype=np.complex128)
    alpha, *_ = np.linalg.lstsq(basis, targets, rcond=None)
    residual = basis @ alpha - targets
    norms = np.linalg.norm(targets, axis=0)
    bad = np.linalg.norm(residual, axis=0) > eq_rel * (1.0 + norms)
    if np.any(bad):
        flat = int(np.flatnonzero(bad)[0])
        raise ValueError(
            f"selection does not span block ({flat // q}, {flat % q}) within tolerance"
        )
    for k, (i, j) in enumerate(selection):
        alpha[:, i * q + j] = 0.0
        alpha[k, i * q + j] = 1.0
    return alpha


def _factors_from_alpha(alpha, n, q):
    # A_k[i, j] = conj(alpha_k for block (i, j)); columns are ordered i*q + j.
    return [a.conj().reshape(n, q) for a in alpha]


def _pinned_hill(blocks, selection):
    r = len(selection)
    h = np.zeros((r, r), dtype=np.complex128)
    for k, (ik, jk) in enumerate(selection):
        for l, (il, jl) in enumerate(selection):
            h[k, l] = np.conj(blocks[il, jl][ik, jk])
    return h


def minimal_hill_from_blocks(m: StarLinearMap, tol: Tolerances | None = None) -> HillRep:
    """Minimal Hill representation from a greedy independent block selection.

    Selects rank(choi)-many linearly independent blocks of the matricization
    scanning row-major, expands every block over them, and reads the Hill
    matrix directly off the matricization entries at the selected positions:
    H[k, l] is the (i_l, j_l) entry of the block at (i_k, j_k).
    """
    tol = tol or DEFAULT_TOLERANCES
    _require_star_linear(m, tol)
    n, q = m.out_dim, m.in_dim
    blocks = matricization_blocks(m)
    selection = _greedy_selection(blocks, n, q, tol.rank_rel)
    rank_choi = rank_tol(choi_matrix(m), tol)
    if len(selection) != rank_choi:
        raise ValueError(
            f"block span rank {len(selection)} disagrees with Choi rank {rank_choi}; "
            "the map is not *-linear within tolerance or is numerically corrupted"
        )
    alpha = _expansion_coefficients(blocks, selection, n, q, tol.eq_rel)
    factors = _factors_from_alpha(alpha, n, q)
    r = len(selection)
    h = np.zeros((r, r), dtype=np.complex128)
    for k, (ik, jk) in enumerate(selection):
        for l, (il, jl) in enumerate(selection):
            h[k, l] = blocks[ik, jk][il, jl]
    return HillRep(factors, h, tuple(selection), True, n, q, m.field)


def nonminimal_hill(
    m: StarLinearMap, selection, tol: Tolerances | None = None
) -> HillRep:
    """Hill representation for an arbitrary spanning block selection.

    The selection (distinct block positions, possibly with repeated values
    and r > rank(choi)) must span all blocks of the matricization.  Expansion
    coefficients are pinned so that each selected block expands as itself;
    the resulting H is Hermitian with rank equal to the Choi rank, and the
    map is completely positive iff H is PSD.
    """
    tol = tol or DEFAULT_TOLERANCES
    _require_star_linear(m, tol)
    n, q = m.out_dim, m.in_dim
    selection = [(int(i), int(j)) for i, j in selection]
    for i, j in selection:
        if not (0 <= i < n and 0 <= j < q):
            raise ValueError(f"block index ({i}, {j}) outside the {n}x{q} grid")
    if len(set(selection)) != len(selection):
        raise ValueError("selection must not repeat block positions")
    blocks = matricization_blocks(m)
    alpha = _expansion_coefficients(blocks, selection, n, q, tol.eq_rel)
    factors = _factors_from_alpha(alpha, n, q)
    h = _pinned_hill(blocks, selection)
    minimal = len(selection) == rank_tol(choi_matrix(m), tol)
    return HillRep(factors, h, tuple(selection), minimal, n, q, m.field)


def hill_from_choi(m: StarLinearMap, ahat, tol: Tolerances | None = None) -> np.ndarray:
    """Recover H from the Choi matrix for a given full-row-rank Ahat.

    Solves choi == Ahat* @ H.T @ Ahat via H.T = inv(Ahat Ahat*) Ahat choi
    Ahat* inv(Ahat Ahat*), then verifies the factorization; a failure means
    ker(Ahat) is not contained in ker(choi).
    """
    tol = tol or DEFAULT_TOLERANCES
    _require_star_linear(m, tol)
    a = np.asarray(ahat, dtype=np.complex128)
    r = a.shape[0]
    if rank_tol(a, tol) != r:
        raise ValueError("Ahat must have full row rank")
    c = choi_matrix(m)
    gram = a @ a.conj().T
    middle = a @ c @ a.conj().T
    # gram is Hermitian positive definite, so gram^{-H} == gram^{-1}.
    ht = np.linalg.solve(gram, np.linalg.solve(gram, middle.conj().T).conj().T)
    residual = float(np.linalg.norm(a.conj().T @ ht @ a - c))
    if residual > tol.eq_rel * (1.0 + frob(c)):
        raise ValueError(
            f"Choi matrix is not supported on the row space of Ahat (residual {residual:.3e})"
        )
    return ht.T


def reconstruct_map(rep: HillRep) -> StarLinearMap:
    """Assemble the matricization sum_{k,l} H[k,l] * kron(conj(A_k), A_l)."""
    n, q = rep.out_dim, rep.in_dim
    m = np.zeros((n * n, q * q), dtype=np.complex128)
    for k, ak in enumerate(rep.factors):
        for l, al in enumerate(rep.factors):
            coeff = rep.hill[k, l]
            if coeff != 0:
                m += coeff * kron(ak.conj(), al)
    return StarLinearMap(m, n, q, rep.field)


def cp_via_hill(rep: HillRep, tol: Tolerances | None = None) -> str:
    """Complete positivity verdict from the Hill matrix alone.

    PSD test of H; for a minimal representation a "yes" additionally needs H
    of full rank (positive definiteness), otherwise the verdict degrades to
    "marginal".
    """
    tol = tol or DEFAULT_TOLERANCES
    if rep.size == 0:
        return "yes"
    verdict = is_psd(rep.hill, tol)
    if rep.minimal and verdict == "yes" and rank_tol(rep.hill, tol) < rep.size:
        return "marginal"
    return verdict


# --------------------------------------------------------------------------
# Witness search: vectors making the bilinear evaluation of Ahat surjective.
# --------------------------------------------------------------------------


def _witness_ok_c1(ahat, z, r, n, tol):
    return rank_tol(ahat @ np.kron(z.reshape(-1, 1), np.eye(n)), tol) == r


def _witness_ok_c2(ahat, x, r, q, tol):
    return rank_tol(ahat @ np.kron(np.eye(q), x.reshape(-1, 1)), tol) == r


def _indicator(spec: JordanSpec, last: bool) -> np.ndarray:
    """Indicator of the first (or last usable) position of every Jordan block.

    For the 2x2-pair blocks of the real field the "last" position is the
    next-to-last row, matching the triangular Toeplitz structure of the pair
    algebra.
    """
    z = np.zeros(spec.dim, dtype=np.complex128)
    for blk in inner_blocks(spec):
        if not last:
            z[blk.offset] = 1.0
        elif blk.pair:
            z[blk.offset + blk.dim - 2] = 1.0
        else:
            z[blk.offset + blk.dim - 1] = 1.0
    return z


def _structured_candidate(spec: JordanSpec, kind: str) -> np.ndarray:
    """Closed-form witness for maps whose block span lives in the bicommutant
    algebra of the adjoint of A (lower-triangular Toeplitz in the Jordan
    basis), transported through the similarity."""
    p = spec.similarity
    if kind == "c1":
        z0 = _indicator(spec, last=False)
        v = z0 if p is None else np.linalg.solve(p.conj().T, z0)
        return v.conj()
    x0 = _indicator(spec, last=True)
    return x0 if p is None else p @ x0


def _random_candidates(rng, dim, field, trials):
    for _ in range(trials):
        if field == "real":
            yield rng.standard_normal(dim).astype(np.complex128)
        else:
            yield rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


def find_c1_witness(
    rep: HillRep,
    jordan: JordanSpec | None = None,
    trials: int = 32,
    seed: int = 0,
    tol: Tolerances | None = None,
) -> Optional[np.ndarray]:
    """Search for z with rank(Ahat @ kron(z, I_n)) == r.

    With Jordan data supplied the single structured candidate is tried (the
    first-position indicator, conjugate-transported through the similarity);
    otherwise Gaussian vectors are drawn.  Returns None when no candidate
    passes; no witness can exist when r exceeds the output dimension.
    """
    tol = tol or DEFAULT_TOLERANCES
    r, n, q = rep.size, rep.out_dim, rep.in_dim
    if r == 0:
        return np.zeros(q, dtype=np.complex128)
    if r > n:
        return None
    ahat = ahat_matrix(rep.factors, n, q)
    if jordan is not None:
        z = _structured_candidate(jordan, "c1")
        return z if _witness_ok_c1(ahat, z, r, n, tol) else None
    rng = np.random.default_rng(seed)
    for z in _random_candidates(rng, q, rep.field, trials):
        if _witness_ok_c1(ahat, z, r, n, tol):
            return z
    return None


def find_c2_witness(
    rep: HillRep,
    jordan: JordanSpec | None = None,
    trials: int = 32,
    seed: int = 0,
    tol: Tolerances | None = None,
) -> Optional[np.ndarray]:
    """Mirror of :func:`find_c1_witness` for x with rank(Ahat @ kron(I_q, x)) == r."""
    tol = tol or DEFAULT_TOLERANCES
    r, n, q = rep.size, rep.out_dim, rep.in_dim
    if r == 0:
        return np.zeros(n, dtype=np.complex128)
    if r > q:
        return None
    ahat = ahat_matrix(rep.factors, n, q)
    if jordan is not None:
        x = _structured_candidate(jordan, "c2")
        return x if _witness_ok_c2(ahat, x, r, q, tol) else None
    rng = np.random.default_rng(seed)
    for x in _random_candidates(rng, n, rep.field, trials):
        if _witness_ok_c2(ahat, x, r, q, tol):
            return x
    return None


class Certificate(NamedTuple):
    certified: bool
    kind: Optional[str]           # "c1" or "c2"
    witness: Optional[np.ndarray]


def positivity_equals_cp_certificate(
    m: StarLinearMap,
    tol: Tolerances | None = None,
    trials: int = 32,
    seed: int = 0,
) -> Certificate:
    """Try to certify that positivity and complete positivity coincide for m.

    Builds a minimal Hill representation and searches for a rank witness,
    first of the z kind, then of the x kind.  A certificate means a single
    Choi PSD test decides plain positivity of the map.  Absence of a
    certificate proves nothing (maps exist that are positive, not completely
    positive, and admit no witness).
    """
    tol = tol or DEFAULT_TOLERANCES
    rep = minimal_hill_from_blocks(m, tol)
    z = find_c1_witness(rep, trials=trials, seed=seed, tol=tol)
    if z is not None:
        return Certificate(True, "c1", z)
    x = find_c2_witness(rep, trials=trials, seed=seed, tol=tol)
    if x is not None:
        return Certificate(True, "c2", x)
    return Certificate(False, None, None)
