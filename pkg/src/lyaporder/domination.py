"""Deciding Lyapunov (and Stein) domination for B in the bicommutant of A.

B Lyapunov dominates A when every Hermitian H with H A + A* H PSD also has
H B + B* H PSD.  For Lyapunov-regular A and B in the bicommutant of A this
reduces to a single PSD test: the composite map

    W  |->  lyap_B( lyap_A^{-1}(W) ),      lyap_Y(X) = X Y + Y* X,

is positive exactly when it is completely positive, i.e. when its Choi
matrix is PSD.  The same verdict is carried by a much smaller matrix, the
Hill-Pick matrix: the Hill coefficient matrix of the composite map for the
canonical block selection that walks down the first block column of each
eigenvalue's leading Jordan block.  For diagonal A it is the classical Pick
matrix with entries (conj(t_i) + t_j) / (conj(lam_i) + lam_j).

Three independent routes are provided and cross-validated: the closed-form
coefficient pipeline (complex field), the Choi PSD test, and a randomized
sampling oracle that draws Lyapunov solutions of A and checks them against
B directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from math import comb
from typing import Optional

import numpy as np
from scipy.linalg import block_diag, lu_factor, lu_solve

from .jordan import (
    BicommElement,
    JordanSpec,
    build_A,
    build_bicomm_element,
    build_bicomm_jordan,
    build_JA,
    eigenvalue_list,
    is_lyapunov_regular,
    validate_bicomm_element,
)
from .linalg import (
    DEFAULT_TOLERANCES,
    Tolerances,
    as_matrix,
    kron,
    psd_report,
    unvec,
    vec,
)
from .starmaps import StarLinearMap, choi_matrix

__all__ = [
    "LyapunovProblem",
    "HillPickMatrix",
    "DominationReport",
    "lyapunov_matricization",
    "lyapunov_order_map",
    "closed_form_matricization",
    "hill_pick_coeff",
    "upsilon_selection",
    "hill_pick_matrix",
    "hill_pick_matrix_real",
    "check_domination",
    "sample_lyapunov_solutions",
    "domination_oracle",
    "is_stein_regular",
    "stein_matricization",
    "stein_order_map",
    "stein_domination",
]

_VERDICT = {"yes": "dominates", "no": "not_dominates", "marginal": "marginal"}


@dataclass(eq=False)
class LyapunovProblem:
    """A Lyapunov-regular A given by Jordan data plus bicommutant data for B."""

    spec: JordanSpec
    element: BicommElement
    tol: Tolerances = dataclass_field(default_factory=lambda: DEFAULT_TOLERANCES)

    def __post_init__(self):
        validate_bicomm_element(self.spec, self.element)
        if not is_lyapunov_regular(self.spec, self.tol):
            raise ValueError(
                "not Lyapunov regular: some pair of eigenvalues satisfies "
                "lam_i + conj(lam_j) == 0"
            )


@dataclass(eq=False)
class HillPickMatrix:
    """The w x w Hill-Pick matrix with its block selection bookkeeping.

    upsilon lists the selected (row, col) block positions of the composite
    matricization in the Jordan basis (0-based, n x n blocking); offsets give
    the starting row of each eigenvalue's slice of the matrix.
    """

    matrix: np.ndarray
    upsilon: tuple[tuple[int, int], ...]
    block_offsets: tuple[int, ...]
    field: str

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(eq=False)
class DominationReport:
    """Everything the order decision produced, all routes included.

    verdict is derived from the Hill-Pick minimum eigenvalue (Choi for the
    Stein order, where no closed-form Hill-Pick matrix is built); marginal
    means that eigenvalue sits inside the psd_rel band around zero.
    """

    verdict: str
    hill_pick_min_eig: Optional[float]
    choi_min_eig: float
    oracle_status: str
    oracle_witness: Optional[np.ndarray]
    methods_agree: bool
    hill_pick: Optional[HillPickMatrix]
    oracle_trials: int
    seed: int


def lyapunov_matricization(a, field: str = "complex") -> StarLinearMap:
    """Matricization A.T (x) I + I (x) A* of the map X -> X A + A* X."""
    am = as_matrix(a)
    n = am.shape[0]
    if am.shape != (n, n):
        raise ValueError("A must be square")
    eye = np.eye(n, dtype=np.complex128)
    return StarLinearMap(kron(am.T, eye) + kron(eye, am.conj().T), n, n, field)


def lyapunov_order_map(prob: LyapunovProblem) -> StarLinearMap:
    """The composite map lyap_B o lyap_A^{-1} built from the problem data."""
    a = build_A(prob.spec)
    b = build_bicomm_element(prob.spec, prob.element)
    la = lyapunov_matricization(a, prob.spec.field).matrix
    lb = lyapunov_matricization(b, prob.spec.field).matrix
    n = prob.spec.dim
    # lb @ inv(la); la is invertible because the problem is Lyapunov regular.
    composite = np.linalg.solve(la.T, lb.T).T
    return StarLinearMap(composite, n, n, prob.spec.field)


def hill_pick_coeff(
    prob: LyapunovProblem, eigen_j: int, shift_i: int, eigen_a: int, shift_c: int
) -> complex:
    """Closed-form coefficient of the composite map's Toeplitz expansion.

    This is the scalar weight of the shift_c-th subdiagonal of the blocks of
    eigenvalue eigen_a inside the shift_i-th coefficient matrix of eigenvalue
    eigen_j; the Hill-Pick matrix is assembled from these numbers.  Complex
    field only.
    """
    if prob.spec.field != "complex":
        raise ValueError("closed-form coefficients are available for the complex field only")
    eigens = prob.spec.eigens
    lam_j = eigens[eigen_j].eigenvalue
    lam_a = eigens[eigen_a].eigenvalue
    t_j = prob.element.coeffs[eigen_j]
    t_a = prob.element.coeffs[eigen_a]
    if not 0 <= shift_i < eigens[eigen_j].sizes[0]:
        raise ValueError(f"shift_i out of range for eigenvalue {eigen_j}")
    if not 0 <= shift_c < eigens[eigen_a].sizes[0]:
        raise ValueError(f"shift_c out of range for eigenvalue {eigen_a}")
    denom = lam_j + lam_a.conjugate()
    total = 0.0 + 0.0j
    for d in range(shift_c + 1):
        total += (
            comb(d + shift_i, d)
            * (-1) ** (d + shift_i)
            * t_a[shift_c - d].conjugate()
            / denom ** (d + shift_i + 1)
        )
    for l in range(shift_i + 1):
        total += (
            comb(shift_c + shift_i - l, shift_c)
            * (-1) ** (shift_i - l + shift_c)
            * t_j[l]
            / denom ** (shift_c + shift_i - l + 1)
        )
    return total


def _coefficient_block(prob: LyapunovProblem, eigen_j: int, shift_i: int) -> np.ndarray:
    """Block-diagonal coefficient matrix multiplying the shift of eigen_j's blocks."""
    parts = []
    for a, e in enumerate(prob.spec.eigens):
        for s in e.sizes:
            t = np.zeros((s, s), dtype=np.complex128)
            for c in range(s):
                t += hill_pick_coeff(prob, eigen_j, shift_i, a, c) * np.eye(s, k=-c)
            parts.append(t)
    return block_diag(*parts).astype(np.complex128)


def closed_form_matricization(prob: LyapunovProblem) -> np.ndarray:
    """Matricization of the composite map assembled from closed-form coefficients.

    Built block by block from the Jordan structure (no matrix inversion) and
    conjugated back through the similarity; must agree with
    :func:`lyapunov_order_map` to working precision, which is the package's
    central cross-validation.  Complex field only.
    """
    spec = prob.spec
    if spec.field != "complex":
        raise ValueError("the closed-form pipeline covers the complex field only")
    coeff_blocks = {
        (j, i): _coefficient_block(prob, j, i)
        for j, e in enumerate(spec.eigens)
        for i in range(e.sizes[0])
    }
    parts = []
    for j, e in enumerate(spec.eigens):
        for s in e.sizes:
            r = np.zeros((s * spec.dim, s * spec.dim), dtype=np.complex128)
            for i in range(s):
                r += np.kron(np.eye(s, k=-i), coeff_blocks[j, i])
            parts.append(r)
    jordan_side = block_diag(*parts).astype(np.complex128)
    p = spec.similarity
    if p is None:
        return jordan_side
    q = kron(p.T, p.conj().T)
    return np.linalg.solve(q, jordan_side @ q)


def upsilon_selection(spec: JordanSpec) -> tuple[tuple[int, int], ...]:
    """Canonical block selection: first block column of each eigenvalue's leading block.

    Positions index the n x n blocking of the composite matricization in the
    Jordan basis, 0-based.  Per eigenvalue the selection has one entry per
    coefficient slot: the leading Jordan block size, doubled for the 2x2-pair
    eigenvalues of the real field.
    """
    sel: list[tuple[int, int]] = []
    off = 0
    for e in spec.eigens:
        pair = spec.field == "real" and e.eigenvalue.imag > 0
        lead = (2 if pair else 1) * e.sizes[0]
        total = (2 if pair else 1) * sum(e.sizes)
        sel.extend((off + a, off) for a in range(lead))
        off += total
    return tuple(sel)


def _selection_offsets(spec: JordanSpec) -> tuple[int, ...]:
    offsets = []
    acc = 0
    for e in spec.eigens:
        offsets.append(acc)
        pair = spec.field == "real" and e.eigenvalue.imag > 0
        acc += (2 if pair else 1) * e.sizes[0]
    return tuple(offsets)


def _extract_hill_at(l_big: np.ndarray, n: int, selection) -> np.ndarray:
    """Hill matrix read off a matricization at a pinned block selection.

    Entry (k, l) is the value of the block at selection[l] taken at the
    in-block position given by selection[k].
    """
    w = len(selection)
    h = np.zeros((w, w), dtype=np.complex128)
    for k, (rk, ck) in enumerate(selection):
        for l, (rl, cl) in enumerate(selection):
            h[k, l] = l_big[rl * n + rk, cl * n + ck]
    return h


def hill_pick_matrix(prob: LyapunovProblem) -> HillPickMatrix:
    """The Hill-Pick matrix over the complex field, from closed-form coefficients.

    Block (i, j) has entries f[j, b | i, a] = hill_pick_coeff(j, b, i, a) for
    a, b ranging over the leading block sizes; positive semidefiniteness of
    the result is equivalent to B Lyapunov dominating A.
    """
    spec = prob.spec
    if spec.field != "complex":
        raise ValueError("use hill_pick_matrix_real for real-field problems")
    leads = [e.sizes[0] for e in spec.eigens]
    offsets = _selection_offsets(spec)
    w = sum(leads)
    h = np.zeros((w, w), dtype=np.complex128)
    for i, li in enumerate(leads):
        for j, lj in enumerate(leads):
            for a in range(li):
                for b in range(lj):
                    h[offsets[i] + a, offsets[j] + b] = hill_pick_coeff(prob, j, b, i, a)
    return HillPickMatrix(h, upsilon_selection(spec), offsets, "complex")


def hill_pick_matrix_real(prob: LyapunovProblem) -> HillPickMatrix:
    """The Hill-Pick matrix over the real field, by numeric block extraction.

    Computes the composite matricization in the Jordan basis and reads the
    pinned Hill matrix at the canonical selection; PSD is again equivalent
    to domination.
    """
    spec = prob.spec
    if spec.field != "real":
        raise ValueError("use hill_pick_matrix for complex-field problems")
    ja = build_JA(spec)
    bt = build_bicomm_jordan(spec, prob.element)
    la = lyapunov_matricization(ja, "real").matrix
    lb = lyapunov_matricization(bt, "real").matrix
    composite = np.linalg.solve(la.T, lb.T).T
    sel = upsilon_selection(spec)
    h = _extract_hill_at(composite, spec.dim, sel)
    return HillPickMatrix(h.real.astype(np.complex128), sel, _selection_offsets(spec), "real")


def _random_psd(rng: np.random.Generator, n: int, field: str) -> np.ndarray:
    g = rng.standard_normal((n, n))
    if field == "complex":
        g = g + 1j * rng.standard_normal((n, n))
    g = g.astype(np.complex128)
    return g @ g.conj().T


def sample_lyapunov_solutions(
    a,
    count: int = 1,
    seed: int = 0,
    tol: Tolerances | None = None,
    field: str = "complex",
) -> list[np.ndarray]:
    """Draw Hermitian H with H A + A* H PSD, by pulling random PSD targets back.

    Samples W = G G* with Gaussian G and solves the Lyapunov equation
    H A + A* H = W; every returned H is symmetrized.  A must be Lyapunov
    regular (the map is inverted directly).
    """
    am = as_matrix(a)
    n = am.shape[0]
    la = lyapunov_matricization(am, field).matrix
    factored = lu_factor(la)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(int(count)):
        w = _random_psd(rng, n, field)
        h = unvec(lu_solve(factored, vec(w)), n, n)
        out.append((h + h.conj().T) / 2.0)
    return out


def domination_oracle(
    prob: LyapunovProblem, trials: int = 1000, seed: int = 0
) -> tuple[str, Optional[np.ndarray]]:
    """Brute-force check of the order on sampled Lyapunov solutions of A.

    Each trial draws H with H A + A* H PSD by construction and tests whether
    H B + B* H fails the PSD test outright ("no", beyond the tolerance
    band).  Returns ("violation", H) at the first failure, otherwise
    ("consistent", None); consistency is evidence, not proof.
    """
    spec = prob.spec
    a = build_A(spec)
    b = build_bicomm_element(spec, prob.element)
    n = spec.dim
    la = lyapunov_matricization(a, spec.field).matrix
    factored = lu_factor(la)
    rng = np.random.default_rng(seed)
    for _ in range(int(trials)):
        w = _random_psd(rng, n, spec.field)
        h = unvec(lu_solve(factored, vec(w)), n, n)
        h = (h + h.conj().T) / 2.0
        verdict, _ = psd_report(h @ b + b.conj().T @ h, prob.tol)
        if verdict == "no":
            return "violation", h
    return "consistent", None


def check_domination(
    prob: LyapunovProblem, oracle_trials: int = 1000, seed: int = 0
) -> DominationReport:
    """Run all three routes and report the verdict with agreement data.

    The verdict comes from the Hill-Pick matrix; the Choi PSD test of the
    composite map is recorded alongside, and the two agree on every
    non-marginal problem (a disagreement indicates a bug, not a borderline
    instance).  The sampling oracle provides an independent witness when
    domination fails.
    """
    tol = prob.tol
    if prob.spec.field == "complex":
        hp = hill_pick_matrix(prob)
    else:
        hp = hill_pick_matrix_real(prob)
    hp_verdict, hp_eig = psd_report(hp.matrix, tol)
    composite = lyapunov_order_map(prob)
    choi_verdict, choi_eig = psd_report(choi_matrix(composite), tol)
    status, witness = domination_oracle(prob, oracle_trials, seed)
    agree = hp_verdict == choi_verdict or "marginal" in (hp_verdict, choi_verdict)
    return DominationReport(
        verdict=_VERDICT[hp_verdict],
        hill_pick_min_eig=hp_eig,
        choi_min_eig=choi_eig,
        oracle_status=status,
        oracle_witness=witness,
        methods_agree=agree,
        hill_pick=hp,
        oracle_trials=int(oracle_trials),
        seed=int(seed),
    )


# --------------------------------------------------------------------------
# Stein order: the disk analogue, H - A H A* in place of H A + A* H.
# --------------------------------------------------------------------------


def is_stein_regular(spec: JordanSpec, tol: Tolerances | None = None) -> bool:
    """True when lam_i * conj(lam_j) != 1 for all eigenvalue pairs.

    Exactly the invertibility condition of I - conj(A) (x) A, whose
    eigenvalues are 1 - conj(lam_i) lam_j.
    """
    tol = tol or DEFAULT_TOLERANCES
    vals = eigenvalue_list(spec)
    for a in vals:
        for b in vals:
            if abs(a * b.conjugate() - 1.0) <= tol.eq_rel * (1.0 + abs(a) * abs(b)):
                return False
    return True


def stein_matricization(a, field: str = "complex") -> StarLinearMap:
    """Matricization I - conj(A) (x) A of the map X -> X - A X A*."""
    am = as_matrix(a)
    n = am.shape[0]
    if am.shape != (n, n):
        raise ValueError("A must be square")
    return StarLinearMap(np.eye(n * n, dtype=np.complex128) - kron(am.conj(), am), n, n, field)


def stein_order_map(prob: LyapunovProblem) -> StarLinearMap:
    """The composite Stein map stein_B o stein_A^{-1}."""
    spec = prob.spec
    if not is_stein_regular(spec, prob.tol):
        raise ValueError(
            "not Stein regular: some pair of eigenvalues satisfies lam_i * conj(lam_j) == 1"
        )
    a = build_A(spec)
    b = build_bicomm_element(spec, prob.element)
    la = stein_matricization(a, spec.field).matrix
    lb = stein_matricization(b, spec.field).matrix
    composite = np.linalg.solve(la.T, lb.T).T
    return StarLinearMap(composite, spec.dim, spec.dim, spec.field)


def stein_domination(
    prob: LyapunovProblem, oracle_trials: int = 1000, seed: int = 0
) -> DominationReport:
    """Stein-order analogue of :func:`check_domination`.

    The verdict is the Choi PSD test of the composite Stein map (no
    closed-form Hill-Pick matrix is assembled for this order); the sampling
    oracle draws H with H - A H A* PSD and tests H - B H B*.
    """
    spec = prob.spec
    tol = prob.tol
    composite = stein_order_map(prob)
    choi_verdict, choi_eig = psd_report(choi_matrix(composite), tol)
    a = build_A(spec)
    b = build_bicomm_element(spec, prob.element)
    n = spec.dim
    factored = lu_factor(stein_matricization(a, spec.field).matrix)
    rng = np.random.default_rng(seed)
    status, witness = "consistent", None
    for _ in range(int(oracle_trials)):
        w = _random_psd(rng, n, spec.field)
        h = unvec(lu_solve(factored, vec(w)), n, n)
        h = (h + h.conj().T) / 2.0
        verdict, _ = psd_report(h - b @ h @ b.conj().T, tol)
        if verdict == "no":
            status, witness = "violation", h
            break
    agree = status == "consistent" or choi_verdict != "yes"
    return DominationReport(
        verdict=_VERDICT[choi_verdict],
        hill_pick_min_eig=None,
        choi_min_eig=choi_eig,
        oracle_status=status,
        oracle_witness=witness,
        methods_agree=agree,
        hill_pick=None,
        oracle_trials=int(oracle_trials),
        seed=int(seed),
    )
