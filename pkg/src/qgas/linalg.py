"""Small dense complex matrix algebra for desk-scale Hilbert spaces (dim <= 8).

Everything works on plain numpy complex arrays.  The Hermitian eigensolver is
a cyclic Jacobi iteration written out here instead of delegated to LAPACK so
that its sweep order, degeneracy tie-break, and eigenvector phase convention
are fixed by this module and reproducible across platforms.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, DomainError, NotHermitianError

MAX_DIM = 8

# off-diagonal magnitude at which a Jacobi sweep is considered converged
_JACOBI_TOL = 1e-13
_MAX_SWEEPS = 100

# magnitude threshold used to locate the leading component of an eigenvector
_PHASE_TOL = 1e-10

# eigenvalues closer than this are treated as degenerate when ordering
_TIE_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    """Coerce m to a square complex array, enforcing the 1..8 dimension bound."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not 1 <= a.shape[0] <= MAX_DIM:
        raise DimensionError(f"dimension {a.shape[0]} outside 1..{MAX_DIM}")
    return a


def as_ket(v) -> np.ndarray:
    """Coerce v to a unit vector: normalization is applied, then checked."""
    k = np.asarray(v, dtype=complex).reshape(-1)
    if not 1 <= k.size <= MAX_DIM:
        raise DimensionError(f"ket length {k.size} outside 1..{MAX_DIM}")
    norm = float(np.linalg.norm(k))
    if norm < 1e-12:
        raise DomainError("cannot normalize a zero ket")
    k = k / norm
    if abs(float(np.linalg.norm(k)) - 1.0) > 1e-12:
        raise DomainError("ket normalization failed")
    return k


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


def trace_product(a, b) -> complex:
    """tr(a b).  Cyclic, so symmetric in its two arguments."""
    a = as_matrix(a)
    b = as_matrix(b)
    _same_dim(a, b)
    return complex(np.trace(a @ b))


def conjugate(a, rho) -> np.ndarray:
    """The unnormalized outcome update a rho a^dagger."""
    a = as_matrix(a)
    rho = as_matrix(rho)
    _same_dim(a, rho)
    return a @ rho @ a.conj().T


def projector(ket) -> np.ndarray:
    """Rank-one projector |k><k| onto a (normalized) ket."""
    k = as_ket(ket)
    return np.outer(k, k.conj())


def hermiticity_defect(m) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m, tol: float = 1e-12) -> bool:
    return hermiticity_defect(m) <= tol


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate v so its first component with magnitude > 1e-10 is real positive."""
    for x in v:
        if abs(x) > _PHASE_TOL:
            return v * (x.conjugate() / abs(x))
    return v


def _vector_key(v: np.ndarray):
    return tuple((float(x.real), float(x.imag)) for x in v)


def hermitian_eig(m, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns (w, v): eigenvalues w sorted descending, eigenvectors as the
    columns v[:, i].  Output is deterministic for identical input: the sweep
    order is fixed, eigenvalues equal within 1e-10 are ordered by descending
    lexicographic (real, imag) component sequence of their eigenvectors, and
    each eigenvector is phased so its first component of magnitude > 1e-10
    is real positive.

    Raises NotHermitianError when m is not Hermitian within tol.
    """
    a = as_matrix(m)
    if hermiticity_defect(a) > tol:
        raise NotHermitianError(
            f"matrix is not Hermitian within {tol:g} "
            f"(defect {hermiticity_defect(a):.3g})"
        )
    n = a.shape[0]
    A = (a + a.conj().T) / 2.0
    V = np.eye(n, dtype=complex)

    for _ in range(_MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            off = max(off, float(np.max(np.abs(A[p, p + 1:]))))
        if off < _JACOBI_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r <= _JACOBI_TOL:
                    continue
                phase = apq / r
                # diagonalize the 2x2 block [[app, r], [r, aqq]] after the
                # phase transform diag(1, conj(phase))
                theta = (A[q, q].real - A[p, p].real) / (2.0 * r)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = -math.copysign(1.0, theta) / (
                        abs(theta) + math.hypot(1.0, theta)
                    )
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                u = np.array(
                    [[c, -s], [s * phase.conjugate(), c * phase.conjugate()]],
                    dtype=complex,
                )
                A[:, [p, q]] = A[:, [p, q]] @ u
                A[[p, q], :] = u.conj().T @ A[[p, q], :]
                V[:, [p, q]] = V[:, [p, q]] @ u
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    else:
        raise ArithmeticError("jacobi iteration failed to converge")

    w = np.real(np.diag(A)).copy()
    vecs = [_fix_phase(V[:, i].copy()) for i in range(n)]

    order = sorted(range(n), key=lambda i: (-w[i], i))
    # break degeneracies by the eigenvectors' lexicographic component order
    final: list[int] = []
    g = 0
    while g < n:
        h = g
        while h + 1 < n and abs(w[order[h + 1]] - w[order[g]]) <= _TIE_TOL:
            h += 1
        group = sorted(order[g:h + 1], key=lambda i: _vector_key(vecs[i]), reverse=True)
        final.extend(group)
        g = h + 1

    w_out = np.array([w[i] for i in final])
    v_out = np.column_stack([vecs[i] for i in final])
    return w_out, v_out
