"""Dense complex matrix arithmetic and the spectral decompositions behind every bound.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. :func:`as_matrix`
is the single validating entry point; everything else accepts array-likes and
funnels them through it.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .config import DEFAULT, Tolerances


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class DomainError(ValueError):
    """Input lies outside the domain of the operation (e.g. not Hermitian)."""


class NotPSDError(DomainError):
    def __init__(self, eigenvalue: float, threshold: float):
        self.eigenvalue = eigenvalue
        self.threshold = threshold
        super().__init__(
            f"matrix is not positive semidefinite: eigenvalue {eigenvalue!r} < -{threshold!r}"
        )


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # unitary, columns are eigenvectors


class SvdParts(NamedTuple):
    U: np.ndarray
    singular_values: np.ndarray  # descending, nonnegative
    V: np.ndarray  # T = U @ diag(s) @ V^*


class PolarParts(NamedTuple):
    V: np.ndarray  # partial isometry
    absT: np.ndarray  # |T| = (T^* T)^{1/2}
    rank_cutoff: float


def as_matrix(a) -> np.ndarray:
    """Validate ``a`` as a finite 2-D complex matrix and return a complex128 copy."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    return m


def _square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def multiply(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T.copy()


def op_norm(t) -> float:
    """Operator norm: the largest singular value (0 for the zero matrix)."""
    t = as_matrix(t)
    return float(np.linalg.svd(t, compute_uv=False)[0])


def _hermitian_part(a, tol: Tolerances) -> np.ndarray:
    a = _square(a)
    asym = op_norm(a - a.conj().T)
    limit = tol.hermitian * (1.0 + op_norm(a))
    if asym > limit:
        raise DomainError(f"matrix is not Hermitian: ||A - A*|| = {asym!r} > {limit!r}")
    return (a + a.conj().T) / 2


def hermitian_eig(a, tol: Tolerances = DEFAULT) -> HermitianEig:
    h = _hermitian_part(a, tol)
    w, q = np.linalg.eigh(h)
    return HermitianEig(w, q)


def svd(t) -> SvdParts:
    t = as_matrix(t)
    u, s, vh = np.linalg.svd(t)
    return SvdParts(u, s, vh.conj().T)


def spectral_radius(a) -> float:
    a = _square(a)
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def psd_sqrt(a, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Positive square root of a PSD matrix.

    Eigenvalues in ``[-tol.psd * (1 + ||A||), 0)`` are clamped to zero; anything
    more negative raises :class:`NotPSDError`.
    """
    w, q = hermitian_eig(a, tol)
    threshold = tol.psd * (1.0 + float(np.max(np.abs(w))))
    if w[0] < -threshold:
        raise NotPSDError(float(w[0]), threshold)
    root = np.sqrt(np.clip(w, 0.0, None))
    return (q * root) @ q.conj().T


def is_psd(a, tol: Tolerances = DEFAULT) -> bool:
    try:
        w, _ = hermitian_eig(a, tol)
    except DomainError:
        return False
    return bool(w[0] >= -tol.psd * (1.0 + float(np.max(np.abs(w)))))


def abs_value(t) -> np.ndarray:
    """``|T| = (T^* T)^{1/2}``.

    Formed from the SVD ``T = U S W^*`` as ``W S W^*``, which equals
    ``psd_sqrt(T^* T)`` but avoids squaring the condition number.
    """
    t = as_matrix(t)
    _, s, vh = np.linalg.svd(t, full_matrices=False)
    w = vh.conj().T
    out = (w * s) @ vh
    return (out + out.conj().T) / 2


def abs_values(stack) -> np.ndarray:
    """:func:`abs_value` over a stack of matrices with shape ``(k, m, n)``."""
    stack = np.asarray(stack, dtype=np.complex128)
    _, s, vh = np.linalg.svd(stack, full_matrices=False)
    out = (vh.conj().transpose(0, 2, 1) * s[:, None, :]) @ vh
    return (out + out.conj().transpose(0, 2, 1)) / 2


def polar(t, tol: Tolerances = DEFAULT) -> PolarParts:
    """Polar decomposition ``T = V |T|`` with ``V`` a partial isometry.

    Singular values below ``tol.polar_rank * sigma_max`` are treated as zero, so
    ``V`` vanishes on the (numerical) kernel of ``T``.
    """
    t = as_matrix(t)
    u, s, vh = np.linalg.svd(t, full_matrices=False)
    cutoff = tol.polar_rank * (float(s[0]) if s.size else 0.0)
    keep = s > cutoff
    v = u[:, keep] @ vh[keep, :]
    abst = (vh.conj().T * s) @ vh
    abst = (abst + abst.conj().T) / 2
    return PolarParts(v, abst, cutoff)
