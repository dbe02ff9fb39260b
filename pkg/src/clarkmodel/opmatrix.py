"""Matrices between declared orthonormal bases."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg

#: matrices with both sides above this use an iterative top singular value
DENSE_SVD_LIMIT = 256


@dataclass(frozen=True)
class OperatorMatrix:
    """Complex matrix tagged with labels for its source and target bases.

    Parameters
    ----------
    entries : ndarray, shape (rows, cols)
        Matrix in the declared bases.
    source_basis_id, target_basis_id : str
        Opaque labels, e.g. ``"L2(mu)"`` or ``"K_theta/TM"``.
    """

    entries: np.ndarray
    source_basis_id: str
    target_basis_id: str

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex, copy=True)
        if a.ndim != 2:
            raise ValueError("operator matrix must be 2-d")
        if not np.all(np.isfinite(a)):
            raise ValueError("operator matrix has non-finite entries")
        if not self.source_basis_id or not self.target_basis_id:
            raise ValueError("basis labels are required")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def H(self) -> "OperatorMatrix":
        """Adjoint, with source and target swapped."""
        return OperatorMatrix(self.entries.conj().T, self.target_basis_id, self.source_basis_id)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            if other.target_basis_id != self.source_basis_id:
                raise ValueError(
                    "basis mismatch: %s vs %s" % (other.target_basis_id, self.source_basis_id)
                )
            return OperatorMatrix(self.entries @ other.entries, other.source_basis_id, self.target_basis_id)
        return self.entries @ np.asarray(other)


def operator_norm(m) -> float:
    """Largest singular value (dense SVD, Lanczos for large matrices)."""
    a = m.entries if isinstance(m, OperatorMatrix) else np.asarray(m)
    if a.size == 0:
        return 0.0
    if min(a.shape) > DENSE_SVD_LIMIT:
        s = scipy.sparse.linalg.svds(a, k=1, return_singular_vectors=False, tol=1e-12, random_state=0)
        return float(s[0])
    return float(np.linalg.svd(a, compute_uv=False)[0])


def unitarity_residual(a) -> float:
    """``max(||A^H A - I||_F, ||A A^H - I||_F)``."""
    a = a.entries if isinstance(a, OperatorMatrix) else np.asarray(a)
    r, c = a.shape
    e1 = np.linalg.norm(a.conj().T @ a - np.eye(c))
    e2 = np.linalg.norm(a @ a.conj().T - np.eye(r))
    return float(max(e1, e2))
