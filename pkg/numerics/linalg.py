"""Dense Hermitian eigendecomposition with deterministic output.

LAPACK (via scipy) does the tridiagonalization and implicit-shift QL/QR
iteration. On top of it this module fixes the gauge so identical input always
yields identical vectors: degenerate subspaces are re-orthonormalized in index
order and every vector's dominant component is made real positive.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from numerics.errors import ValidationError

logger = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-12
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class HermitianMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValidationError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValidationError("matrix has non-finite entries")
        asym = np.max(np.abs(a - a.conj().T))
        if asym > HERMITICITY_TOL:
            raise ValidationError(f"matrix is not Hermitian: max |A - A^H| = {asym:.3e}")
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def is_real(self):
        return not np.iscomplexobj(self.entries) or not np.any(self.entries.imag)


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray  # columns

    def reconstruct(self):
        v = self.vectors
        return (v * self.values) @ v.conj().T

    def residuals(self, matrix):
        a = matrix.entries if isinstance(matrix, HermitianMatrix) else np.asarray(matrix)
        r = a @ self.vectors - self.vectors * self.values
        return np.linalg.norm(r, axis=0)

    def overlap_error(self):
        gram = self.vectors.conj().T @ self.vectors
        return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


def _fix_phase(vectors):
    """Rotate each column so its first largest-magnitude entry is real positive."""
    idx = np.argmax(np.abs(vectors) > (1 - 1e-9) * np.max(np.abs(vectors), axis=0), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)


def _canonical_subspace(block):
    """Orthonormal basis of span(block) built from unit vectors in index order."""
    k = block.shape[1]
    projector = block @ block.conj().T
    basis = []
    for j in range(projector.shape[0]):
        v = projector[:, j].copy()
        for b in basis:
            v -= b * (b.conj() @ v)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis.append(v / norm)
        if len(basis) == k:
            break
    return np.column_stack(basis)


def eigh(matrix, count=None):
    """Eigenpairs of a Hermitian matrix, ascending.

    count: keep only the lowest `count` pairs (full decomposition if None).
    """
    if not isinstance(matrix, HermitianMatrix):
        matrix = HermitianMatrix(matrix)
    a = matrix.entries
    if matrix.is_real:
        a = a.real

    kwargs = {}
    if count is not None:
        if not 0 < count <= matrix.dim:
            raise ValidationError(f"cannot take {count} eigenpairs of a {matrix.dim}x{matrix.dim} matrix")
        kwargs["subset_by_index"] = [0, count - 1]
    values, vectors = scipy.linalg.eigh(a, **kwargs)

    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    start = 0
    while start < len(values):
        stop = start + 1
        while stop < len(values) and values[stop] - values[start] <= DEGENERACY_TOL * scale:
            stop += 1
        if stop - start > 1:
            logger.debug("degenerate cluster of size %d at %.6g", stop - start, values[start])
            vectors[:, start:stop] = _canonical_subspace(vectors[:, start:stop])
            values[start:stop] = np.mean(values[start:stop])
        start = stop

    vectors = _fix_phase(vectors)
    if not np.iscomplexobj(a):
        vectors = vectors.real
    values.flags.writeable = False
    vectors.flags.writeable = False
    return EigenDecomposition(values=values, vectors=vectors)
