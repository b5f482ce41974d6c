"""Block multilinear maps: n-by-n grids of k-linear maps acting on M_n(A)^k.

A block map [phi_ij] sends a k-tuple of n-by-n matrices over the algebra to
the (n*h)-by-(n*h) matrix whose (i, j) block is the chained sum

    sum over r_1..r_{k-1} of phi_ij(x_{1,i r_1}, x_{2,r_1 r_2}, ..., x_{k,r_{k-1} j}).

Viewing M_n(A) as a C*-algebra in its own right, that action is a plain
multilinear map over M_n(A); ``induced_map`` materializes it, and block
amplification / block invariance reduce to the corresponding operations on
the induced map.  The grid itself is kept because several structural checks
(entrywise invariance, the Gram kernel) act entry by entry.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import Amplification, MatrixOverAlgebra, amplified_algebra
from .errors import AlgebraMismatchError, ArityError
from .multimap import MultilinearMap, _amplified_unit_index, amplified_evaluate


class BlockMultilinearMap:
    """An n-by-n grid of multilinear maps sharing (algebra, k, h)."""

    def __init__(self, entries: Sequence[Sequence[MultilinearMap]]):
        n = len(entries)
        if n < 1 or any(len(row) != n for row in entries):
            raise ValueError("entries must form a square grid")
        first = entries[0][0]
        for row in entries:
            for phi in row:
                if (phi.algebra, phi.k, phi.h) != (first.algebra, first.k, first.h):
                    raise AlgebraMismatchError("grid entries must share (algebra, k, h)")
        self.entries = tuple(tuple(row) for row in entries)
        self.n = n
        self.algebra = first.algebra
        self.k = first.k
        self.h = first.h
        self._induced: MultilinearMap | None = None
        self._amp: Amplification | None = None

    @classmethod
    def from_single(cls, phi: MultilinearMap) -> "BlockMultilinearMap":
        return cls([[phi]])

    @classmethod
    def constant_grid(cls, phi: MultilinearMap, n: int) -> "BlockMultilinearMap":
        return cls([[phi] * n for _ in range(n)])

    @property
    def m(self) -> int:
        return self.entries[0][0].m

    @property
    def amplification(self) -> Amplification:
        """The algebra M_n(A) that block arguments live in."""
        if self._amp is None:
            self._amp = amplified_algebra(self.algebra, self.n)
        return self._amp

    def coefficient_scale(self) -> float:
        return max(phi.coefficient_scale() for row in self.entries for phi in row)

    def stacked_coeffs(self) -> np.ndarray:
        """Grid assembled as one tensor of shape (d,)*k + (n*h, n*h):
        entry (i*h+u, j*h+v) of slice [p...] is phi_ij coefficient (u, v)."""
        d, k, h, n = self.algebra.dim, self.k, self.h, self.n
        out = np.zeros((d,) * k + (n * h, n * h), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                out[..., i * h : (i + 1) * h, j * h : (j + 1) * h] = self.entries[i][j].coeffs
        return out

    # -- evaluation -------------------------------------------------------

    def block_evaluate(self, mats: Sequence[MatrixOverAlgebra]) -> np.ndarray:
        """Apply the block formula to n-by-n matrices over the algebra."""
        if len(mats) != self.k:
            raise ArityError(f"expected {self.k} arguments, got {len(mats)}")
        for x in mats:
            if x.algebra != self.algebra or x.t != self.n:
                raise AlgebraMismatchError("argument is not an n-matrix over the shared algebra")
        if self.n == 1:
            return self.entries[0][0].evaluate([x.entry(0, 0) for x in mats])
        d, h, k, n = self.algebra.dim, self.h, self.k, self.n
        chain = mats[0].coords_pij()
        for x in mats[1:]:
            chain = np.einsum("pij,qjl->pqil", chain, x.coords_pij()).reshape(-1, n, n)
        grid = np.stack(
            [np.stack([phi.coeffs.reshape(d**k, h, h) for phi in row]) for row in self.entries]
        )  # (n, n, d^k, h, h)
        value = np.einsum("pij,ijpuv->iujv", chain, grid, optimize=True)
        return value.reshape(n * h, n * h)

    def unit_value(self) -> np.ndarray:
        one = MatrixOverAlgebra.identity(self.algebra, self.n)
        return self.block_evaluate([one] * self.k)

    # -- the induced map over M_n(A) ---------------------------------------

    def induced_map(self) -> MultilinearMap:
        """The same action expressed as a multilinear map over M_n(A).

        Coefficients over the matrix-unit basis of M_n(A) have a single
        nonzero (h, h) block per chained assignment, located at block
        position (row of the first unit, column of the last unit).
        """
        if self._induced is not None:
            return self._induced
        amp = self.amplification
        d, k, h, n = self.algebra.dim, self.k, self.h, self.n
        big_dim = amp.algebra.dim
        out = np.zeros((big_dim,) * k + (n * h, n * h), dtype=np.complex128)
        unit_index = _amplified_unit_index(self.algebra, amp)
        for base_tuple in np.ndindex(*(d,) * k):
            for chain in np.ndindex(*(n,) * (k + 1)):
                i, j = chain[0], chain[-1]
                block = self.entries[i][j].coeffs[base_tuple]
                if not block.any():
                    continue
                idx = tuple(unit_index[base_tuple[l], chain[l], chain[l + 1]] for l in range(k))
                out[idx][i * h : (i + 1) * h, j * h : (j + 1) * h] = block
        self._induced = MultilinearMap(amp.algebra, k, n * h, out)
        return self._induced

    def block_amplify(self, t: int) -> MultilinearMap:
        """Materialized t-amplification, a map over M_t(M_n(A))."""
        return self.induced_map().amplify(t)

    def block_amplified_evaluate(self, t: int, mats: Sequence[MatrixOverAlgebra]) -> np.ndarray:
        """Level-t value on t-matrices over M_n(A), without materializing."""
        return amplified_evaluate(self.induced_map(), t, mats)

    # -- adjoint / symmetry -------------------------------------------------

    def block_adjoint(self) -> "BlockMultilinearMap":
        """Adjoint grid: entry (i, j) is the multilinear adjoint of entry (j, i)."""
        n = self.n
        return BlockMultilinearMap(
            [[self.entries[j][i].adjoint() for j in range(n)] for i in range(n)]
        )

    def block_is_symmetric(self, tol: float | None = None) -> bool:
        if tol is None:
            tol = 1e-9 * (1.0 + self.coefficient_scale())
        adj = self.block_adjoint()
        dev = max(
            np.abs(self.entries[i][j].coeffs - adj.entries[i][j].coeffs).max()
            for i in range(self.n)
            for j in range(self.n)
        )
        return bool(dev <= tol)

    # -- invariance ----------------------------------------------------------

    def block_invariance_report(self, tol=None, rng=None, trials: int = 2000, max_exhaustive=None) -> dict:
        kwargs = {} if max_exhaustive is None else {"max_exhaustive": max_exhaustive}
        return self.induced_map().invariance_report(tol, rng, trials, **kwargs)

    def block_is_invariant(self, tol=None, rng=None, trials: int = 2000) -> bool:
        return self.block_invariance_report(tol, rng, trials)["invariant"]

    def entries_invariant(self, tol=None, rng=None, trials: int = 2000) -> list[list[bool]]:
        return [
            [phi.is_invariant(tol, rng, trials) for phi in row]
            for row in self.entries
        ]

    def __repr__(self):
        return (
            f"BlockMultilinearMap(n={self.n}, k={self.k}, h={self.h}, "
            f"algebra={self.algebra!r})"
        )


def as_block_map(phi) -> BlockMultilinearMap:
    """Wrap a plain multilinear map as a 1x1 block map; pass block maps through."""
    if isinstance(phi, BlockMultilinearMap):
        return phi
    if isinstance(phi, MultilinearMap):
        return BlockMultilinearMap.from_single(phi)
    raise TypeError(f"expected a multilinear or block multilinear map, got {type(phi)!r}")
