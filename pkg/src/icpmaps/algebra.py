"""Finite-dimensional C*-algebras: direct sums of full complex matrix blocks.

The basis is fixed once and for all as the matrix units of every block,
ordered block-major then row-major.  With that choice the structure
constants are {0,1}-valued, the involution is a plain index permutation,
and coordinate/block conversions are exact.

All objects are immutable after construction and every operation is pure;
random samplers take an explicit ``numpy.random.Generator``, so instances
can be shared freely across threads.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import AlgebraMismatchError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9


class Algebra:
    """A finite direct sum of full matrix algebras ⊕_i M_{d_i}(C).

    Attributes
    ----------
    block_dims : tuple of int
        Sizes (d_1, ..., d_b) of the matrix blocks.
    dim : int
        Linear dimension, sum of d_i**2.
    star_perm : int array of shape (dim,)
        Index permutation realizing the involution on basis matrix units.
    identity_coords : complex array of shape (dim,)
        Coordinates of the unit.
    """

    def __init__(self, block_dims: Sequence[int]):
        dims = tuple(int(d) for d in block_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"block dimensions must be positive integers, got {block_dims!r}")
        self.block_dims = dims
        self.dim = int(sum(d * d for d in dims))

        block_of = np.empty(self.dim, dtype=np.intp)
        row_of = np.empty(self.dim, dtype=np.intp)
        col_of = np.empty(self.dim, dtype=np.intp)
        offsets = []
        p = 0
        for b, d in enumerate(dims):
            offsets.append(p)
            for r in range(d):
                for c in range(d):
                    block_of[p] = b
                    row_of[p] = r
                    col_of[p] = c
                    p += 1
        self._offsets = tuple(offsets)
        self._block_of = block_of
        self._row_of = row_of
        self._col_of = col_of

        # e_(b,r,c)* = e_(b,c,r): a signless permutation of the basis
        self.star_perm = np.array(
            [self.basis_index(b, c, r) for b, r, c in zip(block_of, row_of, col_of)],
            dtype=np.intp,
        )
        ident = np.zeros(self.dim, dtype=np.complex128)
        for b, d in enumerate(dims):
            for r in range(d):
                ident[self.basis_index(b, r, r)] = 1.0
        self.identity_coords = ident
        self.identity_coords.setflags(write=False)
        self._mult_table = None

    # -- basic queries ---------------------------------------------------

    @property
    def n_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def is_commutative(self) -> bool:
        return all(d == 1 for d in self.block_dims)

    def basis_index(self, block: int, row: int, col: int) -> int:
        d = self.block_dims[block]
        return self._offsets[block] + row * d + col

    def basis_label(self, p: int) -> tuple[int, int, int]:
        return (int(self._block_of[p]), int(self._row_of[p]), int(self._col_of[p]))

    def __eq__(self, other) -> bool:
        return isinstance(other, Algebra) and self.block_dims == other.block_dims

    def __hash__(self):
        return hash(self.block_dims)

    def __repr__(self):
        return f"Algebra({list(self.block_dims)})"

    # -- structure constants ----------------------------------------------

    @property
    def mult_table(self) -> np.ndarray:
        """Dense structure constants M[p, q, r] with e_p e_q = sum_r M[p,q,r] e_r.

        Entries are exactly 0.0 or 1.0.  Built lazily; O(dim^3) memory.
        """
        if self._mult_table is None:
            d = self.dim
            table = np.zeros((d, d, d), dtype=np.float64)
            same_block = self._block_of[:, None] == self._block_of[None, :]
            chained = self._col_of[:, None] == self._row_of[None, :]
            ps, qs = np.nonzero(same_block & chained)
            for p, q in zip(ps, qs):
                r = self.basis_index(self._block_of[p], self._row_of[p], self._col_of[q])
                table[p, q, r] = 1.0
            table.setflags(write=False)
            self._mult_table = table
        return self._mult_table

    def validate_structure(self) -> None:
        """Check associativity, unit law, and involution exactly.

        Raises ``AssertionError`` on violation; intended for tests and for
        CLI-level validation of small algebras.
        """
        m = self.mult_table
        lhs = np.einsum("pqs,sru->pqru", m, m)
        rhs = np.einsum("qrs,psu->pqru", m, m)
        assert np.array_equal(lhs, rhs), "structure constants are not associative"
        e = self.identity_coords.real
        assert np.array_equal(np.einsum("p,pqr->qr", e, m), np.eye(self.dim)), "unit fails on the left"
        assert np.array_equal(np.einsum("q,pqr->pr", e, m), np.eye(self.dim)), "unit fails on the right"
        assert np.array_equal(self.star_perm[self.star_perm], np.arange(self.dim)), "star is not an involution"
        # star is an anti-homomorphism on basis elements: (e_p e_q)* = e_q* e_p*
        starred = m[:, :, self.star_perm]
        swapped = m[self.star_perm][:, self.star_perm].transpose(1, 0, 2)
        assert np.array_equal(starred, swapped), "star is not anti-multiplicative"

    # -- element constructors ----------------------------------------------

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.zeros((d, d), dtype=np.complex128) for d in self.block_dims])

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.eye(d, dtype=np.complex128) for d in self.block_dims])

    def basis_element(self, p: int) -> "AlgebraElement":
        coords = np.zeros(self.dim, dtype=np.complex128)
        coords[p] = 1.0
        return self.element_from_coords(coords)

    def element_from_coords(self, coords) -> "AlgebraElement":
        coords = np.asarray(coords, dtype=np.complex128)
        if coords.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} coordinates, got shape {coords.shape}")
        blocks = []
        for b, d in enumerate(self.block_dims):
            off = self._offsets[b]
            blocks.append(coords[off : off + d * d].reshape(d, d).copy())
        return AlgebraElement(self, blocks)

    def element_from_blocks(self, blocks) -> "AlgebraElement":
        return AlgebraElement(self, blocks)


class AlgebraElement:
    """Block-diagonal element of an :class:`Algebra`.

    Stored as one complex matrix per block.  The coordinate representation
    in the matrix-unit basis is an exact reshape of the blocks.
    """

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: Algebra, blocks):
        if len(blocks) != algebra.n_blocks:
            raise ValueError("wrong number of blocks")
        mats = []
        for d, blk in zip(algebra.block_dims, blocks):
            mat = np.array(blk, dtype=np.complex128)
            if mat.shape != (d, d):
                raise ValueError(f"block of shape {mat.shape} does not match dimension {d}")
            mat.setflags(write=False)
            mats.append(mat)
        self.algebra = algebra
        self.blocks = tuple(mats)

    def coords(self) -> np.ndarray:
        return np.concatenate([blk.ravel() for blk in self.blocks])

    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [blk.conj().T for blk in self.blocks])

    def norm(self) -> float:
        return element_norm(self)

    def is_positive(self, tol: float | None = None) -> bool:
        return is_positive_element(self, tol)

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.algebra, [-a for a in self.blocks])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return AlgebraElement(self.algebra, [other * a for a in self.blocks])

    def __rmul__(self, scalar):
        return AlgebraElement(self.algebra, [scalar * a for a in self.blocks])

    def _check(self, other):
        if not isinstance(other, AlgebraElement) or other.algebra != self.algebra:
            raise AlgebraMismatchError("elements belong to different algebras")

    def allclose(self, other, atol: float = 1e-12) -> bool:
        self._check(other)
        return all(np.allclose(a, b, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def __repr__(self):
        return f"AlgebraElement({self.algebra!r}, norm={self.norm():.4g})"


# -- arithmetic ---------------------------------------------------------------


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Algebra product, blockwise matrix multiplication."""
    if x.algebra != y.algebra:
        raise AlgebraMismatchError("cannot multiply elements of different algebras")
    return AlgebraElement(x.algebra, [a @ b for a, b in zip(x.blocks, y.blocks)])


def star(x: AlgebraElement) -> AlgebraElement:
    """Involution: blockwise conjugate transpose."""
    return x.star()


def element_norm(x: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(float(np.linalg.norm(blk, 2)) for blk in x.blocks)


def is_positive_element(x: AlgebraElement, tol: float | None = None) -> bool:
    """True iff x is Hermitian and PSD within tolerance.

    Hermitian slack defaults to 1e-10 * max(1, ||x||); eigenvalue slack to
    1e-9 * max(1, ||x||), matching double-precision eigensolver accuracy.
    """
    scale = max(1.0, element_norm(x))
    herm_tol = (HERMITIAN_TOL if tol is None else tol) * scale
    eig_tol = (PSD_TOL if tol is None else tol) * scale
    for blk in x.blocks:
        if np.abs(blk - blk.conj().T).max() > herm_tol:
            return False
        if np.linalg.eigvalsh((blk + blk.conj().T) / 2).min() < -eig_tol:
            return False
    return True


# -- random sampling -----------------------------------------------------------


def random_element(algebra: Algebra, rng: np.random.Generator, scale: float = 1.0) -> AlgebraElement:
    """Complex-Gaussian element; deterministic given the generator state."""
    blocks = [
        scale * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
        for d in algebra.block_dims
    ]
    return AlgebraElement(algebra, blocks)


def random_psd(algebra: Algebra, rng: np.random.Generator, scale: float = 1.0) -> AlgebraElement:
    """Random positive element y*y, symmetrized so star fixes it bitwise."""
    y = random_element(algebra, rng, scale)
    p = multiply(y.star(), y)
    return 0.5 * (p + p.star())


def project_unit_ball(x: AlgebraElement) -> AlgebraElement:
    """Clip each block's singular values at 1 (projection onto the operator-norm
    unit ball, nearest point in Frobenius distance)."""
    blocks = []
    for blk in x.blocks:
        u, s, vh = np.linalg.svd(blk)
        blocks.append((u * np.minimum(s, 1.0)) @ vh)
    return AlgebraElement(x.algebra, blocks)


# -- amplification M_t(A) ------------------------------------------------------


class MatrixOverAlgebra:
    """A t-by-t matrix with entries in a common algebra.

    Stored as a coordinate tensor of shape (t, t, dim); entries are
    materialized on demand.
    """

    __slots__ = ("algebra", "t", "coords")

    def __init__(self, algebra: Algebra, coords):
        coords = np.asarray(coords, dtype=np.complex128)
        if coords.ndim != 3 or coords.shape[0] != coords.shape[1] or coords.shape[2] != algebra.dim:
            raise ValueError(f"expected coords of shape (t, t, {algebra.dim}), got {coords.shape}")
        coords = coords.copy()
        coords.setflags(write=False)
        self.algebra = algebra
        self.t = coords.shape[0]
        self.coords = coords

    @classmethod
    def from_entries(cls, algebra: Algebra, entries) -> "MatrixOverAlgebra":
        t = len(entries)
        coords = np.zeros((t, t, algebra.dim), dtype=np.complex128)
        for i in range(t):
            if len(entries[i]) != t:
                raise ValueError("entries grid is not square")
            for j in range(t):
                el = entries[i][j]
                if el.algebra != algebra:
                    raise AlgebraMismatchError("entry belongs to a different algebra")
                coords[i, j] = el.coords()
        return cls(algebra, coords)

    @classmethod
    def identity(cls, algebra: Algebra, t: int) -> "MatrixOverAlgebra":
        coords = np.zeros((t, t, algebra.dim), dtype=np.complex128)
        for i in range(t):
            coords[i, i] = algebra.identity_coords
        return cls(algebra, coords)

    def entry(self, i: int, j: int) -> AlgebraElement:
        return self.algebra.element_from_coords(self.coords[i, j])

    def coords_pij(self) -> np.ndarray:
        """Coordinate tensor transposed to (dim, t, t), the layout used by
        amplified evaluation."""
        return np.ascontiguousarray(self.coords.transpose(2, 0, 1))

    def star(self) -> "MatrixOverAlgebra":
        out = np.conj(self.coords.transpose(1, 0, 2))[:, :, self.algebra.star_perm]
        return MatrixOverAlgebra(self.algebra, out)

    def __matmul__(self, other: "MatrixOverAlgebra") -> "MatrixOverAlgebra":
        if not isinstance(other, MatrixOverAlgebra):
            return NotImplemented
        if other.algebra != self.algebra or other.t != self.t:
            raise AlgebraMismatchError("matrix size or algebra mismatch")
        m = self.algebra.mult_table
        out = np.einsum("irp,rjq,pqs->ijs", self.coords, other.coords, m)
        return MatrixOverAlgebra(self.algebra, out)

    def __add__(self, other: "MatrixOverAlgebra") -> "MatrixOverAlgebra":
        if other.algebra != self.algebra or other.t != self.t:
            raise AlgebraMismatchError("matrix size or algebra mismatch")
        return MatrixOverAlgebra(self.algebra, self.coords + other.coords)

    def __rmul__(self, scalar):
        return MatrixOverAlgebra(self.algebra, scalar * self.coords)

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return np.allclose(self.coords, other.coords, atol=atol)

    def __repr__(self):
        return f"MatrixOverAlgebra(t={self.t}, algebra={self.algebra!r})"


class Amplification:
    """The algebra M_t(A) ≅ ⊕_i M_{t·d_i}(C) with its canonical embedding.

    ``embed`` maps a :class:`MatrixOverAlgebra` to an element of the
    amplified algebra; ``extract`` inverts it.  Both are exact reshapes.
    """

    def __init__(self, base: Algebra, t: int):
        if t < 1:
            raise ValueError(f"amplification level must be >= 1, got {t}")
        self.base = base
        self.t = int(t)
        self.algebra = Algebra([t * d for d in base.block_dims])

    def embed(self, x: MatrixOverAlgebra) -> AlgebraElement:
        if x.algebra != self.base or x.t != self.t:
            raise AlgebraMismatchError("matrix does not match this amplification")
        t = self.t
        blocks = []
        for b, d in enumerate(self.base.block_dims):
            off = self.base._offsets[b]
            grid = x.coords[:, :, off : off + d * d].reshape(t, t, d, d)
            blocks.append(grid.transpose(0, 2, 1, 3).reshape(t * d, t * d))
        return AlgebraElement(self.algebra, blocks)

    def extract(self, x: AlgebraElement) -> MatrixOverAlgebra:
        if x.algebra != self.algebra:
            raise AlgebraMismatchError("element does not live in the amplified algebra")
        t = self.t
        coords = np.zeros((t, t, self.base.dim), dtype=np.complex128)
        for b, d in enumerate(self.base.block_dims):
            off = self.base._offsets[b]
            grid = x.blocks[b].reshape(t, d, t, d).transpose(0, 2, 1, 3)
            coords[:, :, off : off + d * d] = grid.reshape(t, t, d * d)
        return MatrixOverAlgebra(self.base, coords)


def amplified_algebra(base: Algebra, t: int) -> Amplification:
    """M_t(A) as a C*-algebra, bundled with embed/extract maps."""
    return Amplification(base, t)
