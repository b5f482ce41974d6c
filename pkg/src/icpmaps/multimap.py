"""k-linear maps A^k -> B(H) stored as dense coefficient tensors.

A map is determined by its values on basis tuples, a tensor of h-by-h
complex matrices indexed by k basis indices.  Evaluation is plain tensor
contraction against coordinate vectors, so it is exact on basis tuples and
multilinear by construction.

Amplification to M_t(A)^k follows the row-chain-column summation: the
(i, j) block of the amplified value is the sum over chains r_1..r_{k-1} of
the base map applied to the chained entries.  ``amplified_evaluate``
performs that contraction directly without materializing the amplified
coefficient tensor; ``MultilinearMap.amplify`` materializes it (and is
guarded by a size limit).
"""

from __future__ import annotations

import string
from typing import Sequence

import numpy as np

from .algebra import (
    Algebra,
    AlgebraElement,
    Amplification,
    MatrixOverAlgebra,
    amplified_algebra,
    multiply,
    random_element,
)
from .errors import AlgebraMismatchError, ArityError

# Above this many basis tuples, invariance checks switch to seeded random
# probing (reported in the flag of the result).
EXHAUSTIVE_TUPLE_LIMIT = 10**6
AMPLIFY_SIZE_LIMIT = 5 * 10**6


def arity_midpoint(k: int) -> int:
    """Number of tensor factors m = floor((k+1)/2) attached to arity k."""
    return (k + 1) // 2


class MultilinearMap:
    """A k-linear map from A^k into h-by-h complex matrices."""

    def __init__(self, algebra: Algebra, k: int, h: int, coeffs):
        if k < 1:
            raise ValueError(f"arity must be >= 1, got {k}")
        if h < 1:
            raise ValueError(f"codomain dimension must be >= 1, got {h}")
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        expected = (algebra.dim,) * k + (h, h)
        if coeffs.shape != expected:
            raise ValueError(f"coefficient tensor has shape {coeffs.shape}, expected {expected}")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        self.algebra = algebra
        self.k = int(k)
        self.h = int(h)
        self.coeffs = coeffs

    @property
    def m(self) -> int:
        return arity_midpoint(self.k)

    def coefficient_scale(self) -> float:
        """max Frobenius norm over stored coefficient matrices."""
        flat = self.coeffs.reshape(-1, self.h, self.h)
        return float(np.sqrt((np.abs(flat) ** 2).sum(axis=(1, 2)).max())) if flat.size else 0.0

    # -- evaluation ------------------------------------------------------

    def evaluate(self, args: Sequence[AlgebraElement]) -> np.ndarray:
        """Value on a k-tuple of algebra elements, an (h, h) matrix."""
        if len(args) != self.k:
            raise ArityError(f"expected {self.k} arguments, got {len(args)}")
        out = self.coeffs
        for a in args:
            if a.algebra != self.algebra:
                raise AlgebraMismatchError("argument belongs to a different algebra")
            out = np.tensordot(a.coords(), out, axes=(0, 0))
        return out

    def unit_value(self) -> np.ndarray:
        """Value at the all-identities tuple."""
        one = self.algebra.one()
        return self.evaluate([one] * self.k)

    # -- adjoint and symmetry ---------------------------------------------

    def adjoint(self) -> "MultilinearMap":
        """The map (a_1,...,a_k) -> value(a_k*, ..., a_1*)* as a coefficient tensor."""
        k = self.k
        out = self.coeffs
        perm = self.algebra.star_perm
        for ax in range(k):
            out = np.take(out, perm, axis=ax)
        axes = list(reversed(range(k))) + [k + 1, k]
        return MultilinearMap(self.algebra, k, self.h, np.conj(out.transpose(axes)))

    def is_symmetric(self, tol: float | None = None) -> bool:
        dev = np.abs(self.coeffs - self.adjoint().coeffs).max()
        if tol is None:
            tol = 1e-9 * (1.0 + self.coefficient_scale())
        return bool(dev <= tol)

    # -- amplification -----------------------------------------------------

    def amplify(self, t: int) -> "MultilinearMap":
        """Materialized amplification as a map over M_t(A) with codomain t*h.

        The coefficient tensor over the amplified matrix-unit basis has one
        nonzero (h, h) block per chained index assignment.
        """
        amp = amplified_algebra(self.algebra, t)
        d, k, h = self.algebra.dim, self.k, self.h
        big_dim = amp.algebra.dim
        n_entries = (big_dim**k) * (t * h) ** 2
        if n_entries > AMPLIFY_SIZE_LIMIT:
            raise ValueError(
                f"amplified tensor would hold {n_entries} scalars "
                f"(> {AMPLIFY_SIZE_LIMIT}); use amplified_evaluate instead"
            )
        out = np.zeros((big_dim,) * k + (t * h, t * h), dtype=np.complex128)
        basis_mats = _amplified_unit_index(self.algebra, amp)
        flat = self.coeffs.reshape((d,) * k + (h, h))
        for base_tuple in np.ndindex(*(d,) * k):
            block = flat[base_tuple]
            if not block.any():
                continue
            for chain in np.ndindex(*(t,) * (k + 1)):
                idx = tuple(
                    basis_mats[base_tuple[l], chain[l], chain[l + 1]] for l in range(k)
                )
                i, j = chain[0], chain[-1]
                out[idx][i * h : (i + 1) * h, j * h : (j + 1) * h] = block
        return MultilinearMap(amp.algebra, k, t * h, out)

    # -- invariance ---------------------------------------------------------

    def is_invariant(
        self,
        tol: float | None = None,
        rng: np.random.Generator | None = None,
        trials: int = 2000,
        max_exhaustive: int = EXHAUSTIVE_TUPLE_LIMIT,
    ) -> bool:
        return self.invariance_report(tol, rng, trials, max_exhaustive)["invariant"]

    def invariance_report(
        self,
        tol: float | None = None,
        rng: np.random.Generator | None = None,
        trials: int = 2000,
        max_exhaustive: int = EXHAUSTIVE_TUPLE_LIMIT,
    ) -> dict:
        """Check the left-factor migration identities.

        For odd arity k = 2m-1 the identity moves factors c_1..c_{m-1} from
        the first m-1 slots (right multiplication) to the last m-1 slots
        (left multiplication, reversed order); for even arity k = 2m the
        factors c_1..c_m migrate analogously.  Both sides are multilinear in
        every slot, so equality on all basis assignments is equivalent to the
        identity; above ``max_exhaustive`` assignments the check samples
        seeded random tuples instead and flags the report.
        """
        k, m, d = self.k, self.m, self.algebra.dim
        n_c = m - 1 if k % 2 == 1 else m
        if tol is None:
            tol = 1e-9 * (1.0 + self.coefficient_scale())
        if n_c == 0:
            return {
                "invariant": True,
                "max_deviation": 0.0,
                "exhaustive": True,
                "tolerance": tol,
                "tuples_checked": 0,
            }
        n_tuples = d ** (k + n_c)
        if n_tuples <= max_exhaustive:
            dev = self._invariance_deviation_exhaustive()
            return {
                "invariant": bool(dev <= tol),
                "max_deviation": float(dev),
                "exhaustive": True,
                "tolerance": tol,
                "tuples_checked": n_tuples,
            }
        if rng is None:
            rng = np.random.default_rng(0)
        dev = self._invariance_deviation_random(rng, trials)
        return {
            "invariant": bool(dev <= tol),
            "max_deviation": float(dev),
            "exhaustive": False,
            "tolerance": tol,
            "tuples_checked": trials,
        }

    def _invariance_sides(self, a_elems, c_elems):
        """Evaluate (lhs, rhs) of the migration identity on explicit elements.

        Uniformly over both parities: lhs puts a_j c_j in slot j for
        j < n_c, rhs puts c_l a_{k-1-l} in slot k-1-l.
        """
        k, m = self.k, self.m
        n_c = m - 1 if k % 2 == 1 else m
        lhs_args = [multiply(a_elems[j], c_elems[j]) for j in range(n_c)] + list(a_elems[n_c:])
        rhs_args = list(a_elems[: k - n_c]) + [
            multiply(c_elems[k - 1 - s], a_elems[s]) for s in range(k - n_c, k)
        ]
        return self.evaluate(lhs_args), self.evaluate(rhs_args)

    def _invariance_deviation_random(self, rng: np.random.Generator, trials: int) -> float:
        k, m = self.k, self.m
        n_c = m - 1 if k % 2 == 1 else m
        worst = 0.0
        for _ in range(trials):
            a_elems = [random_element(self.algebra, rng) for _ in range(k)]
            c_elems = [random_element(self.algebra, rng) for _ in range(n_c)]
            lhs, rhs = self._invariance_sides(a_elems, c_elems)
            scale = 1.0 + max(np.abs(lhs).max(), np.abs(rhs).max(), 0.0)
            worst = max(worst, float(np.abs(lhs - rhs).max() / scale))
        return worst

    def _invariance_deviation_exhaustive(self) -> float:
        """Max |lhs - rhs| over all basis assignments, chunked over slot 1."""
        k, m, d = self.k, self.m, self.algebra.dim
        mt = self.algebra.mult_table
        odd = k % 2 == 1
        n_c = m - 1 if odd else m
        letters = string.ascii_lowercase
        a_idx = [letters[i] for i in range(k)]
        c_idx = [letters[k + i] for i in range(n_c)]
        r_idx = [letters[k + n_c + i] for i in range(n_c)]
        uv = "yz"
        out_sub = "".join(a_idx[1:]) + "".join(c_idx) + uv

        # lhs: slot j (0-based, j < n_c) carries a_j c_j; slot 0 is sliced out.
        lhs_ops = [f"{a_idx[j]}{c_idx[j]}{r_idx[j]}" for j in range(1, n_c)]
        lhs_coeff_sub = "".join(r_idx) + "".join(a_idx[n_c:]) + uv
        # rhs: trailing slot (k-1-l) carries c_l a_{k-1-l} for l < n_c; the
        # leading slot a_0 is sliced out of the coefficient tensor below.
        rhs_ops = [f"{c_idx[l]}{a_idx[k - 1 - l]}{r_idx[l]}" for l in range(n_c)]
        rhs_coeff_sub = "".join(a_idx[1 : k - n_c]) + "".join(reversed(r_idx)) + uv

        worst = 0.0
        for a0 in range(d):
            lhs_spec = ",".join([f"{c_idx[0]}{r_idx[0]}"] + lhs_ops + [lhs_coeff_sub]) + "->" + out_sub
            lhs = np.einsum(
                lhs_spec, mt[a0], *([mt] * (n_c - 1)), self.coeffs, optimize=True
            )
            rhs_spec = ",".join(rhs_ops + [rhs_coeff_sub]) + "->" + out_sub
            rhs = np.einsum(rhs_spec, *([mt] * n_c), self.coeffs[a0], optimize=True)
            worst = max(worst, float(np.abs(lhs - rhs).max()))
        return worst


# -- amplified evaluation --------------------------------------------------


def amplified_evaluate(
    phi: MultilinearMap, t: int, mats: Sequence[MatrixOverAlgebra]
) -> np.ndarray:
    """Value of the level-t amplification on matrices over the algebra.

    Returns the (t*h, t*h) block matrix whose (i, j) block is the chained
    sum of base-map values.  Cost is O(d^k t^3 + d^k t^2 h^2) without ever
    forming the amplified coefficient tensor.
    """
    if len(mats) != phi.k:
        raise ArityError(f"expected {phi.k} arguments, got {len(mats)}")
    for x in mats:
        if x.algebra != phi.algebra or x.t != t:
            raise AlgebraMismatchError("argument is not a t-matrix over the map's algebra")
    d, h, k = phi.algebra.dim, phi.h, phi.k
    chain = mats[0].coords_pij()
    for x in mats[1:]:
        chain = np.einsum("pij,qjl->pqil", chain, x.coords_pij()).reshape(-1, t, t)
    flat = phi.coeffs.reshape(d**k, h, h)
    value = np.einsum("pij,puv->iujv", chain, flat, optimize=True)
    return value.reshape(t * h, t * h)


def _amplified_unit_index(base: Algebra, amp: Amplification) -> np.ndarray:
    """index[q, i, j] = amplified basis index of e_q placed at entry (i, j)."""
    t = amp.t
    out = np.empty((base.dim, t, t), dtype=np.intp)
    for q in range(base.dim):
        b, r, c = base.basis_label(q)
        d = base.block_dims[b]
        for i in range(t):
            for j in range(t):
                out[q, i, j] = amp.algebra.basis_index(b, i * d + r, j * d + c)
    return out


def slot_linearity_deviation(
    phi: MultilinearMap, rng: np.random.Generator, trials: int = 20
) -> float:
    """Largest relative violation of linearity in a random slot; diagnostic."""
    worst = 0.0
    for _ in range(trials):
        slot = int(rng.integers(phi.k))
        args = [random_element(phi.algebra, rng) for _ in range(phi.k)]
        x = random_element(phi.algebra, rng)
        y = random_element(phi.algebra, rng)
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        beta = complex(rng.standard_normal(), rng.standard_normal())
        combo = alpha * x + beta * y
        lhs = phi.evaluate(args[:slot] + [combo] + args[slot + 1 :])
        rhs = alpha * phi.evaluate(args[:slot] + [x] + args[slot + 1 :]) + beta * phi.evaluate(
            args[:slot] + [y] + args[slot + 1 :]
        )
        scale = 1.0 + max(np.abs(lhs).max(), np.abs(rhs).max())
        worst = max(worst, float(np.abs(lhs - rhs).max() / scale))
    return worst
