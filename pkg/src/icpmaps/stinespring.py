"""Dilation triples: construction from the Gram kernel, verification,
minimal compression, and unitary equivalence.

The quotient of A^{tensor m} (x) H^n by the null space of the Gram form is
realized numerically through a truncated eigendecomposition G = U L U*:
eigenpairs above a relative rank threshold define W = L_+^{1/2} U_+^* so
that G = W^* W, and the quotient space is C^kappa with kappa the kept
count.  Left multiplication on the p-th tensor factor is an exact
{0,1}-matrix on coordinates; it descends to the quotient precisely when it
preserves ker G, which is verified, not assumed.  Representations are
W P W^+, the operators V_j are W applied to the unit-tensor embeddings of
H at slot j.

Reconstruction pairs the slots around the middle: for k = 2m-1,

    phi_ij(a_1..a_{2m-1}) = V_i* pi_1(a_m) pi_2(a_{m-1} a_{m+1}) ... pi_m(a_1 a_{2m-1}) V_j

and for k = 2m the p-th factor receives a_{m-p+1} a_{m+p}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import Algebra, AlgebraElement
from .blockmap import as_block_map
from .errors import NotCompletelyPositiveError, QuotientDescentError
from .gram import build_gram, gram_is_psd

RANK_TOL = 1e-10
DESCENT_TOL = 1e-8


@dataclass
class DilationTriple:
    """m commuting representation images, n operators H -> K, and provenance.

    reps[p] stacks the kappa-by-kappa images of the basis elements under the
    p-th representation; V[j] is kappa-by-h.  W, when present, is the
    quotient map with G = W^* W.
    """

    algebra: Algebra
    k: int
    n: int
    h: int
    kappa: int
    reps: tuple
    V: tuple
    W: np.ndarray | None = None
    rank_tol: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return (self.k + 1) // 2

    def rep_apply(self, p: int, x: AlgebraElement) -> np.ndarray:
        """Linear extension of the p-th representation to an element."""
        return np.tensordot(x.coords(), self.reps[p], axes=(0, 0))

    def stacked_V(self) -> np.ndarray:
        """kappa-by-(n*h) horizontal concatenation of the V_j."""
        if self.kappa == 0:
            return np.zeros((0, self.n * self.h), dtype=np.complex128)
        return np.hstack(self.V)

    def unit_norm_bound(self) -> float:
        """max_j ||V_j||^2, the dilation-side bound on the unit value."""
        if self.kappa == 0:
            return 0.0
        return max(float(np.linalg.norm(vj, 2)) ** 2 for vj in self.V)

    def product_tensor(self) -> np.ndarray:
        """pi_1(e_{b_1}) ... pi_m(e_{b_m}) for all basis tuples, shape
        (d^m, kappa, kappa) with (b_1..b_m) raveled in C order."""
        d = self.algebra.dim
        t = self.reps[0]
        for f in range(1, self.m):
            t = np.einsum("...ij,bjk->...bik", t, self.reps[f])
        return t.reshape(d**self.m, self.kappa, self.kappa)

    def spanning_matrix(self) -> np.ndarray:
        """Columns pi_1(e_{b_1})..pi_m(e_{b_m}) V_j e_s over all (b, j, s)."""
        d = self.algebra.dim
        if self.kappa == 0:
            return np.zeros((0, d**self.m * self.n * self.h), dtype=np.complex128)
        prod = self.product_tensor()
        cols = prod @ self.stacked_V()  # (d^m, kappa, n*h)
        return cols.transpose(1, 0, 2).reshape(self.kappa, -1)


@dataclass
class DilationReport:
    """Residuals of a triple against a map, all spectral norms."""

    reconstruction: float
    multiplicativity: float
    star: float
    unitality: float
    commutation: float

    def max_structural(self) -> float:
        return max(self.multiplicativity, self.star, self.unitality, self.commutation)

    def to_dict(self) -> dict:
        return {
            "reconstruction": self.reconstruction,
            "multiplicativity": self.multiplicativity,
            "star": self.star,
            "unitality": self.unitality,
            "commutation": self.commutation,
        }


@dataclass
class MinimalityReport:
    spanning_rank: int
    kappa: int
    is_minimal: bool
    singular_values: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "spanning_rank": self.spanning_rank,
            "kappa": self.kappa,
            "is_minimal": self.is_minimal,
        }


@dataclass
class EquivalenceReport:
    U: np.ndarray = field(repr=False)
    unitarity: float = 0.0
    intertwining: float = 0.0
    v_match: float = 0.0
    kappa: int = 0

    def within(self, unitarity_tol=1e-9, intertwining_tol=1e-7, v_tol=1e-7) -> bool:
        return (
            self.unitarity <= unitarity_tol
            and self.intertwining <= intertwining_tol
            and self.v_match <= v_tol
        )

    def to_dict(self) -> dict:
        return {
            "unitarity": self.unitarity,
            "intertwining": self.intertwining,
            "v_match": self.v_match,
            "kappa": self.kappa,
        }


# -- quotient machinery ---------------------------------------------------


def left_mult_operator(algebra: Algebra, m: int, n: int, h: int, p: int, b: int) -> np.ndarray:
    """Left multiplication by e_b on tensor factor p, as an N-by-N 0/1 matrix
    on coordinates of A^{tensor m} (x) H^n."""
    d = algebra.dim
    bb, br, bc = algebra.basis_label(b)
    target = np.full(d, -1, dtype=np.intp)
    for q in range(d):
        qb, qr, qc = algebra.basis_label(q)
        if qb == bb and qr == bc:
            target[q] = algebra.basis_index(bb, br, qc)
    size = d**m * n * h
    out = np.zeros((size, size), dtype=np.float64)
    tail = n * h
    digits = np.array(list(np.ndindex(*(d,) * m)))  # (d^m, m)
    factors = digits[:, p]
    mapped = target[factors]
    ok = mapped >= 0
    stride = d ** (m - 1 - p)
    src_alpha = np.arange(d**m)
    dst_alpha = src_alpha + (mapped - factors) * stride
    for a_src, a_dst, good in zip(src_alpha, dst_alpha, ok):
        if good:
            sl_src = slice(a_src * tail, (a_src + 1) * tail)
            sl_dst = slice(a_dst * tail, (a_dst + 1) * tail)
            out[sl_dst, sl_src] = np.eye(tail)
    return out


def _unit_slot_embedding(algebra: Algebra, m: int, n: int, h: int, j: int) -> np.ndarray:
    """iota_j : H -> A^{tensor m} (x) H^n sending f to 1 x .. x 1 x (f at slot j)."""
    d = algebra.dim
    ident = algebra.identity_coords
    vec = ident
    for _ in range(m - 1):
        vec = np.kron(vec, ident)
    out = np.zeros((d**m * n * h, h), dtype=np.complex128)
    for a in range(d**m):
        if vec[a] == 0:
            continue
        for s in range(h):
            out[(a * n + j) * h + s, s] = vec[a]
    return out


def dilate(
    phi,
    rank_tol: float = RANK_TOL,
    psd_tol: float | None = None,
    descent_tol: float = DESCENT_TOL,
) -> DilationTriple:
    """Construct a dilation triple from the Gram kernel.

    Raises :class:`NotCompletelyPositiveError` when the Gram has a genuinely
    negative eigenvalue, and :class:`QuotientDescentError` when some basis
    multiplier fails to preserve ker G (construction obstruction outside the
    theorem's hypotheses).
    """
    block = as_block_map(phi)
    alg, k, n, h, m = block.algebra, block.k, block.n, block.h, block.m
    d = alg.dim
    gram = build_gram(block)
    psd, min_eig = gram_is_psd(gram, psd_tol)
    if not psd:
        raise NotCompletelyPositiveError(min_eig)
    g = (gram.matrix + gram.matrix.conj().T) / 2.0
    lam, u = np.linalg.eigh(g)
    lam_max = float(lam.max(initial=0.0))
    kept = lam > rank_tol * lam_max if lam_max > 0 else np.zeros(len(lam), dtype=bool)
    kappa = int(kept.sum())
    w = (np.sqrt(lam[kept])[:, None]) * u[:, kept].conj().T  # (kappa, N)
    winv = u[:, kept] / np.sqrt(lam[kept])[None, :]  # (N, kappa)
    null = u[:, ~kept]
    scale = np.sqrt(lam_max) if lam_max > 0 else 1.0
    reps = []
    for p in range(m):
        images = np.empty((d, kappa, kappa), dtype=np.complex128)
        for b in range(d):
            lm = left_mult_operator(alg, m, n, h, p, b)
            residual = float(np.linalg.norm(w @ lm @ null, 2)) if null.size and kappa else 0.0
            if residual > descent_tol * scale:
                raise QuotientDescentError(p, b, residual)
            images[b] = w @ lm @ winv
        reps.append(images)
    v_ops = tuple(w @ _unit_slot_embedding(alg, m, n, h, j) for j in range(n))
    return DilationTriple(
        algebra=alg,
        k=k,
        n=n,
        h=h,
        kappa=kappa,
        reps=tuple(reps),
        V=v_ops,
        W=w,
        rank_tol=rank_tol,
        meta={"gram_min_eigenvalue": min_eig, "source": "gram-quotient"},
    )


# -- verification -----------------------------------------------------------


def _batched_opnorm_max(mats: np.ndarray) -> float:
    """max spectral norm over the leading axes of a (..., a, b) stack."""
    if mats.size == 0:
        return 0.0
    flat = mats.reshape(-1, mats.shape[-2], mats.shape[-1])
    return float(np.linalg.svd(flat, compute_uv=False)[:, 0].max())


def theorem_form_values(
    algebra: Algebra, reps: Sequence[np.ndarray], v_ops: Sequence[np.ndarray], k: int
) -> np.ndarray:
    """Values V_i* pi_1(..) .. pi_m(..) V_j on all basis tuples.

    Returns shape (d,)*k + (n*h, n*h) with (i, j) blocks of size h; used both
    by the factory (as a definition) and by verification (as the target).
    """
    d = algebra.dim
    m = (k + 1) // 2
    kappa = reps[0].shape[1]
    h = v_ops[0].shape[1]
    n = len(v_ops)
    mt = algebra.mult_table
    rep2 = [np.einsum("abr,rij->abij", mt, reps[f]) for f in range(m)]
    if k % 2 == 1:
        chain = reps[0]
        order = [m - 1]
        for f in range(1, m):
            chain = np.einsum("...ij,abjk->...abik", chain, rep2[f])
            order += [m - 1 - f, m - 1 + f]
    else:
        chain = rep2[0]
        order = [m - 1, m]
        for f in range(1, m):
            chain = np.einsum("...ij,abjk->...abik", chain, rep2[f])
            order += [m - 1 - f, m + f]
    # chain axes follow `order`; rearrange to slots 0..k-1
    inv = np.argsort(order)
    chain = chain.transpose(list(inv) + [k, k + 1])
    vs = np.hstack(v_ops) if kappa else np.zeros((0, n * h), dtype=np.complex128)
    vals = np.einsum("...ij,iu,jv->...uv", chain, vs.conj(), vs, optimize=True)
    return vals


def verify_dilation(phi, triple: DilationTriple, tol: float | None = None) -> DilationReport:
    """Residuals of the reconstruction identity and of the structural laws."""
    block = as_block_map(phi)
    alg, k = block.algebra, block.k
    if (alg, k, block.n, block.h) != (triple.algebra, triple.k, triple.n, triple.h):
        raise ValueError("triple shape does not match the map")
    d, m = alg.dim, block.m
    if triple.kappa == 0:
        recon = float(np.abs(block.stacked_coeffs()).max()) if block.stacked_coeffs().size else 0.0
        return DilationReport(recon, 0.0, 0.0, 0.0, 0.0)
    vals = theorem_form_values(alg, triple.reps, triple.V, k)
    target = block.stacked_coeffs()
    recon = _batched_opnorm_max(vals - target)
    mt = alg.mult_table
    mult_res = 0.0
    star_res = 0.0
    unital_res = 0.0
    comm_res = 0.0
    perm = alg.star_perm
    ident = alg.identity_coords
    for p in range(m):
        rp = triple.reps[p]
        prod = np.einsum("aij,bjk->abik", rp, rp)
        expected = np.einsum("abr,rij->abij", mt, rp)
        mult_res = max(mult_res, _batched_opnorm_max(prod - expected))
        star_res = max(star_res, _batched_opnorm_max(rp[perm] - rp.conj().transpose(0, 2, 1)))
        unit = np.tensordot(ident, rp, axes=(0, 0))
        unital_res = max(unital_res, float(np.linalg.norm(unit - np.eye(triple.kappa), 2)))
        for q in range(p + 1, m):
            rq = triple.reps[q]
            xy = np.einsum("aij,bjk->abik", rp, rq)
            yx = np.einsum("bij,ajk->abik", rq, rp)
            comm_res = max(comm_res, _batched_opnorm_max(xy - yx))
    return DilationReport(recon, mult_res, star_res, unital_res, comm_res)


# -- minimality and uniqueness ------------------------------------------------


def minimal_compress(
    triple: DilationTriple, phi=None, rank_tol: float = RANK_TOL
) -> tuple[DilationTriple, MinimalityReport]:
    """Restrict to the closed span of representation products applied to
    sum_j V_j H; the compressed triple still dilates the same map."""
    span = triple.spanning_matrix()
    if triple.kappa == 0 or span.size == 0:
        return triple, MinimalityReport(0, triple.kappa, triple.kappa == 0, np.zeros(0))
    u, s, _ = np.linalg.svd(span, full_matrices=False)
    rank = int((s > rank_tol * s[0]).sum()) if s.size and s[0] > 0 else 0
    q = u[:, :rank]
    reps = tuple(
        np.einsum("iu,aij,jv->auv", q.conj(), rp, q, optimize=True) for rp in triple.reps
    )
    v_ops = tuple(q.conj().T @ vj for vj in triple.V)
    compressed = DilationTriple(
        algebra=triple.algebra,
        k=triple.k,
        n=triple.n,
        h=triple.h,
        kappa=rank,
        reps=reps,
        V=v_ops,
        W=(q.conj().T @ triple.W) if triple.W is not None else None,
        rank_tol=rank_tol,
        meta={**triple.meta, "compressed_from": triple.kappa},
    )
    report = MinimalityReport(
        spanning_rank=rank,
        kappa=triple.kappa,
        is_minimal=(rank == triple.kappa),
        singular_values=s,
    )
    if phi is not None:
        report_residual = verify_dilation(phi, compressed)
        compressed.meta["verify"] = report_residual.to_dict()
    return compressed, report


def _assert_minimal(triple: DilationTriple, rank_tol: float) -> None:
    span = triple.spanning_matrix()
    if triple.kappa == 0:
        return
    s = np.linalg.svd(span, compute_uv=False)
    rank = int((s > rank_tol * s[0]).sum()) if s.size and s[0] > 0 else 0
    if rank != triple.kappa:
        raise ValueError(
            f"triple is not minimal: spanning rank {rank} < dimension {triple.kappa}"
        )


def unitary_equivalence(
    t1: DilationTriple, t2: DilationTriple, phi=None, rank_tol: float = RANK_TOL
) -> EquivalenceReport:
    """Assemble the intertwining unitary by least squares over the spanning
    family and measure how unitary and intertwining it actually is."""
    _assert_minimal(t1, rank_tol)
    _assert_minimal(t2, rank_tol)
    if t1.kappa != t2.kappa:
        raise ValueError(
            f"dimension mismatch after minimality: {t1.kappa} vs {t2.kappa} "
            "(triples cannot be unitarily equivalent)"
        )
    if t1.kappa == 0:
        return EquivalenceReport(U=np.zeros((0, 0), dtype=np.complex128), kappa=0)
    span1 = t1.spanning_matrix()
    span2 = t2.spanning_matrix()
    u_map = span2 @ np.linalg.pinv(span1)
    unitarity = float(np.linalg.norm(u_map.conj().T @ u_map - np.eye(t1.kappa), 2))
    prod1 = t1.product_tensor()
    prod2 = t2.product_tensor()
    inter = _batched_opnorm_max(prod2 @ u_map - u_map @ prod1)
    v_match = max(
        float(np.linalg.norm(u_map @ v1 - v2, 2)) for v1, v2 in zip(t1.V, t2.V)
    )
    return EquivalenceReport(
        U=u_map, unitarity=unitarity, intertwining=inter, v_match=v_match, kappa=t1.kappa
    )


def block_state_vectors(phi, triple: DilationTriple | None = None):
    """Scalar-codomain form: vectors f_j in K with
    phi_ij(..) = <pi-products f_j, f_i>; requires h = 1."""
    block = as_block_map(phi)
    if block.h != 1:
        raise ValueError(f"block-state form requires scalar codomain, got h={block.h}")
    if triple is None:
        triple = dilate(block)
    report = verify_dilation(block, triple)
    vectors = [vj[:, 0].copy() for vj in triple.V]
    return vectors, report
