"""Completely bounded norms of superoperators.

The trace-picture cb norm (diamond norm) is computed by the standard
two-block SDP over the Choi matrix; the operator-picture cb norm is the
diamond norm of the trace-pairing adjoint.  Scalar domains/codomains take
the closed-form shortcut (cb-norm = operator norm there), and block maps are
flattened through the completely isometric block-diagonal embeddings.
"""
from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatchError
from ..matcore import BlockMatrix, op_norm, tr_norm
from ..supop import SuperOp
from .brackets import NormBracket
from .sdp import HermBasis, SdpProblem, real_embed_herm, sdp_solve

__all__ = [
    "diamond_norm",
    "cb_norm",
    "functional_norm",
    "functional_rep",
    "dual_level_norm",
    "diamond_seesaw_lower",
]


def functional_rep(s: SuperOp) -> BlockMatrix:
    """Representing matrices of a functional-shaped map (codomain [1]).

    The blocks r_i satisfy s(x) = Σ_i tr(r_i x_i).
    """
    if tuple(s.cod_shape) != (1,):
        raise ShapeMismatchError("functional_rep needs codomain shape [1]")
    reps = []
    for i, k in enumerate(s.dom_shape):
        # s(E_ab) = tr(r E_ab) = r[b,a]
        kt = s.transfer_block(i, 0).reshape(k, k)  # entry (a,b): s(E_ab)
        reps.append(kt.T.copy())
    return BlockMatrix(reps)


def functional_norm(rep: BlockMatrix, picture: str) -> float:
    """Norm of the functional x ↦ Σ tr(r_i x_i) on ⊕M (operator) or ⊕T (trace).

    Operator picture: the unit ball is the ℓ∞ product of operator-norm balls,
    so the norm is Σ_i ‖r_i‖_tr.  Trace picture: the ball is the convex hull
    of the block trace-norm balls, giving max_i ‖r_i‖.
    """
    if picture == "operator":
        return sum(tr_norm(b) for b in rep.blocks)
    if picture == "trace":
        return max((op_norm(b) for b in rep.blocks), default=0.0)
    raise ValueError(f"unknown picture {picture!r}")


def _diamond_sdp(J: np.ndarray, K: int, L: int, rel_gap: float) -> NormBracket:
    """max Re tr(J†X) s.t. [[1_L⊗ρ0, X], [X†, 1_L⊗ρ1]] ⪰ 0, tr ρ = 1.

    For Hermitian J the optimum is attained with ρ0 = ρ1 and X Hermitian
    (feasible points symmetrize without changing the objective), which halves
    the variable count.
    """
    d = L * K
    herm = bool(np.allclose(J, J.conj().T, atol=1e-13, rtol=0.0))
    hb = HermBasis(K)
    n_h = len(hb)
    eye_l = np.eye(L)
    dim_c = 2 * d  # complex block size

    if herm:
        hx = HermBasis(d)
        m = n_h + len(hx)
        f_list = np.zeros((m, 2 * dim_c, 2 * dim_c))
        c = np.zeros(m)
        blk = np.zeros((dim_c, dim_c), dtype=np.complex128)
        for t, hmat in enumerate(hb.mats):
            blk[:] = 0
            blk[:d, :d] = np.kron(eye_l, hmat)
            blk[d:, d:] = np.kron(eye_l, hmat)
            f_list[t] = real_embed_herm(blk)
        for t, hmat in enumerate(hx.mats):
            blk[:] = 0
            blk[:d, d:] = hmat
            blk[d:, :d] = hmat.conj().T
            f_list[n_h + t] = real_embed_herm(blk)
            c[n_h + t] = -float(np.trace(J @ hmat).real)
        eq_a = np.zeros((1, m))
        eq_a[0, :K] = 1.0
        eq_b = np.ones(1)
        slater = np.zeros(m)
        slater[:K] = 1.0 / K
    else:
        m = 2 * n_h + 2 * d * d
        f_list = np.zeros((m, 2 * dim_c, 2 * dim_c))
        c = np.zeros(m)
        blk = np.zeros((dim_c, dim_c), dtype=np.complex128)
        for t, hmat in enumerate(hb.mats):
            blk[:] = 0
            blk[:d, :d] = np.kron(eye_l, hmat)
            f_list[t] = real_embed_herm(blk)
            blk[:] = 0
            blk[d:, d:] = np.kron(eye_l, hmat)
            f_list[n_h + t] = real_embed_herm(blk)
        base = 2 * n_h
        for a in range(d):
            for b in range(d):
                idx = base + 2 * (a * d + b)
                blk[:] = 0
                blk[a, d + b] = 1.0
                blk[d + b, a] = 1.0
                f_list[idx] = real_embed_herm(blk)
                c[idx] = -J[a, b].real
                blk[:] = 0
                blk[a, d + b] = 1j
                blk[d + b, a] = -1j
                f_list[idx + 1] = real_embed_herm(blk)
                c[idx + 1] = -J[a, b].imag
        eq_a = np.zeros((2, m))
        eq_a[0, :K] = 1.0
        eq_a[1, n_h : n_h + K] = 1.0
        eq_b = np.ones(2)
        slater = np.zeros(m)
        slater[:K] = 1.0 / K
        slater[n_h : n_h + K] = 1.0 / K

    prob = SdpProblem(
        c=c,
        f0=[np.zeros((2 * dim_c, 2 * dim_c))],
        fs=[f_list],
        eq_a=eq_a,
        eq_b=eq_b,
        slater=slater,
    )
    res = sdp_solve(prob, rel_gap=rel_gap)
    if res.status != "optimal":
        return NormBracket.unknown()
    lower = max(0.0, -res.value)
    upper = max(lower, -res.dual_value)
    return NormBracket.from_bounds(lower, upper, {"sdp_iterations": res.iterations})


def diamond_norm(s: SuperOp, rel_gap: float = 1e-8) -> NormBracket:
    """cb norm of s viewed T_dom → T_cod (the diamond norm)."""
    K, L = sum(s.dom_shape), sum(s.cod_shape)
    if K == 0 or L == 0:
        return NormBracket.exactly(0.0)
    if K == 1:
        # map C → ⊕T: norm of the image element
        img = s.apply(BlockMatrix.identity(s.dom_shape) if s.dom_shape == (1,) else None)
        return NormBracket.exactly(img.tr_norm())
    if L == 1:
        return NormBracket.exactly(functional_norm(functional_rep(s), "trace"))
    return _diamond_sdp(s.big_choi(), K, L, rel_gap)


def cb_norm(s: SuperOp, picture: str, rel_gap: float = 1e-8) -> NormBracket:
    """cb norm in the stated picture; scalar ends short-circuit to op norms."""
    K, L = sum(s.dom_shape), sum(s.cod_shape)
    if picture == "trace":
        return diamond_norm(s, rel_gap)
    if picture != "operator":
        raise ValueError(f"unknown picture {picture!r}")
    if K == 0 or L == 0:
        return NormBracket.exactly(0.0)
    if K == 1:
        img = s.apply(BlockMatrix.identity((1,)))
        return NormBracket.exactly(img.op_norm())
    if L == 1:
        return NormBracket.exactly(functional_norm(functional_rep(s), "operator"))
    return diamond_norm(s.adjoint(), rel_gap)


def dual_level_norm(coords: np.ndarray, dom_shape, level: int, rel_gap: float = 1e-8) -> NormBracket:
    """Norm of x ∈ M_k((⊕∞M)*): the cb norm of b ↦ [⟨x_ij, b⟩] into M_k.

    coords has shape (k, k, dim) with the trace-pairing representing vectors
    of each entry (pairing ⟨r, b⟩ = Σ_i tr(r_i b_i)).
    """
    dom_shape = tuple(dom_shape)
    k = level
    coords = np.asarray(coords, dtype=np.complex128)
    dim = sum(n * n for n in dom_shape)
    if coords.shape != (k, k, dim):
        raise ShapeMismatchError(f"coords shape {coords.shape} for level {k}")
    if k == 1:
        rep = BlockMatrix.from_vector(coords[0, 0], dom_shape)
        return NormBracket.exactly(functional_norm(rep, "operator"))
    reps = [
        [BlockMatrix.from_vector(coords[i, j], dom_shape) for j in range(k)]
        for i in range(k)
    ]

    def act(b: BlockMatrix) -> BlockMatrix:
        out = np.empty((k, k), dtype=np.complex128)
        for i in range(k):
            for j in range(k):
                out[i, j] = sum(
                    np.trace(r @ x) for r, x in zip(reps[i][j].blocks, b.blocks)
                )
        return BlockMatrix([out])

    phi = SuperOp.from_action(act, dom_shape, (k,))
    return cb_norm(phi, "operator", rel_gap)


def diamond_seesaw_lower(
    s: SuperOp,
    level: int | None = None,
    rng: np.random.Generator | None = None,
    starts: int = 6,
    iters: int = 60,
    init_pairs=None,
) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """Brute-force lower bound: max ‖(id_k ⊗ s)(ψφ†)‖_tr over unit vectors.

    Independent of the SDP route; converges to the diamond norm when `level`
    reaches the domain dimension.  Returns (value, best (ψ, φ)).
    """
    rng = rng or np.random.default_rng(0)
    K, L = sum(s.dom_shape), sum(s.cod_shape)
    k = level if level is not None else K
    big = SuperOp.from_big_choi(s.big_choi(), (K,), (L,))
    lam = SuperOp.from_big_choi(
        SuperOp.from_action(lambda x: x, (k,), (k,)).tensor(big).big_choi(),
        (k * K,),
        (k * L,),
    )
    dim = k * K

    def trnorm_of(psi, phi):
        return tr_norm(lam(np.outer(psi, phi.conj())))

    def unit(v):
        n = np.linalg.norm(v)
        return v / n if n > 0 else v

    best_val, best_pair = 0.0, None
    cand = []
    for _ in range(starts):
        cand.append(
            (
                unit(rng.standard_normal(dim) + 1j * rng.standard_normal(dim)),
                unit(rng.standard_normal(dim) + 1j * rng.standard_normal(dim)),
            )
        )
    if init_pairs:
        cand.extend(init_pairs)
    basis = np.eye(dim)
    for psi, phi in cand:
        for _ in range(iters):
            m = lam(np.outer(psi, phi.conj()))
            u, sv, vh = np.linalg.svd(m)
            uopt = u @ vh  # maximizer of Re tr(U† M) over contractions
            # linearize in ψ: Re tr(U†Λ(ψφ†)) = Re Σ_a ψ_a c_a
            cvec = np.array(
                [np.trace(uopt.conj().T @ lam(np.outer(basis[a], phi.conj()))) for a in range(dim)]
            )
            psi_new = unit(cvec.conj())
            tvec = np.array(
                [np.trace(uopt.conj().T @ lam(np.outer(psi_new, basis[b]))) for b in range(dim)]
            )
            phi_new = unit(tvec)
            if (
                np.linalg.norm(psi_new - psi) < 1e-12
                and np.linalg.norm(phi_new - phi) < 1e-12
            ):
                psi, phi = psi_new, phi_new
                break
            psi, phi = psi_new, phi_new
        val = trnorm_of(psi, phi)
        if val > best_val:
            best_val, best_pair = val, (psi, phi)
    return best_val, best_pair
