"""Finite-dimensional von Neumann algebras ⊕M_{k_i} and coalgebras ⊕T_{k_i}.

Structure maps are stored as explicit tensors over the canonical basis
(so deliberately corrupted structures can be law-checked), the duality
functor transports structure through the trace pairing, and positivity is
available both concretely (block PSD) and through the comultiplication
factorization diagram.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeMismatchError
from .matcore import BlockMatrix, rand_complex, rand_unitary
from .normlab.brackets import NormBracket
from .normlab.diamond import cb_norm
from .supop import SuperOp

__all__ = [
    "VnAlgebra",
    "VnCoalgebra",
    "make_algebra",
    "make_coalgebra",
    "LawReport",
    "check_laws",
    "dualize",
    "PositivityVerdict",
    "positivity",
    "abstract_positive_functional",
    "MorphismVerdict",
    "certify_morphism",
    "structure_to_json_dict",
    "structure_from_json_dict",
    "morphism_claim",
    "certify_claim",
    "tensor_algebra",
    "direct_sum_algebra",
    "tensor_coalgebra",
    "direct_sum_coalgebra",
    "trace_pairing",
]


def _shape_dim(shape) -> int:
    return sum(k * k for k in shape)


def _basis(shape):
    d = _shape_dim(shape)
    for a in range(d):
        v = np.zeros(d, dtype=np.complex128)
        v[a] = 1.0
        yield a, v


def _transpose_perm(shape) -> np.ndarray:
    """Permutation R on coordinates with R·vec(x) = vec(xᵀ) blockwise."""
    d = _shape_dim(shape)
    p = np.zeros((d, d))
    off = 0
    for k in shape:
        for i in range(k):
            for j in range(k):
                p[off + j * k + i, off + i * k + j] = 1.0
        off += k * k
    return p


def trace_pairing(f: BlockMatrix, x: BlockMatrix) -> complex:
    """Bilinear pairing ⟨f, x⟩ = Σ_i tr(f_i x_i)."""
    f._check(x)
    return complex(sum(np.trace(a @ b) for a, b in zip(f.blocks, x.blocks)))


def _pairing_matrix(shape) -> np.ndarray:
    """Q with ⟨f, x⟩ = f_vecᵀ Q x_vec; Q is the blockwise transpose permutation."""
    return _transpose_perm(shape)


@dataclass(frozen=True)
class VnAlgebra:
    """shape + unit vector, multiplication matrix (dim × dim²), involution.

    The involution acts antilinearly: i(x) = inv_mat · conj(x_vec).
    """

    shape: tuple[int, ...]
    unit_vec: np.ndarray
    mult_mat: np.ndarray
    inv_mat: np.ndarray

    @property
    def dim(self) -> int:
        return _shape_dim(self.shape)

    def unit(self) -> BlockMatrix:
        return BlockMatrix.from_vector(self.unit_vec, self.shape)

    def multiply(self, x: BlockMatrix, y: BlockMatrix) -> BlockMatrix:
        v = self.mult_mat @ np.kron(x.to_vector(), y.to_vector())
        return BlockMatrix.from_vector(v, self.shape)

    def involute(self, x: BlockMatrix) -> BlockMatrix:
        return BlockMatrix.from_vector(self.inv_mat @ x.to_vector().conj(), self.shape)

    def norm(self, x: BlockMatrix) -> float:
        return x.op_norm()

    def random_element(self, rng, unit_norm=True) -> BlockMatrix:
        b = BlockMatrix([rand_complex(rng, k) for k in self.shape])
        if unit_norm and b.op_norm() > 0:
            b = b * (1.0 / b.op_norm())
        return b


@dataclass(frozen=True)
class VnCoalgebra:
    """shape + counit vector (as a functional rep), comultiplication, involution.

    counit(x) = ⟨counit_rep, x⟩; comult_mat maps dim → dim²; involution
    antilinear as in VnAlgebra.
    """

    shape: tuple[int, ...]
    counit_vec: np.ndarray
    comult_mat: np.ndarray
    inv_mat: np.ndarray

    @property
    def dim(self) -> int:
        return _shape_dim(self.shape)

    def counit(self, x: BlockMatrix) -> complex:
        rep = BlockMatrix.from_vector(self.counit_vec, self.shape)
        return trace_pairing(rep, x)

    def comult(self, x: BlockMatrix) -> np.ndarray:
        """Coordinates of δ(x) in the tensor basis of C ⊗ C."""
        return self.comult_mat @ x.to_vector()

    def involute(self, x: BlockMatrix) -> BlockMatrix:
        return BlockMatrix.from_vector(self.inv_mat @ x.to_vector().conj(), self.shape)

    def norm(self, x: BlockMatrix) -> float:
        return x.tr_norm()

    def random_element(self, rng, unit_norm=True) -> BlockMatrix:
        b = BlockMatrix([rand_complex(rng, k) for k in self.shape])
        if unit_norm and b.tr_norm() > 0:
            b = b * (1.0 / b.tr_norm())
        return b


def make_algebra(shape) -> VnAlgebra:
    shape = tuple(int(k) for k in shape)
    if any(k < 0 for k in shape):
        raise ShapeMismatchError("block sizes must be >= 0")
    d = _shape_dim(shape)
    unit = BlockMatrix.identity(shape).to_vector()
    mult = np.zeros((d, d * d), dtype=np.complex128)
    for a, va in _basis(shape):
        xa = BlockMatrix.from_vector(va, shape)
        for b, vb in _basis(shape):
            xb = BlockMatrix.from_vector(vb, shape)
            mult[:, a * d + b] = (xa @ xb).to_vector()
    return VnAlgebra(shape, unit, mult, _transpose_perm(shape))


def make_coalgebra(shape) -> VnCoalgebra:
    """⊕T_{k_i}: counit = blockwise trace, δ(e_ij) = Σ_k e_kj ⊗ e_ik per block."""
    shape = tuple(int(k) for k in shape)
    if any(k < 0 for k in shape):
        raise ShapeMismatchError("block sizes must be >= 0")
    d = _shape_dim(shape)
    counit = BlockMatrix.identity(shape).to_vector()
    comult = np.zeros((d * d, d), dtype=np.complex128)
    off = 0
    for blk, n in enumerate(shape):
        for i in range(n):
            for j in range(n):
                col = off + i * n + j
                for k in range(n):
                    a = off + k * n + j  # e_kj
                    b = off + i * n + k  # e_ik
                    comult[a * d + b, col] += 1.0
        off += n * n
    return VnCoalgebra(shape, counit, comult, _transpose_perm(shape))


# ---------------------------------------------------------------------------
# law suites

@dataclass
class LawReport:
    kind: str
    passed: bool
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def fail(self, name: str, value: float):
        self.failures.append((name, float(value)))
        self.passed = False


def _swap_tensor(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            s[b * d + a, a * d + b] = 1.0
    return s


def check_laws(
    structure,
    sample_count: int = 100,
    tol: float = 1e-9,
    rng: np.random.Generator | None = None,
    exact_tol: float = 1e-12,
) -> LawReport:
    rng = rng or np.random.default_rng(0)
    if isinstance(structure, VnAlgebra):
        return _check_algebra_laws(structure, sample_count, tol, rng, exact_tol)
    if isinstance(structure, VnCoalgebra):
        return _check_coalgebra_laws(structure, sample_count, tol, rng, exact_tol)
    raise TypeError("check_laws wants a VnAlgebra or VnCoalgebra")


def _check_algebra_laws(alg: VnAlgebra, samples, tol, rng, exact_tol) -> LawReport:
    rep = LawReport("algebra", True)
    d = alg.dim
    m, eye = alg.mult_mat, np.eye(d)
    # associativity μ(μ⊗id) = μ(id⊗μ)
    lhs = m @ np.kron(m, eye)
    rhs = m @ np.kron(eye, m)
    err = np.max(np.abs(lhs - rhs)) if d else 0.0
    if err > exact_tol:
        rep.fail("associativity", err)
    # unit laws
    uv = alg.unit_vec.reshape(d, 1) if d else alg.unit_vec.reshape(0, 1)
    lu = m @ np.kron(uv, eye)
    ru = m @ np.kron(eye, uv)
    for name, mat in (("left_unit", lu), ("right_unit", ru)):
        err = np.max(np.abs(mat - eye)) if d else 0.0
        if err > exact_tol:
            rep.fail(name, err)
    # involution squared: i(i(x)) = x  ⇔  P·conj(P) = I for i(x) = P conj(x)
    err = np.max(np.abs(alg.inv_mat @ alg.inv_mat.conj() - eye)) if d else 0.0
    if err > exact_tol:
        rep.fail("involution_squared", err)
    # reverse multiplicativity (ab)* = b*a* on all basis pairs
    err = 0.0
    for a, va in _basis(alg.shape):
        xa = BlockMatrix.from_vector(va, alg.shape)
        ia = alg.involute(xa)
        for b, vb in _basis(alg.shape):
            xb = BlockMatrix.from_vector(vb, alg.shape)
            lhsv = alg.involute(alg.multiply(xa, xb)).to_vector()
            rhsv = alg.multiply(alg.involute(xb), ia).to_vector()
            err = max(err, float(np.max(np.abs(lhsv - rhsv))) if d else 0.0)
    if err > exact_tol:
        rep.fail("reverse_multiplicativity", err)
    # C*-identity and submultiplicativity on samples + canonical unitaries
    worst_c, worst_s = 0.0, 0.0
    specials = [BlockMatrix.identity(alg.shape)] + [
        BlockMatrix([rand_unitary(rng, k) for k in alg.shape]) for _ in range(3)
    ]
    for idx in range(samples):
        x = (
            specials[idx]
            if idx < len(specials)
            else alg.random_element(rng, unit_norm=True)
        )
        n = alg.norm(x)
        if n == 0:
            continue
        worst_c = max(worst_c, abs(alg.norm(alg.multiply(alg.involute(x), x)) - n * n))
        y = alg.random_element(rng, unit_norm=False)
        worst_s = max(
            worst_s, alg.norm(alg.multiply(x, y)) - n * alg.norm(y)
        )
    if worst_c > tol:
        rep.fail("cstar_identity", worst_c)
    if worst_s > tol:
        rep.fail("submultiplicativity", worst_s)
    rep.details = {"cstar_worst": worst_c, "submult_worst": worst_s}
    return rep


def _coalg_cq_composite(co: VnCoalgebra, e_rep: BlockMatrix) -> BlockMatrix:
    """Representing matrix of the co-C*-identity composite functional.

    The composite  C_o → (C⊗C)_o → C_o⊗C_o → C_o⊗C_c → C_o⊗C_c ≅ C  applied
    to a basis vector c gives Σ e(c₍₂₎)·conj(e(j(c₍₁₎))) over δ(c) = Σ c₍₁₎⊗c₍₂₎;
    on T_n with e = tr(a·) this reproduces tr(a*a ·).
    """
    d = co.dim
    q = _pairing_matrix(co.shape)
    e_vec = e_rep.to_vector()
    ev = q @ e_vec  # ev[p] = e(basis_p)
    evj = co.inv_mat.T @ ev  # evj[p] = e(j(basis_p)); basis coords are real
    dv = co.comult_mat.reshape(d, d, d)  # (first slot, second slot, input)
    out = np.einsum("pqa,p,q->a", dv, evj.conj(), ev)
    # out[α] is the composite's value on basis_α; rep satisfies tr(r·e_α)=out[α]
    return BlockMatrix.from_vector(q @ out, co.shape)


def _check_coalgebra_laws(co: VnCoalgebra, samples, tol, rng, exact_tol) -> LawReport:
    rep = LawReport("coalgebra", True)
    d = co.dim
    dm, eye = co.comult_mat, np.eye(d)
    # coassociativity (δ⊗id)δ = (id⊗δ)δ
    lhs = np.kron(dm, eye) @ dm
    rhs = np.kron(eye, dm) @ dm
    err = np.max(np.abs(lhs - rhs)) if d else 0.0
    if err > exact_tol:
        rep.fail("coassociativity", err)
    # counit laws (ε⊗id)δ = id = (id⊗ε)δ
    q = _pairing_matrix(co.shape)
    eps_row = (q @ co.counit_vec).reshape(1, d)  # ε as a row on coordinates
    lc = np.kron(eps_row, eye) @ dm
    rc = np.kron(eye, eps_row) @ dm
    for name, mat in (("left_counit", lc), ("right_counit", rc)):
        err = np.max(np.abs(mat - eye)) if d else 0.0
        if err > exact_tol:
            rep.fail(name, err)
    # involution squared
    err = np.max(np.abs(co.inv_mat @ co.inv_mat.conj() - eye)) if d else 0.0
    if err > exact_tol:
        rep.fail("involution_squared", err)
    # reverse comultiplicativity: δ(j(c)) = (j⊗j)(γ(δ(c))) on basis
    err = 0.0
    s = _swap_tensor(d)
    for a, va in _basis(co.shape):
        xc = BlockMatrix.from_vector(va, co.shape)
        lhsv = co.comult(co.involute(xc))
        inner = (s @ co.comult(xc).conj())
        rhsv = np.kron(co.inv_mat, co.inv_mat) @ inner
        err = max(err, float(np.max(np.abs(lhsv - rhsv))) if d else 0.0)
    if err > exact_tol:
        rep.fail("reverse_comultiplicativity", err)
    # co-C*-identity on random norm-one functionals
    worst = 0.0
    for idx in range(samples):
        if idx == 0:
            e_rep = BlockMatrix.identity(co.shape)
        else:
            e_rep = BlockMatrix([rand_complex(rng, k) for k in co.shape])
        n = e_rep.op_norm()
        if n == 0:
            continue
        e_rep = e_rep * (1.0 / n)
        comp = _coalg_cq_composite(co, e_rep)
        worst = max(worst, abs(comp.op_norm() - 1.0))
    if worst > tol:
        rep.fail("co_cstar_identity", worst)
    rep.details = {"co_cstar_worst": worst}
    return rep


# ---------------------------------------------------------------------------
# duality

def dualize(structure):
    """Trace-pairing transport: algebras ↔ coalgebras on the same shape."""
    if isinstance(structure, VnAlgebra):
        q = _pairing_matrix(structure.shape)
        qq = np.kron(q, q)
        comult = qq @ structure.mult_mat.T @ q
        return VnCoalgebra(
            structure.shape,
            structure.unit_vec.copy(),
            comult,
            structure.inv_mat.copy(),
        )
    if isinstance(structure, VnCoalgebra):
        q = _pairing_matrix(structure.shape)
        qq = np.kron(q, q)
        mult = q @ structure.comult_mat.T @ qq
        return VnAlgebra(
            structure.shape,
            structure.counit_vec.copy(),
            mult,
            structure.inv_mat.copy(),
        )
    raise TypeError("dualize wants a VnAlgebra or VnCoalgebra")


# ---------------------------------------------------------------------------
# positivity

@dataclass(frozen=True)
class PositivityVerdict:
    positive: bool
    witness: BlockMatrix | None
    diagnostic: float  # min eigenvalue (or hermiticity defect if negative path)


def positivity(p: BlockMatrix, structure, tol: float = 1e-9) -> PositivityVerdict:
    """Concrete check: blockwise PSD; witness a with a*a = p via spectral root.

    For algebras p is an element; for coalgebras p is the representing matrix
    of a functional under the trace pairing — the same matrix-level test by
    the abstract/concrete equivalence.
    """
    min_eig = np.inf
    herm_defect = 0.0
    for b in p.blocks:
        if b.size == 0:
            continue
        herm_defect = max(herm_defect, float(np.linalg.norm(b - b.conj().T, 2)))
        min_eig = min(min_eig, float(np.linalg.eigvalsh((b + b.conj().T) / 2)[0]))
    if min_eig is np.inf:
        min_eig = 0.0
    if herm_defect > tol or min_eig < -tol:
        return PositivityVerdict(False, None, min(min_eig, -herm_defect))
    roots = []
    for b in p.blocks:
        if b.size == 0:
            roots.append(b)
            continue
        w, v = np.linalg.eigh((b + b.conj().T) / 2)
        w = np.clip(w, 0.0, None)
        roots.append(v @ np.diag(np.sqrt(w)) @ v.conj().T)
    return PositivityVerdict(True, BlockMatrix(roots), min_eig)


def abstract_positive_functional(
    co: VnCoalgebra, p_rep: BlockMatrix, tol: float = 1e-8
):
    """Factorization test through the comultiplication diagram.

    Searches for a functional a with p = (a ⊗ ā)∘(C_o⊗j)∘γ∘δ; on concrete
    coalgebras the candidate is the spectral square root.  Returns
    (is_positive, witness_rep or None, reproduction_error).
    """
    verdict = positivity(p_rep, co, tol)
    if not verdict.positive:
        return False, None, abs(verdict.diagnostic)
    a_rep = verdict.witness
    rebuilt = _coalg_cq_composite(co, a_rep)
    err = (rebuilt - p_rep).op_norm()
    if err > tol * max(1.0, p_rep.op_norm()):
        return False, None, err
    return True, a_rep, err


# ---------------------------------------------------------------------------
# morphism certification

@dataclass
class MorphismVerdict:
    ok: bool
    mode: str
    failures: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def certify_morphism(
    f: SuperOp,
    src,
    dst,
    mode: str,
    tol: float = 1e-9,
    with_cb_check: bool = True,
) -> MorphismVerdict:
    v = MorphismVerdict(True, mode)
    if tuple(f.dom_shape) != tuple(src.shape) or tuple(f.cod_shape) != tuple(dst.shape):
        raise ShapeMismatchError("morphism shapes do not match the structures")
    flags = f.classify(tol)
    v.diagnostics["flags"] = flags
    if mode in ("cpu", "cptp"):
        if not flags.cp:
            v.ok = False
            v.failures.append(("cp", flags.min_choi_eig))
        want_unital = mode == "cpu"
        if want_unital and not flags.unital:
            v.ok = False
            v.failures.append(("unital", flags.unit_defect))
        if mode == "cptp" and not flags.tp:
            v.ok = False
            v.failures.append(("tp", flags.trace_defect))
        if with_cb_check and v.ok:
            picture = "operator" if mode == "cpu" else "trace"
            br: NormBracket = cb_norm(f, picture)
            v.diagnostics["cb_norm"] = (br.lower, br.upper)
            if br.status == "exact" and abs(br.mid - 1.0) > 1e-6:
                v.ok = False
                v.failures.append(("cb_norm_one", br.mid - 1.0))
        return v
    if mode == "alg_hom":
        return _check_alg_hom(f, src, dst, tol, v)
    if mode == "coalg_hom":
        return _check_coalg_hom(f, src, dst, tol, v)
    raise ValueError(f"unknown morphism mode {mode!r}")


def _check_alg_hom(f, alg_a: VnAlgebra, alg_b: VnAlgebra, tol, v) -> MorphismVerdict:
    err_u = (f.apply(alg_a.unit()) - alg_b.unit()).op_norm()
    if err_u > tol:
        v.ok = False
        v.failures.append(("unital", err_u))
    err_m, err_i = 0.0, 0.0
    for _, va in _basis(alg_a.shape):
        xa = BlockMatrix.from_vector(va, alg_a.shape)
        fi = f.apply(xa)
        err_i = max(err_i, (f.apply(alg_a.involute(xa)) - alg_b.involute(fi)).op_norm())
        for _, vb in _basis(alg_a.shape):
            xb = BlockMatrix.from_vector(vb, alg_a.shape)
            lhs = f.apply(alg_a.multiply(xa, xb))
            rhs = alg_b.multiply(fi, f.apply(xb))
            err_m = max(err_m, (lhs - rhs).op_norm())
    if err_m > tol:
        v.ok = False
        v.failures.append(("multiplicative", err_m))
    if err_i > tol:
        v.ok = False
        v.failures.append(("involutive", err_i))
    v.diagnostics.update({"mult_err": err_m, "inv_err": err_i, "unit_err": err_u})
    return v


def _check_coalg_hom(f, co_c: VnCoalgebra, co_d: VnCoalgebra, tol, v) -> MorphismVerdict:
    err_c, err_d, err_i = 0.0, 0.0, 0.0
    ff = None
    for _, vc in _basis(co_c.shape):
        xc = BlockMatrix.from_vector(vc, co_c.shape)
        fx = f.apply(xc)
        err_c = max(err_c, abs(co_d.counit(fx) - co_c.counit(xc)))
        err_i = max(err_i, (f.apply(co_c.involute(xc)) - co_d.involute(fx)).tr_norm())
        if ff is None:
            d1, d2 = co_c.dim, co_d.dim
            tm = np.zeros((d2, d1), dtype=np.complex128)
            for a, va in _basis(co_c.shape):
                tm[:, a] = f.apply(
                    BlockMatrix.from_vector(va, co_c.shape)
                ).to_vector()
            ff = np.kron(tm, tm)
        lhs = co_d.comult(fx)
        rhs = ff @ co_c.comult(xc)
        err_d = max(err_d, float(np.max(np.abs(lhs - rhs))))
    if err_c > tol:
        v.ok = False
        v.failures.append(("counital", err_c))
    if err_d > tol:
        v.ok = False
        v.failures.append(("comultiplicative", err_d))
    if err_i > tol:
        v.ok = False
        v.failures.append(("involutive", err_i))
    v.diagnostics.update({"counit_err": err_c, "comult_err": err_d, "inv_err": err_i})
    return v


# ---------------------------------------------------------------------------
# serialization: structures as {kind, shape}, morphism claims as
# {choi, src, dst, mode}

def structure_to_json_dict(structure) -> dict:
    if isinstance(structure, VnAlgebra):
        return {"kind": "algebra", "shape": list(structure.shape)}
    if isinstance(structure, VnCoalgebra):
        return {"kind": "coalgebra", "shape": list(structure.shape)}
    raise TypeError("expected a VnAlgebra or VnCoalgebra")


def structure_from_json_dict(d: dict):
    if d["kind"] == "algebra":
        return make_algebra(d["shape"])
    if d["kind"] == "coalgebra":
        return make_coalgebra(d["shape"])
    raise ValueError(f"unknown structure kind {d['kind']!r}")


def morphism_claim(f: SuperOp, src, dst, mode: str) -> dict:
    from .matcore import format_matrix_literal

    return {
        "choi": format_matrix_literal(f.big_choi()),
        "src": structure_to_json_dict(src),
        "dst": structure_to_json_dict(dst),
        "mode": mode,
    }


def certify_claim(claim: dict, tol: float = 1e-9) -> MorphismVerdict:
    from .matcore import parse_matrix_literal

    src = structure_from_json_dict(claim["src"])
    dst = structure_from_json_dict(claim["dst"])
    f = SuperOp.from_big_choi(parse_matrix_literal(claim["choi"]), src.shape, dst.shape)
    return certify_morphism(f, src, dst, claim["mode"], tol)


# ---------------------------------------------------------------------------
# tensor and direct-sum structures (via the interchange/shuffle composites)

def direct_sum_algebra(a: VnAlgebra, b: VnAlgebra) -> VnAlgebra:
    """A ⊕∞ B with pointwise structure (the v' interchange composite)."""
    return make_algebra(a.shape + b.shape)


def direct_sum_coalgebra(c: VnCoalgebra, d: VnCoalgebra) -> VnCoalgebra:
    return make_coalgebra(c.shape + d.shape)


def _pair_shape(a_shape, b_shape) -> tuple[int, ...]:
    return tuple(ka * kb for ka in a_shape for kb in b_shape)


def _tensor_reindex(a_shape, b_shape) -> np.ndarray:
    """Basis bijection  V(A)⊗V(B) → V(⊕_{ij} M_{k_i·l_j})  (coordinate map).

    e_pq^(i) ⊗ e_rs^(j) ↦ E_{(p,r),(q,s)} in block (i,j).
    """
    da, db = _shape_dim(a_shape), _shape_dim(b_shape)
    d = da * db
    mat = np.zeros((d, d))
    a_off = np.cumsum([0] + [k * k for k in a_shape])
    b_off = np.cumsum([0] + [k * k for k in b_shape])
    out_off = {}
    pos = 0
    for i, ka in enumerate(a_shape):
        for j, kb in enumerate(b_shape):
            out_off[(i, j)] = pos
            pos += (ka * kb) ** 2
    for i, ka in enumerate(a_shape):
        for j, kb in enumerate(b_shape):
            for p in range(ka):
                for q in range(ka):
                    for r in range(kb):
                        for s in range(kb):
                            src = (a_off[i] + p * ka + q) * db + (b_off[j] + r * kb + s)
                            dst = out_off[(i, j)] + (p * kb + r) * (ka * kb) + (
                                q * kb + s
                            )
                            mat[dst, src] = 1.0
    return mat


def tensor_algebra(a: VnAlgebra, b: VnAlgebra) -> VnAlgebra:
    """A ⊗̌ B realized on the pairwise block shape via the basis bijection."""
    return make_algebra(_pair_shape(a.shape, b.shape))


def tensor_coalgebra(c: VnCoalgebra, d: VnCoalgebra) -> VnCoalgebra:
    """C ⊗̂ D realized on the pairwise block shape via the basis bijection."""
    return make_coalgebra(_pair_shape(c.shape, d.shape))


def tensor_algebra_structure_composite(a: VnAlgebra, b: VnAlgebra):
    """Literal interchange-based structure tensors of A ⊗̌ B (for law checks).

    Returns (unit_vec, mult_mat, inv_mat) over the plain V(A)⊗V(B) basis,
    with μ = (μ_A ⊗ μ_B) ∘ v built from the shuffle permutation.
    """
    da, db = a.dim, b.dim
    unit = np.kron(a.unit_vec, b.unit_vec)
    v_shuffle = _shuffle_perm(da, db, da, db)
    mult = np.kron(a.mult_mat, b.mult_mat) @ v_shuffle
    inv = np.kron(a.inv_mat, b.inv_mat)
    return unit, mult, inv


def tensor_coalgebra_structure_composite(c: VnCoalgebra, d: VnCoalgebra):
    """Literal w-shuffle composite: δ = w ∘ (δ_C ⊗ δ_D), ε = ε_C ⊗ ε_D."""
    dc, dd = c.dim, d.dim
    counit = np.kron(c.counit_vec, d.counit_vec)  # pairing reps kron
    w_shuffle = _shuffle_perm(dc, dc, dd, dd)
    comult = w_shuffle @ np.kron(c.comult_mat, d.comult_mat)
    inv = np.kron(c.inv_mat, d.inv_mat)
    return counit, comult, inv


def _shuffle_perm(da, db, dc, dd) -> np.ndarray:
    """(A⊗B)⊗(C⊗D) → (A⊗C)⊗(B⊗D) on coordinates."""
    n = da * db * dc * dd
    mat = np.zeros((n, n))
    for ia in range(da):
        for ib in range(db):
            for ic in range(dc):
                for id_ in range(dd):
                    src = ((ia * db + ib) * dc + ic) * dd + id_
                    dst = ((ia * dc + ic) * db + ib) * dd + id_
                    mat[dst, src] = 1.0
    return mat
