"""The glued category of operator spaces with bipolar subsets of the unit ball.

Objects pair a space with a symbolically described subset; polars are taken
symbolically with the collapses the theory licenses (density sets, unit sets,
unitary singletons, triple-polar absorption), and membership is three-valued:
yes / no / unknown — an unsupported bipolar closure answers unknown rather
than guessing.  Tensor-factor coordinates use the shared canonical basis, so
elementary tensors are plain outer products of coordinate vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .errors import ShapeMismatchError
from .matcore import BlockMatrix, kron, op_norm, rand_complex, rand_unitary
from .normlab.brackets import NormBracket
from .normlab.diamond import cb_norm
from .osx import (
    M,
    SpaceElement,
    SpaceExpr,
    algebra_space,
    coalgebra_space,
    dim,
    dual,
    format_space,
    norm_at,
    normalize_space,
    sum_1,
    sum_inf,
    tens_min,
    tens_proj,
)
from .supop import SuperOp
from .vnstruct import VnAlgebra, VnCoalgebra

__all__ = [
    "SetSpec",
    "QObject",
    "unit_set",
    "density_ops",
    "singleton_unitary",
    "finite_set",
    "embed_H",
    "embed_S",
    "unit_object",
    "generators",
    "polar",
    "membership",
    "connective",
    "check_morphism",
    "MorphismResult",
    "quantum_switch_map",
    "quantum_switch",
]


@dataclass(frozen=True)
class SetSpec:
    """Symbolic subset of the unit ball of `space`.

    kinds: empty | full_ball | unit_set(shape) | density_ops(shape) |
    singleton_unitary(shape, u) | finite(elems, closure) | polar_of(inner) |
    product(s, r) | sum_polar(s, r) | tensor_bipolar(s, r) | par_polar(s, r)
    """

    kind: str
    space: SpaceExpr
    payload: tuple = ()

    @property
    def decision(self) -> str:
        if self.kind in (
            "empty",
            "full_ball",
            "unit_set",
            "density_ops",
            "singleton_unitary",
            "finite",
        ):
            return "decidable"
        if self.kind in ("product", "sum_polar"):
            subs = {p.decision for p in self.payload}
            return "decidable" if subs == {"decidable"} else "semi"
        if self.kind == "polar_of":
            _, exhaustive = generators(self.payload[0])
            if exhaustive and _ball_norm_decidable(self.space):
                return "decidable"
            return "semi"
        return "semi"

    def describe(self) -> dict:
        if self.kind in ("unit_set", "density_ops"):
            return {"kind": self.kind, "shape": list(self.payload[0])}
        if self.kind == "singleton_unitary":
            return {"kind": self.kind, "shape": list(self.payload[0])}
        if self.kind == "finite":
            return {"kind": self.kind, "count": len(self.payload[0])}
        if self.kind == "polar_of":
            return {"kind": self.kind, "inner": self.payload[0].describe()}
        if self.kind in ("product", "sum_polar", "tensor_bipolar", "par_polar"):
            return {"kind": self.kind, "parts": [p.describe() for p in self.payload]}
        return {"kind": self.kind}


@dataclass(frozen=True)
class QObject:
    space: SpaceExpr
    set: SetSpec

    def describe(self) -> dict:
        return {"space": format_space(self.space), "setspec": self.set.describe()}


# ---------------------------------------------------------------------------
# constructors

def unit_set(shape) -> SetSpec:
    shape = tuple(shape)
    return SetSpec("unit_set", algebra_space(shape), (shape,))


def density_ops(shape) -> SetSpec:
    shape = tuple(shape)
    return SetSpec("density_ops", coalgebra_space(shape), (shape,))


def singleton_unitary(u: BlockMatrix, shape=None) -> SetSpec:
    shape = tuple(shape) if shape is not None else tuple(u.shape)
    uu = (u @ u.adjoint() - BlockMatrix.identity(shape)).op_norm()
    if uu > 1e-9:
        raise ShapeMismatchError("singleton element is not unitary")
    return SetSpec("singleton_unitary", algebra_space(shape), (shape, u))


def finite_set(elems, space: SpaceExpr, closure_status: str = "as_given") -> SetSpec:
    elems = tuple(np.asarray(e, dtype=np.complex128).ravel() for e in elems)
    return SetSpec("finite", space, (elems, closure_status))


def embed_H(a: VnAlgebra) -> QObject:
    """H(A) = (A, {1_A})."""
    return QObject(algebra_space(a.shape), unit_set(a.shape))


def embed_S(c: VnCoalgebra) -> QObject:
    """S(C) = (C, P_C)."""
    return QObject(coalgebra_space(c.shape), density_ops(c.shape))


def unit_object() -> QObject:
    """The tensor unit (C, {1})."""
    return QObject(M(1), singleton_unitary(BlockMatrix([np.eye(1)]), (1,)))


# ---------------------------------------------------------------------------
# pairing and generators

def _pairing_twist(space: SpaceExpr) -> np.ndarray:
    """Q with ⟨f, x⟩ = f_vecᵀ Q x_vec for representing-tensor coordinates."""
    space = normalize_space(space)
    if space.kind == "base":
        n, m = space.args
        q = np.zeros((m * n, n * m))
        for r in range(n):
            for c in range(m):
                q[c * n + r, r * m + c] = 1.0
        return q
    if space.kind == "dual":
        return _pairing_twist(space.args[0]).T
    if space.kind in ("conj", "opp"):
        return _pairing_twist(space.args[0])
    if space.kind in ("sum_inf", "sum_1"):
        a, b = (_pairing_twist(x) for x in space.args)
        out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]))
        out[: a.shape[0], : a.shape[1]] = a
        out[a.shape[0] :, a.shape[1] :] = b
        return out
    a, b = (_pairing_twist(x) for x in space.args)
    return np.kron(a, b)


def pairing(space: SpaceExpr, f_coords, x_coords) -> complex:
    """Apply a functional (dual coordinates) to an element of `space`."""
    q = _pairing_twist(space)
    return complex(np.asarray(f_coords).ravel() @ q @ np.asarray(x_coords).ravel())


def generators(s: SetSpec):
    """(level-1 coordinate vectors, exhaustive?) used for pairing tests."""
    if s.kind == "empty":
        return [], True
    if s.kind == "unit_set":
        return [BlockMatrix.identity(s.payload[0]).to_vector()], True
    if s.kind == "singleton_unitary":
        return [s.payload[1].to_vector()], True
    if s.kind == "finite":
        return list(s.payload[0]), s.payload[1] in ("as_given", "bipolar")
    if s.kind == "density_ops":
        shape = s.payload[0]
        gens = []
        for b, n in enumerate(shape):
            for i in range(n):
                e = BlockMatrix.zeros(shape)
                blocks = [blk.copy() for blk in e.blocks]
                blocks[b][i, i] = 1.0
                gens.append(BlockMatrix(blocks).to_vector())
        return gens, False  # pure basis states sample the set
    if s.kind == "tensor_bipolar":
        ga, _ = generators(s.payload[0])
        gb, _ = generators(s.payload[1])
        return [np.outer(x, y).ravel() for x in ga for y in gb], False
    if s.kind == "product":
        ga, ea = generators(s.payload[0])
        gb, eb = generators(s.payload[1])
        return [np.concatenate([x, y]) for x in ga for y in gb], ea and eb
    if s.kind == "sum_polar":
        ga, ea = generators(s.payload[0])
        gb, eb = generators(s.payload[1])
        return [np.concatenate([x, y]) for x in ga for y in gb], ea and eb
    if s.kind == "polar_of":
        inner = s.payload[0]
        if inner.kind == "unit_set":
            shape = inner.payload[0]
            outs = []
            for b, n in enumerate(shape):
                blocks = [np.zeros((k, k), complex) for k in shape]
                if n:
                    blocks[b] = np.eye(n) / n
                    outs.append(BlockMatrix(blocks).to_vector())
            return outs, False
        if inner.kind == "singleton_unitary":
            shape, u = inner.payload
            n_tot = sum(shape)
            if n_tot:
                return [(u.adjoint() * (1.0 / n_tot)).to_vector()], False
            return [], False
        if inner.kind == "density_ops":
            # P_C° = {ε}: the counit, represented by the identity
            return [BlockMatrix.identity(inner.payload[0]).to_vector()], True
        if inner.kind == "tensor_bipolar":
            a, b = inner.payload
            fa, _ = generators(polar(a))
            fb, _ = generators(polar(b))
            return [np.outer(x, y).ravel() for x in fa for y in fb], False
        return [], False
    return [], False


# ---------------------------------------------------------------------------
# polar

def polar(s: SetSpec) -> SetSpec:
    """S° with the collapses proven in the theory applied symbolically."""
    dual_space = normalize_space(dual(s.space))
    if s.kind == "empty":
        return SetSpec("full_ball", dual_space)
    if s.kind == "full_ball":
        return SetSpec("empty", dual_space)
    if s.kind == "unit_set":
        return density_ops(s.payload[0])
    if s.kind == "density_ops":
        return unit_set(s.payload[0])
    if s.kind == "polar_of":
        inner = s.payload[0]
        if inner.kind in ("polar_of", "singleton_unitary", "unit_set", "density_ops"):
            return inner  # S°°° = S°, and proven-bipolar sets absorb
        if inner.kind == "finite" and inner.payload[1] == "bipolar":
            return inner
        return SetSpec("polar_of", dual_space, (s,))
    return SetSpec("polar_of", dual_space, (s,))


# ---------------------------------------------------------------------------
# membership

def membership(
    s: SetSpec, x_coords, tol: float = 1e-9, config: RunConfig | None = None
) -> str:
    """Three-valued membership: 'yes' | 'no' | 'unknown'."""
    config = config or RunConfig()
    x = np.asarray(x_coords, dtype=np.complex128).ravel()
    if x.size != dim(s.space):
        raise ShapeMismatchError("element dimension does not match the carrier")

    if s.kind == "empty":
        return "no"
    if s.kind == "full_ball":
        return _norm_leq_one(s.space, x, tol, config)
    if s.kind == "unit_set":
        ref = BlockMatrix.identity(s.payload[0]).to_vector()
        return "yes" if _close_block(x, ref, s.payload[0], tol) else "no"
    if s.kind == "singleton_unitary":
        ok = _close_block(x, s.payload[1].to_vector(), s.payload[0], tol)
        return "yes" if ok else "no"
    if s.kind == "density_ops":
        shape = s.payload[0]
        b = BlockMatrix.from_vector(x, shape)
        if abs(b.trace() - 1) > tol:
            return "no"
        for blk in b.blocks:
            if blk.size == 0:
                continue
            if op_norm(blk - blk.conj().T) > tol:
                return "no"
            if np.linalg.eigvalsh((blk + blk.conj().T) / 2)[0] < -tol:
                return "no"
        return "yes"
    if s.kind == "finite":
        for e in s.payload[0]:
            if np.max(np.abs(e - x)) <= tol:
                return "yes"
        return "no"
    if s.kind == "polar_of":
        return _polar_membership(s, x, tol, config)
    if s.kind in ("product", "sum_polar"):
        a, b = s.payload
        da = dim(a.space)
        ra = membership(a, x[:da], tol, config)
        rb = membership(b, x[da:], tol, config)
        if "no" in (ra, rb):
            return "no"
        return "yes" if ra == rb == "yes" else "unknown"
    if s.kind in ("tensor_bipolar", "par_polar"):
        return _closure_membership(s, x, tol, config)
    raise ValueError(f"unknown SetSpec kind {s.kind!r}")


def _close_block(x, ref, shape, tol) -> bool:
    return BlockMatrix.from_vector(x - ref, shape).op_norm() <= tol


def _ball_norm_decidable(space: SpaceExpr) -> bool:
    zero = np.zeros(dim(space), dtype=np.complex128)
    br = norm_at(SpaceElement(space, 1, zero), RunConfig())
    return br.status != "unknown"


def _norm_leq_one(space, coords, tol, config) -> str:
    br = norm_at(SpaceElement(space, 1, coords), config)
    if br.status == "unknown":
        return "unknown"
    if br.upper <= 1 + max(tol, 1e-7):
        return "yes"
    if br.lower > 1 + max(tol, 1e-7):
        return "no"
    return "unknown"


def _polar_membership(s: SetSpec, f, tol, config) -> str:
    inner = s.payload[0]
    # decidable coproduct-of-H case: z = (α·1, (1-α)·1) with α ∈ [0,1]
    if inner.kind == "sum_polar" and all(
        p.kind == "density_ops" for p in inner.payload
    ):
        return _h_plus_membership(inner, f, tol)
    gens, exhaustive = generators(inner)
    for g in gens:
        if abs(pairing(inner.space, f, g) - 1) > max(tol, 1e-7):
            return "no"
    ball = _norm_leq_one(s.space, f, tol, config)
    if ball == "no":
        return "no"
    if ball == "yes" and exhaustive:
        return "yes"
    return "unknown"


def _h_plus_membership(inner: SetSpec, z, tol, config=None) -> str:
    """({1_A}° + {1_B}°)° = {(α·1_A, (1−α)·1_B) : α ∈ [0,1]}.

    Pairing 1 against all split states forces both components to be scalar
    multiples of the unit with coefficients summing to one; the ℓ∞ ball then
    caps the coefficients to [0,1].
    """
    shape_a = inner.payload[0].payload[0]
    shape_b = inner.payload[1].payload[0]
    da = sum(k * k for k in shape_a)
    za = BlockMatrix.from_vector(z[:da], shape_a)
    zb = BlockMatrix.from_vector(z[da:], shape_b)
    coeffs = []
    for bm, shape in ((za, shape_a), (zb, shape_b)):
        alphas = []
        for blk, k in zip(bm.blocks, shape):
            if k == 0:
                continue
            alpha = np.trace(blk) / k
            if op_norm(blk - alpha * np.eye(k)) > max(tol, 1e-9):
                return "no"
            alphas.append(alpha)
        if alphas and np.max(np.abs(np.diff(alphas + [alphas[0]]))) > max(tol, 1e-9):
            return "no"
        coeffs.append(alphas[0] if alphas else 0.0)
    if abs(coeffs[0] + coeffs[1] - 1) > max(tol, 1e-9):
        return "no"
    for c in coeffs:
        if abs(c.imag) > max(tol, 1e-9) or c.real < -tol or c.real > 1 + tol:
            return "no"
    return "yes"


def _closure_membership(s: SetSpec, x, tol, config) -> str:
    gens, _ = generators(s)
    for g in gens:
        if np.max(np.abs(g - x)) <= tol:
            return "yes"
    # no-certificates from known polar members
    if s.kind == "tensor_bipolar":
        fa, _ = generators(polar(s.payload[0]))
        fb, _ = generators(polar(s.payload[1]))
        for f1 in fa:
            for f2 in fb:
                if abs(pairing(s.space, np.outer(f1, f2).ravel(), x) - 1) > max(tol, 1e-7):
                    return "no"
    if s.kind == "par_polar":
        fa, _ = generators(polar(s.payload[0]))
        fb, _ = generators(polar(s.payload[1]))
        for f1 in fa:
            for f2 in fb:
                if abs(pairing(s.space, np.outer(f1, f2).ravel(), x) - 1) > max(tol, 1e-7):
                    return "no"
    if _norm_leq_one(s.space, x, tol, config) == "no":
        return "no"
    return "unknown"


# ---------------------------------------------------------------------------
# connectives (Thm: Q is *-autonomous with finite (co)products)

def _pair_shapes(sa, sb):
    return tuple(ka * kb for ka in sa for kb in sb)


def connective(kind: str, a: QObject, b: QObject | None = None) -> QObject:
    if kind == "dual":
        return QObject(normalize_space(dual(a.space)), polar(a.set))
    if b is None:
        raise ShapeMismatchError(f"connective {kind!r} needs two objects")
    if kind == "with":
        space = sum_inf(a.space, b.space)
        return QObject(space, SetSpec("product", space, (a.set, b.set)))
    if kind == "plus":
        if a.set.kind == "density_ops" and b.set.kind == "density_ops":
            shape = a.set.payload[0] + b.set.payload[0]
            return QObject(coalgebra_space(shape), density_ops(shape))
        space = sum_1(a.space, b.space)
        inner = SetSpec(
            "sum_polar", normalize_space(dual(space)), (polar(a.set), polar(b.set))
        )
        return QObject(space, SetSpec("polar_of", space, (inner,)))
    if kind == "tensor":
        if a.set.kind == "density_ops" and b.set.kind == "density_ops":
            shape = _pair_shapes(a.set.payload[0], b.set.payload[0])
            return QObject(coalgebra_space(shape), density_ops(shape))
        space = tens_proj(a.space, b.space)
        if a.set.kind == "singleton_unitary" and b.set.kind == "singleton_unitary":
            # {u}⊗{v} is bipolar and collapses to {u⊗v}; the carrier stays the
            # projective tensor (its norm differs from the flat M_{nm} one)
            ga, _ = generators(a.set)
            gb, _ = generators(b.set)
            elem = np.outer(ga[0], gb[0]).ravel()
            return QObject(space, finite_set([elem], space, "bipolar"))
        return QObject(space, SetSpec("tensor_bipolar", space, (a.set, b.set)))
    if kind == "par":
        if a.set.kind == "unit_set" and b.set.kind == "unit_set":
            shape = _pair_shapes(a.set.payload[0], b.set.payload[0])
            return QObject(algebra_space(shape), unit_set(shape))
        space = tens_min(a.space, b.space)
        return QObject(space, SetSpec("par_polar", space, (a.set, b.set)))
    raise ValueError(f"unknown connective {kind!r}")


# ---------------------------------------------------------------------------
# morphisms

@dataclass
class MorphismResult:
    verdict: str  # valid | invalid | unknown
    reason: str = ""
    diagnostics: dict = field(default_factory=dict)


def _carrier_block_type(space: SpaceExpr):
    """('operator'|'trace', shape) for ⊕∞M / ⊕₁T carriers, else None."""
    from .osx import _algebra_shape

    sp = normalize_space(space)
    shape = _algebra_shape(sp)
    if shape is not None:
        return "operator", shape
    shape = _algebra_shape(normalize_space(dual(sp)))
    if shape is not None:
        return "trace", shape
    return None


def check_morphism(
    f: SuperOp, a: QObject, b: QObject, tol: float = 1e-9, config: RunConfig | None = None
) -> MorphismResult:
    config = config or RunConfig()
    src = _carrier_block_type(a.space)
    dst = _carrier_block_type(b.space)
    if src is None or dst is None:
        return MorphismResult("unknown", "unsupported carrier space")
    if tuple(f.dom_shape) != tuple(src[1]) or tuple(f.cod_shape) != tuple(dst[1]):
        raise ShapeMismatchError("morphism shapes do not match the objects")

    flags = f.classify(tol)
    # fully faithful images: H(A)→H(B) are exactly the CPU maps, S(C)→S(D)
    # exactly the CPTP maps
    if a.set.kind == "unit_set" and b.set.kind == "unit_set":
        if flags.cp and flags.unital:
            return MorphismResult("valid", "cpu", {"flags": flags})
        reason = "unit not preserved" if not flags.unital else "not completely positive"
        return MorphismResult("invalid", reason, {"flags": flags})
    if a.set.kind == "density_ops" and b.set.kind == "density_ops":
        if flags.cp and flags.tp:
            return MorphismResult("valid", "cptp", {"flags": flags})
        reason = "not trace preserving" if not flags.tp else "not completely positive"
        return MorphismResult("invalid", reason, {"flags": flags})

    picture = src[0]
    br: NormBracket = cb_norm(f, picture)
    slack = max(tol, 1e-6)
    cc = "yes" if br.upper <= 1 + slack else ("no" if br.lower > 1 + slack else "unknown")
    if cc == "no":
        return MorphismResult(
            "invalid", "not a complete contraction", {"cb": (br.lower, br.upper)}
        )
    gens, exhaustive = generators(a.set)
    transported = "yes"
    for g in gens:
        img = f.apply(BlockMatrix.from_vector(g, src[1])).to_vector()
        r = membership(b.set, img, tol, config)
        if r == "no":
            return MorphismResult(
                "invalid", "set not preserved", {"cb": (br.lower, br.upper)}
            )
        if r == "unknown":
            transported = "unknown"
    if cc == "yes" and transported == "yes" and exhaustive:
        return MorphismResult("valid", "", {"cb": (br.lower, br.upper)})
    return MorphismResult(
        "unknown", "membership or contraction undecided", {"cb": (br.lower, br.upper)}
    )


# ---------------------------------------------------------------------------
# quantum switch

def quantum_switch_map(n: int) -> SuperOp:
    """qsw(a⊗b) = |0⟩⟨0|⊗(ab) + |1⟩⟨1|⊗(ba) : M_n ⊗̂ M_n → M_{2n}.

    Basis action: e_ij ⊗ e_kl ↦ δ_jk |0⟩⟨0|⊗e_il + δ_li |1⟩⟨1|⊗e_kj, with the
    domain realized on M_{n²} through the Kronecker identification.
    """
    if n < 1:
        raise ShapeMismatchError("quantum switch needs n >= 1")
    d = n * n
    grid = np.zeros(((2 * n) ** 2, d * d), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    col = (i * n + k) * d + (j * n + l)
                    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
                    if j == k:
                        out[i, l] += 1.0
                    if l == i:
                        out[n + k, n + j] += 1.0
                    grid[:, col] = out.ravel()
    return SuperOp.from_transfer_blocks([[grid]], (d,), (2 * n,))


def _tensor_to_kron_layout(coords, k, n):
    """(k,k,n⁴) tensor coords (a,b,c,d) → M_k(M_{n²}) flat via kron indices."""
    m = coords.reshape(k, k, n, n, n, n).transpose(0, 1, 2, 4, 3, 5)
    m = m.reshape(k, k, n * n, n * n)
    return m.transpose(0, 2, 1, 3).reshape(k * n * n, k * n * n)


_QSW_TRANSFER_CACHE: dict = {}


def _qsw_apply(qsw: SuperOp, coords, k, n):
    flat = _tensor_to_kron_layout(np.asarray(coords, complex), k, n)
    key = (n, k)
    t = _QSW_TRANSFER_CACHE.get(key)
    if t is None:
        amp = qsw if k == 1 else qsw.amplify(k)
        t = amp.transfer_block(0, 0)
        _QSW_TRANSFER_CACHE[key] = t
    out_dim = 2 * n * k
    return (t @ flat.ravel()).reshape(out_dim, out_dim)


def _qsw_ratio(qsw, n, k, x, y):
    """‖qsw_k(x⊙y)‖ over the certified ⊗_h upper bound ‖x‖·‖y‖."""
    r = x.shape[1]
    xf = x.transpose(0, 2, 1, 3).reshape(k * n, r * n)
    yf = y.transpose(0, 2, 1, 3).reshape(r * n, k * n)
    nx, ny = op_norm(xf), op_norm(yf)
    if nx < 1e-14 or ny < 1e-14:
        return 0.0
    coords = np.einsum("ilab,ljcd->ijabcd", x, y).reshape(k, k, n ** 4)
    return op_norm(_qsw_apply(qsw, coords, k, n)) / (nx * ny)


def _ascend_qsw_ratio(qsw, n, k, x, y, rng, steps=120):
    best = _qsw_ratio(qsw, n, k, x, y)
    scale = 0.5
    for i in range(steps):
        dx = scale * (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape))
        dy = scale * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
        tx = x + dx if i % 2 == 0 else x
        ty = y + dy if i % 2 == 1 else y
        val = _qsw_ratio(qsw, n, k, tx, ty)
        if val > best:
            best, x, y = val, tx, ty
        else:
            scale *= 0.98
    return best, x, y


def _reim(arr) -> dict:
    arr = np.asarray(arr)
    return {"re": arr.real.tolist(), "im": arr.imag.tolist()}


def quantum_switch(n: int, config: RunConfig | None = None):
    """qsw with its evidence report: exactness, ⊗̂-contractivity, ⊗_h search."""
    config = config or RunConfig()
    rng = config.rng(salt=97)
    qsw = quantum_switch_map(n)
    report = {"n": n, "claims": []}

    # (i) exact output on unitary pairs
    worst = 0.0
    for _ in range(20):
        u, v = rand_unitary(rng, n), rand_unitary(rng, n)
        out = qsw(kron(u, v))
        want = np.zeros((2 * n, 2 * n), dtype=np.complex128)
        want[:n, :n] = u @ v
        want[n:, n:] = v @ u
        worst = max(worst, op_norm(out - want))
    report["claims"].append(
        {
            "claim": "qsw(u (x) v) = |0><0| (x) uv + |1><1| (x) vu on 20 unitary pairs",
            "verdict": "pass" if worst <= 1e-9 else "fail",
            "evidence": {"worst_error": float(worst)},
        }
    )

    # (ii) projective contractivity on certified-upper samples
    viol, samples = 0.0, 0
    for idx in range(200):
        k = 1 + (idx % 2)
        r = int(rng.integers(1, 4))
        cert = 0.0
        coords = np.zeros((k, k, n ** 4), dtype=np.complex128)
        for _ in range(r):
            a_flat = rand_complex(rng, k * n, k * n)  # level-k element of M_n
            y_l = rand_complex(rng, n, n)
            a_coords = a_flat.reshape(k, n, k, n).transpose(0, 2, 1, 3).reshape(k, k, n * n)
            coords += np.einsum("ijA,B->ijAB", a_coords, y_l.ravel()).reshape(k, k, n ** 4)
            cert += op_norm(a_flat) * op_norm(y_l)
        out = _qsw_apply(qsw, coords, k, n)
        viol = max(viol, op_norm(out) - cert)
        samples += 1
    report["claims"].append(
        {
            "claim": "|qsw_k(v)| <= certified projective upper bound, 200 samples",
            "verdict": "pass" if viol <= 1e-9 else "fail",
            "evidence": {"samples": samples, "worst_excess": float(viol)},
        }
    )

    # (iii) Haagerup-violation search with certified x⊙y upper bounds
    best = {"ratio": 0.0, "level": None, "inner_rank": None, "x": None, "y": None}
    starts = 512
    for trial in range(starts):
        k = 1 + (trial % 2)
        r = int(rng.integers(1, 2 * n + 1))
        x = (rand_complex(rng, k * n, r * n)).reshape(k, n, r, n).transpose(0, 2, 1, 3)
        y = (rand_complex(rng, r * n, k * n)).reshape(r, n, k, n).transpose(0, 2, 1, 3)
        ratio, x, y = _ascend_qsw_ratio(qsw, n, k, x, y, rng, steps=config.caps.ascent_steps)
        if ratio > best["ratio"]:
            best = {"ratio": float(ratio), "level": k, "inner_rank": r, "x": x, "y": y}
    found = best["ratio"] > 1.02
    report["claims"].append(
        {
            "claim": "exists v with |qsw_k(v)| > 1.02 x certified Haagerup upper bound",
            "verdict": "pass" if found else "unknown",
            "evidence": {
                "best_ratio": best["ratio"],
                "level": best["level"],
                "inner_rank": best["inner_rank"],
                "starts": starts,
                "ascent_steps": config.caps.ascent_steps,
                "margin": 1.02,
            },
        }
    )
    if found:
        report["h_violation_witness"] = {
            "level": best["level"],
            "ratio": best["ratio"],
            "x": _reim(best["x"]),
            "y": _reim(best["y"]),
        }
    return qsw, report
