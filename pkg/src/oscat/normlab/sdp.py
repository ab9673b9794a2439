"""Self-contained dense primal-dual SDP solver (log-barrier path following).

Problems are stated in inequality (LMI) form over real symmetric blocks:

    minimize    c·y
    subject to  S_b(y) = F0_b + Σ_i y_i Fi_b  ⪰ 0   for every block b,
                A y = b_eq                          (optional equalities)

Equalities are eliminated by an affine reparameterization before the barrier
loop.  Every reported optimum carries an exactly-feasible dual certificate
(Z ⪰ 0 with tr(Fi·Z) = c_i), so the duality gap in the result is a rigorous
two-sided bound, never an estimate.  Complex Hermitian data enters through
`real_embed_herm`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeMismatchError, SizeLimitError

MAX_PSD_DIM = 512


def real_embed_herm(h: np.ndarray) -> np.ndarray:
    """Complex Hermitian (or general) H = A+iB ↦ [[A, -B], [B, A]].

    For Hermitian H the image is symmetric with the same spectrum, doubled.
    """
    a, b = h.real, h.imag
    return np.block([[a, -b], [b, a]])


class HermBasis:
    """Real parameterization of complex Hermitian n×n matrices.

    Parameter order: n diagonal entries, then (Re, Im) for each p<q pair.
    """

    def __init__(self, n: int):
        self.n = n
        mats = []
        for p in range(n):
            m = np.zeros((n, n), dtype=np.complex128)
            m[p, p] = 1.0
            mats.append(m)
        for p in range(n):
            for q in range(p + 1, n):
                m = np.zeros((n, n), dtype=np.complex128)
                m[p, q] = m[q, p] = 1.0
                mats.append(m)
                m = np.zeros((n, n), dtype=np.complex128)
                m[p, q] = -1j
                m[q, p] = 1j
                mats.append(m)
        self.mats = mats

    def __len__(self) -> int:
        return len(self.mats)

    def assemble(self, params) -> np.ndarray:
        acc = np.zeros((self.n, self.n), dtype=np.complex128)
        for w, m in zip(params, self.mats):
            acc += w * m
        return acc

    def coords(self, h: np.ndarray) -> np.ndarray:
        out = []
        for p in range(self.n):
            out.append(h[p, p].real)
        for p in range(self.n):
            for q in range(p + 1, self.n):
                out.append(h[p, q].real)
                out.append(h[p, q].imag)
        return np.array(out)


@dataclass
class SdpProblem:
    """LMI-form SDP; `fs[b]` has shape (m, nb, nb), `f0[b]` shape (nb, nb)."""

    c: np.ndarray
    f0: list
    fs: list
    eq_a: np.ndarray | None = None
    eq_b: np.ndarray | None = None
    slater: np.ndarray | None = None
    obj_offset: float = 0.0

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=np.float64)
        m = self.c.size
        total = 0
        for b, (f0b, fsb) in enumerate(zip(self.f0, self.fs)):
            f0b = np.asarray(f0b, dtype=np.float64)
            fsb = np.asarray(fsb, dtype=np.float64)
            if fsb.shape != (m,) + f0b.shape or f0b.shape[0] != f0b.shape[1]:
                raise ShapeMismatchError(f"inconsistent LMI data in block {b}")
            self.f0[b], self.fs[b] = f0b, fsb
            total += f0b.shape[0]
        if total > MAX_PSD_DIM:
            raise SizeLimitError(f"total PSD dimension {total} exceeds {MAX_PSD_DIM}")

    @property
    def nu(self) -> int:
        return sum(f.shape[0] for f in self.f0)


@dataclass
class SdpResult:
    status: str  # optimal | infeasible | numerical_failure
    value: float = np.nan
    y: np.ndarray | None = None
    dual_blocks: list = field(default_factory=list)
    gap: float = np.nan
    dual_value: float = np.nan
    iterations: int = 0
    message: str = ""


def _sym_blocks(y, f0, fs):
    return [f0b + np.tensordot(y, fsb, axes=(0, 0)) for f0b, fsb in zip(f0, fs)]


def _chol_or_none(s):
    try:
        return np.linalg.cholesky((s + s.T) / 2)
    except np.linalg.LinAlgError:
        return None


def _barrier_value(tau, cvec, y, f0, fs):
    val = tau * float(cvec @ y)
    for s in _sym_blocks(y, f0, fs):
        if s.shape[0] == 0:
            continue
        l = _chol_or_none(s)
        if l is None:
            return None
        val -= 2.0 * float(np.sum(np.log(np.diagonal(l))))
    return val


def _hess_terms(sinv, fsb):
    """Gradient and Hessian contributions tr(S⁻¹Fᵢ), tr(S⁻¹FᵢS⁻¹Fⱼ) via GEMM."""
    m, nb = fsb.shape[0], fsb.shape[1]
    w = sinv @ fsb  # (m, nb, nb)
    g = np.trace(w, axis1=1, axis2=2)
    v = w.reshape(m, nb * nb)
    wt = w.transpose(0, 2, 1).reshape(m, nb * nb)
    return g, v @ wt.T


def _newton_center(tau, cvec, y, f0, fs, lam_tol=0.2, max_iter=80):
    """Damped Newton on  tau·c·y − Σ log det S(y); returns (y, lam, ok)."""
    m = cvec.size
    for it in range(max_iter):
        grad = tau * cvec.copy()
        hess = np.zeros((m, m))
        for f0b, fsb in zip(f0, fs):
            if f0b.shape[0] == 0:
                continue
            s = f0b + np.tensordot(y, fsb, axes=(0, 0))
            l = _chol_or_none(s)
            if l is None:
                return y, np.inf, False
            sinv = np.linalg.inv(s)
            g, h = _hess_terms((sinv + sinv.T) / 2, fsb)
            grad -= g
            hess += h
        try:
            dg = np.sqrt(np.clip(np.diagonal(hess), 1e-300, None))
            hs = hess / np.outer(dg, dg)
            d = np.linalg.solve(hs + 1e-13 * np.eye(m), -grad / dg) / dg
        except np.linalg.LinAlgError:
            return y, np.inf, False
        lam2 = float(-grad @ d)
        if lam2 < 0:  # hessian numerically indefinite
            d = -grad
            lam2 = float(grad @ grad)
        lam = np.sqrt(max(lam2, 0.0))
        if lam < lam_tol:
            return y, lam, True
        if np.max(np.abs(y)) > 1e12:
            return y, lam, False
        f_cur = _barrier_value(tau, cvec, y, f0, fs)
        step, ok_step = 1.0, False
        for _ in range(60):
            y_new = y + step * d
            f_new = _barrier_value(tau, cvec, y_new, f0, fs)
            if f_new is not None and f_new < f_cur - 1e-4 * step * lam2:
                y = y_new
                ok_step = True
                break
            step *= 0.5
        if not ok_step:
            # no decrease found: treat current point as centered enough
            return y, lam, lam < 1.0
    return y, lam, lam < 1.0


def _dual_certificate(tau, cvec, y, f0, fs):
    """Exactly dual-feasible Z from the near-central point, or None.

    The correction to Ẑ = S⁻¹/τ runs along S⁻¹FᵢS⁻¹ (the Hessian metric), so
    tr(Fᵢ·Z) = cᵢ is met exactly while positivity survives near the path.
    """
    m = cvec.size
    zs, sinvs, resid = [], [], np.zeros(m)
    hess = np.zeros((m, m))
    for f0b, fsb in zip(f0, fs):
        if f0b.shape[0] == 0:
            zs.append(np.zeros((0, 0)))
            sinvs.append(np.zeros((0, 0)))
            continue
        s = f0b + np.tensordot(y, fsb, axes=(0, 0))
        try:
            sinv = np.linalg.inv((s + s.T) / 2)
        except np.linalg.LinAlgError:
            return None
        sinv = (sinv + sinv.T) / 2
        sinvs.append(sinv)
        zs.append(sinv / tau)
        resid += fsb.reshape(fsb.shape[0], -1) @ zs[-1].T.ravel()
        _, h = _hess_terms(sinv, fsb)
        hess += h
    resid = cvec - resid  # want tr(Fi Z) = c_i
    try:
        w = np.linalg.lstsq(hess, resid, rcond=None)[0]
    except np.linalg.LinAlgError:
        return None
    out = []
    for f0b, fsb, z, sinv in zip(f0, fs, zs, sinvs):
        if f0b.shape[0] == 0:
            out.append(z)
            continue
        zc = z + sinv @ np.tensordot(w, fsb, axes=(0, 0)) @ sinv
        zc = (zc + zc.T) / 2
        if np.linalg.eigvalsh(zc)[0] < -1e-14 * max(1.0, np.abs(zc).max()):
            return None
        out.append(zc)
    # residual after correction must be negligible
    left = np.zeros(m)
    for fsb, zc in zip(fs, out):
        if zc.shape[0]:
            left += (fsb.reshape(fsb.shape[0], -1) @ zc.T.ravel()).real
    if np.max(np.abs(left - cvec)) > 1e-9 * (1.0 + np.max(np.abs(cvec))):
        return None
    return out


def _try_cert(tau, cvec, y, f0, fs, best, iters):
    zs = _dual_certificate(tau, cvec, y, f0, fs)
    if zs is None:
        return best
    primal = float(cvec @ y)
    dual = -sum(float(np.tensordot(f0b, z)) for f0b, z in zip(f0, zs) if z.shape[0])
    gap = primal - dual
    if best is None or gap < best[4]:
        return ("optimal", y.copy(), zs, primal, gap, iters)
    return best


def _solve_lmi(cvec, f0, fs, y0, rel_gap, max_outer=60):
    """Barrier loop from strictly feasible y0.  Returns SdpResult-like tuple."""
    y = y0.copy()
    nu = sum(f.shape[0] for f in f0)
    if nu == 0 or cvec.size == 0:
        value = float(cvec @ y) if cvec.size else 0.0
        return ("optimal", y, [np.zeros((f.shape[0],) * 2) for f in f0], value, value, 0)

    def good_enough(b):
        return b is not None and b[4] <= rel_gap * (1.0 + abs(b[3]))

    tau, mu, fails, iters, best = 1.0, 20.0, 0, 0, None
    for _ in range(max_outer):
        y, lam, ok = _newton_center(tau, cvec, y, f0, fs)
        iters += 1
        best = _try_cert(tau, cvec, y, f0, fs, best, iters)
        if good_enough(best):
            return best
        if not ok:
            fails += 1
            mu = max(2.0, np.sqrt(mu))
            if fails >= 4:
                break
        else:
            fails = 0
        tau *= mu
        if tau > 1e15:
            break
    # terminal squeeze: the certificate at inflated τ' is the Newton-step dual
    # at that τ'; it stays valid whenever the PSD check passes
    if best is not None:
        tau_p = tau
        for _ in range(30):
            tau_p *= 3.0
            improved = _try_cert(tau_p, cvec, best[1], f0, fs, best, iters)
            if improved is best:
                break
            best = improved
            if good_enough(best):
                return best
    if best is not None:
        return best
    return ("numerical_failure", y, [], float(cvec @ y), np.inf, iters)


def _eliminate_equalities(p: SdpProblem):
    """y = y0 + N z; returns (cz, f0', fs', y0, N, const) or None if infeasible."""
    m = p.c.size
    if p.eq_a is None:
        return p.c, p.f0, p.fs, np.zeros(m), np.eye(m), 0.0
    a = np.asarray(p.eq_a, dtype=np.float64).reshape(-1, m)
    b = np.asarray(p.eq_b, dtype=np.float64).ravel()
    y0, res, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if np.linalg.norm(a @ y0 - b) > 1e-10 * (1.0 + np.linalg.norm(b)):
        return None
    _, sv, vt = np.linalg.svd(a)
    tol = max(a.shape) * (sv[0] if sv.size else 0.0) * np.finfo(float).eps
    null = vt[np.sum(sv > tol) :].T  # (m, m - rank)
    f0p = [f0b + np.tensordot(y0, fsb, axes=(0, 0)) for f0b, fsb in zip(p.f0, p.fs)]
    fsp = [np.einsum("iab,ij->jab", fsb, null) for fsb in p.fs]
    return null.T @ p.c, f0p, fsp, y0, null, float(p.c @ y0)


def _phase_one(cz, f0, fs):
    """Find strictly feasible z via  min t  s.t.  S(z) + t·I ⪰ 0, t ≥ -1.

    The t ≥ -1 cap keeps the objective bounded; any t < 0 certifies strict
    feasibility of the original constraints.
    """
    m = cz.size
    f0_aug, fs_aug = [], []
    for f0b, fsb in zip(f0, fs):
        nb = f0b.shape[0]
        fi = np.zeros((m + 1, nb, nb))
        fi[:m] = fsb
        fi[m] = np.eye(nb)
        f0_aug.append(f0b)
        fs_aug.append(fi)
    f0_aug.append(np.eye(1))
    cap = np.zeros((m + 1, 1, 1))
    cap[m] = 1.0
    fs_aug.append(cap)
    c_aug = np.zeros(m + 1)
    c_aug[m] = 1.0
    z = np.zeros(m + 1)
    t0 = 1.0
    for f0b in f0:
        if f0b.shape[0]:
            t0 = max(t0, -float(np.linalg.eigvalsh(f0b)[0]) * 1.5 + 1.0)
    z[m] = t0

    def strictly_feasible(zv):
        for f0b, fsb in zip(f0, fs):
            if f0b.shape[0] == 0:
                continue
            s = f0b + np.tensordot(zv, fsb, axes=(0, 0))
            scale = max(1.0, float(np.abs(s).max()))
            try:
                w0 = float(np.linalg.eigvalsh((s + s.T) / 2)[0])
            except np.linalg.LinAlgError:
                return False
            if w0 < 1e-10 * scale:
                return False
        return True

    # short Newton bursts with direct feasibility checks: the phase-1 center
    # need not exist (unbounded sets), but iterates go strictly feasible fast
    tau, fails = 1.0, 0
    for _ in range(60):
        z, lam, ok = _newton_center(tau, c_aug, z, f0_aug, fs_aug, max_iter=8)
        if z[m] < -1e-9 or strictly_feasible(z[:m]):
            return z[:m].copy(), "feasible"
        if not ok:
            fails += 1
            if fails >= 4:
                return None, "numerical_failure"
            continue
        zs = _dual_certificate(tau, c_aug, z, f0_aug, fs_aug)
        if zs is not None:
            dual = -sum(
                float(np.tensordot(f0b, zb)) for f0b, zb in zip(f0_aug, zs) if zb.shape[0]
            )
            if dual > 1e-9:
                return None, "infeasible"
            if lam < 0.2 and z[m] - dual < 1e-11:
                # optimum pinched at ~0: no strict interior
                return None, "infeasible"
        tau *= 5.0
    return None, "numerical_failure"


def sdp_solve(p: SdpProblem, rel_gap: float = 1e-8) -> SdpResult:
    """Solve the LMI-form SDP with a certified duality gap.

    status 'optimal' guarantees: S(y) ⪰ 0 (strictly, up to 1e-12), equalities
    to 1e-10, and value within `gap` of the true optimum with gap ≤
    rel_gap·(1+|value|) unless the path stalled (then numerical_failure).
    """
    elim = _eliminate_equalities(p)
    if elim is None:
        return SdpResult(status="infeasible", message="inconsistent equalities")
    cz, f0, fs, y0, null, const = elim

    z_start = None
    if p.slater is not None:
        z_cand = np.linalg.lstsq(null, np.asarray(p.slater, float) - y0, rcond=None)[0]
        blocks = _sym_blocks(z_cand, f0, fs)
        if all(_chol_or_none(s) is not None for s in blocks if s.shape[0]):
            z_start = z_cand
    if z_start is None:
        blocks = _sym_blocks(np.zeros(cz.size), f0, fs)
        if all(_chol_or_none(s) is not None for s in blocks if s.shape[0]):
            z_start = np.zeros(cz.size)
    if z_start is None:
        z_start, verdict = _phase_one(cz, f0, fs)
        if z_start is None:
            return SdpResult(status=verdict, message="phase-1: " + verdict)

    status, z, duals, primal, gap, iters = _solve_lmi(cz, f0, fs, z_start, rel_gap)
    y = y0 + null @ z
    value = primal + const + p.obj_offset
    if status != "optimal":
        return SdpResult(
            status="numerical_failure",
            value=value,
            y=y,
            gap=gap,
            iterations=iters,
            message="barrier stalled",
        )
    ok = gap <= rel_gap * (1.0 + abs(primal)) * 10 + 1e-12
    return SdpResult(
        status="optimal" if ok else "numerical_failure",
        value=value,
        y=y,
        dual_blocks=duals,
        gap=gap,
        dual_value=primal - gap + const + p.obj_offset,
        iterations=iters,
        message="" if ok else f"gap {gap:.3e} above target",
    )
