import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_cptp, random_superop
from oscat.errors import ShapeMismatchError
from oscat.matcore import kron, op_norm, rand_complex, rand_unitary, tr_norm
from oscat.supop import (
    SuperOp,
    conjugation,
    depolarizing,
    identity_map,
    partial_trace,
    trace_map,
    transpose_map,
    zero_map,
)


class TestChoiRoundtrip:
    def test_identity_choi(self):
        # Σ_ij e_ij ⊗ e_ij, built basis-by-basis as an independent oracle
        J = identity_map((2,)).big_choi()
        want = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                e = np.zeros((2, 2))
                e[i, j] = 1
                want += np.kron(e, e)
        assert np.allclose(J, want)

    def test_zero_map(self):
        assert np.allclose(zero_map((2,), (3,)).big_choi(), 0)

    def test_transpose_choi_is_swap(self):
        swap = np.zeros((4, 4))
        for i in range(2):
            for j in range(2):
                swap[i * 2 + j, j * 2 + i] = 1
        assert np.allclose(transpose_map(2).big_choi(), swap)

    def test_action_choi_action_exact(self, rng):
        s = random_superop(rng, 3)
        rebuilt = SuperOp.from_action(s.apply, s.dom_shape, s.cod_shape)
        assert rebuilt.allclose(s, tol=0)

    def test_big_choi_roundtrip(self, rng):
        s = random_superop(rng, 2).direct_sum(random_superop(rng, 3))
        s2 = SuperOp.from_big_choi(s.big_choi(), s.dom_shape, s.cod_shape)
        assert s2.allclose(s, tol=0)

    def test_json_roundtrip(self, rng):
        s = random_cptp(rng, 2)
        assert SuperOp.from_json_dict(s.to_json_dict()).allclose(s, tol=1e-12)


class TestAdjoint:
    def test_unitary_conjugation_heisenberg(self, rng):
        # the adjoint of ρ ↦ uρu* is a ↦ u*au
        u = rand_unitary(rng, 3)
        heis = conjugation(u).adjoint()
        for _ in range(5):
            a = rand_complex(rng, 3)
            assert np.allclose(heis(a), u.conj().T @ a @ u)

    def test_identity_self_adjoint(self):
        s = identity_map((2, 3))
        assert s.adjoint().allclose(s, tol=0)

    def test_involution_exact(self, rng):
        s = random_superop(rng, 2, 3)
        assert s.adjoint().adjoint().allclose(s, tol=0)

    def test_trace_pairing(self, rng):
        s = random_superop(rng, 2, 3)
        sa = s.adjoint()
        for _ in range(10):
            x, y = rand_complex(rng, 2), rand_complex(rng, 3)
            lhs = np.trace(s(x) @ y)
            rhs = np.trace(x @ sa(y))
            assert abs(lhs - rhs) < 1e-12

    def test_adjoint_of_tp_is_unital(self, rng):
        s = random_cptp(rng, 3)
        # pairing with the identity matrix: tr(s(x)) = tr(x · s†(1))
        assert np.allclose(s.adjoint()(np.eye(3)), np.eye(3))
        assert s.adjoint().classify().unital


class TestAmplify:
    def test_identity_amplifies_to_identity(self):
        s = identity_map((2,)).amplify(3)
        assert s.allclose(identity_map((6,)), tol=0)

    def test_partial_transpose(self, rng):
        pt = transpose_map(2).amplify(2)
        x = rand_complex(rng, 4)
        want = x.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
        assert np.allclose(pt(x), want)

    def test_level_one_is_identity_op(self, rng):
        s = random_superop(rng, 2)
        assert s.amplify(1).allclose(s, tol=1e-14)

    def test_bad_level(self):
        with pytest.raises(ShapeMismatchError):
            identity_map((2,)).amplify(0)


class TestClassify:
    def test_depolarizing_choi_and_flags(self):
        n = 3
        dep = depolarizing(n)
        fl = dep.classify()
        assert fl.cp and fl.tp and fl.unital
        # oracle: choi = Σ_a (1/n)·1 ⊗ e_aa = 1 ⊗ 1/n restricted to diagonal inputs
        want = sum(
            np.kron(np.eye(n) / n, np.outer(np.eye(n)[a], np.eye(n)[a]))
            for a in range(n)
        )
        assert np.allclose(dep.big_choi(), want)
        assert psd_min(dep.big_choi()) >= -1e-12

    def test_transpose_not_cp(self):
        fl = transpose_map(2).classify()
        assert not fl.cp and fl.tp and fl.unital and fl.herm_preserving
        assert abs(fl.min_choi_eig + 1.0) < 1e-12

    def test_unitary_heisenberg_cpu(self, rng):
        u = rand_unitary(rng, 2)
        fl = conjugation(u).adjoint().classify()
        assert fl.cp and fl.unital and fl.tp

    def test_partial_trace_oracle(self, rng):
        # independent loop-based partial trace vs the vectorized one
        d0, d1 = 3, 2
        m = rand_complex(rng, d0 * d1)
        want0 = np.zeros((d1, d1), dtype=complex)
        for a in range(d0):
            for i in range(d1):
                for j in range(d1):
                    want0[i, j] += m[a * d1 + i, a * d1 + j]
        assert np.allclose(partial_trace(m, (d0, d1), 0), want0)
        want1 = np.zeros((d0, d0), dtype=complex)
        for i in range(d0):
            for j in range(d0):
                for a in range(d1):
                    want1[i, j] += m[i * d1 + a, j * d1 + a]
        assert np.allclose(partial_trace(m, (d0, d1), 1), want1)

    def test_tp_via_choi_partial_trace(self, rng):
        s = random_cptp(rng, 3)
        assert np.allclose(partial_trace(s.big_choi(), (3, 3), 0), np.eye(3))


def psd_min(a):
    return float(np.linalg.eigvalsh((a + a.conj().T) / 2)[0])


class TestCombine:
    def test_compose_identity(self, rng):
        s = random_superop(rng, 2, 3)
        assert identity_map((3,)).compose(s).allclose(s, tol=1e-14)
        assert s.compose(identity_map((2,))).allclose(s, tol=1e-14)

    def test_compose_action(self, rng):
        s, t = random_superop(rng, 2, 3), random_superop(rng, 3, 2)
        x = rand_complex(rng, 2)
        assert np.allclose(t.compose(s)(x), t(s(x)))

    def test_compose_shape_mismatch(self, rng):
        with pytest.raises(ShapeMismatchError):
            random_superop(rng, 2).compose(random_superop(rng, 3))

    def test_tensor_of_cptp_is_cptp(self, rng):
        for _ in range(50):
            n1, n2 = rng.integers(2, 4), rng.integers(2, 4)
            s = random_cptp(rng, int(n1)).tensor(random_cptp(rng, int(n2)))
            fl = s.classify()
            assert fl.cp and fl.tp

    def test_tensor_action_is_kron(self, rng):
        s, t = random_superop(rng, 2), random_superop(rng, 2)
        st = s.tensor(t)
        x, y = rand_complex(rng, 2), rand_complex(rng, 2)
        assert np.allclose(st(kron(x, y)), kron(s(x), t(y)))

    def test_direct_sum_unital(self, rng):
        u1, u2 = rand_unitary(rng, 2), rand_unitary(rng, 3)
        s = conjugation(u1).adjoint().direct_sum(conjugation(u2).adjoint())
        assert s.classify().unital

    def test_cp_preserved_by_amplify_compose(self, rng):
        s = random_cptp(rng, 2)
        assert s.amplify(2).classify().cp
        assert s.compose(random_cptp(rng, 2)).classify().cp


class TestAmplifiedNormOne:
    def test_cptp_amplified_norm_one(self, rng):
        # ‖φ_k‖ = 1 for CPTP φ and k ≤ 3: lower by a density input, upper by ⋄
        from oscat.normlab.diamond import diamond_norm

        s = random_cptp(rng, 2)
        br = diamond_norm(s)
        assert br.upper <= 1 + 1e-6
        for k in (1, 2, 3):
            amp = s.amplify(k)
            rho = np.zeros((2 * k, 2 * k), dtype=complex)
            rho[0, 0] = 1.0
            out = amp(rho)
            assert abs(tr_norm(out) - 1.0) <= 1e-9

    def test_cpu_amplified_norm_one(self, rng):
        from oscat.normlab.diamond import cb_norm

        u = rand_unitary(rng, 2)
        s = conjugation(u).adjoint()
        br = cb_norm(s, "operator")
        assert br.upper <= 1 + 1e-6
        for k in (1, 2, 3):
            amp = s.amplify(k)
            assert abs(op_norm(amp(np.eye(2 * k))) - 1.0) <= 1e-9


class TestFunctionalMaps:
    def test_trace_map_reps(self):
        from oscat.normlab.diamond import functional_norm, functional_rep

        tm = trace_map((2, 3))
        rep = functional_rep(tm)
        assert all(np.allclose(b, np.eye(k)) for b, k in zip(rep.blocks, (2, 3)))
        assert abs(functional_norm(rep, "operator") - 5.0) < 1e-12
        assert abs(functional_norm(rep, "trace") - 1.0) < 1e-12

    def test_kraus_roundtrip(self, rng):
        s = random_cptp(rng, 2)
        ops = s.kraus()[(0, 0)]
        x = rand_complex(rng, 2)
        out = sum(k @ x @ k.conj().T for k in ops)
        assert np.allclose(out, s(x), atol=1e-10)
