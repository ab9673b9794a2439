from dataclasses import replace

import numpy as np
import pytest

from conftest import random_cptp, random_superop
from oscat.matcore import BlockMatrix, rand_complex, rand_unitary
from oscat.supop import SuperOp, conjugation, identity_map, transpose_map
from oscat.vnstruct import (
    abstract_positive_functional,
    certify_morphism,
    check_laws,
    direct_sum_algebra,
    direct_sum_coalgebra,
    dualize,
    make_algebra,
    make_coalgebra,
    positivity,
    tensor_algebra,
    tensor_algebra_structure_composite,
    tensor_coalgebra,
    tensor_coalgebra_structure_composite,
    trace_pairing,
    _tensor_reindex,
)

SHAPES = ([1], [2], [3], [2, 1], [2, 2])


class TestConstruction:
    def test_comultiplication_formula(self):
        # δ(e_00) = e_00 ⊗ e_00 + e_10 ⊗ e_01 on T_2, expanded symbolically
        co = make_coalgebra([2])
        e00 = BlockMatrix([np.array([[1, 0], [0, 0]], dtype=complex)])
        dv = co.comult(e00).reshape(4, 4)
        want = np.zeros((4, 4))
        want[0, 0] = 1.0  # e_00 ⊗ e_00
        want[2, 1] = 1.0  # e_10 ⊗ e_01
        assert np.allclose(dv, want)

    def test_symbolic_delta_oracle(self):
        # independent expansion of δ(e_ij) = Σ_k e_kj ⊗ e_ik for every basis unit
        n = 3
        co = make_coalgebra([n])
        for i in range(n):
            for j in range(n):
                e = np.zeros((n, n), dtype=complex)
                e[i, j] = 1.0
                dv = co.comult(BlockMatrix([e])).reshape(n * n, n * n)
                want = np.zeros((n * n, n * n))
                for k in range(n):
                    want[k * n + j, i * n + k] += 1.0
                assert np.allclose(dv, want)

    def test_scalar_algebra(self):
        alg = make_algebra([1])
        assert np.allclose(alg.unit_vec, [1.0])
        assert np.allclose(alg.mult_mat, [[1.0]])

    def test_mixed_shape_unit(self):
        alg = make_algebra([2, 3])
        u = alg.unit()
        assert np.allclose(u.blocks[0], np.eye(2)) and np.allclose(u.blocks[1], np.eye(3))


class TestLaws:
    @pytest.mark.parametrize("shape", SHAPES)
    def test_algebra_laws(self, shape, rng):
        rep = check_laws(make_algebra(shape), sample_count=50, rng=rng)
        assert rep.passed, rep.failures

    @pytest.mark.parametrize("shape", SHAPES)
    def test_coalgebra_laws(self, shape, rng):
        rep = check_laws(make_coalgebra(shape), sample_count=50, rng=rng)
        assert rep.passed, rep.failures

    def test_mutated_comult_flagged(self, rng):
        co = make_coalgebra([2])
        bad = replace(co, comult_mat=co.comult_mat.copy())
        bad.comult_mat[3, 1] += 1e-3
        rep = check_laws(bad, sample_count=5, rng=rng)
        assert not rep.passed
        assert any("coassociativity" == f[0] for f in rep.failures)

    def test_mutated_mult_flagged(self, rng):
        alg = make_algebra([2])
        bad = replace(alg, mult_mat=alg.mult_mat.copy())
        bad.mult_mat[2, 9] += 1e-3
        assert not check_laws(bad, sample_count=5, rng=rng).passed

    def test_mutated_involution_flagged(self, rng):
        alg = make_algebra([2])
        bad = replace(alg, inv_mat=alg.inv_mat.copy())
        bad.inv_mat[0, 3] += 1e-3
        assert not check_laws(bad, sample_count=5, rng=rng).passed


class TestDuality:
    @pytest.mark.parametrize("shape", SHAPES)
    def test_dualize_algebra_gives_canonical_coalgebra(self, shape):
        co = dualize(make_algebra(shape))
        canon = make_coalgebra(shape)
        assert np.allclose(co.comult_mat, canon.comult_mat)
        assert np.allclose(co.counit_vec, canon.counit_vec)
        assert np.allclose(co.inv_mat, canon.inv_mat)

    @pytest.mark.parametrize("shape", SHAPES)
    def test_double_dual_identity(self, shape):
        alg = make_algebra(shape)
        rt = dualize(dualize(alg))
        assert np.array_equal(rt.mult_mat, alg.mult_mat)
        assert np.array_equal(rt.unit_vec, alg.unit_vec)
        co = make_coalgebra(shape)
        rt = dualize(dualize(co))
        assert np.array_equal(rt.comult_mat, co.comult_mat)

    def test_delta_is_mu_star(self):
        # ⟨δ(f), x ⊗ y⟩ = ⟨f, x·y⟩ for all basis triples via tr(e_ij ab)
        shape = [2]
        alg = make_algebra(shape)
        co = dualize(alg)
        d = alg.dim
        eye = np.eye(d)
        for a in range(d):
            fa = BlockMatrix.from_vector(eye[a], shape)
            dv = co.comult(fa).reshape(d, d)
            for b in range(d):
                xb = BlockMatrix.from_vector(eye[b], shape)
                for c in range(d):
                    yc = BlockMatrix.from_vector(eye[c], shape)
                    lhs = sum(
                        dv[p, q]
                        * trace_pairing(BlockMatrix.from_vector(eye[p], shape), xb)
                        * trace_pairing(BlockMatrix.from_vector(eye[q], shape), yc)
                        for p in range(d)
                        for q in range(d)
                    )
                    assert lhs == trace_pairing(fa, xb @ yc)

    def test_shape_roles_swap(self):
        # ⊕∞ algebras dualize to ⊕₁ coalgebras on the same block shape
        co = dualize(make_algebra([2, 3]))
        assert co.shape == (2, 3)
        assert abs(co.counit(BlockMatrix.identity((2, 3))) - 5.0) < 1e-12


class TestPositivity:
    def test_identity_positive(self):
        v = positivity(BlockMatrix([np.eye(2)]), make_algebra([2]))
        assert v.positive
        w = v.witness
        assert (w @ w.adjoint() - BlockMatrix([np.eye(2)])).op_norm() < 1e-10

    def test_indefinite_flagged(self):
        v = positivity(BlockMatrix([np.diag([1.0, -1.0])]), make_coalgebra([2]))
        assert not v.positive and abs(v.diagnostic + 1.0) < 1e-12

    def test_gram_witness_roundtrip(self, rng):
        for _ in range(20):
            t = rand_complex(rng, 3)
            p = BlockMatrix([t.conj().T @ t])
            v = positivity(p, make_coalgebra([3]))
            assert v.positive
            w = v.witness
            err = (BlockMatrix([w.blocks[0].conj().T @ w.blocks[0]]) - p).op_norm()
            assert err <= 1e-8

    def test_abstract_route_matches_concrete(self, rng):
        co = make_coalgebra([2, 1])
        for trial in range(40):
            if trial % 2 == 0:
                p = BlockMatrix([b.conj().T @ b for b in (rand_complex(rng, 2), rand_complex(rng, 1))])
            else:
                p = BlockMatrix([rand_complex(rng, 2) + rand_complex(rng, 2).conj().T, rand_complex(rng, 1).real.astype(complex)])
            ok_abs, _, _ = abstract_positive_functional(co, p)
            ok_con = positivity(p, co, tol=1e-8).positive
            assert ok_abs == ok_con


class TestMorphisms:
    def test_heisenberg_unitary_cpu_and_hom(self, rng):
        u = rand_unitary(rng, 2)
        heis = conjugation(u).adjoint()
        alg = make_algebra([2])
        assert certify_morphism(heis, alg, alg, "cpu").ok
        assert certify_morphism(heis, alg, alg, "alg_hom").ok

    def test_schroedinger_unitary_cptp(self, rng):
        u = rand_unitary(rng, 2)
        co = make_coalgebra([2])
        v = certify_morphism(conjugation(u), co, co, "cptp")
        assert v.ok
        lo, hi = v.diagnostics["cb_norm"]
        assert abs((lo + hi) / 2 - 1.0) <= 1e-6

    def test_negation_not_positive(self):
        neg = SuperOp.from_action(lambda x: BlockMatrix([-x.blocks[0]]), (2,), (2,))
        v = certify_morphism(neg, make_algebra([2]), make_algebra([2]), "cpu")
        assert not v.ok and any(f[0] == "cp" for f in v.failures)

    def test_identity_is_coalg_hom(self):
        co = make_coalgebra([2])
        assert certify_morphism(identity_map((2,)), co, co, "coalg_hom").ok

    def test_transpose_is_alg_antihom_not_hom(self):
        # transpose reverses products, so the multiplicative diagram fails
        alg = make_algebra([2])
        v = certify_morphism(transpose_map(2), alg, alg, "alg_hom")
        assert not v.ok and any(f[0] == "multiplicative" for f in v.failures)

    def test_cc_cp_equivalence_unital_maps(self, rng):
        # unital + completely contractive ⇔ CPU, both directions, via cb-norms
        from oscat.normlab.diamond import cb_norm

        for trial in range(12):
            if trial % 2 == 0:
                # unital CP map from normalized Kraus operators
                ops = [rand_complex(rng, 2) for _ in range(2)]
                s = sum(k @ k.conj().T for k in ops)
                w = np.linalg.inv(np.linalg.cholesky(s))
                ops = [w @ k for k in ops]
                f = SuperOp.from_action(
                    lambda x, ops=ops: BlockMatrix(
                        [sum(k @ x.blocks[0] @ k.conj().T for k in ops)]
                    ),
                    (2,),
                    (2,),
                )
            else:
                f = transpose_map(2)  # unital but not CP
            flags = f.classify()
            assert flags.unital
            br = cb_norm(f, "operator")
            contractive = br.upper <= 1 + 1e-6
            assert contractive == flags.cp

    def test_cc_cp_equivalence_tp_maps(self, rng):
        from oscat.normlab.diamond import diamond_norm

        for trial in range(12):
            if trial % 2 == 0:
                f = random_cptp(rng, 2)
            else:
                # trace preserving but visibly not CP
                f = transpose_map(2).compose(random_cptp(rng, 2))
                if f.classify().cp:
                    continue
            flags = f.classify()
            assert flags.tp
            br = diamond_norm(f)
            contractive = br.upper <= 1 + 1e-6
            assert contractive == flags.cp, (flags.min_choi_eig, br)

    def test_tp_iff_counital(self, rng):
        co = make_coalgebra([2])
        for trial in range(20):
            s = random_cptp(rng, 2) if trial % 2 == 0 else random_superop(rng, 2)
            counital = all(
                abs(
                    co.counit(s.apply(BlockMatrix.from_vector(np.eye(4)[a], (2,))))
                    - co.counit(BlockMatrix.from_vector(np.eye(4)[a], (2,)))
                )
                <= 1e-9
                for a in range(4)
            )
            assert counital == s.classify().tp


class TestSerialization:
    def test_structure_roundtrip(self):
        from oscat.vnstruct import structure_from_json_dict, structure_to_json_dict

        alg = make_algebra([2, 3])
        d = structure_to_json_dict(alg)
        assert d == {"kind": "algebra", "shape": [2, 3]}
        assert structure_from_json_dict(d).shape == (2, 3)

    def test_morphism_claim_roundtrip(self, rng):
        from oscat.vnstruct import certify_claim, morphism_claim

        u = rand_unitary(rng, 2)
        co = make_coalgebra([2])
        claim = morphism_claim(conjugation(u), co, co, "cptp")
        assert set(claim) == {"choi", "src", "dst", "mode"}
        assert certify_claim(claim).ok


class TestTensorStructures:
    def test_tensor_algebra_composite_equals_canonical(self):
        a, b = make_algebra([2]), make_algebra([2])
        unit_t, mult_t, inv_t = tensor_algebra_structure_composite(a, b)
        r = _tensor_reindex(a.shape, b.shape)
        canon = tensor_algebra(a, b)
        assert canon.shape == (4,)
        assert np.allclose(r @ unit_t, canon.unit_vec)
        assert np.allclose(r @ mult_t, canon.mult_mat @ np.kron(r, r))
        assert np.allclose(r @ inv_t, canon.inv_mat @ r)

    def test_tensor_coalgebra_composite_equals_canonical(self):
        c, d = make_coalgebra([2]), make_coalgebra([2])
        cu, cm, ci = tensor_coalgebra_structure_composite(c, d)
        r = _tensor_reindex(c.shape, d.shape)
        canon = tensor_coalgebra(c, d)
        assert np.allclose(r @ cu, canon.counit_vec)
        assert np.allclose(np.kron(r, r) @ cm, canon.comult_mat @ r)

    def test_composite_structures_satisfy_raw_laws(self):
        # associativity/unit of the v-shuffle multiplication, pre-reindex
        a, b = make_algebra([2]), make_algebra([1])
        unit_t, mult_t, _ = tensor_algebra_structure_composite(a, b)
        d = unit_t.size
        eye = np.eye(d)
        assert np.allclose(mult_t @ np.kron(mult_t, eye), mult_t @ np.kron(eye, mult_t))
        assert np.allclose(mult_t @ np.kron(unit_t.reshape(d, 1), eye), eye)

    @pytest.mark.parametrize("shapes", [([2], [2]), ([2], [3]), ([2, 1], [2])])
    def test_tensor_and_sums_pass_laws(self, shapes, rng):
        sa, sb = shapes
        assert check_laws(tensor_algebra(make_algebra(sa), make_algebra(sb)), 30, rng=rng).passed
        assert check_laws(direct_sum_algebra(make_algebra(sa), make_algebra(sb)), 30, rng=rng).passed
        assert check_laws(tensor_coalgebra(make_coalgebra(sa), make_coalgebra(sb)), 30, rng=rng).passed
        assert check_laws(direct_sum_coalgebra(make_coalgebra(sa), make_coalgebra(sb)), 30, rng=rng).passed
