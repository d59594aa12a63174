import itertools
import json

import numpy as np
import pytest

from oracles import moebius_labelling_solutions, quadruples_match
from subschmidt import catalog
from subschmidt.errors import NumericalError, QubitUnentangled
from subschmidt.pencil import MoebiusParams, ProjectiveEigenvalue, analyze, enumerate_families
from subschmidt.slocc import (
    NO_MOEBIUS,
    Labelling,
    build_certificate,
    equivalent,
    moebius_system,
    signature_match,
    solve_moebius,
)
from subschmidt.tensor_state import (
    TripartiteState,
    apply_local,
    fidelity,
    from_entries,
    relative_decomposition,
)


def _analysis(state):
    d = relative_decomposition(state)
    return d, analyze(d)


def _points(*lams):
    return [ProjectiveEigenvalue.from_lambda(l) for l in lams]


class TestSignatureMatch:
    def test_ghz_has_two_labellings(self):
        _, a = _analysis(catalog.ghz_state())
        labs = signature_match(a.signature, a.signature, a.eigenvalues, a.eigenvalues)
        assert [l.permutation for l in labs] == [(0, 1), (1, 0)]

    def test_w_vs_ghz_is_empty(self):
        _, w = _analysis(catalog.w_state())
        _, g = _analysis(catalog.ghz_state())
        assert signature_match(w.signature, g.signature, w.eigenvalues, g.eigenvalues) == []

    def test_psi_d_has_one_labelling(self):
        _, a = _analysis(catalog.named("psi_d3").state)
        assert len(signature_match(a.signature, a.signature, a.eigenvalues, a.eigenvalues)) == 1

    def test_towers_are_respected(self):
        _, a = _analysis(catalog.named("psi_f4").state)
        for lab in signature_match(a.signature, a.signature, a.eigenvalues, a.eigenvalues):
            for i, j in lab.pairs():
                assert a.eigenvalues[i][1] == a.eigenvalues[j][1]

    def test_psi_h_has_24(self):
        _, a = _analysis(catalog.named("psi_h4", 2).state)
        assert len(signature_match(a.signature, a.signature, a.eigenvalues, a.eigenvalues)) == 24

    def test_cap(self):
        _, a = _analysis(catalog.named("psi_h4", 2).state)
        with pytest.raises(NumericalError, match="cap"):
            signature_match(a.signature, a.signature, a.eigenvalues, a.eigenvalues, cap=10)


class TestSolveMoebius:
    def test_identity_for_equal_pairs(self):
        p = solve_moebius(_points(1, 0), _points(1, 0), Labelling((0, 1)))
        np.testing.assert_allclose([p.a, p.b, p.c, p.d], [1, 0, 0, 1], atol=1e-12)

    def test_single_point_leaves_free_parameters(self):
        p = solve_moebius(_points(2), _points(-3j), Labelling((0,)))
        assert p is not None
        # the parameters act on the second pencil: lam = (a lam' + b) / (c lam' + d)
        assert p(-3j) == pytest.approx(2)

    def test_three_points_always_solvable(self):
        src, dst = _points(0, 1, np.inf), _points(2, 5j, -1)
        p = solve_moebius(src, dst, Labelling((0, 1, 2)))
        for s, d in zip(src, dst):
            p0, q0 = d.homogeneous
            image = ProjectiveEigenvalue.from_coords(p.c * p0 + p.d * q0, -(p.a * p0 + p.b * q0))
            assert image.distance(s) < 1e-10

    def test_four_points_with_different_cross_ratio(self):
        src, dst = _points(0, 1, np.inf, 2), _points(0, 1, np.inf, 3)
        assert not quadruples_match([p.coords for p in src], [p.coords for p in dst])
        for perm in [(0, 1, 2, 3), (1, 0, 2, 3), (3, 2, 1, 0)]:
            assert solve_moebius(src, dst, Labelling(perm)) is None

    def test_agrees_with_exact_oracle_on_rational_points(self):
        src = [(1, 0), (1, 2), (0, 1), (1, 1)]
        for dst in ([(1, 0), (1, 3), (0, 1), (1, 1)], [(1, 0), (1, -1), (0, 1), (1, 1)], src):
            exact = set(moebius_labelling_solutions(src, dst))
            P = [ProjectiveEigenvalue.from_coords(*c) for c in src]
            Q = [ProjectiveEigenvalue.from_coords(*c) for c in dst]
            ours = {perm for perm in itertools.permutations(range(4)) if solve_moebius(P, Q, Labelling(perm))}
            assert ours == exact

    def test_system_rows_are_normalized(self):
        K = moebius_system(_points(0, 2), _points(1, 3), Labelling((0, 1)))
        np.testing.assert_allclose(np.linalg.norm(K, axis=1), 1.0)


class TestCertificate:
    def test_self_certificate_is_identity(self):
        d, a = _analysis(catalog.w_state())
        cert = build_certificate(d, d, a, a, Labelling((0,)), MoebiusParams.identity())
        for X in (cert.A, cert.B, cert.C):
            np.testing.assert_allclose(X / X[0, 0], np.eye(len(X)), atol=1e-12)
        assert cert.residual < 1e-14

    def test_w_image_maps_back(self):
        w = catalog.named("w")
        img = catalog.random_in_class(w, 11)
        res = equivalent(w.state, img)
        assert res.equivalent
        cert = res.certificate
        out = apply_local(relative_decomposition(w.state).compressed_tensor(), cert.A, cert.B, cert.C)
        assert fidelity(out, relative_decomposition(img).compressed_tensor()) >= 1 - 1e-8
        for X in (cert.A, cert.B, cert.C):
            s = np.linalg.svd(X, compute_uv=False)
            assert s[-1] > 1e-9 * s[0]

    def test_skewed_ghz_both_labellings(self):
        ghz = catalog.ghz_state()
        skewed = from_entries((2, 2, 2), {(0, 0, 0): 2, (1, 1, 1): 1})
        da, a = _analysis(ghz)
        db, b = _analysis(skewed)
        labs = signature_match(a.signature, b.signature, a.eigenvalues, b.eigenvalues)
        assert len(labs) == 2
        for lab in labs:
            p = solve_moebius(a.points, b.points, lab)
            assert p is not None
            assert build_certificate(da, db, a, b, lab, p).residual <= 1e-8

    def test_ambient_operators_on_padded_states(self):
        s = from_entries((3, 3, 2), {(0, 0, 0): 1, (1, 1, 1): 1})
        t = from_entries((3, 3, 2), {(2, 1, 0): 1, (0, 2, 1): 3})
        cert = equivalent(s, t).certificate
        A, B, C = cert.ambient
        assert A.shape == (3, 3)
        assert fidelity(apply_local(s.amplitudes, A, B, C), t) >= 1 - 1e-8
        assert np.linalg.matrix_rank(A) == 3

    def test_json(self):
        res = equivalent(catalog.w_state(), catalog.random_in_class(catalog.named("w"), 2))
        doc = json.loads(json.dumps(res.to_json()))
        assert {"equivalent", "reason", "A", "B", "C", "moebius", "labelling", "residual"} <= set(doc)
        assert len(doc["C"]) == 2 and set(doc["C"][0][0]) == {"re", "im"}


class TestEquivalence:
    def test_w_vs_ghz(self):
        res = equivalent(catalog.w_state(), catalog.ghz_state())
        assert not res.equivalent
        assert res.reason == "different Jordan family"
        assert res.certificate is None

    def test_psi_d_vs_psi_e(self):
        res = equivalent(catalog.named("psi_d3").state, catalog.named("psi_e3").state)
        assert (res.equivalent, res.reason) == (False, "different Jordan family")

    def test_different_dimensionality(self):
        res = equivalent(catalog.ghz_state(), catalog.named("psi_e3").state)
        assert (res.equivalent, res.reason) == (False, "different dimensionality")

    def test_degenerate_input_raises(self):
        prod = from_entries((2, 2, 2), {(0, 0, 0): 1})
        with pytest.raises(QubitUnentangled):
            equivalent(prod, catalog.ghz_state())

    def test_psi_h_distinct_parameters(self):
        res = equivalent(catalog.named("psi_h4", 2).state, catalog.named("psi_h4", 5).state)
        assert not res.equivalent
        assert res.reason == NO_MOEBIUS

    @pytest.mark.parametrize("other", [0.5, -2, -0.5])
    def test_psi_h_equivalent_parameters(self, other):
        # a, 1/a and -a give the same cross-ratio orbit
        assert equivalent(catalog.named("psi_h4", 2).state, catalog.named("psi_h4", other).state)

    def test_reflexive_and_symmetric(self, entries):
        for e in entries:
            img = catalog.random_in_class(e, 5)
            assert equivalent(e.state, e.state).equivalent
            assert equivalent(e.state, img).equivalent
            assert equivalent(img, e.state).equivalent

    def test_scale_invariance(self):
        e = catalog.named("psi_c3")
        img = catalog.random_in_class(e, 1)
        scaled = TripartiteState((2 - 7j) * img.amplitudes)
        assert equivalent(e.state, scaled).equivalent
        assert equivalent(TripartiteState(1e-3 * e.state.amplitudes), img).equivalent

    def test_family_separation(self):
        names = ["psi_c4", "psi_d4", "psi_e4", "psi_f4", "psi_g4", "psi_h4", "ghz_bell", "w_bell"]
        states = [catalog.named(n, 2 if n == "psi_h4" else None).state for n in names]
        for i, x in enumerate(states):
            for j, y in enumerate(states):
                if i != j:
                    assert equivalent(x, y).reason == "different Jordan family"

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_families_with_few_eigenvalues_are_single_classes(self, n):
        rng = np.random.default_rng(n)
        for sig in enumerate_families(n):
            if len(sig.towers) > 3:
                continue
            lams_a = list(rng.standard_normal(len(sig.towers)) + 1j * rng.standard_normal(len(sig.towers)))
            lams_b = list(rng.standard_normal(len(sig.towers)) + 1j * rng.standard_normal(len(sig.towers)))
            x = catalog.random_in_class(catalog.family_representative(sig, lams_a), 1)
            y = catalog.random_in_class(catalog.family_representative(sig, lams_b), 2)
            assert equivalent(x, y).equivalent, sig

    def test_moebius_consistency(self):
        e = catalog.named("psi_e3")
        img = catalog.random_in_class(e, 9)
        res = equivalent(e.state, img)
        da, a = _analysis(e.state)
        db, b = _analysis(img)
        G = res.certificate.moebius
        Phi0, Phi1 = G.combine(*db.R)
        mu = np.sort_complex(np.linalg.eigvals(np.linalg.solve(a.Phi[1], a.Phi[0])))
        H = a.regularization
        Y0, Y1 = H.combine(Phi0, Phi1)
        nu = np.sort_complex(np.linalg.eigvals(np.linalg.solve(Y1, Y0)))
        np.testing.assert_allclose(mu, nu, atol=1e-7)
