"""Translation tests: the model construction, its starred variant, the
isomorphism conditions, the image conditions, functor laws, and the
starred-injectivity sweep."""

import numpy as np
import pytest

from qrtmodal import corpus
from qrtmodal.errors import StructuralError
from qrtmodal.generate import (
    GeneratorConfig,
    generate_qrt,
    random_relabeling,
    random_sub_qrt,
)
from qrtmodal.kripke import is_s4, is_sub_model, models_isomorphic
from qrtmodal.linalg import basis_state, preparation_channel, scalar_one
from qrtmodal.qrt import ChannelDecl, Qrt, SystemDecl, complete_composition
from qrtmodal.translate import (
    image_conditions,
    iso_conditions,
    to_model,
    to_starred_model,
    verify_functoriality,
    verify_starred_injectivity,
)


class TestToModel:
    def test_trivial_theory(self):
        rec = to_model(corpus.trivial_qrt())
        assert rec.model.worlds == {"c"}
        assert rec.model.access == {("c", "c")}
        assert rec.model.interp == {"c.one": 1}  # the unit axiom
        assert rec.c_world == "c"
        assert len(rec.model.domains["c"]) == 1

    def test_identity_only_two_systems(self):
        q = complete_composition(
            Qrt(
                [
                    SystemDecl("A", 2, {"a0": basis_state(2, 0)}),
                    SystemDecl("B", 2, {"b0": basis_state(2, 0)}),
                ]
            )
        )
        rec = to_model(q)
        assert rec.model.access == {("A", "A"), ("B", "B")}
        assert rec.c_world is None

    def test_entanglement_unique_false_atom(self):
        rec = to_model(corpus.entanglement_qrt())
        false_atoms = [a for a, v in rec.model.interp.items() if v == 0]
        assert false_atoms == ["AB.bell"]

    def test_name_maps_are_bijections(self):
        q = corpus.entanglement_qrt()
        rec = to_model(q)
        assert set(rec.world_of.values()) == rec.model.worlds
        assert set(rec.atom_of.values()) == rec.model.domain
        assert len(rec.atom_of) == len(q.nodes)

    def test_invalid_source_rejected(self):
        with pytest.raises(StructuralError):
            to_model(corpus.broken_tp_qrt())

    def test_incomplete_source_rejected(self):
        from qrtmodal.linalg import constant_channel

        a0, sigma = basis_state(2, 0), basis_state(2, 1)
        q = Qrt(
            [
                SystemDecl("c", 1, {"one": scalar_one()}),
                SystemDecl("A", 2, {"rho": a0}),
                SystemDecl("B", 2, {"sigma": sigma}),
            ],
            [
                ChannelDecl("prep", "c", "A", preparation_channel(a0)),
                ChannelDecl("fwd", "A", "B", constant_channel(sigma, 2)),
            ],
        )
        with pytest.raises(StructuralError):
            to_model(q)  # the composite preparation is missing

    def test_always_s4(self):
        cfg = GeneratorConfig(seed=11, n_systems=4, dims=(1, 2, 3), states_per_system=4)
        for idx in range(10):
            rec = to_model(generate_qrt(cfg, index=idx))
            ok, witness = is_s4(rec.model)
            assert ok, witness


class TestToStarredModel:
    def test_identity_only_order_is_diagonal(self):
        q = complete_composition(Qrt([SystemDecl("A", 2, {"a0": basis_state(2, 0)})]))
        rec = to_starred_model(q)
        assert rec.order == frozenset({("A.a0", "A.a0")})

    def test_single_conversion_pair(self):
        from qrtmodal.linalg import constant_channel

        a0, a1 = basis_state(2, 0), basis_state(2, 1)
        q = complete_composition(
            Qrt(
                [SystemDecl("A", 2, {"a": a0, "b": a1})],
                [ChannelDecl("f", "A", "A", constant_channel(a1, 2))],
            )
        )
        rec = to_starred_model(q)
        strict = {p for p in rec.order if p[0] != p[1]}
        assert strict == {("A.a", "A.b")}

    def test_entanglement_bell_below_free_image(self):
        rec = to_starred_model(corpus.entanglement_qrt())
        assert ("AB.bell", "AB.pmix") in rec.order
        assert rec.model.interp["AB.pmix"] == 1
        assert rec.model.interp["AB.bell"] == 0

    def test_atom_truth_monotone_along_edges(self):
        cfg = GeneratorConfig(seed=13, n_systems=3, dims=(1, 2), states_per_system=3)
        for idx in range(8):
            q = generate_qrt(cfg, index=idx)
            rec = to_starred_model(q)
            for (src, dst, _) in q.state_graph.edges:
                if rec.model.interp[rec.atom_of[src]] == 1:
                    assert rec.model.interp[rec.atom_of[dst]] == 1


class TestIsoConditions:
    def test_self_pair(self):
        q = corpus.chain_qrt()
        assert iso_conditions(q, q) == {"i": True, "ii": True, "iii": True}

    def test_free_set_difference_breaks_ii(self):
        from qrtmodal.linalg import function_channel

        x, _ = corpus.xi_pair()
        # same shape, but one state loses its preparation and hence its freeness
        r0, r1 = basis_state(2, 0), basis_state(2, 1)
        systems = [
            SystemDecl("c", 1, {"one": scalar_one()}),
            SystemDecl("A", 2, {"r0": r0, "r1": r1}),
            SystemDecl("B", 2, {"s0": r0, "s1": r1}),
        ]
        channels = [
            ChannelDecl("prep_r0", "c", "A", preparation_channel(r0)),
            ChannelDecl("prep_s0", "c", "B", preparation_channel(r0)),
            ChannelDecl("prep_s1", "c", "B", preparation_channel(r1)),
            ChannelDecl("cross", "A", "B", function_channel([0, 1], 2, 2)),
        ]
        y = complete_composition(Qrt(systems, channels))
        assert len(y.free_states) < len(x.free_states)
        cond = iso_conditions(x, y)
        assert not cond["ii"]

    def test_twisted_pair_conditions_hold(self):
        x, y = corpus.xi_pair()
        cond = iso_conditions(x, y)
        assert cond == {"i": True, "ii": True, "iii": True}
        # the channel matrices genuinely differ
        fx = next(d for d in x.channels if d.id == "cross").channel
        fy = next(d for d in y.channels if d.id == "cross").channel
        assert not all(
            np.allclose(a, b) for a, b in zip(fx.kraus_ops, fy.kraus_ops)
        )
        ok, _ = models_isomorphic(to_model(x).model, to_model(y).model)
        assert ok

    def test_gap_pair_fails_iii_but_models_agree(self):
        x, y = corpus.iso_gap_pair()
        cond = iso_conditions(x, y)
        assert cond["i"] and cond["ii"] and not cond["iii"]
        ok, _ = models_isomorphic(to_model(x).model, to_model(y).model)
        assert ok  # the documented desk-scale gap in the equivalence

    def test_dim_mismatch_reports_relative_best(self):
        a = complete_composition(Qrt([SystemDecl("A", 2, {"a0": basis_state(2, 0)})]))
        b = complete_composition(Qrt([SystemDecl("B", 3, {"b0": basis_state(3, 0)})]))
        cond = iso_conditions(a, b)
        assert not cond["i"]
        assert cond["ii"] and cond["iii"]  # relative to the count-matching bijection

    def test_equivalence_over_small_family(self):
        cfg = GeneratorConfig(seed=17, n_systems=3, dims=(1, 2), states_per_system=2)
        qs = [generate_qrt(cfg, index=i) for i in range(5)]
        qs.append(random_relabeling(qs[0], np.random.default_rng(0)))
        recs = [to_model(q) for q in qs]
        for i, x in enumerate(qs):
            for j, y in enumerate(qs):
                cond = iso_conditions(x, y)
                conj = cond["i"] and cond["ii"] and cond["iii"]
                oracle, _ = models_isomorphic(recs[i].model, recs[j].model)
                assert conj == oracle, (i, j, cond, oracle)


class TestImageConditions:
    def test_translated_images_satisfy_both(self):
        for build in (corpus.chain_qrt, corpus.entanglement_qrt, corpus.trivial_qrt):
            rec = to_model(build())
            cond = image_conditions(rec.model)
            assert cond["i"] and cond["ii"]
            assert cond["c_world"] == "c"

    def test_broken_monotone_flagged(self):
        cond = image_conditions(corpus.broken_monotone_model())
        assert not cond["i"]
        assert cond["witness_i"] == ("w", "u")

    def test_broken_no_unit_flagged(self):
        cond = image_conditions(corpus.broken_no_unit_model())
        assert cond["i"] and not cond["ii"]
        assert cond["c_world"] is None


class TestVerifyFunctoriality:
    def test_relabelings_and_subs(self):
        rng = np.random.default_rng(23)
        q = corpus.entanglement_qrt()
        rels = [random_relabeling(q, rng) for _ in range(2)]
        subs = [random_sub_qrt(q, rng) for _ in range(2)]
        rep = verify_functoriality(q, rels, subs)
        assert rep["ok"], rep
        assert rep["identity"]
        assert all(rep["relabelings"]) and all(rep["sub_models"])
        assert rep["nested"] in (True, None)

    def test_sub_model_follows_restriction(self):
        q = corpus.chain_qrt()
        from qrtmodal.qrt import sub_qrt

        sub = sub_qrt(q, ["c", "A"])
        assert is_sub_model(to_model(sub).model, to_model(q).model)

    def test_wrong_claimed_relabeling_flagged(self):
        rep = verify_functoriality(
            corpus.chain_qrt(), relabelings=[corpus.convex_closed_qrt()]
        )
        assert not rep["ok"]
        assert rep["relabelings"] == [False]


class TestStarredInjectivity:
    def test_relabeled_pair_consistent(self):
        rng = np.random.default_rng(29)
        q = corpus.chain_qrt()
        rep = verify_starred_injectivity([(q, random_relabeling(q, rng))])
        assert rep["falsifications"] == 0
        assert rep["entries"][0]["verdict"] == "consistent"
        assert rep["entries"][0]["starred_isomorphic"]

    def test_different_free_sizes_non_isomorphic(self):
        x = corpus.chain_qrt()
        y = corpus.convex_closed_qrt()
        rep = verify_starred_injectivity([(x, y)])
        assert rep["entries"][0]["verdict"] == "consistent"
        assert not rep["entries"][0]["starred_isomorphic"]

    def test_twisted_sweep_tabulated(self):
        pairs = [(a, b) for _, a, b in corpus.xi_sweep()]
        labels = [name for name, _, _ in corpus.xi_sweep()]
        rep = verify_starred_injectivity(pairs, labels=labels)
        assert rep["falsifications"] == 0
        assert len(rep["entries"]) == 3
        assert all(e["verdict"] == "consistent" for e in rep["entries"])

    def test_gap_pair_flagged(self):
        rep = verify_starred_injectivity([corpus.injectivity_gap_pair()])
        assert rep["falsifications"] == 1
        entry = rep["entries"][0]
        assert entry["verdict"] == "falsification-candidate"
        assert entry["starred_isomorphic"] and not entry["sources_isomorphic"]
        assert "witness" in entry
