import dataclasses

import pytest

from conftest import mt, v
from popmatch.characterize import (
    blocking_pairs,
    find_popular_ha,
    find_popular_hat,
    gale_shapley_smi,
    improve_matching_smi,
    optimization_check,
    structural_check_ha,
    structural_check_hat,
    structural_check_smi,
    validate_witness,
    weight_gain,
)
from popmatch.errors import InvalidWitness, NotAPerfect
from popmatch.graph import Matching
from popmatch.instance import add_last_resorts, parse_instance, random_instance
from popmatch.lp import dual_feasible
from popmatch.matching_core import DMLabel
from popmatch.oracle import candidate_matchings, enumerate_matchings, popular_matchings
from popmatch.structure import compute_fs_ha, compute_fs_hat
from popmatch.verdict import Method, RivalMatching, StructuralWitness, WitnessKind
from popmatch.weights import weights_for


def names(xs):
    return {x.name for x in xs}


def test_compute_fs_ha(i1, i2):
    fs = compute_fs_ha(i1)
    assert {a.name: h.name for a, h in fs.f.items()} == {"a1": "h1", "a2": "h1"}
    assert names(fs.h_f) == {"h1"}
    assert {a.name: h.name for a, h in fs.s.items()} == {"a1": "h2", "a2": "h2"}
    fs = compute_fs_ha(i2)
    assert names(fs.h_f) == {"h1"} and {h.name for h in fs.s.values()} == {"h2"}


def test_compute_fs_ha_falls_back_to_last_resort():
    inst = add_last_resorts(parse_instance("problem: ha\nleft: a1 a2\nright: h1 h2\npref a1: h1\npref a2: h2 > h1\n"))
    fs = compute_fs_ha(inst)
    assert fs.s[v(inst, "a1")] == v(inst, "l(a1)")


def test_compute_fs_hat(i2, i3):
    fs = compute_fs_hat(i3)
    assert names(fs.f[v(i3, "a1")]) == {"h1", "h2"} and names(fs.f[v(i3, "a2")]) == {"h1"}
    assert len(fs.g_f.edges) == 3
    hat2 = i2.with_variant("hat")
    fs = compute_fs_hat(hat2)
    assert all(names(s) == {"h2"} for s in fs.s.values())
    assert all(fs.labels[h] is DMLabel.EVEN for h in hat2.right if h.synthetic)


def test_structural_ha_examples(i1, i2):
    s = structural_check_ha(i1, mt(i1, "a1 h1; a2 h2"))
    assert s.popular and s.method is Method.STRUCTURAL and s.certificate.objective == 2
    s = structural_check_ha(i1, mt(i1, "a1 l(a1); a2 h1"))
    assert not s.popular
    assert s.certificate.kind is WitnessKind.BAD_PARTNER and names(s.certificate.payload) == {"a1"}
    for m in candidate_matchings(i2):
        s = structural_check_ha(i2, m)
        assert not s.popular
        validate_witness(i2, m, s.certificate)


def test_structural_ha_unmatched_first_choice(i1):
    s = structural_check_ha(i1, mt(i1, "a1 h2; a2 l(a2)"))
    assert s.certificate.kind is WitnessKind.UNMATCHED_F_HOUSE and names(s.certificate.payload) == {"h1"}


def test_structural_requires_a_perfect(i1):
    with pytest.raises(NotAPerfect):
        structural_check_ha(i1, Matching([(v(i1, "a1"), v(i1, "h1"))]))
    with pytest.raises(NotAPerfect):
        optimization_check(i1, Matching())


def test_structural_hat_examples(i3):
    assert structural_check_hat(i3, mt(i3, "a1 h2; a2 h1")).popular
    s = structural_check_hat(i3, mt(i3, "a1 h1; a2 h2"))
    assert not s.popular and s.certificate.kind is WitnessKind.BAD_PARTNER
    assert names(s.certificate.payload) == {"a2"}
    s = structural_check_hat(i3, mt(i3, "a1 h1; a2 l(a2)"))
    assert s.certificate.kind is WitnessKind.MF_NOT_MAXIMUM
    validate_witness(i3, mt(i3, "a1 h1; a2 l(a2)"), s.certificate)


def test_structural_hat_matches_ha_without_ties():
    for seed in range(40):
        inst = add_last_resorts(random_instance(seed, "ha", 3, 4, 0.7))
        hat = inst.with_variant("hat")
        for m in candidate_matchings(inst):
            assert structural_check_ha(inst, m).popular == structural_check_hat(hat, m).popular


def test_structural_smi_examples(i4):
    s = structural_check_smi(i4, mt(i4, "u1 v1; u2 v2"))
    assert s.popular and s.certificate.objective == 4
    s = structural_check_smi(i4, Matching())
    assert not s.popular and s.certificate.kind is WitnessKind.PLUS_PLUS_PATH_FROM_UNMATCHED
    assert len(s.certificate.payload) == 2
    m = mt(i4, "u1 v2")
    s = structural_check_smi(i4, m)
    assert not s.popular and s.certificate.kind is WitnessKind.PLUS_PLUS_PATH_FROM_UNMATCHED
    validate_witness(i4, m, s.certificate)


def test_optimization_examples(i1, i2, i4):
    o = optimization_check(i1, mt(i1, "a1 h1; a2 h2"))
    assert o.popular and o.certificate.objective == 2
    o = optimization_check(i2, mt(i2, "a1 h1; a2 h2; a3 h3"))
    assert not o.popular and isinstance(o.certificate, RivalMatching) and o.certificate.weight == 4
    o = optimization_check(i4, mt(i4, "u1 v1; u2 v2"))
    assert o.popular and o.certificate.objective == 4


def test_improver_i4(i4):
    m = Matching()
    w = StructuralWitness(WitnessKind.PLUS_PLUS_PATH_FROM_UNMATCHED, (v(i4, "u1"), v(i4, "v1")))
    better = improve_matching_smi(i4, m, w)
    assert better == Matching([(v(i4, "u1"), v(i4, "v1"))])
    assert weight_gain(i4, m, better) == 2


def test_improver_rejects_tampered_witness(i4):
    m = mt(i4, "u1 v2")
    w = structural_check_smi(i4, m).certificate
    bad = dataclasses.replace(w, payload=w.payload[:1] + w.payload[2:])
    with pytest.raises(InvalidWitness):
        improve_matching_smi(i4, m, bad)
    with pytest.raises(InvalidWitness):
        improve_matching_smi(i4, m, dataclasses.replace(w, kind=WitnessKind.PLUS_PLUS_CYCLE))
    with pytest.raises(InvalidWitness):
        improve_matching_smi(i4, m, StructuralWitness(WitnessKind.BAD_PARTNER, (v(i4, "u1"),)))
    stable = mt(i4, "u1 v1; u2 v2")
    fake = StructuralWitness(WitnessKind.PLUS_PLUS_PATH_FROM_UNMATCHED, (v(i4, "u2"), v(i4, "v1")))
    with pytest.raises(InvalidWitness):
        improve_matching_smi(i4, stable, fake)


def test_improver_gains_on_random_violations():
    seen = set()
    for seed in range(150):
        inst = random_instance(seed, "smi", 4, 4, 0.7)
        for m in enumerate_matchings(inst.graph()):
            s = structural_check_smi(inst, m)
            if s.popular:
                continue
            better = improve_matching_smi(inst, m, s.certificate)
            gain = weight_gain(inst, m, better)
            seen.add(s.certificate.kind)
            if s.certificate.kind is WitnessKind.PLUS_PLUS_CYCLE:
                assert gain >= 2 and len(better) == len(m)
            elif s.certificate.kind is WitnessKind.TWO_PLUS_PLUS_PATH:
                assert gain >= 2
            else:
                assert gain >= 1
            assert not optimization_check(inst, m).popular
    assert WitnessKind.PLUS_PLUS_CYCLE in seen and WitnessKind.PLUS_PLUS_PATH_FROM_UNMATCHED in seen


def test_find_popular_ha(i1, i2):
    m = find_popular_ha(i1)
    assert m is not None and structural_check_ha(i1, m).popular
    assert find_popular_ha(i2) is None
    one = add_last_resorts(random_instance(3, "ha", 1, 3))
    f = compute_fs_ha(one)
    assert find_popular_ha(one) == Matching([(one.left[0], f.f[one.left[0]])])


def test_find_popular_hat(i2, i3):
    assert find_popular_hat(i3) == mt(i3, "a1 h2; a2 h1")
    assert find_popular_hat(i2.with_variant("hat")) is None


def test_find_popular_agrees_on_existence():
    for seed in range(80):
        inst = add_last_resorts(random_instance(seed, "ha", 3, 3, 0.6))
        ha = find_popular_ha(inst)
        hat = find_popular_hat(inst.with_variant("hat"))
        assert (ha is None) == (hat is None) == (not popular_matchings(inst))


def test_gale_shapley(i4):
    m = gale_shapley_smi(i4)
    assert m == mt(i4, "u1 v1; u2 v2") and not blocking_pairs(i4, m)
    one = random_instance(0, "smi", 1, 1)
    assert gale_shapley_smi(one) == Matching(one.edges)
    for seed in range(60):
        inst = random_instance(seed, "smi", 4, 4, 0.6)
        m = gale_shapley_smi(inst)
        assert not blocking_pairs(inst, m)
        assert structural_check_smi(inst, m).popular and optimization_check(inst, m).popular
        assert len(m) == min(len(p) for p in popular_matchings(inst))


def test_verdict_certificates_sound():
    for seed in range(30):
        inst = add_last_resorts(random_instance(seed, "hat", 3, 3, 0.8, 0.4))
        for m in candidate_matchings(inst):
            for verdict in (structural_check_hat(inst, m), optimization_check(inst, m)):
                if verdict.popular:
                    y = verdict.certificate
                    assert dual_feasible(y, weights_for(inst, m)) and y.objective == len(inst.left)
                blob = verdict.to_json()
                assert blob["certificate"] is not None
