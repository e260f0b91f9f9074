import pytest

from conftest import load, mt, v
from popmatch.errors import NotAPerfect, ValidationError
from popmatch.graph import Matching
from popmatch.instance import add_last_resorts, random_instance
from popmatch.oracle import candidate_matchings, enumerate_matchings
from popmatch.weights import Sign, g_m_plus, labels_smi, matching_weight, weight_ha, weight_hat


def w_of(inst, w, a, h):
    return w[(v(inst, a), v(inst, h))]


def test_weight_ha_i1(i1):
    w = weight_ha(i1, mt(i1, "a1 h1; a2 h2"))
    assert [w_of(i1, w, *e) for e in [("a1", "h1"), ("a1", "h2"), ("a2", "h1"), ("a2", "h2")]] == [1, 0, 2, 1]
    assert w_of(i1, w, "a1", "l(a1)") == 0 and w_of(i1, w, "a2", "l(a2)") == 0
    w = weight_ha(i1, mt(i1, "a1 h2; a2 h1"))
    assert w_of(i1, w, "a1", "h1") == 2


def test_weight_of_matching_is_number_of_applicants():
    for seed in range(20):
        inst = add_last_resorts(random_instance(seed, "hat", 3, 3, 0.7, 0.4))
        for m in candidate_matchings(inst):
            w = weight_hat(inst, m)
            assert matching_weight(w, m) == len(inst.left)
            assert set(w) == set(inst.edges) and set(w.values()) <= {0, 1, 2}


def test_weight_ha_needs_a_perfect(i1):
    with pytest.raises(NotAPerfect):
        weight_ha(i1, Matching([(v(i1, "a1"), v(i1, "h1"))]))


def test_weight_ha_rejects_ties(i3):
    with pytest.raises(ValidationError):
        weight_ha(i3, mt(i3, "a1 h2; a2 h1"))


def test_weight_hat_i3(i3):
    w = weight_hat(i3, mt(i3, "a1 h2; a2 h1"))
    assert w_of(i3, w, "a1", "h1") == 1
    assert w_of(i3, w, "a2", "h2") == 0


def test_weight_hat_equals_weight_ha_without_ties():
    for seed in range(20):
        inst = add_last_resorts(random_instance(seed, "ha", 3, 3, 0.8))
        for m in candidate_matchings(inst):
            assert weight_ha(inst, m) == weight_hat(inst, m)


def test_labels_smi_i4(i4):
    lab = labels_smi(i4, mt(i4, "u1 v1; u2 v2"))
    e = (v(i4, "u2"), v(i4, "v1"))
    assert lab.label(e) == (Sign.PLUS, Sign.MINUS)
    assert (lab.phi[e], lab.psi[e], lab.w[e]) == (2, 0, 2)
    e = (v(i4, "u1"), v(i4, "v1"))
    assert lab.label(e) == (Sign.ZERO, Sign.ZERO) and lab.w[e] == 2
    empty = labels_smi(i4, Matching())
    for e in i4.edges:
        assert empty.label(e) == (Sign.PLUS, Sign.PLUS)
        assert (empty.phi[e], empty.psi[e], empty.w[e]) == (1, 1, 2)


def test_g_m_plus(i4):
    stable = mt(i4, "u1 v1; u2 v2")
    gp = g_m_plus(labels_smi(i4, stable))
    assert (v(i4, "u2"), v(i4, "v2")) in gp
    assert set(stable.edges) <= gp
    assert g_m_plus(labels_smi(i4, Matching())) == frozenset(i4.edges)
    lab = labels_smi(i4, stable)
    assert all(lab.label(e) != (Sign.MINUS, Sign.MINUS) for e in gp)


def test_minus_minus_edge_deleted():
    inst = load("i4")
    m = mt(inst, "u1 v2; u2 v1")
    lab = labels_smi(inst, m)
    # u1 holds v2 and prefers v1; v1 holds u2 and prefers u1: (u1,v1) is (+,+)
    assert lab.is_plus_plus((v(inst, "u1"), v(inst, "v1")))
    # u2 holds v1 (its top), v2 holds u1 (its top): (u2,v2) is (-,-)
    assert (v(inst, "u2"), v(inst, "v2")) not in g_m_plus(lab)


def test_smi_label_invariants():
    for seed in range(25):
        inst = random_instance(seed, "smi", 3, 3, 0.7)
        for m in enumerate_matchings(inst.graph()):
            lab = labels_smi(inst, m)
            for e in inst.edges:
                u, x = e
                assert lab.w[e] == lab.phi[e] + lab.psi[e]
                if e in m.edges:
                    assert (lab.phi[e], lab.psi[e], lab.w[e]) == (1, 1, 2)
                assert (lab.phi[e] == 2) == (lab.alpha[e] is Sign.PLUS and m.is_matched(u))
                assert (lab.alpha[e] is Sign.PLUS and not m.is_matched(u)) == (lab.phi[e] == 1 and e not in m.edges)
                assert (lab.psi[e] == 2) == (lab.beta[e] is Sign.PLUS and m.is_matched(x))
