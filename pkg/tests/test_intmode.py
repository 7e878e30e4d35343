from selfcloseness import dgl, endo, intmode, registry
from selfcloseness.constraints import diagonal_system
from selfcloseness.intmode import BOUNDED, COMPLETE, integer_monomial_analyze, integer_unit_nse, system_from_equations


def mt_system():
    return system_from_equations(["λ", "μ", "s"], [
        ({"s": 1}, {"λ": 2, "μ": 4}),
        ({"s": 1}, {"λ": 6, "μ": 1}),
        ({"s": 1}, {"λ": 5, "μ": 2}),
    ])


def test_mimura_toda_system_has_unique_nonzero_solution():
    r = integer_monomial_analyze(mt_system())
    assert r.status == COMPLETE
    assert r.kind == "finite"
    assert r.solutions == [{"λ": 1, "μ": 1, "s": 1}]


def test_parametrized_family():
    ms = system_from_equations(["λ", "μ", "s"], [({"s": 1}, {"λ": 2, "μ": 3}), ({"s": 1}, {"λ": 5})])
    r = integer_monomial_analyze(ms)
    assert r.status == COMPLETE
    assert r.kind == "parametrized"
    assert r.free == ["λ"]
    assert r.to_dict()["dependents"] == {"μ": "λ", "s": "λ^5"}


def test_empty_system():
    r = integer_monomial_analyze(system_from_equations(["a", "b"], []))
    assert r.status == COMPLETE
    assert r.free == ["a", "b"]


def test_rank_one_lattice_is_exact():
    ms = system_from_equations(["λ", "μ", "s"], [({"s": 1}, {"λ": 2, "μ": 4}), ({"s": 1}, {"λ": 6, "μ": 1})])
    r = integer_monomial_analyze(ms)
    assert r.status == COMPLETE
    assert r.to_dict()["dependents"] == {"λ": "t^3", "μ": "t^4", "s": "t^22"}
    # spot-check the parametrization on t = 2 with both signs of λ
    for sign in (1, -1):
        lam, mu, s = sign * 8, 16, 2 ** 22
        assert s == lam ** 2 * mu ** 4 == lam ** 6 * mu


def test_non_unit_scalars_fall_back_to_search():
    from fractions import Fraction
    from selfcloseness.constraints import MonomialEquation, MonomialSystem
    eq = MonomialEquation(((0, 2),), (), Fraction(4), True, "")
    ms = MonomialSystem(["x"], [0], [eq], [], ["x"])
    r = integer_monomial_analyze(ms, bound=5)
    assert r.status == BOUNDED
    assert sorted(s["x"] for s in r.solutions) == [-2, 2]


def test_unit_thresholds():
    v = integer_unit_nse(mt_system(), {"λ": 2, "μ": 3, "s": 12})
    assert v.value == 3
    assert v.steps[0].startswith("k=2: not an equivalence")


def test_weights_follow_leaf_products():
    ws = intmode.weight_system(registry.mimura_toda(1, 1, 1), {"u1": "λ", "u2": "μ"}, "u11")
    assert ws.weights["u3"] == {"λ": 2}
    assert ws.format() == "s=λ²μ⁴=λ⁶μ=λ⁵μ²"


def test_weights_agree_with_rational_diagonal_system():
    # After substituting l_u3 = l_u1^2 the rational diagonal equations for u11
    # have exactly the integer weights.
    model = dgl.from_space(registry.mimura_toda(1, 1, 1))
    ms = diagonal_system(endo.derive_constraints(model))
    subst = []
    for e in ms.equations:
        lhs = dict((ms.names[v], k) for v, k in e.lhs)
        if list(lhs) != ["l_u11"]:
            continue
        w = {}
        for v, k in e.rhs:
            name = ms.names[v]
            if name == "l_u3":
                w["l_u1"] = w.get("l_u1", 0) + 2 * k
            else:
                w[name] = w.get(name, 0) + k
        subst.append((w.get("l_u1", 0), w.get("l_u2", 0)))
    ws = intmode.weight_system(registry.mimura_toda(1, 1, 1), {"u1": "λ", "u2": "μ"}, "u11")
    assert sorted(subst) == sorted((t.get("λ", 0), t.get("μ", 0)) for t in ws.terms)


def test_mimura_toda_analysis():
    r = intmode.mimura_toda_analysis(1, 1, 1)
    assert r["system"] == "s=λ²μ⁴=λ⁶μ=λ⁵μ²"
    assert r["solutions"]["solutions"] == [{"λ": 1, "μ": 1, "s": 1}]
    assert r["conclusion"] == "N𝓔=3"
    for abc in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (2, -1, 3)]:
        assert intmode.mimura_toda_analysis(*abc)["conclusion"] == "N𝓔=3"
    assert intmode.mimura_toda_analysis(0, 0, 0)["conclusion"] == "N𝓔=12"


def test_format_monomial():
    assert intmode.format_monomial({"λ": 2, "μ": 4}) == "λ²μ⁴"
    assert intmode.format_monomial({"λ": 6, "μ": 1}) == "λ⁶μ"
    assert intmode.format_monomial({}) == "1"
