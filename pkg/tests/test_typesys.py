import dataclasses

import pytest

from tightcalc import golden
from tightcalc.syntax import parse
from tightcalc.typesys import (
    A, EMPTY, N, VL, VR, Arrow, Context, Mult, NegativeCounter, Ok, RuleError, RuleViolation,
    build, check_derivation, derivation_alpha_eq, dumps, loads, parse_type, rule_census_counters,
    tight,
)


def test_tight_multitype():
    assert tight(Mult((N,)), "N")
    assert not tight(Arrow(EMPTY, N), "N")
    assert tight(Context({"z": Mult((N,))}), "N")
    assert not tight(Mult((VR,)), "N")
    assert tight(Mult((VR,)), "V")


def test_tight_derivation_needs_constant_type():
    d = build("B", "bg_c", parse("!y", "bang"), [build("B", "var_c", parse("y"), ty=N)])
    assert d.type == Mult((N,)) and not tight(d, "B")


def test_multiset_order_insensitive():
    a = Mult.of([N, Arrow(EMPTY, A), VL])
    b = Mult.of([VL, N, Arrow(EMPTY, A)])
    assert a == b and str(a) == str(b) and len(a) == 3
    assert (a + b) == (b + a)


def test_type_order():
    assert Mult.of([VR, Arrow(EMPTY, N), Mult((N,)), N, A, VL]).items == (
        N, A, VL, VR, Mult((N,)), Arrow(EMPTY, N))


def test_context_sum_and_minus():
    g = Context({"x": Mult((N,))}) + Context({"x": Mult((A,)), "y": Mult((N,))})
    assert g.get("x") == Mult.of([N, A])
    assert g.minus("x").domain() == {"y"}
    assert g.get("q") == EMPTY


@pytest.mark.parametrize("name", list(golden.ALL))
def test_golden_derivations_check(name):
    system, fn = golden.ALL[name]
    d = fn()
    assert isinstance(check_derivation(d, system), Ok)
    assert d.counters == golden.EXPECTED[name]
    assert rule_census_counters(d, system) == d.counters


def test_t0_n_root_context():
    d = golden.t0_n()
    assert d.ctx == Context({"z": Mult((N,))}) and d.type == N and tight(d, "N")


def test_mutated_counter_is_rejected():
    d = golden.t0_n()
    bad = dataclasses.replace(d, e=3)
    res = check_derivation(bad, "N")
    assert isinstance(res, RuleViolation) and res.path == ()
    assert "counters" in res.reason


def test_mutated_premise_is_located():
    d = golden.t0_n()
    inner = d.premises[0]
    bad_inner = dataclasses.replace(inner, m=7)
    bad = dataclasses.replace(d, premises=(bad_inner,) + d.premises[1:])
    res = check_derivation(bad, "N")
    assert not res and res.path == (0,)


def test_wrong_constant_for_system():
    d = build("N", "var_c", parse("x"), ty=N)
    assert not check_derivation(dataclasses.replace(d, type=VR), "N")


def test_negative_counter():
    f = build("V", "var_c", parse("f"), ty=Mult((Arrow(EMPTY, VL),)))
    u = build("V", "var_c", parse("y"), ty=EMPTY)
    d = build("V", "app_c", parse("f y"), [f, u])
    assert d.e == 1
    res = check_derivation(dataclasses.replace(d, e=-1), "V")
    assert isinstance(res, NegativeCounter)


def test_builder_rejects_bad_schema():
    with pytest.raises(RuleError):
        build("N", "app_c", parse("x y"), [build("N", "var_c", parse("x"), ty=N)])


def test_census_examples():
    from collections import Counter
    d = golden.t0_n()
    rules = Counter(n.rule for n in d.nodes())
    assert (rules["app_c"], rules["es_c"], rules["app_p"]) == (2, 0, 1)
    b = golden.t0_bang_b()
    rules = Counter(n.rule for n in b.nodes())
    assert (rules["app_c"], rules["bg_c"], rules["app_p"], rules["abs_p"]) == (2, 2, 1, 0)
    v = golden.t0_v()
    rules = Counter(n.rule for n in v.nodes())
    apps = rules["app_c"] + rules["appt_c"]
    assert (apps, rules["var_c"], rules["abs_c"]) == (3, 1, 4)


@pytest.mark.parametrize("name", list(golden.ALL))
def test_json_roundtrip(name):
    system, fn = golden.ALL[name]
    d = fn()
    back = loads(dumps(d), system)
    assert derivation_alpha_eq(d, back)
    assert isinstance(check_derivation(back, system), Ok)


def test_type_json_shape():
    import json
    d = golden.id_y_v()
    obj = json.loads(dumps(d))
    assert obj["type"] == "vr"
    assert obj["premises"][0]["type"] == {"mult": [{"arrow": {"dom": ["vr"], "cod": "vr"}}]}
    assert obj["counters"] == [1, 1, 0]


def test_parse_type():
    assert parse_type("[vr] -> vr") == Arrow(Mult((VR,)), VR)
    assert parse_type("[[] -> n, a]") == Mult.of([Arrow(EMPTY, N), A])


def test_derivation_alpha_eq_ignores_binder_names():
    a = build("N", "abs_p", parse(r"\x.x"), [build("N", "var_c", parse("x"), ty=N)])
    b = build("N", "abs_p", parse(r"\y.y"), [build("N", "var_c", parse("y"), ty=N)])
    c = build("N", "abs_p", parse(r"\y.x"), [build("N", "var_c", parse("x"), ty=N)])
    assert derivation_alpha_eq(a, b) and not derivation_alpha_eq(a, c)
