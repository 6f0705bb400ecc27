import pytest
from hypothesis import given, settings

from tightcalc import golden
from tightcalc.harness import EnumSpec, enumerate_terms
from tightcalc.rewriting import (
    ClashNormal, FuelExhausted, NeScf, NeutralN, Normal, Reducible, StepKind, VarV, classify,
    enumerate_paths, is_clash, normalize, reducts, root_rule, size, step,
)
from tightcalc.syntax import BANG, parse

from conftest import bang_terms, es_terms

P = parse


def PB(s):
    return parse(s, BANG)


def test_db_at_a_distance():
    t = P(r"((\x.x)[y := s]) u")
    assert root_rule(t, StepKind.dB) == P("x[x := u][y := s]")


def test_sv_through_list_context():
    t = P(r"x[x := (\z.z)[w := u]]")
    assert root_rule(t, StepKind.sv) == P(r"(\z.z)[w := u]")
    t = P(r"(x x)[x := (\z.z)[w := u]]")
    assert root_rule(t, StepKind.sv) == P(r"((\z.z) (\z.z))[w := u]")


def test_sv_needs_a_value():
    assert root_rule(P("x[x := y z]"), StepKind.sv) is None


def test_sv_freshens_list_context():
    # w is free in the body, so the ES binder w of L must be renamed
    t = P(r"(x w)[x := y[w := z]]")
    r = root_rule(t, StepKind.sv)
    assert r == P("(y w)[w' := z]")


def test_dbang():
    assert root_rule(PB("der(!t)"), StepKind.dBang) == P("t")
    assert root_rule(PB("der((!t)[x := y])"), StepKind.dBang) == P("t[x := y]")


def test_sbang():
    assert root_rule(PB("(x x)[x := !y]"), StepKind.sBang) == P("y y")


def test_no_root_redex():
    assert root_rule(P("x y"), StepKind.dB) is None
    assert root_rule(P("x"), StepKind.sn) is None


def test_dn_single_e_step():
    t2, kind, pos = step(P("x[x := y]"), "dn")
    assert t2 == P("y") and kind is StepKind.sn and pos == ()


def test_dv_single_m_step():
    t2, kind, pos = step(P(r"(\x.x) (z (\w.w))"), "dv")
    assert t2 == P(r"x[x := z (\w.w)]") and kind is StepKind.dB


def test_fdet_dbang():
    t2, kind, _ = step(PB(r"der(!(\x.x))"), "fdet")
    assert t2 == P(r"\x.x") and kind is StepKind.dBang


def test_reducts_n_no_args():
    rs = reducts(P(r"(\x.x) ((\y.y) z)"), "n")
    assert len(rs) == 1 and rs[0][1] is StepKind.dB and rs[0][2] == ()


def test_reducts_f_surface_only():
    assert reducts(PB(r"!((\x.!x) !y)"), "f") == []


def test_reducts_v_two_sv():
    rs = reducts(P(r"x[x := y[y := \w.w]]"), "v")
    positions = {(pos, kind) for _, kind, pos in rs}
    assert ((), StepKind.sv) in positions
    assert (("sarg",), StepKind.sv) in positions


def test_normalize_t0():
    t0 = P(golden.T0)
    r = normalize(t0, "dn", 10)
    assert isinstance(r, Normal)
    assert r.nf == P(r"z (\w.w)") and (r.trace.m, r.trace.e) == (2, 2)
    r = normalize(t0, "dv", 10)
    assert r.nf == P(r"x[x := z (\w.w)]") and (r.trace.m, r.trace.e) == (3, 2)
    r = normalize(PB(golden.T0_BANG), "fdet", 10)
    assert r.nf == PB(r"z !(\w.w)") and (r.trace.m, r.trace.e) == (2, 2)


def test_normalize_fuel():
    r = normalize(P(r"(\x.x x) (\x.x x)"), "dn", 25)
    assert isinstance(r, FuelExhausted) and len(r.trace.steps) == 25


def test_trace_log_format():
    r = normalize(P("x[x := y]"), "dn")
    assert r.trace.log() == "root e:sn x[x := y] ~> y\nm=0 e=1"


def test_sizes():
    assert size(P(r"z (\w.w)"), "n") == 1
    assert size(P(r"x[x := z (\w.w)]"), "v") == 1
    assert size(PB(r"!((\x.x x) (\x.x x))"), "f") == 0
    assert size(PB(r"der(x y)"), "f") == 1


def test_classify_examples():
    assert classify(P(r"z (\w.w)"), "n") is NeutralN
    assert classify(P(r"x[x := z (\w.w)]"), "v") is VarV
    assert classify(PB("(!x) y"), "scf") is ClashNormal
    assert classify(PB(r"z !(\w.w)"), "scf") is NeScf
    assert classify(P(r"(\x.x) y"), "n") is Reducible


def test_is_clash():
    assert is_clash(PB(r"der(\x.x)"))
    assert not is_clash(PB("der(!x)"))
    assert is_clash(PB(r"x (\y.y)"))
    assert is_clash(PB(r"x[y := \z.z]"))
    assert is_clash(PB("(!x)[y := z] w"))


SMALL_ES = list(enumerate_terms(EnumSpec(5)))
SMALL_BANG = list(enumerate_terms(EnumSpec(5, ("x", "y"), BANG)))


@pytest.mark.parametrize("strategy, relation, flavor", [("dn", "n", "n"), ("dv", "v", "v")])
def test_strategy_agrees_with_relation(strategy, relation, flavor):
    for t in SMALL_ES:
        s = step(t, strategy)
        rs = reducts(t, relation)
        assert (s is None) == (rs == []) == (classify(t, flavor) is not Reducible), t
        if s is not None:
            assert any(s[0] == r[0] and s[2] == r[2] and s[1] is r[1] for r in rs), t


def test_fdet_agrees_with_f():
    for t in SMALL_BANG:
        s = step(t, "fdet")
        rs = reducts(t, "f")
        assert (s is None) == (rs == []), t
        if s is not None:
            assert any(s[0] == r[0] and s[2] == r[2] for r in rs), t
        assert (s is None) == (classify(t, "scf") is not Reducible), t


@settings(max_examples=200)
@given(es_terms(6))
def test_classify_alpha_invariant(t):
    from tightcalc.syntax import pretty
    u = parse(pretty(t).replace("x", "q"))
    for flavor in "nv":
        assert classify(t, flavor) == classify(u, flavor)


@settings(max_examples=200, deadline=None)
@given(bang_terms(5))
def test_paths_agree_with_fdet(t):
    r = normalize(t, "fdet", 30)
    if isinstance(r, FuelExhausted):
        return
    paths = enumerate_paths(t, "f")
    assert paths.normal_forms == [r.nf]
    assert paths.lengths == {(r.trace.m, r.trace.e)}


def test_path_cap():
    from tightcalc.rewriting import CapExceeded
    t = PB(r"(x[a := der(!b)]) (y[c := der(!d)]) (z[e := der(!f)])")
    assert isinstance(enumerate_paths(t, "f", cap=2), CapExceeded)
    assert enumerate_paths(t, "f").paths == 6
