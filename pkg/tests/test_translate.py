from hypothesis import given, settings

from tightcalc import golden
from tightcalc.syntax import BANG, parse
from tightcalc.tight import synthesize_tight
from tightcalc.translate import (
    cbn_term, cbn_type, cbv_term, cbv_type_neg, cbv_type_pos, countvr, has_adjacent_bangs,
    inversevr, relevance, translate_derivation_n, translate_derivation_v,
)
from tightcalc.typesys import (
    A, EMPTY, N, VL, VR, Arrow, Mult, build, check_derivation, derivation_alpha_eq,
)

from conftest import es_terms

P = parse


def PB(s):
    return parse(s, BANG)


def test_cbn_examples():
    assert cbn_term(P("t u")) == PB("t !u")
    assert cbn_term(P("x")) == P("x")
    assert cbn_term(P(golden.T0)) == PB(golden.T0_BANG)


def test_cbv_examples():
    assert cbv_term(P("x y")) == PB("x !y")
    assert cbv_term(P(r"(\x.x) y")) == PB(r"(\x.!x) !y")
    assert cbv_term(P(golden.T0)) == PB(golden.CBV_T0)


def test_cbv_strips_through_list_context():
    assert cbv_term(P("(x[x := y]) z")) == PB("(x[x := !y]) !z")


@settings(max_examples=300)
@given(es_terms(8))
def test_images_keep_free_vars_and_no_double_bang(t):
    assert cbn_term(t).fv == t.fv and cbv_term(t).fv == t.fv
    assert not has_adjacent_bangs(cbv_term(t))


def test_type_translations():
    assert cbn_type(A) == A
    assert cbv_type_pos(VR) == Mult((N,))
    assert cbv_type_neg(VR) == N
    assert cbv_type_neg(Arrow(Mult((VR,)), VR)) == Arrow(Mult((N,)), Mult((N,)))
    m = Mult.of([VR, Arrow(EMPTY, VL)])
    assert cbv_type_neg(m) == cbv_type_pos(m)


def test_countvr_examples():
    assert countvr(golden.id_y_v()) == 1
    assert countvr(golden.t0_v()) == 2


def test_inversevr_example():
    assert inversevr(golden.id_y_b()) == 1


def test_translate_n_t0():
    b = translate_derivation_n(golden.t0_n())
    assert b.counters == (2, 2, 1) and check_derivation(b, "B")
    assert derivation_alpha_eq(b, golden.t0_bang_b())


def test_translate_n_axiom():
    d = build("N", "var_c", P("x"), ty=A)
    b = translate_derivation_n(d)
    assert b.rule == "var_c" and b.type == A and b.counters == (0, 0, 0)


def test_translate_n_empty_es():
    d = build("N", "es_c", P("y[x := z]"), [build("N", "var_c", P("y"), ty=N)])
    b = translate_derivation_n(d)
    assert d.counters == b.counters == (0, 1, 0)
    assert b.premises[1].rule == "bg_c" and b.premises[1].premises == ()


def test_translate_v_examples():
    b = translate_derivation_v(golden.id_y_v())
    assert b.counters == (1, 2, 0) and derivation_alpha_eq(b, golden.id_y_b())
    b = translate_derivation_v(golden.t0_v())
    assert b.counters == (3, 4, 1) and derivation_alpha_eq(b, golden.cbv_t0_b())
    assert relevance(b, "B").cbv_relevant


def test_translate_val_p():
    b = translate_derivation_v(build("V", "val_p", P("x")))
    assert b.rule == "bg_p" and b.type == VL and b.counters == (0, 0, 0)


def test_relevance_examples():
    assert relevance(translate_derivation_n(golden.t0_n()), "B").cbn_relevant
    # type a never lies in the image of the CBV type translations
    d = build("B", "abs_p", PB(r"\x.x"), [build("B", "var_c", P("x"), ty=N)])
    r = relevance(d, "B")
    assert d.type == A and r.cbv_relevant is False and r.witness == ()
    r = relevance(golden.t0_v(), "V")
    assert r.bang_relevant is False and r.witness == ()


def test_cbv_relevance_flags_dr_c_on_non_arrow():
    # the CBV head (\x.x) y is typed vr, so der needs dr_c over [n]
    r = synthesize_tight(P(r"(\x.x) y z"), "V")
    b = translate_derivation_v(r.derivation)
    assert check_derivation(b, "B")
    assert b.counters == (r.derivation.m, r.derivation.e + countvr(r.derivation), r.derivation.s)
    rel = relevance(b, "B")
    assert rel.cbv_relevant is False and rel.witness == (0,)
