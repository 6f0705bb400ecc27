import pytest
from hypothesis import given, settings

from tightcalc.syntax import (
    BANG, Abs, App, Bang, CalculusMismatch, Der, ESub, ParseError, Var, alpha_eq, free_vars,
    parse, pretty, subst_meta,
)

from conftest import bang_terms, es_terms


def test_parse_identity():
    assert parse(r"\x.x") == Abs("x", Var("x"))


def test_parse_es():
    t = parse("x[x := y]")
    assert isinstance(t, ESub) and t.var == "x" and t.body.name == "x" and t.arg.name == "y"


def test_parse_bang_der():
    t = parse(r"der((\x.!x) !y)", BANG)
    assert t == Der(App(Abs("x", Bang(Var("x"))), Bang(Var("y"))))


def test_parse_rejects_bang_in_lambda_es():
    with pytest.raises(CalculusMismatch):
        parse("!x")
    # the der(...) form belongs to the bang calculus; the bare name does not
    with pytest.raises(CalculusMismatch):
        parse("der(x)")
    assert parse("der (x)") == App(Var("der"), Var("x"))
    assert parse("der") == Var("der")


def test_parse_error_offset():
    with pytest.raises(ParseError) as exc:
        parse(r"(\x.")
    assert exc.value.offset == 4


def test_application_is_left_associative():
    assert parse("x y z") == App(App(Var("x"), Var("y")), Var("z"))


@pytest.mark.parametrize("src, fv", [(r"\x.x", set()), ("x[x := y]", {"y"}), ("z z", {"z"})])
def test_free_vars(src, fv):
    assert free_vars(parse(src)) == fv


@pytest.mark.parametrize("a, b, eq", [
    (r"\x.x", r"\y.y", True),
    (r"\x.\y.x", r"\y.\x.y", True),
    (r"\x.\y.x", r"\x.\y.y", False),
    ("x[x := y]", "z[z := y]", True),
    ("x[x := y]", "x[x := z]", False),
])
def test_alpha_eq(a, b, eq):
    assert alpha_eq(parse(a), parse(b)) is eq


def test_subst_var():
    assert subst_meta(Var("x"), "x", parse(r"\y.y")) == parse(r"\y.y")


def test_subst_avoids_capture():
    r = subst_meta(parse(r"\y.x"), "x", Var("y"))
    assert isinstance(r, Abs) and r.var != "y" and r.body == Var("y")
    assert r == parse(r"\w.y")


def test_subst_through_es():
    assert subst_meta(parse("x[y := x]"), "x", Var("z")) == parse("z[y := z]")


@settings(max_examples=300)
@given(es_terms())
def test_print_parse_roundtrip_es(t):
    u = parse(pretty(t))
    assert u == t and pretty(u) == pretty(t)


@settings(max_examples=300)
@given(bang_terms())
def test_print_parse_roundtrip_bang(t):
    assert parse(pretty(t), BANG) == t


@settings(max_examples=300)
@given(es_terms(6), es_terms(4))
def test_subst_free_vars(t, u):
    r = subst_meta(t, "x", u)
    bound = (t.fv - {"x"}) | u.fv
    if "x" in t.fv:
        assert r.fv == bound
    else:
        assert r.fv <= bound and r == t


def _rebind(t, n=[0]):
    """An alpha variant of t with every binder renamed to a fresh name."""
    from tightcalc.syntax import rename
    if isinstance(t, Var):
        return t
    if isinstance(t, App):
        return App(_rebind(t.fun), _rebind(t.arg))
    n[0] += 1
    b = f"b{n[0]}"
    if isinstance(t, Abs):
        return Abs(b, _rebind(rename(t.body, t.var, b)))
    return ESub(_rebind(rename(t.body, t.var, b)), b, _rebind(t.arg))


@settings(max_examples=200)
@given(es_terms(6), es_terms(4))
def test_subst_respects_alpha(t, u):
    t2, u2 = _rebind(t), _rebind(u)
    assert t2 == t and u2 == u
    assert subst_meta(t, "x", u) == subst_meta(t2, "x", u2)
