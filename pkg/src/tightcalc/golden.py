"""Worked derivations transcribed from the printed examples.

Each function rebuilds one printed derivation node by node with
:func:`typesys.build`, so the counters come out of the rule schemas rather
than being typed in.  The expected root counters live in ``EXPECTED``.
"""

from __future__ import annotations

from .syntax import parse
from .typesys import EMPTY, N, VR, Derivation, Mult, build

I_TEXT = r"\w.w"
T0 = r"(\x.\y.x) (z (\w.w)) ((\w.w) (\w.w))"
T0_BANG = r"(\x.\y.x) !(z !(\w.w)) !((\w.w) !(\w.w))"
CBV_T0 = r"der((\x.!(\y.!x)) (z !(\w.!w))) ((\w.!w) !(\w.!w))"
ID_Y = r"(\x.x) y"
ID_Y_BANG = r"(\x.!x) !y"

EXPECTED = {
    "t0-N": (2, 2, 1),
    "t0-V": (3, 2, 1),
    "t0'-B": (2, 2, 1),
    "cbv(t0)-B": (3, 4, 1),
    "id-y-V": (1, 1, 0),
    "cbv(id-y)-B": (1, 2, 0),
}


def _p(text, calculus="lambda-es"):
    return parse(text, calculus)


def t0_n() -> Derivation:
    t = _p(T0)
    k_app = t.fun
    k, zi = k_app.fun, k_app.arg
    b = lambda *a, **kw: build("N", *a, **kw)
    x = b("var_c", k.body.body, ty=N)
    ky = b("abs_c", k.body, [x])
    kd = b("abs_c", k, [ky])
    z = b("var_c", zi.fun, ty=N)
    zid = b("app_p", zi, [z])
    inner = b("app_c", k_app, [kd, zid])
    return b("app_c", t, [inner])


def t0_v() -> Derivation:
    t = _p(T0)
    k_app, ii = t.fun, t.arg
    k, zi = k_app.fun, k_app.arg
    b = lambda *a, **kw: build("V", *a, **kw)
    x = b("var_p", k.body.body)
    ky = b("abs_c", k.body, [x])
    kd = b("abs_c", k, [ky])
    zid = b("app_p", zi, [b("var_p", zi.fun), b("abs_p", zi.arg)])
    inner = b("appt_c", k_app, [kd, zid])
    w = b("var_c", ii.fun.body, ty=EMPTY)
    left = b("abs_c", ii.fun, [w])
    right = b("abs_c", ii.arg, [])
    iid = b("app_c", ii, [left, right])
    return b("app_c", t, [inner, iid])


def t0_bang_b() -> Derivation:
    t = _p(T0_BANG, "bang")
    k_app, bii = t.fun, t.arg
    k, bzi = k_app.fun, k_app.arg
    zi = bzi.body
    b = lambda *a, **kw: build("B", *a, **kw)
    x = b("var_c", k.body.body, ty=N)
    kd = b("abs_c", k, [b("abs_c", k.body, [x])])
    zid = b("app_p", zi, [b("var_c", zi.fun, ty=N), b("bg_p", zi.arg)])
    inner = b("app_c", k_app, [kd, b("bg_c", bzi, [zid])])
    return b("app_c", t, [inner, b("bg_c", bii, [])])


def cbv_t0_b() -> Derivation:
    t = _p(CBV_T0, "bang")
    dr, ii = t.fun, t.arg
    app = dr.body
    k, zi = app.fun, app.arg
    b = lambda *a, **kw: build("B", *a, **kw)
    bang_x = k.body.body.body
    x = b("bg_c", bang_x, [b("var_c", bang_x.body, ty=N)])
    ky = b("abs_c", k.body.body, [x])
    kd = b("abs_c", k, [b("bg_c", k.body, [ky])])
    zid = b("app_p", zi, [b("var_c", zi.fun, ty=N), b("bg_p", zi.arg)])
    inner = b("appt_c", app, [kd, zid])
    left = b("abs_c", ii.fun, [b("bg_c", ii.fun.body, [])])
    iid = b("app_c", ii, [left, b("bg_c", ii.arg, [])])
    return b("app_c", t, [b("dr_c", dr, [inner]), iid])


def id_y_v() -> Derivation:
    t = _p(ID_Y)
    b = lambda *a, **kw: build("V", *a, **kw)
    f = b("abs_c", t.fun, [b("var_p", t.fun.body)])
    return b("app_c", t, [f, b("var_c", t.arg, ty=Mult((VR,)))])


def id_y_b() -> Derivation:
    t = _p(ID_Y_BANG, "bang")
    b = lambda *a, **kw: build("B", *a, **kw)
    bx = t.fun.body
    f = b("abs_c", t.fun, [b("bg_c", bx, [b("var_c", bx.body, ty=N)])])
    arg = b("bg_c", t.arg, [b("var_c", t.arg.body, ty=N)])
    return b("app_c", t, [f, arg])


ALL = {
    "t0-N": ("N", t0_n),
    "t0-V": ("V", t0_v),
    "t0'-B": ("B", t0_bang_b),
    "cbv(t0)-B": ("B", cbv_t0_b),
    "id-y-V": ("V", id_y_v),
    "cbv(id-y)-B": ("B", id_y_b),
}
