from hypothesis import strategies as st

from tightcalc.syntax import Abs, App, Bang, Der, ESub, Var

NAMES = st.sampled_from(["x", "y", "z", "w"])


def es_terms(max_leaves: int = 8):
    leaf = NAMES.map(Var)
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.builds(Abs, NAMES, sub),
            st.builds(App, sub, sub),
            st.builds(ESub, sub, NAMES, sub),
        ),
        max_leaves=max_leaves,
    )


def bang_terms(max_leaves: int = 8):
    leaf = NAMES.map(Var)
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.builds(Abs, NAMES, sub),
            st.builds(App, sub, sub),
            st.builds(ESub, sub, NAMES, sub),
            st.builds(Bang, sub),
            st.builds(Der, sub),
        ),
        max_leaves=max_leaves,
    )
