"""Print the hand-built example derivations next to synthesized and translated ones."""

from tightcalc import golden
from tightcalc.syntax import parse, pretty
from tightcalc.tight import synthesize_tight
from tightcalc.translate import countvr, inversevr, translate_derivation_v
from tightcalc.typesys import check_derivation


def triple(d):
    return (d.m, d.e, d.s)


def main():
    print("hand-built derivations")
    for name, (system, build) in golden.ALL.items():
        d = build()
        ok = "ok" if check_derivation(d, system) else "REJECTED"
        print(f"  {name:<12} {system}  {triple(d)}  expected {golden.EXPECTED[name]}  {ok}")

    print("synthesized tight derivations")
    for system, text in [("N", golden.T0), ("V", golden.T0), ("B", golden.T0_BANG),
                         ("V", golden.ID_Y), ("B", golden.ID_Y_BANG)]:
        t = parse(text, "bang" if system == "B" else "lambda-es")
        r = synthesize_tight(t, system)
        print(f"  {system}  {pretty(t):<40} {triple(r.derivation)}  nf {pretty(r.nf)}")

    print("V to B translation of the hand-built V derivations")
    for build in (golden.t0_v, golden.id_y_v):
        d = build()
        b = translate_derivation_v(d)
        print(f"  {pretty(d.term):<40} {triple(d)} -> {triple(b)}  "
              f"countvr {countvr(d)}  inversevr {inversevr(b)}")


if __name__ == "__main__":
    main()
