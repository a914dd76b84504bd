"""Regenerate the bundled newform files from PARI/GP.

Needs the ``cypari`` wheel (not a runtime dependency):

    pip install cypari
    python tools/generate_newform_data.py src/modmethod/data/newforms

Labels at level 338 follow the classical table ordering used for the
published proofs: 338.1/2/4 are the rational forms with c_3 in {0, -3},
338.3/5/6 the rational forms with c_3 = +-1, and 338.7/8 the cubic pair,
written in the power basis of theta = c_3.
"""

import sys
from pathlib import Path

import cypari

pari = cypari.pari

LEVELS = (2, 9, 45, 49, 98, 169, 338)
QMAX = 50
# pari eigenbasis index -> label, where the default "N.i" ordering is not used
RELABEL = {338: {2: 1, 4: 2, 1: 3, 6: 4, 3: 5, 5: 6, 7: 7, 8: 8}}
# levels where theta is taken to be c_3 rather than PARI's field generator
THETA_IS_C3 = {98, 338}
CURVES = {45: [("45.1", "45a1", (1, -1, 0, 0, -5))]}


def primes_upto(n):
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, int(p**0.5) + 1))]


def form_lines(N, i):
    pari(f"P=mffields(mf)[{i}]; co=mfcoefs(L[{i}],{QMAX})")
    deg = int(pari("poldegree(P)"))
    if deg > 1 and N in THETA_IS_C3:
        pari("r=modreverse(Mod(lift(lift(co[4])),P)); Q=r.mod; sub=lift(r)")
    else:
        pari("Q=P; sub=y")
    poly = [int(pari(f"polcoef(Q,{k},y)")) for k in range(deg + 1)]
    lines = [f"field_poly: {','.join(map(str, poly))}"]
    for p in primes_upto(QMAX):
        if deg == 1:
            vec, den = [int(pari(f"lift(co[{p + 1}])"))], 1
        else:
            pari(f"e=lift(Mod(subst(lift(lift(co[{p + 1}])),y,sub),Q)); d=denominator(content(e)); e=e*d")
            vec = [int(pari(f"polcoef(e,{k},y)")) for k in range(deg)]
            den = int(pari("d"))
        body = ",".join(map(str, vec)) + (f"/{den}" if den != 1 else "")
        lines.append(f"{p}: {body}")
    return lines


def main(out):
    out = Path(out)
    for N in LEVELS:
        pari(f"mf=mfinit([{N},2],0); L=mfeigenbasis(mf)")
        count = int(pari("#L"))
        d = out / str(N)
        d.mkdir(parents=True, exist_ok=True)
        for old in d.glob("*.txt"):
            old.unlink()
        relabel = RELABEL.get(N, {})
        for i in range(1, count + 1):
            label = f"{N}.{relabel.get(i, i)}"
            text = [f"label: {label}", f"level: {N}", "weight: 2"] + form_lines(N, i)
            (d / f"{label}.txt").write_text("\n".join(text) + "\n", encoding="utf-8")
        index = [f"level: {N}", f"count: {count}"]
        for form, name, ainvs in CURVES.get(N, []):
            index.append(f"curve: {form} {name} {','.join(map(str, ainvs))}")
        (d / "index.txt").write_text("\n".join(index) + "\n", encoding="utf-8")
        print(N, count)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/modmethod/data/newforms")
