"""Monodromy and branch permutations of the Lamé pair over the fixture loops, plus the B = 3/4 check.

    python scripts/loop_suite.py --omega 0.3+1.1i --X 2 5+1i 10 --out loops.json
"""
import argparse
import json
import time

from ellcommute.cli import parse_complex
from ellcommute.lame import lame_operator, lame_q_genus_one
from ellcommute.monodromy import lame_loops, run_loop_suite
from ellcommute.pipeline import lame_quarter_monodromy


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omega", default="i")
    ap.add_argument("--basepoint", default="0.5")
    ap.add_argument("--X", nargs="+", default=["2", "5+1i", "10"])
    ap.add_argument("--radius", type=float, default=0.25)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out")
    a = ap.parse_args(argv)
    om, w = parse_complex(a.omega), parse_complex(a.basepoint)
    t0 = time.time()
    p = lame_operator(2.0, om, w, 20)
    q = lame_q_genus_one(om, w, 20)
    recs = run_loop_suite(p, q, [parse_complex(x) for x in a.X], lame_loops(om, w, a.radius), workers=a.workers)
    quarter = lame_quarter_monodromy(om, w)
    out = {
        "omega": [om.real, om.imag],
        "loops": recs,
        "max_distance_to_identity": max(r["monodromy"]["distance_to_identity"] for r in recs),
        "all_permutations_identity": all(r["permutation"]["identity"] for r in recs),
        "quarter": quarter.to_json(),
        "seconds": time.time() - t0,
    }
    text = json.dumps(out, indent=2)
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text + "\n")
    print(json.dumps({k: out[k] for k in ("max_distance_to_identity", "all_permutations_identity", "seconds")}))


if __name__ == "__main__":
    main()
