"""B = 6: test whether λ⁵ is a realizable principal part and fit the λ¹ correction κ·g2.

    python scripts/rank5_fit.py --omegas i 0.3+1.1i 2i
"""
import argparse
import json

from ellcommute.cli import parse_complex
from ellcommute.pipeline import rank5_report


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omegas", nargs="+", default=["i", "0.3+1.1i", "2i"])
    a = ap.parse_args(argv)
    for text in a.omegas:
        rep = rank5_report(parse_complex(text), fit=True)
        print(json.dumps({
            "omega": text,
            "literal_realizable": rep.checks[0].passed,
            "literal_detail": rep.checks[0].detail,
            "kappa": rep.data.get("fitted_kappa"),
            "fit_defect": rep.data.get("fit_defect"),
            "checks": {c.name: c.value for c in rep.checks[1:]},
            "genus": rep.data.get("genus"),
        }))


if __name__ == "__main__":
    main()
