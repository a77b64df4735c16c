#!/usr/bin/env python3
"""Regenerates tests/data/cvss_v31_reference.csv.

Transcribes the scoring arithmetic of the official CVSS v3.1 calculator
(https://www.first.org/cvss/calculator/cvsscalc31.js) using plain float
math and JS Math.round semantics, deliberately NOT sharing the integer
fixed-point code path of the C++ implementation, so the frozen table is an
independent oracle.
"""
import csv
import math
import os
import sys

AV = {"N": 0.85, "A": 0.62, "L": 0.55, "P": 0.20}
AC = {"L": 0.77, "H": 0.44}
PR_UNCHANGED = {"N": 0.85, "L": 0.62, "H": 0.27}
PR_CHANGED = {"N": 0.85, "L": 0.68, "H": 0.50}
UI = {"N": 0.85, "R": 0.62}
CIA = {"N": 0.0, "L": 0.22, "H": 0.56}


def js_round(x):
    # Math.round: half away from zero for positive inputs.
    return math.floor(x * 100000 + 0.5)


def roundup(value):
    int_input = js_round(value)
    if int_input % 10000 == 0:
        return int_input / 100000.0
    return (math.floor(int_input / 10000) + 1) / 10.0


def base_score(av, ac, pr, ui, s, c, i, a):
    iss = 1.0 - (1.0 - CIA[c]) * (1.0 - CIA[i]) * (1.0 - CIA[a])
    if s == "U":
        impact = 6.42 * iss
    else:
        impact = 7.52 * (iss - 0.029) - 3.25 * (iss - 0.02) ** 15
    pr_weight = PR_UNCHANGED[pr] if s == "U" else PR_CHANGED[pr]
    exploitability = 8.22 * AV[av] * AC[ac] * pr_weight * UI[ui]
    if impact <= 0:
        return 0.0
    if s == "U":
        return roundup(min(impact + exploitability, 10.0))
    return roundup(min(1.08 * (impact + exploitability), 10.0))


def main():
    out_path = os.path.join(os.path.dirname(__file__), "..", "data", "cvss_v31_reference.csv")
    rows = []
    for av in "NALP":
        for ac in "LH":
            for pr in "NLH":
                for ui in "NR":
                    for s in "UC":
                        for c in "NLH":
                            for i in "NLH":
                                for a in "NLH":
                                    vector = (
                                        f"CVSS:3.1/AV:{av}/AC:{ac}/PR:{pr}/UI:{ui}"
                                        f"/S:{s}/C:{c}/I:{i}/A:{a}"
                                    )
                                    rows.append((vector, f"{base_score(av, ac, pr, ui, s, c, i, a):.1f}"))
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vector", "base_score"])
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {out_path}", file=sys.stderr)


if __name__ == "__main__":
    main()
