#!/usr/bin/env python3
"""Regenerates the bundled field tables under data/fields/.

Degree 2: every real quadratic field with fundamental discriminant up to
1035 (the tabulation bound 4/(2pi)^4 d^{3/2} < (64/3)(g+1) at g = 3 gives
d <= 1034). Presentations keep the index trivial: x^2 - x - (d-1)/4 for
d = 1 (mod 4), else x^2 - m for d = 4m.

Degree 3: totally real cubic fields found by a small coefficient search,
restricted to squarefree polynomial discriminant (then Z[theta] is the
maximal order), plus the two smallest cyclic fields (disc 49, 81) whose
automorphisms are attached by hand. The cubic table is best-effort, not
claimed complete.
"""

import json
import math
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "fields")


def squarefree(n):
    i = 2
    while i * i <= n:
        if n % (i * i) == 0:
            return False
        i += 1
    return True


def deg2_entry(d):
    if d % 4 == 1:
        m = (d - 1) // 4
        poly = [-m, -1, 1]  # x^2 - x - m
        sigma = ["1", "-1"]  # theta -> 1 - theta
    else:
        assert d % 4 == 0
        m = d // 4
        poly = [-m, 0, 1]  # x^2 - m
        sigma = ["0", "-1"]
    return {
        "label": f"RQ{d}",
        "poly": poly,
        "integral_basis": [["1", "0"], ["0", "1"]],
        "disc": d,
        "automorphisms": [["0", "1"], sigma],
    }


def gen_deg2(bound=1035):
    fields = []
    for d in range(5, bound + 1):
        if d % 4 == 1 and squarefree(d):
            fields.append(deg2_entry(d))
        elif d % 4 == 0:
            m = d // 4
            if m % 4 in (2, 3) and squarefree(m):
                fields.append(deg2_entry(d))
    return fields


def cubic_disc(a, b, c):
    # disc of x^3 + a x^2 + b x + c
    return (
        18 * a * b * c - 4 * a**3 * c + a**2 * b**2 - 4 * b**3 - 27 * c**2
    )


def cubic_irreducible(a, b, c):
    # rational roots are divisors of c
    if c == 0:
        return False
    for r in range(-abs(c), abs(c) + 1):
        if r != 0 and c % r == 0 and r**3 + a * r**2 + b * r + c == 0:
            return False
    return True


def gen_deg3(disc_bound=12050):
    found = {}
    for a in range(-1, 2):
        for b in range(-40, 1):
            for c in range(-40, 41):
                d = cubic_disc(a, b, c)
                if d <= 0 or d > disc_bound:
                    continue
                if not squarefree(d):
                    continue
                if not cubic_irreducible(a, b, c):
                    continue
                key = d
                poly = [c, b, a, 1]
                if key not in found or poly < found[key]:
                    found[key] = poly
    fields = []
    for d in sorted(found):
        c0, c1, c2, _ = found[d]
        fields.append(
            {
                "label": f"RC{d}",
                "poly": [c0, c1, c2, 1],
                "integral_basis": [
                    ["1", "0", "0"],
                    ["0", "1", "0"],
                    ["0", "0", "1"],
                ],
                "disc": d,
                "automorphisms": [["0", "1", "0"]],
            }
        )
    # cyclic fields with non-squarefree discriminant, added by hand
    fields.append(
        {
            "label": "RC49",
            "poly": [1, -2, -1, 1],
            "integral_basis": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
            "disc": 49,
            "automorphisms": [
                ["0", "1", "0"],
                ["2", "0", "-1"],
                ["-1", "-1", "1"],
            ],
        }
    )
    fields.append(
        {
            "label": "RC81",
            "poly": [-1, -3, 0, 1],
            "integral_basis": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
            "disc": 81,
            "automorphisms": [
                ["0", "1", "0"],
                ["2", "0", "-1"],
                ["-2", "-1", "1"],
            ],
        }
    )
    fields.sort(key=lambda f: f["disc"])
    return fields


def paper_fields():
    return [
        {
            "label": "Q",
            "poly": [0, 1],
            "integral_basis": [["1"]],
            "disc": 1,
            "automorphisms": [["0"]],
        },
        {
            "label": "Q(sqrt5)",
            "poly": [-1, -1, 1],
            "integral_basis": [["1", "0"], ["0", "1"]],
            "disc": 5,
            "automorphisms": [["0", "1"], ["1", "-1"]],
        },
        {
            # x^2 - 97 with basis (1, (1+theta)/2); 2 divides the index
            "label": "Q(sqrt97)",
            "poly": [-97, 0, 1],
            "integral_basis": [["1", "0"], ["1/2", "1/2"]],
            "disc": 97,
            "automorphisms": [["-1", "2"], ["1", "-2"]],
            "index_primes": [
                {
                    "p": 2,
                    "factors": [
                        {"gen": ["0", "1"], "e": 1, "f": 1},
                        {"gen": ["-1", "1"], "e": 1, "f": 1},
                    ],
                }
            ],
        },
        {
            "label": "Q(sqrt10)",
            "poly": [-10, 0, 1],
            "integral_basis": [["1", "0"], ["0", "1"]],
            "disc": 40,
            "automorphisms": [["0", "1"], ["0", "-1"]],
        },
    ]


def main():
    os.makedirs(OUT, exist_ok=True)
    with open(os.path.join(OUT, "fields_paper.json"), "w") as f:
        json.dump(paper_fields(), f, indent=1)
    deg2 = gen_deg2()
    with open(os.path.join(OUT, "fields_deg2.json"), "w") as f:
        json.dump(deg2, f, indent=1)
    deg3 = gen_deg3()
    with open(os.path.join(OUT, "fields_deg3.json"), "w") as f:
        json.dump(deg3, f, indent=1)
    print(f"deg2: {len(deg2)} fields, deg3: {len(deg3)} fields (best effort)")
    # sanity: the degree-2 bound really is 1034
    g = 3
    lhs = 4 / (2 * math.pi) ** 4
    dmax = ((64 / 3) * (g + 1) / lhs) ** (2 / 3)
    print(f"degree-2 discriminant bound at g=3: {dmax:.1f}")


if __name__ == "__main__":
    main()
