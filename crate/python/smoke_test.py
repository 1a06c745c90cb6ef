"""Smoke test for the blab Python extension.

Build and install first:  pip install --no-build-isolation -e crates/py
Then run:                 python python/smoke_test.py
"""

import json
from fractions import Fraction

import blab


def main():
    a = blab.CoeffMatrix.isbell(4)
    assert a.classify() == "DS", a
    assert a.coefficient(5, 6) == Fraction(1, 3)
    assert a.corner(3).dense(3) == [
        [1, 0, 0],
        [0, Fraction(1, 2), Fraction(1, 2)],
        [0, Fraction(1, 2), Fraction(1, 2)],
    ]

    swap = blab.CoeffMatrix.permutation([(1, 2), (2, 1)], identity_from=3)
    assert swap.classify() == "Permutation"
    assert swap @ swap.adjoint() == blab.CoeffMatrix.identity()
    assert swap.apply([(1, 3), (5, "1/2")]) == [(2, 3), (5, Fraction(1, 2))]

    over = blab.CoeffMatrix.from_rows([["3/5", "1/2"], [0, 0]])
    assert over.classify() == "Other" and over.violations()

    again = blab.CoeffMatrix.from_json(a.to_json())
    assert again == a

    half = [[Fraction(1, 2)] * 2] * 2
    terms = blab.bvn_decompose(half)
    assert len(terms) == 2 and all(w == Fraction(1, 2) for w, _ in terms)
    assert blab.reconstruct(terms, 2) == half

    terms = blab.mirsky_decompose([["1/2"]])
    assert sorted(p for _, p in terms) == [[], [(1, 1)]]
    assert not blab.is_extreme([["1/2"]])
    assert blab.is_extreme([[0, 1], [0, 0]])
    assert blab.op_norm(half) <= 1 + 1e-9

    assert blab.isbell_bound(10, 2) == Fraction(3, 5)
    gap = blab.isbell_gap(12, [(1, [(1, 2), (2, 1)])], 10)
    assert gap["gap"] >= 0.9 - 1e-12, gap

    assert blab.exposed_verify([(1, 2)], 3)
    assert [blab.commutant_dimension(m) for m in range(1, 7)] == [1, 2, 2, 2, 2, 2]
    assert [blab.span_dimension(n, "tail_lift") for n in range(1, 5)] == [1, 2, 5, 10]
    assert [blab.span_dimension(n, "corner") for n in range(1, 5)] == [1, 4, 9, 16]

    passed, report = blab.run_suite("span", max_n=4)
    assert passed and json.loads(report)["suite"] == "span"
    passed, first = blab.run_suite("contraction", seed=3, trials=50)
    assert passed and first == blab.run_suite("contraction", seed=3, trials=50)[1]

    try:
        blab.bvn_decompose([["1/2", 0], [0, 1]])
    except ValueError:
        pass
    else:
        raise AssertionError("a strictly substochastic block has no Birkhoff decomposition")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
