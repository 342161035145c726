"""Smoke test for the crset_py extension.

Build and run:
    cargo build -p crset-python --release
    cp target/release/libcrset_py.so python/crset_py.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import crset_py as c


def main():
    unit = c.IntervalSet([(0.0, 1.0)])
    half = c.IntervalSet([(0.0, 0.5)])
    assert half.is_subset(unit) and 0.25 in half and 0.5 not in half
    assert math.isclose(unit.difference(half).lebesgue(), 0.5)

    names = [n for n, _ in c.builtin_models()]
    assert "lebesgue01" in names and "mixture" in names

    m = c.Model("lebesgue01")
    assert m.is_poisson()
    assert math.isclose(m.hitting(half), 1 - math.exp(-0.5))

    pts = m.sample(64, 1)
    assert pts == sorted(pts) and all(0 <= x < 1 for x in pts)
    assert m.sample(64, 1) == pts

    assert c.enumerate_points([0.7, 0.2, 0.4], 0.5, 5) == [0.2, 0.4, 0.7, 0.2, 0.2]
    assert c.leadbetter_count([0.1, 0.2, 0.9], unit, 0) == 1
    assert c.leadbetter_count([0.1, 0.2, 0.9], unit, 3) == 3

    r = c.renyi_verify(m, c.dyadic_ring_sets(6), 20000, 1, depth=1)
    assert r["all_pass"], r

    est = c.estimate_hitting(m, [half], 5000, 2)
    assert est[0]["ci_low"] <= 1 - math.exp(-0.5) <= est[0]["ci_high"]

    s = c.sigma_check(3, 0, 0, exhaustive=True)
    assert s["failures"] == 0

    split = c.Model("lebesgue01-split")
    u = c.uniqueness_check(m, split, c.dyadic_ring_sets(6), c.grid(0, 1, 4), 5000, 3)
    assert "pass" in u

    d = c.decompose(c.Model("mixture"), c.grid(0, 3, 6))
    assert d["f"] == [[0.0, 2.0]], d["f"]

    sw = c.sandwich_independent([0.1, 0.5, 0.3])
    assert sw["failures"] == 0 and len(sw["rows"]) == 8
    assert math.isclose(c.exact_hitting_independent([0.5, 0.5], [0, 1]), 0.75)
    assert math.isinf(c.recover_mass(1.0))

    try:
        c.Model("{not json")
    except ValueError as e:
        assert "model" in str(e)
    else:
        raise AssertionError("malformed model accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
