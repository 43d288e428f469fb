"""Worked example: a torus correspondence with two folds and a twist.

Builds L1 o F and F o L2, computes the direct Floer complex, then deforms
CF(L1 o F, L2) by the bounding cochain b with mu0 = b and prints what holds.

    python3 demos/worked_example.py
"""

from quiltfloer.floer import (BoundingCochain, build_cf, homology, maurer_cartan, mu2,
                              twisted_differential)
from quiltfloer.fixtures import worked_example


def main():
    ex = worked_example()
    print(f"L1 o F: {len(ex.composed_left.components)} component(s), {len(ex.plan.moves)} finger move(s)")

    direct = build_cf(ex.left_curve, ex.composed_right)
    print(f"HF(L1, F o L2) rank = {homology(direct)} from {direct.size} generators")

    cf = build_cf(ex.composed_left, ex.right_curve, prefix="x")
    cfbb = build_cf(ex.composed_left, ex.composed_left, prefix="y")
    b = 1 << ex.cochain_generator
    print(f"b = {cfbb.format_chain(b)}, mu1(b) = {cfbb.format_chain(cfbb.mu1(b))}")
    # mu1 squares to zero, so mu1(b) = b would force b = 0
    print(f"maurer-cartan with mu0 = b: {maurer_cartan(BoundingCochain(b, b), cfbb)}")

    m = mu2(ex.composed_left, ex.composed_left, ex.right_curve, cfbb, cf, cf)
    twisted = twisted_differential(cf, left=(b, m))
    print(f"mu1^b = 0: {not any(twisted.columns)}")
    print(f"HF^b rank = {homology(twisted)}")


if __name__ == "__main__":
    main()
