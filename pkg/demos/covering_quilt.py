"""Quilted generators and bigon lifts through a double covering correspondence.

Reads the generators three ways (quilt, L1 x F o L2, L1 o F x L2), then lifts
every bigon of CF(L1, F o L2) to a quilted strip and folds it to a strip.

    python3 demos/covering_quilt.py [seed]
"""

import random
import sys

from quiltfloer.correspondence import compose, compose_left
from quiltfloer.floer import build_cf, homology
from quiltfloer.fixtures import covering_correspondence, random_wiggled
from quiltfloer.quilt import fold_quilt_to_strip, identify_generators, lift_all, unfold_strip


def main(seed=99):
    rng = random.Random(seed)
    C = covering_correspondence()
    L1 = random_wiggled(rng, C.left, "L1")
    L2 = random_wiggled(rng, C.right, "L2")
    right, left = compose(C, L2), compose_left(L1, C)

    table = identify_generators(L1, C, L2, right, left)
    print(f"generators: {len(table)} quilted, {len(table.left_view)} in L1 x F o L2, "
          f"{len(table.right_view)} in L1 o F x L2")

    cf = build_cf(L1, right)
    print(f"HF(L1, F o L2) rank = {homology(cf)}")
    for s in lift_all(cf, C, L1, right, L2):
        if s.quilt is None:
            print(f"  bigon of area {s.disc.area}: not liftable ({s.error})")
            continue
        strip = fold_quilt_to_strip(s.quilt)
        print(f"  bigon of area {s.disc.area}: lifted to {len(s.quilt.region)} patch(es), "
              f"fold/unfold round trip {unfold_strip(strip) == s.quilt}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 99)
