"""Building a weak tangent: evenly spread attractor points from near-identities.

When near-identity witness pairs exist at every tolerance, composing them along
a nested word ladder produces n attractor points whose magnified copies fill
out [-1, 1] with controlled gaps.  On the rational near-overlap surrogate the
witness supply has a positive floor, so the schedule is reused where the strict
recursion bottoms out; every output property is still certified exactly.
"""

from fractions import Fraction as Q

from cil import build_weak_tangent, load_system
from cil.separation import WitnessScheduleInfeasible

beta = load_system("beta-near-overlap")
previous = None
for n in (2, 4, 6, 8):
    rep = build_weak_tangent(beta, n)
    print(f"n = {n}:")
    print(f"  magnification center x = {float(rep.x):.9f}, scale r = {float(rep.r):.3e}")
    print(f"  normalized points: endpoints {rep.normalized_points[0]}, {rep.normalized_points[-1]}"
          f" with {n - 2} interior points")
    print(f"  max normalized gap = {float(rep.max_gap):.12f} (bound {float(rep.gap_bound()):.1f})")
    if previous is not None:
        print(f"  tighter than n = {previous[0]}: {rep.max_gap < previous[1]}")
    previous = (n, rep.max_gap)
print()

cantor = load_system("cantor-1-3")
try:
    build_weak_tangent(cantor, 4)
except WitnessScheduleInfeasible as e:
    print("On the plain Cantor system the construction refuses to start:")
    print(f"  {e}")
    print("which is the expected contrapositive: its separation holds, so no")
    print("unit-interval tangent evidence can be produced.")
