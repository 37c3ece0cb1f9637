"""The inverse problem: best accuracy under a fixed sample budget.

Fix the sampling overhead budget gamma = (x + y)^2 and ask for the smallest
balanced marginal error mu(gamma, d).  Budget 1 means "physical channels
only"; budget 2 is the break-even cost of naive sample-splitting; budget
((3d-1)/(d+1))^2 affords exact broadcasting.

The script tabulates mu(gamma, d) for a few budgets and dimensions, checks
each value against the closed-form bound ((d^2-1)/d^2)(3-sqrt(gamma))/4
certified by an explicit two-channel construction, and prints the qubit
anchors: error 0.25 with channels only, about 0.12 at budget 1.8.
"""

from vbroadcast.broadcasting import (
    discard_prepare_point,
    min_error,
    min_error_upper_bound,
)

print(f"{'gamma':>6} {'d':>3} {'mu(gamma,d)':>12} {'upper bound':>12} "
      f"{'noise t':>9}")
for gamma in (1.0, 1.5, 1.8, 2.0):
    for d in (2, 3):
        pt = min_error(gamma, d)
        bound = min_error_upper_bound(gamma, d)
        print(f"{gamma:>6.2f} {d:>3} {pt.mu:>12.6f} {bound:>12.6f} "
              f"{pt.t:>9.6f}")

print()
print("Qubit anchors: mu(1, 2) = 0.25 (best any channel can do) versus")
print(f"mu(1.8, 2) = {min_error(1.8, 2).mu:.4f} for a virtual protocol that "
      "still beats sample-splitting.")

dec, delta, report = discard_prepare_point(2.0, 2)
print()
print("Explicit construction at gamma = 2 (teleport-or-discard channels):")
print(f"  weights x = {dec.x:.6f}, y = {dec.y:.6f}  (x + y)^2 = {dec.nu ** 2:.6f}")
print(f"  marginal error delta = {delta:.6f}, depolarizing t = {report['t']:.6f}")
print(f"  worst construction residual = "
      f"{max(v for k, v in report.items() if k.endswith('residual')):.2e}")
