"""Structure of broadcasting maps: why no physical one exists, and what the
symmetry checks see.

The anticommutator map rho -> (1/2){rho (x) I, SWAP} reproduces its input on
both receivers exactly (it is a broadcasting map), is covariant under joint
unitaries, symmetric under swapping the receivers, and copies classical basis
states -- yet its Choi operator has a negative eigenvalue, so it is not a
channel and can only be run virtually.  Isotropic twirling, evaluated in
closed form, projects any single-receiver marginal onto the depolarizing
line, which is the reduction behind the trade-off optimizations.
"""

import numpy as np

from vbroadcast.channels import (
    canonical_broadcast_choi,
    check_structural_conditions,
    choi_of_map,
    gamma_operator,
    is_broadcasting_choi,
    isotropic_twirl,
    marginal_choi,
)
from vbroadcast.linalg import min_eigenvalue


def show(name, j):
    rep = check_structural_conditions(j)
    ok, (r1, r2) = is_broadcasting_choi(j)
    print(f"{name}:")
    print(f"  broadcasting          {str(ok):>5}   (marginal residuals {r1:.2e}, {r2:.2e})")
    print(f"  unitary covariant     {str(rep.is_unitary_covariant):>5}   "
          f"(residual {rep.unitary_covariance_residual:.2e})")
    print(f"  permutation invariant {str(rep.is_permutation_invariant):>5}   "
          f"(residual {rep.permutation_invariance_residual:.2e})")
    print(f"  classically consistent{str(rep.is_classically_consistent):>5}   "
          f"(residual {rep.classical_consistency_residual:.2e})")
    print(f"  min eigenvalue of the Choi operator: {min_eigenvalue(j.op):+.4f}")
    print()


d = 2
show("anticommutator broadcaster", canonical_broadcast_choi(d, 0.0))
show("same family, imaginary part 0.7", canonical_broadcast_choi(d, 0.7))
show("keep-and-discard map rho -> rho (x) I/d",
     choi_of_map(lambda m: np.kron(m, np.eye(d) / d), d, (d, d)))

# the closed-form twirl: any marginal projects onto span{|G><G|, I}
j = canonical_broadcast_choi(d, 0.0)
marg = marginal_choi(j, drop=2).op
proj, overlap = isotropic_twirl(marg, d)
print("twirling the first marginal of the broadcaster:")
print(f"  entangled-direction component F = {overlap:.4f} (maximal: {d})")
print(f"  distance of the marginal from its twirl: "
      f"{np.linalg.norm(proj - marg):.2e}  (already isotropic)")
print(f"  twirl output equals the identity-channel Choi operator: "
      f"{np.linalg.norm(proj - gamma_operator(d)):.2e}")
