"""Smith normal form, Pimsner-Voiculescu sequences and K-groups of the universal algebras."""

import numpy as np

from twistops.ktheory import Z, k_universal, k_universal_recursive, smith_normal_form

M = np.array([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
D, U, V = smith_normal_form(M)
print("SNF diagonal:", [D[i][i] for i in range(3)])

for m, n in [(0, 2), (1, 1), (2, 1), (0, 4)]:
    k0, k1 = k_universal(m, n)
    print(f"(m, n) = ({m}, {n}): closed form ({k0}, {k1}), recursion agrees: {k_universal_recursive(m, n) == k_universal(m, n)}")
print("type II_n with n = 3 has K =", tuple(map(str, (Z(4), Z(1)))))
