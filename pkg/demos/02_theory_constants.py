"""How the sparse-eigenvalue constant c governs the convergence rate.

For each c the script lists the revisiting constants mu_a and mu_e, the best
decay exponent zeta* and the implied rate zeta*/(1 + zeta*).  Two forms of
mu_a are shown: the one from the revisiting lemma, and a variant with
(1 - c) in place of (1 - c)^2.  They agree at c = 0 and drift apart as c
grows.

    python demos/02_theory_constants.py
"""

from hdboost.theory import TABULATED, mu_e, zeta_star

print("   c   mu_e   | lemma: mu_a   zeta*   rate  | tabulated: mu_a   zeta*   rate")
for c in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8):
    a, b = zeta_star(c), zeta_star(c, TABULATED)
    print(f"{c:4.1f}  {mu_e(c):.3f}  |      {a.mu_a:.3f}  {a.zeta_star:6.3f}  {a.rate:.3f}"
          f"  |          {b.mu_a:.3f}  {b.zeta_star:6.3f}  {b.rate:.3f}")

# At c = 0 (orthonormal design) the rate exponent is about 0.54, slightly
# above the 1/2 that holds for the pure greedy algorithm in general.
