"""Step curves on a small design: where boosting over-fits and where it stops.

Twenty observations, ten standardized predictors, y = 5 x1 + 2 x2 + x3 plus
N(0, 4) noise.  Averaged over 60 draws, the out-of-sample error drops fast,
bottoms out after a few steps and then climbs toward the OLS fit.  The
variance-ratio rule only sees training residuals; the table at the end shows
where it stops for a few values of the constant c_u.

    python demos/01_illustrative_curve.py
"""

import numpy as np

from hdboost.simulation import DgpSpec, step_curve

dgp = DgpSpec(n=20, p=10, s=3, beta_design="illustrative")
curve = step_curve(dgp, "BA", repetitions=60, max_steps=200)

print("step  in-sample  out-of-sample")
for m in (0, 1, 2, 3, 4, 5, 6, 8, 10, 15, 20, 50, 100, 200):
    print(f"{m:4d}  {curve.mse_in[m]:9.3f}  {curve.mse_out[m]:13.3f}")
print(f"\nminimum {curve.mse_out.min():.3f} at step {curve.argmin}; "
      f"U-shaped: {curve.is_u_shaped()}")
print(f"OLS reference {curve.ols_ref:.3f}, plug-in LASSO reference {curve.lasso_ref:.3f}")

# With n = 20 and p = 10 the threshold 1 - c_u log(p)/n is small, so the
# rule demands a large drop in residual variance at every step.
print("\n c_u   threshold  mean stop  mean MSE at stop")
for c_u in (4.5, 2.0, 1.0, 0.5):
    c = step_curve(dgp, "BA", repetitions=60, max_steps=200, c_u=c_u)
    thr = 1 - c_u * np.log(dgp.p) / dgp.n
    print(f"{c_u:4.1f}  {thr:9.3f}  {c.stop_steps.mean():9.2f}  {c.stop_mse_out.mean():16.3f}")
