"""The textbook 2x2 picture: bias and variance are separate failure modes.

Four Gaussian measurement processes are simulated against ground truth 2:
unbiased/biased (mean 2 vs 4) crossed with low/high variance (0.3 vs 8).
Thirty draws each.  The mean squared error of every quadrant splits exactly
into squared bias plus variance, and averaging MSE over many replications
converges to that sum (0.3, 4.3, 8, 12).
"""

import numpy as np

from dgauge import figure1_demo, mse_decompose

print("single run (seed 0), 30 draws per quadrant, truth = 2")
print(f"{'mean':>6} {'var':>6} {'est.bias':>9} {'est.var':>8} {'mse':>8} "
      f"{'bias^2+var':>11} {'residual':>10}")
for q in figure1_demo(seed=0):
    d = mse_decompose(q.draws, 2.0)
    resid = abs(d.mse - (d.bias_sq + d.variance))
    print(f"{q.mean:>6g} {q.variance:>6g} {q.bias_estimate:>9.4f} "
          f"{q.variance_estimate:>8.4f} {q.mse:>8.4f} "
          f"{d.bias_sq + d.variance:>11.4f} {resid:>10.2e}")

print("\naveraging MSE over 1000 replications (expect ~0.3, 4.3, 8, 12):")
sums = np.zeros(4)
for seed in range(1000):
    for i, q in enumerate(figure1_demo(seed)):
        sums[i] += q.mse
for (mean, var), avg in zip([(2, 0.3), (4, 0.3), (2, 8), (4, 8)], sums / 1000):
    print(f"  mean {mean}, variance {var:>4}: average MSE = {avg:.3f} "
          f"(bias^2 + variance = {(mean - 2) ** 2 + var})")
