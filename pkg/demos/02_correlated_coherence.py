"""Correlated coherence and what a zero value says about a state.

``python3 demos/02_correlated_coherence.py``
"""

import numpy as np

from qcc import (
    DensityMatrix,
    LocalBasis,
    ProductBasisChoice,
    asymmetric_discord_delta,
    correlated_coherence,
    correlated_coherence_canonical,
    symmetric_discord_zero,
)
from qcc.stategen import bell, random_cc_state, random_cq_state, werner

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)

# Classically correlated coin pair: both marginals are I/2, so every local
# basis is an eigenbasis and the choice is not unique.
coins = DensityMatrix(np.diag([0.5, 0, 0, 0.5]).astype(complex), (2, 2), 1)
hadamard = ProductBasisChoice(LocalBasis(H), LocalBasis(H))
print("Coin pair, Hadamard eigenbasis:  ", round(correlated_coherence(coins, hadamard), 6))
print("Coin pair, minimised eigenbasis: ", round(correlated_coherence_canonical(coins, "min").value, 6))
print("  (the degenerate eigenspaces hide a better basis; the minimised mode finds it)\n")

print(f"{'p':>5} {'C_cc(Werner)':>14}")
for p in (0.0, 0.25, 0.5, 0.75, 1.0):
    print(f"{p:5.2f} {correlated_coherence_canonical(werner(p), 'fixed').value:14.6f}")

print("\nZero-discord tests")
cases = {
    "classical-classical": random_cc_state((2, 3), seed=1),
    "classical-quantum": random_cq_state((2, 2), seed=3),
    "Bell phi+": bell(),
}
print(f"{'state':>20} {'symmetric zero':>15} {'delta (measure A)':>18}")
for name, rho in cases.items():
    sym, _ = symmetric_discord_zero(rho)
    delta, _ = asymmetric_discord_delta(rho, "A")
    print(f"{name:>20} {str(sym):>15} {delta:18.2e}")
print("\nA classical-quantum state survives a measurement on A but not on both sides.")
