"""Fixed column orders for every CSV the toolkit emits.

Documented in docs/output_schemas.md; tests cross-check the two.
"""

SPECTRUM_LADDER = ("c", "r_min", "n_points", "lambda1", "verdict")
SWEEP_TRACE = ("c", "r_min", "n_points", "lambda1", "verdict")
EIGVEC = ("r", "value")
PHI_N = ("c", "gamma", "n", "quotient", "upper_bound")
PHI_GAMMA = ("c", "gamma", "quotient")
EVOLUTION = ("t", "cap", "norm")

ALL = {
    "spectrum_ladder.csv": SPECTRUM_LADDER,
    "sweep_trace.csv": SWEEP_TRACE,
    "eigvec.csv": EIGVEC,
    "phi_n.csv": PHI_N,
    "phi_gamma.csv": PHI_GAMMA,
    "evolution.csv": EVOLUTION,
}
