"""Regression constants produced by ``tests/oracles/derive_values.py``.

Every value below was computed with 40-digit mpmath quadrature or root finding,
independently of the package, and is frozen here so the suite does not need to
re-run the oracle.
"""

# Autonomous matching integral at beta = -1/2 (s = 3), c1 = 1.
PHI_HALF_ONE = 0.131896387817468676937544123998
PHI_ONE_ONE = 0.927295218001612232428364617529
PHI_DIAGONAL = {10: 3.1015979856434921723, 100: 3.1411926535951265717, 1000: 3.1415886535897932438}
B_MATCH_QUARTER = 0.910179721124454682608715570295

# Barrier constants at beta = -1/2.
LOWER_A_C1 = 0.167549416273926355072338703541  # c1 = 1, any c2
LOWER_A_C2_ONLY = 0.087612746209272914804514884889  # c1 = 0, c2 = 1
UPPER_B_SIGMA_QUARTER = 1.07456993182354191955333815671  # sigma = 1/4, c1 = 1, c2 = 0
UPPER_B_SIGMA_QUARTER_BOTH = 1.22158011715972857241599307516  # sigma = 1/4, c1 = c2 = 1

# Endpoint integral of 1 / sqrt(1 - t^s) over [0, 1].
ENDPOINT_S2 = 1.57079632679489661923122251553
ENDPOINT_S3 = 1.40218210532545426117493810209

# Amplitude normalisation making the one-dimensional profile equations exact.
MU_CLM = -2.0
MU_GCLM_HALF = 1.0
