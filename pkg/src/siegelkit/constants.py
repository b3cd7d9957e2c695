"""Default tunables shared across modules.

The deviation bounds D3/D4/D5 are runtime parameters of the comparison
envelopes; their defaults come from measurement runs of the Fatou module
(see ``siegelkit.fatou.measure_constants``) over the constant-digit test
rotation numbers, rounded up.  They can be overridden per call.
"""

# Minimum digit bound defining the high-type regime this toolkit targets.
HIGH_TYPE_N = 25

# Largest rotation number for which the perturbed-petal machinery is built.
ALPHA_MAX = 0.05

# Default working precision (significant decimal digits) for digit-stream
# derived values.
PRECISION_DPS = 60

# Heuristic threshold above which a Brjuno partial sum is flagged diverging.
BRJUNO_DIVERGING_THRESHOLD = 1.0e3

# Height offset in the sector/arc constructions.
M_DEFAULT = 3.0

# Envelope deviation bounds, measured defaults (see module docstring).
# D4 = D3 + 1 by convention; D5 >= D3.
D3_DEFAULT = 1.2
D4_DEFAULT = D3_DEFAULT + 1.0
D5_DEFAULT = 1.2

# Floor of significant digits below which digit extraction refuses to run.
PRECISION_FLOOR_DIGITS = 10
