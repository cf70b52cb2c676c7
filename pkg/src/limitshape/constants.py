"""Central tolerance and resolution table.

Every geometric epsilon used by the toolkit lives here so property tests
have a single knob to reason about.
"""

GEOM_EPS = 1e-12            # vertex dedup / orientation tolerance
AREA_TOL = 1e-10            # relative tolerance on polygon-area identities
POSITIVITY_FLOOR = 1e-9     # minimum admissible value of a positive weight
EVENNESS_TOL = 1e-12        # |w(theta) - w(theta + pi)| bound
BOUNDARY_DECAY_CEILING = 0.2    # max weight value at the boundary probes
BOUNDARY_PROBE = 1e-3       # angular offset of the boundary-decay probes
FD_STEP = 1e-6              # finite-difference step for tabulated weights
NEAR_PARALLEL = 1e-9        # radians; closer half-plane normals merge
DEFAULT_RESOLUTION = 4096
MIN_RESOLUTION = 16
WINDOW_FACTOR = 16.0        # default window = factor * lambda * max weight
SUP_GRID = 2048             # grid size for sup-distance evaluation
EDGE_SAMPLES = 16           # per-edge boundary samples for Hausdorff
VALIDATION_SAMPLES = 4096   # angles sampled by weight validation
