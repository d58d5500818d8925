"""Model predictive attitude tracking on SO(3) via stable embedding.

Core numerics live in the submodules (so3, reference, dynamics,
linearization, baseline, qp, mpc, simulator).  A FastAPI service wrapping
the simulator is in so3mpc.service, and the command-line client in
so3mpc.cli.
"""

__version__ = "0.1.0"
