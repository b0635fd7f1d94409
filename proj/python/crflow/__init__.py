"""CR Yamabe flow on the Heisenberg nilmanifold.

Fields are numpy arrays of shape (N_x, N_y, N_z), index k fastest.
"""

from ._core import (
    check_identities,
    conformal_sub_laplacian,
    convergence_rows,
    diagnose,
    initial_data,
    pullback,
    read_snapshot,
    run_command,
    run_flow,
    scale,
    sub_laplacian,
    webster_curvature,
    write_snapshot,
)

CSV_HEADER = "t,E,vol,intR,intR2,var,dEdt_formula,min_u,min_R,max_R,dt"

__all__ = [
    "CSV_HEADER",
    "check_identities",
    "conformal_sub_laplacian",
    "convergence_rows",
    "diagnose",
    "initial_data",
    "pullback",
    "read_snapshot",
    "run_command",
    "run_flow",
    "scale",
    "sub_laplacian",
    "webster_curvature",
    "write_snapshot",
]
