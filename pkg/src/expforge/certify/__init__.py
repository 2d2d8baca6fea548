from .expansion import measure_une
from .orientation import bounded_outdegree_orientation, degree_product_check, orientation_check
from .params import validate_exponents, validate_parameters
from .spectral import (NonConvergence, SpectralReport, bipartite_lambda2, eml_bound, skeletonize,
                       small_set_skeleton_lambda, top_eigenvalue)
from .triangles import (TriangleReport, naive_triangle_face_count, triangle_expander_tau,
                        triangle_face_count)

SCHEMA = "certify/v1"


def record(kind: str, body: dict) -> dict:
    """Wrap a certification result as a versioned JSON record."""
    return {"schema": SCHEMA, "kind": kind, **body}
