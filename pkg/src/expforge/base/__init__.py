from .bounds import tau_lambda_formulas, triangle_bound_exponent
from .cayley import (CayleyError, CayleySpec, DegreeNotRealizable, FaceGenerator,
                     build_cayley_complex, complete_partite_spec, equivalence_classes,
                     face_generators, truncate_to_degree, window_spec)
from .groups import (GroupTable, check_group_axioms, cyclic_group, direct_product,
                     parse_generators, parse_group, symmetric_group, write_generators,
                     write_group)
from .structured import (StructuredBipartite, StructuredReport, cayley_incidence,
                         incidence_graph, verify_structured)
