"""Matching complexes, factor-critical quotients and their discrete Morse theory."""
from .builders import build_bfc_matching, build_bnm_matching, build_fc_matching, build_nm_matching
from .errors import (ClaimViolation, DomainError, ParseError, PreconditionError, ResourceError,
                     StructureError)
from .families import (FamilySpec, Kind, SphereCountPrediction, contains, enumerate_faces, face_masks,
                       predicted_euler_sum, predicted_spheres, signed_euler_sum)
from .graphio import format_bipartite, format_graph, parse_bipartite, parse_graph
from .graphs import (BipartiteGraph, GallaiEdmonds, Graph, Matching, gallai_edmonds, is_factor_critical,
                     is_q_factor_critical, matching_number, max_matching, max_matching_bipartite,
                     min_vertex_cover_bipartite)
from .homology import (ChainComplex, HomologyProfile, chain_complex, euler_crosscheck, rank_mod_p,
                       reduced_homology, smith_normal_form, suspension_check)
from .morse import (FacePoset, MorseMatching, VerificationReport, cluster_compose, critical_census,
                    face_poset, simplex_poset, verify)
from .triangles import (OddPartition, count_odd_partition_weight, count_trees_of_triangles, double_factorial,
                        forests_of_triangles, is_forest_of_triangles, is_tree_of_triangles, odd_partitions,
                        trees_of_triangles)

__version__ = "0.1.0"
