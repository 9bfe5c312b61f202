"""Differential algebras of generalized functions with large
singularity sets: asymptotically vanishing ideals over indexed
sequences of smooth functions, their quotient algebras, sheaf-style
restriction/gluing/extension over box-union domains and chart atlases,
and mollifier representatives of classical distributions.  Every
algebraic claim is backed by a machine-checkable certificate.
"""

__version__ = "0.1.0"

from .domains import Box, MultiIndex, OpenSet, Point, multiindices
from .expr import (SmoothExpr, add, all_derivatives_hard_zero,
                   combine_fractions, comp, const, coord, cos, derive,
                   derive1, eval_with_certificate, evaluate, exp, expand,
                   from_sexpr, glue, is_hard_zero_at, is_structural_zero,
                   mul, pow_, sin, subst, to_sexpr)
from .bump import (CoverError, PartitionOfUnity, TransitionEta, box_window,
                   co_step, glue_exp, make_eta, partition_of_unity,
                   plateau_level, plateau_pair, shrinking_plateau,
                   smooth_step)
from .orders import (NAT, NAT_PAIR, CofinalEmbedding, IndexOrder,
                     diagonal_embedding, identity_embedding)
from .singular import (CountableUnion, DenseEnumerated, DensityReport,
                       EmptySet, FamilyError, FinitePoints, LFAReport,
                       SingularityFamily, SingularSet, ZeroSet,
                       complement_dense, locally_finitely_additive,
                       rationals_in_unit_interval, restrict_family,
                       singular_set_from_json, union_join)
from .foam import (DEFAULT_CONFIG, FoamSequence, GenFunction,
                   IdealDescriptor, IdealMismatchError, MembershipConfig,
                   MembershipResult, OffDiagonalReport, Refutation,
                   VanishingCertificate, certificate_transfer,
                   check_membership, diagonal, embed_smooth, eq_mod_ideal,
                   family_ideal, foam_to_multifoam, nontrivial_baire,
                   nontrivial_nd, off_diagonality_suite, rho_restrict,
                   single_ideal, zero_sequence)
from .sheaf import (BoundaryFunction, Chart, ChartAtlas, FlabbyResult,
                    GlueError, GlueResult, SectionAssignment, SheafError,
                    Transition, atlas_section_suite, boundary_function,
                    circle_atlas, flabby_extend, glue as glue_sections,
                    restrict, separated_check, unit_partition_identity)
from .dist import (MollifierKernel, QuadratureConfig, TestFunction,
                   WeakLimitReport, bump_kernel, delta_sequence,
                   heaviside_sequence, pairing, step_kernel, unit_step,
                   weak_limit_report)
