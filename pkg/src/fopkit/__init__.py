"""Finite-model workbench for first-order projections between
exists-forall second-order problems, with brute-force deciders as
ground truth at desk scale."""

from .errors import (BudgetExceededError, CompileError, EmptyUniverseError,
                     EvalError, FopkitError, InstanceError, NormalFormError,
                     ParseError, PrefixShapeError, QueryError, ReductionError,
                     StructureError, VocabularyError, WitnessError)
from .structures import (Structure, Vocabulary, enumerate_structures,
                         make_structure, make_vocabulary, parse_structures,
                         serialize_structure, serialize_vocabulary,
                         structure_at, structure_count)
from .formulas import (Formula, format_formula, free_vars, parse_formula)
from .evaluate import (NormalFormSentence, eval_fo, eval_pi2, eval_so2,
                       validate_normal_form)
from .problems import (SIGMA_CNF, SIGMA_DNF, SIGMA_G, TAU, Graph, Qbf2Cnf,
                       Qbf2Dnf, VcsatInstance, decide_2cc, decide_2cc_n,
                       decide_qsat2, decide_qsat2_witness, decide_qunsat2,
                       decide_unique_ext, decide_unique_ext_witness,
                       decide_vcsat, decide_vcsat_witness, decode_cnf,
                       decode_dnf, decode_graph, decode_vcsat, encode_cnf,
                       encode_dnf, encode_graph, encode_vcsat, format_graph,
                       format_qcnf, format_qdnf, format_vcsat, make_graph,
                       maximal_cliques, parse_graph, parse_instance,
                       parse_qcnf, parse_qdnf, parse_vcsat,
                       two_clique_coloring_sentence)
from .queries import (FirstOrderQuery, ProjectionReport, apply_query,
                      compose_apply, identity_query, make_query, parse_fop,
                      serialize_fop, validate_projection)
from .reductions import (NamedReduction, VerificationReport, generic_to_qsat2,
                         get_reduction, padding_reduction, problem_oracle,
                         reduction_names, verify_reduction)
from .universality import (LiteralCondition, UniversalityReport,
                           check_monotone, check_universality,
                           conditions_hold, is_consistent_graph,
                           parse_condition, witness_2cc,
                           witness_2cc_complement)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
