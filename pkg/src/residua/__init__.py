"""Residual analysis of guarded monitoring automata (DATEs) against program abstractions."""

from .date import (OK, DateSpec, RunResult, Transition, VarDecl, Verdict, apply_action,
                   compatible, concrete_step, empty_like, eval_guard, restrict_alphabet,
                   restrict_transitions, run, union)
from .dateformat import parse_date, print_date
from .errors import (ContradictoryAliases, IncompatibleUnion, NondeterminismError,
                     ResiduaError, ResourceLimit, SpecError)
from .monitor import ActivationStats, MonitorPool, monitor, replay_compare
from .oracle import EquivResult, GenConfig, equiv_on_program, random_instance
from .program import (AliasRelations, Pair, ProgramModel, alphabet_of, alphabet_of_id,
                      close_relations, enumerate_traces, parse_program, parse_trace,
                      print_program, project_runtime, project_static, silence, silence_model)
from .residual import (ResidualReport, analyze, approx_step, classify_states,
                       reachable_reduce, residual0, residual1, residual1_union, residual2,
                       static_run, used_transitions)

__version__ = "0.1.0"
