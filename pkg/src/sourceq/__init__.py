"""sourceq: sourcing equilibria, ranked title scales, and transformation
checking for organizational architectures.

The package models who holds which sources at what title level, prices the
resulting cost routing, checks outsourcing pre/postconditions, classifies
transformations, executes multi-threaded plans, and grows synthetic
unit networks under different counterparty policies.
"""

from .canon import canonical_equilibrium, canonical_json, equilibrium_to_dict
from .catalog import (SourceType, builtin_source_types, get_source_type,
                      register_source_type)
from .delta import EquilibriumDelta, KindDelta, apply_delta, diff
from .dsl import Diagnostic, ParseResult, parse_equilibrium, parse_plan
from .errors import (InsufficientData, InvalidStatus, MissingBenchmark,
                     NoServices, NoSourcesOfType, NotInvertible,
                     PerspectiveNotParty, PolicyExhausted, ProgressionHalted,
                     ScopeMismatch, SourceqError, StepPreconditionFailed,
                     TooLarge, UnknownEntity, UnknownScale, UntitledSource)
from .jsonio import (export_json, guard_to_dict, plan_to_dict, step_to_dict,
                     validation_to_dict)
from .model import (EXTERNAL, AdvantageFlags, Contract, ContractKind,
                    CostCategory, EquilibriumBuilder, MoneyEdge, Polarity,
                    ServiceEdge, Source, SourcingEquilibrium, Subunit,
                    TitleRecord, Unit, polarity, rank_from)
from .netdyn import (NOT_POWER_LAW, EvolutionStats, PreferentialAttachment,
                     UniformRandom, UnitNetwork, WeightAssortative, evolve,
                     loglog_fit_residual, powerlaw_alpha,
                     synthesize_equilibrium, to_network)
from .planning import (ContractPresent, EntityExists, ExecutionState,
                       GuardedStep, HaltInfo, Plan, RoundRobin, SeededRandom,
                       Status, TitleAtLevel, TurnRecord, execute, guard_holds,
                       initial_state, interleavings_oracle, step_once)
from .printer import print_equilibrium, print_plan
from .scales import (GENERIC_SCALE, IPR_SCALE, PERSONNEL_SCALE, TOOLS_SCALE,
                     LevelSpec, TitleScale, get_scale, register_scale,
                     registered_scales)
from .steps import (KEEP, AbandonTitle, AcquireSource, ChangeTitleLevel,
                    CreateSubunit, CreateUnit, DissolveSubunit, DissolveUnit,
                    FinancialTransfer, MoveService, Progression, SignContract,
                    StepTrace, TerminateContract, TransferTitle,
                    TransformationScope, apply_progression, apply_step,
                    step_kind)
from .transform import (HistoryRecord, Partition, PostcondConfig,
                        PostconditionResult, PreconditionResult,
                        QualificationReport, Reversibility,
                        TransformationLabel, TransformationReport,
                        analyze_progression, check_postcondition,
                        check_precondition, classify, invariant_portfolio_check,
                        partition_sources, qualify_dimensions, reverse,
                        reversibility)
from .validation import Finding, ValidationReport, validate_equilibrium
from .valuation import (Benchmark, CostBreakdown, ServiceDegrees, WeightTable,
                        cost_estimate, default_weight_table,
                        degree_internal_abs, degree_internal_rel, is_internal,
                        portfolio_weight, service_provision_degrees,
                        signed_weight, sustainable_advantage)

__version__ = "0.1.0"
