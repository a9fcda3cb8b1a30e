"""uspkit: parse the UML SP textual form, validate the profile rules,
extract frame ontologies, and execute models as deterministic tick
simulations."""

from .diagnostics import Diagnostic, Severity, Span, sort_diagnostics
from .engine import (
    EntityInstance,
    RunLimits,
    RunResult,
    RunState,
    RunStats,
    Trace,
    TraceEvent,
    UspRuntimeError,
    instantiate,
    run,
    run_tick,
)
from .model import AttrDef, ClassDef, Model, OpDef, TypeRef, is_frame
from .ontology import (
    Frame,
    Ontology,
    Relation,
    emit_plantuml,
    export_dot,
    export_json,
    extract_ontology,
    import_json,
)
from .parser import ParseResult, parse, parse_file
from .printer import print_model
from .rng import SplitMix64
from .stereotypes import ElementKind, Stereotype, UnknownStereotypeError, stereotype_of
from .validator import ValidatedModel, ValidationResult, validate

__version__ = "0.1.0"
PROFILE_VERSION = "UML2 SP 1.1-compatible textual form"

__all__ = [
    "AttrDef",
    "ClassDef",
    "Diagnostic",
    "ElementKind",
    "EntityInstance",
    "Frame",
    "Model",
    "Ontology",
    "OpDef",
    "ParseResult",
    "PROFILE_VERSION",
    "Relation",
    "RunLimits",
    "RunResult",
    "RunState",
    "RunStats",
    "Severity",
    "Span",
    "SplitMix64",
    "Stereotype",
    "Trace",
    "TraceEvent",
    "TypeRef",
    "UnknownStereotypeError",
    "UspRuntimeError",
    "ValidatedModel",
    "ValidationResult",
    "__version__",
    "emit_plantuml",
    "export_dot",
    "export_json",
    "extract_ontology",
    "import_json",
    "instantiate",
    "is_frame",
    "parse",
    "parse_file",
    "print_model",
    "run",
    "run_tick",
    "sort_diagnostics",
    "stereotype_of",
    "validate",
]
