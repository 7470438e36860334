"""syp: script your process — BPMN models as playable interactive narratives."""

from .beatsheet import (
    BeatEntry,
    BeatSheet,
    CompletenessReport,
    NextRef,
    check_completeness,
    script_sentences,
    sheet_from_json,
    sheet_to_csv,
    sheet_to_json,
)
from .bpmn import (
    FlowNode,
    Lane,
    NodeKind,
    ProcessModel,
    Resource,
    ResourceKind,
    ResourceLink,
    SequenceFlow,
    ValidationReport,
    model_from_json,
    model_to_json,
    parse_bpmn,
    validate_model,
)
from .metrics import MetricsReport, MetricsSummary, metrics_to_csv, score_sheet, summarize
from .narrative import (
    Choices,
    CompiledNarrative,
    Divert,
    EndExit,
    Knot,
    compile_narrative,
    emit_ink,
    narrative_from_json,
    narrative_to_json,
    read_ink,
)
from .runtime import (
    Session,
    apply_choice,
    load_session,
    narrative_hash,
    restart,
    save_session,
    start_session,
)
from .sentences import (
    Complement,
    ComplementOrigin,
    DEFAULT_LEXICON,
    Sentence,
    SubjectKind,
    VerbLexicon,
    extract_sentences,
    refine_sentence,
    sentences_from_json,
    sentences_to_csv,
    sentences_to_json,
)

__version__ = "0.1.0"
