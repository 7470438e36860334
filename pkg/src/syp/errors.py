"""Exception types raised across the pipeline.

Every error that callers are expected to catch derives from SypError, so a
CLI adapter can map the whole family onto a single exit code.
"""


class SypError(Exception):
    """Base class for all pipeline errors."""


# --- model parsing / validation ---

class MalformedXml(SypError):
    """Input is not well-formed XML or is structurally inconsistent."""


class UnsupportedElement(SypError):
    """The document uses a BPMN element outside the supported subset."""

    def __init__(self, element_id: str, tag: str):
        self.element_id = element_id
        self.tag = tag
        super().__init__(f"unsupported BPMN element <{tag}> (id={element_id!r})")


class MissingLane(SypError):
    """An activity is not contained in any lane."""

    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"activity {node_id!r} is not referenced by any lane")


# --- sentence extraction / refinement ---

class MissingGateLabel(SypError):
    """A diverging exclusive gateway has an unlabeled outgoing flow."""


class UnknownSentenceId(SypError):
    """refine targets a sentence id that does not exist."""


class StructuralEdit(SypError):
    """refine would alter sentence structure, not just wording."""


# --- beat sheet ---

class CountMismatch(SypError):
    """Sentence count does not equal flow-node count."""


class NoStartEvent(SypError):
    """The model does not have exactly one start event."""


# --- narrative compilation ---

class IncompleteSheet(SypError):
    """The beat sheet is internally inconsistent (gaps, dangling targets)."""


class UnlabeledChoice(SypError):
    """A choice branch has no usable label."""


class InfiniteLoop(SypError):
    """The knot graph contains a cycle with no choice on it."""


class UnstructuredParallel(SypError):
    """Parallel branches do not form a linearizable block."""


class DeadEnd(SypError):
    """A non-terminal entry has nowhere to go."""


# --- runtime sessions ---

class NoSuchChoice(SypError):
    """The chosen label is not offered by the current knot."""


class SessionFinished(SypError):
    """The session already reached an end knot."""


class HashMismatch(SypError):
    """A save file belongs to a different narrative."""


class CorruptSave(SypError):
    """A save file cannot be decoded or replayed."""


# --- metrics ---

class ModelMismatch(SypError):
    """Candidate and gold beat sheets reference different models."""


class EmptyInput(SypError):
    """An aggregate was requested over zero items."""
