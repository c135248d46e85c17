"""Exception hierarchy shared by every module of the toolkit."""


class DavarLabelError(Exception):
    """Base class for all domain errors raised by davar_label."""


# --- parsing -----------------------------------------------------------------


class ParseError(DavarLabelError):
    """The annotation text could not be turned into an AnnotationSet."""


class MalformedJson(ParseError):
    pass


class SchemaShapeError(ParseError):
    pass


class DuplicateImagePath(DavarLabelError):
    def __init__(self, path: str):
        super().__init__(f"duplicate image path: {path!r}")
        self.path = path


# --- geometry ----------------------------------------------------------------


class InvalidBox(DavarLabelError, ValueError):
    """A box does not have a legal coordinate count."""


class DegenerateBox(InvalidBox):
    """A box encloses zero area."""


class NonConvexPolygon(DavarLabelError, ValueError):
    pass


# --- task views --------------------------------------------------------------


class MissingRequiredKey(DavarLabelError, KeyError):
    def __init__(self, key: str, task: str):
        super().__init__(key, task)
        self.key = key
        self.task = task

    def __str__(self) -> str:
        return f"task {self.task!r} requires key {self.key!r}"


class SubtaskIndexOutOfRange(DavarLabelError, IndexError):
    pass


class InvalidRecord(DavarLabelError, ValueError):
    """A record breaks an invariant an operation relies on."""


# --- transforms --------------------------------------------------------------


class UnknownStage(DavarLabelError, KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown stage type: {self.name!r}"


class BadStageParams(DavarLabelError, ValueError):
    def __init__(self, name: str, reason: str):
        super().__init__(f"{name}: {reason}")
        self.name = name
        self.reason = reason


class BadTarget(DavarLabelError, ValueError):
    pass


class BadK(DavarLabelError, ValueError):
    pass


class MissingTexts(DavarLabelError, ValueError):
    pass


# --- converters --------------------------------------------------------------


class ConversionError(DavarLabelError, ValueError):
    pass


class DanglingReference(ConversionError):
    pass


class NonQuadBox(ConversionError):
    pass


class TokenTagLengthMismatch(ConversionError):
    pass


# --- metrics -----------------------------------------------------------------


class LengthMismatch(DavarLabelError, ValueError):
    pass


class NotAPermutation(DavarLabelError, ValueError):
    pass
