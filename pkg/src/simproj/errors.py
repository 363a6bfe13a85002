"""Exception hierarchy. Every error carries a machine-readable ``code``
that the HTTP service surfaces verbatim in its error bodies."""


class SimprojError(Exception):
    code = "Error"

    def __init__(self, message: str = "", detail=None):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.detail = detail


def _make(name: str) -> type:
    return type(name, (SimprojError,), {"code": name})


EmptyData = _make("EmptyData")
NonFiniteInput = _make("NonFiniteInput")
DegenerateVariance = _make("DegenerateVariance")
DimensionMismatch = _make("DimensionMismatch")
NonPositiveSigma = _make("NonPositiveSigma")
NonPositiveGamma = _make("NonPositiveGamma")
SinglePoint = _make("SinglePoint")
OutOfRange = _make("OutOfRange")
ZeroMask = _make("ZeroMask")
ShapeMismatch = _make("ShapeMismatch")
NonFiniteLoss = _make("NonFiniteLoss")
CountOutOfRange = _make("CountOutOfRange")
EmptyManipulation = _make("EmptyManipulation")
UnknownClass = _make("UnknownClass")
SingleClass = _make("SingleClass")
TooFewPoints = _make("TooFewPoints")
ParseError = _make("ParseError")
RowCountMismatch = _make("RowCountMismatch")
NonNumericFeature = _make("NonNumericFeature")
MissingLabelColumn = _make("MissingLabelColumn")
ShapeHeaderMismatch = _make("ShapeHeaderMismatch")
SampleTooLarge = _make("SampleTooLarge")
UnknownDataset = _make("UnknownDataset")
UnknownSession = _make("UnknownSession")
IndexOutOfRange = _make("IndexOutOfRange")
DuplicateIndex = _make("DuplicateIndex")
StepOutOfRange = _make("StepOutOfRange")
SerializationError = _make("SerializationError")
VersionMismatch = _make("VersionMismatch")
JobRunning = _make("JobRunning")
