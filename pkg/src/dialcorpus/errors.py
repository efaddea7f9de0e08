"""Exception hierarchy shared by every pipeline stage."""


class CorpusError(Exception):
    """Base class for all errors raised by dialcorpus."""


class UndecodableInput(CorpusError):
    pass


class EmptyScript(CorpusError):
    pass


class NoCuesParsed(CorpusError):
    pass


class MixedFormat(CorpusError):
    pass


class EmptyCollection(CorpusError):
    pass


class LengthMismatch(CorpusError):
    pass


class MissingLine(CorpusError):
    pass


class ParseError(CorpusError):
    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class EmptyTraining(CorpusError):
    pass


class InsufficientData(CorpusError):
    def __init__(self, group, message):
        super().__init__(f"group {group!r}: {message}")
        self.group = group


class ConfigError(CorpusError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
