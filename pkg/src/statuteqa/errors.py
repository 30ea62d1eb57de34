"""Exception types shared across the package.

Two broad families matter for the command-line exit-code contract:
``InputError`` (malformed or missing input files, exit code 2) and
``ConsistencyError`` (inputs parse but contradict each other, exit code 3).
"""


class StatuteQaError(Exception):
    """Base class for all package errors."""


class InputError(StatuteQaError):
    """An input file is missing, malformed, or violates its format."""


class ConsistencyError(StatuteQaError):
    """Inputs are individually valid but mutually inconsistent."""


# corpus ingestion

class NoArticlesFound(InputError):
    """No header pattern matched anywhere in the statute text."""


class DuplicateArticleId(InputError):
    """Two headers normalised to the same article identifier."""


class ParseError(InputError):
    """A query/record file failed to parse; carries the record index."""

    def __init__(self, message: str, record: int | None = None):
        self.record = record
        if record is not None:
            message = f"record {record}: {message}"
        super().__init__(message)


class MissingField(InputError):
    """A required field is absent from an input record."""

    def __init__(self, field: str, record: int | None = None):
        self.field = field
        self.record = record
        where = f" (record {record})" if record is not None else ""
        super().__init__(f"missing field {field!r}{where}")


# analysis / indexing

class EmptyCorpus(InputError):
    """An operation requiring at least one article got an empty corpus."""


class OrdinalOutOfRange(StatuteQaError):
    """Article ordinal outside [0, len(corpus))."""


# embeddings

class EmptyVocabulary(InputError):
    """Every token fell below the min-count threshold."""


class HeaderMismatch(InputError):
    """Vector file header disagrees with the body (row count or dim)."""


class MalformedLine(InputError):
    """Unparseable line in a vector file; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str = ""):
        self.line_no = line_no
        suffix = f": {message}" if message else ""
        super().__init__(f"line {line_no}{suffix}")


class DuplicateWord(InputError):
    """A word appears twice in a vector file."""


# fusion / entailment / evaluation

class NoCandidates(ConsistencyError):
    """Both the lexical and the embedding hit lists are empty."""


class MissingVote(ConsistencyError):
    """A query has neither an exact match nor an ensemble vote."""

    def __init__(self, qid: str):
        self.qid = qid
        super().__init__(f"no vote for qid {qid!r}")


class MissingLabel(ConsistencyError):
    """A decided query has no gold entailment label."""

    def __init__(self, qid: str):
        self.qid = qid
        super().__init__(f"no label for qid {qid!r}")


class EmptyRun(ConsistencyError):
    """Macro-averaging over zero queries."""
