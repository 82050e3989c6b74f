"""Exception types shared across the package.

Every error raised by slidegen derives from SlideGenError so callers can
catch domain failures without also swallowing programming errors.
"""


class SlideGenError(Exception):
    """Base class for all slidegen errors."""


# --- ingestion ---

class SchemaError(SlideGenError):
    """Input JSON is missing a required field or violates the schema."""


class EmptyDocument(SlideGenError):
    """A paper ingested with zero sentences after cleaning."""


# --- text metrics ---

class EmptyCorpus(SlideGenError):
    """An operation that needs at least one document got none."""


class InvalidN(SlideGenError):
    """n-gram order below 1."""


class EmptyReference(SlideGenError):
    """IDF-recall reference text contains no tokens."""


class NoNgrams(SlideGenError):
    """Target sequence too short to yield a single n-gram."""


class InvalidK(SlideGenError):
    """Precision cutoff below 1."""


# --- header tree ---

class SpanOutOfRange(SlideGenError):
    """Snippet span points outside the document."""


# --- embedding ---

class DegenerateConfig(SlideGenError):
    """Training configuration that cannot make progress."""


class ServiceUnavailable(SlideGenError):
    """Remote embedding/generation endpoint failed after retries."""


class DimensionMismatch(SlideGenError):
    """Remote service returned vectors of the wrong shape."""


class Timeout(SlideGenError):
    """Remote call exceeded its deadline."""


# --- retrieval ---

class InvalidWindow(SlideGenError):
    """Snippet window below 1 sentence."""


class EmptySnippets(SlideGenError):
    """Index build requested over zero snippets."""


class AlphaOutOfRange(SlideGenError):
    """Mixing weight outside [0, 1]."""


class EmptyTitle(SlideGenError):
    """Retrieval or generation queried with a blank title."""


# --- figures ---

class NoFigures(SlideGenError):
    """Figure ranking requested on a paper without figures."""


class NoEligibleSlides(SlideGenError):
    """Figure evaluation found no slides with linked figures."""


# --- generation ---

class EmptyContext(SlideGenError):
    """Generator invoked with an empty context."""


class EmptyGeneration(SlideGenError):
    """Remote generator returned no text."""


# --- derivability filter ---

class EmptyLine(SlideGenError):
    """Featurization of a blank slide line."""


class DegenerateLabels(SlideGenError):
    """Forest training data contains a single class."""


class EmptyTraining(SlideGenError):
    """Forest training data is empty or too small."""


class UnfittedModel(SlideGenError):
    """Prediction attempted before fit."""


# --- evaluation ---

class MisalignedCorpora(SlideGenError):
    """A deck has no paired paper (or vice versa)."""


# --- service ---

class BindError(SlideGenError):
    """HTTP server could not bind its port."""


class ConfigError(SlideGenError):
    """Invalid service configuration."""


class EmptyDeck(SlideGenError):
    """Deck export requested with zero slides."""
