"""Exception types shared across the pipeline modules."""


class SecdedupError(Exception):
    """Base class for all errors raised by this package."""


# --- ingest ---

class MalformedCatalog(SecdedupError):
    pass


class DuplicateTool(SecdedupError):
    pass


class MalformedReport(SecdedupError):
    pass


class PathNotFound(SecdedupError):
    pass


class DuplicateFindingId(SecdedupError):
    pass


class MixedTestingType(SecdedupError):
    pass


# --- corpus ---

class SpecMismatch(SecdedupError):
    pass


# --- similarity ---

class EmptyCorpus(SecdedupError):
    pass


class RankTooLarge(SecdedupError):
    pass


class MalformedEmbeddingFile(SecdedupError):
    pass


class EmptyEmbeddingSet(SecdedupError):
    pass


class DimensionMismatch(SecdedupError):
    pass


class MissingVector(SecdedupError):
    pass


class ServiceUnavailable(SecdedupError):
    pass


class MalformedResponse(SecdedupError):
    pass


class MalformedGraph(SecdedupError):
    pass


class MalformedMatrix(SecdedupError):
    pass


# --- evaluation ---

class UniverseMismatch(SecdedupError):
    pass


class MalformedClusterSet(SecdedupError):
    pass
