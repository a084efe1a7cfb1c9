"""Exception types shared across the package."""


class CfGamesError(Exception):
    pass


class InvalidSpecError(CfGamesError, ValueError):
    """A counterfactual transform does not fit the game it is applied to."""


class GameShapeError(CfGamesError, ValueError):
    """A game or strategy has the wrong dimensions for the requested operation."""


class PreconditionError(CfGamesError, ValueError):
    pass


class ConfigError(CfGamesError, ValueError):
    pass


class ParameterError(CfGamesError, ValueError):
    pass


class PartialRecordError(CfGamesError):
    """Metric requested on a match that was aborted before completion."""


class TemplateError(CfGamesError, ValueError):
    pass


class AgentUnavailableError(CfGamesError):
    """The model transport failed after its retry budget was spent."""
