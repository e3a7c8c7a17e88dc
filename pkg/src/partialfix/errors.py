class PartialFixError(Exception):
    """Base class for all errors raised by partialfix."""


class ArgumentError(PartialFixError, ValueError):
    pass


class DomainError(PartialFixError, ValueError):
    def __init__(self, name: str, value: float, space: str = ""):
        self.name = name
        self.value = value
        where = f" of {space}" if space else ""
        super().__init__(f"{name}={value!r} is outside the domain{where}")


class MapTotalityError(PartialFixError, ValueError):
    def __init__(self, x: float, matches: int):
        self.x = x
        self.matches = matches
        what = "no piece" if matches == 0 else f"{matches} pieces"
        super().__init__(f"map is not well defined at x={x!r}: {what} match")


class DomainEscapeError(PartialFixError):
    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"orbit left the domain at iterate {index}: x={value!r}")


class GluingError(PartialFixError, ValueError):
    def __init__(self, x: float, fx: float, gx: float):
        self.x = x
        self.fx = fx
        self.gx = gx
        super().__init__(f"f and g disagree on the overlap at x={x!r}: {fx!r} != {gx!r}")


class InsufficientDataError(PartialFixError, ValueError):
    pass


class ParseError(PartialFixError, ValueError):
    pass
