class SRBError(Exception):
    """Base class for every error raised by this package"""


class DimensionError(SRBError, ValueError):
    """Operand shapes do not line up"""

    def __init__(self, op: str, *shapes):
        self.shapes = shapes
        super().__init__(f'{op}: incompatible shapes {" and ".join(str(s) for s in shapes)}')


class ArgumentError(SRBError, ValueError):
    pass


class CorpusParseError(SRBError, ValueError):
    """A corpus record could not be parsed"""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f'line {line_number}: {message}')


class ConsistencyError(SRBError):
    """Two objects that must agree (vocab and config, params and grads, checkpoint and config) do not"""


class ConfigError(SRBError, ValueError):
    pass
