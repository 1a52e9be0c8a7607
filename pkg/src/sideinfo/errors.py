class SizeError(ValueError):
    """An enumeration, alphabet or evaluation budget would be exceeded."""

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class HypothesisError(ValueError):
    """A theorem's hypothesis does not hold for the given instance."""


class ChannelFormatError(ValueError):
    """A channel file could not be parsed; ``where`` locates the problem."""

    def __init__(self, message, where=None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where
