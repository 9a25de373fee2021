from mopidy.exceptions import ExtensionError, MopidyException


class SolverError(MopidyException):
    pass


class SettingsError(SolverError, ExtensionError):
    pass


class SubstitutionError(SolverError):
    pass


class ModelVerificationError(SolverError):
    def __init__(self, message, equation=None):
        super().__init__(message)
        self.equation = equation


class ParseError(SolverError):
    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column

    def describe(self, source="<input>"):
        if self.line is None:
            return f"{source}: {self.message}"
        return f"{source}:{self.line}:{self.column}: {self.message}"


class UnsupportedFeatureError(ParseError):
    def __init__(self, feature, line=None, column=None):
        super().__init__(f"unsupported feature {feature!r}", line, column)
        self.feature = feature
