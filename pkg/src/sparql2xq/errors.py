"""Exception hierarchy shared by the parser, mapping loader, translator and executor.

Class names double as the error labels printed by the CLI, so they follow the
vocabulary users see in messages (``UnmappedProperty``, ``UnknownPrefix`` ...)
rather than the usual ``*Error`` suffix.
"""


class Sparql2XQError(Exception):
    """Base class for every error raised by this package."""


# -- parsing ---------------------------------------------------------------

class ParseError(Sparql2XQError):
    pass


class SparqlSyntaxError(ParseError):
    def __init__(self, line, column, message):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class UnsupportedFeature(ParseError):
    def __init__(self, feature):
        self.feature = feature
        super().__init__(feature)


class UnknownPrefix(SparqlSyntaxError):
    """A prefixed name whose prefix has no PREFIX declaration (a static syntax error)."""

    def __init__(self, label, line=0, column=0):
        self.label = label
        super().__init__(line, column, f"undeclared prefix {label!r}")


# -- mappings --------------------------------------------------------------

class MappingError(Sparql2XQError):
    pass


class MappingFormatError(MappingError):
    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class MappingConsistencyError(MappingError):
    pass


class UnmappedProperty(MappingError):
    def __init__(self, property_iri, class_iri=None):
        self.property_iri = property_iri
        self.class_iri = class_iri
        where = f" for class <{class_iri}>" if class_iri else ""
        super().__init__(f"<{property_iri}>{where}")


class UnmappedInstance(MappingError):
    def __init__(self, iri):
        self.iri = iri
        super().__init__(f"<{iri}>")


class AmbiguousClass(MappingError):
    def __init__(self, var, detail=""):
        self.var = var
        super().__init__(f"?{var}" + (f": {detail}" if detail else ""))


# -- translation -----------------------------------------------------------

class TranslationError(Sparql2XQError):
    pass


class TranslationUnsupported(TranslationError):
    pass


class ObjectIsIri(TranslationError):
    pass


class ScopeError(TranslationError):
    def __init__(self, var):
        self.var = var
        super().__init__(f"${var} is not bound")


# -- XML store / execution -------------------------------------------------

class ExecutionError(Sparql2XQError):
    pass


class XmlSyntaxError(ExecutionError):
    def __init__(self, line, message):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class UnboundVariable(ExecutionError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"${name}")


class UnknownCollection(ExecutionError):
    def __init__(self, uri):
        self.uri = uri
        super().__init__(uri)


class UpdateTargetError(ExecutionError):
    """``insert nodes ... into`` target is not exactly one element node."""
