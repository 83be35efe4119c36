from .identifiers import IdentifierValidator
from .export import DataExporter

__all__ = ["IdentifierValidator", "DataExporter"]
