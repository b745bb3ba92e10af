from packages.catalog.entries import (
    AUDIT,
    ENTRIES,
    VERIFIED,
    CatalogEntry,
    CatalogError,
    EntryView,
    export,
    get,
    get_formula,
    list_entries,
    total_generators,
)
from packages.catalog.formulas import FORMULAS, PublishedFormula

__all__ = [
    "AUDIT",
    "ENTRIES",
    "FORMULAS",
    "VERIFIED",
    "CatalogEntry",
    "CatalogError",
    "EntryView",
    "PublishedFormula",
    "export",
    "get",
    "get_formula",
    "list_entries",
    "total_generators",
]
