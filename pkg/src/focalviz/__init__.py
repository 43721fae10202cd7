"""Narrative focalization tooling: data model, storage, labeling pipeline,
evaluation metrics, timeline layout, SVG rendering, and HTTP API."""

from .layout import (
    CardGeometry,
    LayoutConfig,
    LayoutError,
    TimelineLayout,
    View,
    build_layout,
    card_dimensions,
    flow_cards,
    layout_to_dict,
)
from .metrics import (
    AlignmentError,
    EvalReport,
    LabelTable,
    align,
    evaluate,
    render_report,
    table_from_document,
)
from .model import (
    Annotation,
    Character,
    Event,
    Explanation,
    LABELS,
    NarrativeDocument,
    RowKey,
    Scene,
    Span,
    ValidationReport,
    active_characters,
    row_key,
    validate,
)
from .pipeline import (
    AnnotationRequest,
    MockProvider,
    PromptTemplate,
    ProviderConfig,
    annotate_document,
    build_prompt,
    parse_response,
)
from .render import GlyphStyle, SvgDocument, render_glyph, render_legend, render_timeline
from .server import ServerConfig, create_app
from .store import (
    CatalogError,
    ParseError,
    StoryCatalog,
    VersionError,
    load_story,
    parse,
    scan_catalog,
    serialize_canonical,
)

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "AnnotationRequest",
    "AlignmentError",
    "CardGeometry",
    "CatalogError",
    "Character",
    "EvalReport",
    "Event",
    "Explanation",
    "GlyphStyle",
    "LABELS",
    "LabelTable",
    "LayoutConfig",
    "LayoutError",
    "MockProvider",
    "NarrativeDocument",
    "ParseError",
    "PromptTemplate",
    "ProviderConfig",
    "RowKey",
    "Scene",
    "ServerConfig",
    "Span",
    "StoryCatalog",
    "SvgDocument",
    "TimelineLayout",
    "ValidationReport",
    "VersionError",
    "View",
    "active_characters",
    "align",
    "annotate_document",
    "build_layout",
    "build_prompt",
    "card_dimensions",
    "create_app",
    "evaluate",
    "flow_cards",
    "layout_to_dict",
    "load_story",
    "parse",
    "parse_response",
    "render_glyph",
    "render_legend",
    "render_report",
    "render_timeline",
    "row_key",
    "scan_catalog",
    "serialize_canonical",
    "table_from_document",
    "validate",
]
