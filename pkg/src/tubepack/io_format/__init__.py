"""Reading and writing instances and solutions, and drawing solutions."""

from .instance import (DuplicateId, NonPositiveDimension, ParseError, fmt_number, format_instance,
                       parse_instance)
from .render import (NotABoxHolder, NotATubeHolder, box_manifest, find_holder, render_longitudinal,
                     render_transversal)
from .solution import SCHEMA_VERSION, SchemaError, instance_digest, read_solution, write_solution

__all__ = [
    "DuplicateId", "NonPositiveDimension", "ParseError", "fmt_number", "format_instance",
    "parse_instance", "NotABoxHolder", "NotATubeHolder", "box_manifest", "find_holder",
    "render_longitudinal", "render_transversal", "SCHEMA_VERSION", "SchemaError",
    "instance_digest", "read_solution", "write_solution",
]
