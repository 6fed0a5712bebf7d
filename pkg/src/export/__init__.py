from src.export.charts import CHART_SCHEMA, LoadedChart, chart_payload, export_chart, load_chart, potential_fingerprint
from src.export.contours import contour_levels, contours_svg, render_contours
from src.export.mesh import SURFACE_SCHEMA, export_surface, obj_text, read_obj
from src.export.tables import (
    FIELD_SCHEMA,
    REPORT_SCHEMA,
    convergence_frame,
    export_convergence,
    export_field,
    export_report,
    export_solution_csv,
    load_field,
    read_convergence,
    read_solution_csv,
)
from src.export.writer import atomic_write, format_number, read_json, to_json_text, write_json

__all__ = [
    "CHART_SCHEMA",
    "FIELD_SCHEMA",
    "LoadedChart",
    "REPORT_SCHEMA",
    "SURFACE_SCHEMA",
    "atomic_write",
    "chart_payload",
    "contour_levels",
    "contours_svg",
    "convergence_frame",
    "export_chart",
    "export_convergence",
    "export_field",
    "export_report",
    "export_solution_csv",
    "export_surface",
    "format_number",
    "load_chart",
    "load_field",
    "obj_text",
    "potential_fingerprint",
    "read_convergence",
    "read_json",
    "read_obj",
    "read_solution_csv",
    "render_contours",
    "to_json_text",
    "write_json",
]
