from .mcp_server import (
    analyze_quasi_median,
    coset_intersection_fragment,
    generate_corpus,
    hyperplanes_initial_prompt,
    raag_compare,
    verify_graph_product,
    verify_quasi_median,
)

__all__ = [
    "raag_compare",
    "analyze_quasi_median",
    "verify_quasi_median",
    "verify_graph_product",
    "coset_intersection_fragment",
    "generate_corpus",
    "hyperplanes_initial_prompt",
]
