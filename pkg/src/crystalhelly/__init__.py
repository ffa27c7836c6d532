"""Exact tools for Helly numbers of crystals and cut-and-project sets."""

from .emptyhull import (
    EmptyPolytopeCertificate,
    FacetCertificate,
    Status,
    is_empty_hull,
    largest_empty_polygon_bruteforce,
    largest_empty_polygon_dp,
    verify_facet_certificate,
)
from .geom import Box, HPolytope, Membership, VPolytope
from .helly import (
    BoundReport,
    FractionalReport,
    find_parallelogram,
    fractional_experiment,
    helly_direct_check,
    parallel_segments_witness,
    product_certificate,
    upper_bound,
)
from .numeric import CertFloat, QuadScalar
from .pointsets import Crystal, Lattice, Patch, Scheme, build_slab_scheme, points_in_box, preset

__all__ = [
    "BoundReport", "Box", "CertFloat", "Crystal", "EmptyPolytopeCertificate", "FacetCertificate",
    "FractionalReport", "HPolytope", "Lattice", "Membership", "Patch", "QuadScalar", "Scheme",
    "Status", "VPolytope", "build_slab_scheme", "find_parallelogram", "fractional_experiment",
    "helly_direct_check", "is_empty_hull", "largest_empty_polygon_bruteforce",
    "largest_empty_polygon_dp", "parallel_segments_witness", "points_in_box", "preset",
    "product_certificate", "upper_bound", "verify_facet_certificate",
]
