"""Block-level feature extractors: LBP, LPQ and SURF."""
from .histogram import HistogramFeature
from .lbp import lbp_histogram
from .lpq import lpq_histogram
from .surf import SurfKeypoint, aggregate_surf, surf_keypoints

__all__ = ["HistogramFeature", "lbp_histogram", "lpq_histogram", "SurfKeypoint",
           "aggregate_surf", "surf_keypoints"]
