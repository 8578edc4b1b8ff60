"""Spatial poverty analysis: autocorrelation, regionalization and regional income models."""
from . import bayes, classify, esda, geometry, gwr, ingest, pca, regionalize, synth, weights

__version__ = "0.1.0"

__all__ = ["bayes", "classify", "esda", "geometry", "gwr", "ingest", "pca", "regionalize", "synth", "weights"]
