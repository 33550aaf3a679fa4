"""spreaderkit: behavior-based labeling and two-stage classification of
misinformation spreaders from follower-graph embeddings."""

__version__ = "0.1.0"
