"""Fisher information, estimation and state optimization."""
