"""Most productive scale size for parallel DEA networks."""
