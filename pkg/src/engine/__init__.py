# Numeric engine: data model, bounds, heuristics, oracle, simulation
# Created: 2026-10-18
