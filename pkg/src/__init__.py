# Counterfactual unit selection: benefit bounds, heuristic audits, verification
# Created: 2026-10-18
