# Utilities: logging, report rendering and saving, study file I/O
# Created: 2026-10-18
