"""dialogforge: evaluate, diagnose and remediate task-oriented dialog bots.

The pipeline has three legs: generate (parse a bot definition into
dialog-act maps, an ontology and simulation goals), simulate (drive
goal-directed user conversations against a bot runtime) and remediate
(aggregate episodes into health reports and actionable suggestions).
"""

__version__ = "0.1.0"
