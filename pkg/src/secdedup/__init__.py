"""secdedup: deduplication engine and annotation workbench for security findings.

Pipeline: ingest heterogeneous scanner reports -> build finding-string
corpora -> score pairwise semantic similarity -> threshold + transitive
clustering -> evaluate against human ground truth. The annotation service
(secdedup.service) is how that ground truth gets built.
"""

__version__ = "0.1.0"
