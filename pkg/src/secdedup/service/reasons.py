"""Built-in review reason tags.

The nine built-ins cover the recurring causes of wrong duplicate predictions
surfaced during expert review; they are immutable. Custom reasons registered
at runtime get IDs from 100 up.
"""

from __future__ import annotations

BUILTIN_REASONS: dict[int, str] = {
    1: "Only identifiable with knowledge of the application context",
    2: "Tools phrase the same issue differently",
    3: "Tool provides no description; only the title carries any text",
    4: "Verbosity imbalance between descriptions drowns out the relevant features",
    5: "Needs additional review; cause of the wrong prediction unclear",
    6: "Finding string was constructed suboptimally for this finding",
    7: "Finding text over-specifies the exact location of occurrence",
    8: "Annotation error in the ground truth; the suggested cluster is correct",
    9: "Related but distinct root causes; borderline rather than a hard miss",
}

CUSTOM_REASON_BASE = 100
