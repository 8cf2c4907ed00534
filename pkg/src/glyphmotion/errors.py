"""Error type shared across the package.

Every raised error carries a stable machine-readable ``code`` (e.g.
"workspace-overflow", "incomplete-font") next to a human-readable message,
so callers and the CLI can branch on failures without parsing text.
"""

from __future__ import annotations


class GlyphMotionError(Exception):
    """Domain error with a stable code string."""

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)
