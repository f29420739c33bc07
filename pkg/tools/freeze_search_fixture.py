"""Regenerate the golden record of the chair forbidden-patch search.

Run from the repository root:  python3 tools/freeze_search_fixture.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import acceptance_runs  # noqa: E402
from tilinglab.cli import dumps  # noqa: E402


def main():
    doc, misses, secs = acceptance_runs.search_record()
    if misses:
        raise SystemExit(f"{misses} searches came back empty; not writing a golden file")
    acceptance_runs.SEARCH_GOLDEN.write_text(dumps(doc))
    print(f"wrote {acceptance_runs.SEARCH_GOLDEN} ({doc['entries']} entries, {secs:.1f}s)")


if __name__ == "__main__":
    main()
