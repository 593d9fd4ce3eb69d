"""
Reports printed by every command. Rendering is deterministic: keys sorted,
two-space indent, so identical inputs and seed give byte-identical output.
"""
import csv
import hashlib
import io
import json
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, Field


class Report(BaseModel):
    command: str
    input_digest: str
    sections: Dict[str, Any] = Field(default_factory=dict)
    witnesses: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_params(params: Dict[str, Any]) -> str:
    """Digest of the canonical JSON of a parameter set, for commands without an input file."""
    canonical = json.dumps(params, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return digest_bytes(canonical.encode("utf-8"))


def render_json(report: Report) -> str:
    return json.dumps(report.model_dump(exclude_none=True), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_csv(rows: Sequence[Dict[str, Any]], columns: List[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()
