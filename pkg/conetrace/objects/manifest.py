import json
import logging
import os
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from conetrace import defaults
from conetrace.helper import content_hash, file_hash

log = logging.getLogger(__name__)


def _now():
    return datetime.now(timezone.utc)


class RunManifest(BaseModel):
    """
    Record of one command line run. The id only depends on the command, the input hashes, the
    parameters and the tool version, so identical runs share it; timestamps and output paths are
    kept in the manifest file next to the output.
    """
    manifest_id: str = ''
    command: str
    input_hashes: Dict[str, str] = {}
    parameters: Dict[str, Any] = {}
    tool_version: str

    created: datetime = Field(default_factory=_now)
    start_time: Optional[datetime] = None
    finish_time: Optional[datetime] = None
    outputs: List[str] = []

    def model_post_init(self, __context: Any) -> None:
        self.manifest_id = content_hash({'command': self.command,
                                         'input_hashes': self.input_hashes,
                                         'parameters': self.parameters,
                                         'tool_version': self.tool_version})

    def props(self):
        """Identifying part of the manifest."""
        return {
            'manifest_id': self.manifest_id,
            'command': self.command,
            'tool_version': self.tool_version,
        }

    @classmethod
    def for_files(cls, command: str, files: Dict[str, str], parameters: dict, tool_version: str) -> 'RunManifest':
        """Create a manifest hashing the content of the named input files."""
        hashes = {name: file_hash(path) for name, path in files.items() if path is not None}
        return cls(command=command, input_hashes=hashes, parameters=parameters, tool_version=tool_version)

    def start(self):
        self.start_time = _now()

    def add(self, *paths):
        """
        Register output files of this run.
        """
        for path in paths:
            if not isinstance(path, str):
                raise TypeError(f"add() expects output paths, got {type(path)}")
            self.outputs.append(path)

    def finish(self):
        self.finish_time = _now()

    def manifest_path(self, output_path: str) -> str:
        return f"{output_path}.manifest.json"

    def write_output(self, output_path: str, result) -> str:
        """
        Write ``{"manifest_id", "result"}`` to `output_path` with sorted keys and the manifest next to it.
        """
        text = json.dumps({'manifest_id': self.manifest_id, 'result': result},
                          sort_keys=True, indent=defaults.JSON_INDENT) + '\n'
        directory = os.path.dirname(output_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(output_path, 'wt') as f:
            f.write(text)
        self.add(output_path)
        log.debug(f"Wrote {output_path} (manifest {self.manifest_id[:12]})")
        return output_path

    def write(self, output_path: str) -> str:
        path = self.manifest_path(output_path)
        with open(path, 'wt') as f:
            f.write(self.model_dump_json(indent=defaults.JSON_INDENT) + '\n')
        return path
