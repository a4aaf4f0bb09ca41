# src/variant_manifest.py
import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import yaml

from errors import ParamsError

logger = logging.getLogger(__name__)


@dataclass
class VariantRecord:
    """One generated variant: its parameters, counters and files (relative to the manifest)."""
    preset: str
    seed: int
    netlist: str
    bitstream: str
    params: Dict[str, Any] = field(default_factory=dict)
    stats: Dict[str, Any] = field(default_factory=dict)

    @property
    def label(self) -> str:
        return f"{self.preset}-s{self.seed}"


class VariantManifest:
    """
    Manages the manifest.yaml written next to a set of generated variants.
    """

    MANIFEST_FILENAME = "manifest.yaml"

    def __init__(self, out_dir: str, source: str = ""):
        self.out_dir = out_dir
        self.source = source
        self.variants: List[VariantRecord] = []
        self.manifest_path = os.path.join(out_dir, self.MANIFEST_FILENAME)

    def add(self, record: VariantRecord) -> None:
        self.variants.append(record)

    def resolve(self, relative: str) -> str:
        return os.path.join(self.out_dir, relative)

    def save(self) -> None:
        """Writes the manifest; variants are ordered by preset, then seed."""
        data = {
            'source': self.source,
            'variants': [asdict(v) for v in sorted(self.variants, key=lambda v: (v.preset, v.seed))],
        }
        os.makedirs(self.out_dir, exist_ok=True)
        with open(self.manifest_path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(data, f, sort_keys=False)
        logger.info("manifest written path=%s variants=%d", self.manifest_path, len(self.variants))

    @classmethod
    def load(cls, path: str) -> 'VariantManifest':
        """Loads a manifest file (or the manifest inside a directory)."""
        if os.path.isdir(path):
            path = os.path.join(path, cls.MANIFEST_FILENAME)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ParamsError(f"cannot read manifest {path}: {e}") from None

        manifest = cls(os.path.dirname(os.path.abspath(path)), data.get('source', ''))
        for entry in data.get('variants', []):
            try:
                manifest.add(VariantRecord(**entry))
            except TypeError as e:
                raise ParamsError(f"{path}: bad variant entry: {e}") from None
        return manifest

    def find(self, label: str) -> Optional[VariantRecord]:
        return next((v for v in self.variants if v.label == label), None)
