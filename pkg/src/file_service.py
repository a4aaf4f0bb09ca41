import logging
import os
from typing import List

from bitstream import Bitstream, parse_bitstream, serialize_bitstream
from errors import NetlistSyntaxError
from netlist import Hypergraph
from netlist_formats import parse_netlist, serialize_netlist

logger = logging.getLogger(__name__)

NETLIST_EXTENSIONS = {'.blif': 'blif', '.json': 'json'}
PACKED_EXTENSIONS = ('.bitsbin',)


class FileService:
    """Reads and writes netlists and bitstreams, picking formats from file extensions."""

    def normalize_path(self, path: str) -> str:
        if not path: return ""
        return os.path.normpath(path)

    def netlist_format(self, path: str, fmt: str = "") -> str:
        if fmt:
            return fmt
        return NETLIST_EXTENSIONS.get(os.path.splitext(path)[1].lower(), 'blif')

    def bitstream_format(self, path: str, packed: bool = False) -> str:
        return 'packed' if packed or path.lower().endswith(PACKED_EXTENSIONS) else 'text'

    def read_netlist(self, path: str, fmt: str = "") -> Hypergraph:
        try:
            with open(path, 'r', encoding='utf-8') as f:
                text = f.read()
        except UnicodeDecodeError as e:
            raise NetlistSyntaxError(f"{path}: not UTF-8 text (byte {e.start})") from None
        g = parse_netlist(text, self.netlist_format(path, fmt))
        logger.debug("read netlist path=%s vertices=%d", path, len(g))
        return g

    def write_netlist(self, path: str, g: Hypergraph, fmt: str = "") -> None:
        self._ensure_parent(path)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(serialize_netlist(g, self.netlist_format(path, fmt)))

    def read_bitstream(self, path: str) -> Bitstream:
        with open(path, 'rb') as f:
            return parse_bitstream(f.read())

    def write_bitstream(self, path: str, b: Bitstream, packed: bool = False) -> None:
        self._ensure_parent(path)
        with open(path, 'wb') as f:
            f.write(serialize_bitstream(b, self.bitstream_format(path, packed)))

    def list_netlists(self, folder_path: str) -> List[str]:
        """Netlist files directly inside ``folder_path``, sorted by name."""
        found = []
        try:
            for file_name in os.listdir(folder_path):
                full_path = os.path.join(folder_path, file_name)
                if os.path.isfile(full_path) and os.path.splitext(file_name)[1].lower() in NETLIST_EXTENSIONS:
                    found.append(full_path)
        except OSError:
            pass
        return sorted(found)

    def _ensure_parent(self, path: str) -> None:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
