"""Synthetic heavy-hex preset chips and ready-made multi-chip systems."""

from __future__ import annotations

from .errors import ValidationError
from .system import Chip, ModularSystem, system_from_dict

CHIP_KINDS = ("Almaden20", "Guadalupe16", "Auckland27", "Washington127")
_CHIP_SHAPES = {
    "almaden20": (20, 10),
    "guadalupe16": (16, 8),
    "auckland27": (27, 9),
    "washington127": (127, 12),
}


def heavy_hex_edges(n: int, row_len: int) -> list[tuple[int, int]]:
    """Degree-<=3 hexagonal-tiling style lattice truncated to ``n`` nodes.

    Qubits snake across rows of ``row_len``: row r holds indices
    r*row_len .. r*row_len+row_len-1, reversed on odd rows so consecutive
    indices stay adjacent. Vertical rungs drop every 5 columns, offset
    between even and odd rows, which keeps every node at degree 3 or less
    and the graph connected for any truncation point.
    """
    if n < 1 or row_len < 5:
        raise ValidationError("heavy-hex generator needs n >= 1 and row_len >= 5")
    edges = [(i, i + 1) for i in range(n - 1)]

    def index_of(row: int, col: int) -> int:
        if row % 2 == 0:
            return row * row_len + col
        return row * row_len + (row_len - 1 - col)

    rows = (n + row_len - 1) // row_len
    for r in range(rows):
        for c in range(row_len):
            if r % 2 == 0 and c % 5 != 0:
                continue
            if r % 2 == 1 and c % 5 != 2:
                continue
            top = index_of(r, c)
            bottom = index_of(r + 1, c)
            if top < n and bottom < n:
                edges.append((top, bottom) if top < bottom else (bottom, top))
    return sorted(set(edges))


def preset_chip(kind: str, chip_id: str | None = None) -> Chip:
    """Build one preset chip with the default calibration profile."""
    key = kind.lower()
    if key not in _CHIP_SHAPES:
        raise ValidationError(f"unknown chip preset '{kind}' (choose from {', '.join(CHIP_KINDS)})")
    n, row_len = _CHIP_SHAPES[key]
    doc = {
        "id": chip_id if chip_id is not None else key,
        "num_qubits": n,
        "edges": [list(e) for e in heavy_hex_edges(n, row_len)],
    }
    return system_from_dict({"chips": [doc], "links": []}).chips[0]


def _path_chip(chip_id: str, n: int) -> dict:
    return {
        "id": chip_id,
        "num_qubits": n,
        "edges": [[i, i + 1] for i in range(n - 1)],
    }


def _chip_doc(kind: str, chip_id: str) -> dict:
    chip = preset_chip(kind, chip_id)
    return {"id": chip.id, "num_qubits": chip.num_qubits, "edges": [list(e) for e in chip.edges]}


def _link(a: tuple[str, int], b: tuple[str, int]) -> dict:
    return {"a": [a[0], a[1]], "b": [b[0], b[1]]}


def _almaden_pair(links: int) -> dict:
    chips = [_chip_doc("almaden20", "c0"), _chip_doc("almaden20", "c1")]
    link_docs = [_link(("c0", 19 - i), ("c1", i)) for i in range(links)]
    return {"chips": chips, "links": link_docs}


def _chain(kinds: list[str]) -> dict:
    chips = [_chip_doc(kind, f"c{i}") for i, kind in enumerate(kinds)]
    links = []
    for i in range(len(kinds) - 1):
        left = chips[i]
        links.append(_link((left["id"], left["num_qubits"] - 1), (chips[i + 1]["id"], 0)))
    return {"chips": chips, "links": links}


def _tiny(num_chips: int, chip_size: int) -> dict:
    chips = [_path_chip(f"c{i}", chip_size) for i in range(num_chips)]
    links = [
        _link((f"c{i}", chip_size - 1), (f"c{i + 1}", 0)) for i in range(num_chips - 1)
    ]
    return {"chips": chips, "links": links}


_SYSTEM_BUILDERS = {
    "almaden2x1link": lambda: _almaden_pair(1),
    "almaden2x2link": lambda: _almaden_pair(2),
    "almaden2x3link": lambda: _almaden_pair(3),
    "almaden2x4link": lambda: _almaden_pair(4),
    "auckland3xchain": lambda: _chain(["auckland27"] * 3),
    "mixed2x2chain": lambda: _chain(["almaden20", "almaden20", "auckland27", "auckland27"]),
    "washington3xchain": lambda: _chain(["washington127"] * 3),
    "washington4xchain": lambda: _chain(["washington127"] * 4),
    "tiny2x5": lambda: _tiny(2, 5),
    "tiny3x4": lambda: _tiny(3, 4),
}

SYSTEM_PRESETS = tuple(sorted(_SYSTEM_BUILDERS))


def preset_system(name: str) -> ModularSystem:
    """Build one of the shipped multi-chip system presets."""
    builder = _SYSTEM_BUILDERS.get(name.lower())
    if builder is None:
        raise ValidationError(
            f"unknown system preset '{name}' (choose from {', '.join(SYSTEM_PRESETS)})"
        )
    doc = builder()
    doc["name"] = name.lower()
    return system_from_dict(doc)
