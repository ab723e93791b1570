"""Scenario files and CSV output.

A scenario file is line oriented::

    # comment
    [terminals]
    c_ha = 1e-12      # farads
    c_hb = 5e-13

Values are plain decimal or scientific numbers in SI base units; no unit
suffixes.  Complex quantities are split into ``_re``/``_im`` key pairs.
Parsing stops at the first error.
"""

from __future__ import annotations

import csv
import io
import math
import numbers
import re
from dataclasses import dataclass, field

from .coupling import ScenarioParameters, default_scenario
from .errors import ArityMismatch, ParseError
from .geometry import CoilBands, HeadModel, head_capacitances

# section -> (required keys, optional keys)
SCHEMA: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "source": (("f_hz", "v_e_re", "v_e_im"), ()),
    "body": (("c_eh", "c_hg", "c_hn", "c_ng"), ()),
    "coil": (("r_coil_ohm", "l_coil", "c_t"), ()),
    "terminals": (("c_ha", "c_hb", "c_ag", "c_bg"), ()),
    "matching": (("c_m", "z_l_re", "z_l_im"), ()),
    "geometry": (
        ("r_head", "l_cyl", "r_coil_m", "band_a_start", "band_a_end", "band_b_start", "band_b_end"),
        ("eps_r", "displacement"),
    ),
    "suppression": ((), ("c_blanket",)),
}
SECTION_ORDER = tuple(SCHEMA)
REQUIRED_SECTIONS = ("source", "body", "coil", "terminals", "matching")
SIGNED_KEYS = {
    "v_e_re", "v_e_im", "z_l_re", "z_l_im",
    "band_a_start", "band_a_end", "band_b_start", "band_b_end", "displacement",
}

_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_KEY = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass
class ScenarioDocument:
    sections: dict[str, dict[str, float]]
    source_text: str = field(default="", compare=False, repr=False)

    def get(self, path: str) -> float:
        section, key = split_path(path)
        return self.sections[section][key]

    def with_value(self, path: str, value: float) -> "ScenarioDocument":
        section, key = split_path(path)
        sections = {s: dict(kv) for s, kv in self.sections.items()}
        sections[section][key] = float(value)
        return ScenarioDocument(sections, self.source_text)


def split_path(path: str) -> tuple[str, str]:
    section, _, key = path.partition(".")
    if section not in SCHEMA or key not in SCHEMA[section][0] + SCHEMA[section][1]:
        raise KeyError(f"unknown scenario parameter {path!r}")
    return section, key


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def parse_scenario(text: str) -> ScenarioDocument:
    sections: dict[str, dict[str, float]] = {}
    header_line: dict[str, int] = {}
    current = None
    lines = text.splitlines()

    for lineno, raw in enumerate(lines, start=1):
        body = _strip_comment(raw)
        stripped = body.strip()
        if not stripped:
            continue
        col = len(body) - len(body.lstrip()) + 1

        if stripped.startswith("["):
            name = stripped[1:-1].strip() if stripped.endswith("]") else None
            if name not in SCHEMA:
                raise ParseError(lineno, col, "UnknownSection", f"unknown section {stripped!r}")
            current = name
            sections.setdefault(name, {})
            header_line.setdefault(name, lineno)
            continue

        if current is None:
            raise ParseError(lineno, col, "UnknownSection", "assignment before any [section] header")

        key_part, eq, value_part = body.partition("=")
        key = key_part.strip()
        if not eq:
            raise ParseError(lineno, col, "BadNumber", f"expected 'key = value', got {stripped!r}")
        if not _KEY.fullmatch(key):
            raise ParseError(lineno, col, "UnknownKey", f"malformed key {key!r}")
        required, optional = SCHEMA[current]
        if key not in required + optional:
            raise ParseError(lineno, col, "UnknownKey", f"unknown key {key!r} in [{current}]")
        if key in sections[current]:
            raise ParseError(lineno, col, "DuplicateKey", f"duplicate key {key!r} in [{current}]")

        value_text = value_part.strip()
        vcol = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        if not _NUMBER.fullmatch(value_text):
            raise ParseError(lineno, vcol, "BadNumber", f"bad number {value_text!r} for {key}")
        value = float(value_text)
        if not math.isfinite(value):
            raise ParseError(lineno, vcol, "BadNumber", f"value {value_text!r} for {key} is not finite")
        if value < 0 and key not in SIGNED_KEYS:
            raise ParseError(lineno, vcol, "NegativeValue", f"{key} must be non-negative, got {value_text}")
        sections[current][key] = value

    end_line = max(len(lines), 1)
    for name in REQUIRED_SECTIONS:
        if name not in sections:
            raise ParseError(end_line, 1, "MissingSection", f"missing required section [{name}]")
    for name in SECTION_ORDER:
        if name not in sections or (not sections[name] and name not in REQUIRED_SECTIONS):
            continue
        for key in SCHEMA[name][0]:
            if key not in sections[name]:
                raise ParseError(header_line[name], 1, "MissingKey", f"[{name}] is missing {key!r}")

    # empty optional sections carry no information; dropping them keeps round trips exact
    ordered = {n: sections[n] for n in SECTION_ORDER if sections.get(n)}
    return ScenarioDocument(ordered, text)


def format_value(value: float) -> str:
    return "%.17g" % value


def serialize_scenario(doc: ScenarioDocument) -> str:
    out = []
    for name in SECTION_ORDER:
        values = doc.sections.get(name)
        if not values:
            continue
        if out:
            out.append("")
        out.append(f"[{name}]")
        out.extend(f"{key} = {format_value(values[key])}" for key in sorted(values))
    return "\n".join(out) + "\n"


def to_geometry(doc: ScenarioDocument):
    """``(HeadModel, CoilBands, displacement)`` from the geometry section, or None."""
    g = doc.sections.get("geometry")
    if not g:
        return None
    head = HeadModel(g["r_head"], g["l_cyl"], g.get("eps_r", 1.0))
    coil = CoilBands(
        g["r_coil_m"],
        (g["band_a_start"], g["band_a_end"]),
        (g["band_b_start"], g["band_b_end"]),
    )
    return head, coil, g.get("displacement", 0.0)


def to_parameters(
    doc: ScenarioDocument, displacement: float | None = None, slices: int = 256
) -> ScenarioParameters:
    """Build model parameters; a geometry section overrides c_ha and c_hb."""
    s = doc.sections
    c_ha, c_hb = s["terminals"]["c_ha"], s["terminals"]["c_hb"]
    geom = to_geometry(doc)
    if geom is not None:
        head, coil, x = geom
        c_ha, c_hb = head_capacitances(head, coil, x if displacement is None else displacement, slices)
    return ScenarioParameters(
        frequency=s["source"]["f_hz"],
        v_e=complex(s["source"]["v_e_re"], s["source"]["v_e_im"]),
        c_eh=s["body"]["c_eh"],
        c_hg_direct=s["body"]["c_hg"],
        c_hn=s["body"]["c_hn"],
        c_ng=s["body"]["c_ng"],
        c_ha=c_ha,
        c_hb=c_hb,
        c_ag=s["terminals"]["c_ag"],
        c_bg=s["terminals"]["c_bg"],
        r_coil=s["coil"]["r_coil_ohm"],
        l_coil=s["coil"]["l_coil"],
        c_t=s["coil"]["c_t"],
        c_m=s["matching"]["c_m"],
        z_l=complex(s["matching"]["z_l_re"], s["matching"]["z_l_im"]),
        c_blanket=s.get("suppression", {}).get("c_blanket", 0.0),
    )


def from_parameters(
    p: ScenarioParameters,
    head: HeadModel | None = None,
    coil: CoilBands | None = None,
    displacement: float = 0.0,
) -> ScenarioDocument:
    sections = {
        "source": {"f_hz": p.frequency, "v_e_re": p.v_e.real, "v_e_im": p.v_e.imag},
        "body": {"c_eh": p.c_eh, "c_hg": p.c_hg_direct, "c_hn": p.c_hn, "c_ng": p.c_ng},
        "coil": {"r_coil_ohm": p.r_coil, "l_coil": p.l_coil, "c_t": p.c_t},
        "terminals": {"c_ha": p.c_ha, "c_hb": p.c_hb, "c_ag": p.c_ag, "c_bg": p.c_bg},
        "matching": {"c_m": p.c_m, "z_l_re": p.z_l.real, "z_l_im": p.z_l.imag},
    }
    if head is not None and coil is not None:
        sections["geometry"] = {
            "r_head": head.r_head,
            "l_cyl": head.l_cyl,
            "r_coil_m": coil.r_coil,
            "band_a_start": coil.band_a[0],
            "band_a_end": coil.band_a[1],
            "band_b_start": coil.band_b[0],
            "band_b_end": coil.band_b[1],
            "eps_r": head.eps_r,
            "displacement": displacement,
        }
    if p.c_blanket:
        sections["suppression"] = {"c_blanket": p.c_blanket}
    return ScenarioDocument(sections)


def default_document() -> ScenarioDocument:
    return from_parameters(default_scenario())


def _is_complex(value) -> bool:
    return isinstance(value, numbers.Complex) and not isinstance(value, numbers.Real)


def _render(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, numbers.Integral):
        return str(int(value))
    return "%#.9g" % value


def write_csv(headers, rows) -> str:
    """CSV text; complex columns become adjacent ``<name>_re,<name>_im`` columns."""
    headers = list(headers)
    rows = [tuple(r) for r in rows]
    for k, row in enumerate(rows):
        if len(row) != len(headers):
            raise ArityMismatch(f"row {k} has {len(row)} values for {len(headers)} headers")
    is_complex = [any(_is_complex(row[c]) for row in rows) for c in range(len(headers))]
    out_headers = []
    for name, cplx in zip(headers, is_complex):
        out_headers.extend((f"{name}_re", f"{name}_im") if cplx else (name,))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(out_headers)
    for row in rows:
        cells = []
        for value, cplx in zip(row, is_complex):
            if cplx:
                z = complex(value)
                cells.extend((_render(z.real), _render(z.imag)))
            else:
                cells.append(_render(value))
        writer.writerow(cells)
    return buf.getvalue()
