"""
Deterministic artifact writers.

CSV: header row always, floats with 17 significant digits, "\n" newlines,
UTF-8. JSON: sorted keys, two-space indent, trailing newline, floats with the
same 17 digits; payloads that have a published schema are validated before
they are written.
"""

import csv
import json
import logging
import math
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import jsonschema
import numpy as np

logger = logging.getLogger(__name__)

SCHEMAS = ('acceptance', 'droplet', 'error', 'phase', 'polynomial', 'spectral')


def format_number(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        return format(value, '.17g')
    return str(value)


def _json_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"non-finite float {value!r} in JSON payload")
    text = format_number(value)
    # keep the value a float when read back
    return text if any(ch in text for ch in '.en') else text + '.0'


class FixedDigitsEncoder(json.JSONEncoder):
    """JSON encoder writing floats with the CSV formatter (17 significant digits)"""

    def iterencode(self, o, _one_shot=False):
        indent = self.indent
        if indent is not None and not isinstance(indent, str):
            indent = ' ' * indent
        quote = json.encoder.encode_basestring_ascii if self.ensure_ascii else json.encoder.encode_basestring
        return json.encoder._make_iterencode(
            {} if self.check_circular else None, self.default, quote, indent, _json_float,
            self.key_separator, self.item_separator, self.sort_keys, self.skipkeys, _one_shot,
        )(o, 0)


def to_plain(value: Any) -> Any:
    """JSON-ready copy: complex as [re, im], Fraction as string, non-finite floats as null"""
    if isinstance(value, Mapping):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(columns)
        count = 0
        for row in rows:
            writer.writerow([format_number(v) for v in row])
            count += 1
    logger.info(f"💾 wrote {path} ({count} rows)")
    return path


def write_records(path: Path, records: List[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> Path:
    """CSV from dict rows; column order from ``columns`` or the first record"""
    columns = list(columns or (records[0].keys() if records else []))
    return write_csv(path, columns, ([r[c] for c in columns] for r in records))


def load_schema(name: str) -> dict:
    text = resources.files('motherbody').joinpath('schemas', f'{name}.schema.json').read_text(encoding='utf-8')
    return json.loads(text)


def validate_payload(payload: Any, schema: str) -> None:
    """
    Raises:
        jsonschema.ValidationError
    """
    jsonschema.validate(instance=payload, schema=load_schema(schema))


def dumps(payload: Any) -> str:
    return json.dumps(
        to_plain(payload), cls=FixedDigitsEncoder, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False,
    ) + '\n'


def write_json(path: Path, payload: Any, schema: Optional[str] = None) -> Path:
    plain = to_plain(payload)
    if schema:
        validate_payload(plain, schema)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as fh:
        fh.write(dumps(plain))
    logger.info(f"💾 wrote {path}")
    return path
