import json
import dataclasses
from enum import Enum
import numpy as np
from pydantic import BaseModel


def success_report(data):

    return {
        "status": "success",
        "data": to_jsonable(data)
    }


def error_report(message, exit_code):

    status = "fail" if exit_code in (2, 3) else "error"

    report_data_key = "details" if isinstance(message, dict) or isinstance(message, list) else "message"

    return {
        "status": status,
        "data": {report_data_key: to_jsonable(message)}
    }


def to_jsonable(obj):
    """Convert numpy values, enums, dataclasses and pydantic models to plain JSON types."""
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def dump_json(obj, path):
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(to_jsonable(obj), fh, indent=2)
        fh.write('\n')
