# 命令行输出: text / json / csv 渲染, 列顺序固定, 同样输入逐字节一致

import csv
import io
import json
import logging
import math
import sys
from typing import Any, Dict, List, Optional, Sequence

from engine.core.exceptions import InputValidationError
from shared.schemas import OutputFormat
from shared.utils import complex_to_dict, format_complex

logger = logging.getLogger(__name__)


def _json_value(value: Any) -> Any:
    if isinstance(value, complex):
        return complex_to_dict(value)
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {key: _json_value(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(item) for item in value]
    return value


def _cell(value: Any) -> str:
    """CSV 与文本单元格; 浮点数用 repr 保证可逆"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, complex):
        return format_complex(value, 17)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_record(record: Dict[str, Any], output_format: OutputFormat) -> str:
    """单条记录 (按字典插入顺序输出)"""
    if output_format == OutputFormat.JSON:
        return json.dumps(_json_value(record), indent=2, ensure_ascii=False) + "\n"
    if output_format == OutputFormat.CSV:
        return render_table([record], list(record.keys()), output_format)
    width = max(len(key) for key in record) if record else 0
    return "".join(f"{key.ljust(width)} : {_cell(value)}\n" for key, value in record.items())


def render_table(
    rows: Sequence[Dict[str, Any]],
    columns: Sequence[str],
    output_format: OutputFormat,
    summary: Optional[Dict[str, Any]] = None,
) -> str:
    """
    表格输出

    csv 只含表头与数据行; json 为 {"rows": [...], **summary}; text 为对齐的列与汇总行
    """
    if output_format == OutputFormat.CSV:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(column)) for column in columns])
        return buffer.getvalue()

    if output_format == OutputFormat.JSON:
        document: Dict[str, Any] = {"rows": [{column: row.get(column) for column in columns} for row in rows]}
        document.update(summary or {})
        return json.dumps(_json_value(document), indent=2, ensure_ascii=False) + "\n"

    cells: List[List[str]] = [[_cell(row.get(column)) for column in columns] for row in rows]
    widths = [max([len(column)] + [len(line[i]) for line in cells]) for i, column in enumerate(columns)]
    lines = ["  ".join(column.ljust(widths[i]) for i, column in enumerate(columns))]
    lines.extend("  ".join(value.ljust(widths[i]) for i, value in enumerate(line)) for line in cells)
    for key, value in (summary or {}).items():
        lines.append(f"{key}: {_cell(value)}")
    return "\n".join(line.rstrip() for line in lines) + "\n"


def emit(text: str, output_path: Optional[str] = None) -> None:
    """
    写到文件或标准输出

    Raises:
        InputValidationError: 输出文件无法打开或写入
    """
    if output_path:
        try:
            with open(output_path, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        except OSError as e:
            raise InputValidationError(f"无法写入输出文件 {output_path}: {e.strerror or e}") from e
        logger.info(f"结果已写入 {output_path}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
