"""Plain-text extraction from uploaded documents.

No PDF or OOXML parsing library is available in this environment, so both
readers are small purpose-built ones:

- docx: a zip archive; paragraphs come straight out of word/document.xml.
- pdf: decode every Flate/ASCII85/ASCIIHex content stream and walk the text
  operators (Tj/TJ/'/" inside BT..ET). Handles text-based PDFs with classic
  (uncompressed) object layout, which covers digitally authored documents;
  scanned PDFs and exotic encodings are out of scope.

Extraction order is stream/drawing order, which matches reading order for
linearly authored documents.
"""

from __future__ import annotations

import base64
import io
import re
import zipfile
import zlib
from xml.etree import ElementTree

from .errors import EmptyDocumentError, UnreadableFileError

_WORD_NS = "{http://schemas.openxmlformats.org/wordprocessingml/2006/main}"


def normalize_text(text: str) -> str:
    """Collapse whitespace runs to single spaces; keep paragraph breaks as \\n."""
    lines = []
    for raw_line in text.splitlines():
        line = " ".join(raw_line.split())
        if line:
            lines.append(line)
    return "\n".join(lines)


# -- docx ----------------------------------------------------------------------


def extract_docx_text(data: bytes) -> str:
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as archive:
            xml = archive.read("word/document.xml")
        root = ElementTree.fromstring(xml)
    except (zipfile.BadZipFile, KeyError, ElementTree.ParseError, OSError) as exc:
        raise UnreadableFileError(f"not a readable docx file: {exc}") from exc

    paragraphs = []
    for para in root.iter(_WORD_NS + "p"):
        parts = []
        for node in para.iter():
            if node.tag == _WORD_NS + "t":
                parts.append(node.text or "")
            elif node.tag == _WORD_NS + "tab":
                parts.append("\t")
            elif node.tag in (_WORD_NS + "br", _WORD_NS + "cr"):
                parts.append("\n")
        paragraphs.append("".join(parts))
    return "\n".join(paragraphs)


# -- pdf -----------------------------------------------------------------------


def extract_pdf_text(data: bytes) -> str:
    if not data.startswith(b"%PDF"):
        raise UnreadableFileError("missing %PDF header")

    lines: list[str] = []
    found_stream = False
    for content in _iter_decoded_streams(data):
        if b"BT" not in content:
            continue
        found_stream = True
        lines.extend(_text_lines(content))
    if not found_stream and b"stream" in data:
        # Streams exist but none decoded to text operators.
        raise UnreadableFileError("no decodable text content streams")
    return "\n".join(lines)


def _iter_decoded_streams(data: bytes):
    pos = 0
    while True:
        start = data.find(b"stream", pos)
        if start == -1:
            return
        body_start = start + len(b"stream")
        if data[body_start:body_start + 2] == b"\r\n":
            body_start += 2
        elif data[body_start:body_start + 1] == b"\n":
            body_start += 1
        head = _enclosing_dict(data, start)
        declared = re.search(rb"/Length\s+(\d+)(?![\s\d]*R)", head)
        if declared:
            end = body_start + int(declared.group(1))
            if not data[end:end + 11].lstrip(b"\r\n").startswith(b"endstream"):
                end = data.find(b"endstream", body_start)  # untrustworthy Length
        else:
            end = data.find(b"endstream", body_start)
        if end == -1:
            return
        decoded = _decode_stream(head, data[body_start:end])
        if decoded is not None:
            yield decoded
        after = data.find(b"endstream", end)
        pos = (after if after != -1 else end) + len(b"endstream")


def _enclosing_dict(data: bytes, stream_pos: int) -> bytes:
    close = data.rfind(b">>", 0, stream_pos)
    if close == -1:
        return b""
    depth = 1
    cursor = close
    while depth:
        open_pos = data.rfind(b"<<", 0, cursor)
        if open_pos == -1:
            return b""
        inner_close = data.rfind(b">>", open_pos + 2, cursor)
        if inner_close != -1:
            depth += 1
            cursor = inner_close
        else:
            depth -= 1
            cursor = open_pos
    return data[cursor:close + 2]


def _decode_stream(head: bytes, raw: bytes) -> bytes | None:
    filters = re.findall(rb"/(\w+Decode)", head)
    out = raw
    for name in filters:
        try:
            if name == b"ASCII85Decode":
                chunk = out.strip()
                if not chunk.endswith(b"~>"):
                    chunk += b"~>"
                out = base64.a85decode(chunk, adobe=True)
            elif name == b"FlateDecode":
                # decompressobj tolerates trailing file-syntax bytes (the EOL
                # before "endstream"); never strip here, decoded payloads are
                # binary and may legitimately end in 0x0a/0x0d.
                decomp = zlib.decompressobj()
                out = decomp.decompress(out) + decomp.flush()
            elif name == b"ASCIIHexDecode":
                hexed = re.sub(rb"[^0-9A-Fa-f]", b"", out.split(b">")[0])
                if len(hexed) % 2:
                    hexed += b"0"
                out = bytes.fromhex(hexed.decode("ascii"))
            else:
                return None  # image/font filter, not text
        except (ValueError, zlib.error):
            return None
    return out


def _text_lines(content: bytes) -> list[str]:
    """Walk text operators; each visual line becomes one output line."""
    lines: list[str] = []
    current: list[str] = []
    operands: list = []

    def newline() -> None:
        text = "".join(current)
        if text.strip():
            lines.append(text)
        current.clear()

    for token in _tokenize(content):
        kind, value = token
        if kind in ("str", "num", "name", "arr"):
            operands.append(token)
            continue
        op = value
        if op in ("Tj", "TJ"):
            current.append(_operand_text(operands))
        elif op in ("'", '"'):
            newline()
            current.append(_operand_text(operands))
        elif op == "T*":
            newline()
        elif op in ("Td", "TD"):
            dy = _last_number(operands)
            if dy is None or abs(dy) > 1e-4:
                newline()
        elif op in ("BT", "ET"):
            newline()
        operands.clear()
    newline()
    return lines


def _operand_text(operands: list) -> str:
    for kind, value in reversed(operands):
        if kind in ("str", "arr"):
            return value
    return ""


def _last_number(operands: list):
    numbers = [value for kind, value in operands if kind == "num"]
    return numbers[-1] if numbers else None


def _tokenize(content: bytes):
    i, n = 0, len(content)
    while i < n:
        c = content[i:i + 1]
        if c.isspace():
            i += 1
        elif c == b"(":
            text, i = _literal_string(content, i)
            yield ("str", text)
        elif c == b"<" and content[i + 1:i + 2] != b"<":
            end = content.find(b">", i)
            if end == -1:
                return
            hexed = re.sub(rb"[^0-9A-Fa-f]", b"", content[i + 1:end])
            if len(hexed) % 2:
                hexed += b"0"
            yield ("str", bytes.fromhex(hexed.decode("ascii")).decode("cp1252", "replace"))
            i = end + 1
        elif c == b"[":
            parts, i = _array(content, i)
            yield ("arr", parts)
        elif c == b"<":  # dictionary <<
            i += 2
        elif c == b">":
            i += 2 if content[i:i + 2] == b">>" else 1
        elif c == b"/":
            m = re.match(rb"/[^\s()<>\[\]/%]*", content[i:])
            yield ("name", m.group(0).decode("latin-1"))
            i += m.end()
        elif c == b"%":
            eol = content.find(b"\n", i)
            i = n if eol == -1 else eol + 1
        else:
            m = re.match(rb"[-+.0-9]+", content[i:])
            if m:
                try:
                    yield ("num", float(m.group(0)))
                except ValueError:
                    pass
                i += m.end()
                continue
            m = re.match(rb"[A-Za-z'\"*]+", content[i:])
            if m:
                yield ("op", m.group(0).decode("latin-1"))
                i += m.end()
            else:
                i += 1


def _array(content: bytes, start: int) -> tuple[str, int]:
    """Concatenate the strings of a [...] TJ array; kerning numbers ignored."""
    parts: list[str] = []
    i = start + 1
    while i < len(content):
        c = content[i:i + 1]
        if c == b"]":
            return "".join(parts), i + 1
        if c == b"(":
            text, i = _literal_string(content, i)
            parts.append(text)
        elif c == b"<":
            end = content.find(b">", i)
            if end == -1:
                break
            hexed = re.sub(rb"[^0-9A-Fa-f]", b"", content[i + 1:end])
            if len(hexed) % 2:
                hexed += b"0"
            parts.append(bytes.fromhex(hexed.decode("ascii")).decode("cp1252", "replace"))
            i = end + 1
        else:
            i += 1
    return "".join(parts), i


_ESCAPES = {
    b"n": b"\n", b"r": b"\r", b"t": b"\t", b"b": b"\b", b"f": b"\f",
    b"(": b"(", b")": b")", b"\\": b"\\",
}


def _literal_string(content: bytes, start: int) -> tuple[str, int]:
    out = bytearray()
    depth = 1
    i = start + 1
    while i < len(content) and depth:
        c = content[i:i + 1]
        if c == b"\\":
            nxt = content[i + 1:i + 2]
            if nxt in _ESCAPES:
                out += _ESCAPES[nxt]
                i += 2
            elif nxt.isdigit():
                m = re.match(rb"[0-7]{1,3}", content[i + 1:])
                out.append(int(m.group(0), 8) & 0xFF)
                i += 1 + m.end()
            elif nxt in (b"\n", b"\r"):
                i += 2  # line continuation
            else:
                out += nxt
                i += 2
        elif c == b"(":
            depth += 1
            out += c
            i += 1
        elif c == b")":
            depth -= 1
            if depth:
                out += c
            i += 1
        else:
            out += c
            i += 1
    return out.decode("cp1252", "replace"), i


def require_text(text: str) -> str:
    normalized = normalize_text(text)
    if not normalized:
        raise EmptyDocumentError("no extractable text in document")
    return normalized
