import io
import zipfile
from pathlib import Path
from xml.sax.saxutils import escape

import pytest
from fastapi.testclient import TestClient

from concept_catalyst import ingest
from concept_catalyst.api import create_app
from concept_catalyst.config import ServiceConfig
from concept_catalyst.llm import ProviderConfig
from concept_catalyst.store import SessionStore

MOCK_SEED = 1234


@pytest.fixture
def store(tmp_path) -> SessionStore:
    return SessionStore(tmp_path / "data")


@pytest.fixture
def mock_cfg() -> ProviderConfig:
    return ProviderConfig(kind="mock", seed=MOCK_SEED, backoff_base_s=0.0)


@pytest.fixture
def approved_session(store):
    """(store, session_id) with a typed, approved summary ready to highlight."""
    state = store.create_session()
    ingest.set_summary_text(
        store,
        state.id,
        "Design a catapult that launches a marshmallow 2 meters using craft sticks.",
    )
    ingest.approve_summary(store, state.id)
    return store, state.id


def service_config(tmp_path: Path, **overrides) -> ServiceConfig:
    cfg = ServiceConfig(
        data_dir=tmp_path / "data",
        provider=ProviderConfig(kind="mock", seed=MOCK_SEED, backoff_base_s=0.0),
    )
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


@pytest.fixture
def client(tmp_path) -> TestClient:
    app = create_app(service_config(tmp_path))
    with TestClient(app) as test_client:
        yield test_client


# -- document fixture builders ---------------------------------------------------

_DOCX_CONTENT_TYPES = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">
  <Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>
  <Default Extension="xml" ContentType="application/xml"/>
  <Override PartName="/word/document.xml" ContentType="application/vnd.openxmlformats-officedocument.wordprocessingml.document.main+xml"/>
</Types>
"""

_DOCX_RELS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">
  <Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="word/document.xml"/>
</Relationships>
"""

_DOCX_DOCUMENT = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<w:document xmlns:w="http://schemas.openxmlformats.org/wordprocessingml/2006/main">
  <w:body>
{paragraphs}
  </w:body>
</w:document>
"""


def make_docx(paragraphs: list[str]) -> bytes:
    """A minimal but structurally valid .docx with the given paragraphs."""
    body = "\n".join(
        f"    <w:p><w:r><w:t xml:space=\"preserve\">{escape(p)}</w:t></w:r></w:p>"
        for p in paragraphs
    )
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
        archive.writestr("[Content_Types].xml", _DOCX_CONTENT_TYPES)
        archive.writestr("_rels/.rels", _DOCX_RELS)
        archive.writestr("word/document.xml", _DOCX_DOCUMENT.format(paragraphs=body))
    return buffer.getvalue()


def make_pdf(lines: list[str]) -> bytes:
    """A single-page text PDF with one drawString per line."""
    from reportlab.lib.pagesizes import letter
    from reportlab.pdfgen import canvas

    buffer = io.BytesIO()
    pdf = canvas.Canvas(buffer, pagesize=letter, invariant=1)
    y = 720
    for line in lines:
        pdf.drawString(72, y, line)
        y -= 24
    pdf.showPage()
    pdf.save()
    return buffer.getvalue()
