"""Frame ingestion.

Maps a directory of pre-extracted frames (``frame_%06d.jpg`` / ``.png``)
onto the 1 FPS timeline and prepares low-resolution image bytes for visual
prompting.  Extracting frames from video containers is out of scope; any
external tool can produce the expected directory, e.g.::

    ffmpeg -i video.mp4 -vf fps=1 frames/frame_%06d.jpg

When similarity scores are precomputed, no frame directory is needed at
all and plans reference bare timeline indices.
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass
from pathlib import Path

from PIL import Image

from framesieve.errors import FormatError, InvalidInputError

FRAME_NAME_RE = re.compile(r"^frame_(\d{6,})\.(jpg|png)$", re.IGNORECASE)

PROMPT_MAX_SIDE = 224


@dataclass(frozen=True)
class FrameEntry:
    index: int
    path: str
    width: int
    height: int


@dataclass(frozen=True)
class FrameManifest:
    """Ordered frame metadata for one video at a declared FPS."""

    entries: tuple[FrameEntry, ...]
    fps: float = 1.0
    video_id: str = ""

    def __post_init__(self) -> None:
        if not self.entries:
            raise InvalidInputError("manifest needs at least one frame")
        if not self.fps > 0:
            raise InvalidInputError("fps must be positive")
        for pos, entry in enumerate(self.entries):
            if entry.index != pos:
                raise InvalidInputError(
                    f"manifest indices must run 0..T-1; entry {pos} has index {entry.index}"
                )
            if entry.width < 1 or entry.height < 1:
                raise InvalidInputError(f"frame {pos} has non-positive dimensions")
        paths = [e.path for e in self.entries]
        if len(set(paths)) != len(paths):
            raise InvalidInputError("manifest paths must be unique")
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)


def build_manifest(directory: str | Path, fps: float = 1.0, video_id: str | None = None) -> FrameManifest:
    """Scan a frame directory into a manifest.

    File numbering may start at any base (0 or 1 are both common) but must
    be contiguous; gaps raise an error listing the missing numbers.  Image
    dimensions come from the file headers.
    """
    root = Path(directory)
    if not root.is_dir():
        raise InvalidInputError(f"not a directory: {root}")
    numbered: dict[int, Path] = {}
    for path in root.iterdir():
        match = FRAME_NAME_RE.match(path.name)
        if not match:
            continue
        number = int(match.group(1))
        if number in numbered:
            raise FormatError(f"duplicate frame number {number}: {path.name} and {numbered[number].name}")
        numbered[number] = path
    if not numbered:
        raise InvalidInputError(f"no frame_NNNNNN.jpg/png files in {root}")

    numbers = sorted(numbered)
    expected = range(numbers[0], numbers[0] + len(numbers))
    missing = sorted(set(expected) - set(numbers))
    if missing:
        raise FormatError(f"frame numbering has gaps; missing: {missing}")

    entries = []
    for pos, number in enumerate(numbers):
        path = numbered[number]
        try:
            with Image.open(path) as img:
                width, height = img.size
        except OSError as exc:
            raise FormatError(f"unreadable image {path}: {exc}") from exc
        entries.append(FrameEntry(index=pos, path=str(path), width=width, height=height))
    return FrameManifest(
        entries=tuple(entries),
        fps=fps,
        video_id=video_id if video_id is not None else root.name,
    )


def downscale_for_prompt(entry: FrameEntry, max_side: int = PROMPT_MAX_SIDE) -> bytes:
    """Image bytes with the longer side capped at ``max_side``.

    Aspect ratio is preserved; already-small images pass through untouched,
    larger ones are resized and re-encoded as JPEG for transport.
    """
    raw = Path(entry.path).read_bytes()
    if max(entry.width, entry.height) <= max_side:
        return raw
    try:
        with Image.open(io.BytesIO(raw)) as img:
            scale = max_side / max(img.width, img.height)
            new_size = (
                max(1, round(img.width * scale)),
                max(1, round(img.height * scale)),
            )
            resized = img.convert("RGB").resize(new_size, Image.LANCZOS)
    except OSError as exc:
        raise FormatError(f"cannot decode image {entry.path}: {exc}") from exc
    buf = io.BytesIO()
    resized.save(buf, format="JPEG", quality=90)
    return buf.getvalue()


def save_manifest(manifest: FrameManifest, path: str | Path) -> None:
    payload = {
        "video_id": manifest.video_id,
        "fps": manifest.fps,
        "frames": [
            {"index": e.index, "path": e.path, "width": e.width, "height": e.height}
            for e in manifest.entries
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_manifest(path: str | Path) -> FrameManifest:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"unreadable manifest {path}: {exc}") from exc
    if not isinstance(payload, dict) or not {"video_id", "fps", "frames"} <= set(payload):
        raise FormatError("manifest must be an object with video_id, fps, frames")
    frames = payload["frames"]
    if not isinstance(frames, list):
        raise FormatError("manifest frames must be a list")
    entries = []
    for pos, item in enumerate(frames):
        if not isinstance(item, dict) or not {"index", "path", "width", "height"} <= set(item):
            raise FormatError(f"manifest frame {pos} must carry index, path, width, height")
        entries.append(
            FrameEntry(
                index=int(item["index"]),
                path=str(item["path"]),
                width=int(item["width"]),
                height=int(item["height"]),
            )
        )
    try:
        return FrameManifest(
            entries=tuple(entries), fps=float(payload["fps"]), video_id=str(payload["video_id"])
        )
    except InvalidInputError as exc:
        raise FormatError(f"invalid manifest {path}: {exc}") from exc
