import io
from pathlib import Path

import numpy as np
from PIL import Image


class ArtifactStore:
    """Output directory for records, summaries and committed-buffer dumps."""

    def __init__(self, base_dir: str | Path = "results"):
        self.base_dir = Path(base_dir)
        self.base_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.base_dir / name

    def save_bytes(self, name: str, content: bytes) -> Path:
        """
        Write `content` under `name`, replacing any previous file.

        Returns:
            Path of the written file.
        """
        file_path = self.path(name)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        tmp = file_path.with_name(file_path.name + ".tmp")
        tmp.write_bytes(content)
        tmp.replace(file_path)
        return file_path

    def save_text(self, name: str, text: str) -> Path:
        return self.save_bytes(name, text.encode("utf-8"))

    def save_array(self, name: str, array: np.ndarray) -> Path:
        """One value per line; 2-D arrays one row per line."""
        array = np.asarray(array)
        if array.ndim == 0:
            array = array.reshape(1)
        if array.ndim > 2:
            array = array.reshape(array.shape[0], -1)
        buf = io.StringIO()
        fmt = "%.9g" if np.issubdtype(array.dtype, np.floating) else "%d"
        np.savetxt(buf, array, fmt=fmt, delimiter=" ")
        return self.save_text(name, buf.getvalue())

    def save_pgm(self, name: str, image: np.ndarray) -> Path:
        """Binary (P5) greyscale image."""
        image = np.asarray(image)
        if image.ndim != 2:
            raise ValueError(f"PGM dump needs a 2-D image, got shape {image.shape}")
        buf = io.BytesIO()
        Image.fromarray(np.ascontiguousarray(image, dtype=np.uint8)).save(buf, format="PPM")
        return self.save_bytes(name, buf.getvalue())

    def get(self, name: str) -> bytes | None:
        file_path = self.path(name)
        if file_path.exists():
            return file_path.read_bytes()
        return None

    def delete(self, name: str) -> bool:
        file_path = self.path(name)
        if file_path.exists():
            file_path.unlink()
            return True
        return False
