"""
Módulo de escritura de artefactos.
Los ficheros se escriben con nombres temporales y solo se renombran a su
nombre final cuando todo el bloque termina sin errores.
"""

import json
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .utils import to_jsonable


class ArtifactWriter:
    """Acumula ficheros temporales de un directorio de salida."""

    def __init__(self, directory: Path):
        self.directory = directory
        self._pending: List[Tuple[Path, Path]] = []

    def write_text(self, name: str, text: str) -> Path:
        """Escribe `text` en un temporal que se renombrará a `name` al confirmar."""
        final = self.directory / name
        temp = self.directory / f".{name}.tmp-{os.getpid()}"
        self._pending.append((temp, final))
        with open(temp, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        return final

    def write_json(self, name: str, data: Dict[str, Any]) -> Path:
        text = json.dumps(to_jsonable(data), indent=2, sort_keys=True, allow_nan=True)
        return self.write_text(name, text + "\n")

    def commit(self):
        """
        Renombra todos los temporales a su nombre final.

        Si un renombrado falla se deshacen los ya hechos: los ficheros previos
        vuelven a su sitio y los nuevos se borran.
        """
        done: List[Tuple[Path, Optional[Path]]] = []
        try:
            for temp, final in self._pending:
                backup = None
                if final.exists():
                    backup = final.with_name(f".{final.name}.bak-{os.getpid()}")
                    os.replace(final, backup)
                done.append((final, backup))
                os.replace(temp, final)
        except BaseException:
            for final, backup in reversed(done):
                if backup is not None:
                    os.replace(backup, final)
                else:
                    final.unlink(missing_ok=True)
            raise
        for _, backup in done:
            if backup is not None:
                backup.unlink(missing_ok=True)
        self._pending = []

    def rollback(self):
        for temp, _ in self._pending:
            try:
                temp.unlink()
            except FileNotFoundError:
                pass
        self._pending = []


@contextmanager
def atomic_outputs(directory):
    """
    Context manager para escribir varios artefactos de forma atómica.
    Confirma (renombra) al salir sin errores; si algo falla borra los
    temporales y relanza la excepción.
    """
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    writer = ArtifactWriter(path)
    try:
        yield writer
        writer.commit()
    except BaseException:
        writer.rollback()
        raise
