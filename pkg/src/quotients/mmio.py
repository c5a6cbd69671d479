"""Matrix Market reading and atomic writing (complex array and coordinate)."""
import os
import tempfile

import numpy as np
import scipy.io as sio
import scipy.sparse as sp

from .errors import DimensionError


def read_matrix(path):
    """Dense complex matrix from a Matrix Market file."""
    a = sio.mmread(str(path))
    if sp.issparse(a):
        a = a.toarray()
    return np.asarray(a, dtype=np.complex128)


def read_vector(path):
    a = read_matrix(path)
    if a.ndim != 2 or 1 not in a.shape:
        raise DimensionError(f"{path}: expected an n x 1 array, got shape {a.shape}")
    return a.reshape(-1)


def atomic_write_text(path, text):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix(path, a, coordinate=False, comment=""):
    """Write ``a`` with the ``complex`` field; shortest round-trip float repr."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 1:
        a = a[:, None]
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".mtx")
    os.close(fd)
    try:
        target = sp.coo_matrix(a) if coordinate else a
        sio.mmwrite(tmp, target, comment=comment, field="complex")
        # mmwrite appends .mtx when missing; tmp already ends with it
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_vector(path, z):
    write_matrix(path, np.asarray(z).reshape(-1, 1))
