"""Channel tensor file formats.

Binary layout (all little-endian):

    8 bytes   magic "AMIMOCH1"
    5 uint32  dims: users, rx antennas, tx elements, clusters, snapshots
    1 float64 carrier frequency, Hz
    1 uint64  seed
    body      float32 re/im interleaved, (user, rx, tx, cluster,
              snapshot) row-major
    delays    float64, (user, cluster, snapshot) row-major

The text mode is a plain TSV for small runs: one row per tensor entry.
"""

from __future__ import annotations

import numpy as np

from .coefficients import ChannelTensor

MAGIC = b"AMIMOCH1"
_HEADER_DTYPE = np.dtype(
    [("dims", "<u4", 5), ("carrier_hz", "<f8"), ("seed", "<u8")]
)


def write_tensor_binary(tensor: ChannelTensor, path) -> None:
    header = np.zeros(1, dtype=_HEADER_DTYPE)
    header["dims"][0] = tensor.coefficients.shape
    header["carrier_hz"][0] = tensor.carrier_hz
    header["seed"][0] = tensor.seed
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(tensor.coefficients, dtype="<c8").tobytes())
        f.write(np.ascontiguousarray(tensor.delays, dtype="<f8").tobytes())


def read_tensor_binary(path) -> ChannelTensor:
    with open(path, "rb") as f:
        magic = f.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"not a channel tensor file: magic {magic!r}")
        header = np.frombuffer(f.read(_HEADER_DTYPE.itemsize), dtype=_HEADER_DTYPE)[0]
        dims = tuple(int(d) for d in header["dims"])
        n_coeff = int(np.prod(dims))
        coeff = np.frombuffer(f.read(8 * n_coeff), dtype="<c8")
        if coeff.size != n_coeff:
            raise ValueError("truncated coefficient block")
        u, _, _, c, s = dims
        n_delay = u * c * s
        delays = np.frombuffer(f.read(8 * n_delay), dtype="<f8")
        if delays.size != n_delay:
            raise ValueError("truncated delay block")
    return ChannelTensor(
        user_ids=tuple(range(dims[0])),
        coefficients=coeff.reshape(dims).astype(np.complex128),
        delays=delays.reshape(u, c, s).copy(),
        carrier_hz=float(header["carrier_hz"]),
        seed=int(header["seed"]),
    )


def write_tensor_text(tensor: ChannelTensor, path) -> None:
    """One row per coefficient; delays repeated per tx element for
    self-containedness. Meant for small runs only."""
    u_n, r_n, t_n, c_n, s_n = tensor.coefficients.shape
    with open(path, "w") as f:
        f.write(f"# carrier_hz={tensor.carrier_hz!r} seed={tensor.seed}\n")
        f.write(f"# dims user={u_n} rx={r_n} tx={t_n} cluster={c_n} snapshot={s_n}\n")
        f.write("user\trx\ttx\tcluster\tsnapshot\tre\tim\tdelay_s\n")
        for iu, user in enumerate(tensor.user_ids):
            for ir in range(r_n):
                for it in range(t_n):
                    for ic in range(c_n):
                        for isn in range(s_n):
                            z = tensor.coefficients[iu, ir, it, ic, isn]
                            d = float(tensor.delays[iu, ic, isn])
                            f.write(
                                f"{user}\t{ir}\t{it}\t{ic}\t{isn}\t"
                                f"{float(z.real)!r}\t{float(z.imag)!r}\t{d!r}\n"
                            )
