"""Reed-Solomon coding over GF(2^8) backed by reedsolo."""

import logging
import threading
from functools import lru_cache
from typing import Optional

from reedsolo import ReedSolomonError, RSCodec

from ..errors import RsDecodeError, UsageError
from ..models import RsParams

logger = logging.getLogger(__name__)


# reedsolo keeps its GF tables in module globals and reinstalls them on every
# codec construction, encode and decode; all RS work holds this lock
_RS_LOCK = threading.RLock()


@lru_cache(maxsize=None)
def _codec(params: RsParams) -> RSCodec:
    # generator 2, fcr 0; nsize splits long messages into n-symbol codewords
    with _RS_LOCK:
        return RSCodec(params.nsym, nsize=params.n, prim=RsParams.PRIM)


def rs_encode(data: bytes, params: Optional[RsParams] = None) -> bytes:
    """
    Systematic encode of exactly k data symbols into an n-symbol codeword.

    Raises:
        UsageError: If len(data) != k
    """
    params = params or RsParams()
    if len(data) != params.k:
        raise UsageError(f"rs_encode expects {params.k} data symbols, got {len(data)}")
    with _RS_LOCK:
        return bytes(_codec(params).encode(bytes(data)))


def rs_decode(codeword: bytes, params: Optional[RsParams] = None) -> bytes:
    """
    Decode one codeword, correcting up to (n - k) // 2 symbol errors.

    Returns:
        The k data symbols

    Raises:
        UsageError: If len(codeword) != n
        RsDecodeError: If the codeword is not correctable
    """
    params = params or RsParams()
    if len(codeword) != params.n:
        raise UsageError(f"rs_decode expects {params.n} symbols, got {len(codeword)}")
    try:
        with _RS_LOCK:
            decoded = _codec(params).decode(bytes(codeword))[0]
    except ReedSolomonError as e:
        raise RsDecodeError(f"Codeword not correctable with RS({params.n},{params.k}): {e}") from e
    return bytes(decoded)


def rs_encode_message(message: bytes, params: Optional[RsParams] = None) -> bytes:
    """
    Encode a message of any length as consecutive codewords.

    Full k-symbol blocks become n-symbol codewords; a final short block is
    encoded with the shortened code (len + n - k symbols).
    """
    params = params or RsParams()
    if not message:
        return b""
    with _RS_LOCK:
        return bytes(_codec(params).encode(bytes(message)))


def rs_decode_message(data: bytes, params: Optional[RsParams] = None) -> bytes:
    """
    Inverse of rs_encode_message.

    Raises:
        RsDecodeError: If any block is uncorrectable or the length is impossible
    """
    params = params or RsParams()
    if not data:
        return b""
    if len(data) % params.n and len(data) % params.n <= params.nsym:
        raise RsDecodeError(f"{len(data)} bytes cannot be a sequence of RS({params.n},{params.k}) blocks")
    try:
        with _RS_LOCK:
            decoded = _codec(params).decode(bytes(data))[0]
    except ReedSolomonError as e:
        raise RsDecodeError(f"Message not correctable with RS({params.n},{params.k}): {e}") from e
    return bytes(decoded)


def encoded_length(message_len: int, params: RsParams) -> int:
    """Byte length of rs_encode_message output for a message of message_len bytes."""
    full, rest = divmod(message_len, params.k)
    return full * params.n + (rest + params.nsym if rest else 0)


__all__ = [
    "rs_encode",
    "rs_decode",
    "rs_encode_message",
    "rs_decode_message",
    "encoded_length",
]
