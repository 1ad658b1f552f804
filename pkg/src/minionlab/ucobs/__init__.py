from .cobs import CobsError, cobs_decode, cobs_encode, max_encoded_len

__all__ = ["CobsError", "cobs_decode", "cobs_encode", "max_encoded_len"]
