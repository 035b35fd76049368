"""Salted-digest storage for owner secrets (remote-protection passphrase, owner PIN).

Plaintext exists only transiently inside the comparison call; everything
that is persisted or held on the engine is a ``SecretRecord``.
"""

from __future__ import annotations

import hashlib
import hmac
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class SecretRecord:
    salt: str    # hex
    digest: str  # hex, sha256(salt_bytes + utf8(plaintext))

    @classmethod
    def create(cls, plaintext: str, *, salt: bytes | None = None) -> "SecretRecord":
        salt = os.urandom(16) if salt is None else salt
        return cls(salt=salt.hex(), digest=_digest(salt, plaintext))

    def matches(self, candidate: str) -> bool:
        return hmac.compare_digest(_digest(bytes.fromhex(self.salt), candidate), self.digest)

    def to_json(self) -> dict:
        return {"salt": self.salt, "digest": self.digest}

    @classmethod
    def from_json(cls, data: dict) -> "SecretRecord":
        return cls(salt=str(data["salt"]), digest=str(data["digest"]))


def _digest(salt: bytes, plaintext: str) -> str:
    return hashlib.sha256(salt + plaintext.encode("utf-8")).hexdigest()
