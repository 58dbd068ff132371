"""Self-contained cover certificates.

A certificate carries the input set inline together with its sha256 digest,
the parameters, the cover and the bounds.  ``verified`` is only ever set by
:func:`certify`, which runs the exact containment check in this process;
documents read back with :meth:`CoverCertificate.from_json` keep their
stored claim in ``claimed`` and start out unverified.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from . import __version__
from .group import GroupElement, PointSet
from .verifier import lower_bound, verify_cover

CERT_METHODS = ("simplex", "main-zn", "abelian", "greedy", "exact-minimal", "manual")


class CertificateFormatError(ValueError):
    pass


@dataclass(frozen=True)
class CoverCertificate:
    A: PointSet
    r: int
    h: int
    cover: PointSet
    method: str
    verified: bool
    lower_bound: int
    paper_bound: int | None = None
    khovanskii_c: int | None = None
    version: str = __version__
    claimed: bool | None = None

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "set": {"sha256": self.A.digest(), **self.A.to_json()},
            "r": self.r,
            "h": self.h,
            "cover": self.cover.to_json(),
            "method": self.method,
            "verified": self.verified,
            "lower_bound": self.lower_bound,
            "paper_bound": self.paper_bound,
            "khovanskii_c": self.khovanskii_c,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, doc: dict) -> CoverCertificate:
        try:
            s = doc["set"]
            A = PointSet.from_json({"group": s["group"], "points": s["points"]})
            X = PointSet.from_json(doc["cover"])
            r, h, lb = doc["r"], doc["h"], doc["lower_bound"]
            method = doc["method"]
            claimed = doc["verified"]
            version = doc["version"]
        except (KeyError, TypeError) as exc:
            raise CertificateFormatError(f"malformed certificate: {exc!r}") from exc
        if "sha256" in s and s["sha256"] != A.digest():
            raise CertificateFormatError("set digest does not match the inline copy")
        if X.spec != A.spec:
            raise CertificateFormatError("cover and set live in different groups")
        if method not in CERT_METHODS:
            raise CertificateFormatError(f"unknown method tag {method!r}")
        for name, v in [("r", r), ("h", h), ("lower_bound", lb)]:
            if not isinstance(v, int) or isinstance(v, bool):
                raise CertificateFormatError(f"{name} must be an integer")
        return cls(
            A, r, h, X, method, False, lb,
            doc.get("paper_bound"), doc.get("khovanskii_c"), version, bool(claimed),
        )

    @classmethod
    def loads(cls, text: str) -> CoverCertificate:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateFormatError(f"not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise CertificateFormatError("certificate must be a JSON object")
        return cls.from_json(doc)

    def recheck(self) -> tuple[CoverCertificate, GroupElement | None]:
        """Run the containment check again; returns the updated certificate and any witness."""
        check = verify_cover(self.A, self.r, self.h, self.cover)
        return replace(self, verified=check.ok), check.witness


def certify(A: PointSet, r: int, h: int, X: PointSet, method: str, paper_bound: int | None = None, khovanskii_c: int | None = None) -> tuple[CoverCertificate, GroupElement | None]:
    """Check ``rhA ⊆ X + hA`` now and wrap the outcome; the witness is ``None`` on success."""
    if method not in CERT_METHODS:
        raise ValueError(f"unknown method tag {method!r}")
    check = verify_cover(A, r, h, X)
    cert = CoverCertificate(A, r, h, X, method, check.ok, lower_bound(A, r, h), paper_bound, khovanskii_c)
    return cert, check.witness
