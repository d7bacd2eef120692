"""Input checks shared by the estimators."""
from __future__ import annotations

from sklearn.exceptions import NotFittedError


def check_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"This {type(estimator).__name__} instance is not fitted yet; call 'fit' first."
        )


def check_entries(X, tokenized: bool = False, tagged: bool = False) -> list:
    """Return ``X`` as a list of entries, raising on the wrong shape.

    ``tokenized`` requires every entry to carry tokens; ``tagged`` also
    requires a tag on every token.
    """
    if X is None or isinstance(X, (str, bytes)):
        raise TypeError("expected an iterable of ConceptEntry objects")
    entries = list(X)
    for i, entry in enumerate(entries):
        if not hasattr(entry, "raw_label") or not hasattr(entry, "tokens"):
            raise TypeError(f"item {i} is {type(entry).__name__}, not a ConceptEntry")
        if (tokenized or tagged) and not entry.tokens:
            raise ValueError(f"entry {entry.entry_id!r} has no tokens; tokenize first")
        if tagged and any(t.tag is None for t in entry.tokens):
            raise ValueError(f"entry {entry.entry_id!r} has untagged tokens; tag first")
    return entries
