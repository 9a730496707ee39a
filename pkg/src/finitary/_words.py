from __future__ import annotations

from collections.abc import Sequence

from .exceptions import UnknownSymbolError


def split_word(word: str | Sequence, alphabet: Sequence[str], allow_lambda: bool = False) -> list:
    """Turn a word into a list of symbols, checking each against ``alphabet``.

    Strings are split per character when every symbol is one character long,
    otherwise on whitespace. ``None`` entries stand for the null symbol.
    """
    if isinstance(word, str):
        if all(len(a) == 1 for a in alphabet):
            symbols: list = list(word)
        else:
            symbols = word.split()
    else:
        symbols = list(word)
    known = set(alphabet)
    for s in symbols:
        if s is None and allow_lambda:
            continue
        if s not in known:
            raise UnknownSymbolError(f"symbol {s!r} not in alphabet {list(alphabet)}")
    return symbols


def join_word(symbols: Sequence[str]) -> str:
    if all(len(s) == 1 for s in symbols):
        return "".join(symbols)
    return " ".join(symbols)
