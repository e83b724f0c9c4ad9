#!/usr/bin/env python3
"""Regenerate include/conndis/detail/casefold_table.hpp.

Dumps every codepoint whose full case folding (Python's str.casefold)
differs from the codepoint itself. The C++ side folds unlisted
codepoints to themselves.
"""
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "include", "conndis", "detail", "casefold_table.hpp")


def entries():
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        folded = chr(cp).casefold()
        if folded != chr(cp):
            yield cp, [ord(c) for c in folded]


def main():
    lines = [
        "// Generated by scripts/gen_casefold_table.py from the Unicode case-folding data",
        "// shipped with CPython (str.casefold, full folding). Do not edit by hand.",
        "#pragma once",
        "",
        "#include <cstdint>",
        "#include <cstddef>",
        "",
        "namespace conndis::detail {",
        "",
        "struct CaseFoldEntry {",
        "  char32_t from;",
        "  char32_t to[3];",
        "  std::uint8_t len;",
        "};",
        "",
        "// Sorted by `from`; codepoints absent from the table fold to themselves.",
        "inline constexpr CaseFoldEntry kCaseFoldTable[] = {",
    ]
    row = []
    for cp, folded in entries():
        padded = (folded + [0, 0, 0])[:3]
        row.append("{0x%X,{0x%X,0x%X,0x%X},%d}," % (cp, padded[0], padded[1], padded[2], len(folded)))
        if len(row) == 4:
            lines.append("    " + " ".join(row))
            row = []
    if row:
        lines.append("    " + " ".join(row))
    lines += [
        "};",
        "",
        "inline constexpr std::size_t kCaseFoldTableSize = sizeof(kCaseFoldTable) / sizeof(kCaseFoldTable[0]);",
        "",
        "}  // namespace conndis::detail",
    ]
    with open(OUT, "w") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
