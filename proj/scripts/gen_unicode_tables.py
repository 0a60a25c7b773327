#!/usr/bin/env python3
"""Generates src/unicode_tables.cpp from the Python unicodedata module.

Emits binary-searchable tables for canonical/compatibility decomposition,
canonical combining classes, primary composition pairs, full case folding,
full uppercasing, punctuation categories, and whitespace. Hangul syllables
are handled algorithmically at runtime and are excluded here.
"""

import sys
import unicodedata

MAX_CP = 0x110000
HANGUL_S_BASE = 0xAC00
HANGUL_S_COUNT = 11172


def is_hangul_syllable(cp: int) -> bool:
    return HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT


def full_decomposition(cp: int, form: str):
    ch = chr(cp)
    norm = unicodedata.normalize(form, ch)
    if norm == ch:
        return None
    return [ord(c) for c in norm]


def collect():
    nfd = {}
    nfkd = {}
    ccc = {}
    fold = {}
    upper = {}
    punct_cps = []
    space_cps = []
    comp = {}

    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)

        cat = unicodedata.category(ch)
        if cat.startswith("P"):
            punct_cps.append(cp)
        if ch.isspace():
            space_cps.append(cp)

        cc = unicodedata.combining(ch)
        if cc:
            ccc[cp] = cc

        if not is_hangul_syllable(cp):
            d = full_decomposition(cp, "NFD")
            if d:
                nfd[cp] = d
            dk = full_decomposition(cp, "NFKD")
            if dk:
                nfkd[cp] = dk

        f = ch.casefold()
        if f != ch:
            fold[cp] = [ord(c) for c in f]
        u = ch.upper()
        if u != ch:
            upper[cp] = [ord(c) for c in u]

        # Primary composition pairs come from raw two-part canonical
        # decompositions that NFC actually recomposes.
        raw = unicodedata.decomposition(ch)
        if raw and not raw.startswith("<") and not is_hangul_syllable(cp):
            parts = [int(p, 16) for p in raw.split()]
            if len(parts) == 2:
                recomposed = unicodedata.normalize(
                    "NFC", unicodedata.normalize("NFD", ch)
                )
                if recomposed == ch:
                    comp[(parts[0], parts[1])] = cp

    return nfd, nfkd, ccc, comp, fold, upper, punct_cps, space_cps


def to_ranges(cps):
    ranges = []
    for cp in cps:
        if ranges and ranges[-1][1] + 1 == cp:
            ranges[-1][1] = cp
        else:
            ranges.append([cp, cp])
    return ranges


class Pool:
    def __init__(self):
        self.data = []
        self.index = {}

    def add(self, seq):
        key = tuple(seq)
        if key in self.index:
            return self.index[key]
        ofs = len(self.data)
        self.data.extend(seq)
        self.index[key] = ofs
        return ofs


def emit_mapping(out, name, mapping, pool):
    keys = sorted(mapping)
    vals = []
    for k in keys:
        seq = mapping[k]
        ofs = pool.add(seq)
        assert ofs < (1 << 24) and len(seq) < 32
        vals.append((ofs << 5) | len(seq))
    out.append(f"const uint32_t k{name}Keys[] = {{")
    out.append(fmt_list(keys, hex))
    out.append("};")
    out.append(f"const uint32_t k{name}Vals[] = {{")
    out.append(fmt_list(vals, str))
    out.append("};")
    out.append(f"const size_t k{name}Count = {len(keys)};")
    out.append("")


def fmt_list(items, f):
    lines = []
    for i in range(0, len(items), 12):
        lines.append("    " + ", ".join(f(x) for x in items[i : i + 12]) + ",")
    return "\n".join(lines)


def main(path):
    nfd, nfkd, ccc, comp, fold, upper, punct_cps, space_cps = collect()
    pool = Pool()
    out = []
    out.append("// Generated by scripts/gen_unicode_tables.py from Python")
    out.append(
        f"// unicodedata (UCD {unicodedata.unidata_version}). Do not edit by hand."
    )
    out.append("#include \"parapedia/unicode_tables.hpp\"")
    out.append("")
    out.append("namespace parapedia::unicode_data {")
    out.append("")

    body = []
    emit_mapping(body, "Nfd", nfd, pool)
    emit_mapping(body, "Nfkd", nfkd, pool)
    emit_mapping(body, "Fold", fold, pool)
    emit_mapping(body, "Upper", upper, pool)

    out.append("const uint32_t kSeqPool[] = {")
    out.append(fmt_list(pool.data, hex))
    out.append("};")
    out.append("")
    out.extend(body)

    ccc_keys = sorted(ccc)
    out.append("const uint32_t kCccKeys[] = {")
    out.append(fmt_list(ccc_keys, hex))
    out.append("};")
    out.append("const uint8_t kCccVals[] = {")
    out.append(fmt_list([ccc[k] for k in ccc_keys], str))
    out.append("};")
    out.append(f"const size_t kCccCount = {len(ccc_keys)};")
    out.append("")

    comp_keys = sorted(comp)
    out.append("const uint64_t kCompKeys[] = {")
    out.append(
        fmt_list([(a << 32) | b for a, b in comp_keys], lambda x: f"0x{x:x}ull")
    )
    out.append("};")
    out.append("const uint32_t kCompVals[] = {")
    out.append(fmt_list([comp[k] for k in comp_keys], hex))
    out.append("};")
    out.append(f"const size_t kCompCount = {len(comp_keys)};")
    out.append("")

    for name, cps in (("Punct", punct_cps), ("Space", space_cps)):
        ranges = to_ranges(cps)
        flat = []
        for lo, hi in ranges:
            flat.append(lo)
            flat.append(hi)
        out.append(f"const uint32_t k{name}Ranges[] = {{")
        out.append(fmt_list(flat, hex))
        out.append("};")
        out.append(f"const size_t k{name}RangeCount = {len(ranges)};")
        out.append("")

    out.append("}  // namespace parapedia::unicode_data")
    out.append("")

    with open(path, "w") as fh:
        fh.write("\n".join(out))

    print(
        f"nfd={len(nfd)} nfkd={len(nfkd)} ccc={len(ccc)} comp={len(comp)} "
        f"fold={len(fold)} upper={len(upper)} punct_ranges={len(to_ranges(punct_cps))} "
        f"space_ranges={len(to_ranges(space_cps))} pool={len(pool.data)}"
    )


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/unicode_tables.cpp")
