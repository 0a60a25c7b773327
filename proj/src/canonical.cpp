#include "parapedia/canonical.hpp"

#include <algorithm>

#include "parapedia/unicode_tables.hpp"

namespace parapedia::canonical {
namespace {

using namespace parapedia::unicode_data;

constexpr uint32_t kHangulSBase = 0xAC00;
constexpr uint32_t kHangulLBase = 0x1100;
constexpr uint32_t kHangulVBase = 0x1161;
constexpr uint32_t kHangulTBase = 0x11A7;
constexpr uint32_t kHangulLCount = 19;
constexpr uint32_t kHangulVCount = 21;
constexpr uint32_t kHangulTCount = 28;
constexpr uint32_t kHangulNCount = kHangulVCount * kHangulTCount;
constexpr uint32_t kHangulSCount = kHangulLCount * kHangulNCount;

const uint32_t* find_key(const uint32_t* keys, size_t count, uint32_t cp) {
    const uint32_t* end = keys + count;
    const uint32_t* it = std::lower_bound(keys, end, cp);
    return (it != end && *it == cp) ? it : nullptr;
}

// Returns the pooled sequence for cp in the given packed mapping, or
// nullptr when cp maps to itself.
const uint32_t* lookup_seq(const uint32_t* keys, const uint32_t* vals, size_t count,
                           uint32_t cp, size_t* len) {
    const uint32_t* k = find_key(keys, count, cp);
    if (!k) return nullptr;
    uint32_t packed = vals[k - keys];
    *len = packed & 0x1F;
    return kSeqPool + (packed >> 5);
}

uint8_t combining_class(uint32_t cp) {
    const uint32_t* k = find_key(kCccKeys, kCccCount, cp);
    return k ? kCccVals[k - kCccKeys] : 0;
}

bool in_ranges(const uint32_t* ranges, size_t count, uint32_t cp) {
    size_t lo = 0, hi = count;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (cp < ranges[2 * mid]) {
            hi = mid;
        } else if (cp > ranges[2 * mid + 1]) {
            lo = mid + 1;
        } else {
            return true;
        }
    }
    return false;
}

void decompose_cp(uint32_t cp, bool compat, std::vector<uint32_t>& out) {
    if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
        uint32_t idx = cp - kHangulSBase;
        out.push_back(kHangulLBase + idx / kHangulNCount);
        out.push_back(kHangulVBase + (idx % kHangulNCount) / kHangulTCount);
        uint32_t t = idx % kHangulTCount;
        if (t) out.push_back(kHangulTBase + t);
        return;
    }
    size_t len = 0;
    const uint32_t* seq =
        compat ? lookup_seq(kNfkdKeys, kNfkdVals, kNfkdCount, cp, &len)
               : lookup_seq(kNfdKeys, kNfdVals, kNfdCount, cp, &len);
    if (!seq) {
        out.push_back(cp);
        return;
    }
    out.insert(out.end(), seq, seq + len);
}

// Stable-sorts maximal runs of nonzero-ccc characters (canonical ordering).
void canonical_reorder(std::vector<uint32_t>& v) {
    for (size_t i = 1; i < v.size(); ++i) {
        uint8_t cc = combining_class(v[i]);
        if (cc == 0) continue;
        size_t j = i;
        while (j > 0 && combining_class(v[j - 1]) > cc) {
            std::swap(v[j - 1], v[j]);
            --j;
        }
    }
}

uint32_t compose_pair(uint32_t a, uint32_t b) {
    // Hangul LV and LVT composition is algorithmic.
    if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount && b >= kHangulVBase &&
        b < kHangulVBase + kHangulVCount) {
        return kHangulSBase + ((a - kHangulLBase) * kHangulVCount + (b - kHangulVBase)) * kHangulTCount;
    }
    if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount &&
        (a - kHangulSBase) % kHangulTCount == 0 && b > kHangulTBase &&
        b < kHangulTBase + kHangulTCount) {
        return a + (b - kHangulTBase);
    }
    uint64_t key = (static_cast<uint64_t>(a) << 32) | b;
    const uint64_t* end = kCompKeys + kCompCount;
    const uint64_t* it = std::lower_bound(kCompKeys, end, key);
    if (it != end && *it == key) return kCompVals[it - kCompKeys];
    return 0;
}

void canonical_compose(std::vector<uint32_t>& v) {
    if (v.empty()) return;
    std::vector<uint32_t> out;
    out.reserve(v.size());
    ptrdiff_t starter = -1;
    int last_cc = -1;  // -1: next char immediately follows the starter
    for (uint32_t cp : v) {
        uint8_t cc = combining_class(cp);
        if (starter >= 0 && (last_cc < static_cast<int>(cc) || last_cc == -1)) {
            if (uint32_t composed = compose_pair(out[starter], cp)) {
                out[starter] = composed;
                continue;
            }
        }
        if (cc == 0) {
            starter = static_cast<ptrdiff_t>(out.size());
            last_cc = -1;
        } else {
            last_cc = cc;
        }
        out.push_back(cp);
    }
    v = std::move(out);
}

std::vector<uint32_t> normalize(const std::vector<uint32_t>& in, bool compat) {
    std::vector<uint32_t> decomposed;
    decomposed.reserve(in.size() + in.size() / 4);
    for (uint32_t cp : in) decompose_cp(cp, compat, decomposed);
    canonical_reorder(decomposed);
    canonical_compose(decomposed);
    return decomposed;
}

void append_mapped(const uint32_t* keys, const uint32_t* vals, size_t count, uint32_t cp,
                   std::vector<uint32_t>& out) {
    size_t len = 0;
    const uint32_t* seq = lookup_seq(keys, vals, count, cp, &len);
    if (!seq) {
        out.push_back(cp);
    } else {
        out.insert(out.end(), seq, seq + len);
    }
}

}  // namespace

std::vector<uint32_t> utf8_decode(std::string_view text) {
    std::vector<uint32_t> out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        uint32_t cp = 0;
        size_t extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c >> 4) == 0xE) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c >> 3) == 0x1E) {
            cp = c & 0x07;
            extra = 3;
        } else {
            out.push_back(0xFFFD);  // stray continuation or invalid lead byte
            ++i;
            continue;
        }
        bool valid = true;
        for (size_t k = 1; k <= extra; ++k) {
            if (i + k >= text.size() ||
                (static_cast<unsigned char>(text[i + k]) >> 6) != 0x2) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3F);
        }
        if (!valid || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return out;
}

std::string utf8_encode(const std::vector<uint32_t>& codepoints) {
    std::string out;
    out.reserve(codepoints.size());
    for (uint32_t cp : codepoints) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

std::vector<uint32_t> normalize_nfkc(const std::vector<uint32_t>& in) {
    return normalize(in, true);
}

std::vector<uint32_t> normalize_nfc(const std::vector<uint32_t>& in) {
    return normalize(in, false);
}

bool is_punctuation(uint32_t cp) {
    return in_ranges(unicode_data::kPunctRanges, unicode_data::kPunctRangeCount, cp);
}

bool is_whitespace(uint32_t cp) {
    return in_ranges(unicode_data::kSpaceRanges, unicode_data::kSpaceRangeCount, cp);
}

bool nfd_contains(uint32_t cp, uint32_t wanted) {
    std::vector<uint32_t> d;
    decompose_cp(cp, false, d);
    return std::find(d.begin(), d.end(), wanted) != d.end();
}

std::string canonicalize(std::string_view name) {
    std::vector<uint32_t> cps = normalize_nfkc(utf8_decode(name));

    std::vector<uint32_t> folded;
    folded.reserve(cps.size());
    for (uint32_t cp : cps)
        append_mapped(kFoldKeys, kFoldVals, kFoldCount, cp, folded);
    cps = normalize_nfkc(folded);

    // Punctuation becomes a space so "F.Kennedy" keeps its token boundary;
    // whitespace runs collapse to single spaces.
    std::vector<uint32_t> collapsed;
    collapsed.reserve(cps.size());
    bool pending_space = false;
    for (uint32_t cp : cps) {
        if (is_punctuation(cp) || is_whitespace(cp)) {
            pending_space = !collapsed.empty();
            continue;
        }
        if (pending_space) {
            collapsed.push_back(' ');
            pending_space = false;
        }
        collapsed.push_back(cp);
    }

    // Removing punctuation can expose new composition pairs; a final NFC
    // pass keeps canonicalize idempotent.
    return utf8_encode(normalize_nfc(collapsed));
}

bool is_unusable(std::string_view name) { return canonicalize(name).empty(); }

std::string uppercase(std::string_view text) {
    std::vector<uint32_t> cps = utf8_decode(text);
    std::vector<uint32_t> out;
    out.reserve(cps.size());
    for (uint32_t cp : cps)
        append_mapped(kUpperKeys, kUpperVals, kUpperCount, cp, out);
    return utf8_encode(out);
}

}  // namespace parapedia::canonical
