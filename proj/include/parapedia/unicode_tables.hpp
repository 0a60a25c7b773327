#pragma once

#include <cstddef>
#include <cstdint>

// Generated Unicode data (see scripts/gen_unicode_tables.py).
// Keys arrays are sorted for binary search. Decomposition/case values pack
// (offset << 5 | length) into kSeqPool.
namespace parapedia::unicode_data {

extern const uint32_t kSeqPool[];

extern const uint32_t kNfdKeys[];
extern const uint32_t kNfdVals[];
extern const size_t kNfdCount;

extern const uint32_t kNfkdKeys[];
extern const uint32_t kNfkdVals[];
extern const size_t kNfkdCount;

extern const uint32_t kFoldKeys[];
extern const uint32_t kFoldVals[];
extern const size_t kFoldCount;

extern const uint32_t kUpperKeys[];
extern const uint32_t kUpperVals[];
extern const size_t kUpperCount;

extern const uint32_t kCccKeys[];
extern const uint8_t kCccVals[];
extern const size_t kCccCount;

extern const uint64_t kCompKeys[];
extern const uint32_t kCompVals[];
extern const size_t kCompCount;

extern const uint32_t kPunctRanges[];
extern const size_t kPunctRangeCount;

extern const uint32_t kSpaceRanges[];
extern const size_t kSpaceRangeCount;

}  // namespace parapedia::unicode_data
