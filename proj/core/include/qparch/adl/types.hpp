#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace qparch::adl {

// Message field format tokens of the architecture language.
enum class FormatType {
  Int8,
  UInt8,
  Int16,
  UInt16,
  Int32,
  UInt32,
  Int64,
  UInt64,
  Float32,
  Float64,
  Bool,
  Duration,
  Time,
  Array,
  Struct,
};

std::optional<FormatType> format_type_from_token(std::string_view token);
std::string_view format_type_token(FormatType t);

bool is_sized_numeric(FormatType t);
bool is_integer_type(FormatType t);
bool is_signed_integer(FormatType t);
bool is_unsigned_integer(FormatType t);
bool is_float_type(FormatType t);
int bit_width(FormatType t);  // 0 for non-sized tokens

enum class SubtypeAnswer { Yes, No, Unsupported };

// value_type usable where slot_type is required: same signedness family with
// width(value) <= width(slot); float32 fits float64. Non-sized tokens are an
// unsupported comparison.
SubtypeAnswer check_subtype(FormatType value_type, FormatType slot_type);

// Does the literal fit the declared format type's size and range.
bool int_fits(FormatType t, long long value);
bool uint_fits(FormatType t, unsigned long long value);
bool float_fits(FormatType t, double value);

}  // namespace qparch::adl
