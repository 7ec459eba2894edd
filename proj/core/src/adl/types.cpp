#include "qparch/adl/types.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace qparch::adl {

namespace {

constexpr std::array<std::pair<std::string_view, FormatType>, 15> kTokens = {{
    {"int8", FormatType::Int8},
    {"uint8", FormatType::UInt8},
    {"int16", FormatType::Int16},
    {"uint16", FormatType::UInt16},
    {"int32", FormatType::Int32},
    {"uint32", FormatType::UInt32},
    {"int64", FormatType::Int64},
    {"uint64", FormatType::UInt64},
    {"float32", FormatType::Float32},
    {"float64", FormatType::Float64},
    {"bool", FormatType::Bool},
    {"duration", FormatType::Duration},
    {"time", FormatType::Time},
    {"array", FormatType::Array},
    {"struct", FormatType::Struct},
}};

}  // namespace

std::optional<FormatType> format_type_from_token(std::string_view token) {
  for (const auto& [text, type] : kTokens)
    if (text == token) return type;
  return std::nullopt;
}

std::string_view format_type_token(FormatType t) {
  for (const auto& [text, type] : kTokens)
    if (type == t) return text;
  return "?";
}

bool is_signed_integer(FormatType t) {
  switch (t) {
    case FormatType::Int8:
    case FormatType::Int16:
    case FormatType::Int32:
    case FormatType::Int64:
      return true;
    default:
      return false;
  }
}

bool is_unsigned_integer(FormatType t) {
  switch (t) {
    case FormatType::UInt8:
    case FormatType::UInt16:
    case FormatType::UInt32:
    case FormatType::UInt64:
      return true;
    default:
      return false;
  }
}

bool is_integer_type(FormatType t) {
  return is_signed_integer(t) || is_unsigned_integer(t);
}

bool is_float_type(FormatType t) {
  return t == FormatType::Float32 || t == FormatType::Float64;
}

bool is_sized_numeric(FormatType t) {
  return is_integer_type(t) || is_float_type(t);
}

int bit_width(FormatType t) {
  switch (t) {
    case FormatType::Int8:
    case FormatType::UInt8:
      return 8;
    case FormatType::Int16:
    case FormatType::UInt16:
      return 16;
    case FormatType::Int32:
    case FormatType::UInt32:
    case FormatType::Float32:
      return 32;
    case FormatType::Int64:
    case FormatType::UInt64:
    case FormatType::Float64:
      return 64;
    default:
      return 0;
  }
}

SubtypeAnswer check_subtype(FormatType value_type, FormatType slot_type) {
  if (!is_sized_numeric(value_type) || !is_sized_numeric(slot_type))
    return SubtypeAnswer::Unsupported;
  const bool same_family =
      (is_signed_integer(value_type) && is_signed_integer(slot_type)) ||
      (is_unsigned_integer(value_type) && is_unsigned_integer(slot_type)) ||
      (is_float_type(value_type) && is_float_type(slot_type));
  if (!same_family) return SubtypeAnswer::No;
  return bit_width(value_type) <= bit_width(slot_type) ? SubtypeAnswer::Yes
                                                       : SubtypeAnswer::No;
}

bool int_fits(FormatType t, long long value) {
  switch (t) {
    case FormatType::Int8:
      return value >= -128 && value <= 127;
    case FormatType::Int16:
      return value >= -32768 && value <= 32767;
    case FormatType::Int32:
      return value >= -2147483648LL && value <= 2147483647LL;
    case FormatType::Int64:
      return true;
    case FormatType::UInt8:
    case FormatType::UInt16:
    case FormatType::UInt32:
    case FormatType::UInt64:
      return value >= 0 && uint_fits(t, static_cast<unsigned long long>(value));
    case FormatType::Float32:
    case FormatType::Float64:
      return float_fits(t, static_cast<double>(value));
    default:
      return false;
  }
}

bool uint_fits(FormatType t, unsigned long long value) {
  switch (t) {
    case FormatType::UInt8:
      return value <= 255u;
    case FormatType::UInt16:
      return value <= 65535u;
    case FormatType::UInt32:
      return value <= 4294967295ull;
    case FormatType::UInt64:
      return true;
    case FormatType::Int8:
    case FormatType::Int16:
    case FormatType::Int32:
    case FormatType::Int64:
      return value <= static_cast<unsigned long long>(
                          std::numeric_limits<long long>::max()) &&
             int_fits(t, static_cast<long long>(value));
    case FormatType::Float32:
    case FormatType::Float64:
      return float_fits(t, static_cast<double>(value));
    default:
      return false;
  }
}

bool float_fits(FormatType t, double value) {
  if (!std::isfinite(value)) return false;
  if (t == FormatType::Float64) return true;
  if (t == FormatType::Float32)
    return std::fabs(value) <= static_cast<double>(std::numeric_limits<float>::max());
  return false;
}

}  // namespace qparch::adl
