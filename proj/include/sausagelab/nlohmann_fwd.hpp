#pragma once

// Forward declaration of nlohmann::json (3.11.x ABI namespace) so library
// headers do not pull in the full single-header implementation.
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace nlohmann {
inline namespace json_abi_v3_11_3 {

template <typename T, typename SFINAE>
struct adl_serializer;

template <template <typename U, typename V, typename... Args> class ObjectType,
          template <typename U, typename... Args> class ArrayType,
          class StringType, class BooleanType, class NumberIntegerType,
          class NumberUnsignedType, class NumberFloatType,
          template <typename U> class AllocatorType,
          template <typename T, typename SFINAE> class JSONSerializer,
          class BinaryType, class CustomBaseClass>
class basic_json;

using json = basic_json<std::map, std::vector, std::string, bool, std::int64_t,
                        std::uint64_t, double, std::allocator, adl_serializer,
                        std::vector<std::uint8_t>, void>;

}  // namespace json_abi_v3_11_3
}  // namespace nlohmann
