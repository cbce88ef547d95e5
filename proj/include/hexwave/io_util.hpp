#ifndef HEXWAVE_IO_UTIL_HPP
#define HEXWAVE_IO_UTIL_HPP

#include <cstdint>
#include <string>

#include "json.hpp"

namespace hexwave {

uint64_t fnv1a64(const std::string& s);
std::string hash_hex(const std::string& s);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Strict config checking: every object key must be in the allowed set.
void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& context);

}  // namespace hexwave

#endif
