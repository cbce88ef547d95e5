#include "hexwave/io_util.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hexwave/errors.hpp"

namespace hexwave {

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const std::string& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(s)));
  return std::string(buf);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Config, "cannot open for writing: " + path);
  f << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Config, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  if (!j.is_object()) throw Error(ErrorKind::Config, context + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    if (!ok) throw Error(ErrorKind::Config, "unknown key '" + it.key() + "' in " + context);
  }
}

}  // namespace hexwave
