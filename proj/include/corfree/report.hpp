#ifndef CORFREE_REPORT_HPP_
#define CORFREE_REPORT_HPP_

// Check records, input digests and the two output formats.

#include <algorithm>
#include <array>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "ab.hpp"
#include "error.hpp"

namespace corfree {

  inline std::string sha256_hex(std::string const& data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int                               len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
      throw Error("sha256 failed");
    }
    std::string out;
    char        buf[3];
    for (unsigned int i = 0; i < len; ++i) {
      std::snprintf(buf, sizeof(buf), "%02x", md[i]);
      out += buf;
    }
    return out;
  }

  struct Record {
    std::string              check;
    std::string              input_digest;
    bool                     pass = true;
    std::vector<std::string> witnesses;
    std::vector<Vec>         invariant_factors;

    nlohmann::ordered_json to_json() const {
      return {{"check", check},
              {"input_digest", input_digest},
              {"result", pass ? "pass" : "fail"},
              {"witnesses", witnesses},
              {"invariant_factors", invariant_factors}};
    }
  };

  class Report {
   public:
    void add(Record r) {
      _records.push_back(std::move(r));
    }

    std::vector<Record> const& records() const noexcept {
      return _records;
    }

    bool all_pass() const {
      return std::all_of(_records.begin(), _records.end(), [](Record const& r) { return r.pass; });
    }

    // one JSON object per line
    void write_structured(std::ostream& os) const {
      for (auto const& r : _records) {
        os << r.to_json().dump() << '\n';
      }
    }

    void write_text(std::ostream& os) const {
      for (auto const& r : _records) {
        os << (r.pass ? "PASS " : "FAIL ") << r.check << "  [" << r.input_digest.substr(0, 12)
           << "]\n";
        for (auto const& f : r.invariant_factors) {
          os << "    " << FiniteAbelianGroup::from_cyclic_orders(f).to_string() << '\n';
        }
        for (auto const& w : r.witnesses) {
          os << "    " << w << '\n';
        }
      }
    }

    void write(std::ostream& os, std::string const& format) const {
      if (format == "structured") {
        write_structured(os);
      } else {
        write_text(os);
      }
    }

   private:
    std::vector<Record> _records;
  };

}  // namespace corfree

#endif  // CORFREE_REPORT_HPP_
