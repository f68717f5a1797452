#pragma once

#include <fstream>
#include <string>

#include <httplib.h>

// glibc's resolv.h (reached through httplib's socket headers) defines _res as
// a macro, which breaks Eigen's parameter names in any later include.
#ifdef _res
#undef _res
#endif

#include "causalci/error.hpp"

namespace causalci {

// Canonical corpus file name for an id like "pair66" -> "pair0066.txt".
inline std::string pair_file_name(const std::string& id) {
    std::string digits;
    for (char c : id) {
        if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
    }
    if (digits.empty()) return id + ".txt";
    while (digits.size() < 4) digits.insert(digits.begin(), '0');
    return "pair" + digits + ".txt";
}

// Downloads one pair file from `base_url` (e.g. "http://host:port/prefix")
// into `dir`; returns the local path. The corpus itself is not vendored, so
// users point this at their own mirror.
inline std::string fetch_pair_file(const std::string& base_url, const std::string& id,
                                   const std::string& dir) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("fetch base url must include scheme");
    const auto host_start = scheme_end + 3;
    const auto path_start = base_url.find('/', host_start);
    const std::string host = base_url.substr(0, path_start == std::string::npos
                                                    ? std::string::npos
                                                    : path_start);
    const std::string prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);

    httplib::Client client(host);
    client.set_connection_timeout(10);
    const std::string remote = prefix + "/" + pair_file_name(id);
    auto res = client.Get(remote);
    if (!res || res->status != 200)
        throw Error("fetch failed for " + id + " (" + host + remote + ")");
    const std::string local = dir + "/" + pair_file_name(id);
    std::ofstream out(local, std::ios::binary);
    if (!out) throw Error("cannot write " + local);
    out << res->body;
    return local;
}

}  // namespace causalci
