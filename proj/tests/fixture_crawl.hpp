#pragma once

#include <string>
#include <vector>

#include "depcc/warc.hpp"

namespace fixtures {

// Ten HTML response docs: seven English, two German, one exact duplicate of
// an English doc; one English doc is a one-word edit of another. With the
// English language filter and dedup defaults exactly six documents survive.
const std::vector<depcc::WarcRecord>& crawl_records();

// The crawl as one WARC file (every record its own gzip member when
// compressed), plus a warcinfo, a request and a non-HTML response that the
// response filter must ignore.
std::string crawl_warc_bytes(bool gzip_members);
std::string write_crawl_warc(const std::string& dir, bool gzip_members = true);

}  // namespace fixtures
