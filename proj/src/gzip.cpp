#include "depcc/gzip.hpp"

#include <zlib.h>

#include <cstring>
#include <istream>
#include <ostream>

namespace depcc {

namespace {
constexpr std::size_t kChunk = 1 << 16;
}

std::string gzip_compress(std::string_view data) {
    z_stream zs;
    std::memset(&zs, 0, sizeof(zs));
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK) {
        throw GzipError("deflateInit2 failed");
    }
    std::string out;
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    char buf[kChunk];
    int ret;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = kChunk;
        ret = deflate(&zs, Z_FINISH);
        out.append(buf, kChunk - zs.avail_out);
    } while (ret == Z_OK);
    deflateEnd(&zs);
    if (ret != Z_STREAM_END) throw GzipError("deflate failed");
    return out;
}

std::string gzip_decompress(std::string_view data) {
    z_stream zs;
    std::memset(&zs, 0, sizeof(zs));
    if (inflateInit2(&zs, 15 + 32) != Z_OK) throw GzipError("inflateInit2 failed");
    std::string out;
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    char buf[kChunk];
    while (true) {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = kChunk;
        int ret = inflate(&zs, Z_NO_FLUSH);
        out.append(buf, kChunk - zs.avail_out);
        if (ret == Z_STREAM_END) {
            if (zs.avail_in == 0) break;
            // Next concatenated member follows.
            if (inflateReset2(&zs, 15 + 32) != Z_OK) {
                inflateEnd(&zs);
                throw GzipError("inflateReset2 failed");
            }
            continue;
        }
        if (ret != Z_OK || (zs.avail_in == 0 && zs.avail_out == kChunk)) {
            inflateEnd(&zs);
            throw GzipError("corrupt gzip stream");
        }
    }
    inflateEnd(&zs);
    return out;
}

struct InflatingReader::Impl {
    std::istream* in = nullptr;
    z_stream zs{};
    char inbuf[kChunk];
    bool stream_done = false;
    bool initialized = false;
};

InflatingReader::InflatingReader(std::istream& in) : impl_(std::make_unique<Impl>()) {
    impl_->in = &in;
    std::memset(&impl_->zs, 0, sizeof(impl_->zs));
    if (inflateInit2(&impl_->zs, 15 + 32) != Z_OK) throw GzipError("inflateInit2 failed");
    impl_->initialized = true;
}

InflatingReader::~InflatingReader() {
    if (impl_ && impl_->initialized) inflateEnd(&impl_->zs);
}

std::size_t InflatingReader::read(char* buf, std::size_t n) {
    if (impl_->stream_done) return 0;
    z_stream& zs = impl_->zs;
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = static_cast<uInt>(n);
    while (zs.avail_out > 0) {
        if (zs.avail_in == 0) {
            impl_->in->read(impl_->inbuf, kChunk);
            std::streamsize got = impl_->in->gcount();
            if (got == 0) {
                if (zs.total_in == 0 && n == zs.avail_out) {
                    impl_->stream_done = true;
                    break;
                }
                // Input exhausted mid-member.
                if (zs.avail_out == n) throw GzipError("truncated gzip stream");
                break;
            }
            zs.next_in = reinterpret_cast<Bytef*>(impl_->inbuf);
            zs.avail_in = static_cast<uInt>(got);
        }
        int ret = inflate(&zs, Z_NO_FLUSH);
        if (ret == Z_STREAM_END) {
            if (zs.avail_in == 0) {
                // Peek for a further member.
                impl_->in->read(impl_->inbuf, kChunk);
                std::streamsize got = impl_->in->gcount();
                if (got == 0) {
                    impl_->stream_done = true;
                    break;
                }
                zs.next_in = reinterpret_cast<Bytef*>(impl_->inbuf);
                zs.avail_in = static_cast<uInt>(got);
            }
            if (inflateReset2(&zs, 15 + 32) != Z_OK) throw GzipError("inflateReset2 failed");
            continue;
        }
        if (ret != Z_OK) throw GzipError("corrupt gzip stream");
    }
    return n - zs.avail_out;
}

struct GzipWriter::Impl {
    std::ostream* out = nullptr;
    z_stream zs{};
    bool finished = false;
    bool initialized = false;
};

GzipWriter::GzipWriter(std::ostream& out) : impl_(std::make_unique<Impl>()) {
    impl_->out = &out;
    std::memset(&impl_->zs, 0, sizeof(impl_->zs));
    if (deflateInit2(&impl_->zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK) {
        throw GzipError("deflateInit2 failed");
    }
    impl_->initialized = true;
}

GzipWriter::~GzipWriter() {
    if (impl_ && impl_->initialized) {
        if (!impl_->finished) {
            try {
                finish();
            } catch (...) {
            }
        }
        deflateEnd(&impl_->zs);
    }
}

void GzipWriter::write(std::string_view data) {
    z_stream& zs = impl_->zs;
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    char buf[kChunk];
    while (zs.avail_in > 0) {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = kChunk;
        if (deflate(&zs, Z_NO_FLUSH) != Z_OK) throw GzipError("deflate failed");
        impl_->out->write(buf, static_cast<std::streamsize>(kChunk - zs.avail_out));
    }
}

void GzipWriter::finish() {
    if (impl_->finished) return;
    z_stream& zs = impl_->zs;
    char buf[kChunk];
    int ret;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = kChunk;
        ret = deflate(&zs, Z_FINISH);
        impl_->out->write(buf, static_cast<std::streamsize>(kChunk - zs.avail_out));
    } while (ret == Z_OK);
    if (ret != Z_STREAM_END) throw GzipError("deflate finish failed");
    impl_->finished = true;
}

}  // namespace depcc
