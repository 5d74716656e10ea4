#include "krecon/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace krecon {

namespace {

static_assert(std::endian::native == std::endian::little,
              "on-disk formats are little-endian; big-endian hosts need byte swaps");

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw io_error(io_error::Kind::Io, "cannot open for writing: " + path);
    }
    void magic(const char m[4]) { out_.write(m, 4); }
    void u32(std::uint32_t v) { out_.write(reinterpret_cast<const char*>(&v), 4); }
    void i32(std::int32_t v) { out_.write(reinterpret_cast<const char*>(&v), 4); }
    void f64(double v) { out_.write(reinterpret_cast<const char*>(&v), 8); }
    void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
    void close(const std::string& path) {
        out_.flush();
        if (!out_) throw io_error(io_error::Kind::Io, "write failed: " + path);
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    Reader(const std::string& path, const char expect_magic[4]) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw io_error(io_error::Kind::Io, "cannot open for reading: " + path);
        in_.seekg(0, std::ios::end);
        size_ = static_cast<std::size_t>(in_.tellg());
        in_.seekg(0);
        char m[4];
        raw(m, 4, "magic");
        if (std::memcmp(m, expect_magic, 4) != 0)
            throw io_error(io_error::Kind::BadMagic,
                           path + ": bad magic, expected \"" + std::string(expect_magic, 4) + "\"");
    }
    std::uint32_t u32(const char* what) {
        std::uint32_t v;
        raw(&v, 4, what);
        return v;
    }
    std::int32_t i32(const char* what) {
        std::int32_t v;
        raw(&v, 4, what);
        return v;
    }
    double f64(const char* what) {
        double v;
        raw(&v, 8, what);
        return v;
    }
    void raw(void* p, std::size_t n, const char* what) {
        if (pos_ + n > size_) {
            std::ostringstream msg;
            msg << path_ << ": truncated while reading " << what << " (need " << (pos_ + n) << " bytes, file has "
                << size_ << ")";
            throw io_error(io_error::Kind::Truncated, msg.str());
        }
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in_) throw io_error(io_error::Kind::Io, path_ + ": read failed");
        pos_ += n;
    }
    void expect_end() {
        if (pos_ != size_)
            throw io_error(io_error::Kind::Malformed,
                           path_ + ": trailing bytes beyond the header-implied payload length");
    }
    std::size_t remaining() const { return size_ - pos_; }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t size_ = 0;
    std::size_t pos_ = 0;
};

constexpr std::uint32_t kDimLimit = 1u << 24; // guards size arithmetic

void check_dims(std::uint64_t a, std::uint64_t b, std::uint64_t c, const std::string& path) {
    if (a == 0 || b == 0 || c == 0 || a > kDimLimit || b > kDimLimit || c > kDimLimit || a * b > kDimLimit * 16ull)
        throw io_error(io_error::Kind::DimOverflow, path + ": header dimensions out of range");
}

void write_support(Writer& w, const KernelSupport& s) {
    w.u32(static_cast<std::uint32_t>(s.r1));
    w.u32(static_cast<std::uint32_t>(s.r2));
    w.u32(s.shape == SupportShape::Ellipsoidal ? 1u : 0u);
    w.u32(static_cast<std::uint32_t>(s.offsets.size()));
    for (const auto& [p, q] : s.offsets) {
        w.i32(p);
        w.i32(q);
    }
}

KernelSupport read_support(Reader& r, const std::string& path) {
    KernelSupport s;
    s.r1 = static_cast<int>(r.u32("support r1"));
    s.r2 = static_cast<int>(r.u32("support r2"));
    const std::uint32_t shape = r.u32("support shape");
    if (shape > 1) throw io_error(io_error::Kind::Malformed, path + ": unknown support shape tag");
    s.shape = shape == 1 ? SupportShape::Ellipsoidal : SupportShape::Rectangular;
    const std::uint32_t count = r.u32("support offset count");
    if (count == 0 || count > kDimLimit) throw io_error(io_error::Kind::DimOverflow, path + ": bad offset count");
    for (std::uint32_t i = 0; i < count; ++i) {
        const int p = r.i32("offset p");
        const int q = r.i32("offset q");
        s.offsets.emplace_back(p, q);
    }
    return s;
}

void write_conv_layer(Writer& w, const neuralk::ConvLayerParams& layer) {
    w.u32(static_cast<std::uint32_t>(layer.in_channels));
    w.u32(static_cast<std::uint32_t>(layer.out_channels));
    write_support(w, layer.support);
    for (double v : layer.weights) w.f64(v);
}

neuralk::ConvLayerParams read_conv_layer(Reader& r, const std::string& path) {
    neuralk::ConvLayerParams layer;
    layer.in_channels = static_cast<int>(r.u32("layer input channels"));
    layer.out_channels = static_cast<int>(r.u32("layer output channels"));
    check_dims(layer.in_channels, layer.out_channels, 1, path);
    layer.support = read_support(r, path);
    layer.weights.resize(layer.weight_count());
    for (double& v : layer.weights) v = r.f64("layer weight");
    return layer;
}

} // namespace

void write_kspace(const KSpace& k, const std::string& path) {
    Writer w(path);
    w.magic("KSP1");
    w.u32(static_cast<std::uint32_t>(k.n1));
    w.u32(static_cast<std::uint32_t>(k.n2));
    w.u32(static_cast<std::uint32_t>(k.channels));
    w.bytes(k.data.data(), k.data.size() * sizeof(cplx));
    w.close(path);
}

KSpace read_kspace(const std::string& path) {
    Reader r(path, "KSP1");
    const std::uint32_t n1 = r.u32("n1"), n2 = r.u32("n2"), ch = r.u32("channel count");
    check_dims(n1, n2, ch, path);
    KSpace k(static_cast<int>(n1), static_cast<int>(n2), static_cast<int>(ch));
    r.raw(k.data.data(), k.data.size() * sizeof(cplx), "sample payload");
    r.expect_end();
    return k;
}

void write_mask(const SamplingMask& m, const std::string& path) {
    Writer w(path);
    w.magic("MSK1");
    w.u32(static_cast<std::uint32_t>(m.n1));
    w.u32(static_cast<std::uint32_t>(m.n2));
    w.i32(m.acs.row0);
    w.i32(m.acs.row1);
    w.i32(m.acs.col0);
    w.i32(m.acs.col1);
    w.bytes(m.sampled.data(), m.sampled.size());
    w.close(path);
}

SamplingMask read_mask(const std::string& path) {
    Reader r(path, "MSK1");
    const std::uint32_t n1 = r.u32("n1"), n2 = r.u32("n2");
    check_dims(n1, n2, 1, path);
    SamplingMask m(static_cast<int>(n1), static_cast<int>(n2));
    m.acs.row0 = r.i32("acs row0");
    m.acs.row1 = r.i32("acs row1");
    m.acs.col0 = r.i32("acs col0");
    m.acs.col1 = r.i32("acs col1");
    r.raw(m.sampled.data(), m.sampled.size(), "mask payload");
    r.expect_end();
    for (std::uint8_t v : m.sampled)
        if (v > 1) throw io_error(io_error::Kind::Malformed, path + ": mask bytes must be 0 or 1");
    validate(m);
    return m;
}

void write_nullspace(const NullspaceBasis& n, const std::string& path) {
    Writer w(path);
    w.magic("NSB1");
    w.u32(static_cast<std::uint32_t>(n.dim()));
    w.u32(static_cast<std::uint32_t>(n.count()));
    for (int c = 0; c < n.count(); ++c)
        for (int q = 0; q < n.dim(); ++q) {
            w.f64(n.n(q, c).real());
            w.f64(n.n(q, c).imag());
        }
    w.close(path);
}

NullspaceBasis read_nullspace(const std::string& path) {
    Reader r(path, "NSB1");
    const std::uint32_t q = r.u32("Q"), c = r.u32("C");
    check_dims(q, c, 1, path);
    NullspaceBasis n;
    n.n.resize(q, c);
    for (std::uint32_t j = 0; j < c; ++j)
        for (std::uint32_t i = 0; i < q; ++i) {
            const double re = r.f64("basis entry");
            const double im = r.f64("basis entry");
            n.n(i, j) = cplx(re, im);
        }
    r.expect_end();
    return n;
}

namespace {

void write_scalar(Writer& w, const std::string& name, double value) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.f64(value);
}

std::pair<std::string, double> read_scalar(Reader& r, const std::string& path) {
    const std::uint32_t len = r.u32("scalar name length");
    if (len > 256) throw io_error(io_error::Kind::Malformed, path + ": scalar name too long");
    std::string name(len, '\0');
    r.raw(name.data(), len, "scalar name");
    const double v = r.f64("scalar value");
    return {name, v};
}

} // namespace

void write_loraki_network(const LorakiNetwork& net, const std::string& path) {
    Writer w(path);
    w.magic("NNW1");
    w.u32(2);
    write_conv_layer(w, net.g1);
    write_conv_layer(w, net.g2);
    w.u32(3);
    write_scalar(w, "lambda", net.lambda.value);
    write_scalar(w, "k_iters", static_cast<double>(net.k_iters));
    write_scalar(w, "train_lambda", net.train_lambda ? 1.0 : 0.0);
    w.u32(0); // no offset lists
    w.close(path);
}

LorakiNetwork read_loraki_network(const std::string& path) {
    Reader r(path, "NNW1");
    const std::uint32_t layers = r.u32("layer count");
    if (layers != 2) throw io_error(io_error::Kind::Malformed, path + ": expected exactly two layers");
    LorakiNetwork net;
    net.g1 = read_conv_layer(r, path);
    net.g2 = read_conv_layer(r, path);
    const std::uint32_t scalars = r.u32("scalar count");
    for (std::uint32_t i = 0; i < scalars; ++i) {
        const auto [name, v] = read_scalar(r, path);
        if (name == "lambda")
            net.lambda.value = v;
        else if (name == "k_iters")
            net.k_iters = static_cast<int>(v);
        else if (name == "train_lambda")
            net.train_lambda = v != 0.0;
    }
    const std::uint32_t lists = r.u32("offset list count");
    if (lists != 0) throw io_error(io_error::Kind::Malformed, path + ": unexpected offset lists");
    r.expect_end();
    return net;
}

void write_raki_network(const RakiNet& net, const std::string& path) {
    Writer w(path);
    w.magic("NNW1");
    w.u32(static_cast<std::uint32_t>(net.nets.size() * 3));
    for (const auto& cn : net.nets) {
        write_conv_layer(w, cn.f1);
        write_conv_layer(w, cn.f2);
        write_conv_layer(w, cn.f3);
    }
    w.u32(2);
    write_scalar(w, "complex_channels", static_cast<double>(net.complex_channels));
    write_scalar(w, "adam_steps", static_cast<double>(net.hyper.adam_steps));
    w.u32(static_cast<std::uint32_t>(net.configs.size()));
    for (const auto& offsets : net.configs) {
        w.u32(static_cast<std::uint32_t>(offsets.size()));
        for (const auto& [p, q] : offsets) {
            w.i32(p);
            w.i32(q);
        }
    }
    w.close(path);
}

RakiNet read_raki_network(const std::string& path) {
    Reader r(path, "NNW1");
    const std::uint32_t layers = r.u32("layer count");
    if (layers == 0 || layers % 3 != 0)
        throw io_error(io_error::Kind::Malformed, path + ": layer count must be a positive multiple of three");
    RakiNet net;
    for (std::uint32_t i = 0; i < layers / 3; ++i) {
        RakiNet::ChannelNet cn;
        cn.f1 = read_conv_layer(r, path);
        cn.f2 = read_conv_layer(r, path);
        cn.f3 = read_conv_layer(r, path);
        net.nets.push_back(std::move(cn));
    }
    const std::uint32_t scalars = r.u32("scalar count");
    for (std::uint32_t i = 0; i < scalars; ++i) {
        const auto [name, v] = read_scalar(r, path);
        if (name == "complex_channels") net.complex_channels = static_cast<int>(v);
        if (name == "adam_steps") net.hyper.adam_steps = static_cast<int>(v);
    }
    const std::uint32_t lists = r.u32("offset list count");
    for (std::uint32_t i = 0; i < lists; ++i) {
        const std::uint32_t count = r.u32("offset count");
        if (count > kDimLimit) throw io_error(io_error::Kind::DimOverflow, path + ": bad offset count");
        std::vector<std::pair<int, int>> offsets;
        for (std::uint32_t t = 0; t < count; ++t) {
            const int p = r.i32("offset p");
            const int q = r.i32("offset q");
            offsets.emplace_back(p, q);
        }
        net.configs.push_back(std::move(offsets));
    }
    r.expect_end();
    return net;
}

void write_pgm(const MagnitudeImage& img, const std::string& path, double scale) {
    if (scale <= 0.0) throw std::invalid_argument("write_pgm: scale must be positive");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(io_error::Kind::Io, "cannot open for writing: " + path);
    out << "P5\n" << img.n2 << " " << img.n1 << "\n65535\n";
    for (double v : img.data) {
        const double t = std::min(std::max(v / scale, 0.0), 1.0);
        const std::uint16_t s = static_cast<std::uint16_t>(t * 65535.0 + 0.5);
        // PGM stores 16-bit samples most significant byte first.
        const unsigned char hi = static_cast<unsigned char>(s >> 8), lo = static_cast<unsigned char>(s & 0xff);
        out.put(static_cast<char>(hi)).put(static_cast<char>(lo));
    }
    out.flush();
    if (!out) throw io_error(io_error::Kind::Io, "write failed: " + path);
}

MagnitudeImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(io_error::Kind::Io, "cannot open for reading: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw io_error(io_error::Kind::BadMagic, path + ": not a binary PGM");
    long w = 0, h = 0, maxval = 0;
    in >> w >> h >> maxval;
    if (!in || w <= 0 || h <= 0 || w > kDimLimit || h > kDimLimit)
        throw io_error(io_error::Kind::DimOverflow, path + ": bad image dimensions");
    if (maxval != 65535) throw io_error(io_error::Kind::Malformed, path + ": expected a 16-bit PGM");
    in.get(); // single whitespace after the header
    MagnitudeImage img(static_cast<int>(h), static_cast<int>(w));
    std::vector<unsigned char> buf(img.data.size() * 2);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        throw io_error(io_error::Kind::Truncated, path + ": pixel payload shorter than the header implies");
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<double>((buf[2 * i] << 8) | buf[2 * i + 1]) / 65535.0;
    return img;
}

std::string format_double(double v) {
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general,
                                   std::numeric_limits<double>::max_digits10);
    return std::string(buf.data(), res.ptr);
}

void write_csv(const std::vector<std::vector<std::string>>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(io_error::Kind::Io, "cannot open for writing: " + path);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i].find_first_of(",\n\r") != std::string::npos)
                throw std::invalid_argument("write_csv: fields must not contain commas or newlines");
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw io_error(io_error::Kind::Io, "write failed: " + path);
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(io_error::Kind::Io, "cannot open for reading: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                row.push_back(line.substr(start));
                break;
            }
            row.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace krecon
