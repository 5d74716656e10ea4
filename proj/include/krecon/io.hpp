#pragma once

#include "krecon/kspace.hpp"
#include "krecon/loraki.hpp"
#include "krecon/loraks.hpp"
#include "krecon/raki.hpp"
#include "krecon/sampling.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace krecon {

// All on-disk formats are little-endian with 64-bit floating point
// payloads; byte-exact layouts are documented in docs/FORMATS.md.
struct io_error : std::runtime_error {
    enum class Kind { BadMagic, Truncated, DimOverflow, Malformed, Io };
    Kind kind;
    io_error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// "KSP1": n1, n2, L then interleaved re/im samples, channel fastest.
void write_kspace(const KSpace& k, const std::string& path);
KSpace read_kspace(const std::string& path);

// "MSK1": n1, n2, ACS rectangle (four int32, -1 sentinels), 0/1 bytes.
void write_mask(const SamplingMask& m, const std::string& path);
SamplingMask read_mask(const std::string& path);

// "NSB1": Q, C then column-major complex entries.
void write_nullspace(const NullspaceBasis& n, const std::string& path);
NullspaceBasis read_nullspace(const std::string& path);

// "NNW1": convolution layer list (explicit supports), named scalars,
// optional offset lists (used by the per-configuration networks).
void write_loraki_network(const LorakiNetwork& net, const std::string& path);
LorakiNetwork read_loraki_network(const std::string& path);
void write_raki_network(const RakiNet& net, const std::string& path);
RakiNet read_raki_network(const std::string& path);

// 16-bit binary PGM; values clamped to [0, scale] and quantized.
void write_pgm(const MagnitudeImage& img, const std::string& path, double scale);
MagnitudeImage read_pgm(const std::string& path);

// Minimal CSV (fields must not contain commas or newlines); doubles
// formatted so that write/read round-trips are exact.
void write_csv(const std::vector<std::vector<std::string>>& rows, const std::string& path);
std::vector<std::vector<std::string>> read_csv(const std::string& path);
std::string format_double(double v);

} // namespace krecon
