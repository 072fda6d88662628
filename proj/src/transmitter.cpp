#include "oolink/transmitter.hpp"

#include <stdexcept>

#include "oolink/convcode.hpp"
#include "oolink/crc32.hpp"
#include "oolink/fft.hpp"

namespace oolink {
namespace {

std::vector<cxd> training_symbol(const FrameConfig& config,
                                 const std::vector<std::pair<int, cxd>>& seq, double scale) {
    std::vector<cxd> bins(config.nfft, cxd(0.0, 0.0));
    for (const auto& [k, v] : seq) bins[config.bin(k)] = v * scale;
    return idft(bins);
}

}  // namespace

SampleStream Frame::concat() const {
    SampleStream out;
    out.rate_hz = stf.rate_hz;
    out.samples.reserve(total_len());
    out.samples.insert(out.samples.end(), stf.samples.begin(), stf.samples.end());
    out.samples.insert(out.samples.end(), ltf.samples.begin(), ltf.samples.end());
    for (const auto& s : payload_symbols)
        out.samples.insert(out.samples.end(), s.samples.begin(), s.samples.end());
    return out;
}

SampleStream build_stf(const FrameConfig& config) {
    // All STF tones sit on multiples of 4, so one 64-point symbol is
    // 16-periodic; tile the first period ten times.
    std::vector<cxd> sym = training_symbol(config, config.stf_sequence, config.stf_bin_scale());
    SampleStream out;
    out.rate_hz = config.base_rate_hz;
    out.samples.reserve(160);
    for (int rep = 0; rep < 10; ++rep)
        out.samples.insert(out.samples.end(), sym.begin(), sym.begin() + 16);
    return out;
}

SampleStream build_ltf(const FrameConfig& config) {
    std::vector<cxd> block = training_symbol(config, config.ltf_sequence, config.tx_bin_scale());
    SampleStream out;
    out.rate_hz = config.base_rate_hz;
    out.samples.reserve(160);
    out.samples.insert(out.samples.end(), block.begin() + 32, block.end());  // 32-sample guard
    out.samples.insert(out.samples.end(), block.begin(), block.end());
    out.samples.insert(out.samples.end(), block.begin(), block.end());
    return out;
}

int n_payload_symbols(int payload_len, const Mcs& mcs, const FrameConfig& config) {
    const int info_bits = (payload_len + 4) * 8;
    const int coded_bits = mcs.coding == Coding::HalfRate ? info_bits * 2 : info_bits;
    const int bits_per_sym = static_cast<int>(config.data_subcarriers.size()) *
                             bits_per_symbol(mcs.scheme);
    return (coded_bits + bits_per_sym - 1) / bits_per_sym;
}

std::vector<uint8_t> bytes_to_bits(const std::vector<uint8_t>& bytes) {
    std::vector<uint8_t> bits;
    bits.reserve(bytes.size() * 8);
    for (uint8_t by : bytes)
        for (int b = 0; b < 8; ++b) bits.push_back((by >> b) & 1);
    return bits;
}

std::vector<uint8_t> bits_to_bytes(const std::vector<uint8_t>& bits) {
    std::vector<uint8_t> bytes(bits.size() / 8, 0);
    for (std::size_t i = 0; i < bytes.size() * 8; ++i)
        if (bits[i]) bytes[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
    return bytes;
}

Frame assemble_frame(const std::vector<uint8_t>& payload_bytes, const Mcs& mcs,
                     const FrameConfig& config) {
    if (payload_bytes.empty()) throw std::invalid_argument("assemble_frame: empty payload");

    Frame frame;
    frame.meta.mcs = mcs;
    frame.meta.payload_len = static_cast<int>(payload_bytes.size());
    frame.meta.payload = payload_bytes;
    frame.meta.crc = crc32(payload_bytes);

    std::vector<uint8_t> bytes = payload_bytes;
    for (int i = 0; i < 4; ++i)
        bytes.push_back(static_cast<uint8_t>((frame.meta.crc >> (8 * i)) & 0xFF));
    frame.meta.info_bits = bytes_to_bits(bytes);

    std::vector<uint8_t> coded = mcs.coding == Coding::HalfRate
                                     ? conv_encode(frame.meta.info_bits)
                                     : frame.meta.info_bits;

    const int bps = bits_per_symbol(mcs.scheme);
    const int per_sym = static_cast<int>(config.data_subcarriers.size()) * bps;
    const int n_sym = n_payload_symbols(frame.meta.payload_len, mcs, config);
    frame.meta.n_payload_symbols = n_sym;
    coded.resize(static_cast<std::size_t>(n_sym) * per_sym, 0);  // zero pad bits

    std::vector<cxd> points = modulate_bits(coded, mcs.scheme);

    frame.stf = build_stf(config);
    frame.ltf = build_ltf(config);
    const double scale = config.tx_bin_scale();

    std::size_t pt = 0;
    for (int s = 0; s < n_sym; ++s) {
        std::vector<cxd> bins(config.nfft, cxd(0.0, 0.0));
        for (int k : config.data_subcarriers) bins[config.bin(k)] = points[pt++] * scale;
        for (std::size_t p = 0; p < config.pilot_subcarriers.size(); ++p)
            bins[config.bin(config.pilot_subcarriers[p])] = cxd(config.pilot_values[p], 0.0) * scale;
        std::vector<cxd> core = idft(bins);

        SampleStream sym;
        sym.rate_hz = config.base_rate_hz;
        sym.samples.reserve(config.symbol_len());
        sym.samples.insert(sym.samples.end(), core.end() - config.cp_len, core.end());
        sym.samples.insert(sym.samples.end(), core.begin(), core.end());
        frame.payload_symbols.push_back(std::move(sym));
    }
    return frame;
}

}  // namespace oolink
