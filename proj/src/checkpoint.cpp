#include "v2x/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace v2x {

namespace {

constexpr std::array<char, 8> kMagic{'V', '2', 'X', 'Q', 'N', 'E', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_le(std::ostream& out, T value) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const std::string& path) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw CheckpointError("truncated checkpoint '" + path + "'");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

std::string sizes_to_string(const std::vector<int>& sizes) {
    std::string s;
    for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? "-" : "") + std::to_string(sizes[i]);
    return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const dqn::QNetwork<double>& net, const std::string& layout) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
    out.write(kMagic.data(), kMagic.size());
    write_le<std::uint32_t>(out, kVersion);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(layout.size()));
    out.write(layout.data(), static_cast<std::streamsize>(layout.size()));
    const auto sizes = net.layer_sizes();
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(sizes.size()));
    for (int s : sizes) write_le<std::uint64_t>(out, static_cast<std::uint64_t>(s));
    for (const auto& layer : net.layers) {
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) write_le<double>(out, layer.weights(r, c));
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) write_le<double>(out, layer.bias(r));
    }
    if (!out) throw CheckpointError("failed writing checkpoint '" + path + "'");
}

dqn::QNetwork<double> load_checkpoint(const std::string& path, const std::vector<int>& expected_sizes,
                                      const std::string& expected_layout) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("missing checkpoint '" + path + "'");
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
        throw CheckpointError("'" + path + "' is not a Q-network checkpoint");
    const auto version = read_le<std::uint32_t>(in, path);
    if (version != kVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    const auto layout_len = read_le<std::uint32_t>(in, path);
    if (layout_len > 4096) throw CheckpointError("corrupt layout tag in '" + path + "'");
    std::string layout(layout_len, '\0');
    if (!in.read(layout.data(), layout_len)) throw CheckpointError("truncated checkpoint '" + path + "'");
    if (layout != expected_layout)
        throw CheckpointError("action layout mismatch in '" + path + "': file has '" + layout + "', expected '" +
                              expected_layout + "'");
    const auto count = read_le<std::uint32_t>(in, path);
    if (count > 64) throw CheckpointError("corrupt layer count in '" + path + "'");
    std::vector<int> sizes(count);
    for (auto& s : sizes) s = static_cast<int>(read_le<std::uint64_t>(in, path));
    if (sizes != expected_sizes)
        throw CheckpointError("layer size mismatch in '" + path + "': file has " + sizes_to_string(sizes) +
                              ", expected " + sizes_to_string(expected_sizes));
    dqn::QNetwork<double> net;
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        dqn::DenseLayer<double> layer{Eigen::MatrixXd(sizes[l], sizes[l - 1]), Eigen::VectorXd(sizes[l])};
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = read_le<double>(in, path);
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = read_le<double>(in, path);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

}  // namespace v2x
