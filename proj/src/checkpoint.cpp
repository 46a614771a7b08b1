#include "fairtl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "fairtl/hash.hpp"

namespace fairtl {

namespace {

constexpr char kMagic[8] = {'F', 'T', 'L', 'C', 'K', 'P', 'T', '\n'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

void put_f64(std::vector<std::byte>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_u8(std::vector<std::byte>& out, std::uint8_t v) { out.push_back(static_cast<std::byte>(v)); }

class Reader {
public:
    Reader(const std::byte* data, std::size_t size) : data_(data), size_(size) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

    std::uint32_t u32() {
        const std::byte* p = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        const std::byte* p = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::size_t remaining() const { return size_ - pos_; }

private:
    const std::byte* take(std::size_t n) {
        if (pos_ + n > size_) throw std::runtime_error("checkpoint truncated");
        const std::byte* p = data_ + pos_;
        pos_ += n;
        return p;
    }

    const std::byte* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

void put_mlp(std::vector<std::byte>& out, const MlpParams& net) {
    put_u32(out, static_cast<std::uint32_t>(net.layer_dims.size()));
    for (std::size_t d : net.layer_dims) put_u64(out, d);
    for (const LayerSpec& a : net.activations) {
        put_u8(out, static_cast<std::uint8_t>(a.act));
        put_f64(out, a.leaky_slope);
    }
    for (std::size_t i = 0; i < net.num_layers(); ++i) {
        for (double v : net.weights[i].values()) put_f64(out, v);
        for (double v : net.biases[i]) put_f64(out, v);
    }
}

MlpParams read_mlp(Reader& r) {
    MlpParams net;
    const std::uint32_t n_dims = r.u32();
    if (n_dims < 3 || n_dims > 64) throw std::runtime_error("checkpoint: bad layer count");
    net.layer_dims.resize(n_dims);
    for (auto& d : net.layer_dims) {
        d = r.u64();
        if (d == 0 || d > (1u << 20)) throw std::runtime_error("checkpoint: bad layer width");
    }
    const std::size_t L = n_dims - 1;
    for (std::size_t i = 0; i < L; ++i) {
        const std::uint8_t tag = r.u8();
        if (tag > 3) throw std::runtime_error("checkpoint: bad activation tag");
        net.activations.push_back({static_cast<Activation>(tag), r.f64()});
    }
    for (std::size_t i = 0; i < L; ++i) {
        Matrix w(net.layer_dims[i + 1], net.layer_dims[i]);
        for (double& v : w.values()) v = r.f64();
        net.weights.push_back(std::move(w));
        std::vector<double> b(net.layer_dims[i + 1]);
        for (double& v : b) v = r.f64();
        net.biases.push_back(std::move(b));
    }
    net.validate();
    return net;
}

void put_adam(std::vector<std::byte>& out, const AdamState& s) {
    put_u8(out, s.initialized() ? 1 : 0);
    if (!s.initialized()) return;
    put_u64(out, static_cast<std::uint64_t>(s.step));
    put_u32(out, static_cast<std::uint32_t>(s.m_w.size()));
    for (std::size_t i = 0; i < s.m_w.size(); ++i) {
        for (double v : s.m_w[i].values()) put_f64(out, v);
        for (double v : s.v_w[i].values()) put_f64(out, v);
        for (double v : s.m_b[i]) put_f64(out, v);
        for (double v : s.v_b[i]) put_f64(out, v);
    }
}

AdamState read_adam(Reader& r, const MlpParams& net) {
    AdamState s;
    if (r.u8() == 0) return s;
    s = AdamState::zeros_like(net);
    s.step = static_cast<std::int64_t>(r.u64());
    const std::uint32_t layers = r.u32();
    if (layers != net.num_layers()) throw std::runtime_error("checkpoint: moment layer mismatch");
    for (std::size_t i = 0; i < layers; ++i) {
        for (double& v : s.m_w[i].values()) v = r.f64();
        for (double& v : s.v_w[i].values()) v = r.f64();
        for (double& v : s.m_b[i]) v = r.f64();
        for (double& v : s.v_b[i]) v = r.f64();
    }
    return s;
}

}  // namespace

void save_checkpoint(const GanState& state, const std::filesystem::path& path,
                     const CheckpointMeta& meta) {
    state.validate();

    std::vector<std::byte> payload;
    put_mlp(payload, state.generator);
    put_mlp(payload, state.discriminator);
    if (state.frozen_source_discriminator) put_mlp(payload, *state.frozen_source_discriminator);
    put_adam(payload, state.opt.gen);
    put_adam(payload, state.opt.disc);

    std::vector<std::byte> out;
    out.reserve(payload.size() + 64);
    for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
    put_u32(out, kVersion);
    put_u8(out, static_cast<std::uint8_t>(state.stage));
    put_u8(out, state.frozen_source_discriminator ? 1 : 0);
    put_u8(out, state.opt.gen.initialized() || state.opt.disc.initialized() ? 1 : 0);
    put_u8(out, 0);
    put_u64(out, meta.config_hash);
    put_u64(out, meta.seed);
    put_u64(out, payload.size());
    out.insert(out.end(), payload.begin(), payload.end());
    put_u64(out, fnv1a64(payload));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write checkpoint: " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("checkpoint write failed: " + path.string());
}

GanState load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta_out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint: " + path.string());
    std::vector<std::byte> bytes;
    f.seekg(0, std::ios::end);
    bytes.resize(static_cast<std::size_t>(f.tellg()));
    f.seekg(0);
    f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("checkpoint read failed: " + path.string());

    Reader r(bytes.data(), bytes.size());
    char magic[8];
    for (char& c : magic) c = static_cast<char>(r.u8());
    if (std::memcmp(magic, kMagic, 8) != 0) {
        throw std::runtime_error("not a checkpoint file: " + path.string());
    }
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) +
                                 " (expected " + std::to_string(kVersion) + ")");
    }
    CheckpointMeta meta;
    meta.version = version;
    const std::uint8_t stage_tag = r.u8();
    if (stage_tag > 2) throw std::runtime_error("checkpoint: bad stage tag");
    meta.stage = static_cast<Stage>(stage_tag);
    const bool has_ds = r.u8() != 0;
    r.u8();  // has_opt, informational
    r.u8();  // reserved
    meta.config_hash = r.u64();
    meta.seed = r.u64();
    const std::uint64_t payload_bytes = r.u64();
    if (r.remaining() != payload_bytes + 8) {
        throw std::runtime_error("checkpoint truncated or trailing garbage: " + path.string());
    }
    const std::byte* payload_start = bytes.data() + (bytes.size() - r.remaining());

    GanState state;
    state.stage = meta.stage;
    state.generator = read_mlp(r);
    state.discriminator = read_mlp(r);
    if (has_ds) state.frozen_source_discriminator = read_mlp(r);
    state.opt.gen = read_adam(r, state.generator);
    state.opt.disc = read_adam(r, state.discriminator);

    if (r.remaining() != 8) throw std::runtime_error("checkpoint: payload length mismatch");
    const std::uint64_t stored = r.u64();
    const std::uint64_t computed = fnv1a64(std::span(payload_start, payload_bytes));
    if (stored != computed) throw std::runtime_error("checkpoint corrupt: checksum mismatch");

    state.validate();
    if (meta_out) *meta_out = meta;
    return state;
}

}  // namespace fairtl
