#include "pinch/model_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <zlib.h>

#include "pinch/errors.hpp"

namespace pinch {

namespace {

constexpr char magic[4] = {'P', 'C', 'N', 'N'};

class Writer {
public:
    void u16(std::uint16_t v)
    {
        for (int i = 0; i < 2; ++i) {
            bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void f64(double d)
    {
        const auto v = std::bit_cast<std::uint64_t>(d);
        for (int i = 0; i < 8; ++i) {
            bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void block(std::initializer_list<std::size_t> dims, std::span<const double> data)
    {
        u32(static_cast<std::uint32_t>(dims.size()));
        for (auto d : dims) {
            u32(static_cast<std::uint32_t>(d));
        }
        for (double d : data) {
            f64(d);
        }
    }

    std::vector<std::uint8_t> bytes;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes(b) {}

    std::uint64_t uint(int width)
    {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) {
            v |= static_cast<std::uint64_t>(bytes[pos + static_cast<std::size_t>(i)]) << (8 * i);
        }
        pos += static_cast<std::size_t>(width);
        return v;
    }
    double f64() { return std::bit_cast<double>(uint(8)); }

    // Reads a block and checks it has exactly the expected dims.
    void block(std::initializer_list<std::size_t> dims, std::vector<double>& out, const char* name)
    {
        const auto rank = uint(4);
        if (rank != dims.size()) {
            throw CorruptArtifact(std::string("model block ") + name + ": unexpected rank");
        }
        std::size_t count = 1;
        for (auto d : dims) {
            if (uint(4) != d) {
                throw CorruptArtifact(std::string("model block ") + name + ": unexpected shape");
            }
            count *= d;
        }
        out.resize(count);
        for (auto& v : out) {
            v = f64();
        }
    }

    std::size_t position() const { return pos; }

private:
    void need(std::size_t n) const
    {
        if (pos + n > bytes.size()) {
            throw CorruptArtifact("model file truncated");
        }
    }

    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> data)
{
    return static_cast<std::uint32_t>(::crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

} // namespace

std::vector<std::uint8_t> serialize_model(const nn::CnnModel& model)
{
    const auto& p = model.params;
    Writer w;
    w.bytes.insert(w.bytes.end(), std::begin(magic), std::end(magic));
    w.u16(model.version);
    w.u16(static_cast<std::uint16_t>(model.trained_k));
    for (const auto* c : {&p.conv1, &p.conv2, &p.conv3}) {
        w.block({c->filters, 2, 2, c->channels}, c->weights);
        w.block({c->filters}, c->bias);
    }
    for (const auto* d : {&p.dense1, &p.out}) {
        w.block({d->outputs, d->inputs}, d->weights);
        w.block({d->outputs}, d->bias);
    }
    const double norm[4] = {model.norm.mean_re, model.norm.std_re, model.norm.mean_im, model.norm.std_im};
    w.block({4}, norm);
    const double dropout[1] = {model.dropout_rate};
    w.block({1}, dropout);
    w.u32(crc32_of(w.bytes));
    return std::move(w.bytes);
}

nn::CnnModel deserialize_model(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 12 || std::memcmp(bytes.data(), magic, 4) != 0) {
        throw CorruptArtifact("not a PCNN model file");
    }
    const auto body = bytes.first(bytes.size() - 4);
    Reader trailer(bytes.last(4));
    if (static_cast<std::uint32_t>(trailer.uint(4)) != crc32_of(body)) {
        throw CorruptArtifact("model checksum mismatch");
    }
    Reader r(body);
    r.uint(4);
    const auto version = static_cast<std::uint16_t>(r.uint(2));
    if (version != nn::model_format_version) {
        throw CorruptArtifact("unsupported model format version " + std::to_string(version));
    }
    const auto users = static_cast<std::size_t>(r.uint(2));
    if (users == 0) {
        throw CorruptArtifact("model has K = 0");
    }
    auto model = nn::make_model(users);
    model.version = version;
    auto& p = model.params;
    for (auto* c : {&p.conv1, &p.conv2, &p.conv3}) {
        r.block({c->filters, 2, 2, c->channels}, c->weights, "conv.weights");
        r.block({c->filters}, c->bias, "conv.bias");
    }
    for (auto* d : {&p.dense1, &p.out}) {
        r.block({d->outputs, d->inputs}, d->weights, "dense.weights");
        r.block({d->outputs}, d->bias, "dense.bias");
    }
    std::vector<double> norm;
    r.block({4}, norm, "norm");
    model.norm = {norm[0], norm[1], norm[2], norm[3]};
    std::vector<double> dropout;
    r.block({1}, dropout, "dropout");
    model.dropout_rate = dropout[0];
    if (r.position() != body.size()) {
        throw CorruptArtifact("trailing bytes in model file");
    }
    return model;
}

void save_model(const nn::CnnModel& model, const std::filesystem::path& path)
{
    const auto bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

nn::CnnModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CorruptArtifact("cannot open model " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

} // namespace pinch
