#include "nn/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "support/errors.hpp"

namespace echofilter::nn {

namespace {

using nlohmann::json;

json config_to_json(const ModelConfig& c) {
    return json{{"width", c.width},       {"n_blocks", c.n_blocks},
                {"kernel", c.kernel},     {"expansion", c.expansion},
                {"se_reduction", c.se_reduction}, {"out_planes", c.out_planes},
                {"groups", c.groups},     {"input_w", c.input_w},
                {"input_h", c.input_h}};
}

ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    c.width = j.at("width");
    c.n_blocks = j.at("n_blocks");
    c.kernel = j.at("kernel");
    c.expansion = j.at("expansion");
    c.se_reduction = j.at("se_reduction");
    c.out_planes = j.at("out_planes");
    c.groups = j.at("groups");
    c.input_w = j.at("input_w");
    c.input_h = j.at("input_h");
    return c;
}

json read_manifest_line(std::ifstream& in, const std::string& path) {
    std::string magic;
    if (!std::getline(in, magic) || magic != "ECKPT 1")
        throw StructuralError("not a checkpoint file: " + path);
    std::string manifest_line;
    if (!std::getline(in, manifest_line))
        throw StructuralError("checkpoint manifest missing: " + path);
    try {
        return json::parse(manifest_line);
    } catch (const json::exception& e) {
        throw ParseError("checkpoint manifest unreadable (" + std::string(e.what()) + "): " +
                         path);
    }
}

}  // namespace

void save_checkpoint(UNet& net, const std::string& path) {
    json manifest;
    manifest["config"] = config_to_json(net.config());
    json tensors = json::array();
    const auto params = net.params();
    const auto state = net.state_tensors();
    for (const auto& p : params)
        tensors.push_back({{"path", p.path}, {"numel", p.value->numel()}});
    for (const auto& [name, t] : state)
        tensors.push_back({{"path", name}, {"numel", t->numel()}});
    manifest["tensors"] = tensors;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out << "ECKPT 1\n" << manifest.dump() << "\n";
    for (const auto& p : params)
        out.write(reinterpret_cast<const char*>(p.value->ptr()),
                  static_cast<std::streamsize>(p.value->numel() * sizeof(float)));
    for (const auto& [name, t] : state)
        out.write(reinterpret_cast<const char*>(t->ptr()),
                  static_cast<std::streamsize>(t->numel() * sizeof(float)));
    if (!out) throw IoError("checkpoint write failed: " + path);
}

ModelConfig peek_checkpoint_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    return config_from_json(read_manifest_line(in, path).at("config"));
}

UNet load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    const json manifest = read_manifest_line(in, path);
    UNet net(config_from_json(manifest.at("config")), 0);

    auto params = net.params();
    auto state = net.state_tensors();
    size_t idx = 0;
    auto read_into = [&](const std::string& name, Tensor* t) {
        const auto& entry = manifest.at("tensors").at(idx++);
        if (entry.at("path") != name || entry.at("numel") != t->numel())
            throw StructuralError("checkpoint layout mismatch at '" + name + "': " + path);
        in.read(reinterpret_cast<char*>(t->ptr()),
                static_cast<std::streamsize>(t->numel() * sizeof(float)));
        if (!in) throw StructuralError("truncated checkpoint payload: " + path);
    };
    for (auto& p : params) read_into(p.path, p.value);
    for (auto& [name, t] : state) read_into(name, t);
    return net;
}

}  // namespace echofilter::nn
