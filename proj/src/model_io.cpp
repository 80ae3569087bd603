#include "cosmo/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cosmo/dataset.hpp"
#include "cosmo/error.hpp"

namespace cosmo {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'C', 'O', 'S', 'M', 'O', 'M', 'D', 'L'};

void put_u64(std::string& out, std::uint64_t x) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((x >> (8 * b)) & 0xffu));
}

void put_u32(std::string& out, std::uint32_t x) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((x >> (8 * b)) & 0xffu));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t u64() { return uint(8); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }

  std::string take(std::size_t n) {
    need(n);
    std::string out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail(ErrorKind::data, "model file is truncated");
  }

  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t x = 0;
    for (int b = 0; b < width; ++b) {
      x |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    }
    pos_ += static_cast<std::size_t>(width);
    return x;
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const ModelFile& model) {
  const Params& p = model.params;
  const ModelDims& d = p.dims();
  if (!(d.layout() == model.vocabulary.layout())) {
    fail(ErrorKind::usage, "model dimensions do not match its vocabulary");
  }
  json header;
  header["model_kind"] = std::string(to_string(p.kind()));
  header["dims"] = {{"objects", d.objects},
                    {"relation_types", d.relation_types},
                    {"affordance_types", d.affordance_types},
                    {"hidden", d.hidden}};
  header["vocabulary"] = json::parse(vocabulary_to_json(model.vocabulary));
  header["vocabulary_fingerprint"] = fingerprint_hex(model.vocabulary.fingerprint());
  header["schedule"] = {{"kind", std::string(to_string(model.schedule.kind()))},
                        {"t0", model.schedule.initial()},
                        {"a", model.schedule.coefficient()}};
  header["config"] = model.config_json ? json::parse(*model.config_json) : json(nullptr);
  json tensors = json::array();
  for (const auto& t : p.tensors()) tensors.push_back({{"name", t.name}, {"shape", t.shape}});
  header["tensors"] = std::move(tensors);
  const std::string text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kModelFormatVersion);
  put_u64(out, text.size());
  out += text;
  out.reserve(out.size() + 8 * p.size());
  for (double v : p.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

ModelFile deserialize_model(const std::string& bytes) {
  Reader in(bytes);
  if (in.take(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    fail(ErrorKind::data, "not a model file (bad magic)");
  }
  const std::uint32_t version = in.u32();
  if (version != kModelFormatVersion) {
    fail(ErrorKind::data, "unsupported model format version " + std::to_string(version));
  }
  const std::uint64_t header_len = in.u64();
  if (header_len > bytes.size()) fail(ErrorKind::data, "model file is truncated");
  ModelFile out;
  try {
    const json header = json::parse(in.take(static_cast<std::size_t>(header_len)));
    const auto kind = parse_model_kind(header.at("model_kind").get<std::string>());
    const auto& dj = header.at("dims");
    ModelDims dims{dj.at("objects").get<std::size_t>(), dj.at("relation_types").get<std::size_t>(),
                   dj.at("affordance_types").get<std::size_t>(),
                   dj.at("hidden").get<std::vector<std::size_t>>()};
    out.vocabulary = parse_vocabulary_json(header.at("vocabulary").dump());
    if (fingerprint_hex(out.vocabulary.fingerprint()) !=
        header.at("vocabulary_fingerprint").get<std::string>()) {
      fail(ErrorKind::data, "model vocabulary does not match its stored fingerprint");
    }
    if (!(dims.layout() == out.vocabulary.layout())) {
      fail(ErrorKind::data, "model dimensions do not match its vocabulary");
    }
    const auto& sj = header.at("schedule");
    out.schedule = AnnealSchedule(parse_schedule_kind(sj.at("kind").get<std::string>()),
                                  sj.at("t0").get<double>(), sj.at("a").get<double>());
    if (!header.at("config").is_null()) out.config_json = header.at("config").dump(2);
    out.params = Params(kind, dims);
    const auto& tj = header.at("tensors");
    const auto& declared = out.params.tensors();
    if (tj.size() != declared.size()) fail(ErrorKind::data, "model tensor list is inconsistent");
    for (std::size_t i = 0; i < declared.size(); ++i) {
      if (tj[i].at("name").get<std::string>() != declared[i].name ||
          tj[i].at("shape").get<std::vector<std::size_t>>() != declared[i].shape) {
        fail(ErrorKind::data, "model tensor '" + declared[i].name + "' has an unexpected shape");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::data, std::string("malformed model header: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::data) throw;
    fail(ErrorKind::data, std::string("malformed model header: ") + e.what());
  }
  for (double& v : out.params.values()) v = std::bit_cast<double>(in.u64());
  if (!in.done()) fail(ErrorKind::data, "model file has trailing bytes");
  if (!out.params.all_finite()) fail(ErrorKind::data, "model file holds non-finite weights");
  return out;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::data, "cannot write model file " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorKind::data, "failed writing model file " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::data, "cannot open model file " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  try {
    return deserialize_model(buf.str());
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace cosmo
