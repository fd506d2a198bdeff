#include "hrom/neural/container.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hrom/errors.hpp"

namespace hrom {

namespace {

constexpr std::string_view kMagic = "HROMCONTAINER";

bool is_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t') return false;
  return true;
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}

void write_values(std::ostream& out, const DenseMatrix& m) {
  std::vector<char> buf(m.size() * 8);
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(m.data()[i]);
    bits = to_little_endian(bits);
    std::memcpy(buf.data() + 8 * i, &bits, 8);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void read_values(std::istream& in, DenseMatrix& m, const std::string& name) {
  std::vector<char> buf(m.size() * 8);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    throw IoError("container: truncated payload for tensor '" + name + "'");
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, buf.data() + 8 * i, 8);
    m.data()[i] = std::bit_cast<double>(to_little_endian(bits));
  }
}

}  // namespace

void Container::set_meta(const std::string& key, const std::string& value) {
  if (!is_token(key)) throw ValidationError("container: meta key must be a non-empty token");
  if (value.find('\n') != std::string::npos) throw ValidationError("container: meta value must be one line");
  for (auto& [k, v] : meta_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  meta_.emplace_back(key, value);
}

std::optional<std::string> Container::find_meta(std::string_view key) const {
  for (const auto& [k, v] : meta_)
    if (k == key) return v;
  return std::nullopt;
}

const std::string& Container::meta(std::string_view key) const {
  for (const auto& [k, v] : meta_)
    if (k == key) return v;
  throw IoError("container: missing meta field '" + std::string(key) + "'");
}

void Container::add_tensor(const std::string& name, DenseMatrix value, const std::string& group) {
  if (!is_token(name) || !is_token(group)) throw ValidationError("container: tensor name and group must be tokens");
  if (find_tensor(name)) throw ValidationError("container: duplicate tensor '" + name + "'");
  ContainerTensor t;
  t.name = name;
  t.group = group;
  t.rows = value.rows();
  t.cols = value.cols();
  t.value = std::move(value);
  tensors_.push_back(std::move(t));
}

const ContainerTensor* Container::find_tensor(std::string_view name) const {
  for (const auto& t : tensors_)
    if (t.name == name) return &t;
  return nullptr;
}

const DenseMatrix& Container::tensor(std::string_view name) const {
  const ContainerTensor* t = find_tensor(name);
  if (!t) throw IoError("container: missing tensor '" + std::string(name) + "'");
  return t->value;
}

void Container::write(std::ostream& out) const {
  std::ostringstream header;
  header << kMagic << '\n' << "format_version " << version_ << '\n' << "kind " << kind_ << '\n';
  for (const auto& [k, v] : meta_) header << "meta " << k << ' ' << v << '\n';
  for (const auto& t : tensors_) header << "tensor " << t.name << ' ' << t.rows << ' ' << t.cols << ' ' << t.group << '\n';
  header << "end\n";
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (const auto& t : tensors_) write_values(out, t.value);
  if (!out) throw IoError("container: write failed");
}

std::string Container::to_bytes() const {
  std::ostringstream out(std::ios::binary);
  write(out);
  return out.str();
}

void Container::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write(out);
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Container Container::read(std::istream& in, bool payload) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw IoError("container: bad magic");
  if (!std::getline(in, line) || line.rfind("format_version ", 0) != 0) throw IoError("container: missing format_version");
  const int version = std::stoi(line.substr(15));
  if (version != kFormatVersion) throw IoError("container: unsupported format version " + std::to_string(version));
  if (!std::getline(in, line) || line.rfind("kind ", 0) != 0) throw IoError("container: missing kind");
  Container c(line.substr(5));
  c.version_ = version;
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == "end") {
      ended = true;
      break;
    }
    if (line.rfind("meta ", 0) == 0) {
      const std::string rest = line.substr(5);
      const auto sp = rest.find(' ');
      if (sp == std::string::npos) throw IoError("container: malformed meta line");
      c.meta_.emplace_back(rest.substr(0, sp), rest.substr(sp + 1));
    } else if (line.rfind("tensor ", 0) == 0) {
      std::istringstream ls(line.substr(7));
      ContainerTensor t;
      if (!(ls >> t.name >> t.rows >> t.cols >> t.group)) throw IoError("container: malformed tensor line");
      c.tensors_.push_back(std::move(t));
    } else {
      throw IoError("container: unexpected header line '" + line + "'");
    }
  }
  if (!ended) throw IoError("container: header not terminated");
  if (payload) {
    for (auto& t : c.tensors_) {
      t.value = DenseMatrix(t.rows, t.cols);
      read_values(in, t.value, t.name);
    }
  }
  return c;
}

Container Container::from_bytes(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read(in);
}

Container Container::load(const std::filesystem::path& path, bool payload) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read(in, payload);
}

}  // namespace hrom
