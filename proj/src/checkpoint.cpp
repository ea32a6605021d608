#include "tspg/checkpoint.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tspg {
namespace {

constexpr std::string_view kMagic = "tspg-checkpoint 1";

void write_vector(std::string& out, std::string_view label, const ParameterVector& v) {
  out += "weights ";
  out += label;
  out += ' ';
  out += std::to_string(v.size());
  out += '\n';
  char buf[64];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%a", v[i]);
    if (i) out += ' ';
    out += buf;
  }
  out += '\n';
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  int line_number() const { return line_; }

  std::string_view next() {
    if (done()) fail("unexpected end of checkpoint");
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    const std::string_view line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_;
    return line;
  }

  // Reads "<key> <value>" and returns the value.
  std::string expect(std::string_view key) {
    const std::string_view line = next();
    if (line.substr(0, key.size()) != key || line.size() <= key.size() || line[key.size()] != ' ') {
      fail("expected '" + std::string(key) + "'");
    }
    return std::string(line.substr(key.size() + 1));
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("checkpoint line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

long long to_integer(const LineReader& r, const std::string& s) {
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno || end == s.c_str() || *end != '\0') r.fail("bad integer '" + s + "'");
  return v;
}

// `header_line` is a "weights <label> <count>" line already consumed from `r`.
ParameterVector read_vector(LineReader& r, std::string_view header_line, std::string_view label,
                            std::size_t expected) {
  std::istringstream header{std::string(header_line)};
  std::string kw, name;
  std::size_t n = 0;
  header >> kw >> name >> n;
  if (kw != "weights") r.fail("expected weights");
  if (name != label) r.fail("expected weights " + std::string(label));
  if (n != expected) r.fail("weight count does not match the feature count");
  const std::string line(r.next());
  std::vector<double> values;
  values.reserve(n);
  const char* p = line.c_str();
  for (std::size_t i = 0; i < n; ++i) {
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) r.fail("bad weight value");
    values.push_back(v);
    p = end;
  }
  while (*p == ' ') ++p;
  if (*p != '\0') r.fail("trailing data after weights");
  return ParameterVector(std::move(values));
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  std::string out;
  out += kMagic;
  out += '\n';
  out += "game " + ck.game_id + '\n';
  out += "hex_size " + std::to_string(ck.game_options.hex_size) + '\n';
  out += "games_played " + std::to_string(ck.games_played) + '\n';
  out += "update_steps " + std::to_string(ck.update_steps) + '\n';
  out += "features " + std::to_string(ck.features.size()) + '\n';
  out += ck.features.serialize();
  write_vector(out, "ce", ck.params.ce);
  if (ck.params.tspg) write_vector(out, "tspg", *ck.params.tspg);
  if (ck.params.ce_double) write_vector(out, "ce_double", *ck.params.ce_double);
  out += "end\n";
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view text) {
  LineReader r(text);
  if (r.next() != kMagic) r.fail("not a checkpoint (bad header)");
  Checkpoint ck;
  ck.game_id = r.expect("game");
  ck.game_options.hex_size = static_cast<int>(to_integer(r, r.expect("hex_size")));
  ck.games_played = static_cast<int>(to_integer(r, r.expect("games_played")));
  ck.update_steps = to_integer(r, r.expect("update_steps"));
  const long long n_features = to_integer(r, r.expect("features"));
  if (n_features < 0) r.fail("negative feature count");

  std::unique_ptr<Game> game;
  try {
    game = make_game(ck.game_id, ck.game_options);
  } catch (const std::exception& e) {
    r.fail(e.what());
  }
  std::string spec_lines;
  for (long long i = 0; i < n_features; ++i) {
    spec_lines += r.next();
    spec_lines += '\n';
  }
  try {
    ck.features = FeatureSet::deserialize(spec_lines, *game);
  } catch (const std::exception& e) {
    r.fail(e.what());
  }
  if (ck.features.size() != n_features) r.fail("feature count mismatch");

  const auto n = static_cast<std::size_t>(n_features);
  ck.params.ce = read_vector(r, r.next(), "ce", n);
  while (true) {
    const std::string_view line = r.next();
    if (line == "end") break;
    if (line.starts_with("weights tspg ") && !ck.params.tspg) {
      ck.params.tspg = read_vector(r, line, "tspg", n);
    } else if (line.starts_with("weights ce_double ") && !ck.params.ce_double) {
      ck.params.ce_double = read_vector(r, line, "ce_double", n);
    } else {
      r.fail("expected optional weights or end");
    }
  }
  return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << serialize_checkpoint(ck);
  f.close();
  if (!f) throw std::runtime_error("failed writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return deserialize_checkpoint(ss.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace tspg
