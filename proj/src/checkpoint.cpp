#include "ssrs/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <sstream>

#include "ssrs/csv.hpp"
#include "ssrs/error.hpp"

namespace ssrs {
namespace {

constexpr char kMagic[8] = {'S', 'S', 'R', 'S', 'B', 'U', 'F', '\0'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

struct Reader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  std::uint64_t u64() {
    if (pos + 8 > bytes.size()) throw FormatError("buffer checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos + static_cast<std::size_t>(i)]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
};

}  // namespace

std::vector<std::uint8_t> encode_buffer(const ReplayBuffer& buffer) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  const std::size_t m1 = buffer.state_dim(), m2 = buffer.action_dim();
  put_u64(out, kBufferFormatVersion);
  put_u64(out, m1);
  put_u64(out, m2);
  put_u64(out, buffer.capacity());
  put_u64(out, buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const auto& t = buffer.at(i);
    for (double v : t.state) put_f64(out, v);
    for (double v : t.action) put_f64(out, v);
    put_f64(out, t.reward);
    for (double v : t.next_state) put_f64(out, v);
    put_f64(out, t.terminal ? 1.0 : 0.0);
    put_f64(out, buffer.original_reward(i));
    put_f64(out, buffer.is_shaped(i) ? 1.0 : 0.0);
  }
  return out;
}

ReplayBuffer decode_buffer(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kBufferHeaderBytes || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw FormatError("not a replay buffer checkpoint");
  Reader r{bytes, 8};
  const auto version = r.u64();
  if (version != kBufferFormatVersion) throw FormatError("unsupported buffer format version " + std::to_string(version));
  const auto m1 = r.u64(), m2 = r.u64(), capacity = r.u64(), count = r.u64();
  if (count > capacity) throw FormatError("buffer count exceeds capacity");
  const std::size_t row = 2 * m1 + m2 + 4;
  if (bytes.size() != kBufferHeaderBytes + count * row * 8) throw FormatError("buffer payload size mismatch");
  ReplayBuffer buffer(capacity);
  for (std::uint64_t i = 0; i < count; ++i) {
    Transition t;
    t.state.resize(m1);
    t.action.resize(m2);
    t.next_state.resize(m1);
    for (auto& v : t.state) v = r.f64();
    for (auto& v : t.action) v = r.f64();
    t.reward = r.f64();
    for (auto& v : t.next_state) v = r.f64();
    t.terminal = r.f64() != 0.0;
    const double original = r.f64();
    const bool shaped = r.f64() != 0.0;
    buffer.push_raw(t, original, shaped);
  }
  return buffer;
}

void save_buffer(const std::filesystem::path& path, const ReplayBuffer& buffer) {
  const auto bytes = encode_buffer(buffer);
  write_text(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

ReplayBuffer load_buffer(const std::filesystem::path& path) {
  const auto text = read_text(path);
  return decode_buffer(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

namespace {

void encode_net(std::ostringstream& out, const char* name, const MlpNet& net) {
  out << "net " << name << ' ' << net.layers().size() << ' ' << format_real(net.dropout()) << '\n';
  const auto p = net.params();
  for (const auto& L : net.layers()) {
    out << "dense " << L.out << ' ' << L.in << '\n';
    for (std::size_t o = 0; o < L.out; ++o) {
      for (std::size_t i = 0; i < L.in; ++i) out << (i ? " " : "") << format_real(p[L.offset + o * L.in + i]);
      out << '\n';
    }
    for (std::size_t o = 0; o < L.out; ++o) out << (o ? " " : "") << format_real(p[L.offset + L.out * L.in + o]);
    out << '\n';
  }
}

struct TokenStream {
  std::istringstream in;
  std::string word() {
    std::string w;
    if (!(in >> w)) throw FormatError("parameter checkpoint truncated");
    return w;
  }
  void expect(const std::string& w) {
    const auto got = word();
    if (got != w) throw FormatError("parameter checkpoint: expected '" + w + "', got '" + got + "'");
  }
  double real() {
    const auto w = word();
    double v = 0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) throw FormatError("bad real '" + w + "' in parameter checkpoint");
    return v;
  }
  std::size_t count() {
    const auto w = word();
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) throw FormatError("bad integer '" + w + "'");
    return v;
  }
};

MlpNet decode_net(TokenStream& ts, const char* name) {
  ts.expect("net");
  ts.expect(name);
  const std::size_t layers = ts.count();
  const double dropout = ts.real();
  if (layers == 0) throw FormatError("network without layers");
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  std::vector<double> values;
  for (std::size_t l = 0; l < layers; ++l) {
    ts.expect("dense");
    const std::size_t out = ts.count(), in = ts.count();
    if (!shapes.empty() && shapes.back().first != in) throw FormatError("layer widths do not chain");
    shapes.emplace_back(out, in);
    for (std::size_t k = 0; k < out * in + out; ++k) values.push_back(ts.real());
  }
  std::vector<std::size_t> hidden;
  for (std::size_t l = 0; l + 1 < layers; ++l) hidden.push_back(shapes[l].first);
  MlpNet net(shapes.front().second, hidden, shapes.back().first, dropout);
  std::copy(values.begin(), values.end(), net.params().begin());
  return net;
}

}  // namespace

std::string encode_params(const EstimatorParams& params) {
  std::ostringstream out;
  out << "ssrs-estimator 1\n";
  out << "state_dim " << params.state_dim << '\n';
  out << "action_dim " << params.action_dim << '\n';
  out << "state_scale " << format_real(params.state_scale) << '\n';
  encode_net(out, "q", params.q_net);
  encode_net(out, "v", params.v_net);
  out << "end\n";
  return out.str();
}

EstimatorParams decode_params(std::string_view text) {
  TokenStream ts{std::istringstream(std::string(text))};
  ts.expect("ssrs-estimator");
  if (ts.count() != 1) throw FormatError("unsupported parameter checkpoint version");
  EstimatorParams p;
  ts.expect("state_dim");
  p.state_dim = ts.count();
  ts.expect("action_dim");
  p.action_dim = ts.count();
  ts.expect("state_scale");
  p.state_scale = ts.real();
  p.q_net = decode_net(ts, "q");
  p.v_net = decode_net(ts, "v");
  ts.expect("end");
  if (p.q_net.input_dim() != p.state_dim + p.action_dim || p.v_net.input_dim() != p.state_dim ||
      p.q_net.output_dim() != p.v_net.output_dim())
    throw FormatError("parameter checkpoint heads are inconsistent");
  return p;
}

void save_params(const std::filesystem::path& path, const EstimatorParams& params) {
  write_text(path, encode_params(params));
}

EstimatorParams load_params(const std::filesystem::path& path) { return decode_params(read_text(path)); }

std::string encode_trajectory(const TrajectoryMatrix& traj) {
  std::vector<std::string> header;
  for (std::size_t i = 0; i < traj.state_dim(); ++i) header.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < traj.action_dim(); ++i) header.push_back("a" + std::to_string(i));
  header.push_back("r");
  CsvWriter w(header);
  for (std::size_t r = 0; r < traj.length(); ++r) {
    std::vector<std::string> row;
    for (double v : traj.states.row(r)) row.push_back(format_real(v));
    for (double v : traj.actions.row(r)) row.push_back(format_real(v));
    row.push_back(format_real(traj.rewards[r]));
    w.row(row);
  }
  return w.str();
}

TrajectoryMatrix decode_trajectory(std::string_view text) {
  const auto table = parse_csv(text);
  std::size_t m1 = 0, m2 = 0;
  bool has_r = false;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const auto& h = table.header[i];
    if (h == "s" + std::to_string(m1) && m2 == 0 && !has_r) {
      ++m1;
    } else if (h == "a" + std::to_string(m2) && !has_r) {
      ++m2;
    } else if (h == "r" && i + 1 == table.header.size()) {
      has_r = true;
    } else {
      throw FormatError("unexpected trajectory column '" + h + "'");
    }
  }
  if (!has_r || m1 == 0) throw FormatError("trajectory file needs s0.. columns and a final r column");
  TrajectoryMatrix traj;
  traj.states = Matrix(table.rows.size(), m1);
  traj.actions = Matrix(table.rows.size(), m2);
  auto real = [](const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("bad number '" + s + "' in trajectory file");
    return v;
  };
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t c = 0; c < m1; ++c) traj.states(r, c) = real(row[c]);
    for (std::size_t c = 0; c < m2; ++c) traj.actions(r, c) = real(row[m1 + c]);
    traj.rewards.push_back(real(row.back()));
  }
  validate(traj);
  return traj;
}

}  // namespace ssrs
