#include "kplab/checkpoint.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace kplab {

namespace {

constexpr char kMagic[8] = {'K', 'P', 'L', 'A', 'B', 'F', '0', '1'};

template <class U>
void put(std::string& buf, U v) {
  for (std::size_t b = 0; b < sizeof(U); ++b) buf.push_back(char((v >> (8 * b)) & 0xff));
}

void put_f64(std::string& buf, double d) { put(buf, std::bit_cast<std::uint64_t>(d)); }

template <class U>
U get(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(U) > buf.size()) throw std::runtime_error("checkpoint record truncated");
  U v = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) v |= U(static_cast<unsigned char>(buf[pos + b])) << (8 * b);
  pos += sizeof(U);
  return v;
}

double get_f64(const std::string& buf, std::size_t& pos) { return std::bit_cast<double>(get<std::uint64_t>(buf, pos)); }

std::string record_name(std::size_t i) {
  std::ostringstream s;
  s << 'r' << std::setw(6) << std::setfill('0') << i << ".bin";
  return s.str();
}

}  // namespace

void write_record(const std::filesystem::path& file, const Field& f, Scheme scheme) {
  const Grid& g = f.g();
  std::string buf(kMagic, kMagic + 8);
  put(buf, kCheckpointVersion);
  put(buf, std::uint32_t(g.nx));
  put(buf, std::uint32_t(g.ny));
  put(buf, std::uint32_t(scheme_id(scheme)));
  put_f64(buf, g.lx);
  put_f64(buf, g.ly);
  put_f64(buf, f.t);
  buf.reserve(buf.size() + std::size_t(g.size()) * 16);
  for (Eigen::Index k = 0; k < f.coeffs.size(); ++k) {
    put_f64(buf, f.coeffs.data()[k].real());
    put_f64(buf, f.coeffs.data()[k].imag());
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw std::runtime_error("write failed for " + file.string());
}

Field read_record(const std::filesystem::path& file, Scheme* scheme) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 8) != 0)
    throw std::runtime_error(file.string() + ": not a field record");
  std::size_t pos = 8;
  const auto version = get<std::uint32_t>(buf, pos);
  if (version != kCheckpointVersion) throw std::runtime_error(file.string() + ": unsupported record version");
  const int nx = int(get<std::uint32_t>(buf, pos));
  const int ny = int(get<std::uint32_t>(buf, pos));
  const int sid = int(get<std::uint32_t>(buf, pos));
  const double lx = get_f64(buf, pos), ly = get_f64(buf, pos), t = get_f64(buf, pos);
  if (scheme) *scheme = static_cast<Scheme>(sid);
  ComplexArray c(nx, ny);
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double re = get_f64(buf, pos);
    const double im = get_f64(buf, pos);
    c.data()[k] = {re, im};
  }
  if (pos != buf.size()) throw std::runtime_error(file.string() + ": trailing bytes in record");
  return Field(make_grid(nx, ny, lx, ly), t, std::move(c));
}

void write_checkpoint(const std::filesystem::path& dir, const Trajectory& traj, const std::string& config_hash) {
  std::filesystem::create_directories(dir);
  nlohmann::json m;
  m["format"] = "kplab-trajectory";
  m["version"] = kCheckpointVersion;
  m["config_hash"] = config_hash;
  m["scheme"] = scheme_name(traj.config.scheme);
  m["T"] = traj.config.T;
  m["dt"] = traj.config.dt;
  m["save_every"] = traj.config.save_every;
  m["accepted_steps"] = traj.accepted_steps;
  m["rejected_steps"] = traj.rejected_steps;
  nlohmann::json recs = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const std::string name = record_name(i);
    write_record(dir / name, traj.fields[i], traj.config.scheme);
    recs.push_back({{"file", name},
                    {"t", traj.times[i]},
                    {"h4", traj.h4[i]},
                    {"tail", traj.tail[i]},
                    {"dissipation", traj.dissipation[i]}});
  }
  m["records"] = recs;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  out << m.dump(2) << '\n';
}

Trajectory read_checkpoint(const std::filesystem::path& dir, std::string* config_hash) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("missing manifest in " + dir.string());
  const nlohmann::json m = nlohmann::json::parse(in);
  Trajectory tr;
  tr.config.scheme = parse_scheme(m.at("scheme").get<std::string>());
  tr.config.T = m.at("T").get<double>();
  tr.config.dt = m.at("dt").get<double>();
  tr.config.save_every = m.at("save_every").get<int>();
  tr.accepted_steps = m.at("accepted_steps").get<int>();
  tr.rejected_steps = m.at("rejected_steps").get<int>();
  if (config_hash) *config_hash = m.at("config_hash").get<std::string>();
  GridPtr shared;
  for (const auto& r : m.at("records")) {
    Field f = read_record(dir / r.at("file").get<std::string>());
    if (!shared) shared = f.grid;
    else if (!(*shared == f.g())) throw std::runtime_error("records in " + dir.string() + " disagree on the grid");
    f.grid = shared;
    if (f.t != r.at("t").get<double>()) throw std::runtime_error("record time does not match manifest");
    tr.times.push_back(f.t);
    tr.h4.push_back(r.at("h4").get<double>());
    tr.tail.push_back(r.at("tail").get<double>());
    tr.dissipation.push_back(r.at("dissipation").get<double>());
    tr.fields.push_back(std::move(f));
  }
  if (shared) {
    tr.config.nx = shared->nx;
    tr.config.ny = shared->ny;
    tr.config.lx = shared->lx;
    tr.config.ly = shared->ly;
  }
  return tr;
}

}  // namespace kplab
