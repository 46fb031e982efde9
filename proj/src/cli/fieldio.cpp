#include "pobs/fieldio.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

namespace pobs {

namespace {

constexpr char kMagic[] = "POBS1";
constexpr std::size_t kMagicLen = 5;

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(const std::string& b) : bytes_(b) {}
  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

 private:
  void need(std::size_t n, const char* what) {
    if (remaining() < n) throw LoadError(std::string("truncated field file while reading ") + what, pos_);
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_field(const GridField& u) {
  const Grid& g = u.grid;
  std::string out(kMagic, kMagicLen);
  out.push_back(static_cast<char>(g.dim()));
  out.push_back(1);
  out.push_back(0);
  for (int k = 0; k < g.dim(); ++k) {
    put_f64(out, g.lo(k));
    put_f64(out, g.hi(k));
    put_u64(out, static_cast<std::uint64_t>(g.cells(k)));
  }
  put_u64(out, u.size());
  for (double v : u.values) put_f64(out, v);
  return out;
}

GridField decode_field(const std::string& bytes) {
  Reader r(bytes);
  if (bytes.size() < kMagicLen || bytes.compare(0, kMagicLen, kMagic) != 0)
    throw LoadError("bad magic, expected \"POBS1\"", 0);
  for (std::size_t i = 0; i < kMagicLen; ++i) r.u8("magic");
  const std::size_t dim_at = r.offset();
  const int dim = r.u8("dim");
  if (dim < 1 || dim > kMaxDim) throw LoadError("dimension must be 1, 2 or 3", dim_at);
  const std::size_t enc_at = r.offset();
  if (r.u8("encoding") != 1) throw LoadError("unsupported value encoding", enc_at);
  const std::size_t res_at = r.offset();
  if (r.u8("reserved byte") != 0) throw LoadError("reserved byte must be zero", res_at);

  std::vector<Interval> extents;
  std::vector<int> cells;
  for (int k = 0; k < dim; ++k) {
    const std::size_t axis_at = r.offset();
    const double lo = r.f64("axis lower bound");
    const double hi = r.f64("axis upper bound");
    const std::uint64_t c = r.u64("axis cell count");
    if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo) || c < 4 || c > (1u << 24))
      throw LoadError("invalid extent or cell count on axis " + std::to_string(k), axis_at);
    extents.push_back({lo, hi});
    cells.push_back(static_cast<int>(c));
  }
  Grid grid(extents, cells);
  const std::size_t count_at = r.offset();
  const std::uint64_t count = r.u64("value count");
  if (count != grid.node_count()) {
    std::ostringstream os;
    os << "value count " << count << " does not match the " << grid.node_count() << " grid nodes";
    throw LoadError(os.str(), count_at);
  }
  GridField u(grid);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = r.offset();
    const double v = r.f64("field values");
    if (!std::isfinite(v)) throw LoadError("non-finite field value", at);
    u[i] = v;
  }
  if (r.remaining() != 0) throw LoadError("trailing bytes after the field values", r.offset());
  return u;
}

void save_field(const std::string& path, const GridField& u) {
  const std::string bytes = encode_field(u);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

GridField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open field file '" + path + "'", 0);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_field(bytes);
}

}  // namespace pobs
