#ifndef STYLECODEC_SERIALIZE_HPP_
#define STYLECODEC_SERIALIZE_HPP_

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace stylecodec {

/// Little-endian binary writer. Doubles are written bit-exactly, which is
/// what makes checkpoint resume reproduce training trajectories bit for bit.
class BinWriter {
 public:
  explicit BinWriter(const std::string& path);

  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v);
  void f64(double v);
  void str(const std::string& s);               // u64 length + bytes
  void f64_block(const std::vector<double>& v); // u64 count + raw doubles

  void close();

 private:
  void bytes(const void* p, std::size_t n);
  std::ofstream out_;
  std::string path_;
};

class BinReader {
 public:
  explicit BinReader(const std::string& path);

  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64();
  double f64();
  std::string str();
  std::vector<double> f64_block();

 private:
  void bytes(void* p, std::size_t n);
  std::ifstream in_;
  std::string path_;
};

}  // namespace stylecodec

#endif  // STYLECODEC_SERIALIZE_HPP_
