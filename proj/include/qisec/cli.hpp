// Command-line front end: bounds | sweep | plan | mc.
//
// Exit codes: 0 ok, 2 bad input, 3 I/O failure, 1 numerical failure.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qisec/protocol.hpp"

namespace qisec {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "QISEC_OUTPUT_DIR";

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitIo = 3;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepScale { kLog, kLinear };

struct SweepSpec {
  std::int64_t m_min = 1000;
  std::int64_t m_max = 100000;
  int points = 50;
  SweepScale scale = SweepScale::kLog;
  ProtocolParams params;  // modes ignored

  void validate() const;
};

struct SweepRow {
  std::int64_t m = 0;
  double alice_qcb = 0.0;
  double alice_opa_bhatt = 0.0;
  double eve_qcb_upper = 0.0;
  double eve_lower_bound = 0.0;
};

inline constexpr const char* kSweepHeader =
    "M,alice_qcb,alice_opa_bhatt,eve_qcb_upper,eve_lower_bound";

/// Ascending, duplicate-free M values; endpoints are m_min and m_max.
std::vector<std::int64_t> sweep_grid(const SweepSpec& spec);
std::vector<SweepRow> compute_sweep(const SweepSpec& spec);

/// Scientific notation, 9 significant digits.
std::string format_sci(double v);
/// Shortest text that reads back to the same double.
std::string format_exact(double v);

/// Writes the header line and one row per point; no comment lines.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// Skips '#' comment lines; throws InvalidArgument on a malformed file.
std::vector<SweepRow> read_sweep_csv(std::istream& is);

/// Flat `key = value` lines, '#' comments. Keys are long flag names.
std::vector<std::pair<std::string, std::string>> parse_config(std::istream& is);

/// Expands `--config <file>` into `--key=value` tokens placed right after the
/// subcommand name, ahead of the explicit flags, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qisec
