#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mbgf/fci.hpp"

namespace mbgf {

// Effective settings of one invocation. The config echo written into artifacts
// is rebuilt from the resolved fields, so equal configs stamp equal headers.
struct run_config {
  std::string subcommand;

  std::string fcidump_path;
  bool use_hubbard = false;
  double hubbard_t = 1.0;
  double hubbard_u = 0.0;
  int hubbard_sites = 2;

  bool have_window = false;
  bool have_step = false;
  double omega_min = 0.0, omega_max = 0.0;
  double omega_step = 0.01;

  int order = 3;    // pt and roots --order
  int cycles = 1;   // tda amplitude cycles; scgf2 cycle count
  int orbital = -1; // grid-table orbital; -1 picks the highest occupied
  int mode = 0;     // 0 auto, 1 diagonal, 2 matrix
  double min_residue = 0.0;
  std::string out_path;
  std::string format = "csv";
  int max_sector_dim = default_sector_cap;
  long long pole_cap = 1000000;
  double stencil_h = 0.05;
  std::vector<int> model_orders;  // model partial-sum columns

  // roots evaluator selector: exact | order | tda | scgf2
  std::string eval_kind = "exact";

  void validate() const;  // throws usage_error
};

struct parse_result {
  run_config cfg;
  bool help = false;
  std::string help_text;
};

// Throws usage_error on malformed arguments; args exclude the program name.
parse_result parse_cli(const std::vector<std::string>& args);

// Executes the run, writes the artifact file, prints the summary block.
// Throws mbgf_error subclasses; returns 0 otherwise.
int run(const run_config& cfg, std::ostream& summary);

// Full driver: parse, run, map errors to exit codes (usage 2, input 3,
// validation 4, numerical 5).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mbgf
