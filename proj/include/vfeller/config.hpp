#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfeller/fracapprox.hpp"
#include "vfeller/kernels.hpp"
#include "vfeller/model.hpp"
#include "vfeller/scale.hpp"
#include "vfeller/simulate.hpp"

namespace vfeller::config {

/// section -> key -> raw value. Ordered so echoes are deterministic.
using Ini = std::map<std::string, std::map<std::string, std::string>>;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what, std::optional<int> line = std::nullopt);
  const std::string& key() const noexcept { return key_; }
  std::optional<int> line() const noexcept { return line_; }

 private:
  std::string key_;
  std::optional<int> line_;
};

/// Line numbers of "section.key" entries in a config file, for diagnostics.
using SourceLines = std::map<std::string, int>;

Ini read_ini_file(const std::string& path, SourceLines* lines = nullptr);
Ini read_ini_string(const std::string& text, SourceLines* lines = nullptr);
std::string write_ini(const Ini& ini);

/// "section.key=value", later entries win.
void apply_assignment(Ini& ini, const std::string& assignment);

/// Shortest decimal string that parses back to the same double.
std::string format_number(double x);

struct TestSection {
  std::vector<std::string> tests;
  double c = 0.0;
  double eps_shift = 0.0;
  int n_stages = 8;
  ScaleOptions options;
};

struct ScaleSection {
  double from = 0.0;
  double to = 0.0;
  int points = 9;  // uniform grid from..to
  double beta = 0.0;
  double gamma = 0.0;
  int terms = 8;
};

struct ApproxSection {
  double alpha = 0.5;
  std::string scheme = "truncation";
  double T = 1.0;
  std::vector<double> nodes;
  double xi1 = 1.0;
  double ratio = 6.4;
  int N = 4;
  int q = 1;
  std::string study = "none";
  std::vector<double> sweep;
  std::vector<double> t_grid;
};

struct OutputSection {
  std::string format = "json";
  std::string path;
  std::string paths_csv;
};

struct Experiment {
  ModelSpec model = ModelSpec::cir(1.0, 1.0, 1.0, 1.0);
  KernelSpec kernel = KernelSpec::constant(1.0);
  TestSection test;
  ScaleSection scale;
  SimConfig sim;
  CrosscheckTolerances tolerances;
  ApproxSection approx;
  OutputSection output;
  /// Every key with its canonical value, defaults filled in.
  Ini resolved;
};

/// Validate and fill defaults. Unknown sections or keys are errors.
Experiment resolve(const Ini& raw, const SourceLines& lines = {});

/// The approximation scheme described by an [approx] section.
ApproxScheme approx_scheme(const ApproxSection& a);

}  // namespace vfeller::config
