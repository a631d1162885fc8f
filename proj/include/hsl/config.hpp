#pragma once

#include <string>
#include <vector>

#include "hsl/params.hpp"

namespace hsl::cfg {

// One reproducible experiment: the model parameters, the deterministic data
// streams (seed, Fourier radius, target norms), the logarithmic time mesh,
// the seeding-time sequence for the wave-operator pipelines, and output
// routing.  The phase data stream derives from `seed + 4` and one Fourier
// shell tighter than the amplitude, so products of the two stay inside the
// dealiased band.
struct ScenarioConfig {
  ModelParams params;

  int p = 1;               // asymptotic expansion depth
  long long seed = 7;      // amplitude data stream
  int field_radius = 2;    // Fourier radius of the amplitude data
  double a_plus = 1.0;     // H^k target norm of the amplitude data
  double b_plus = 0.25;    // sup-norm target of the phase data

  double t_end = 1000.0;
  int steps_per_decade = 32;
  std::vector<double> t0_sequence{50.0, 100.0, 200.0, 400.0};

  std::string out_dir = "out";

  bool richardson = false;        // transport: add the half-horizon re-march
  bool negative_control = false;  // waveop: add the shallow-depth analysis
  bool gauge_suite = false;       // hierarchy/transport: add twisted-data runs

  friend bool operator==(const ScenarioConfig&,
                         const ScenarioConfig&) = default;
};

// Parses flat `key = value` text grouped under [section] headers.  Blank
// lines and lines starting with '#' are ignored.  Errors carry the 1-based
// line number and name the offending section or key.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Emits the canonical text form; parse_config(serialize_config(c)) == c
// exactly (doubles round-trip through shortest-form formatting).
std::string serialize_config(const ScenarioConfig& c);

// Rejects configurations no pipeline can run.  The model block delegates to
// ModelParams::validate; the scenario block checks the data targets and the
// seeding sequence shape.
void validate(const ScenarioConfig& c);

}  // namespace hsl::cfg
