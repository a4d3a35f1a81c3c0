#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "metric_kernel.hpp"

namespace imcf {

struct Scenario;

enum class FlowMode { rot_sym, axisym, full_s2 };

const char* flow_mode_name(FlowMode mode);
FlowMode parse_flow_mode(const std::string& text);

// Half-cell polar grid θ_i = (i + 1/2)Δθ; azimuth ϕ_j = jΔϕ with N_ϕ = 2N_θ in full_s2.
struct Grid {
  int n_theta = 1;
  int n_phi = 1;
  double d_theta = 0.0;
  double d_phi = 0.0;
  Vec theta;
  Vec phi;
};

Grid make_grid(FlowMode mode, int resolution);

struct FlowState {
  FlowMode mode = FlowMode::rot_sym;
  int n = 2;
  Vec F;  // row-major [i_theta * n_phi + j_phi]
  double t = 0.0;
  Grid grid;
  std::string scenario_id;

  std::size_t size() const { return F.size(); }
  double at(int i, int j) const { return F[static_cast<std::size_t>(i) * grid.n_phi + j]; }
};

struct NodeGeometry {
  Vec nu;  // ĝ-unit outward normal, coordinate components
  double H_bar = 0.0;
  double H_hat = 0.0;
  double v_bar = 1.0;
  double w = 0.0;
  double eta_norm_bar = 0.0;
  double eta_norm_hat = 0.0;
  double u = 0.0;
  double shape_eigen_max = 0.0;
  double f = 0.0;
};

// Slope data of the graph at one node; angular derivatives of F.
struct GraphJet {
  double theta = 0.0, phi = 0.0;
  double F = 0.0, Ft = 0.0, Fp = 0.0, Ftt = 0.0, Ftp = 0.0, Fpp = 0.0;
};

NodeGeometry node_geometry(const Ambient& amb, const GraphJet& jet);
GraphJet graph_jet(const FlowState& state, int i, int j);
std::vector<NodeGeometry> graph_geometry(const Ambient& amb, const FlowState& state, unsigned threads = 1);

// Largest dt for which the explicit scheme has CFL number 1/2.
double cfl_limit(const Ambient& amb, const FlowState& state, const std::vector<NodeGeometry>& geo);

struct StepOptions {
  double w_floor = -std::numeric_limits<double>::infinity();
  unsigned threads = 1;
};

FlowState step(const Ambient& amb, const FlowState& state, double dt, const StepOptions& options = {});

FlowState initial_state(const Scenario& scenario, FlowMode mode, int resolution);

struct FlowControls {
  double T = 1.0;
  int steps = 0;  // fixed step count; 0 selects the adaptive step
  double safety = 0.2;
  double dt_max = 2e-3;
  int checkpoint_every = 0;
  unsigned threads = 1;
};

struct TrajectoryRecord {
  double t = 0.0;
  double w_min = 0.0, w_max = 0.0;
  double eta_min = 0.0, eta_max = 0.0;
  double H_min = 0.0, H_max = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;
  double k_max = 0.0;
  double F_min = 0.0, F_max = 0.0;
  double eta_hat_min = 0.0;
};

struct HaltEvent {
  ErrorCode code = ErrorCode::ok;
  double t = 0.0;
  std::string message;
};

struct Trajectory {
  FlowMode mode = FlowMode::rot_sym;
  int n = 2;
  std::string scenario_id;
  double theta1 = 0.0;
  double w_floor = 0.0;
  std::vector<TrajectoryRecord> records;
  std::vector<FlowState> checkpoints;
  FlowState final_state;
  std::optional<HaltEvent> halt;
};

TrajectoryRecord aggregate(const FlowState& state, const std::vector<NodeGeometry>& geo);

Trajectory run(const Scenario& scenario, const FlowState& initial, const FlowControls& controls);

// Brute-force Ĥ from the level set r − F̃ with F̃ a local 5-point interpolant; Richardson in h.
double fd_shape_oracle(const Ambient& amb, const FlowState& state, int i, int j, double h = 1e-3);

}  // namespace imcf
