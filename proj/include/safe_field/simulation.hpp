#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "safe_field/synthesis.hpp"

namespace safe_field::simulation {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Integrator { RK4, Euler };

struct SensorModel {
  enum class Kind { Delta, Gaussian } kind = Kind::Delta;
  Vec drift;              // workspace units
  double variance = 0.0;  // workspace units squared
};

struct SimConfig {
  double dt = 0.01;
  Integrator integrator = Integrator::RK4;
  double max_time = 60.0;
  double goal_tol = 0.05;
  SensorModel sensor;
  std::uint64_t seed = 1;
  bool stop_at_goal = true;
};

enum class Status { GoalReached, MaxTime, SafetyViolation, LeftFreeSpace };
const char* to_string(Status s);

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<int> cell;
  std::vector<Vec> u;
  std::vector<Vec> h;  // barrier values of the active cell
  std::vector<double> V;
  std::vector<double> min_h;
  Status status = Status::MaxTime;
  bool goal_reached = false;
  int switches = 0;
};

// Controller with the gain maps folded: u = sum_L M_L P_L + K_b.
struct PreparedController {
  const synthesis::CellController* source = nullptr;
  std::vector<Mat> M;
  Vec Kb;
};

PreparedController prepare(const synthesis::CellController& c);

Vec control_input(const PreparedController& c, const std::vector<measurement::PmfGrid>& pmfs);
Vec control_input(const synthesis::CellController& c,
                  const std::vector<measurement::PmfGrid>& pmfs);

// PMF reported for a landmark seen from x.
measurement::PmfGrid sense(const measurement::GridSpec& grid, const Vec& landmark, const Vec& x,
                           const SensorModel& model);

Trajectory run_trajectory(const geometry::Environment& env, const planning::HighLevelPlan& plan,
                          const std::vector<synthesis::CellController>& controllers,
                          const SimConfig& config, const Vec& x0,
                          const clfcbf::Dynamics& dyn = clfcbf::single_integrator(2));

struct FieldSample {
  Vec x;
  Vec u;
};

std::vector<FieldSample> sample_vector_field(const geometry::ConvexCell& cell,
                                             const synthesis::CellController& c,
                                             int resolution, const SensorModel& sensor);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
void write_field_csv(std::ostream& os, const std::vector<FieldSample>& f);

}  // namespace safe_field::simulation
