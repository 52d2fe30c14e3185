// Copyright 2026 The MVAE-AIF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <gtest/gtest.h>

#include "maif/armsim/arm.h"
#include "maif/armsim/render.h"
#include "maif/armsim/sensors.h"
#include "maif/armsim/world.h"
#include "maif/error.h"

namespace maif::armsim {
namespace {

constexpr double kPi = 3.14159265358979323846;

VectorXd RandomQ(std::mt19937_64& rng, int n, double range = 2.5) {
  std::uniform_real_distribution<double> u(-range, range);
  VectorXd q(n);
  for (int i = 0; i < n; ++i) q[i] = u(rng);
  return q;
}

ArmModel Frictionless(ArmModel arm) {
  for (Joint& j : arm.joints) {
    j.damping = 0.0;
    j.stiffness = 0.0;
    j.torque_limit = 1e6;
    j.lower = -1e3;
    j.upper = 1e3;
  }
  return arm;
}

TEST(KinematicsTest, StraightArm) {
  const ArmModel arm = ArmModel::Desk3();
  const Vector2d ee = ForwardKinematics(arm, VectorXd::Zero(3));
  EXPECT_DOUBLE_EQ(ee.x(), 1.15);
  EXPECT_DOUBLE_EQ(ee.y(), 0.0);
}

TEST(KinematicsTest, TwoLinkQuarterTurn) {
  const ArmModel arm = ArmModel::Uniform(2, 1.0);
  const Vector2d ee = ForwardKinematics(arm, Eigen::Vector2d(kPi / 2, 0.0));
  EXPECT_NEAR(ee.x(), 0.0, 1e-15);
  EXPECT_NEAR(ee.y(), 1.0, 1e-15);
}

TEST(KinematicsTest, MatchesComplexRotationOracle) {
  const ArmModel arm = ArmModel::Desk3();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const VectorXd q = RandomQ(rng, 3, 3.0);
    std::complex<double> rotation = 1.0, tip = 0.0;
    for (int i = 0; i < 3; ++i) {
      rotation *= std::polar(1.0, q[i]);
      tip += arm.links[static_cast<std::size_t>(i)].length * rotation;
    }
    const Vector2d ee = ForwardKinematics(arm, q);
    EXPECT_NEAR(ee.x(), tip.real(), 1e-12);
    EXPECT_NEAR(ee.y(), tip.imag(), 1e-12);
  }
}

// Textbook two-link Lagrangian, x up, angles from the vertical.
VectorXd TwoLinkOracle(const ArmModel& arm, const VectorXd& q, const VectorXd& qd,
                       const VectorXd& qdd) {
  const Link& a = arm.links[0];
  const Link& b = arm.links[1];
  const double i1 = arm.link_inertia(0), i2 = arm.link_inertia(1);
  const double c2 = std::cos(q[1]), s2 = std::sin(q[1]);
  const double m11 = i1 + i2 + a.mass * a.com * a.com +
                     b.mass * (a.length * a.length + b.com * b.com + 2 * a.length * b.com * c2);
  const double m12 = i2 + b.mass * (b.com * b.com + a.length * b.com * c2);
  const double m22 = i2 + b.mass * b.com * b.com;
  const double h = b.mass * a.length * b.com * s2;
  const double g = arm.gravity;
  // V = g * sum m x_com, x_com = l cos(angle); G = dV/dq
  const double g1 = -g * (a.mass * a.com * std::sin(q[0]) + b.mass * a.length * std::sin(q[0]) +
                          b.mass * b.com * std::sin(q[0] + q[1]));
  const double g2 = -g * b.mass * b.com * std::sin(q[0] + q[1]);
  VectorXd tau(2);
  tau[0] = m11 * qdd[0] + m12 * qdd[1] - h * (2 * qd[0] * qd[1] + qd[1] * qd[1]) + g1;
  tau[1] = m12 * qdd[0] + m22 * qdd[1] + h * qd[0] * qd[0] + g2;
  return tau;
}

TEST(DynamicsTest, InverseDynamicsMatchesTwoLinkLagrangian) {
  ArmModel arm = ArmModel::Uniform(2, 0.9);
  arm.links[0] = {0.5, 2.0, 0.2};
  arm.links[1] = {0.4, 1.2, 0.25};
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXd q = RandomQ(rng, 2), qd = RandomQ(rng, 2), qdd = RandomQ(rng, 2);
    const VectorXd got = InverseDynamics(arm, q, qd, qdd, arm.gravity);
    const VectorXd want = TwoLinkOracle(arm, q, qd, qdd);
    EXPECT_NEAR((got - want).norm(), 0.0, 1e-12 * (1.0 + want.norm()));
  }
}

TEST(DynamicsTest, MassMatrixSymmetricPositiveDefinite) {
  for (const ArmModel& arm : {ArmModel::Desk3(), ArmModel::Uniform(7, 1.2)}) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const MatrixXd m = MassMatrix(arm, RandomQ(rng, arm.dof(), 3.0));
      EXPECT_NEAR((m - m.transpose()).norm(), 0.0, 1e-14);
      EXPECT_EQ(m.llt().info(), Eigen::Success);
    }
  }
}

TEST(DynamicsTest, GravityTorqueIsPotentialGradient) {
  const ArmModel arm = ArmModel::Desk3();
  auto potential = [&](const VectorXd& q) {
    double v = 0.0, angle = 0.0, base = 0.0;
    for (int i = 0; i < 3; ++i) {
      angle += q[i];
      const Link& l = arm.links[static_cast<std::size_t>(i)];
      v += arm.gravity * l.mass * (base + l.com * std::cos(angle));
      base += l.length * std::cos(angle);
    }
    return v;
  };
  std::mt19937_64 rng(4);
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const VectorXd q = RandomQ(rng, 3);
    const VectorXd g = GravityTorque(arm, q);
    for (int i = 0; i < 3; ++i) {
      VectorXd qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      EXPECT_NEAR(g[i], (potential(qp) - potential(qm)) / (2 * h), 1e-6);
    }
  }
}

TEST(StepTest, EquilibriumWithoutForces) {
  ArmModel arm = Frictionless(ArmModel::Desk3());
  arm.gravity = 0.0;
  const ArmState s = ArmState::AtRest(Eigen::Vector3d(0.3, -0.2, 1.0));
  const ArmState next = Step(arm, s, VectorXd::Zero(3), 1e-3);
  EXPECT_EQ(next.q, s.q);
  EXPECT_EQ(next.qd, s.qd);
}

TEST(StepTest, SingleLinkConstantTorque) {
  ArmModel arm = Frictionless(ArmModel::Uniform(1, 0.5));
  arm.links[0] = {0.5, 2.0, 0.3};
  arm.gravity = 0.0;
  const double inertia = 2.0 * 0.3 * 0.3 + 2.0 * 0.25 / 12.0;
  const double tau = 1.7, dt = 1e-3;
  ArmState s = ArmState::AtRest(VectorXd::Constant(1, 0.2));
  const ArmState next = Step(arm, s, VectorXd::Constant(1, tau), dt);
  EXPECT_NEAR(next.qd[0], dt * tau / inertia, 1e-15);
  EXPECT_NEAR(next.q[0], 0.2 + dt * dt * tau / inertia, 1e-15);
  EXPECT_DOUBLE_EQ(next.t, dt);
}

TEST(StepTest, DampingDissipatesKineticEnergy) {
  ArmModel arm = Frictionless(ArmModel::Desk3());
  arm.gravity = 0.0;
  for (Joint& j : arm.joints) j.damping = 1.0;
  ArmState s{Eigen::Vector3d(0.1, 0.5, -0.4), Eigen::Vector3d(2.0, -1.0, 3.0), 0.0};
  double ke = KineticEnergy(arm, s.q, s.qd);
  for (int i = 0; i < 1000; ++i) {
    s = Step(arm, s, VectorXd::Zero(3), 1e-3);
    const double next = KineticEnergy(arm, s.q, s.qd);
    ASSERT_LE(next, ke * (1 + 1e-12)) << "step " << i;
    ke = next;
  }
}

TEST(StepTest, EnergyDriftBounded) {
  ArmModel arm = Frictionless(ArmModel::Desk3());
  arm.gravity = 0.0;
  ArmState s{Eigen::Vector3d(0.1, 0.5, -0.4), Eigen::Vector3d(1.0, -0.5, 1.5), 0.0};
  const double ke0 = KineticEnergy(arm, s.q, s.qd);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    s = Step(arm, s, VectorXd::Zero(3), 1e-3);
    worst = std::max(worst, std::abs(KineticEnergy(arm, s.q, s.qd) - ke0) / ke0);
  }
  EXPECT_LT(worst, 0.01);
}

TEST(StepTest, GravityCompensationHoldsPose) {
  for (double g : {9.81, 24.79}) {
    ArmModel arm = ArmModel::Desk3();
    arm.gravity = g;
    for (Joint& j : arm.joints) j.stiffness = 0.0;
    const Eigen::Vector3d q(0.7, -1.1, 0.4);
    ArmState s = ArmState::AtRest(q);
    for (int i = 0; i < 2000; ++i) s = Step(arm, s, GravityTorque(arm, s.q), 1e-3);
    EXPECT_LT((s.q - q).norm(), 1e-9) << "g = " << g;
    EXPECT_LT(s.qd.norm(), 1e-9);
  }
}

TEST(StepTest, JointLimitsHold) {
  ArmModel arm = ArmModel::Desk3();
  ArmState s = ArmState::AtRest(Eigen::Vector3d(2.8, 0.0, 0.0));
  for (int i = 0; i < 500; ++i) {
    s = Step(arm, s, Eigen::Vector3d(150, 150, -150), 1e-3);
    for (int j = 0; j < 3; ++j) {
      ASSERT_LE(s.q[j], 2.9);
      ASSERT_GE(s.q[j], -2.9);
    }
  }
  EXPECT_DOUBLE_EQ(s.q[0], 2.9);
  EXPECT_EQ(s.qd[0], 0.0);
}

TEST(StepTest, RejectsBadInput) {
  const ArmModel arm = ArmModel::Desk3();
  const ArmState s = ArmState::AtRest(VectorXd::Zero(3));
  EXPECT_THROW(Step(arm, s, VectorXd::Zero(3), 0.0), ConfigError);
  EXPECT_THROW(Step(arm, s, VectorXd::Zero(2), 1e-3), ShapeError);
  ArmState bad = s;
  bad.qd[1] = std::nan("");
  EXPECT_THROW(Step(arm, bad, VectorXd::Zero(3), 1e-3), NumericError);
}

TEST(StepTest, TorqueIsClamped) {
  ArmModel arm = ArmModel::Desk3();
  EXPECT_EQ(ClampTorque(arm, Eigen::Vector3d(500, -500, 3)), Eigen::Vector3d(150, -150, 3));
}

// Full-frame oracle: every pixel centre mapped back to metres and measured
// against each link in that link's own frame.
diffnet::Tensor OracleRender(const ArmModel& arm, const VectorXd& q, const CameraOptions& cam) {
  const double scale = cam.span * cam.width / (2.0 * arm.reach());
  diffnet::Tensor img({1, static_cast<std::size_t>(cam.height), static_cast<std::size_t>(cam.width)});
  for (int r = 0; r < cam.height; ++r) {
    for (int c = 0; c < cam.width; ++c) {
      const double x = (0.5 * cam.height - (r + 0.5)) / scale;
      const double y = (0.5 * cam.width - (c + 0.5)) / scale;
      double best = 0.0, angle = 0.0, bx = 0.0, by = 0.0;
      for (int i = 0; i < arm.dof(); ++i) {
        angle += q[i];
        const double l = arm.links[static_cast<std::size_t>(i)].length;
        const double u = std::cos(angle) * (x - bx) + std::sin(angle) * (y - by);
        const double v = -std::sin(angle) * (x - bx) + std::cos(angle) * (y - by);
        const double along = u < 0 ? -u : (u > l ? u - l : 0.0);
        const double d = std::hypot(along, v) * scale;
        const double hw = cam.half_widths[std::min<std::size_t>(i, cam.half_widths.size() - 1)] * cam.width;
        best = std::max(best, std::clamp(hw + 0.5 - d, 0.0, 1.0));
        bx += l * std::cos(angle);
        by += l * std::sin(angle);
      }
      img[static_cast<std::size_t>(r * cam.width + c)] = best;
    }
  }
  return img;
}

double Mean(const diffnet::Tensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v;
  return s / static_cast<double>(t.size());
}

TEST(RenderTest, MatchesFullFrameOracle) {
  const ArmModel arm = ArmModel::Desk3();
  const CameraOptions cam;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXd q = RandomQ(rng, 3, 2.9);
    const diffnet::Tensor img = Render(arm, q, cam);
    const diffnet::Tensor oracle = OracleRender(arm, q, cam);
    EXPECT_NEAR(Mean(img), Mean(oracle), 1e-6);
    for (std::size_t i = 0; i < img.size(); ++i) ASSERT_NEAR(img[i], oracle[i], 1e-9);
  }
}

TEST(RenderTest, DeterministicAndSensitive) {
  const ArmModel arm = ArmModel::Desk3();
  const diffnet::Tensor a = Render(arm, VectorXd::Zero(3), {});
  EXPECT_EQ(a, Render(arm, VectorXd::Zero(3), {}));
  EXPECT_NE(a, Render(arm, Eigen::Vector3d(kPi, 0, 0), {}));
  EXPECT_EQ(a.shape(), (diffnet::Shape{1, 32, 32}));
  for (double v : a.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(RenderTest, ExtendedArmSpansNinetyPercent) {
  const ArmModel arm = ArmModel::Desk3();
  CameraOptions cam;
  cam.height = cam.width = 128;
  const PixelMap map = CameraMapping(arm, cam);
  EXPECT_DOUBLE_EQ(2.0 * arm.reach() * map.scale, 0.9 * 128);
}

TEST(RenderTest, PgmRoundTrip) {
  const diffnet::Tensor img = Render(ArmModel::Desk3(), Eigen::Vector3d(0.4, -0.3, 1.2), {});
  const auto path = std::filesystem::temp_directory_path() / "maif_render_test.pgm";
  WritePgm(path, img);
  const diffnet::Tensor back = ReadPgm(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.shape(), img.shape());
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(back[i], img[i], 0.5 / 255 + 1e-12);
}

TEST(SensorTest, NoiselessSamplesAreExact) {
  SensorSuite suite(ArmModel::Desk3(), {}, {});
  const ArmState s{Eigen::Vector3d(0.1, 0.2, 0.3), Eigen::Vector3d(-1, 0, 1), 0.0};
  const SensorFrame& f = suite.Sample(s);
  EXPECT_EQ(f.q, s.q);
  EXPECT_EQ(f.qd, s.qd);
  EXPECT_EQ(*f.image, Render(ArmModel::Desk3(), s.q, {}));
}

TEST(SensorTest, ImageHeldBetweenCameraSamples) {
  SensorSuite suite(ArmModel::Desk3(), {}, {});
  ArmState s = ArmState::AtRest(VectorXd::Zero(3));
  const auto first = suite.Sample(s).image;
  s.t = 0.009;
  s.q[0] = 0.5;
  const auto& frame = suite.Sample(s);
  EXPECT_EQ(frame.image.get(), first.get());
  EXPECT_EQ(frame.q[0], 0.5);
  EXPECT_LE(frame.image_time, frame.proprio_time);
  s.t = 0.1;
  EXPECT_NE(suite.Sample(s).image.get(), first.get());
  EXPECT_EQ(suite.image_refreshes(), 2u);
  EXPECT_EQ(suite.proprio_refreshes(), 3u);
}

TEST(SensorTest, ProprioHeldWithinOneMillisecond) {
  NoiseSpec noise;
  noise.q_std = 0.5;
  SensorSuite suite(ArmModel::Desk3(), {}, noise);
  ArmState s = ArmState::AtRest(VectorXd::Zero(3));
  const VectorXd first = suite.Sample(s).q;
  s.t = 0.0005;
  EXPECT_EQ(suite.Sample(s).q, first);
  s.t = 0.001;
  EXPECT_NE(suite.Sample(s).q, first);
}

TEST(SensorTest, NoiseStatisticsAndClamp) {
  NoiseSpec noise;
  noise.q_std = 0.5;
  noise.image_std = 0.25;
  noise.seed = 3;
  SensorSuite suite(ArmModel::Desk3(), {}, noise);
  ArmState s = ArmState::AtRest(VectorXd::Zero(3));
  double sum = 0.0, sum2 = 0.0;
  int n = 0;
  for (int i = 0; i < 4000; ++i) {
    s.t = i * 1e-3;
    const SensorFrame& f = suite.Sample(s);
    for (int j = 0; j < 3; ++j) {
      sum += f.q[j];
      sum2 += f.q[j] * f.q[j];
      ++n;
    }
    for (double v : f.image->data()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
  EXPECT_NEAR(sum / n, 0.0, 0.02);
  EXPECT_NEAR(std::sqrt(sum2 / n), 0.5, 0.02);
}

TEST(SensorTest, SeededStreamsReproduce) {
  NoiseSpec noise;
  noise.q_std = 0.1;
  noise.qd_std = 0.1;
  noise.image_std = 0.1;
  noise.seed = 42;
  SensorSuite a(ArmModel::Desk3(), {}, noise), b(ArmModel::Desk3(), {}, noise);
  ArmState s = ArmState::AtRest(VectorXd::Zero(3));
  for (int i = 0; i < 30; ++i) {
    s.t = i * 0.009;
    const SensorFrame& fa = a.Sample(s);
    const SensorFrame& fb = b.Sample(s);
    ASSERT_EQ(fa.q, fb.q);
    ASSERT_EQ(*fa.image, *fb.image);
  }
}

TEST(SensorTest, ClockMustBeMonotone) {
  SensorSuite suite(ArmModel::Desk3(), {}, {});
  ArmState s = ArmState::AtRest(VectorXd::Zero(3));
  s.t = 1.0;
  suite.Sample(s);
  s.t = 0.5;
  EXPECT_THROW(suite.Sample(s), ConfigError);
  NoiseSpec bad;
  bad.q_std = -1;
  EXPECT_THROW(SensorSuite(ArmModel::Desk3(), {}, bad), ConfigError);
}

TEST(OccludeTest, ZeroImageOtherChannelsKept) {
  SensorSuite suite(ArmModel::Desk3(), {}, {});
  const SensorFrame f = suite.Sample(ArmState::AtRest(Eigen::Vector3d(0.2, 0.1, 0.0)));
  const SensorFrame o = Occlude(f);
  for (double v : o.image->data()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(o.q, f.q);
  EXPECT_EQ(o.qd, f.qd);
  EXPECT_TRUE(o.occluded);
  const SensorFrame oo = Occlude(o);
  EXPECT_EQ(*oo.image, *o.image);
  EXPECT_EQ(oo.q, o.q);
}

TEST(WorldTest, ConfigRoundTrip) {
  WorldConfig w;
  w.arm.gravity = 24.79;
  w.noise.q_std = 0.1;
  for (Joint& j : w.arm.joints) j.stiffness = 0.01;
  const KeyValueConfig c = ToConfig(w);
  const KeyValueConfig back = KeyValueConfig::Parse(c.Serialize());
  EXPECT_EQ(back, c);
  const WorldConfig w2 = WorldFromConfig(back);
  EXPECT_EQ(w2.arm.gravity, 24.79);
  EXPECT_EQ(w2.arm.joints[2].stiffness, 0.01);
  EXPECT_EQ(ToConfig(w2).Serialize(), c.Serialize());
}

TEST(WorldTest, SevenLinkConfigBroadcastsScalars) {
  const KeyValueConfig c = KeyValueConfig::Parse(
      "arm.lengths = 0.2, 0.2, 0.2, 0.2, 0.2, 0.1, 0.1\n"
      "arm.masses = 1\n");
  const WorldConfig w = WorldFromConfig(c);
  EXPECT_EQ(w.arm.dof(), 7);
  EXPECT_EQ(w.arm.links[6].com, 0.05);
  EXPECT_THROW(WorldFromConfig(KeyValueConfig::Parse("arm.lengths = 1, 1\narm.masses = 1, 2, 3\n")),
               ConfigError);
}

TEST(WorldTest, SimulatorCountsReadsAndKeepsClock) {
  Simulator sim(WorldConfig{}, ArmState::AtRest(VectorXd::Zero(3)));
  EXPECT_EQ(sim.reads(), 0u);
  for (int i = 0; i < 1000; ++i) sim.Advance(VectorXd::Zero(3));
  EXPECT_EQ(sim.reads(), 0u);
  EXPECT_DOUBLE_EQ(sim.time(), 9.0);
  sim.Sense();
  sim.Truth();
  EXPECT_EQ(sim.reads(), 2u);
}

TEST(WorldTest, TrajectoryCsvLayout) {
  std::ostringstream out;
  TrajectoryWriter writer(out, ArmModel::Uniform(2, 1.0));
  writer.Write(ArmState::AtRest(VectorXd::Zero(2)), Eigen::Vector2d(0.25, -1.5));
  EXPECT_EQ(out.str(),
            "t,q0,q1,qd0,qd1,tau0,tau1,ee_x,ee_y\n"
            "0,0,0,0,0,0.25,-1.5,1,0\n");
}

}  // namespace
}  // namespace maif::armsim
