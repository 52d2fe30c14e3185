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

#include "maif/bench/metrics.h"

#include <algorithm>
#include <cmath>

#include "maif/config.h"
#include "maif/error.h"

namespace maif::bench {
namespace {

std::string Field(const std::optional<double>& v) { return v ? FormatDouble(*v) : ""; }

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

MetricRecord ComputeMetrics(const armsim::ArmModel& arm, const VectorXd& q, const VectorXd& q_d,
                            const VectorXd* mu, const diffnet::Tensor* decoded,
                            const diffnet::Tensor* render) {
  if (q.size() != arm.dof() || q_d.size() != arm.dof()) {
    throw ShapeError("metrics: joint vectors do not match the arm");
  }
  MetricRecord r;
  r.q = q;
  r.ee_error = (armsim::ForwardKinematics(arm, q) - armsim::ForwardKinematics(arm, q_d)).norm();
  r.goal_error = (q - q_d).norm();
  if (mu) {
    if (mu->size() != q.size()) throw ShapeError("metrics: belief does not match the arm");
    r.mu = *mu;
    r.perception = (*mu - q).norm();
    r.belief_goal = (*mu - q_d).norm();
  }
  if (decoded) {
    if (!render || render->shape() != decoded->shape()) {
      throw ShapeError("metrics: decoded image and render differ in shape");
    }
    r.image_error = diffnet::SquaredNorm(*decoded - *render) / static_cast<double>(render->size());
  }
  return r;
}

std::vector<GoalSummary> Summarize(const MetricSeries& series, const Scenario& scenario) {
  std::vector<GoalSummary> out;
  const int total = static_cast<int>(series.records.size());
  for (int g = 0; g < static_cast<int>(scenario.goals.size()); ++g) {
    auto [first, last] = scenario.slice(g);
    last = std::min(last, total);
    if (first >= last) continue;
    GoalSummary s;
    s.goal = g;
    const auto& recs = series.records;
    s.t_start = recs[static_cast<std::size_t>(first)].t;
    s.t_end = recs[static_cast<std::size_t>(last - 1)].t;
    s.ee_start = recs[static_cast<std::size_t>(first)].ee_error;
    s.goal_error_start = recs[static_cast<std::size_t>(first)].goal_error;
    const int window = std::max(1, static_cast<int>(std::ceil(0.1 * (last - first) - 1e-9)));
    std::vector<double> ee, ge, pe, bg, im;
    for (int k = last - window; k < last; ++k) {
      const MetricRecord& r = recs[static_cast<std::size_t>(k)];
      ee.push_back(r.ee_error);
      ge.push_back(r.goal_error);
      if (r.perception) pe.push_back(*r.perception);
      if (r.belief_goal) bg.push_back(*r.belief_goal);
      if (r.image_error) im.push_back(*r.image_error);
    }
    s.ee_steady = Mean(ee);
    s.goal_error_steady = Mean(ge);
    if (pe.size() == ee.size()) s.perception_steady = Mean(pe);
    if (bg.size() == ee.size()) s.belief_goal_steady = Mean(bg);
    if (im.size() == ee.size()) s.image_error_steady = Mean(im);
    for (int k = first; k < last; ++k) {
      const MetricRecord& r = recs[static_cast<std::size_t>(k)];
      if (!s.ee_reach_time && r.ee_error <= 0.15 * s.ee_start) s.ee_reach_time = r.t;
      if (!s.joint_reach_ticks && r.goal_error <= 0.1 * s.goal_error_start) {
        s.joint_reach_ticks = k - first;
      }
    }
    out.push_back(s);
  }
  return out;
}

void WriteDiagCsv(std::ostream& out, const MetricSeries& series) {
  const int n = series.joints;
  out << "t,goal,ee_error,goal_error,perception,belief_goal,image_error,free_energy,"
         "zq_sensory,zv_sensory,zq_goal,zv_goal,safe_stop,image_blank";
  for (const char* name : {"q", "mu", "tau"}) {
    for (int i = 0; i < n; ++i) out << ',' << name << i;
  }
  out << '\n';
  for (const MetricRecord& r : series.records) {
    out << FormatDouble(r.t) << ',' << r.goal << ',' << FormatDouble(r.ee_error) << ','
        << FormatDouble(r.goal_error) << ',' << Field(r.perception) << ',' << Field(r.belief_goal)
        << ',' << Field(r.image_error) << ',' << Field(r.free_energy);
    for (int i = 0; i < 4; ++i) {
      out << ',';
      if (r.latent_terms) out << FormatDouble((*r.latent_terms)[static_cast<std::size_t>(i)]);
    }
    out << ',' << (r.safe_stop ? 1 : 0) << ',';
    if (r.image_blank) out << (*r.image_blank ? 1 : 0);
    for (const VectorXd* v : {&r.q, &r.mu, &r.tau}) {
      for (int i = 0; i < n; ++i) {
        out << ',';
        if (v->size() == n) out << FormatDouble((*v)[i]);
      }
    }
    out << '\n';
  }
}

void WriteSummaryCsv(std::ostream& out, const std::vector<GoalSummary>& summary) {
  out << "goal,t_start,t_end,ee_start,ee_steady,goal_error_start,goal_error_steady,"
         "perception_steady,belief_goal_steady,image_error_steady,ee_reach_time,"
         "joint_reach_ticks\n";
  for (const GoalSummary& s : summary) {
    out << s.goal << ',' << FormatDouble(s.t_start) << ',' << FormatDouble(s.t_end) << ','
        << FormatDouble(s.ee_start) << ',' << FormatDouble(s.ee_steady) << ','
        << FormatDouble(s.goal_error_start) << ',' << FormatDouble(s.goal_error_steady) << ','
        << Field(s.perception_steady) << ',' << Field(s.belief_goal_steady) << ','
        << Field(s.image_error_steady) << ',' << Field(s.ee_reach_time) << ',';
    if (s.joint_reach_ticks) out << *s.joint_reach_ticks;
    out << '\n';
  }
}

}  // namespace maif::bench
