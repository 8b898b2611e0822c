#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>

#include "gmpc/app.hpp"

namespace gmpc {

namespace {

struct Check
{
  const char * name;
  std::function<bool()> body;
};

Twist random_twist(std::mt19937_64 & rng, double scale, double max_angle)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {scale * u(rng), scale * u(rng), max_angle * u(rng)};
}

double max_abs(const Mat3 & m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

int cmd_selftest(std::ostream & out)
{
  std::mt19937_64 rng(20240611);
  const std::vector<Check> checks = {
    {"exp/log roundtrip (1000 twists, 1e-10)",
     [&] {
       for (int i = 0; i < 1000; ++i) {
         const Twist z = random_twist(rng, 2.0, M_PI - 1e-3);
         if (((log(exp(z)) - z).vector()).cwiseAbs().maxCoeff() > 1e-10) { return false; }
       }
       return true;
     }},
    {"commutator equals adm (1000 pairs, 1e-12)",
     [&] {
       for (int i = 0; i < 1000; ++i) {
         const Twist psi = random_twist(rng, 1.0, 1.0), z = random_twist(rng, 1.0, 1.0);
         const Mat3 c = hat(psi) * hat(z) - hat(z) * hat(psi);
         if ((vee(c).vector() - adm(z) * psi.vector()).cwiseAbs().maxCoeff() > 1e-12) { return false; }
       }
       return true;
     }},
    {"group axioms (200 triples, 1e-9)",
     [&] {
       for (int i = 0; i < 200; ++i) {
         const Pose a = exp(random_twist(rng, 3.0, 3.0)), b = exp(random_twist(rng, 3.0, 3.0)),
                    c = exp(random_twist(rng, 3.0, 3.0));
         if (max_abs(((a * b) * c).matrix() - (a * (b * c)).matrix()) > 1e-9) { return false; }
         if (max_abs((a * a.inverse()).matrix() - Mat3::Identity()) > 1e-9) { return false; }
         if (max_abs((a * b).matrix() - a.matrix() * b.matrix()) > 1e-9) { return false; }
       }
       return true;
     }},
    {"proposed residual is bilinear (halving ratio in [3.5, 4.5])",
     [&] {
       const Twist zd{0.2, 0.0, 0.196};
       for (int i = 0; i < 100; ++i) {
         const Twist psi = random_twist(rng, 0.1, 0.1), dz = random_twist(rng, 0.1, 0.1);
         const double r1 = residual(psi, zd + dz, zd, Linearization::proposed).norm();
         const double r2 = residual(psi * 0.5, zd + dz * 0.5, zd, Linearization::proposed).norm();
         if (r1 == 0.0 || r1 / r2 < 3.5 || r1 / r2 > 4.5) { return false; }
       }
       return true;
     }},
    {"condensed objective equals rollout (T in {1,2,3,5,10})",
     [&] {
       std::uniform_real_distribution<double> u(-1.0, 1.0);
       for (std::size_t T : {1u, 2u, 3u, 5u, 10u}) {
         MpcWindow w;
         w.psi0 = random_twist(rng, 0.3, 0.3);
         for (std::size_t k = 0; k < T; ++k) {
           w.dyn.push_back(discretize_euler(linearize_proposed(random_twist(rng, 0.5, 0.5)), 0.02));
           w.ud.push_back({u(rng), u(rng)});
         }
         w.Qf = Vec3(100.0, 1000.0, 100.0).asDiagonal();
         const BoxQp qp = condense(w);
         for (int trial = 0; trial < 20; ++trial) {
           const Eigen::VectorXd uh = Eigen::VectorXd::Random(static_cast<Eigen::Index>(2 * T));
           const std::vector<Twist> psi = rollout(w, uh);
           double J = psi.back().vector().dot(w.Qf * psi.back().vector());
           for (std::size_t k = 0; k < T; ++k) {
             const Vec2u du = uh.segment<2>(static_cast<Eigen::Index>(2 * k));
             J += psi[k].vector().dot(w.Q * 0.02 * psi[k].vector()) + du.dot(w.H * 0.02 * du);
           }
           if (std::abs(J - qp.objective(uh)) > 1e-9 * std::max(1.0, std::abs(J))) { return false; }
         }
       }
       return true;
     }},
    {"box QP solver reaches KKT tolerance (100 random problems)",
     [&] {
       std::uniform_real_distribution<double> u(-1.0, 1.0);
       BoxQpSolver solver;
       for (int i = 0; i < 100; ++i) {
         const Eigen::Index n = 1 + i % 20;
         const Eigen::MatrixXd M = Eigen::MatrixXd::Random(n, n);
         BoxQp qp;
         qp.P = M * M.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
         qp.q = 5.0 * Eigen::VectorXd::Random(n);
         qp.lo = -Eigen::VectorXd::Constant(n, 0.5 + std::abs(u(rng)));
         qp.hi = Eigen::VectorXd::Constant(n, 0.5 + std::abs(u(rng)));
         const QpSolution s = solver.solve(qp);
         if (s.status != QpStatus::optimal || kkt_residual(qp, s.uhat) > 1e-8) { return false; }
       }
       return true;
     }},
    {"closed loop holds a consistent reference (u = u_d within 1e-7)",
     [&] {
       SimScenario s;
       s.traj = gen_constant_twist({0.2, 0.196}, 0.02, 500);
       s.init_pose = s.traj[0].xd;
       s.cfg.bounds = {{-0.22, -2.84}, {0.22, 2.84}};
       s.steps = s.traj.size();
       const SimResult r = run(s);
       for (std::size_t k = 0; k < r.records.size(); ++k) {
         if (std::abs(r.records[k].u.mu - s.traj[k].ud.mu) > 1e-7
             || std::abs(r.records[k].u.omega - s.traj[k].ud.omega) > 1e-7) {
           return false;
         }
       }
       return !r.failed && r.summary.max_ep < 1e-6;
     }},
  };

  bool all = true;
  for (const Check & c : checks) {
    bool ok = false;
    try {
      ok = c.body();
    } catch (const std::exception &) {
      ok = false;
    }
    all = all && ok;
    out << (ok ? "PASS  " : "FAIL  ") << c.name << '\n';
  }
  return all ? kExitOk : kExitRuntime;
}

}  // namespace gmpc
