// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "quadcurl/errors.hpp"
#include "quadcurl/study.hpp"

using namespace quadcurl;

namespace {

const double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "MISS ") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Window {
  double lo, hi;
  bool contains(double r) const { return r >= lo && r <= hi; }
};
const Window kL2{1.8, 2.5}, kCurl{1.8, 2.5}, kCurlCurl{0.85, 1.25}, kDiv{1.7, 2.3};

// Configurations whose factorization is part of criterion 3.
std::vector<std::string> g_factorized, g_failed;

std::optional<StudyResult> run(const StudyConfig& c, const std::string& label) {
  try {
    StudyResult r = run_study(c);
    g_factorized.push_back(label);
    return r;
  } catch (const SolverError& e) {
    g_failed.push_back(label + " (" + e.what() + ")");
  } catch (const Error& e) {
    g_failed.push_back(label + " (" + e.what() + ")");
  }
  return std::nullopt;
}

StudyConfig ladder(int example, std::vector<int> n, double alpha_plus, std::optional<double> gamma = {}) {
  StudyConfig c;
  c.example = example;
  c.n_list = std::move(n);
  c.alpha_plus = alpha_plus;
  c.gamma = gamma;
  c.parallel = true;
  return c;
}

void print_rows(const StudyResult& r, const std::string& label) {
  for (const StudyRow& row : r.rows) {
    std::printf("    %-22s n=%-3d L2=%.4e curl=%.4e cc=%.4e div=%.4e", label.c_str(), row.n, row.errors.l2,
                row.errors.curl, row.errors.curlcurl, row.errors.div);
    if (row.rates) {
      std::printf("  rates %.2f %.2f %.2f %.2f", row.rates->l2, row.rates->curl, row.rates->curlcurl,
                  row.rates->div);
    }
    std::printf("\n");
  }
}

// Finest-pair rates against the four windows.
void check_rates(Outcome& out, const std::optional<StudyResult>& r, const std::string& label) {
  if (!r) {
    out.require(false, label + " solve failed");
    return;
  }
  print_rows(*r, label);
  const StudyRow& last = r->rows.back();
  if (!last.rates) {
    out.require(false, label + " has no rate row");
    return;
  }
  const NormSet& q = *last.rates;
  out.require(kL2.contains(q.l2), label + " L2 " + fmt("%.2f", q.l2));
  out.require(kCurl.contains(q.curl), label + " curl " + fmt("%.2f", q.curl));
  out.require(kCurlCurl.contains(q.curlcurl), label + " curlcurl " + fmt("%.2f", q.curlcurl));
  out.require(kDiv.contains(q.div), label + " div " + fmt("%.2f", q.div));
}

Outcome element_suite() {
  Outcome out;
  const ReferenceElement& ref = ReferenceElement::get();
  double delta = 0.0;
  for (int i = 0; i < kLocalDofs; ++i) {
    for (int j = 0; j < kLocalDofs; ++j) {
      delta = std::max(delta, std::abs(ReferenceElement::apply_dof(i, ref.basis()[j]) - (i == j ? 1.0 : 0.0)));
    }
  }
  out.require(delta < 1e-10, "delta " + fmt("%.1e", delta));

  const PolyVec2 pb = poincare_bubble();
  const Poly2 B = Poly2::x() * Poly2::y() - Poly2::monomial(2, 1) - Poly2::monomial(1, 2);
  const Poly2 diff = pb.curl() - B;
  double curl_gap = 0.0;
  for (double c : diff.coefficients()) curl_gap = std::max(curl_gap, std::abs(c));
  out.require(curl_gap < 1e-14, "curl pB - B " + fmt("%.1e", curl_gap));

  double origin_trace = 0.0, hyp_gap = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double s = k / 10.0;
    origin_trace = std::max({origin_trace, std::abs(pb.u1(s, 0.0)), std::abs(pb.u2(0.0, s))});
    const Vec2 x(1.0 - s, s);
    const double trace = (pb(x).y() - pb(x).x()) / std::sqrt(2.0);
    hyp_gap = std::max(hyp_gap, std::abs(trace - x.x() * x.y() / (20.0 * std::sqrt(2.0))));
  }
  out.require(origin_trace < 1e-15, "origin-edge traces " + fmt("%.1e", origin_trace));
  out.require(hyp_gap < 1e-14, "hypotenuse trace vs xy/(20 sqrt2) " + fmt("%.1e", hyp_gap));
  out.require(ref.dof_matrix_condition() < 1e8, "DOF condition " + fmt("%.0f", ref.dof_matrix_condition()));

  const Discretization disc = build_discretization(6, levelset_none());
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd w(disc.space.total_dofs());
  for (int i = 0; i < w.size(); ++i) w[i] = U(rng);
  double jump = 0.0;
  const Mesh& m = disc.mesh;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.boundary_edge[e]) continue;
    const Vec2 a = m.vertices[m.edges[e][0]], b = m.vertices[m.edges[e][1]];
    const Vec2 tau = (b - a).normalized();
    for (const Vec2& x : edge_rule(a, b, 9).points) {
      const FieldJet j0 = discrete_jet(disc, w, Side::Plus, m.triangles_of_edge[e][0], x);
      const FieldJet j1 = discrete_jet(disc, w, Side::Plus, m.triangles_of_edge[e][1], x);
      jump = std::max({jump, std::abs((j0.u - j1.u).dot(tau)), std::abs(j0.curl - j1.curl)});
    }
  }
  out.require(jump < 1e-9, "edge continuity " + fmt("%.1e", jump));
  return out;
}

Outcome quadrature_suite() {
  Outcome out;
  auto fact = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  const QuadRule& r8 = reference_rule(8);
  double worst = 0.0;
  for (int a = 0; a <= 8; ++a) {
    for (int b = 0; a + b <= 8; ++b) {
      double s = 0.0;
      for (std::size_t q = 0; q < r8.size(); ++q) {
        s += r8.weights[q] * std::pow(r8.points[q].x(), a) * std::pow(r8.points[q].y(), b);
      }
      const double exact = fact(a) * fact(b) / fact(a + b + 2);
      worst = std::max(worst, std::abs(s - exact) / exact);
    }
  }
  out.require(worst < 1e-12, "degree-8 monomials " + fmt("%.1e", worst));

  const InterfaceGeometry circle = levelset_circle(Vec2::Zero(), kPi / 6);
  const Mesh mesh = build_structured_mesh(40);
  const Classification cls = classify_elements(mesh, circle);
  double area = 0.0, length = 0.0;
  for (int t : cls.t_minus) area += mesh.area(t);
  for (int t : cls.t_gamma) {
    const CutDecomposition cut = decompose_cut_element(mesh, t, circle, cls.tie_epsilon);
    area += cut.area_minus;
    length += cut.gamma_rule.total_weight();
  }
  const double area_err = std::abs(area - kPi * kPi * kPi / 36), length_err = std::abs(length - kPi * kPi / 3);
  out.require(area_err < 1e-6, "disc area error " + fmt("%.1e", area_err));
  out.require(length_err < 1e-6, "interface length error " + fmt("%.1e", length_err));
  return out;
}

// p = (1 + x - 2y^2 + xy, x^2/2 - y + 3)
FieldSample quadratic(const Vec2& x) {
  return {Vec2(1 + x.x() - 2 * x.y() * x.y() + x.x() * x.y(), 0.5 * x.x() * x.x() - x.y() + 3), 4 * x.y()};
}

Outcome system_suite() {
  Outcome out;
  const InterfaceGeometry circle = levelset_circle(Vec2::Zero(), kPi / 6);
  const Discretization disc = build_discretization(10, circle);
  ProblemParams p;
  p.alpha_plus = 10.0;
  const LinearSystem sys = assemble(disc, p, manufactured_data(example1_solution(), p, false));
  const Eigen::SparseMatrix<double> At = sys.A.transpose();
  const double asym = Eigen::SparseMatrix<double>(sys.A - At).coeffs().cwiseAbs().maxCoeff() / sys.A.coeffs().cwiseAbs().maxCoeff();
  out.require(asym <= 1e-12, "relative asymmetry " + fmt("%.1e", asym));

  const Mesh& m = disc.mesh;
  using Local = Eigen::Matrix<double, kLocalDofs, 1>;
  using Doubled = Eigen::Matrix<double, 2 * kLocalDofs, 1>;
  auto local = [&](int t) {
    const auto d = physical_dofs(m, t, quadratic);
    return Local(Eigen::Map<const Local>(d.data()));
  };
  double energy = 0.0;
  for (int t : disc.cls.t_gamma) {
    Doubled x;
    x << local(t), local(t);
    energy += x.dot(interface_penalty_terms(disc.bases[t], disc.cuts[t].gamma_rule, p.lambda, disc.h()) * x);
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto [t0, t1] = m.triangles_of_edge[e];
    if (t1 < 0) continue;
    energy += edge_jump_energy(disc.bases[t0], disc.bases[t1], local(t0), local(t1), m.vertices[m.edges[e][0]],
                               m.vertices[m.edges[e][1]], disc.h(), kG0 | kGhost);
  }
  out.require(std::abs(energy) < 1e-10, "quadratic stabilization energy " + fmt("%.1e", energy));

  const LinearSystem zero = assemble(disc, ProblemParams{}, ProblemData::zero());
  const double u0 = solve(zero.A, zero.b).coefficients.norm();
  out.require(zero.b.norm() == 0.0 && u0 == 0.0, "zero data solution norm " + fmt("%.1e", u0));

  out.require(g_failed.empty(), std::to_string(g_factorized.size()) + " experiment configurations factorized at lambda=100");
  for (const auto& f : g_failed) out.require(false, "factorization failed: " + f);
  return out;
}

Outcome example1(const std::optional<StudyResult>& r) {
  Outcome out;
  check_rates(out, r, "ex1 a+=1");
  if (!r) return out;
  // Published errors at n = 20, 40, 80.
  const std::array<NormSet, 3> published{{{7.4869e-01, 8.1887e+00, 1.2171e+02, 8.4885e-01},
                                          {1.8048e-01, 2.0853e+00, 5.4720e+01, 2.5086e-01},
                                          {3.6680e-02, 4.2248e-01, 2.5819e+01, 6.6711e-02}}};
  double worst = 1.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const NormSet& e = r->rows[k].errors;
    const NormSet& q = published[k];
    for (auto [a, b] : {std::pair{e.l2, q.l2}, {e.curl, q.curl}, {e.curlcurl, q.curlcurl}, {e.div, q.div}}) {
      worst = std::max({worst, a / b, b / a});
    }
  }
  out.require(worst <= 3.0, "largest ratio to published errors " + fmt("%.3f", worst));
  return out;
}

Outcome interpolation_suite() {
  Outcome out;
  const InterfaceGeometry circle = levelset_circle(Vec2::Zero(), kPi / 6);
  const ExactSolution u = example1_solution();
  const ProblemParams p;
  std::vector<double> l2, energy;
  for (int n : {10, 20, 40}) {
    const Discretization disc = build_discretization(n, circle);
    const Eigen::VectorXd w = interpolate_global(disc, as_field(u));
    l2.push_back(compute_errors(disc, w, u).total.l2);
    energy.push_back(energy_error(disc, w, u, p));
    std::printf("    interpolation n=%-3d L2=%.4e energy=%.4e\n", n, l2.back(), energy.back());
  }
  for (std::size_t k = 1; k < l2.size(); ++k) {
    const double rl = rate(l2[k - 1], l2[k]), re = rate(energy[k - 1], energy[k]);
    out.require(rl >= 1.8, "L2 rate " + fmt("%.2f", rl));
    out.require(re >= 0.85, "energy rate " + fmt("%.2f", re));
  }
  return out;
}

Outcome condition_suite(const std::optional<StudyResult>& r) {
  Outcome out;
  if (!r || !r->slopes) {
    out.require(false, "condition study failed");
    return out;
  }
  for (const ConditionRow& row : r->condition) {
    std::printf("    condition n=%-3d |A|=%.4e |A^-1|=%.4e K=%.4e\n", row.n, row.report.norm_A, row.report.norm_Ainv,
                row.report.cond);
  }
  const Slopes& s = *r->slopes;
  out.require(s.cond >= -6.5 && s.cond <= -5.3, "K slope " + fmt("%.3f", s.cond));
  out.require(s.norm_A >= -4.3 && s.norm_A <= -3.7, "|A| slope " + fmt("%.3f", s.norm_A));
  out.require(s.norm_Ainv >= -2.2 && s.norm_Ainv <= -1.5, "|A^-1| slope " + fmt("%.3f", s.norm_Ainv));
  return out;
}

}  // namespace

int main() {
  const std::vector<int> ladder3{20, 40, 80};
  std::printf("running experiment ladders\n");

  const auto ex1 = run(ladder(1, ladder3, 1.0), "example 1 a+=1");
  std::array<std::optional<StudyResult>, 3> contrast;
  const std::array<double, 3> alphas{2.0, 10.0, 100.0};
  for (std::size_t k = 0; k < 3; ++k) {
    contrast[k] = run(ladder(1, ladder3, alphas[k]), "example 1 a+=" + fmt("%g", alphas[k]));
  }
  std::array<std::optional<StudyResult>, 4> peanut;
  const std::array<double, 4> peanut_alphas{1.0, 2.0, 10.0, 100.0};
  for (std::size_t k = 0; k < 4; ++k) {
    peanut[k] = run(ladder(2, ladder3, peanut_alphas[k]), "example 2 a+=" + fmt("%g", peanut_alphas[k]));
  }
  const auto ex3 = run(ladder(3, {10, 20, 40, 80}, 1.0), "example 3");
  std::array<std::optional<StudyResult>, 2> ex4;
  ex4[0] = run(ladder(4, ladder3, 10.0, 0.0), "example 4 a+=10");
  ex4[1] = run(ladder(4, ladder3, 100.0, 0.0), "example 4 a+=100");
  StudyConfig cond = ladder(3, {10, 20, 40}, 1.0);
  cond.mode = StudyMode::Condition;
  const auto condition = run(cond, "example 3 condition");

  std::array<Outcome, 10> outcome;
  const std::array<const char*, 10> name{"element property suite",
                                         "quadrature suite",
                                         "system suite",
                                         "example 1 convergence",
                                         "contrast robustness",
                                         "example 2 peanut",
                                         "example 3 self-convergence",
                                         "example 4 robustness",
                                         "condition-number scaling",
                                         "interpolation rate"};
  outcome[0] = element_suite();
  outcome[1] = quadrature_suite();
  outcome[3] = example1(ex1);
  for (std::size_t k = 0; k < 3; ++k) check_rates(outcome[4], contrast[k], "ex1 a+=" + fmt("%g", alphas[k]));
  check_rates(outcome[5], peanut[0], "ex2 a+=1");
  for (std::size_t k = 1; k < 4; ++k) {
    if (peanut[k]) print_rows(*peanut[k], "ex2 a+=" + fmt("%g", peanut_alphas[k]) + " (info)");
  }
  check_rates(outcome[6], ex3, "ex3");
  check_rates(outcome[7], ex4[0], "ex4 a+=10");
  check_rates(outcome[7], ex4[1], "ex4 a+=100");
  outcome[8] = condition_suite(condition);
  outcome[9] = interpolation_suite();
  outcome[2] = system_suite();

  int failed = 0;
  std::printf("\n");
  for (std::size_t k = 0; k < outcome.size(); ++k) {
    std::printf("criterion %2zu %-28s %s  [%s]\n", k + 1, name[k], outcome[k].pass ? "PASS" : "FAIL",
                outcome[k].detail.c_str());
    failed += !outcome[k].pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(outcome.size()) - failed, outcome.size());
  return failed == 0 ? 0 : 1;
}
