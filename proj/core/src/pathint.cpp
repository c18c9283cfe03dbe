#include "magpath/pathint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "magpath/errors.hpp"
#include "magpath/splitstep.hpp"

namespace magpath {

namespace {

constexpr cplx kI{0.0, 1.0};

double broadcast(const std::vector<double>& v, std::size_t j) {
  return v.size() == 1 ? v[0] : v.at(j);
}

std::vector<Interval> subtract_gaps(Interval outer, std::vector<Interval> gaps) {
  std::sort(gaps.begin(), gaps.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  double cursor = outer.lo;
  for (const auto& g : gaps) {
    if (g.hi <= cursor) continue;
    if (g.lo >= outer.hi) break;
    if (g.lo > cursor) out.push_back({cursor, g.lo});
    cursor = std::max(cursor, g.hi);
  }
  if (cursor < outer.hi) out.push_back({cursor, outer.hi});
  return out;
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    pool.emplace_back([&, t, lo, hi] {
      try {
        if (lo < hi) fn(lo, hi);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<std::size_t> resolve_order(const KernelOptions& opts, std::size_t n) {
  auto order = opts.axis_order.empty() ? default_axis_order(n) : opts.axis_order;
  auto sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t b = 0; b < n; ++b)
    if (sorted.size() != n || sorted[b] != b)
      throw std::invalid_argument("KernelOptions: axis order must be a permutation of the axes");
  return order;
}

// lambda_l tabulated on the tensor product of (in nodes ++ out nodes) per axis.
struct GaugeTables {
  std::vector<std::size_t> union_size;
  std::vector<std::size_t> stride;
  std::vector<std::vector<double>> value;  // per l
  std::vector<std::vector<cplx>> phase;    // e^{i value}
  std::vector<bool> has_nan;
};

GaugeTables build_tables(const SliceMesh& in, const SliceMesh& out, const VectorPotentialSpec& a,
                         const GaugeOptions& g, std::size_t threads) {
  const std::size_t n = in.dim();
  GaugeTables t;
  t.union_size.resize(n);
  t.stride.resize(n);
  std::size_t total = 1;
  for (std::size_t b = n; b-- > 0;) {
    t.union_size[b] = in.axis_size(b) + out.axis_size(b);
    t.stride[b] = total;
    total *= t.union_size[b];
  }
  auto coord = [&](std::size_t b, std::size_t u) {
    return u < in.axis_size(b) ? in.axis_nodes(b)[u] : out.axis_nodes(b)[u - in.axis_size(b)];
  };
  t.value.assign(n, std::vector<double>(total));
  t.phase.assign(n, std::vector<cplx>(total));
  t.has_nan.assign(n, false);
  for (std::size_t l = 0; l < n; ++l) {
    std::vector<char> nan_flag(total, 0);
    parallel_for(total, threads, [&](std::size_t lo, std::size_t hi) {
      Point x(n);
      for (std::size_t f = lo; f < hi; ++f) {
        for (std::size_t b = 0; b < n; ++b) x[b] = coord(b, (f / t.stride[b]) % t.union_size[b]);
        const auto r = lambda_j(a, l, x, g);
        t.value[l][f] = r.value;
        if (r.crossed_singularity) {
          nan_flag[f] = 1;
          t.phase[l][f] = cplx{0.0, 0.0};
        } else {
          t.phase[l][f] = std::polar(1.0, r.value);
        }
      }
    });
    t.has_nan[l] = std::any_of(nan_flag.begin(), nan_flag.end(), [](char c) { return c != 0; });
  }
  return t;
}

}  // namespace

ExcisionRegion::ExcisionRegion(std::span<const Interval> outer, const SingularPointSet& singular,
                               double gap_below, double gap_above) {
  if (singular.dim() != outer.size())
    throw std::invalid_argument("ExcisionRegion: singular set dimension mismatch");
  if (!(gap_below >= 0.0) || !(gap_above >= 0.0))
    throw std::invalid_argument("ExcisionRegion: gaps must be non-negative");
  intervals_.resize(outer.size());
  for (std::size_t b = 0; b < outer.size(); ++b) {
    if (!(outer[b].hi > outer[b].lo)) throw std::invalid_argument("ExcisionRegion: empty box");
    std::vector<Interval> gaps;
    for (const auto& p : singular.points())
      gaps.push_back({p.location[b] - gap_below, p.location[b] + gap_above});
    intervals_[b] = subtract_gaps(outer[b], std::move(gaps));
  }
}

bool ExcisionRegion::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t b = 0; b < dim(); ++b) {
    const auto& iv = intervals_[b];
    if (!std::any_of(iv.begin(), iv.end(), [&](const Interval& i) { return x[b] > i.lo && x[b] < i.hi; }))
      return false;
  }
  return true;
}

SliceMesh::SliceMesh(const ExcisionRegion& region, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("SliceMesh: mesh size must be positive");
  nodes_.resize(region.dim());
  weights_.resize(region.dim());
  for (std::size_t b = 0; b < region.dim(); ++b) {
    for (const auto& iv : region.intervals(b)) {
      const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(iv.length() / h)));
      const double w = iv.length() / double(cells);
      for (std::size_t c = 0; c < cells; ++c) {
        nodes_[b].push_back(iv.lo + (double(c) + 0.5) * w);
        weights_[b].push_back(w);
      }
    }
  }
  finish();
}

SliceMesh::SliceMesh(const Grid& grid) {
  nodes_.resize(grid.dim());
  weights_.resize(grid.dim());
  for (std::size_t b = 0; b < grid.dim(); ++b) {
    const Axis& ax = grid.axis(b);
    for (std::size_t i = 0; i < ax.points; ++i) {
      nodes_[b].push_back(ax.node(i));
      weights_[b].push_back(ax.spacing());
    }
  }
  finish();
}

void SliceMesh::finish() {
  strides_.assign(nodes_.size(), 1);
  size_ = 1;
  for (std::size_t b = nodes_.size(); b-- > 0;) {
    strides_[b] = size_;
    size_ *= nodes_[b].size();
  }
}

void SliceMesh::node(std::size_t flat, std::span<double> out) const {
  for (std::size_t b = 0; b < dim(); ++b) out[b] = nodes_[b][axis_index(flat, b)];
}

double SliceMesh::weight(std::size_t flat) const {
  double w = 1.0;
  for (std::size_t b = 0; b < dim(); ++b) w *= weights_[b][axis_index(flat, b)];
  return w;
}

cplx kernel_prefactor(double eps, double power) {
  // (4 i pi eps)^{-power} with sqrt(i) = e^{i pi / 4}.
  return std::polar(std::pow(4.0 * std::numbers::pi * eps, -power), -power * std::numbers::pi / 2.0);
}

std::vector<cplx> apply_slice_kernel(const SliceMesh& in, std::span<const cplx> u,
                                     const SliceMesh& out, double eps,
                                     const VectorPotentialSpec& a, const KernelOptions& opts) {
  const std::size_t n = in.dim();
  if (out.dim() != n || a.dim() != n)
    throw std::invalid_argument("apply_slice_kernel: dimension mismatch");
  if (u.size() != in.size()) throw std::invalid_argument("apply_slice_kernel: state size mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("apply_slice_kernel: eps must be positive");

  std::vector<cplx> result(out.size(), cplx{0.0, 0.0});
  if (in.size() == 0 || out.size() == 0) return result;

  // Kinetic phase factorises over axes.
  std::vector<std::vector<cplx>> kin(n);
  for (std::size_t b = 0; b < n; ++b) {
    const auto xs = in.axis_nodes(b);
    const auto ys = out.axis_nodes(b);
    kin[b].resize(ys.size() * xs.size());
    for (std::size_t p = 0; p < ys.size(); ++p)
      for (std::size_t q = 0; q < xs.size(); ++q) {
        const double d = ys[p] - xs[q];
        kin[b][p * xs.size() + q] = std::polar(1.0, d * d / (4.0 * eps));
      }
  }

  std::vector<std::size_t> in_idx(in.size() * n);
  std::vector<cplx> wu(in.size());
  for (std::size_t j = 0; j < in.size(); ++j) {
    for (std::size_t b = 0; b < n; ++b) in_idx[j * n + b] = in.axis_index(j, b);
    wu[j] = in.weight(j) * u[j];
  }

  const bool gauge = !a.identically_zero;
  const auto order = resolve_order(opts, n);
  std::vector<std::size_t> position(n);
  for (std::size_t p = 0; p < n; ++p) position[order[p]] = p;
  GaugeTables tables;
  if (gauge) tables = build_tables(in, out, a, opts.gauge, opts.threads);

  const cplx pref = kernel_prefactor(eps, 0.5 * double(n));

  parallel_for(out.size(), opts.threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> oi(n);
    Point y(n), x(n), base(n);
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t b = 0; b < n; ++b) oi[b] = out.axis_index(i, b);
      cplx acc{0.0, 0.0};
      for (std::size_t j = 0; j < in.size(); ++j) {
        const std::size_t* ji = &in_idx[j * n];
        cplx k{1.0, 0.0};
        for (std::size_t b = 0; b < n; ++b) k *= kin[b][oi[b] * in.axis_size(b) + ji[b]];
        if (gauge) {
          bool excluded = false;
          for (std::size_t l = 0; l < n && !excluded; ++l) {
            // Coordinates from the output point: axis l in the first term, plus the
            // axes applied before l in the threaded convention.
            std::size_t idx_in = 0, idx_out = 0;
            for (std::size_t b = 0; b < n; ++b) {
              const bool from_out = opts.convention == GaugeConvention::threaded &&
                                    position[b] < position[l];
              const std::size_t uin = ji[b];
              const std::size_t uout = in.axis_size(b) + oi[b];
              const std::size_t src = from_out ? uout : uin;
              idx_in += tables.stride[b] * (b == l ? uin : src);
              idx_out += tables.stride[b] * (b == l ? uout : src);
            }
            const auto& tl = tables.value[l];
            if (tables.has_nan[l] && (std::isnan(tl[idx_in]) || std::isnan(tl[idx_out]))) {
              // Table path crossed a singular point; integrate the segment itself.
              out.node(i, y);
              in.node(j, x);
              for (std::size_t b = 0; b < n; ++b)
                base[b] = (opts.convention == GaugeConvention::threaded && position[b] < position[l])
                              ? y[b]
                              : x[b];
              const auto r = axis_segment_integral(a, l, base, x[l], y[l], opts.gauge);
              if (r.crossed_singularity) {
                excluded = true;
              } else {
                k *= std::polar(1.0, r.value);
              }
            } else {
              k *= tables.phase[l][idx_out] * std::conj(tables.phase[l][idx_in]);
            }
          }
          if (excluded) continue;
        }
        acc += k * wu[j];
      }
      result[i] = pref * acc;
    }
  });
  return result;
}

cplx discrete_action(std::span<const Point> path, double eps, const ScalarPotentialSpec& v,
                     const VectorPotentialSpec& a, const GaugeOptions& opts) {
  if (path.size() < 2) throw std::invalid_argument("discrete_action: need at least two points");
  if (!(eps > 0.0)) throw std::invalid_argument("discrete_action: eps must be positive");
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < path.size(); ++j) {
    const auto& x0 = path[j];
    const auto& x1 = path[j + 1];
    double d2 = 0.0;
    for (std::size_t b = 0; b < x0.size(); ++b) d2 += (x1[b] - x0[b]) * (x1[b] - x0[b]);
    const double pot = v.identically_zero ? 0.0 : evaluate_checked(v, x1);
    const auto bar = lambda_bar(a, x1, x0, opts);
    if (bar.crossed_singularity)
      throw SingularNodeError("discrete_action: gauge path meets a singular point");
    sum += d2 / (4.0 * eps * eps) - pot + bar.value / eps;
  }
  return kI * (eps * sum);
}

cplx slice_kernel(std::span<const double> x1, std::span<const double> x0, double eps,
                  const VectorPotentialSpec& a, const GaugeOptions& opts) {
  if (x1.size() != x0.size()) throw std::invalid_argument("slice_kernel: dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("slice_kernel: eps must be positive");
  double d2 = 0.0;
  for (std::size_t b = 0; b < x0.size(); ++b) d2 += (x1[b] - x0[b]) * (x1[b] - x0[b]);
  const auto bar = lambda_bar(a, x1, x0, opts);
  if (bar.crossed_singularity)
    throw SingularNodeError("slice_kernel: gauge path meets a singular point");
  return kernel_prefactor(eps, 0.5 * double(x0.size())) *
         std::polar(1.0, d2 / (4.0 * eps) + bar.value);
}

BoxSchedule BoxSchedule::radii(std::span<const double> outer, double gap) {
  BoxSchedule s;
  for (double r : outer) s.steps.push_back({{r}, {gap}, 0.0});
  return s;
}

double max_phase_rate(const ScheduleStep& step, std::size_t slices, double eps) {
  double rate = 0.0;
  for (std::size_t j = 0; j <= slices; ++j) {
    const double r = broadcast(step.outer_radius, j);
    double sum = 0.0;
    if (j > 0) sum += r + broadcast(step.outer_radius, j - 1);
    if (j < slices) sum += r + broadcast(step.outer_radius, j + 1);
    rate = std::max(rate, sum / (2.0 * eps));
  }
  return rate;
}

std::vector<double> validate_schedule(const BoxSchedule& schedule, std::size_t slices, double eps,
                                      double mesh_safety) {
  if (schedule.steps.empty()) throw ScheduleError("schedule has no steps");
  if (slices == 0) throw ScheduleError("schedule needs at least one slice");
  if (!(mesh_safety > 0.0 && mesh_safety <= 1.0))
    throw ScheduleError("mesh safety factor must lie in (0, 1]");
  const double bound = std::numbers::pi / 4.0;
  std::vector<double> meshes;
  for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
    const auto& st = schedule.steps[s];
    const std::string where = "schedule step " + std::to_string(s) + ": ";
    for (const auto* v : {&st.outer_radius, &st.gap_radius})
      if (v->size() != 1 && v->size() != slices + 1)
        throw ScheduleError(where + "per-slice vectors need 1 or k+1 entries");
    for (double r : st.outer_radius)
      if (!(r > 0.0) || !std::isfinite(r)) throw ScheduleError(where + "outer radius must be positive");
    for (double g : st.gap_radius)
      if (!(g >= 0.0) || !std::isfinite(g)) throw ScheduleError(where + "gap radius must be non-negative");
    if (s > 0) {
      const auto& prev = schedule.steps[s - 1];
      for (std::size_t j = 0; j <= slices; ++j) {
        if (broadcast(st.outer_radius, j) < broadcast(prev.outer_radius, j))
          throw ScheduleError(where + "outer radius shrinks on slice " + std::to_string(j));
        if (broadcast(st.gap_radius, j) > broadcast(prev.gap_radius, j))
          throw ScheduleError(where + "gap radius grows on slice " + std::to_string(j));
      }
    }
    const double rate = max_phase_rate(st, slices, eps);
    double h = st.mesh;
    if (h < 0.0 || !std::isfinite(h)) throw ScheduleError(where + "mesh must be non-negative");
    if (h == 0.0) {
      h = mesh_safety * bound / rate;
    } else if (h * rate > bound) {
      throw ScheduleError(where + "mesh " + std::to_string(h) +
                          " under-resolves the kinetic phase (h * rate = " +
                          std::to_string(h * rate) + " > pi/4)");
    }
    meshes.push_back(h);
  }
  return meshes;
}

StepEstimate excised_riemann_sum(const AmplitudeProblem& problem, const ScheduleStep& step,
                                 double mesh, const AmplitudeOptions& opts) {
  const std::size_t n = problem.potential.dim;
  if (problem.final_state.dim != n || problem.initial_state.dim != n ||
      problem.vector_potential.dim() != n)
    throw std::invalid_argument("excised_riemann_sum: field dimensions disagree");
  if (problem.slices == 0) throw std::invalid_argument("excised_riemann_sum: k must be positive");
  if (!(problem.time > 0.0)) throw std::invalid_argument("excised_riemann_sum: t must be positive");
  const std::size_t k = problem.slices;
  const double eps = problem.time / double(k);
  Point center = problem.box_center.empty() ? Point(n, 0.0) : problem.box_center;
  if (center.size() != n) throw std::invalid_argument("excised_riemann_sum: box centre dimension");

  const SingularPointSet singular = collect_singularities(
      problem.final_state, problem.initial_state, problem.potential, problem.vector_potential);

  std::vector<SliceMesh> meshes;
  meshes.reserve(k + 1);
  StepEstimate est;
  est.mesh = mesh;
  est.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= k; ++j) {
    const double r = broadcast(step.outer_radius, j);
    const double g = broadcast(step.gap_radius, j);
    est.max_radius = std::max(est.max_radius, r);
    est.min_gap = std::min(est.min_gap, g);
    std::vector<Interval> box(n);
    for (std::size_t b = 0; b < n; ++b) box[b] = {center[b] - r, center[b] + r};
    meshes.emplace_back(ExcisionRegion(box, singular, g, g), mesh);
  }
  for (std::size_t j = 0; j < k; ++j)
    est.work += double(meshes[j].size()) * double(meshes[j + 1].size());
  if (est.work > opts.max_work) {
    const double ratio = std::cbrt(opts.max_work / est.work);
    auto suggested = static_cast<std::size_t>(std::floor(double(k) * ratio));
    suggested = std::max<std::size_t>(1, std::min(suggested, k > 1 ? k - 1 : 1));
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "amplitude quadrature needs %.3g kernel evaluations, over the cap of %.3g; try k = %zu",
                  est.work, opts.max_work, suggested);
    throw CapExceededError(msg, suggested);
  }

  Point x(n);
  auto eval_state = [&](const StateSpec& s, const char* what) {
    const cplx val = s.evaluator(x);
    if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
      throw NonFiniteError(std::string(what) + " is not finite at a quadrature node");
    return val;
  };

  std::vector<cplx> u(meshes[0].size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    meshes[0].node(i, x);
    u[i] = eval_state(problem.initial_state, "initial state");
  }
  for (std::size_t j = 0; j < k; ++j) {
    u = apply_slice_kernel(meshes[j], u, meshes[j + 1], eps, problem.vector_potential, opts.kernel);
    if (!problem.potential.identically_zero)
      for (std::size_t i = 0; i < u.size(); ++i) {
        meshes[j + 1].node(i, x);
        u[i] *= std::polar(1.0, -eps * evaluate_checked(problem.potential, x));
      }
  }
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) {
    meshes[k].node(i, x);
    sum += meshes[k].weight(i) * eval_state(problem.final_state, "final state") * u[i];
  }
  if (problem.prefactor == PrefactorConvention::displayed)
    sum *= kernel_prefactor(eps, -0.5 * double(n));
  est.value = sum;
  return est;
}

AmplitudeEstimate amplitude_quadrature(const AmplitudeProblem& problem,
                                       const BoxSchedule& schedule,
                                       const AmplitudeOptions& opts) {
  if (problem.slices == 0 || !(problem.time > 0.0))
    throw std::invalid_argument("amplitude_quadrature: need t > 0 and k >= 1");
  const double eps = problem.time / double(problem.slices);
  const auto meshes = validate_schedule(schedule, problem.slices, eps, opts.mesh_safety);

  AmplitudeEstimate out;
  for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
    auto est = excised_riemann_sum(problem, schedule.steps[s], meshes[s], opts);
    est.step = s;
    out.steps.push_back(est);
  }
  const std::size_t tail = std::max<std::size_t>(1, std::min(opts.tail_count, out.steps.size()));
  cplx mean{0.0, 0.0};
  for (std::size_t s = out.steps.size() - tail; s < out.steps.size(); ++s) mean += out.steps[s].value;
  mean /= double(tail);
  out.value = mean;
  out.tail_count = tail;
  for (std::size_t s = out.steps.size() - tail; s < out.steps.size(); ++s)
    out.tail_oscillation = std::max(out.tail_oscillation, std::abs(out.steps[s].value - mean));
  out.mesh = meshes.back();
  out.converged = tail >= 2 && out.tail_oscillation <= opts.convergence_threshold * std::abs(mean);
  return out;
}

AmplitudeErrorReport amplitude_error_report(const AmplitudeEstimate& estimate, cplx reference,
                                            double threshold) {
  AmplitudeErrorReport r;
  r.abs_error = std::abs(estimate.value - reference);
  r.rel_error = std::abs(reference) > 0.0 ? r.abs_error / std::abs(reference)
                                          : std::numeric_limits<double>::infinity();
  r.tail_oscillation = estimate.tail_oscillation;
  r.converged = estimate.tail_count >= 2 &&
                estimate.tail_oscillation <= threshold * std::abs(estimate.value);
  return r;
}

double operator_vs_kernel_consistency(const WaveFunction& psi, const VectorPotentialSpec& a,
                                      double eps, const KernelOptions& opts) {
  const Grid& g = psi.grid();
  const SliceMesh mesh(g);
  auto values = apply_slice_kernel(mesh, psi.values(), mesh, eps, a, opts);
  const WaveFunction kernel(g, std::move(values));

  SliceOptions so;
  so.axis_order = opts.axis_order;
  so.gauge = opts.gauge;
  const SliceOperator op(g, ScalarPotentialSpec::zero(g.dim()), a, TimeSlicing(eps, 1), so);
  return l2_distance(op.apply(psi), kernel);
}

}  // namespace magpath
