#include "mbgf/resummation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mbgf/errors.hpp"
#include "mbgf/perturbation.hpp"

namespace mbgf {

namespace {

constexpr double kTdaDenomFloor = 1e-10;
constexpr double kScDenomFloor = 1e-12;

double amplitude_or_throw(double rhs, double d, double omega) {
  if (rhs == 0.0) return 0.0;
  if (std::abs(d) < kTdaDenomFloor) {
    std::ostringstream os;
    os << "TDA amplitude denominator " << d << " at omega=" << omega
       << " sits on a 2p1h/2h1p difference";
    throw numerical_error(os.str());
  }
  return rhs / d;
}

}  // namespace

int tda_amplitudes::ext_pos(int p) const {
  for (std::size_t e = 0; e < externals.size(); ++e)
    if (externals[e] == p) return static_cast<int>(e);
  throw validation_error("amplitudes were not solved for orbital " + std::to_string(p));
}

tda_amplitudes tda2_iterate(const integral_set& ints, double omega, int n_cycles,
                            int p_filter) {
  if (n_cycles < 0) throw validation_error("cycle count must be nonnegative");
  if (p_filter >= ints.m) throw validation_error("amplitude orbital out of range");
  const std::vector<int> occ = ints.occupied();
  const std::vector<int> vir = ints.virtuals();
  const int no = static_cast<int>(occ.size());
  const int nv = static_cast<int>(vir.size());

  tda_amplitudes amps;
  amps.omega = omega;
  amps.cycles = n_cycles;
  amps.m = ints.m;
  amps.no = no;
  amps.nv = nv;
  if (p_filter >= 0) {
    amps.externals = {p_filter};
  } else {
    amps.externals.resize(ints.m);
    for (int p = 0; p < ints.m; ++p) amps.externals[p] = p;
  }
  const int ne = static_cast<int>(amps.externals.size());

  std::vector<double> d1(static_cast<std::size_t>(nv) * nv * no);
  std::vector<double> dv(static_cast<std::size_t>(no) * no * nv);
  for (int a = 0; a < nv; ++a)
    for (int b = 0; b < nv; ++b)
      for (int i = 0; i < no; ++i)
        d1[(static_cast<std::size_t>(a) * nv + b) * no + i] =
            ((omega + ints.eps[occ[i]]) - ints.eps[vir[a]]) - ints.eps[vir[b]];
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < no; ++j)
      for (int a = 0; a < nv; ++a)
        dv[(static_cast<std::size_t>(i) * no + j) * nv + a] =
            ((ints.eps[occ[i]] + ints.eps[occ[j]]) - omega) - ints.eps[vir[a]];

  auto uix = [nv, no](int e, int a, int b, int i) {
    return ((static_cast<std::size_t>(e) * nv + a) * nv + b) * no + i;
  };
  auto vix = [no, nv](int e, int i, int j, int a) {
    return ((static_cast<std::size_t>(e) * no + i) * no + j) * nv + a;
  };

  // Substitution seed from U = V = 0: bare integrals over the denominators.
  amps.u.assign(static_cast<std::size_t>(ne) * nv * nv * no, 0.0);
  amps.v.assign(static_cast<std::size_t>(ne) * no * no * nv, 0.0);
  for (int e = 0; e < ne; ++e) {
    const int p = amps.externals[e];
    for (int a = 0; a < nv; ++a)
      for (int b = 0; b < nv; ++b)
        for (int i = 0; i < no; ++i) {
          const double rhs = ints.vas(vir[a], vir[b], p, occ[i]);
          amps.u[uix(e, a, b, i)] =
              amplitude_or_throw(rhs, d1[(static_cast<std::size_t>(a) * nv + b) * no + i], omega);
        }
    for (int i = 0; i < no; ++i)
      for (int j = 0; j < no; ++j)
        for (int a = 0; a < nv; ++a) {
          const double rhs = ints.vas(p, vir[a], occ[i], occ[j]);
          amps.v[vix(e, i, j, a)] =
              amplitude_or_throw(rhs, dv[(static_cast<std::size_t>(i) * no + j) * nv + a], omega);
        }
  }

  std::vector<double> nu(amps.u.size()), nv_amp(amps.v.size());
  for (int cycle = 0; cycle < n_cycles; ++cycle) {
    for (int e = 0; e < ne; ++e) {
      const int p = amps.externals[e];
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
          for (int i = 0; i < no; ++i) {
            double rhs = ints.vas(vir[a], vir[b], p, occ[i]);
            double ring = 0.0;
            for (int c = 0; c < nv; ++c)
              for (int k = 0; k < no; ++k) {
                ring += ints.vas(vir[a], occ[k], vir[c], occ[i]) * amps.u[uix(e, c, b, k)];
                ring -= ints.vas(vir[b], occ[k], vir[c], occ[i]) * amps.u[uix(e, c, a, k)];
              }
            rhs -= ring;
            double ladder = 0.0;
            for (int c = 0; c < nv; ++c)
              for (int d = 0; d < nv; ++d)
                ladder += ints.vas(vir[a], vir[b], vir[c], vir[d]) * amps.u[uix(e, c, d, i)];
            rhs += 0.5 * ladder;
            nu[uix(e, a, b, i)] =
                amplitude_or_throw(rhs, d1[(static_cast<std::size_t>(a) * nv + b) * no + i], omega);
          }
      for (int i = 0; i < no; ++i)
        for (int j = 0; j < no; ++j)
          for (int a = 0; a < nv; ++a) {
            double rhs = ints.vas(p, vir[a], occ[i], occ[j]);
            double ring = 0.0;
            for (int k = 0; k < no; ++k)
              for (int c = 0; c < nv; ++c) {
                ring += ints.vas(occ[k], vir[a], occ[i], vir[c]) * amps.v[vix(e, k, j, c)];
                ring -= ints.vas(occ[k], vir[a], occ[j], vir[c]) * amps.v[vix(e, k, i, c)];
              }
            rhs -= ring;
            double ladder = 0.0;
            for (int k = 0; k < no; ++k)
              for (int l = 0; l < no; ++l)
                ladder += ints.vas(occ[k], occ[l], occ[i], occ[j]) * amps.v[vix(e, k, l, a)];
            rhs += 0.5 * ladder;
            nv_amp[vix(e, i, j, a)] =
                amplitude_or_throw(rhs, dv[(static_cast<std::size_t>(i) * no + j) * nv + a], omega);
          }
    }
    amps.u.swap(nu);
    amps.v.swap(nv_amp);
  }
  return amps;
}

double tda2_sigma_element(const integral_set& ints, const tda_amplitudes& amps, int p,
                          int q) {
  const std::vector<int> occ = ints.occupied();
  const std::vector<int> vir = ints.virtuals();
  const int no = amps.no, nv = amps.nv;
  double acc = 0.0;
  for (int i = 0; i < no; ++i)
    for (int a = 0; a < nv; ++a)
      for (int b = 0; b < nv; ++b) {
        const double vqi_ab = ints.vas(q, occ[i], vir[a], vir[b]);
        const double u = amps.u_at(p, a, b, i);
        if (vqi_ab == 0.0 || u == 0.0) continue;
        acc += 0.5 * vqi_ab * u;
      }
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < no; ++j)
      for (int a = 0; a < nv; ++a) {
        const double vij_pa = ints.vas(occ[i], occ[j], p, vir[a]);
        const double vq = amps.v_at(q, i, j, a);
        if (vij_pa == 0.0 || vq == 0.0) continue;
        acc -= 0.5 * vij_pa * vq;
      }
  return acc;
}

Eigen::MatrixXd tda2_sigma(const integral_set& ints, const tda_amplitudes& amps) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(ints.m, ints.m);
  for (int p = 0; p < ints.m; ++p)
    for (int q = p; q < ints.m; ++q) {
      const double el = tda2_sigma_element(ints, amps, p, q);
      s(p, q) = el;
      s(q, p) = el;
    }
  return s;
}

self_energy_evaluator make_tda_evaluator(integral_set ints, int n_cycles, double lo,
                                         double hi) {
  if (!(lo < hi)) throw validation_error("empty frequency window");
  ints.validate();
  auto sh = std::make_shared<const integral_set>(std::move(ints));

  self_energy_evaluator ev;
  ev.m = sh->m;
  ev.eps = sh->eps;
  ev.fermi = sh->fermi_level();
  ev.provenance = "tda2";
  ev.monotone_diagonal = false;  // ladder iteration raises the pole orders

  ev.eval = [sh, n_cycles](double w) {
    const tda_amplitudes amps = tda2_iterate(*sh, w, n_cycles);
    return tda2_sigma(*sh, amps);
  };
  ev.diag = [sh, n_cycles](int q, double w) {
    const tda_amplitudes amps = tda2_iterate(*sh, w, n_cycles, q);
    return tda2_sigma_element(*sh, amps, q, q);
  };

  // Singularities sit at the coupled 2p1h/2h1p differences at every cycle
  // count; the denominators never move.
  ev.singularities = sigma2_singularities(*sh, -1);
  ev.orbital_singularities.resize(sh->m);
  for (int q = 0; q < sh->m; ++q) ev.orbital_singularities[q] = sigma2_singularities(*sh, q);
  return ev;
}

long long sc_pole_state::total_poles() const {
  long long n = 0;
  for (const auto& list : orbitals) n += static_cast<long long>(list.size());
  return n;
}

std::vector<double> sc_pole_state::orbital_residue_sums() const {
  std::vector<double> sums(orbitals.size(), 0.0);
  for (std::size_t q = 0; q < orbitals.size(); ++q)
    for (const sc_pole& p : orbitals[q]) sums[q] += p.residue;
  return sums;
}

sc_pole_state scgf2_seed(const integral_set& ints) {
  sc_pole_state st;
  st.m = ints.m;
  st.cycle = -1;
  st.orbitals.resize(ints.m);
  const std::vector<int> occ = ints.occupied();
  std::vector<bool> is_occ(ints.m, false);
  for (int i : occ) is_occ[i] = true;
  for (int q = 0; q < ints.m; ++q)
    st.orbitals[q].push_back({ints.eps[q], 1.0, is_occ[q]});
  return st;
}

namespace {

struct sc_term {
  double v1 = 0.0, v2 = 0.0;
  double w1 = 0.0, w2 = 0.0, w3 = 0.0;
  double f1 = 1.0, f2 = 1.0, f3 = 1.0;
  bool particle = true;
};

struct sc_orbital_terms {
  std::vector<sc_term> terms;
  std::vector<double> singularities;
};

[[noreturn]] void throw_sc_collision(double omega) {
  throw numerical_error("sc-GF2 denominator collision at omega=" + std::to_string(omega) +
                        "; the frequency sits on a pole-energy difference");
}

double sc_terms_eval(const std::vector<sc_term>& terms, double w) {
  double acc = 0.0;
  for (const sc_term& t : terms) {
    if (t.particle) {
      const double d = ((w + t.w1) - t.w2) - t.w3;
      if (std::abs(d) < kScDenomFloor) throw_sc_collision(w);
      acc += 0.5 * t.v1 * (t.v2 / d) * t.f1 * t.f2 * t.f3;
    } else {
      const double d = ((t.w1 + t.w2) - w) - t.w3;
      if (std::abs(d) < kScDenomFloor) throw_sc_collision(w);
      acc -= 0.5 * t.v1 * (t.v2 / d) * t.f1 * t.f2 * t.f3;
    }
  }
  return acc;
}

double sc_terms_deriv(const std::vector<sc_term>& terms, double w) {
  double acc = 0.0;
  for (const sc_term& t : terms) {
    const double d = t.particle ? ((w + t.w1) - t.w2) - t.w3 : ((t.w1 + t.w2) - w) - t.w3;
    if (std::abs(d) < kScDenomFloor) throw_sc_collision(w);
    acc -= 0.5 * t.v1 * (t.v2 / (d * d)) * t.f1 * t.f2 * t.f3;
  }
  return acc;
}

}  // namespace

self_energy_evaluator make_scgf2_evaluator(const integral_set& ints,
                                           const sc_pole_state& state,
                                           const scgf2_options& opt,
                                           double* skipped_weight, long long* term_count) {
  if (state.m != ints.m || static_cast<int>(state.orbitals.size()) != ints.m)
    throw validation_error("pole state does not match the integral set");
  const std::vector<int> occ = ints.occupied();
  const std::vector<int> vir = ints.virtuals();

  std::vector<std::vector<const sc_pole*>> holes(ints.m), parts(ints.m);
  for (int q = 0; q < ints.m; ++q)
    for (const sc_pole& p : state.orbitals[q]) {
      if (!(p.residue > 0.0))
        throw validation_error("pole state carries a nonpositive residue");
      (p.hole ? holes[q] : parts[q]).push_back(&p);
    }

  double skipped = 0.0;
  long long n_terms = 0;
  auto lists = std::make_shared<std::vector<sc_orbital_terms>>(ints.m);
  for (int q = 0; q < ints.m; ++q) {
    sc_orbital_terms& ot = (*lists)[q];
    for (int i : occ)
      for (int a : vir)
        for (int b : vir) {
          const double v1 = ints.vas(q, i, a, b);
          const double v2 = ints.vas(a, b, q, i);
          if (v1 == 0.0 || v2 == 0.0) continue;
          for (const sc_pole* pi : holes[i])
            for (const sc_pole* pa : parts[a])
              for (const sc_pole* pb : parts[b]) {
                const double fp = pi->residue * pa->residue * pb->residue;
                if (fp < opt.f_product_floor) {
                  skipped += fp;
                  continue;
                }
                ot.terms.push_back({v1, v2, pi->omega, pa->omega, pb->omega, pi->residue,
                                    pa->residue, pb->residue, true});
                ot.singularities.push_back((pa->omega + pb->omega) - pi->omega);
                if (++n_terms > opt.term_cap)
                  throw numerical_error(
                      "sc-GF2 term count exceeds the cap; the pole growth is factorial in "
                      "the cycle count, prune or lower the cycle");
              }
        }
    for (int i : occ)
      for (int j : occ)
        for (int a : vir) {
          const double v1 = ints.vas(i, j, q, a);
          const double v2 = ints.vas(q, a, i, j);
          if (v1 == 0.0 || v2 == 0.0) continue;
          for (const sc_pole* pi : holes[i])
            for (const sc_pole* pj : holes[j])
              for (const sc_pole* pa : parts[a]) {
                const double fp = pi->residue * pj->residue * pa->residue;
                if (fp < opt.f_product_floor) {
                  skipped += fp;
                  continue;
                }
                ot.terms.push_back({v1, v2, pi->omega, pj->omega, pa->omega, pi->residue,
                                    pj->residue, pa->residue, false});
                ot.singularities.push_back((pi->omega + pj->omega) - pa->omega);
                if (++n_terms > opt.term_cap)
                  throw numerical_error(
                      "sc-GF2 term count exceeds the cap; the pole growth is factorial in "
                      "the cycle count, prune or lower the cycle");
              }
        }
    std::sort(ot.singularities.begin(), ot.singularities.end());
    ot.singularities.erase(
        std::unique(ot.singularities.begin(), ot.singularities.end(),
                    [&opt](double x, double y) { return std::abs(y - x) <= opt.merge_tol; }),
        ot.singularities.end());
  }
  if (skipped_weight) *skipped_weight = skipped;
  if (term_count) *term_count = n_terms;

  self_energy_evaluator ev;
  ev.m = ints.m;
  ev.eps = ints.eps;
  ev.fermi = ints.fermi_level();
  ev.provenance = "scgf2";
  ev.monotone_diagonal = true;  // diagonal coefficients are all nonnegative

  ev.diag = [lists](int q, double w) { return sc_terms_eval((*lists)[q].terms, w); };
  ev.diag_deriv = [lists](int q, double w) { return sc_terms_deriv((*lists)[q].terms, w); };
  ev.eval = [lists](double w) {
    const int m = static_cast<int>(lists->size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
    for (int q = 0; q < m; ++q) s(q, q) = sc_terms_eval((*lists)[q].terms, w);
    return s;
  };
  ev.deriv = [lists](double w) {
    const int m = static_cast<int>(lists->size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
    for (int q = 0; q < m; ++q) s(q, q) = sc_terms_deriv((*lists)[q].terms, w);
    return s;
  };

  ev.orbital_singularities.resize(ints.m);
  std::vector<double> all;
  for (int q = 0; q < ints.m; ++q) {
    ev.orbital_singularities[q] = (*lists)[q].singularities;
    all.insert(all.end(), (*lists)[q].singularities.begin(), (*lists)[q].singularities.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(),
                        [&opt](double x, double y) { return std::abs(y - x) <= opt.merge_tol; }),
            all.end());
  ev.singularities = std::move(all);
  return ev;
}

scgf2_cycle_result scgf2_cycle(const integral_set& ints, const sc_pole_state& state,
                               const scgf2_options& opt) {
  if (!(opt.lo < opt.hi)) throw validation_error("empty frequency window");
  scgf2_cycle_result r;
  r.evaluator = make_scgf2_evaluator(ints, state, opt, &r.skipped_weight, &r.term_count);

  long long projected = 0;
  for (int q = 0; q < ints.m; ++q) {
    long long inside = 0;
    for (double s : r.evaluator.orbital_singularities[q])
      if (s > opt.lo && s < opt.hi) ++inside;
    projected += inside + 1;  // one root per bracket of a monotone diagonal
  }
  r.projected_poles = projected;
  if (projected > opt.pole_cap) {
    std::ostringstream os;
    os << "projected pole count " << projected << " exceeds the cap " << opt.pole_cap
       << "; pole growth is factorial in the cycle count";
    throw numerical_error(os.str());
  }

  scan_options so = opt.scan;
  so.lo = opt.lo;
  so.hi = opt.hi;
  const std::vector<dyson_root> roots = solve_diagonal_all(r.evaluator, so, &r.scan_totals);

  sc_pole_state next;
  next.m = ints.m;
  next.cycle = state.cycle + 1;
  next.orbitals.resize(ints.m);
  for (const dyson_root& root : roots)
    next.orbitals[root.orbital].push_back({root.omega, root.residue, root.hole});

  for (const auto& list : next.orbitals) {
    double sum = 0.0;
    for (const sc_pole& p : list) sum += p.residue;
    r.max_orbital_residue_excess = std::max(r.max_orbital_residue_excess, sum - 1.0);
  }
  r.state = std::move(next);
  return r;
}

sc_pole_state prune_poles(const sc_pole_state& state, double residue_floor) {
  if (residue_floor < 0.0) throw validation_error("residue floor must be nonnegative");
  sc_pole_state out;
  out.m = state.m;
  out.cycle = state.cycle;
  out.orbitals.resize(state.orbitals.size());
  for (std::size_t q = 0; q < state.orbitals.size(); ++q) {
    const auto& src = state.orbitals[q];
    auto& dst = out.orbitals[q];
    for (const sc_pole& p : src)
      if (p.residue >= residue_floor) dst.push_back(p);
    if (dst.empty() && !src.empty()) {
      const sc_pole* best = &src[0];
      for (const sc_pole& p : src)
        if (p.residue > best->residue) best = &p;
      dst.push_back(*best);
    }
  }
  return out;
}

}  // namespace mbgf
