#include "iaosim/modal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "iaosim/error.hpp"

namespace iaosim {

namespace {

// A Jordan chain makes the left-right product of its cluster singular; that,
// rather than eigenvalue multiplicity, is the working definition of
// "defective" here. Perturbed Jordan pairs come out near sqrt(machine eps),
// healthy modes orders of magnitude above it.
constexpr double kDefectTol = 1e-6;
constexpr double kClusterTolRel = 1e-6;

struct RawEigen {
  ComplexVector values;
  ComplexMatrix vectors;
};

RawEigen solve(const Matrix& A) {
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "QR iteration did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

// Deterministic vector gauge: unit norm, largest-magnitude entry real positive.
void fix_phase(Eigen::Ref<ComplexVector> v) {
  Index k;
  v.cwiseAbs().maxCoeff(&k);
  const Complex pivot = v[k];
  if (std::abs(pivot) > 0) v *= std::conj(pivot) / std::abs(pivot);
  const double norm = v.norm();
  if (norm > 0) v /= norm;
}

std::vector<Index> sort_order(const ComplexVector& values) {
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double fa = std::abs(values[a].imag());
    const double fb = std::abs(values[b].imag());
    if (fa != fb) return fa < fb;
    if (values[a].real() != values[b].real()) return values[a].real() < values[b].real();
    return values[a].imag() > values[b].imag();
  });
  return order;
}

// Injective nearest-value pairing of the transpose spectrum onto the primary
// one; both come from the same real matrix so this is a permutation up to
// roundoff.
std::vector<Index> pair_by_eigenvalue(const ComplexVector& primary, const ComplexVector& other) {
  const Index n = primary.size();
  std::vector<bool> used(n, false);
  std::vector<Index> match(n, -1);
  for (Index round = 0; round < n; ++round) {
    Index best_i = -1, best_j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (match[i] >= 0) continue;
      for (Index j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double d = std::abs(primary[i] - other[j]);
        if (d < best) {
          best = d;
          best_i = i;
          best_j = j;
        }
      }
    }
    match[best_i] = best_j;
    used[best_j] = true;
  }
  return match;
}

std::vector<std::vector<Index>> cluster_eigenvalues(const ComplexVector& values, double tol) {
  const Index n = values.size();
  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  const auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(values[i] - values[j]) < tol) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<Index>> clusters(n);
  for (Index i = 0; i < n; ++i) clusters[find(i)].push_back(i);
  clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                [](const auto& c) { return c.empty(); }),
                 clusters.end());
  return clusters;
}

}  // namespace

bool ModeSet::any_defective() const {
  return std::any_of(defective.begin(), defective.end(), [](bool d) { return d; });
}

ModeSet eigen_decompose(const Matrix& A, std::vector<StateLabel> states) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "system matrix must be square");
  }
  const Index n = A.rows();

  RawEigen right = solve(A);
  RawEigen left = solve(A.transpose());

  // Align the transpose decomposition with the primary eigenvalue list. A
  // right eigenvector w of A^T is a left eigenvector of A for the same
  // eigenvalue: w^T A = lambda w^T.
  const std::vector<Index> lmatch = pair_by_eigenvalue(right.values, left.values);

  ModeSet m;
  m.states = std::move(states);
  m.matrix_scale = n > 0 ? A.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;

  const std::vector<Index> order = sort_order(right.values);
  m.eigenvalues.resize(n);
  m.right.resize(n, n);
  m.left.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    m.eigenvalues[i] = right.values[order[i]];
    m.right.col(i) = right.vectors.col(order[i]);
    m.left.row(i) = left.vectors.col(lmatch[order[i]]).transpose();
    fix_phase(m.right.col(i));
    ComplexVector row = m.left.row(i).transpose();
    fix_phase(row);
    m.left.row(i) = row.transpose();
  }
  m.defective.assign(static_cast<std::size_t>(n), false);

  // Biorthogonalize left rows against right columns cluster by cluster so
  // that left*right = I wherever the eigenbasis is complete. A singular
  // cluster Gram matrix marks a Jordan block.
  const double cluster_tol = std::max(kClusterTolRel * m.matrix_scale, 1e-300);
  for (const std::vector<Index>& cluster : cluster_eigenvalues(m.eigenvalues, cluster_tol)) {
    const Index k = static_cast<Index>(cluster.size());
    ComplexMatrix Vc(n, k), Wc(k, n);
    for (Index c = 0; c < k; ++c) {
      Vc.col(c) = m.right.col(cluster[c]);
      Wc.row(c) = m.left.row(cluster[c]);
    }
    const ComplexMatrix G = Wc * Vc;
    Eigen::JacobiSVD<ComplexMatrix> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < kDefectTol) {
      for (Index c : cluster) m.defective[static_cast<std::size_t>(c)] = true;
      continue;
    }
    const ComplexMatrix Wn = G.partialPivLu().solve(Wc);
    for (Index c = 0; c < k; ++c) m.left.row(cluster[c]) = Wn.row(c);
  }

  double residual = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (m.defective[static_cast<std::size_t>(i)]) continue;
    for (Index j = 0; j < n; ++j) {
      if (m.defective[static_cast<std::size_t>(j)]) continue;
      const Complex g = m.left.row(i) * m.right.col(j);
      residual = std::max(residual, std::abs(g - (i == j ? Complex{1.0} : Complex{0.0})));
    }
  }
  m.biorthogonality_residual = residual;
  return m;
}

ModeClassification classify_modes(const ModeSet& modes, double zero_tol) {
  ModeClassification cls;
  cls.zero_threshold = zero_tol * std::max(modes.matrix_scale, 0.0);
  const double re_tol = cls.zero_threshold;

  std::vector<bool> taken(static_cast<std::size_t>(modes.size()), false);
  for (Index i = 0; i < modes.size(); ++i) {
    const Complex lam = modes.eigenvalues[i];
    if (std::abs(lam) <= cls.zero_threshold) {
      cls.zero_modes.push_back(i);
      taken[static_cast<std::size_t>(i)] = true;
    }
  }
  for (Index i = 0; i < modes.size(); ++i) {
    if (taken[static_cast<std::size_t>(i)]) continue;
    const Complex lam = modes.eigenvalues[i];
    if (lam.imag() <= 0.0) continue;
    OscillatoryPair pair;
    pair.lambda = lam;
    pair.index_pos = i;
    pair.frequency = lam.imag();
    pair.undamped = std::abs(lam.real()) <= re_tol;
    pair.damped = lam.real() < -re_tol;
    // conjugate partner: nearest untaken mode to conj(lambda)
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < modes.size(); ++j) {
      if (taken[static_cast<std::size_t>(j)] || j == i || modes.eigenvalues[j].imag() > 0.0) {
        continue;
      }
      const double d = std::abs(modes.eigenvalues[j] - std::conj(lam));
      if (d < best) {
        best = d;
        pair.index_neg = j;
      }
    }
    taken[static_cast<std::size_t>(i)] = true;
    if (pair.index_neg >= 0) taken[static_cast<std::size_t>(pair.index_neg)] = true;
    cls.oscillatory.push_back(pair);
  }
  for (Index i = 0; i < modes.size(); ++i) {
    if (!taken[static_cast<std::size_t>(i)] && std::abs(modes.eigenvalues[i].imag()) == 0.0) {
      cls.aperiodic.push_back(i);
      taken[static_cast<std::size_t>(i)] = true;
    }
  }
  // lone complex leftovers (should not happen for real matrices)
  for (Index i = 0; i < modes.size(); ++i) {
    if (!taken[static_cast<std::size_t>(i)]) cls.aperiodic.push_back(i);
  }
  std::sort(cls.oscillatory.begin(), cls.oscillatory.end(),
            [](const OscillatoryPair& a, const OscillatoryPair& b) {
              return a.frequency < b.frequency;
            });
  return cls;
}

ParticipationMatrix participation_factors(const ModeSet& modes) {
  const Index n = modes.size();
  ParticipationMatrix pm;
  pm.states = modes.states;
  pm.p = Matrix::Zero(n, n);
  pm.valid.assign(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    if (modes.defective[static_cast<std::size_t>(i)]) continue;
    Vector prod(n);
    for (Index k = 0; k < n; ++k) {
      prod[k] = std::abs(modes.right(k, i) * modes.left(i, k));
    }
    const double total = prod.sum();
    if (!(total > 0)) continue;
    pm.p.col(i) = prod / total;
    pm.valid[static_cast<std::size_t>(i)] = true;
  }
  return pm;
}

std::vector<std::pair<StateLabel, double>> dominant_states(const ParticipationMatrix& pm,
                                                           Index mode, double threshold) {
  if (mode < 0 || mode >= pm.p.cols()) {
    throw Error(ErrorKind::ValidationError, "mode index out of range");
  }
  if (!pm.valid[static_cast<std::size_t>(mode)]) {
    throw Error(ErrorKind::DefectiveMode,
                "mode has no participation column (defective eigenvalue)");
  }
  std::vector<std::pair<StateLabel, double>> out;
  for (Index k = 0; k < pm.p.rows(); ++k) {
    if (pm.p(k, mode) >= threshold) {
      out.emplace_back(pm.states[static_cast<std::size_t>(k)], pm.p(k, mode));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

ModeMatch identify_interconnection_mode(const ModeSet& cis, const ModeSet& dis,
                                        double zero_tol) {
  const ModeClassification ccls = classify_modes(cis, zero_tol);
  const ModeClassification dcls = classify_modes(dis, zero_tol);

  ModeMatch match;
  match.cis_zero_count = static_cast<int>(ccls.zero_modes.size());
  match.dis_zero_count = static_cast<int>(dcls.zero_modes.size());

  std::vector<Complex> cis_reps, dis_reps;
  for (const auto& p : ccls.oscillatory) cis_reps.push_back(p.lambda);
  for (const auto& p : dcls.oscillatory) dis_reps.push_back(p.lambda);

  std::vector<bool> cis_used(cis_reps.size(), false);
  std::vector<bool> dis_used(dis_reps.size(), false);
  const std::size_t rounds = std::min(cis_reps.size(), dis_reps.size());
  for (std::size_t round = 0; round < rounds; ++round) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cis_reps.size(); ++i) {
      if (cis_used[i]) continue;
      for (std::size_t j = 0; j < dis_reps.size(); ++j) {
        if (dis_used[j]) continue;
        const double d = std::abs(cis_reps[i] - dis_reps[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    // A competing pairing through either endpoint that is within 1e-6 of the
    // chosen one cannot be resolved by distance alone.
    for (std::size_t i = 0; i < cis_reps.size(); ++i) {
      if (cis_used[i] || i == bi) continue;
      const double d = std::abs(cis_reps[i] - dis_reps[bj]);
      if (std::abs(d - best) < 1e-6) {
        std::ostringstream msg;
        msg << "ambiguous mode pairing: CIS modes at " << cis_reps[bi].imag() << " and "
            << cis_reps[i].imag() << " rad/s are equally close to DIS mode at "
            << dis_reps[bj].imag() << " rad/s";
        throw Error(ErrorKind::AmbiguousMatch, msg.str());
      }
    }
    for (std::size_t j = 0; j < dis_reps.size(); ++j) {
      if (dis_used[j] || j == bj) continue;
      const double d = std::abs(cis_reps[bi] - dis_reps[j]);
      if (std::abs(d - best) < 1e-6) {
        std::ostringstream msg;
        msg << "ambiguous mode pairing: DIS modes at " << dis_reps[bj].imag() << " and "
            << dis_reps[j].imag() << " rad/s are equally close to CIS mode at "
            << cis_reps[bi].imag() << " rad/s";
        throw Error(ErrorKind::AmbiguousMatch, msg.str());
      }
    }
    cis_used[bi] = true;
    dis_used[bj] = true;
    match.matched.push_back({cis_reps[bi], dis_reps[bj], best});
  }
  for (std::size_t i = 0; i < cis_reps.size(); ++i) {
    if (!cis_used[i]) match.interconnection.push_back(cis_reps[i]);
  }
  for (std::size_t j = 0; j < dis_reps.size(); ++j) {
    if (!dis_used[j]) match.unmatched_dis.push_back(dis_reps[j]);
  }
  std::sort(match.interconnection.begin(), match.interconnection.end(),
            [](Complex a, Complex b) { return a.imag() < b.imag(); });
  return match;
}

}  // namespace iaosim
