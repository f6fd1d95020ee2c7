#pragma once

#include <vector>

#include "iaosim/statespace.hpp"
#include "iaosim/types.hpp"

namespace iaosim {

/// Spectrum of a real system matrix with paired right (columns of `right`)
/// and left (rows of `left`) eigenvectors, biorthogonalized so that
/// left * right = I on the non-defective part. Modes belonging to a Jordan
/// block larger than 1x1 are flagged defective and excluded from that
/// normalization.
struct ModeSet {
  ComplexVector eigenvalues;
  ComplexMatrix right;
  ComplexMatrix left;
  std::vector<StateLabel> states;
  std::vector<bool> defective;
  double biorthogonality_residual = 0.0;  // max |left*right - I| over valid modes
  double matrix_scale = 0.0;              // ||A||_inf at decomposition time

  Index size() const { return eigenvalues.size(); }
  bool any_defective() const;
};

/// Full nonsymmetric eigendecomposition (real Schur based). Throws
/// NoConvergence if the QR iteration fails. Defective repeated eigenvalues
/// (e.g. the double zero of a lossless isolated system) are reported and
/// flagged, not treated as failure.
ModeSet eigen_decompose(const Matrix& A, std::vector<StateLabel> states = {});

struct OscillatoryPair {
  Complex lambda;               // upper-half-plane representative
  Index index_pos = -1;         // mode index with Im > 0
  Index index_neg = -1;         // conjugate partner, -1 if missing
  double frequency = 0.0;       // |Im lambda|, rad/s
  bool undamped = false;        // |Re| below tolerance
  bool damped = false;          // Re < -tolerance
};

struct ModeClassification {
  std::vector<Index> zero_modes;        // |lambda| < zero_tol * ||A||_inf
  std::vector<OscillatoryPair> oscillatory;
  std::vector<Index> aperiodic;         // real, nonzero
  double zero_threshold = 0.0;          // absolute
};

ModeClassification classify_modes(const ModeSet& modes, double zero_tol = 1e-6);

/// p(k, i) = |right(k,i) * left(i,k)| normalized to sum to one per mode.
/// Defective modes get no column (valid(i) = false).
struct ParticipationMatrix {
  Matrix p;                 // n_states x n_modes
  std::vector<bool> valid;  // per mode
  std::vector<StateLabel> states;
};

ParticipationMatrix participation_factors(const ModeSet& modes);

/// State labels with participation >= threshold in the given mode, sorted by
/// decreasing participation.
std::vector<std::pair<StateLabel, double>> dominant_states(const ParticipationMatrix& p,
                                                           Index mode, double threshold = 0.1);

/// Result of comparing a connected system's spectrum against its
/// tie-disconnected variant.
struct ModeMatch {
  struct Pairing {
    Complex cis;
    Complex dis;
    double distance = 0.0;
  };
  std::vector<Pairing> matched;
  std::vector<Complex> interconnection;  // CIS pairs with no DIS counterpart
  std::vector<Complex> unmatched_dis;
  int cis_zero_count = 0;
  int dis_zero_count = 0;
};

/// Greedy nearest-neighbor pairing of oscillatory conjugate-pair
/// representatives; leftover CIS pairs are the interconnection modes. Throws
/// AmbiguousMatch when two competing pairings are closer than 1e-6 apart.
ModeMatch identify_interconnection_mode(const ModeSet& cis, const ModeSet& dis,
                                        double zero_tol = 1e-6);

}  // namespace iaosim
