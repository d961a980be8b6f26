#include "qunfold/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qunfold/error.hpp"

namespace qunfold {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr double kSignTol = 1e-10;
constexpr double kLexTol = 1e-12;
constexpr double kAxisTol = 1e-6;

}  // namespace

std::vector<Codeword> codewords(const std::vector<std::optional<std::size_t>>& parents) {
  const std::size_t n = parents.size();
  if (n == 0) throw Error("tree has no nodes");
  if (parents[0]) throw Error("node 0 must be the root");
  for (std::size_t k = 1; k < n; ++k) {
    if (!parents[k]) throw Error("node " + std::to_string(k) + " has no parent");
    if (*parents[k] >= n) throw Error("node " + std::to_string(k) + " has an unknown parent");
  }
  std::vector<Codeword> words(n, Codeword(n - 1));
  // 0 = unvisited, 1 = in progress, 2 = done
  std::vector<unsigned char> state(n, 0);
  state[0] = 2;
  for (std::size_t start = 1; start < n; ++start) {
    std::vector<std::size_t> chain;
    std::size_t k = start;
    while (state[k] != 2) {
      if (state[k] == 1) throw Error("parent links contain a cycle");
      state[k] = 1;
      chain.push_back(k);
      k = *parents[k];
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      std::size_t node = *it;
      words[node] = words[*parents[node]];
      words[node].set(node - 1);
      state[node] = 2;
    }
  }
  return words;
}

std::size_t hamming(const Codeword& a, const Codeword& b) { return (a ^ b).count(); }

CodeParams code_params(const std::vector<Codeword>& words) {
  if (words.size() < 2) throw Error("code parameters need at least two words");
  CodeParams p;
  p.word_length = words[0].size();
  p.count = words.size();
  for (const auto& w : words)
    if (w.size() != p.word_length) throw Error("codewords differ in length");
  std::size_t dmin = kNone;
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = i + 1; j < words.size(); ++j) dmin = std::min(dmin, hamming(words[i], words[j]));
  p.min_distance = dmin;
  p.degenerate = dmin == 0;
  p.correction = dmin == 0 ? 0 : (dmin - 1) / 2;
  return p;
}

Eigen::MatrixXd distance_matrix_d2(const std::vector<Codeword>& words) {
  const auto n = static_cast<Eigen::Index>(words.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = std::sqrt(static_cast<double>(
          hamming(words[static_cast<std::size_t>(i)], words[static_cast<std::size_t>(j)])));
      d(i, j) = v;
      d(j, i) = v;
    }
  return d;
}

namespace {

struct RawEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::size_t sweeps = 0;
};

inline void rotate(Eigen::MatrixXd& a, Eigen::Index i, Eigen::Index j, Eigen::Index k,
                   Eigen::Index l, double s, double tau) {
  const double g = a(i, j);
  const double h = a(k, l);
  a(i, j) = g - s * (h + g * tau);
  a(k, l) = h + s * (g - h * tau);
}

// Cyclic Jacobi on the upper triangle; the lower triangle is left untouched.
RawEigen jacobi(Eigen::MatrixXd a, std::size_t max_sweeps) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd d = a.diagonal();
  Eigen::VectorXd b = d;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);

  for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    double sm = 0.0;
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) sm += std::abs(a(p, q));
    if (sm == 0.0) return {d, v, sweep - 1};
    const double tresh = sweep < 4 ? 0.2 * sm / static_cast<double>(n * n) : 0.0;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double g = 100.0 * std::abs(a(p, q));
        if (sweep > 4 && std::abs(d(p)) + g == std::abs(d(p)) && std::abs(d(q)) + g == std::abs(d(q))) {
          a(p, q) = 0.0;
        } else if (std::abs(a(p, q)) > tresh) {
          double h = d(q) - d(p);
          double t;
          if (std::abs(h) + g == std::abs(h)) {
            t = a(p, q) / h;
          } else {
            const double theta = 0.5 * h / a(p, q);
            t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
            if (theta < 0.0) t = -t;
          }
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;
          const double tau = s / (1.0 + c);
          h = t * a(p, q);
          z(p) -= h;
          z(q) += h;
          d(p) -= h;
          d(q) += h;
          a(p, q) = 0.0;
          for (Eigen::Index j = 0; j < p; ++j) rotate(a, j, p, j, q, s, tau);
          for (Eigen::Index j = p + 1; j < q; ++j) rotate(a, p, j, j, q, s, tau);
          for (Eigen::Index j = q + 1; j < n; ++j) rotate(a, p, j, q, j, s, tau);
          for (Eigen::Index j = 0; j < n; ++j) rotate(v, j, p, j, q, s, tau);
        }
      }
    }
    b += z;
    d = b;
    z.setZero();
  }
  throw Error("Jacobi eigensolver did not converge within " + std::to_string(max_sweeps) + " sweeps");
}

void normalize_sign(Eigen::Ref<Eigen::VectorXd> u) {
  const double top = u.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (std::abs(u(i)) >= top - kSignTol) {
      if (u(i) < 0.0) u = -u;
      return;
    }
}

// True when a precedes b in descending lexicographic order.
bool lex_greater(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (std::abs(a(i) - b(i)) > kLexTol) return a(i) > b(i);
  return false;
}

// Orthonormal basis of span(cols) built from the projected canonical axes.
Eigen::MatrixXd axis_basis(const Eigen::MatrixXd& cols) {
  const Eigen::Index n = cols.rows();
  const Eigen::Index k = cols.cols();
  Eigen::MatrixXd out(n, k);
  Eigen::Index accepted = 0;
  for (Eigen::Index i = 0; i < n && accepted < k; ++i) {
    Eigen::VectorXd x = cols * cols.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j < accepted; ++j) x -= out.col(j).dot(x) * out.col(j);
    const double norm = x.norm();
    if (norm <= kAxisTol) continue;
    out.col(accepted++) = x / norm;
  }
  if (accepted < k) throw Error("could not rebuild a degenerate eigenspace");
  return out;
}

}  // namespace

Spectrum eigh(const Eigen::MatrixXd& a, const EighOptions& options) {
  if (a.rows() != a.cols()) throw Error("eigh needs a square matrix");
  const Eigen::Index n = a.rows();
  const double scale = n == 0 ? 0.0 : std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > options.symmetry_tol * scale)
        throw Error("eigh needs a symmetric matrix");

  RawEigen raw = jacobi(a, options.max_sweeps);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return raw.values(x) > raw.values(y); });

  Spectrum s;
  s.sweeps = raw.sweeps;
  s.values.resize(n);
  s.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    s.values(k) = raw.values(order[static_cast<std::size_t>(k)]);
    s.vectors.col(k) = raw.vectors.col(order[static_cast<std::size_t>(k)]);
  }
  s.spectral_radius = n == 0 ? 0.0 : s.values.cwiseAbs().maxCoeff();
  s.degeneracy_eps = options.degeneracy_rel * s.spectral_radius;

  for (Eigen::Index k = 0; k < n; ++k) normalize_sign(s.vectors.col(k));

  for (Eigen::Index begin = 0; begin < n;) {
    Eigen::Index end = begin + 1;
    while (end < n && s.values(end - 1) - s.values(end) <= s.degeneracy_eps) ++end;
    if (end - begin > 1) {
      Eigen::MatrixXd rebuilt = axis_basis(s.vectors.middleCols(begin, end - begin));
      std::vector<Eigen::VectorXd> cols;
      for (Eigen::Index j = 0; j < rebuilt.cols(); ++j) {
        Eigen::VectorXd u = rebuilt.col(j);
        normalize_sign(u);
        cols.push_back(std::move(u));
      }
      std::stable_sort(cols.begin(), cols.end(), lex_greater);
      for (Eigen::Index j = 0; j < end - begin; ++j)
        s.vectors.col(begin + j) = cols[static_cast<std::size_t>(j)];
    }
    begin = end;
  }

  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(s.values(i) - s.values(j)) <= s.degeneracy_eps)
        s.degenerate_pairs.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return s;
}

double max_residual(const Eigen::MatrixXd& a, const Spectrum& s) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    Eigen::VectorXd r = a * s.vectors.col(k) - s.values(k) * s.vectors.col(k);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

double orthonormality_error(const Spectrum& s) {
  const Eigen::Index n = s.vectors.cols();
  if (n == 0) return 0.0;
  return (s.vectors.transpose() * s.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

SchoenbergCheck schoenberg_check(const Spectrum& s, double rel) {
  SchoenbergCheck c;
  const double cut = rel * s.spectral_radius;
  for (Eigen::Index k = 0; k < s.values.size(); ++k)
    if (s.values(k) > cut) ++c.positive;
  c.applicable = s.size() >= 2;
  c.holds = c.applicable && c.positive == 1;
  return c;
}

Eigen::MatrixXd PreferredBasis::basis() const {
  const auto n = static_cast<Eigen::Index>(worlds.size());
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index w = 0; w < n; ++w)
    b.col(w) = spectrum.vectors.col(static_cast<Eigen::Index>(vector_of_world[static_cast<std::size_t>(w)]));
  return b;
}

Eigen::VectorXd PreferredBasis::vector_for(std::size_t world) const {
  return spectrum.vectors.col(static_cast<Eigen::Index>(vector_of_world.at(world)));
}

double PreferredBasis::value_for(std::size_t world) const {
  return spectrum.values(static_cast<Eigen::Index>(vector_of_world.at(world)));
}

Eigen::MatrixXd PreferredBasis::projector(std::size_t k) const {
  Eigen::VectorXd u = spectrum.vectors.col(static_cast<Eigen::Index>(k));
  return u * u.transpose();
}

Eigen::MatrixXd PreferredBasis::reconstruct() const {
  return spectrum.vectors * spectrum.values.asDiagonal() * spectrum.vectors.transpose();
}

PreferredBasis preferred_basis(std::vector<WorldId> worlds, Spectrum spectrum, PairingRule rule) {
  const std::size_t n = worlds.size();
  if (n != spectrum.size())
    throw Error("world count " + std::to_string(n) + " differs from spectrum size " +
                std::to_string(spectrum.size()));
  std::vector<std::size_t> pairing(n, kNone);
  if (rule == PairingRule::Positional) {
    std::iota(pairing.begin(), pairing.end(), std::size_t{0});
  } else {
    std::vector<bool> taken(n, false);
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t best = kNone;
      double best_abs = -1.0;
      for (std::size_t w = 0; w < n; ++w) {
        if (taken[w]) continue;
        double x = std::abs(spectrum.vectors(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(k)));
        if (x > best_abs) {
          best_abs = x;
          best = w;
        }
      }
      taken[best] = true;
      pairing[best] = k;
    }
  }
  return PreferredBasis{std::move(worlds), std::move(spectrum), rule, std::move(pairing)};
}

const char* to_string(PairingRule r) noexcept {
  return r == PairingRule::Positional ? "positional" : "max-component";
}

PairingRule parse_pairing_rule(const std::string& text) {
  if (text == "positional") return PairingRule::Positional;
  if (text == "max-component") return PairingRule::MaxComponent;
  throw Error("unknown pairing rule '" + text + "'");
}

}  // namespace qunfold
