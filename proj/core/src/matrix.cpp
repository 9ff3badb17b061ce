#include "ruzsa/matrix.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "ruzsa/error.hpp"

namespace ruzsa {

PDMatrix::PDMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) throw ValidationError("PD matrix must be square and nonempty");
  if (!m_.allFinite()) throw ValidationError("PD matrix has non-finite entries");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw ValidationError("matrix is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(m_);
  if (llt.info() != Eigen::Success) throw ValidationError("matrix is not positive definite");
  const auto& l = llt.matrixL();
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    if (!(l(i, i) > 0.0)) throw ValidationError("matrix is not positive definite");
    log_det_ += 2.0 * std::log(l(i, i));
  }
}

PDMatrix PDMatrix::identity(int n) { return PDMatrix(Eigen::MatrixXd::Identity(n, n)); }

double PDMatrix::det() const { return std::exp(log_det_); }

PDMatrix PDMatrix::operator+(const PDMatrix& other) const {
  if (other.dim() != dim()) throw DomainError("PD matrices of different dimensions");
  return PDMatrix(m_ + other.m_);
}

nlohmann::json matrix_to_json(const PDMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.dim(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.dim()));
    for (int k = 0; k < m.dim(); ++k) r[static_cast<std::size_t>(k)] = m.matrix()(i, k);
    rows.push_back(r);
  }
  return rows;
}

PDMatrix matrix_from_json(const nlohmann::json& j) {
  try {
    const auto n = static_cast<Eigen::Index>(j.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = j.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != n) throw ParseError("matrix rows must have equal length");
      for (Eigen::Index k = 0; k < n; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    return PDMatrix(std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed matrix: ") + e.what());
  }
}

}  // namespace ruzsa
