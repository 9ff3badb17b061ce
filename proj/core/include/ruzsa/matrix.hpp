#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace ruzsa {

// Symmetric positive-definite matrix; construction runs a Cholesky factorization.
class PDMatrix {
 public:
  explicit PDMatrix(Eigen::MatrixXd m);

  static PDMatrix identity(int n);

  const Eigen::MatrixXd& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double log_det() const { return log_det_; }
  double det() const;

  PDMatrix operator+(const PDMatrix& other) const;

 private:
  Eigen::MatrixXd m_;
  double log_det_ = 0.0;
};

nlohmann::json matrix_to_json(const PDMatrix& m);
PDMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace ruzsa
