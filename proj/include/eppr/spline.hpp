#pragma once

#include <span>
#include <vector>

namespace eppr {

/// Clamped uniform knot vector on [-1, 1].
///
/// The first and last `degree + 1` knots sit at -1 and +1; the
/// `interior_count` interior knots split [-1, 1] into equal cells. The
/// spline space spanned by the resulting B-splines has dimension
/// `basis_count() == interior_count + degree + 1`.
class KnotVector {
public:
    KnotVector(int basis_count, int degree);

    int degree() const noexcept { return degree_; }
    int basis_count() const noexcept { return basis_count_; }
    int interior_count() const noexcept { return basis_count_ - degree_ - 1; }
    const std::vector<double>& knots() const noexcept { return knots_; }

    /// Index `mu` of the knot span [t_mu, t_mu+1) containing v, with the
    /// last non-empty span used for v == 1.
    int find_span(double v) const noexcept;

private:
    int degree_;
    int basis_count_;
    std::vector<double> knots_;
};

KnotVector make_uniform_knots(int basis_count, int degree);

/// All J basis values at v (Cox-de Boor). Throws domain error for v outside [-1, 1].
std::vector<double> eval_basis(const KnotVector& kv, double v);

/// First derivatives of all J basis functions at v. Uses the right limit at
/// interior knots and the left limit at v = 1.
std::vector<double> eval_basis_deriv(const KnotVector& kv, double v);

/// Non-allocating variants writing into `out` (size J). `out` is fully overwritten.
void eval_basis_into(const KnotVector& kv, double v, std::span<double> out);
void eval_basis_deriv_into(const KnotVector& kv, double v, std::span<double> out);

/// Value of the spline sum_j coeffs[j] * B_j(v).
double eval_spline(const KnotVector& kv, std::span<const double> coeffs, double v);
double eval_spline_deriv(const KnotVector& kv, std::span<const double> coeffs, double v);

}  // namespace eppr
