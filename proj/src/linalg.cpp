#include "prony/linalg.hpp"

#include <random>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "prony/error.hpp"

namespace prony {

void require_rank_tolerance(double rank_tolerance)
{
    if (!(rank_tolerance > 0.0 && rank_tolerance < 1.0)) throw Error("rank tolerance must lie in (0,1)");
}

Eigen::Index numerical_rank(const Eigen::VectorXd& singular_values, double rank_tolerance)
{
    if (singular_values.size() == 0 || singular_values[0] <= 0.0) return 0;
    const double threshold = rank_tolerance * singular_values[0];
    return (singular_values.array() > threshold).count();
}

bool ambiguous_rank_split(const Eigen::VectorXd& singular_values, double rank_tolerance)
{
    if (singular_values.size() == 0 || singular_values[0] <= 0.0) return false;
    const double threshold = rank_tolerance * singular_values[0];
    return ((singular_values.array() > threshold / 10.0) && (singular_values.array() < threshold * 10.0)).any();
}

template <typename Scalar>
KernelBasis<Scalar> numerical_kernel(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& matrix,
                                     double rank_tolerance)
{
    require_rank_tolerance(rank_tolerance);
    if (matrix.size() == 0) throw Error("cannot compute the kernel of an empty matrix");

    Eigen::BDCSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(matrix, Eigen::ComputeFullV);
    KernelBasis<Scalar> out;
    out.ambient = matrix.cols();
    out.tolerance = rank_tolerance;
    out.singular_values = svd.singularValues();
    out.rank = numerical_rank(out.singular_values, rank_tolerance);
    out.signal = svd.matrixV().leftCols(out.rank);
    out.kernel = svd.matrixV().rightCols(out.ambient - out.rank);
    return out;
}

template KernelBasis<double> numerical_kernel(const Eigen::MatrixXd&, double);
template KernelBasis<std::complex<double>> numerical_kernel(const Eigen::MatrixXcd&, double);

KernelBasis<std::complex<double>> sketched_kernel(Eigen::Index rows, Eigen::Index cols, const ComplexOperator& apply,
                                                  const ComplexOperator& apply_adjoint, double rank_tolerance,
                                                  std::uint64_t seed)
{
    require_rank_tolerance(rank_tolerance);
    if (rows == 0 || cols == 0) throw Error("cannot compute the kernel of an empty matrix");

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    const Eigen::Index full = std::min(rows, cols);

    for (Eigen::Index width = 16; 2 * width <= full; width *= 2) {
        Eigen::MatrixXcd omega(cols, width);
        for (Eigen::Index j = 0; j < width; ++j)
            for (Eigen::Index i = 0; i < cols; ++i) omega(i, j) = {normal(gen), normal(gen)};

        const Eigen::MatrixXcd range = apply(omega);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(range);
        const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(rows, width);
        const Eigen::MatrixXcd projected = apply_adjoint(q).adjoint();  // q^* A, width x cols

        Eigen::BDCSVD<Eigen::MatrixXcd> svd(projected, Eigen::ComputeThinV);
        const Eigen::VectorXd sv = svd.singularValues();
        const Eigen::Index rank = numerical_rank(sv, rank_tolerance);
        // a handful of trailing sketch directions must fall below the threshold
        if (rank + 4 > width) continue;

        KernelBasis<std::complex<double>> out;
        out.ambient = cols;
        out.rank = rank;
        out.tolerance = rank_tolerance;
        out.singular_values = sv;
        out.signal = svd.matrixV().leftCols(rank);
        out.kernel_materialized = false;
        return out;
    }

    return numerical_kernel<std::complex<double>>(apply(Eigen::MatrixXcd::Identity(cols, cols)), rank_tolerance);
}

}  // namespace prony
