#include "stor/sobol.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "stor/rng.hpp"

namespace stor {

namespace {

constexpr int kBits = 32;

// Direction numbers for one dimension, v[c] scaled by 2^31..; dimension 0
// is the van der Corput sequence, higher dimensions use the standard
// primitive-polynomial recurrence.
std::vector<std::uint32_t> directions(int j) {
    std::vector<std::uint32_t> v(kBits);
    if (j == 0) {
        for (int c = 0; c < kBits; ++c) v[c] = 1u << (31 - c);
        return v;
    }
    // (s, a, m) per dimension: degree, polynomial coefficients, initial values
    static const struct {
        int s;
        std::uint32_t a;
        std::uint32_t m[4];
    } tab[] = {
        {1, 0, {1, 0, 0, 0}},
        {2, 1, {1, 3, 0, 0}},
    };
    const auto& e = tab[j - 1];
    for (int c = 0; c < e.s; ++c) v[c] = e.m[c] << (31 - c);
    for (int c = e.s; c < kBits; ++c) {
        v[c] = v[c - e.s] ^ (v[c - e.s] >> e.s);
        for (int i = 1; i < e.s; ++i)
            if (e.a >> (e.s - 1 - i) & 1u) v[c] ^= v[c - i];
    }
    return v;
}

}  // namespace

Eigen::MatrixXd gen_sobol(int dim, Eigen::Index n, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi, std::uint64_t seed) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("gen_sobol: dim must be 1..3");
    if (n < 1) throw std::invalid_argument("gen_sobol: n must be >= 1");
    if (lo.size() != dim || hi.size() != dim || ((hi - lo).array() <= 0.0).any())
        throw std::invalid_argument("gen_sobol: bad bounds");

    std::vector<std::vector<std::uint32_t>> v;
    std::vector<std::uint32_t> shift(dim, 0);
    for (int d = 0; d < dim; ++d) {
        v.push_back(directions(d));
        if (seed != 0)
            shift[static_cast<std::size_t>(d)] =
                static_cast<std::uint32_t>(rng::derive(seed, 0x534f424cu, static_cast<std::uint64_t>(d)));
    }

    Eigen::MatrixXd out(n, dim);
    std::vector<std::uint32_t> state(dim, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        // gray-code increment; sequence index starts at 1
        const int c = std::countr_zero(static_cast<std::uint64_t>(i) + 1);
        for (int d = 0; d < dim; ++d) {
            state[d] ^= v[d][c];
            std::uint32_t bits = state[d] ^ shift[d];
            double u = static_cast<double>(bits) * 0x1p-32;
            if (u == 0.0) u = 0x1p-33;  // keep scrambled points strictly inside
            out(i, d) = lo[d] + u * (hi[d] - lo[d]);
        }
    }
    return out;
}

Eigen::MatrixXd gen_lhs(int dim, Eigen::Index n, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi, std::uint64_t seed) {
    if (dim < 1 || n < 1) throw std::invalid_argument("gen_lhs: bad arguments");
    if (lo.size() != dim || hi.size() != dim || ((hi - lo).array() <= 0.0).any())
        throw std::invalid_argument("gen_lhs: bad bounds");
    Eigen::MatrixXd out(n, dim);
    for (int d = 0; d < dim; ++d) {
        rng::Engine eng(rng::derive(seed, 0x4c485344u, static_cast<std::uint64_t>(d)));
        std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        std::shuffle(perm.begin(), perm.end(), eng);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + eng.uniform01()) /
                             static_cast<double>(n);
            out(i, d) = lo[d] + u * (hi[d] - lo[d]);
        }
    }
    return out;
}

}  // namespace stor
