#pragma once

#include <cstddef>
#include <vector>

namespace playerval {

// Dense row-major matrix of doubles. Rows are samples, columns features.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double* row(std::size_t r) { return data.data() + r * cols; }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows);
        for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
        return out;
    }

    // Column-major copy; tree/lasso kernels walk columns hard.
    std::vector<std::vector<double>> columns() const {
        std::vector<std::vector<double>> out(cols);
        for (std::size_t c = 0; c < cols; ++c) out[c] = column(c);
        return out;
    }

    bool operator==(const Matrix&) const = default;
};

} // namespace playerval
