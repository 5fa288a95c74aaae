#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace chanstat {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File-level failures: unreadable paths, truncated payloads, malformed JSON text.
class IoError : public Error {
public:
    using Error::Error;
};

// Domain failures: bad dimensions, aliasing parameters, inconsistent metadata.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Dense row-major matrix.  Deliberately minimal: the numeric work happens in
// the kernel layer on raw pointers, this just owns storage and bounds.
template <typename T>
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    T* row(std::size_t r) { return data_.data() + r * cols_; }
    const T* row(std::size_t r) const { return data_.data() + r * cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    bool operator==(const Mat&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using CMat = Mat<cplx>;
using RMat = Mat<double>;

}  // namespace chanstat
