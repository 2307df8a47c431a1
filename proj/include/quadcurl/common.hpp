#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadcurl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::VectorXd;

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DegenerateMesh : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ElementConstruction : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedOrder : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SizeCap : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by the direct solvers; pivot() is the index (in the original
/// ordering) of the first pivot found singular to tolerance.
class SingularSystem : public std::runtime_error {
public:
    SingularSystem(const std::string& what, long pivot)
        : std::runtime_error(what), pivot_(pivot) {}
    long pivot() const { return pivot_; }

private:
    long pivot_;
};

/// Worker count for element loops: QUADCURL_THREADS if set, else the
/// hardware concurrency, never below one.
int thread_count();

/// Runs body(begin, end, chunk) over contiguous chunks of [0, n). Chunk
/// boundaries depend only on n and the thread count, and callers merge
/// per-chunk output in chunk order, so results do not depend on scheduling.
/// An exception from a chunk is rethrown after all chunks finish.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, int)>& body,
                     int nchunks);

}  // namespace quadcurl
