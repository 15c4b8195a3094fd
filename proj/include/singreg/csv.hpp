#pragma once

// CSV helpers and grid construction shared by the CLI and the figure writer.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace singreg {

// 17 significant digits, %.17g style; parses back to the same double.
std::string format_double(double value);

// Inclusive grid with `steps` points, linear or log spaced.
Eigen::ArrayXd make_grid(double x_min, double x_max, std::size_t steps, bool log_spaced);

// Evaluates f on every point using up to `threads` workers. Each output slot
// is written by exactly one worker, so the result does not depend on the
// thread count.
Eigen::ArrayXd parallel_map(const Eigen::ArrayXd& x, const std::function<double(double)>& f,
                            unsigned threads);

// Header line then one row per grid point.
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<Eigen::ArrayXd>& columns);

} // namespace singreg
